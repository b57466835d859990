#include "agile/survey/survey.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "agile/csv.hpp"
#include "agile/errors.hpp"

namespace agile::survey {

namespace {

constexpr std::array<std::string_view, 9> kClaims = {
    "I wrote code using a test-driven approach",
    "I practiced collective code ownership",
    "The user stories of the sprint were too large",
    "There were duplicates of user stories",
    "I started implementing only shortly before the deadline",
    "We followed the \"check in early, check in often\" principle",
    "I worked on too many user stories simultaneously",
    "We conducted useful code reviews",
    "Our team has successfully implemented the agile values",
};

constexpr std::array<std::string_view, 9> kLabels = {"Q1", "Q2", "Q3", "Q4", "Q5",
                                                     "Q6", "Q7", "Q8", "Q9"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view question_label(QuestionId q) { return kLabels[static_cast<std::size_t>(q)]; }

std::string_view claim_text(QuestionId q) { return kClaims[static_cast<std::size_t>(q)]; }

QuestionId parse_question(std::string_view label) {
    const std::string l = lower(label);
    for (std::size_t i = 0; i < kLabels.size(); ++i)
        if (l == lower(kLabels[i])) return static_cast<QuestionId>(i);
    throw ValidationError("unknown question label: '" + std::string(label) + "'");
}

int encode_likert(std::string_view label) {
    const std::string l = lower(label);
    if (l == "strongly agree") return 1;
    if (l == "agree") return 2;
    if (l == "neutral") return 3;
    if (l == "disagree") return 4;
    if (l == "strongly disagree") return 5;
    throw ParseError("unknown agreement label: '" + std::string(label) + "'");
}

std::vector<LikertResponse> load_survey(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open survey file " + file.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError(file.filename().string() + ": empty survey file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = csv::split_row(line);
    std::vector<std::string> expected = {"team", "developer", "role", "sprint"};
    for (auto q : kLabels) expected.push_back(lower(q));
    if (header.size() != expected.size())
        throw ParseError(file.filename().string() + ": expected 13-column header team,developer,role,sprint,q1..q9");
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (lower(header[i]) != expected[i])
            throw ParseError(file.filename().string() + ": unexpected header column '" + header[i] + "'");

    std::vector<LikertResponse> responses;
    std::set<std::pair<std::string, int>> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = file.filename().string() + ":" + std::to_string(lineno);
        const std::vector<std::string> fields = csv::split_row(line);
        if (fields.size() != expected.size())
            throw ParseError(where + ": expected " + std::to_string(expected.size()) + " fields");

        LikertResponse base;
        base.team_id = fields[0];
        base.developer_id = fields[1];
        base.role = store::parse_role(fields[2]);
        const auto sprint = csv::parse_int(fields[3]);
        if (!sprint || *sprint < 1 || *sprint > 4)
            throw ValidationError(where + ": sprint must be an integer in 1..4");
        base.sprint_id = static_cast<int>(*sprint);
        if (base.developer_id.empty()) throw ValidationError(where + ": empty developer id");

        if (!seen.emplace(base.developer_id, base.sprint_id).second)
            throw ValidationError(where + ": duplicate response row for developer '" + base.developer_id +
                                  "' sprint " + std::to_string(base.sprint_id));

        for (std::size_t qi = 0; qi < kAllQuestions.size(); ++qi) {
            LikertResponse r = base;
            r.question = kAllQuestions[qi];
            const std::string& cell = fields[4 + qi];
            if (!cell.empty()) {
                const auto rating = csv::parse_int(cell);
                if (!rating || *rating < 1 || *rating > 5)
                    throw ValidationError(where + ": rating for " + std::string(kLabels[qi]) +
                                          " must be blank or an integer in 1..5, got '" + cell + "'");
                r.rating = static_cast<int>(*rating);
            }
            responses.push_back(std::move(r));
        }
    }
    return responses;
}

void write_survey(std::span<const LikertResponse> responses, const std::filesystem::path& file) {
    // regroup into one row per (developer, sprint)
    struct RowKey {
        std::string team, developer, role;
        int sprint;
        bool operator<(const RowKey& o) const {
            return std::tie(team, developer, sprint, role) < std::tie(o.team, o.developer, o.sprint, o.role);
        }
    };
    std::map<RowKey, std::array<std::optional<int>, 9>> rows;
    for (const auto& r : responses) {
        RowKey key{r.team_id, r.developer_id, std::string(store::role_name(r.role)), r.sprint_id};
        rows[key][static_cast<std::size_t>(r.question)] = r.rating;
    }

    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write survey file " + file.string());
    out << "team,developer,role,sprint,q1,q2,q3,q4,q5,q6,q7,q8,q9\n";
    for (const auto& [key, ratings] : rows) {
        std::vector<std::string> fields = {key.team, key.developer, key.role, std::to_string(key.sprint)};
        for (const auto& rating : ratings) fields.push_back(rating ? std::to_string(*rating) : "");
        out << csv::join_row(fields) << '\n';
    }
}

DescriptiveStats descriptive_stats(std::span<const double> valid_values, long missing_count) {
    DescriptiveStats stats;
    stats.valid = static_cast<long>(valid_values.size());
    stats.missing = missing_count;
    const std::size_t n = valid_values.size();
    if (n == 0) return stats;

    double sum = 0.0;
    for (double v : valid_values) sum += v;
    const double mean = sum / static_cast<double>(n);
    stats.mean = mean;

    std::vector<double> sorted(valid_values.begin(), valid_values.end());
    std::sort(sorted.begin(), sorted.end());
    stats.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    if (n >= 2) {
        double m2 = 0.0, m3 = 0.0;
        for (double v : valid_values) {
            const double d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
        }
        const double nd = static_cast<double>(n);
        stats.variance = m2 / (nd - 1.0);
        stats.stdev = std::sqrt(*stats.variance);
        if (n >= 3) {
            stats.stderr_skewness =
                std::sqrt(6.0 * nd * (nd - 1.0) / ((nd - 2.0) * (nd + 1.0) * (nd + 3.0)));
            m2 /= nd;
            m3 /= nd;
            if (m2 > 0.0) {
                const double g1 = m3 / std::pow(m2, 1.5);
                stats.skewness = g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
            }
        }
    }
    return stats;
}

}  // namespace agile::survey
