#include "agile/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "agile/csv.hpp"
#include "agile/errors.hpp"

namespace agile::analysis {

namespace {

using store::Role;

constexpr std::array<Role, 3> kRoles = {Role::ProductOwner, Role::ScrumMaster, Role::Developer};

std::vector<int> sorted_sprints(std::span<const LikertResponse> responses) {
    std::set<int> sprints;
    for (const auto& r : responses) sprints.insert(r.sprint_id);
    return {sprints.begin(), sprints.end()};
}

std::vector<std::string> sorted_teams(std::span<const LikertResponse> responses) {
    std::set<std::string> teams;
    for (const auto& r : responses) teams.insert(r.team_id);
    return {teams.begin(), teams.end()};
}

// rating lookup keyed by (developer, sprint, question)
struct RatingIndex {
    std::map<std::tuple<std::string, int, QuestionId>, int> ratings;

    explicit RatingIndex(std::span<const LikertResponse> responses) {
        for (const auto& r : responses)
            if (r.rating) ratings.emplace(std::make_tuple(r.developer_id, r.sprint_id, r.question), *r.rating);
    }

    std::optional<int> get(const std::string& dev, int sprint, QuestionId q) const {
        const auto it = ratings.find(std::make_tuple(dev, sprint, q));
        if (it == ratings.end()) return std::nullopt;
        return it->second;
    }
};

std::vector<std::string> sorted_respondents(std::span<const LikertResponse> responses) {
    std::set<std::string> devs;
    for (const auto& r : responses) devs.insert(r.developer_id);
    return {devs.begin(), devs.end()};
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 1469598103934665603ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

PairingPlan default_pairing_plan() {
    return {{QuestionId::Q1, MeasureId::RTA}, {QuestionId::Q2, MeasureId::UFE},
            {QuestionId::Q5, MeasureId::LMC}, {QuestionId::Q6, MeasureId::ALC},
            {QuestionId::Q7, MeasureId::UUS}, {QuestionId::Q8, MeasureId::PRC}};
}

std::string AnalysisConfig::canonical_string() const {
    std::string s = "exclude_product_owners=";
    s += exclude_product_owners ? "1" : "0";
    s += ";pooling=";
    s += pooling == Pooling::Pooled ? "pooled" : "per-team";
    s += ";agreement_units=";
    s += agreement_units == AgreementUnits::QuestionSprint ? "question-sprint" : "question";
    s += ";post_hoc_alpha=" + csv::format_double(post_hoc_alpha);
    s += ";histogram_bins=" + std::to_string(histogram_bins);
    s += ";plan=";
    for (const auto& [q, m] : plan) {
        s += std::string(survey::question_label(q)) + ":" + std::string(measures::measure_name(m)) + ",";
    }
    return s;
}

std::vector<QuestionTestRow> perception_change(std::span<const LikertResponse> responses,
                                                   double post_hoc_alpha) {
    const std::vector<int> sprints = sorted_sprints(responses);
    const std::vector<std::string> respondents = sorted_respondents(responses);
    const RatingIndex index(responses);

    std::vector<QuestionTestRow> rows;
    for (QuestionId q : survey::kAllQuestions) {
        QuestionTestRow row;
        row.question = q;
        if (sprints.size() < 2) {
            row.note = "not testable: fewer than 2 sprints";
            rows.push_back(std::move(row));
            continue;
        }

        // complete blocks only: respondents rated in every sprint
        std::vector<std::vector<double>> blocks;
        for (const auto& dev : respondents) {
            std::vector<double> block;
            for (int s : sprints) {
                const auto rating = index.get(dev, s, q);
                if (!rating) break;
                block.push_back(static_cast<double>(*rating));
            }
            if (block.size() == sprints.size()) blocks.push_back(std::move(block));
        }
        if (blocks.size() < 2) {
            row.note = "not testable: fewer than 2 complete blocks";
            rows.push_back(std::move(row));
            continue;
        }

        row.test = stats::friedman_test(blocks);

        if (row.test->p_value && *row.test->p_value < post_hoc_alpha) {
            // all sprint pairs, Wilcoxon signed rank on pairwise-complete
            // respondents, Bonferroni over the pair count
            const int m = static_cast<int>(sprints.size() * (sprints.size() - 1) / 2);
            for (std::size_t i = 0; i < sprints.size(); ++i) {
                for (std::size_t j = i + 1; j < sprints.size(); ++j) {
                    std::vector<double> diffs;
                    for (const auto& dev : respondents) {
                        const auto a = index.get(dev, sprints[i], q);
                        const auto b = index.get(dev, sprints[j], q);
                        if (a && b) diffs.push_back(static_cast<double>(*a) - static_cast<double>(*b));
                    }
                    stats::PairwiseResult pr;
                    pr.group_a = "sprint " + std::to_string(sprints[i]);
                    pr.group_b = "sprint " + std::to_string(sprints[j]);
                    if (diffs.empty()) {
                        pr.z = 0.0;
                        pr.p_unadjusted = 1.0;
                        pr.p_adjusted = 1.0;
                    } else {
                        const stats::StatTestResult w = stats::wilcoxon_signed_rank(diffs);
                        pr.z = w.extra("z");
                        pr.p_unadjusted = *w.p_value;
                        pr.p_adjusted = std::min(1.0, pr.p_unadjusted * m);
                    }
                    row.post_hoc.push_back(std::move(pr));
                }
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AssociationRow> value_associations(std::span<const LikertResponse> responses) {
    const RatingIndex index(responses);
    const std::vector<int> sprints = sorted_sprints(responses);
    const std::vector<std::string> respondents = sorted_respondents(responses);

    std::vector<AssociationRow> rows;
    for (QuestionId q : survey::kAllQuestions) {
        if (q == QuestionId::Q9) continue;
        AssociationRow row;
        row.label = std::string(survey::question_label(q)) + " to Q9";
        std::vector<double> x, y;
        for (const auto& dev : respondents) {
            for (int s : sprints) {
                const auto a = index.get(dev, s, q);
                const auto b = index.get(dev, s, QuestionId::Q9);
                if (a && b) {
                    x.push_back(static_cast<double>(*a));
                    y.push_back(static_cast<double>(*b));
                }
            }
        }
        row.n = static_cast<long>(x.size());
        try {
            row.test = stats::kendall_tau(x, y);
        } catch (const DataError& e) {
            row.note = std::string("undefined: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<QuestionTestRow> role_effects(std::span<const LikertResponse> responses,
                                              double post_hoc_alpha) {
    std::vector<QuestionTestRow> rows;
    for (QuestionId q : survey::kAllQuestions) {
        QuestionTestRow row;
        row.question = q;

        std::vector<std::vector<double>> groups;
        std::vector<std::string> labels;
        for (Role role : kRoles) {
            std::vector<double> values;
            for (const auto& r : responses)
                if (r.question == q && r.role == role && r.rating)
                    values.push_back(static_cast<double>(*r.rating));
            if (!values.empty()) {
                groups.push_back(std::move(values));
                labels.emplace_back(store::role_name(role));
            }
        }
        if (groups.size() < 2) {
            row.note = "not testable: responses from fewer than 2 roles";
            rows.push_back(std::move(row));
            continue;
        }

        row.test = stats::kruskal_wallis(groups);
        if (row.test->p_value && *row.test->p_value < post_hoc_alpha)
            row.post_hoc = stats::dunn_test(groups, labels);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MissingByRoleRow> missing_by_role(std::span<const LikertResponse> responses) {
    std::vector<MissingByRoleRow> rows;
    for (QuestionId q : survey::kAllQuestions) {
        MissingByRoleRow row;
        row.question = q;
        for (const auto& r : responses) {
            if (r.question != q) continue;
            const auto role_idx = static_cast<std::size_t>(r.role);
            ++row.solicited[role_idx];
            if (!r.rating) ++row.missing[role_idx];
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<AgreementCell> team_agreement(std::span<const LikertResponse> responses,
                                              AgreementScope scope, AgreementGrouping grouping, AgreementUnits units) {
    std::vector<LikertResponse> kept;
    for (const auto& r : responses) {
        if (scope == AgreementScope::ExcludingProductOwners && r.role == Role::ProductOwner) continue;
        kept.push_back(r);
    }

    std::vector<std::pair<std::string, std::vector<LikertResponse>>> groups;
    if (grouping == AgreementGrouping::PerTeam) {
        for (const auto& team : sorted_teams(kept)) {
            std::vector<LikertResponse> members;
            for (const auto& r : kept)
                if (r.team_id == team) members.push_back(r);
            groups.emplace_back(team, std::move(members));
        }
    } else {
        for (Role role : kRoles) {
            std::vector<LikertResponse> members;
            for (const auto& r : kept)
                if (r.role == role) members.push_back(r);
            if (!members.empty()) groups.emplace_back(std::string(store::role_name(role)), std::move(members));
        }
    }

    std::vector<AgreementCell> cells;
    for (auto& [label, group] : groups) {
        AgreementCell cell;
        cell.group = label;
        const std::vector<std::string> raters = sorted_respondents(group);
        const std::vector<int> sprints = sorted_sprints(group);
        const RatingIndex index(group);
        cell.raters = static_cast<long>(raters.size());

        // units x raters matrix
        std::vector<std::vector<std::optional<double>>> matrix;
        if (units == AgreementUnits::QuestionSprint) {
            for (QuestionId q : survey::kAllQuestions) {
                for (int s : sprints) {
                    std::vector<std::optional<double>> unit;
                    for (const auto& dev : raters) {
                        const auto rating = index.get(dev, s, q);
                        unit.push_back(rating ? std::optional<double>(*rating) : std::nullopt);
                    }
                    matrix.push_back(std::move(unit));
                }
            }
        } else {
            // per-question units: each rater's median across sprints
            for (QuestionId q : survey::kAllQuestions) {
                std::vector<std::optional<double>> unit;
                for (const auto& dev : raters) {
                    std::vector<double> values;
                    for (int s : sprints) {
                        const auto rating = index.get(dev, s, q);
                        if (rating) values.push_back(static_cast<double>(*rating));
                    }
                    if (values.empty()) {
                        unit.push_back(std::nullopt);
                    } else {
                        std::sort(values.begin(), values.end());
                        const std::size_t n = values.size();
                        unit.push_back(n % 2 == 1 ? values[n / 2]
                                                  : 0.5 * (values[n / 2 - 1] + values[n / 2]));
                    }
                }
                matrix.push_back(std::move(unit));
            }
        }
        cell.units = static_cast<long>(matrix.size());

        if (cell.raters < 2) {
            cell.note = "not computable: fewer than 2 raters";
            cells.push_back(std::move(cell));
            continue;
        }
        try {
            cell.alpha = stats::krippendorff_alpha(matrix).statistic;
        } catch (const DataError& e) {
            cell.note = std::string("not computable: ") + e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::vector<AssociationRow> survey_measurement_associations(
    std::span<const LikertResponse> responses, std::span<const MeasurementRecord> records,
    const PairingPlan& plan) {
    const RatingIndex index(responses);

    std::map<std::tuple<std::string, int, MeasureId>, double> values;
    std::set<std::pair<std::string, int>> measurement_keys;
    for (const auto& r : records) {
        measurement_keys.emplace(r.developer_id, r.sprint_id);
        if (!r.missing) values.emplace(std::make_tuple(r.developer_id, r.sprint_id, r.measure), r.value);
    }
    std::set<std::pair<std::string, int>> survey_keys;
    for (const auto& r : responses) survey_keys.emplace(r.developer_id, r.sprint_id);

    std::vector<std::pair<std::string, int>> joint;
    std::set_intersection(survey_keys.begin(), survey_keys.end(), measurement_keys.begin(),
                          measurement_keys.end(), std::back_inserter(joint));
    if (joint.empty()) {
        auto sample = [](const std::set<std::pair<std::string, int>>& keys) {
            std::string s;
            int shown = 0;
            for (const auto& [dev, sprint] : keys) {
                if (shown++ == 3) break;
                if (!s.empty()) s += ", ";
                s += dev + "/" + std::to_string(sprint);
            }
            return s.empty() ? std::string("none") : s;
        };
        throw DataError("survey and measurement keys do not overlap; survey (developer/sprint): " +
                        sample(survey_keys) + "; measurements: " + sample(measurement_keys));
    }

    std::vector<AssociationRow> rows;
    for (const auto& [q, m] : plan) {
        AssociationRow row;
        row.label = std::string(survey::question_label(q)) + " - " + std::string(measures::measure_name(m));
        std::vector<double> x, y;
        for (const auto& [dev, sprint] : joint) {
            const auto rating = index.get(dev, sprint, q);
            const auto it = values.find(std::make_tuple(dev, sprint, m));
            if (rating && it != values.end()) {
                x.push_back(static_cast<double>(*rating));
                y.push_back(it->second);
            }
        }
        row.n = static_cast<long>(x.size());
        try {
            row.test = stats::kendall_tau(x, y);
        } catch (const DataError& e) {
            row.note = std::string("undefined: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MeasureDescriptivesRow> measurement_descriptives(
    std::span<const MeasurementRecord> records, int histogram_bins) {
    std::vector<MeasureDescriptivesRow> rows;
    for (MeasureId m : measures::kAllMeasures) {
        MeasureDescriptivesRow row;
        row.measure = m;
        std::vector<double> values;
        long missing = 0;
        for (const auto& r : records) {
            if (r.measure != m) continue;
            if (r.missing) ++missing;
            else values.push_back(r.value);
        }
        row.stats = survey::descriptive_stats(values, missing);

        if (!values.empty() && histogram_bins > 0) {
            const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
            row.histogram.lo = *lo_it;
            row.histogram.hi = *hi_it;
            const int bins = row.histogram.lo == row.histogram.hi ? 1 : histogram_bins;
            row.histogram.counts.assign(bins, 0);
            const double width = (row.histogram.hi - row.histogram.lo) / bins;
            for (double v : values) {
                int b = width > 0 ? static_cast<int>((v - row.histogram.lo) / width) : 0;
                if (b >= bins) b = bins - 1;
                ++row.histogram.counts[b];
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

AnalysisReport analyze(std::span<const LikertResponse> responses,
                       std::span<const MeasurementRecord> records, const AnalysisConfig& config) {
    if (responses.empty()) throw DataError("analyze: survey data is empty");
    if (records.empty()) throw DataError("analyze: measurement data is empty");

    AnalysisReport report;

    for (QuestionId q : survey::kAllQuestions) {
        std::vector<double> values;
        long missing = 0;
        for (const auto& r : responses) {
            if (r.question != q) continue;
            if (r.rating) values.push_back(static_cast<double>(*r.rating));
            else ++missing;
        }
        report.survey_descriptives.emplace_back(q, survey::descriptive_stats(values, missing));
    }

    report.perception_change = perception_change(responses, config.post_hoc_alpha);
    if (config.pooling == Pooling::PerTeam) {
        for (const auto& team : sorted_teams(responses)) {
            std::vector<LikertResponse> subset;
            for (const auto& r : responses)
                if (r.team_id == team) subset.push_back(r);
            report.perception_change_per_team.emplace(team,
                                                      perception_change(subset, config.post_hoc_alpha));
        }
    }

    report.value_associations = value_associations(responses);
    report.role_effects = role_effects(responses, config.post_hoc_alpha);
    report.missing_by_role = missing_by_role(responses);

    const AgreementScope headline_scope = config.exclude_product_owners
                                        ? AgreementScope::ExcludingProductOwners
                                        : AgreementScope::AllRoles;
    report.team_agreement =
        team_agreement(responses, headline_scope, AgreementGrouping::PerTeam, config.agreement_units);
    report.team_agreement_no_po = team_agreement(responses, AgreementScope::ExcludingProductOwners,
                                                     AgreementGrouping::PerTeam, config.agreement_units);
    report.role_agreement =
        team_agreement(responses, AgreementScope::AllRoles, AgreementGrouping::PerRole, config.agreement_units);

    report.measurement_descriptives = measurement_descriptives(records, config.histogram_bins);
    report.survey_measurement_associations =
        survey_measurement_associations(responses, records, config.plan);

    // deterministic identifiers: content hashes, no wall clock
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& r : responses) {
        h = fnv1a(r.developer_id, h);
        h = fnv1a(std::to_string(r.sprint_id), h);
        h = fnv1a(survey::question_label(r.question), h);
        h = fnv1a(r.rating ? std::to_string(*r.rating) : "-", h);
    }
    for (const auto& r : records) {
        h = fnv1a(r.developer_id, h);
        h = fnv1a(std::to_string(r.sprint_id), h);
        h = fnv1a(measures::measure_name(r.measure), h);
        h = fnv1a(r.missing ? "-" : csv::format_double(r.value), h);
    }
    report.metadata.dataset_id = hex64(h);
    report.metadata.config_hash = hex64(fnv1a(config.canonical_string()));
    report.metadata.tool_version = "agiledata 1.0";
    return report;
}

}  // namespace agile::analysis
