#include "agile/analysis/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "agile/csv.hpp"
#include "agile/errors.hpp"

namespace agile::analysis {

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? csv::format_double(*v) : ""; }

std::optional<double> opt_parse(const std::string& field) {
    if (field.empty()) return std::nullopt;
    const auto v = csv::parse_double(field);
    if (!v) throw ParseError("bad numeric field '" + field + "'");
    return v;
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write " + file.string());
    std::vector<std::string> h = header;
    out << csv::join_row(h) << '\n';
    for (const auto& row : rows) out << csv::join_row(row) << '\n';
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& file,
                                               std::size_t expected_fields) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {  // skip header
            first = false;
            continue;
        }
        auto fields = csv::split_row(line);
        if (fields.size() != expected_fields)
            throw ParseError(file.filename().string() + ": expected " + std::to_string(expected_fields) +
                             " fields, got " + std::to_string(fields.size()));
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::vector<std::string> descriptives_fields(const std::string& label,
                                             const survey::DescriptiveStats& s) {
    return {label,
            std::to_string(s.valid),
            std::to_string(s.missing),
            opt_field(s.mean),
            opt_field(s.median),
            opt_field(s.stdev),
            opt_field(s.variance),
            opt_field(s.skewness),
            opt_field(s.stderr_skewness)};
}

ReportTables::DescriptivesColumn parse_descriptives(const std::vector<std::string>& f) {
    ReportTables::DescriptivesColumn col;
    col.label = f[0];
    col.stats.valid = static_cast<long>(csv::parse_int(f[1]).value_or(0));
    col.stats.missing = static_cast<long>(csv::parse_int(f[2]).value_or(0));
    col.stats.mean = opt_parse(f[3]);
    col.stats.median = opt_parse(f[4]);
    col.stats.stdev = opt_parse(f[5]);
    col.stats.variance = opt_parse(f[6]);
    col.stats.skewness = opt_parse(f[7]);
    col.stats.stderr_skewness = opt_parse(f[8]);
    return col;
}

const std::vector<std::string> kDescriptivesHeader = {
    "label", "valid", "missing", "mean", "median", "stdev", "variance", "skewness", "stderr_skewness"};

// markdown table helper
std::string md_table(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    out << '|';
    for (const auto& h : header) out << ' ' << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& row : rows) {
        out << '|';
        for (const auto& cell : row) out << ' ' << cell << " |";
        out << '\n';
    }
    return out.str();
}

std::string p_with_stars(const std::optional<double>& p) {
    if (!p) return "n/a";
    return format_p(*p) + significance_stars(*p);
}

std::string desc_cell(const std::optional<double>& v) { return v ? format_descriptive(*v) : "n/a"; }

std::string stat_cell(const std::optional<double>& v) { return v ? format_statistic(*v) : "n/a"; }

void render_omnibus_block(std::ostringstream& out, const std::vector<ReportTables::OmnibusRow>& rows,
                          const std::vector<ReportTables::PosthocRow>& posthoc,
                          const std::string& team) {
    std::vector<std::vector<std::string>> body;
    for (const auto& row : rows) {
        if (row.team != team) continue;
        body.push_back({std::string(survey::question_label(row.question)), stat_cell(row.statistic),
                        row.statistic ? p_with_stars(row.p_value) : "n/a"});
    }
    out << md_table({"Question", "χ²", "p-value"}, body);
    out << '\n' << kStarFootnote << "\n\n";

    std::vector<std::vector<std::string>> ph;
    for (const auto& row : posthoc) {
        if (row.team != team) continue;
        ph.push_back({std::string(survey::question_label(row.question)), row.group_a, row.group_b,
                      format_statistic(row.z), p_with_stars(row.p_adjusted)});
    }
    if (!ph.empty()) {
        out << "Post hoc pairwise comparisons (Bonferroni-adjusted), run for questions with a "
               "significant omnibus test:\n\n";
        out << md_table({"Question", "Group A", "Group B", "Z", "adjusted p-value"}, ph);
        out << '\n' << kStarFootnote << "\n\n";
    }
}

}  // namespace

std::string format_descriptive(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    // avoid the "-0.0" artifact
    if (std::string(buf) == "-0.0") return "0.0";
    return buf;
}

std::string format_statistic(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    if (std::string(buf) == "-0.000") return "0.000";
    return buf;
}

std::string format_p(double p) {
    if (p < 0.001) {
        if (p <= 0.0) return "<1e-300";
        const int exponent = static_cast<int>(std::floor(std::log10(p)));
        const double mantissa = p / std::pow(10.0, exponent);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.1fe%d", mantissa, exponent);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", p);
    return buf;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

ReportTables to_tables(const AnalysisReport& report) {
    ReportTables t;
    t.metadata = report.metadata;

    for (const auto& [q, stats] : report.survey_descriptives)
        t.survey_descriptives.push_back({std::string(survey::question_label(q)), stats});

    auto add_omnibus = [](std::vector<ReportTables::OmnibusRow>& dst,
                          std::vector<ReportTables::PosthocRow>& ph_dst,
                          const std::vector<QuestionTestRow>& src, const std::string& team) {
        for (const auto& row : src) {
            ReportTables::OmnibusRow o;
            o.team = team;
            o.question = row.question;
            o.note = row.note;
            if (row.test) {
                o.statistic = row.test->statistic;
                o.df = row.test->df;
                o.p_value = row.test->p_value;
                if (row.test->has_extra("p_asymptotic")) o.p_asymptotic = row.test->extra("p_asymptotic");
                if (row.test->has_extra("n")) o.n = static_cast<long>(row.test->extra("n"));
            }
            dst.push_back(std::move(o));
            for (const auto& pr : row.post_hoc)
                ph_dst.push_back({team, row.question, pr.group_a, pr.group_b, pr.z, pr.p_unadjusted,
                                  pr.p_adjusted});
        }
    };

    add_omnibus(t.perception_change, t.perception_posthoc, report.perception_change, "all");
    for (const auto& [team, rows] : report.perception_change_per_team)
        add_omnibus(t.perception_change, t.perception_posthoc, rows, team);
    add_omnibus(t.role_effects, t.role_posthoc, report.role_effects, "all");

    auto add_assoc = [](std::vector<ReportTables::AssocRow>& dst, const std::vector<AssociationRow>& src) {
        for (const auto& row : src) {
            ReportTables::AssocRow a;
            a.label = row.label;
            a.n = row.n;
            a.note = row.note;
            if (row.test) {
                a.tau = row.test->statistic;
                a.z = row.test->extras.count("z") ? row.test->extras.at("z") : 0.0;
                a.p_value = row.test->p_value;
            }
            dst.push_back(std::move(a));
        }
    };
    add_assoc(t.value_associations, report.value_associations);
    add_assoc(t.survey_measurement_associations, report.survey_measurement_associations);

    for (const auto& row : report.missing_by_role) {
        for (std::size_t i = 0; i < 3; ++i) {
            ReportTables::MissingRow m;
            m.question = row.question;
            m.role = std::string(store::role_name(static_cast<store::Role>(i)));
            m.solicited = row.solicited[i];
            m.missing = row.missing[i];
            t.missing_by_role.push_back(std::move(m));
        }
    }

    auto add_agreement = [&](const std::vector<AgreementCell>& cells, const std::string& scope) {
        for (const auto& c : cells)
            t.agreement.push_back({scope, c.group, c.alpha, c.raters, c.units, c.note});
    };
    add_agreement(report.team_agreement, "team");
    add_agreement(report.team_agreement_no_po, "team_excluding_po");
    add_agreement(report.role_agreement, "role");

    for (const auto& row : report.measurement_descriptives) {
        t.measurement_descriptives.push_back(
            {std::string(measures::measure_name(row.measure)), row.stats});
        const auto& h = row.histogram;
        if (!h.counts.empty()) {
            const double width =
                h.counts.size() > 1 ? (h.hi - h.lo) / static_cast<double>(h.counts.size()) : 0.0;
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                const double lo = h.lo + width * static_cast<double>(b);
                const double hi = b + 1 == h.counts.size() ? h.hi : lo + width;
                t.histograms.push_back(
                    {std::string(measures::measure_name(row.measure)), lo, hi, h.counts[b]});
            }
        }
    }
    return t;
}

void write_report_dir(const AnalysisReport& report, const std::filesystem::path& out_dir) {
    const ReportTables t = to_tables(report);
    const std::filesystem::path tables = out_dir / "tables";
    std::filesystem::create_directories(tables);

    std::vector<std::vector<std::string>> rows;
    for (const auto& col : t.survey_descriptives) rows.push_back(descriptives_fields(col.label, col.stats));
    write_csv(tables / "survey_descriptives.csv", kDescriptivesHeader, rows);

    auto omnibus_rows = [](const std::vector<ReportTables::OmnibusRow>& src) {
        std::vector<std::vector<std::string>> out;
        for (const auto& r : src)
            out.push_back({r.team, std::string(survey::question_label(r.question)),
                           opt_field(r.statistic), r.df ? std::to_string(*r.df) : "",
                           opt_field(r.p_value), opt_field(r.p_asymptotic), std::to_string(r.n), r.note});
        return out;
    };
    const std::vector<std::string> omnibus_header = {"team", "question", "statistic", "df",
                                                     "p_value", "p_asymptotic", "n", "note"};
    write_csv(tables / "perception_change.csv", omnibus_header, omnibus_rows(t.perception_change));
    write_csv(tables / "role_effects.csv", omnibus_header, omnibus_rows(t.role_effects));

    auto posthoc_rows = [](const std::vector<ReportTables::PosthocRow>& src) {
        std::vector<std::vector<std::string>> out;
        for (const auto& r : src)
            out.push_back({r.team, std::string(survey::question_label(r.question)), r.group_a, r.group_b,
                           csv::format_double(r.z), csv::format_double(r.p_unadjusted),
                           csv::format_double(r.p_adjusted)});
        return out;
    };
    const std::vector<std::string> posthoc_header = {"team",    "question",     "group_a", "group_b",
                                                     "z",       "p_unadjusted", "p_adjusted"};
    write_csv(tables / "perception_change_posthoc.csv", posthoc_header, posthoc_rows(t.perception_posthoc));
    write_csv(tables / "role_effects_posthoc.csv", posthoc_header, posthoc_rows(t.role_posthoc));

    auto assoc_rows = [](const std::vector<ReportTables::AssocRow>& src) {
        std::vector<std::vector<std::string>> out;
        for (const auto& r : src)
            out.push_back({r.label, std::to_string(r.n), opt_field(r.tau), opt_field(r.z),
                           opt_field(r.p_value), r.note});
        return out;
    };
    const std::vector<std::string> assoc_header = {"relationship", "n", "tau", "z", "p_value", "note"};
    write_csv(tables / "value_associations.csv", assoc_header, assoc_rows(t.value_associations));
    write_csv(tables / "survey_measurement_associations.csv", assoc_header,
              assoc_rows(t.survey_measurement_associations));

    rows.clear();
    for (const auto& r : t.missing_by_role)
        rows.push_back({std::string(survey::question_label(r.question)), r.role,
                        std::to_string(r.solicited), std::to_string(r.missing)});
    write_csv(tables / "missing_by_role.csv", {"question", "role", "solicited", "missing"}, rows);

    rows.clear();
    for (const auto& r : t.agreement)
        rows.push_back({r.scope, r.group, r.alpha ? csv::format_double(*r.alpha) : "",
                        std::to_string(r.raters), std::to_string(r.units), r.note});
    write_csv(tables / "team_agreement.csv", {"scope", "group", "alpha", "raters", "units", "note"}, rows);

    rows.clear();
    for (const auto& col : t.measurement_descriptives)
        rows.push_back(descriptives_fields(col.label, col.stats));
    write_csv(tables / "measurement_descriptives.csv", kDescriptivesHeader, rows);

    rows.clear();
    for (const auto& r : t.histograms)
        rows.push_back({r.measure, csv::format_double(r.bin_lo), csv::format_double(r.bin_hi),
                        std::to_string(r.count)});
    write_csv(tables / "measurement_histograms.csv", {"measure", "bin_lo", "bin_hi", "count"}, rows);

    nlohmann::json meta{{"dataset_id", t.metadata.dataset_id},
                        {"config_hash", t.metadata.config_hash},
                        {"tool_version", t.metadata.tool_version}};
    std::ofstream meta_out(out_dir / "metadata.json", std::ios::binary);
    meta_out << meta.dump(2) << '\n';

    std::ofstream doc(out_dir / "report.md", std::ios::binary);
    if (!doc) throw DataError("cannot write report.md");
    doc << render_document(t);
}

ReportTables load_report_tables(const std::filesystem::path& report_dir) {
    const std::filesystem::path tables = report_dir / "tables";
    if (!std::filesystem::exists(tables))
        throw UsageError("not a report directory (missing tables/): " + report_dir.string());
    ReportTables t;

    for (const auto& f : read_csv(tables / "survey_descriptives.csv", 9))
        t.survey_descriptives.push_back(parse_descriptives(f));
    for (const auto& f : read_csv(tables / "measurement_descriptives.csv", 9))
        t.measurement_descriptives.push_back(parse_descriptives(f));

    auto load_omnibus = [](const std::filesystem::path& file) {
        std::vector<ReportTables::OmnibusRow> out;
        for (const auto& f : read_csv(file, 8)) {
            ReportTables::OmnibusRow r;
            r.team = f[0];
            r.question = survey::parse_question(f[1]);
            r.statistic = opt_parse(f[2]);
            if (!f[3].empty()) r.df = static_cast<int>(csv::parse_int(f[3]).value_or(0));
            r.p_value = opt_parse(f[4]);
            r.p_asymptotic = opt_parse(f[5]);
            r.n = static_cast<long>(csv::parse_int(f[6]).value_or(0));
            r.note = f[7];
            out.push_back(std::move(r));
        }
        return out;
    };
    t.perception_change = load_omnibus(tables / "perception_change.csv");
    t.role_effects = load_omnibus(tables / "role_effects.csv");

    auto load_posthoc = [](const std::filesystem::path& file) {
        std::vector<ReportTables::PosthocRow> out;
        for (const auto& f : read_csv(file, 7)) {
            ReportTables::PosthocRow r;
            r.team = f[0];
            r.question = survey::parse_question(f[1]);
            r.group_a = f[2];
            r.group_b = f[3];
            r.z = opt_parse(f[4]).value_or(0.0);
            r.p_unadjusted = opt_parse(f[5]).value_or(1.0);
            r.p_adjusted = opt_parse(f[6]).value_or(1.0);
            out.push_back(std::move(r));
        }
        return out;
    };
    t.perception_posthoc = load_posthoc(tables / "perception_change_posthoc.csv");
    t.role_posthoc = load_posthoc(tables / "role_effects_posthoc.csv");

    auto load_assoc = [](const std::filesystem::path& file) {
        std::vector<ReportTables::AssocRow> out;
        for (const auto& f : read_csv(file, 6)) {
            ReportTables::AssocRow r;
            r.label = f[0];
            r.n = static_cast<long>(csv::parse_int(f[1]).value_or(0));
            r.tau = opt_parse(f[2]);
            r.z = opt_parse(f[3]);
            r.p_value = opt_parse(f[4]);
            r.note = f[5];
            out.push_back(std::move(r));
        }
        return out;
    };
    t.value_associations = load_assoc(tables / "value_associations.csv");
    t.survey_measurement_associations = load_assoc(tables / "survey_measurement_associations.csv");

    for (const auto& f : read_csv(tables / "missing_by_role.csv", 4)) {
        ReportTables::MissingRow r;
        r.question = survey::parse_question(f[0]);
        r.role = f[1];
        r.solicited = static_cast<long>(csv::parse_int(f[2]).value_or(0));
        r.missing = static_cast<long>(csv::parse_int(f[3]).value_or(0));
        t.missing_by_role.push_back(std::move(r));
    }

    for (const auto& f : read_csv(tables / "team_agreement.csv", 6)) {
        ReportTables::AgreementRow r;
        r.scope = f[0];
        r.group = f[1];
        r.alpha = opt_parse(f[2]);
        r.raters = static_cast<long>(csv::parse_int(f[3]).value_or(0));
        r.units = static_cast<long>(csv::parse_int(f[4]).value_or(0));
        r.note = f[5];
        t.agreement.push_back(std::move(r));
    }

    for (const auto& f : read_csv(tables / "measurement_histograms.csv", 4)) {
        ReportTables::HistogramRow r;
        r.measure = f[0];
        r.bin_lo = opt_parse(f[1]).value_or(0.0);
        r.bin_hi = opt_parse(f[2]).value_or(0.0);
        r.count = static_cast<long>(csv::parse_int(f[3]).value_or(0));
        t.histograms.push_back(std::move(r));
    }

    std::ifstream meta_in(report_dir / "metadata.json");
    if (meta_in) {
        nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, false);
        if (!meta.is_discarded()) {
            t.metadata.dataset_id = meta.value("dataset_id", "");
            t.metadata.config_hash = meta.value("config_hash", "");
            t.metadata.tool_version = meta.value("tool_version", "");
        }
    }
    return t;
}

std::string render_document(const ReportTables& t) {
    std::ostringstream out;
    out << "# Agile practice analysis report\n\n";
    out << "Dataset " << t.metadata.dataset_id << ", configuration " << t.metadata.config_hash << ", "
        << t.metadata.tool_version << ".\n\n";
    out << "Ratings use the 5-point agreement scale (1 = strongly agree, 5 = strongly disagree). "
           "Because agreement is coded low, a claim that holds in the development data shows up as a "
           "negative Kendall correlation against the raw measurement values.\n\n";

    // survey descriptives, one column per question
    out << "## Survey response descriptives\n\n";
    {
        std::vector<std::string> header = {""};
        for (const auto& col : t.survey_descriptives) header.push_back(col.label);
        std::vector<std::vector<std::string>> body(7);
        const std::array<std::string, 7> row_labels = {"Valid",  "Missing",  "Mean",      "Median",
                                                       "Stdev", "Skewness", "StderrSkew"};
        for (std::size_t i = 0; i < row_labels.size(); ++i) body[i].push_back(row_labels[i]);
        for (const auto& col : t.survey_descriptives) {
            body[0].push_back(std::to_string(col.stats.valid));
            body[1].push_back(std::to_string(col.stats.missing));
            body[2].push_back(desc_cell(col.stats.mean));
            body[3].push_back(desc_cell(col.stats.median));
            body[4].push_back(desc_cell(col.stats.stdev));
            body[5].push_back(desc_cell(col.stats.skewness));
            body[6].push_back(desc_cell(col.stats.stderr_skewness));
        }
        out << md_table(header, body) << '\n';
    }

    // perception change over sprints
    out << "## Perception change over sprints (Friedman rank sum)\n\n";
    render_omnibus_block(out, t.perception_change, t.perception_posthoc, "all");
    {
        std::set<std::string> teams;
        for (const auto& r : t.perception_change)
            if (r.team != "all") teams.insert(r.team);
        for (const auto& team : teams) {
            out << "### Team " << team << "\n\n";
            render_omnibus_block(out, t.perception_change, t.perception_posthoc, team);
        }
    }

    // practice-to-values associations
    out << "## Associations between practice claims and agile values (Kendall)\n\n";
    {
        std::vector<std::vector<std::string>> body;
        for (const auto& r : t.value_associations)
            body.push_back({r.label, stat_cell(r.tau), stat_cell(r.z), p_with_stars(r.p_value)});
        out << md_table({"Relationship", "τ", "Z", "p-value"}, body);
        out << '\n' << kStarFootnote << "\n\n";
    }

    // role effects
    out << "## Role effects on responses (Kruskal-Wallis rank sum)\n\n";
    render_omnibus_block(out, t.role_effects, t.role_posthoc, "all");

    out << "Missing responses per role:\n\n";
    {
        std::vector<std::vector<std::string>> body;
        for (const auto& r : t.missing_by_role)
            body.push_back({std::string(survey::question_label(r.question)), r.role,
                            std::to_string(r.solicited), std::to_string(r.missing)});
        out << md_table({"Question", "Role", "Solicited", "Missing"}, body) << '\n';
    }

    // per-team agreement, teams as columns
    out << "## Inter-rater agreement per team (Krippendorff)\n\n";
    {
        std::vector<std::string> header = {"Team"};
        std::vector<std::string> alphas = {"α"};
        for (const auto& r : t.agreement) {
            if (r.scope != "team") continue;
            header.push_back(r.group);
            alphas.push_back(r.alpha ? format_statistic(*r.alpha) : "n/a");
        }
        out << md_table(header, {alphas}) << '\n';

        std::vector<std::vector<std::string>> extra;
        for (const auto& r : t.agreement) {
            if (r.scope == "team") continue;
            extra.push_back({r.scope == "role" ? "role: " + r.group : "team " + r.group + " (excl. POs)",
                             r.alpha ? format_statistic(*r.alpha) : "n/a", std::to_string(r.raters),
                             std::to_string(r.units)});
        }
        if (!extra.empty()) {
            out << "Supplementary agreement values:\n\n";
            out << md_table({"Group", "α", "Raters", "Units"}, extra) << '\n';
        }
    }

    // measurement descriptives, one column per measure
    out << "## Development data measurement descriptives\n\n";
    {
        std::vector<std::string> header = {""};
        for (const auto& col : t.measurement_descriptives) header.push_back(col.label);
        std::vector<std::vector<std::string>> body(8);
        const std::array<std::string, 8> row_labels = {"Valid",    "Missing",  "Mean",
                                                       "Median",   "Stdev",    "Variance",
                                                       "Skewness", "Std. Error Skewness"};
        for (std::size_t i = 0; i < row_labels.size(); ++i) body[i].push_back(row_labels[i]);
        for (const auto& col : t.measurement_descriptives) {
            body[0].push_back(format_descriptive(static_cast<double>(col.stats.valid)));
            body[1].push_back(format_descriptive(static_cast<double>(col.stats.missing)));
            body[2].push_back(desc_cell(col.stats.mean));
            body[3].push_back(desc_cell(col.stats.median));
            body[4].push_back(desc_cell(col.stats.stdev));
            body[5].push_back(desc_cell(col.stats.variance));
            body[6].push_back(desc_cell(col.stats.skewness));
            body[7].push_back(desc_cell(col.stats.stderr_skewness));
        }
        out << md_table(header, body) << '\n';
        out << "Histogram bin counts are exported in tables/measurement_histograms.csv.\n\n";
    }

    // survey-to-measurement associations
    out << "## Associations between survey claims and measurements (Kendall)\n\n";
    {
        std::vector<std::vector<std::string>> body;
        for (const auto& r : t.survey_measurement_associations)
            body.push_back({r.label, stat_cell(r.tau), stat_cell(r.z), p_with_stars(r.p_value)});
        out << md_table({"Relationship", "Kendall's-τ", "Z", "p-value"}, body);
        out << '\n' << kStarFootnote << "\n";
    }
    return out.str();
}

}  // namespace agile::analysis
