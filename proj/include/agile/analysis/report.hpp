#pragma once

#include <filesystem>

#include "agile/analysis/analysis.hpp"

namespace agile::analysis {

// Flat, file-backed form of an AnalysisReport: one struct per table row,
// written as full-precision CSVs and reloadable to re-render the document.
struct ReportTables {
    struct OmnibusRow {
        std::string team;  // "all" = pooled
        QuestionId question = QuestionId::Q1;
        std::optional<double> statistic;
        std::optional<int> df;
        std::optional<double> p_value;
        std::optional<double> p_asymptotic;
        long n = 0;
        std::string note;
    };
    struct PosthocRow {
        std::string team;
        QuestionId question = QuestionId::Q1;
        std::string group_a, group_b;
        double z = 0.0;
        double p_unadjusted = 1.0;
        double p_adjusted = 1.0;
    };
    struct AssocRow {
        std::string label;
        long n = 0;
        std::optional<double> tau;
        std::optional<double> z;
        std::optional<double> p_value;
        std::string note;
    };
    struct MissingRow {
        QuestionId question = QuestionId::Q1;
        std::string role;
        long solicited = 0;
        long missing = 0;
    };
    struct AgreementRow {
        std::string scope;  // "team", "team_excluding_po", "role"
        std::string group;
        std::optional<double> alpha;
        long raters = 0;
        long units = 0;
        std::string note;
    };
    struct DescriptivesColumn {
        std::string label;  // "Q1".."Q9" or "RTA".."PRC"
        survey::DescriptiveStats stats;
    };
    struct HistogramRow {
        std::string measure;
        double bin_lo = 0.0;
        double bin_hi = 0.0;
        long count = 0;
    };

    std::vector<DescriptivesColumn> survey_descriptives;
    std::vector<OmnibusRow> perception_change;
    std::vector<PosthocRow> perception_posthoc;
    std::vector<AssocRow> value_associations;
    std::vector<OmnibusRow> role_effects;
    std::vector<PosthocRow> role_posthoc;
    std::vector<MissingRow> missing_by_role;
    std::vector<AgreementRow> agreement;
    std::vector<DescriptivesColumn> measurement_descriptives;
    std::vector<HistogramRow> histograms;
    std::vector<AssocRow> survey_measurement_associations;
    ReportMetadata metadata;
};

ReportTables to_tables(const AnalysisReport& report);

// Writes tables/*.csv, metadata.json and report.md into out_dir.
void write_report_dir(const AnalysisReport& report, const std::filesystem::path& out_dir);

// Reloads a previously written report directory.
ReportTables load_report_tables(const std::filesystem::path& report_dir);

// The human-readable document (markdown). Star annotations follow the
// footnote convention "* p<.05, ** p<.01, *** p<.001".
std::string render_document(const ReportTables& tables);

// Formatting used by the document: 1 decimal for descriptives, 3 decimals
// for test statistics, scientific notation for p below 0.001.
std::string format_descriptive(double v);
std::string format_statistic(double v);
std::string format_p(double p);
std::string significance_stars(double p);

inline constexpr const char* kStarFootnote = "* p<.05, ** p<.01, *** p<.001";

}  // namespace agile::analysis
