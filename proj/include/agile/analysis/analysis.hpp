#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agile/measures/measures.hpp"
#include "agile/stats/kendall.hpp"
#include "agile/stats/krippendorff.hpp"
#include "agile/stats/tests.hpp"
#include "agile/survey/survey.hpp"

namespace agile::analysis {

using measures::MeasureId;
using measures::MeasurementRecord;
using survey::LikertResponse;
using survey::QuestionId;

// (question, measure) pairs examined for survey <-> measurement
// association. The default plan pairs every practice claim with its
// development-data counterpart.
using PairingPlan = std::vector<std::pair<QuestionId, MeasureId>>;
PairingPlan default_pairing_plan();

enum class Pooling { Pooled, PerTeam };
enum class AgreementUnits { QuestionSprint, Question };

struct AnalysisConfig {
    bool exclude_product_owners = false;  // headline scope of the agreement table
    Pooling pooling = Pooling::Pooled;    // grouping of the perception-change tests
    AgreementUnits agreement_units = AgreementUnits::QuestionSprint;
    PairingPlan plan = default_pairing_plan();
    double post_hoc_alpha = 0.05;  // omnibus gate for post hoc tests
    int histogram_bins = 10;

    std::string canonical_string() const;
};

// One omnibus test per question, with pairwise post hoc results when the
// omnibus was significant. An empty test means the question was not
// testable; note says why.
struct QuestionTestRow {
    QuestionId question = QuestionId::Q1;
    std::optional<stats::StatTestResult> test;
    std::string note;
    std::vector<stats::PairwiseResult> post_hoc;
};

struct AssociationRow {
    std::string label;
    std::optional<stats::StatTestResult> test;  // Kendall tau; empty -> undefined
    std::string note;
    long n = 0;
};

struct AgreementCell {
    std::string group;
    std::optional<double> alpha;
    std::string note;
    long raters = 0;
    long units = 0;
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long> counts;
};

struct MeasureDescriptivesRow {
    MeasureId measure = MeasureId::RTA;
    survey::DescriptiveStats stats;
    Histogram histogram;
};

struct MissingByRoleRow {
    QuestionId question = QuestionId::Q1;
    // solicited/missing per role, indexed by store::Role order (PO, SM, Dev)
    std::array<long, 3> solicited{};
    std::array<long, 3> missing{};
};

struct ReportMetadata {
    std::string dataset_id;    // content hash of the analyzed inputs
    std::string config_hash;   // hash of AnalysisConfig::canonical_string
    std::string tool_version;
};

struct AnalysisReport {
    std::vector<std::pair<QuestionId, survey::DescriptiveStats>> survey_descriptives;
    std::vector<QuestionTestRow> perception_change;                    // pooled
    std::map<std::string, std::vector<QuestionTestRow>> perception_change_per_team;  // when Pooling::PerTeam
    std::vector<AssociationRow> value_associations;                    // Q1..Q8 vs Q9
    std::vector<QuestionTestRow> role_effects;
    std::vector<MissingByRoleRow> missing_by_role;
    std::vector<AgreementCell> team_agreement;          // headline scope (config)
    std::vector<AgreementCell> team_agreement_no_po;    // always computed
    std::vector<AgreementCell> role_agreement;
    std::vector<MeasureDescriptivesRow> measurement_descriptives;
    std::vector<AssociationRow> survey_measurement_associations;
    ReportMetadata metadata;
};

// Per-question perception change over sprints: Friedman over complete
// blocks (respondents answering in every sprint), Wilcoxon signed-rank
// post hoc on sprint pairs when significant.
std::vector<QuestionTestRow> perception_change(std::span<const LikertResponse> responses,
                                                   double post_hoc_alpha = 0.05);

// Kendall tau of each practice claim (Q1..Q8) against the value claim Q9,
// pairwise-complete over (respondent, sprint) observations.
std::vector<AssociationRow> value_associations(std::span<const LikertResponse> responses);

// Kruskal-Wallis per question across roles, Dunn post hoc when
// significant; roles without responses are dropped from the test.
std::vector<QuestionTestRow> role_effects(std::span<const LikertResponse> responses,
                                              double post_hoc_alpha = 0.05);

std::vector<MissingByRoleRow> missing_by_role(std::span<const LikertResponse> responses);

enum class AgreementScope { AllRoles, ExcludingProductOwners };
enum class AgreementGrouping { PerTeam, PerRole };

// Krippendorff's alpha per group; units are question x sprint cells (or
// per-question medians across sprints), raters are the group's
// respondents.
std::vector<AgreementCell> team_agreement(std::span<const LikertResponse> responses,
                                              AgreementScope scope, AgreementGrouping grouping,
                                              AgreementUnits units = AgreementUnits::QuestionSprint);

// Kendall tau between survey ratings and measurement values joined on
// (developer, sprint). Missing on either side drops the observation.
std::vector<AssociationRow> survey_measurement_associations(
    std::span<const LikertResponse> responses, std::span<const MeasurementRecord> records,
    const PairingPlan& plan);

std::vector<MeasureDescriptivesRow> measurement_descriptives(
    std::span<const MeasurementRecord> records, int histogram_bins = 10);

AnalysisReport analyze(std::span<const LikertResponse> responses,
                       std::span<const MeasurementRecord> records, const AnalysisConfig& config);

}  // namespace agile::analysis
