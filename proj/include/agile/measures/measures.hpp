#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "agile/store/types.hpp"

namespace agile::measures {

enum class MeasureId { RTA, UFE, LMC, ALC, UUS, PRC };

inline constexpr std::array<MeasureId, 6> kAllMeasures = {MeasureId::RTA, MeasureId::UFE,
                                                          MeasureId::LMC, MeasureId::ALC,
                                                          MeasureId::UUS, MeasureId::PRC};

std::string_view measure_name(MeasureId m);
MeasureId parse_measure(std::string_view name);

// Commit/comment history of one developer inside one sprint window.
struct DeveloperSlice {
    const store::SprintWindow* window = nullptr;
    std::vector<const store::Commit*> commits;
    std::vector<const store::PRCommentRecord*> comments;
};

struct MeasurementRecord {
    std::string developer_id;
    std::string team_id;
    int sprint_id = 0;
    MeasureId measure = MeasureId::RTA;
    double value = 0.0;  // meaningful iff !missing
    bool missing = false;
};

// The last-minute window reaches back 12 hours from the review meeting.
inline constexpr UtcSeconds kLastMinuteWindow = 12 * kSecondsPerHour;

// Ratio of changed lines (added + deleted) in test code to changed lines in
// application code. Missing when the developer has no commits or no
// application line changes.
std::optional<double> rta(const DeveloperSlice& slice);

// Count of distinct file paths touched; 0 when no commits.
long ufe(const DeveloperSlice& slice);

// Fraction of commits inside [review_meeting - 12h, review_meeting];
// missing when the developer has no in-window commits.
std::optional<double> lmc(const DeveloperSlice& slice);

// Mean changed lines per commit over all classifications; missing when no
// commits.
std::optional<double> alc(const DeveloperSlice& slice);

// All distinct issue numbers appearing as "#<digits>" tokens.
std::set<long> parse_story_refs(std::string_view message);

// Count of distinct issue numbers referenced across commit messages.
long uus(const DeveloperSlice& slice);

// Count of the developer's PR comments inside the window.
long prc(const DeveloperSlice& slice);

struct ComputeOptions {
    bool exclude_merges = false;  // drop commits with more than one parent
};

// One record per (developer x sprint window of their team x measure), in
// deterministic (team, developer, sprint, measure) order.
std::vector<MeasurementRecord> compute_all(const store::ProjectDataset& dataset,
                                           const ComputeOptions& options = {});

// Tabular format: team,developer,sprint,measure,value,missing.
void write_measurements_csv(std::span<const MeasurementRecord> records,
                            const std::filesystem::path& file);
std::vector<MeasurementRecord> read_measurements_csv(const std::filesystem::path& file);

}  // namespace agile::measures
