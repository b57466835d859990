#pragma once

#include <filesystem>
#include <optional>

#include "agile/store/types.hpp"

namespace agile::store {

// Archive layout: one newline-delimited JSON file per entity inside a
// directory. Absent files load as empty collections.
inline constexpr const char* kDevelopersFile = "developers.ndjson";
inline constexpr const char* kSprintWindowsFile = "sprint_windows.ndjson";
inline constexpr const char* kCommitsFile = "commits.ndjson";
inline constexpr const char* kIssuesFile = "issues.ndjson";
inline constexpr const char* kPrCommentsFile = "pr_comments.ndjson";

// Loads and validates a dataset. When windows_file is given it replaces the
// archive's sprint_windows.ndjson (sprint windows usually live in a separate
// config file maintained by hand).
ProjectDataset load_archive(const std::filesystem::path& dir,
                            const std::optional<std::filesystem::path>& windows_file = std::nullopt);

// Serializes a dataset into dir (canonical order, UTC timestamps). The
// round trip load_archive(write_archive(d)) == d holds for validated
// datasets.
void write_archive(const ProjectDataset& dataset, const std::filesystem::path& dir);

std::vector<SprintWindow> load_sprint_windows(const std::filesystem::path& file);

}  // namespace agile::store
