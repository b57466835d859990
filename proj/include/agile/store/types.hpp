#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "agile/timeutil.hpp"

namespace agile::store {

enum class Role { ProductOwner, ScrumMaster, Developer };

std::string_view role_name(Role role);                 // "product_owner" ...
Role parse_role(std::string_view name);                // case-insensitive, throws ValidationError

enum class PathClass { Test, Application, Other };

std::string_view path_class_name(PathClass c);

// Directory prefixes that decide how a changed file is classified. The
// defaults follow the Rails-style layout: business logic under app/, tests
// under test/ or spec/.
struct PathRules {
    std::vector<std::string> application_prefixes = {"app"};
    std::vector<std::string> test_prefixes = {"test", "spec"};
};

// Classification is a pure function of the path's first segment.
PathClass classify_path(std::string_view path);
PathClass classify_path(std::string_view path, const PathRules& rules);

struct Developer {
    std::string id;
    std::string team_id;
    Role role = Role::Developer;
};

struct SprintWindow {
    int sprint_id = 0;  // 1..4
    std::string team_id;
    UtcSeconds start = 0;
    UtcSeconds review_meeting = 0;  // sprint close; the window is [start, review_meeting]
};

struct FileChange {
    std::string path;
    std::int64_t lines_added = 0;
    std::int64_t lines_deleted = 0;
    PathClass classification = PathClass::Other;

    std::int64_t lines_changed() const { return lines_added + lines_deleted; }
};

struct Commit {
    std::string sha;
    std::string author_id;
    UtcSeconds timestamp = 0;
    std::string message;
    std::vector<FileChange> changes;
    int parent_count = 1;  // >1 marks a merge commit

    bool is_merge() const { return parent_count > 1; }
};

enum class IssueStatus { Open, Closed };

struct StatusEvent {
    IssueStatus status = IssueStatus::Open;
    UtcSeconds timestamp = 0;
};

struct IssueRecord {
    int number = 0;
    std::vector<std::string> labels;     // sorted, unique
    std::vector<std::string> assignees;  // sorted, unique developer ids
    std::string title;
    std::string body;
    std::vector<StatusEvent> status_history;  // ordered by timestamp
};

struct PRCommentRecord {
    int pr_number = 0;
    std::string author_id;
    UtcSeconds timestamp = 0;
    std::string body;
};

// Immutable after load; safe to share across concurrent readers.
struct ProjectDataset {
    std::vector<Developer> developers;      // sorted by id
    std::vector<std::string> teams;         // sorted, unique
    std::vector<SprintWindow> sprint_windows;  // sorted by (team, sprint)
    std::vector<Commit> commits;            // sorted by (timestamp, sha)
    std::vector<IssueRecord> issues;        // sorted by number
    std::vector<PRCommentRecord> pr_comments;  // sorted by (timestamp, pr, author)

    const Developer* find_developer(std::string_view id) const;
    const SprintWindow* find_window(std::string_view team_id, int sprint_id) const;
    std::vector<const Developer*> team_members(std::string_view team_id) const;
    std::vector<const SprintWindow*> team_windows(std::string_view team_id) const;
};

// Checks every invariant of the data model; throws ValidationError /
// ReferentialError. Called by the loaders, exposed for datasets built in
// memory (synth, tests).
void validate_dataset(const ProjectDataset& dataset);

// Sorts all collections into the canonical order documented above.
void sort_dataset(ProjectDataset& dataset);

// A filtered view over one (team, sprint) window. Commits and comments are
// those authored by team members with start <= t <= review_meeting.
struct SprintSlice {
    const SprintWindow* window = nullptr;
    std::vector<const Commit*> commits;
    std::vector<const PRCommentRecord*> comments;
};

SprintSlice slice_sprint(const ProjectDataset& dataset, std::string_view team_id, int sprint_id);

}  // namespace agile::store
