#include "agile/store/types.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "agile/errors.hpp"

namespace agile::store {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view first_segment(std::string_view path) {
    const auto slash = path.find('/');
    return slash == std::string_view::npos ? path : path.substr(0, slash);
}

}  // namespace

std::string_view role_name(Role role) {
    switch (role) {
        case Role::ProductOwner: return "product_owner";
        case Role::ScrumMaster: return "scrum_master";
        case Role::Developer: return "developer";
    }
    return "developer";
}

Role parse_role(std::string_view name) {
    const std::string n = lower(name);
    if (n == "product_owner" || n == "po") return Role::ProductOwner;
    if (n == "scrum_master" || n == "sm") return Role::ScrumMaster;
    if (n == "developer" || n == "dev") return Role::Developer;
    throw ValidationError("unknown role: '" + std::string(name) + "'");
}

std::string_view path_class_name(PathClass c) {
    switch (c) {
        case PathClass::Test: return "test";
        case PathClass::Application: return "application";
        case PathClass::Other: return "other";
    }
    return "other";
}

PathClass classify_path(std::string_view path) {
    static const PathRules default_rules;
    return classify_path(path, default_rules);
}

PathClass classify_path(std::string_view path, const PathRules& rules) {
    if (path.empty()) throw ValidationError("classify_path: empty path");
    const std::string_view head = first_segment(path);
    for (const auto& p : rules.application_prefixes)
        if (head == p) return PathClass::Application;
    for (const auto& p : rules.test_prefixes)
        if (head == p) return PathClass::Test;
    return PathClass::Other;
}

const Developer* ProjectDataset::find_developer(std::string_view id) const {
    for (const auto& d : developers)
        if (d.id == id) return &d;
    return nullptr;
}

const SprintWindow* ProjectDataset::find_window(std::string_view team_id, int sprint_id) const {
    for (const auto& w : sprint_windows)
        if (w.team_id == team_id && w.sprint_id == sprint_id) return &w;
    return nullptr;
}

std::vector<const Developer*> ProjectDataset::team_members(std::string_view team_id) const {
    std::vector<const Developer*> out;
    for (const auto& d : developers)
        if (d.team_id == team_id) out.push_back(&d);
    return out;
}

std::vector<const SprintWindow*> ProjectDataset::team_windows(std::string_view team_id) const {
    std::vector<const SprintWindow*> out;
    for (const auto& w : sprint_windows)
        if (w.team_id == team_id) out.push_back(&w);
    return out;
}

void sort_dataset(ProjectDataset& dataset) {
    std::sort(dataset.developers.begin(), dataset.developers.end(),
              [](const Developer& a, const Developer& b) { return a.id < b.id; });
    std::sort(dataset.sprint_windows.begin(), dataset.sprint_windows.end(),
              [](const SprintWindow& a, const SprintWindow& b) {
                  return std::tie(a.team_id, a.sprint_id) < std::tie(b.team_id, b.sprint_id);
              });
    std::sort(dataset.commits.begin(), dataset.commits.end(),
              [](const Commit& a, const Commit& b) {
                  return std::tie(a.timestamp, a.sha) < std::tie(b.timestamp, b.sha);
              });
    std::sort(dataset.issues.begin(), dataset.issues.end(),
              [](const IssueRecord& a, const IssueRecord& b) { return a.number < b.number; });
    std::sort(dataset.pr_comments.begin(), dataset.pr_comments.end(),
              [](const PRCommentRecord& a, const PRCommentRecord& b) {
                  return std::tie(a.timestamp, a.pr_number, a.author_id, a.body) <
                         std::tie(b.timestamp, b.pr_number, b.author_id, b.body);
              });

    std::set<std::string> teams;
    for (const auto& d : dataset.developers) teams.insert(d.team_id);
    for (const auto& w : dataset.sprint_windows) teams.insert(w.team_id);
    dataset.teams.assign(teams.begin(), teams.end());
}

void validate_dataset(const ProjectDataset& dataset) {
    std::unordered_set<std::string> dev_ids;
    for (const auto& d : dataset.developers) {
        if (d.id.empty()) throw ValidationError("developer with empty id");
        if (!dev_ids.insert(d.id).second)
            throw ValidationError("duplicate developer id: '" + d.id + "'");
    }

    std::set<std::pair<std::string, int>> window_keys;
    std::unordered_map<std::string, std::vector<const SprintWindow*>> by_team;
    for (const auto& w : dataset.sprint_windows) {
        if (w.sprint_id < 1 || w.sprint_id > 4)
            throw ValidationError("sprint window " + w.team_id + "/" + std::to_string(w.sprint_id) +
                                  ": sprint_id must be in 1..4");
        if (w.start >= w.review_meeting)
            throw ValidationError("sprint window " + w.team_id + "/" + std::to_string(w.sprint_id) +
                                  ": start must precede review_meeting");
        if (!window_keys.emplace(w.team_id, w.sprint_id).second)
            throw ValidationError("duplicate sprint window for team '" + w.team_id + "' sprint " +
                                  std::to_string(w.sprint_id));
        by_team[w.team_id].push_back(&w);
    }
    for (auto& [team, windows] : by_team) {
        std::sort(windows.begin(), windows.end(),
                  [](const SprintWindow* a, const SprintWindow* b) { return a->sprint_id < b->sprint_id; });
        for (std::size_t i = 1; i < windows.size(); ++i) {
            if (windows[i]->start <= windows[i - 1]->review_meeting)
                throw ValidationError("sprint windows of team '" + team + "' overlap between sprints " +
                                      std::to_string(windows[i - 1]->sprint_id) + " and " +
                                      std::to_string(windows[i]->sprint_id));
        }
    }

    std::unordered_set<std::string> shas;
    for (const auto& c : dataset.commits) {
        if (c.sha.empty()) throw ValidationError("commit with empty sha");
        if (!shas.insert(c.sha).second) throw ValidationError("duplicate commit sha: '" + c.sha + "'");
        if (!dev_ids.count(c.author_id))
            throw ReferentialError("commit " + c.sha + ": unknown author '" + c.author_id + "'");
        for (const auto& fc : c.changes) {
            if (fc.path.empty()) throw ValidationError("commit " + c.sha + ": file change with empty path");
            if (fc.lines_added < 0 || fc.lines_deleted < 0)
                throw ValidationError("commit " + c.sha + ": negative line count for '" + fc.path + "'");
            if (fc.classification != classify_path(fc.path))
                throw ValidationError("commit " + c.sha + ": stale classification for '" + fc.path + "'");
        }
    }

    std::unordered_set<int> issue_numbers;
    for (const auto& issue : dataset.issues) {
        if (issue.number <= 0)
            throw ValidationError("issue number must be positive, got " + std::to_string(issue.number));
        if (!issue_numbers.insert(issue.number).second)
            throw ValidationError("duplicate issue number: " + std::to_string(issue.number));
        for (const auto& a : issue.assignees)
            if (!dev_ids.count(a))
                throw ReferentialError("issue #" + std::to_string(issue.number) + ": unknown assignee '" + a + "'");
        for (std::size_t i = 1; i < issue.status_history.size(); ++i)
            if (issue.status_history[i].timestamp < issue.status_history[i - 1].timestamp)
                throw ValidationError("issue #" + std::to_string(issue.number) +
                                      ": status history not ordered by timestamp");
    }

    for (const auto& c : dataset.pr_comments) {
        if (c.pr_number <= 0) throw ValidationError("pr comment with non-positive pr number");
        if (!dev_ids.count(c.author_id))
            throw ReferentialError("pr #" + std::to_string(c.pr_number) + " comment: unknown author '" +
                                   c.author_id + "'");
    }
}

SprintSlice slice_sprint(const ProjectDataset& dataset, std::string_view team_id, int sprint_id) {
    const SprintWindow* window = dataset.find_window(team_id, sprint_id);
    if (!window)
        throw LookupError("no sprint window for team '" + std::string(team_id) + "' sprint " +
                          std::to_string(sprint_id));

    std::unordered_set<std::string> members;
    for (const auto& d : dataset.developers)
        if (d.team_id == team_id) members.insert(d.id);

    SprintSlice slice;
    slice.window = window;
    for (const auto& c : dataset.commits)
        if (c.timestamp >= window->start && c.timestamp <= window->review_meeting && members.count(c.author_id))
            slice.commits.push_back(&c);
    for (const auto& c : dataset.pr_comments)
        if (c.timestamp >= window->start && c.timestamp <= window->review_meeting && members.count(c.author_id))
            slice.comments.push_back(&c);
    return slice;
}

}  // namespace agile::store
