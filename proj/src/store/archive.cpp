#include "agile/store/archive.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

#include "agile/errors.hpp"

namespace agile::store {

namespace {

using nlohmann::json;

// Applies fn to every non-empty line of file (if it exists); parse and
// schema failures are rethrown as ParseError with file:line context.
template <typename Fn>
void for_each_record(const std::filesystem::path& file, Fn&& fn) {
    if (!std::filesystem::exists(file)) return;
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            fn(json::parse(line));
        } catch (const DataError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(file.filename().string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::string req_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw ParseError(std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

std::int64_t req_int(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ParseError(std::string("missing integer field '") + key + "'");
    return j[key].get<std::int64_t>();
}

SprintWindow parse_window(const json& j) {
    SprintWindow w;
    w.team_id = req_string(j, "team");
    w.sprint_id = static_cast<int>(req_int(j, "sprint"));
    w.start = parse_iso8601(req_string(j, "start"));
    w.review_meeting = parse_iso8601(req_string(j, "review_meeting"));
    return w;
}

void write_lines(const std::filesystem::path& file, const std::vector<std::string>& lines) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write " + file.string());
    for (const auto& l : lines) out << l << '\n';
}

}  // namespace

std::vector<SprintWindow> load_sprint_windows(const std::filesystem::path& file) {
    std::vector<SprintWindow> windows;
    for_each_record(file, [&](const json& j) { windows.push_back(parse_window(j)); });
    return windows;
}

ProjectDataset load_archive(const std::filesystem::path& dir,
                            const std::optional<std::filesystem::path>& windows_file) {
    ProjectDataset ds;

    for_each_record(dir / kDevelopersFile, [&](const json& j) {
        Developer d;
        d.id = req_string(j, "id");
        d.team_id = req_string(j, "team");
        d.role = parse_role(req_string(j, "role"));
        ds.developers.push_back(std::move(d));
    });

    if (windows_file) {
        ds.sprint_windows = load_sprint_windows(*windows_file);
    } else {
        ds.sprint_windows = load_sprint_windows(dir / kSprintWindowsFile);
    }

    for_each_record(dir / kCommitsFile, [&](const json& j) {
        Commit c;
        c.sha = req_string(j, "sha");
        c.author_id = req_string(j, "author");
        c.timestamp = parse_iso8601(req_string(j, "timestamp"));
        c.message = req_string(j, "message");
        c.parent_count = j.contains("parents") ? static_cast<int>(req_int(j, "parents")) : 1;
        if (j.contains("changes")) {
            if (!j["changes"].is_array()) throw ParseError("'changes' must be an array");
            for (const auto& cj : j["changes"]) {
                FileChange fc;
                fc.path = req_string(cj, "path");
                fc.lines_added = req_int(cj, "added");
                fc.lines_deleted = req_int(cj, "deleted");
                fc.classification = classify_path(fc.path);
                c.changes.push_back(std::move(fc));
            }
        }
        ds.commits.push_back(std::move(c));
    });

    for_each_record(dir / kIssuesFile, [&](const json& j) {
        IssueRecord issue;
        issue.number = static_cast<int>(req_int(j, "number"));
        issue.title = req_string(j, "title");
        issue.body = j.contains("body") ? req_string(j, "body") : "";
        std::set<std::string> labels, assignees;
        if (j.contains("labels"))
            for (const auto& l : j["labels"]) labels.insert(l.get<std::string>());
        if (j.contains("assignees"))
            for (const auto& a : j["assignees"]) assignees.insert(a.get<std::string>());
        issue.labels.assign(labels.begin(), labels.end());
        issue.assignees.assign(assignees.begin(), assignees.end());
        if (j.contains("status_history")) {
            for (const auto& sj : j["status_history"]) {
                StatusEvent ev;
                const std::string status = req_string(sj, "status");
                if (status == "open") ev.status = IssueStatus::Open;
                else if (status == "closed") ev.status = IssueStatus::Closed;
                else throw ParseError("unknown issue status '" + status + "'");
                ev.timestamp = parse_iso8601(req_string(sj, "ts"));
                issue.status_history.push_back(ev);
            }
        }
        ds.issues.push_back(std::move(issue));
    });

    for_each_record(dir / kPrCommentsFile, [&](const json& j) {
        PRCommentRecord c;
        c.pr_number = static_cast<int>(req_int(j, "pr"));
        c.author_id = req_string(j, "author");
        c.timestamp = parse_iso8601(req_string(j, "timestamp"));
        c.body = j.contains("body") ? req_string(j, "body") : "";
        ds.pr_comments.push_back(std::move(c));
    });

    sort_dataset(ds);
    validate_dataset(ds);
    return ds;
}

void write_archive(const ProjectDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    ProjectDataset sorted = dataset;
    sort_dataset(sorted);

    std::vector<std::string> lines;
    for (const auto& d : sorted.developers) {
        json j{{"id", d.id}, {"team", d.team_id}, {"role", std::string(role_name(d.role))}};
        lines.push_back(j.dump());
    }
    write_lines(dir / kDevelopersFile, lines);

    lines.clear();
    for (const auto& w : sorted.sprint_windows) {
        json j{{"team", w.team_id},
               {"sprint", w.sprint_id},
               {"start", format_iso8601_utc(w.start)},
               {"review_meeting", format_iso8601_utc(w.review_meeting)}};
        lines.push_back(j.dump());
    }
    write_lines(dir / kSprintWindowsFile, lines);

    lines.clear();
    for (const auto& c : sorted.commits) {
        json changes = json::array();
        for (const auto& fc : c.changes)
            changes.push_back(json{{"path", fc.path}, {"added", fc.lines_added}, {"deleted", fc.lines_deleted}});
        json j{{"sha", c.sha},
               {"author", c.author_id},
               {"timestamp", format_iso8601_utc(c.timestamp)},
               {"message", c.message},
               {"parents", c.parent_count},
               {"changes", changes}};
        lines.push_back(j.dump());
    }
    write_lines(dir / kCommitsFile, lines);

    lines.clear();
    for (const auto& issue : sorted.issues) {
        json history = json::array();
        for (const auto& ev : issue.status_history)
            history.push_back(json{{"status", ev.status == IssueStatus::Open ? "open" : "closed"},
                                   {"ts", format_iso8601_utc(ev.timestamp)}});
        json j{{"number", issue.number}, {"title", issue.title},   {"body", issue.body},
               {"labels", issue.labels}, {"assignees", issue.assignees}, {"status_history", history}};
        lines.push_back(j.dump());
    }
    write_lines(dir / kIssuesFile, lines);

    lines.clear();
    for (const auto& c : sorted.pr_comments) {
        json j{{"pr", c.pr_number},
               {"author", c.author_id},
               {"timestamp", format_iso8601_utc(c.timestamp)},
               {"body", c.body}};
        lines.push_back(j.dump());
    }
    write_lines(dir / kPrCommentsFile, lines);
}

}  // namespace agile::store
