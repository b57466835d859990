#include "agile/store/forge.hpp"

#include <chrono>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "agile/errors.hpp"
#include "agile/store/archive.hpp"

namespace agile::store {

namespace {

using nlohmann::json;

struct ForgeClient {
    httplib::Client http;
    const ForgeOptions& options;

    explicit ForgeClient(const ForgeOptions& opts) : http(opts.base_url), options(opts) {
        http.set_follow_location(true);
    }

    void wait(int seconds) {
        if (options.sleeper) options.sleeper(seconds);
        else std::this_thread::sleep_for(std::chrono::seconds(seconds));
    }

    // One GET with rate-limit handling: waits and retries on secondary
    // rate limits (429, or 403 with rate-limit headers), up to the
    // configured budget.
    json get_json(const std::string& path) {
        httplib::Headers headers = {{"Accept", "application/vnd.github+json"}};
        if (!options.token.empty()) headers.emplace("Authorization", "token " + options.token);

        int waits = 0;
        int backoff = 1;
        for (;;) {
            auto res = http.Get(path, headers);
            if (!res)
                throw TransportError("network failure fetching " + options.base_url + path + ": " +
                                     httplib::to_string(res.error()));
            if (res->status == 200) {
                try {
                    return json::parse(res->body);
                } catch (const std::exception& e) {
                    throw TransportError(std::string("malformed forge response: ") + e.what());
                }
            }
            const bool rate_limited =
                res->status == 429 ||
                (res->status == 403 && (res->has_header("Retry-After") ||
                                        res->get_header_value("X-RateLimit-Remaining") == "0"));
            if (rate_limited) {
                if (waits >= options.max_rate_limit_waits)
                    throw RetryableError("rate limit budget exhausted fetching " + path);
                int delay = backoff;
                if (res->has_header("Retry-After"))
                    delay = std::max(1, std::atoi(res->get_header_value("Retry-After").c_str()));
                wait(std::min(delay, options.max_wait_seconds));
                ++waits;
                backoff = std::min(backoff * 2, options.max_wait_seconds);
                continue;
            }
            if (res->status == 401 || res->status == 403)
                throw AuthError("forge rejected credentials for " + path + " (HTTP " +
                                std::to_string(res->status) + ")");
            throw TransportError("unexpected HTTP " + std::to_string(res->status) + " fetching " + path);
        }
    }

    // Follows page=1.. until a short or empty page.
    std::vector<json> get_paged(const std::string& path_and_query) {
        std::vector<json> items;
        const char sep = path_and_query.find('?') == std::string::npos ? '?' : '&';
        for (int page = 1;; ++page) {
            const std::string url = path_and_query + sep + "per_page=" + std::to_string(options.page_size) +
                                    "&page=" + std::to_string(page);
            const json body = get_json(url);
            if (!body.is_array())
                throw TransportError("expected JSON array from " + path_and_query);
            for (const auto& item : body) items.push_back(item);
            if (static_cast<int>(body.size()) < options.page_size) break;
        }
        return items;
    }
};

std::string commit_author_id(const json& c) {
    if (c.contains("author") && c["author"].is_object() && c["author"].contains("login"))
        return c["author"]["login"].get<std::string>();
    // unlinked commits fall back to the recorded name
    return c.at("commit").at("author").value("name", "");
}

// Trailing number of a URL like .../issues/17 or .../pulls/17.
int number_from_url(const std::string& url) {
    const auto slash = url.find_last_of('/');
    if (slash == std::string::npos) return 0;
    return std::atoi(url.c_str() + slash + 1);
}

}  // namespace

void fetch_forge(const ForgeOptions& options, const std::filesystem::path& out_dir) {
    if (options.repo.empty()) throw UsageError("fetch_forge: repo must be set (owner/name)");
    ForgeClient client(options);
    const std::string repo_path = "/repos/" + options.repo;

    // Commits: list, then one detail request per sha for the diff stats.
    std::string commits_query = repo_path + "/commits";
    if (options.since) commits_query += "?since=" + format_iso8601_utc(*options.since);
    ProjectDataset staging;
    for (const auto& item : client.get_paged(commits_query)) {
        Commit commit;
        commit.sha = item.at("sha").get<std::string>();
        commit.author_id = commit_author_id(item);
        commit.timestamp = parse_iso8601(item.at("commit").at("author").at("date").get<std::string>());
        commit.message = item.at("commit").value("message", "");
        if (item.contains("parents") && item["parents"].is_array())
            commit.parent_count = static_cast<int>(item["parents"].size());
        if (options.since && commit.timestamp < *options.since) continue;

        const json detail = client.get_json(repo_path + "/commits/" + commit.sha);
        if (detail.contains("files")) {
            for (const auto& f : detail["files"]) {
                FileChange fc;
                fc.path = f.at("filename").get<std::string>();
                fc.lines_added = f.value("additions", 0);
                fc.lines_deleted = f.value("deletions", 0);
                fc.classification = classify_path(fc.path);
                commit.changes.push_back(std::move(fc));
            }
        }
        staging.commits.push_back(std::move(commit));
    }

    // Issues; the forge mixes PRs into the issue list and marks them.
    std::set<int> pr_numbers;
    for (const auto& item : client.get_paged(repo_path + "/issues?state=all")) {
        const int number = item.at("number").get<int>();
        if (item.contains("pull_request")) {
            pr_numbers.insert(number);
            continue;
        }
        IssueRecord issue;
        issue.number = number;
        issue.title = item.value("title", "");
        issue.body = item.contains("body") && item["body"].is_string() ? item["body"].get<std::string>() : "";
        if (item.contains("labels"))
            for (const auto& l : item["labels"]) issue.labels.push_back(l.at("name").get<std::string>());
        if (item.contains("assignees"))
            for (const auto& a : item["assignees"]) issue.assignees.push_back(a.at("login").get<std::string>());
        if (item.contains("created_at") && item["created_at"].is_string())
            issue.status_history.push_back({IssueStatus::Open, parse_iso8601(item["created_at"].get<std::string>())});
        if (item.contains("closed_at") && item["closed_at"].is_string())
            issue.status_history.push_back({IssueStatus::Closed, parse_iso8601(item["closed_at"].get<std::string>())});
        staging.issues.push_back(std::move(issue));
    }

    // PR conversation comments arrive via the issue-comment endpoint;
    // keep only the ones attached to pull requests.
    for (const auto& item : client.get_paged(repo_path + "/issues/comments")) {
        const int number = number_from_url(item.at("issue_url").get<std::string>());
        if (!pr_numbers.count(number)) continue;
        PRCommentRecord comment;
        comment.pr_number = number;
        comment.author_id = item.at("user").at("login").get<std::string>();
        comment.timestamp = parse_iso8601(item.at("created_at").get<std::string>());
        comment.body = item.value("body", "");
        staging.pr_comments.push_back(std::move(comment));
    }

    // Inline review comments.
    for (const auto& item : client.get_paged(repo_path + "/pulls/comments")) {
        PRCommentRecord comment;
        comment.pr_number = number_from_url(item.at("pull_request_url").get<std::string>());
        comment.author_id = item.at("user").at("login").get<std::string>();
        comment.timestamp = parse_iso8601(item.at("created_at").get<std::string>());
        comment.body = item.value("body", "");
        staging.pr_comments.push_back(std::move(comment));
    }

    std::filesystem::create_directories(out_dir);
    // write_archive emits all five entity files; ingest only produces the
    // three forge-side ones, so write into a scratch dir and move those.
    ProjectDataset forge_only;
    forge_only.commits = std::move(staging.commits);
    forge_only.issues = std::move(staging.issues);
    forge_only.pr_comments = std::move(staging.pr_comments);
    sort_dataset(forge_only);

    std::filesystem::path tmp = out_dir / ".forge_fetch_tmp";
    write_archive(forge_only, tmp);
    for (const char* name : {kCommitsFile, kIssuesFile, kPrCommentsFile}) {
        std::filesystem::rename(tmp / name, out_dir / name);
    }
    std::filesystem::remove_all(tmp);
}

}  // namespace agile::store
