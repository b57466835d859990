#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

#include "agile/errors.hpp"
#include "agile/store/archive.hpp"
#include "agile/store/forge.hpp"

using namespace agile;
using namespace agile::store;
using nlohmann::json;

namespace {

// Minimal in-process forge with two commits, one issue, one PR and
// comments on both sides of the PR fence.
class MockForge {
public:
    MockForge() {
        server_.Get("/repos/acme/demo/commits", [this](const httplib::Request& req, httplib::Response& res) {
            requests_++;
            if (!check_auth(req, res)) return;
            if (rate_limit_once_ && !rate_limited_.exchange(true)) {
                res.status = 403;
                res.set_header("Retry-After", "1");
                res.set_header("X-RateLimit-Remaining", "0");
                return;
            }
            const int page = std::atoi(req.get_param_value("page").c_str());
            json body = json::array();
            if (page == 1) {
                json items = all_commits();
                if (req.has_param("since")) {
                    const auto since = parse_iso8601(req.get_param_value("since"));
                    json filtered = json::array();
                    for (const auto& c : items)
                        if (parse_iso8601(c["commit"]["author"]["date"].get<std::string>()) >= since)
                            filtered.push_back(c);
                    items = filtered;
                }
                body = items;
            }
            res.set_content(body.dump(), "application/json");
        });
        server_.Get(R"(/repos/acme/demo/commits/([0-9a-f]+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        requests_++;
                        if (!check_auth(req, res)) return;
                        const std::string sha = req.matches[1];
                        json files = json::array();
                        if (sha == "aaaa01") {
                            files.push_back({{"filename", "app/x.rb"}, {"additions", 10}, {"deletions", 2}});
                            files.push_back({{"filename", "spec/x_spec.rb"}, {"additions", 5}, {"deletions", 0}});
                        } else {
                            files.push_back({{"filename", "app/y.rb"}, {"additions", 3}, {"deletions", 3}});
                        }
                        res.set_content(json{{"sha", sha}, {"files", files}}.dump(), "application/json");
                    });
        server_.Get("/repos/acme/demo/issues", [this](const httplib::Request& req, httplib::Response& res) {
            requests_++;
            if (!check_auth(req, res)) return;
            const int page = std::atoi(req.get_param_value("page").c_str());
            json body = json::array();
            if (page == 1) {
                body.push_back({{"number", 1},
                                {"title", "Real issue"},
                                {"body", "details"},
                                {"labels", json::array({{{"name", "Team A"}}})},
                                {"assignees", json::array({{{"login", "alice"}}})},
                                {"created_at", "2024-01-02T00:00:00Z"},
                                {"closed_at", "2024-01-05T00:00:00Z"}});
                body.push_back({{"number", 2},
                                {"title", "A pull request"},
                                {"created_at", "2024-01-03T00:00:00Z"},
                                {"closed_at", nullptr},
                                {"pull_request", json{{"url", "x"}}}});
            }
            res.set_content(body.dump(), "application/json");
        });
        server_.Get("/repos/acme/demo/issues/comments",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        requests_++;
                        if (!check_auth(req, res)) return;
                        const int page = std::atoi(req.get_param_value("page").c_str());
                        json body = json::array();
                        if (page == 1) {
                            // on the PR (#2): kept; on the plain issue (#1): dropped
                            body.push_back({{"issue_url", "https://forge/repos/acme/demo/issues/2"},
                                            {"user", json{{"login", "bob"}}},
                                            {"created_at", "2024-01-04T10:00:00Z"},
                                            {"body", "conversation comment"}});
                            body.push_back({{"issue_url", "https://forge/repos/acme/demo/issues/1"},
                                            {"user", json{{"login", "bob"}}},
                                            {"created_at", "2024-01-04T11:00:00Z"},
                                            {"body", "issue chatter"}});
                        }
                        res.set_content(body.dump(), "application/json");
                    });
        server_.Get("/repos/acme/demo/pulls/comments",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        requests_++;
                        if (!check_auth(req, res)) return;
                        const int page = std::atoi(req.get_param_value("page").c_str());
                        json body = json::array();
                        if (page == 1)
                            body.push_back({{"pull_request_url", "https://forge/repos/acme/demo/pulls/2"},
                                            {"user", json{{"login", "alice"}}},
                                            {"created_at", "2024-01-04T12:00:00Z"},
                                            {"body", "inline review comment"}});
                        res.set_content(body.dump(), "application/json");
                    });

        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockForge() {
        server_.stop();
        thread_.join();
    }

    static json all_commits() {
        json items = json::array();
        items.push_back({{"sha", "aaaa01"},
                         {"author", json{{"login", "alice"}}},
                         {"commit", json{{"message", "Add feature #1"},
                                         {"author", json{{"date", "2024-01-03T10:00:00Z"}}}}},
                         {"parents", json::array({json{{"sha", "p1"}}})}});
        items.push_back({{"sha", "bbbb02"},
                         {"author", json{{"login", "bob"}}},
                         {"commit", json{{"message", "Merge branch"},
                                         {"author", json{{"date", "2024-01-04T09:00:00Z"}}}}},
                         {"parents", json::array({json{{"sha", "p1"}}, json{{"sha", "p2"}}})}});
        return items;
    }

    bool check_auth(const httplib::Request& req, httplib::Response& res) {
        if (!required_token_.empty() &&
            req.get_header_value("Authorization") != "token " + required_token_) {
            res.status = 401;
            res.set_content("{\"message\": \"Bad credentials\"}", "application/json");
            return false;
        }
        return true;
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    void require_token(const std::string& token) { required_token_ = token; }
    void rate_limit_first_commit_request() { rate_limit_once_ = true; }
    int requests() const { return requests_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::string required_token_;
    bool rate_limit_once_ = false;
    std::atomic<bool> rate_limited_{false};
    std::atomic<int> requests_{0};
};

std::filesystem::path temp_out(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("agiledata_forge_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_line(const std::filesystem::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::binary);
    out << line << '\n';
}

}  // namespace

TEST_SUITE("forge") {

TEST_CASE("fetch writes archive files that load cleanly once developers are declared") {
    MockForge forge;
    ForgeOptions options;
    options.base_url = forge.url();
    options.repo = "acme/demo";
    options.sleeper = [](int) {};
    const auto out = temp_out("happy");
    fetch_forge(options, out);

    // forge side: three entity files
    CHECK(std::filesystem::exists(out / kCommitsFile));
    CHECK(std::filesystem::exists(out / kIssuesFile));
    CHECK(std::filesystem::exists(out / kPrCommentsFile));

    // declare developers + windows, then the archive validates
    write_line(out / kDevelopersFile,
               R"({"id": "alice", "team": "A", "role": "developer"})"
               "\n"
               R"({"id": "bob", "team": "A", "role": "scrum_master"})");
    write_line(out / kSprintWindowsFile,
               R"({"team": "A", "sprint": 1, "start": "2024-01-01T00:00:00Z", "review_meeting": "2024-01-14T12:00:00Z"})");
    const ProjectDataset ds = load_archive(out);

    REQUIRE(ds.commits.size() == 2);
    CHECK(ds.commits[0].sha == "aaaa01");
    CHECK(ds.commits[0].changes.size() == 2);
    CHECK(ds.commits[0].changes[0].classification == PathClass::Application);
    CHECK(ds.commits[1].parent_count == 2);  // merge marked

    REQUIRE(ds.issues.size() == 1);  // the PR is not an issue record
    CHECK(ds.issues[0].number == 1);
    CHECK(ds.issues[0].labels == std::vector<std::string>{"Team A"});
    CHECK(ds.issues[0].status_history.size() == 2);

    REQUIRE(ds.pr_comments.size() == 2);  // conversation + review comment, issue chatter dropped
    for (const auto& c : ds.pr_comments) CHECK(c.pr_number == 2);
}

TEST_CASE("fetch is idempotent for a fixed upstream state") {
    MockForge forge;
    ForgeOptions options;
    options.base_url = forge.url();
    options.repo = "acme/demo";
    options.sleeper = [](int) {};
    const auto out1 = temp_out("idem1");
    const auto out2 = temp_out("idem2");
    fetch_forge(options, out1);
    fetch_forge(options, out2);
    for (const char* name : {kCommitsFile, kIssuesFile, kPrCommentsFile})
        CHECK(slurp(out1 / name) == slurp(out2 / name));
}

TEST_CASE("a future since yields an empty commit archive") {
    MockForge forge;
    ForgeOptions options;
    options.base_url = forge.url();
    options.repo = "acme/demo";
    options.since = parse_iso8601("2030-01-01T00:00:00Z");
    options.sleeper = [](int) {};
    const auto out = temp_out("future");
    fetch_forge(options, out);
    CHECK(slurp(out / kCommitsFile).empty());
}

TEST_CASE("invalid token raises an auth error") {
    MockForge forge;
    forge.require_token("s3cret");
    ForgeOptions options;
    options.base_url = forge.url();
    options.repo = "acme/demo";
    options.token = "wrong";
    options.sleeper = [](int) {};
    CHECK_THROWS_AS(fetch_forge(options, temp_out("auth")), AuthError);

    options.token = "s3cret";
    fetch_forge(options, temp_out("auth_ok"));  // correct token passes
}

TEST_CASE("secondary rate limits wait and retry") {
    MockForge forge;
    forge.rate_limit_first_commit_request();
    ForgeOptions options;
    options.base_url = forge.url();
    options.repo = "acme/demo";
    std::vector<int> waits;
    options.sleeper = [&](int seconds) { waits.push_back(seconds); };
    const auto out = temp_out("ratelimit");
    fetch_forge(options, out);
    REQUIRE(waits.size() == 1);
    CHECK(waits[0] == 1);  // honored Retry-After
    CHECK_FALSE(slurp(out / kCommitsFile).empty());
}

TEST_CASE("rate limiting without Retry-After backs off exponentially until the budget is spent") {
    httplib::Server always_limited;
    always_limited.Get(R"(/repos/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 429;  // no Retry-After header
    });
    const int port = always_limited.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { always_limited.listen_after_bind(); });
    always_limited.wait_until_ready();

    ForgeOptions options;
    options.base_url = "http://127.0.0.1:" + std::to_string(port);
    options.repo = "acme/demo";
    options.max_rate_limit_waits = 3;
    std::vector<int> waits;
    options.sleeper = [&](int seconds) { waits.push_back(seconds); };
    CHECK_THROWS_AS(fetch_forge(options, temp_out("budget")), RetryableError);
    CHECK(waits == std::vector<int>{1, 2, 4});

    always_limited.stop();
    thread.join();
}

TEST_CASE("unreachable host raises a transport error") {
    ForgeOptions options;
    options.base_url = "http://127.0.0.1:1";  // nothing listens there
    options.repo = "acme/demo";
    options.sleeper = [](int) {};
    CHECK_THROWS_AS(fetch_forge(options, temp_out("unreachable")), TransportError);
}

}  // TEST_SUITE
