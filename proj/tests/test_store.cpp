#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"

#include "agile/errors.hpp"
#include "agile/store/archive.hpp"
#include "agile/store/types.hpp"

using namespace agile;
using namespace agile::store;

namespace {

const std::filesystem::path kFixtureArchive = std::filesystem::path(FIXTURE_DIR) / "archive";

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("agiledata_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void copy_fixture(const std::filesystem::path& dst) {
    std::filesystem::copy(kFixtureArchive, dst,
                          std::filesystem::copy_options::recursive |
                              std::filesystem::copy_options::overwrite_existing);
}

void append_line(const std::filesystem::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::app);
    out << line << '\n';
}

}  // namespace

TEST_SUITE("store") {

TEST_CASE("classify_path follows the directory convention") {
    CHECK(classify_path("app/models/user.rb") == PathClass::Application);
    CHECK(classify_path("spec/models/user_spec.rb") == PathClass::Test);
    CHECK(classify_path("test/integration/login_test.rb") == PathClass::Test);
    CHECK(classify_path("config/routes.rb") == PathClass::Other);
    CHECK(classify_path("README.md") == PathClass::Other);
    CHECK(classify_path("application/x.rb") == PathClass::Other);  // whole segment, not prefix
    CHECK(classify_path("lib/app/x.rb") == PathClass::Other);      // first segment decides
    CHECK_THROWS_AS(classify_path(""), ValidationError);
}

TEST_CASE("classify_path honors custom rules") {
    PathRules rules;
    rules.application_prefixes = {"src"};
    rules.test_prefixes = {"tests"};
    CHECK(classify_path("src/x.cc", rules) == PathClass::Application);
    CHECK(classify_path("tests/x.cc", rules) == PathClass::Test);
    CHECK(classify_path("app/x.cc", rules) == PathClass::Other);
}

TEST_CASE("fixture archive loads with expected cardinalities") {
    const ProjectDataset ds = load_archive(kFixtureArchive);
    CHECK(ds.developers.size() == 6);
    CHECK(ds.teams == std::vector<std::string>{"A", "B"});
    CHECK(ds.sprint_windows.size() == 4);
    CHECK(ds.commits.size() == 18);
    CHECK(ds.issues.size() == 12);
    CHECK(ds.pr_comments.size() == 10);

    // zone offsets normalized: b1 was written as 11:00+01:00
    const Commit* b1 = nullptr;
    for (const auto& c : ds.commits)
        if (c.sha == "b1") b1 = &c;
    REQUIRE(b1 != nullptr);
    CHECK(b1->timestamp == parse_iso8601("2024-01-02T10:00:00Z"));

    // commits arrive sorted by (timestamp, sha)
    for (std::size_t i = 1; i < ds.commits.size(); ++i)
        CHECK(std::tie(ds.commits[i - 1].timestamp, ds.commits[i - 1].sha) <=
              std::tie(ds.commits[i].timestamp, ds.commits[i].sha));
}

TEST_CASE("archive round trip is the identity") {
    const ProjectDataset ds = load_archive(kFixtureArchive);
    const auto dir = temp_dir("roundtrip");
    write_archive(ds, dir);
    const ProjectDataset again = load_archive(dir);

    REQUIRE(again.commits.size() == ds.commits.size());
    for (std::size_t i = 0; i < ds.commits.size(); ++i) {
        CHECK(again.commits[i].sha == ds.commits[i].sha);
        CHECK(again.commits[i].author_id == ds.commits[i].author_id);
        CHECK(again.commits[i].timestamp == ds.commits[i].timestamp);
        CHECK(again.commits[i].message == ds.commits[i].message);
        REQUIRE(again.commits[i].changes.size() == ds.commits[i].changes.size());
        for (std::size_t j = 0; j < ds.commits[i].changes.size(); ++j) {
            CHECK(again.commits[i].changes[j].path == ds.commits[i].changes[j].path);
            CHECK(again.commits[i].changes[j].lines_added == ds.commits[i].changes[j].lines_added);
            CHECK(again.commits[i].changes[j].lines_deleted == ds.commits[i].changes[j].lines_deleted);
        }
    }
    REQUIRE(again.issues.size() == ds.issues.size());
    for (std::size_t i = 0; i < ds.issues.size(); ++i) {
        CHECK(again.issues[i].number == ds.issues[i].number);
        CHECK(again.issues[i].labels == ds.issues[i].labels);
        CHECK(again.issues[i].assignees == ds.issues[i].assignees);
        CHECK(again.issues[i].status_history.size() == ds.issues[i].status_history.size());
    }
    CHECK(again.pr_comments.size() == ds.pr_comments.size());
    CHECK(again.developers.size() == ds.developers.size());
    CHECK(again.sprint_windows.size() == ds.sprint_windows.size());

    // a second write produces byte-identical files
    const auto dir2 = temp_dir("roundtrip2");
    write_archive(again, dir2);
    for (const char* name :
         {kDevelopersFile, kSprintWindowsFile, kCommitsFile, kIssuesFile, kPrCommentsFile}) {
        std::ifstream a(dir / name), b(dir2 / name);
        const std::string ca((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        const std::string cb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(ca == cb);
    }
}

TEST_CASE("missing entity files load as empty collections") {
    const auto dir = temp_dir("sparse");
    std::ofstream(dir / kDevelopersFile) << "{\"id\": \"solo\", \"team\": \"A\", \"role\": \"developer\"}\n";
    std::ofstream(dir / kCommitsFile);  // exists but empty
    const ProjectDataset ds = load_archive(dir);
    CHECK(ds.developers.size() == 1);
    CHECK(ds.commits.empty());
    CHECK(ds.issues.empty());
}

TEST_CASE("unknown commit author raises a referential error naming the sha") {
    const auto dir = temp_dir("ghost");
    copy_fixture(dir);
    append_line(dir / kCommitsFile,
                R"({"sha": "zz", "author": "ghost", "timestamp": "2024-01-03T00:00:00Z", "message": "x", "changes": []})");
    try {
        load_archive(dir);
        FAIL("expected ReferentialError");
    } catch (const ReferentialError& e) {
        CHECK(std::string(e.what()).find("zz") != std::string::npos);
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
}

TEST_CASE("malformed record raises a parse error with the line number") {
    const auto dir = temp_dir("badline");
    copy_fixture(dir);
    append_line(dir / kCommitsFile, "{not json");
    try {
        load_archive(dir);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("commits.ndjson:19") != std::string::npos);
    }
}

TEST_CASE("validation rejects duplicates and bad windows") {
    ProjectDataset ds;
    ds.developers = {{"a", "T", Role::Developer}, {"a", "T", Role::ScrumMaster}};
    sort_dataset(ds);
    CHECK_THROWS_AS(validate_dataset(ds), ValidationError);

    ProjectDataset ds2;
    ds2.developers = {{"a", "T", Role::Developer}};
    ds2.sprint_windows = {{1, "T", 100, 100}};  // start == review
    sort_dataset(ds2);
    CHECK_THROWS_AS(validate_dataset(ds2), ValidationError);

    ProjectDataset ds3;
    ds3.developers = {{"a", "T", Role::Developer}};
    ds3.sprint_windows = {{1, "T", 0, 1000}, {2, "T", 500, 2000}};  // overlap
    sort_dataset(ds3);
    CHECK_THROWS_AS(validate_dataset(ds3), ValidationError);

    ProjectDataset ds4;
    ds4.developers = {{"a", "T", Role::Developer}};
    ds4.sprint_windows = {{7, "T", 0, 1000}};  // sprint id out of 1..4
    sort_dataset(ds4);
    CHECK_THROWS_AS(validate_dataset(ds4), ValidationError);
}

TEST_CASE("slice_sprint applies the closed window and team membership") {
    const ProjectDataset ds = load_archive(kFixtureArchive);

    const SprintSlice a1 = slice_sprint(ds, "A", 1);
    std::vector<std::string> shas;
    for (const auto* c : a1.commits) shas.push_back(c->sha);
    CHECK(shas == std::vector<std::string>{"b1", "c1", "c2", "b2", "c3"});

    // f3 sits exactly on review_meeting - 12h of sprint 2 and is inside;
    // dana's comment exactly at review_meeting is included as well
    const SprintSlice b2 = slice_sprint(ds, "B", 2);
    shas.clear();
    for (const auto* c : b2.commits) shas.push_back(c->sha);
    CHECK(shas == std::vector<std::string>{"f2", "f3", "d1"});
    bool found_review_comment = false;
    for (const auto* c : b2.comments)
        if (c->author_id == "dana" && c->timestamp == parse_iso8601("2024-01-28T12:00:00Z"))
            found_review_comment = true;
    CHECK(found_review_comment);

    CHECK_THROWS_AS(slice_sprint(ds, "A", 3), LookupError);
    CHECK_THROWS_AS(slice_sprint(ds, "Z", 1), LookupError);
}

TEST_CASE("sprint slices partition in-window commits") {
    const ProjectDataset ds = load_archive(kFixtureArchive);
    std::map<std::string, int> appearances;
    for (const auto& team : ds.teams)
        for (const auto* w : ds.team_windows(team)) {
            const SprintSlice slice = slice_sprint(ds, team, w->sprint_id);
            for (const auto* c : slice.commits) ++appearances[c->sha];
        }
    for (const auto& [sha, count] : appearances) CHECK(count == 1);
    // out-of-window commits appear in no slice
    CHECK(appearances.count("b4") == 0);
    CHECK(appearances.count("f0") == 0);
    CHECK(appearances.count("e3") == 0);
    CHECK(appearances.size() == 15);
}

}  // TEST_SUITE
