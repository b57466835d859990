#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "agile/cli/run.hpp"

using agile::cli::run;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("agiledata_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

long count_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::string line;
    long n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

const std::string kFixtureArchive = (std::filesystem::path(FIXTURE_DIR) / "archive").string();

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("measure on the fixture exits 0 and writes all records") {
    const auto out = temp_dir("measure") / "measurements.csv";
    CHECK(run({"measure", "--archives", kFixtureArchive, "--out", out.string()}) == 0);
    CHECK(count_lines(out) == 73);  // header + 72 records
}

TEST_CASE("full pipeline synth -> measure -> analyze -> report") {
    const auto base = temp_dir("pipeline");
    const auto data = base / "data";
    const auto measurements = base / "measurements.csv";
    const auto report = base / "report";

    CHECK(run({"synth", "--seed", "5", "--out", data.string()}) == 0);
    CHECK(run({"measure", "--archives", data.string(), "--out", measurements.string()}) == 0);
    CHECK(run({"analyze", "--measurements", measurements.string(), "--survey",
               (data / "survey.csv").string(), "--out", report.string()}) == 0);
    CHECK(std::filesystem::exists(report / "report.md"));
    CHECK(std::filesystem::exists(report / "tables" / "survey_descriptives.csv"));

    const auto rendered = base / "rendered.md";
    CHECK(run({"report", "--report", report.string(), "--out", rendered.string()}) == 0);
    CHECK(slurp(rendered) == slurp(report / "report.md"));
}

TEST_CASE("two identical pipeline runs are byte-identical") {
    const auto base = temp_dir("determinism");
    for (const char* side : {"x", "y"}) {
        const auto root = base / side;
        run({"synth", "--seed", "21", "--out", (root / "data").string()});
        run({"measure", "--archives", (root / "data").string(), "--out",
             (root / "measurements.csv").string()});
        run({"analyze", "--measurements", (root / "measurements.csv").string(), "--survey",
             (root / "data" / "survey.csv").string(), "--out", (root / "report").string()});
    }
    for (const auto& entry : std::filesystem::recursive_directory_iterator(base / "x")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = std::filesystem::relative(entry.path(), base / "x");
        CHECK(slurp(entry.path()) == slurp(base / "y" / rel));
    }
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({"measure", "--archives", "/nonexistent/path", "--out", "/tmp/x.csv"}) == 2);
    CHECK(run({"measure"}) == 2);                     // missing required options
    CHECK(run({"no-such-command"}) == 2);
    CHECK(run({"analyze", "--measurements", "/nonexistent.csv", "--survey", "/nonexistent.csv",
               "--out", "/tmp/r"}) == 2);
}

TEST_CASE("data errors exit 3") {
    const auto base = temp_dir("dataerr");
    const auto data = base / "data";
    run({"synth", "--seed", "5", "--out", data.string()});
    run({"measure", "--archives", data.string(), "--out", (base / "m.csv").string()});

    // empty survey: header only
    const auto empty_survey = base / "empty.csv";
    std::ofstream(empty_survey) << "team,developer,role,sprint,q1,q2,q3,q4,q5,q6,q7,q8,q9\n";
    CHECK(run({"analyze", "--measurements", (base / "m.csv").string(), "--survey",
               empty_survey.string(), "--out", (base / "r").string()}) == 3);

    // corrupt archive record
    const auto broken = base / "broken";
    std::filesystem::create_directories(broken);
    std::ofstream(broken / "developers.ndjson") << "{bad json\n";
    CHECK(run({"measure", "--archives", broken.string(), "--out", (base / "m2.csv").string()}) == 3);
}

TEST_CASE("transport errors exit 4") {
    CHECK(run({"ingest", "--repo", "acme/demo", "--base-url", "http://127.0.0.1:1", "--out",
               temp_dir("ingest").string()}) == 4);
}

TEST_CASE("analysis flags are accepted") {
    const auto base = temp_dir("flags");
    const auto data = base / "data";
    run({"synth", "--seed", "9", "--out", data.string()});
    run({"measure", "--archives", data.string(), "--out", (base / "m.csv").string()});

    const auto plan = base / "plan.csv";
    std::ofstream(plan) << "question,measure\nQ1,RTA\nQ9,PRC\n";
    CHECK(run({"analyze", "--measurements", (base / "m.csv").string(), "--survey",
               (data / "survey.csv").string(), "--out", (base / "r").string(), "--exclude-pos",
               "--pooling", "per-team", "--plan", plan.string(), "--agreement-units", "question"}) == 0);

    const std::string assoc = slurp(base / "r" / "tables" / "survey_measurement_associations.csv");
    CHECK(assoc.find("Q9 - PRC") != std::string::npos);
    CHECK(assoc.find("Q2 - UFE") == std::string::npos);  // plan replaced the default
}

TEST_CASE("a windows file overrides the archive's sprint windows") {
    const auto base = temp_dir("windows");
    const auto data = base / "data";
    run({"synth", "--seed", "2", "--teams", "1", "--devs-per-team", "3", "--out", data.string()});

    // replacement config keeps only sprint 1 with an earlier review meeting
    const auto windows = base / "windows.ndjson";
    std::ofstream(windows) << R"({"team": "1", "sprint": 1, "start": "2024-01-08T00:00:00Z", )"
                           << R"("review_meeting": "2024-01-10T00:00:00Z"})" << '\n';
    const auto m1 = base / "m1.csv";
    const auto m2 = base / "m2.csv";
    CHECK(run({"measure", "--archives", data.string(), "--out", m1.string()}) == 0);
    CHECK(run({"measure", "--archives", data.string(), "--windows", windows.string(), "--out",
               m2.string()}) == 0);
    CHECK(count_lines(m2) < count_lines(m1));  // one window left -> fewer records
}

TEST_CASE("the installed binary behaves like the library entry point") {
    const char* bin = std::getenv("AGILEDATA_BIN");
    if (!bin) return;  // only wired up under ctest
    const auto base = temp_dir("binary");
    const std::string cmd = std::string(bin) + " synth --seed 3 --out " + (base / "d").string() +
                            " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(std::filesystem::exists(base / "d" / "survey.csv"));

    const std::string bad = std::string(bin) + " measure > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 2);
}

}  // TEST_SUITE
