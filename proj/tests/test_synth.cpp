#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "agile/analysis/analysis.hpp"
#include "agile/errors.hpp"
#include "agile/measures/measures.hpp"
#include "agile/store/archive.hpp"
#include "agile/survey/survey.hpp"
#include "agile/synth/synth.hpp"

using namespace agile;
using namespace agile::synth;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("agiledata_synth_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("identical seeds produce bit-identical files") {
    EffectConfig config;
    config.seed = 42;
    config.teams = 2;
    config.devs_per_team = 4;
    const auto dir1 = temp_dir("det1");
    const auto dir2 = temp_dir("det2");
    write_synth(generate(config), dir1);
    write_synth(generate(config), dir2);
    for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
        const auto name = entry.path().filename();
        CHECK(slurp(entry.path()) == slurp(dir2 / name));
    }

    config.seed = 43;
    const auto dir3 = temp_dir("det3");
    write_synth(generate(config), dir3);
    CHECK(slurp(dir1 / "commits.ndjson") != slurp(dir3 / "commits.ndjson"));
}

TEST_CASE("generated files validate through the loaders") {
    EffectConfig config;
    config.seed = 7;
    const auto dir = temp_dir("load");
    const SynthDataset data = generate(config);
    write_synth(data, dir);

    const store::ProjectDataset ds = store::load_archive(dir);  // validates internally
    CHECK(ds.developers.size() == 42);
    CHECK(ds.teams.size() == 6);
    CHECK(ds.sprint_windows.size() == 24);
    CHECK(ds.commits.size() == data.dataset.commits.size());

    const auto responses = survey::load_survey(dir / "survey.csv");
    CHECK(responses.size() == 42 * 4 * 9);
    long valid = 0;
    for (const auto& r : responses) valid += r.rating.has_value();
    CHECK(valid > 0);
    CHECK(valid < static_cast<long>(responses.size()));  // some cells blank
}

TEST_CASE("infeasible configs are rejected") {
    EffectConfig config;
    config.devs_per_team = 0;
    CHECK_THROWS_AS(generate(config), DataError);
    config.devs_per_team = 5;
    config.sprints = 9;
    CHECK_THROWS_AS(generate(config), DataError);
    config.sprints = 4;
    config.coupling[{survey::QuestionId::Q1, measures::MeasureId::RTA}] = 1.5;
    CHECK_THROWS_AS(generate(config), DataError);
}

TEST_CASE("injected effects are recoverable through the real pipeline") {
    EffectConfig config;
    config.seed = 11;
    config.coupling[{survey::QuestionId::Q1, measures::MeasureId::RTA}] = 0.5;
    config.role_shift[survey::QuestionId::Q7] = {1.5, 0.0, 0.0};
    config.sprint_shift[survey::QuestionId::Q4] = {{1, 1.5}};

    const SynthDataset data = generate(config);
    const auto records = measures::compute_all(data.dataset);
    analysis::AnalysisConfig cfg;
    const analysis::AnalysisReport report = analysis::analyze(data.responses, records, cfg);

    const auto& q1_rta = report.survey_measurement_associations[0];
    REQUIRE(q1_rta.test.has_value());
    CHECK(q1_rta.test->statistic < 0.0);  // agreement (low rating) with high RTA
    CHECK(*q1_rta.test->p_value < 0.05);

    const auto& q7 = report.role_effects[6];
    REQUIRE(q7.test.has_value());
    CHECK(*q7.test->p_value < 0.05);

    const auto& q4 = report.perception_change[3];
    REQUIRE(q4.test.has_value());
    CHECK(*q4.test->p_value < 0.05);
}

TEST_CASE("stronger coupling yields stronger recovered association") {
    double weak_tau = 0.0, strong_tau = 0.0;
    for (double strength : {0.2, 0.8}) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            EffectConfig config;
            config.seed = seed;
            config.coupling[{survey::QuestionId::Q1, measures::MeasureId::RTA}] = strength;
            const SynthDataset data = generate(config);
            const auto records = measures::compute_all(data.dataset);
            const auto rows = analysis::survey_measurement_associations(
                data.responses, records, analysis::default_pairing_plan());
            total += rows[0].test ? rows[0].test->statistic : 0.0;
        }
        if (strength < 0.5) weak_tau = total / 3.0;
        else strong_tau = total / 3.0;
    }
    CHECK(strong_tau < weak_tau);  // more negative
    CHECK(std::fabs(strong_tau) > std::fabs(weak_tau));
}

TEST_CASE("null config produces exchangeable-looking data") {
    EffectConfig config;
    config.seed = 99;
    const SynthDataset data = generate(config);
    const auto records = measures::compute_all(data.dataset);

    // RTA behaves like the intended base distribution: median near 0.5
    std::vector<double> rta_values;
    for (const auto& r : records)
        if (r.measure == measures::MeasureId::RTA && !r.missing) rta_values.push_back(r.value);
    REQUIRE(rta_values.size() > 100);
    std::sort(rta_values.begin(), rta_values.end());
    const double median = rta_values[rta_values.size() / 2];
    CHECK(median > 0.2);
    CHECK(median < 1.0);
}

}  // TEST_SUITE
