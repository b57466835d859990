#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"

#include "agile/errors.hpp"
#include "agile/survey/survey.hpp"

using namespace agile;
using namespace agile::survey;

namespace {

std::filesystem::path write_temp_survey(const std::string& name, const std::string& content) {
    const auto file = std::filesystem::temp_directory_path() / ("agiledata_survey_" + name + ".csv");
    std::ofstream out(file, std::ios::binary);
    out << content;
    return file;
}

constexpr const char* kHeader = "team,developer,role,sprint,q1,q2,q3,q4,q5,q6,q7,q8,q9\n";

}  // namespace

TEST_SUITE("survey") {

TEST_CASE("likert encoding, 1 = strongly agree") {
    CHECK(encode_likert("strongly agree") == 1);
    CHECK(encode_likert("agree") == 2);
    CHECK(encode_likert("neutral") == 3);
    CHECK(encode_likert("disagree") == 4);
    CHECK(encode_likert("strongly disagree") == 5);
    CHECK(encode_likert("Strongly Agree") == 1);  // case-insensitive
    CHECK_THROWS_AS(encode_likert("kind of agree"), ParseError);
}

TEST_CASE("likert encoding is a bijection and reversing labels maps r to 6-r") {
    const std::array<std::string, 5> labels = {"strongly agree", "agree", "neutral", "disagree",
                                               "strongly disagree"};
    std::set<int> seen;
    for (const auto& l : labels) seen.insert(encode_likert(l));
    CHECK(seen == std::set<int>{1, 2, 3, 4, 5});
    for (std::size_t i = 0; i < labels.size(); ++i)
        CHECK(encode_likert(labels[labels.size() - 1 - i]) == 6 - encode_likert(labels[i]));
}

TEST_CASE("question metadata carries the claim texts") {
    CHECK(question_label(QuestionId::Q1) == "Q1");
    CHECK(claim_text(QuestionId::Q1) == "I wrote code using a test-driven approach");
    CHECK(claim_text(QuestionId::Q5) == "I started implementing only shortly before the deadline");
    CHECK(claim_text(QuestionId::Q9) == "Our team has successfully implemented the agile values");
    CHECK(parse_question("q4") == QuestionId::Q4);
    CHECK_THROWS_AS(parse_question("Q10"), ValidationError);
}

TEST_CASE("load_survey reads rows and blanks become missing") {
    const auto file = write_temp_survey("basic", std::string(kHeader) +
                                                     "A,alice,product_owner,1,,2,3,4,5,1,2,3,4\n"
                                                     "A,ben,scrum_master,1,1,2,3,4,5,1,2,3,\n");
    const auto responses = load_survey(file);
    CHECK(responses.size() == 18);  // 2 rows x 9 questions

    const auto& q1_alice = responses[0];
    CHECK(q1_alice.developer_id == "alice");
    CHECK(q1_alice.role == store::Role::ProductOwner);
    CHECK(q1_alice.question == QuestionId::Q1);
    CHECK_FALSE(q1_alice.rating.has_value());  // blank cell
    CHECK(responses[1].rating == 2);

    const auto& q9_ben = responses.back();
    CHECK(q9_ben.developer_id == "ben");
    CHECK(q9_ben.question == QuestionId::Q9);
    CHECK_FALSE(q9_ben.rating.has_value());
}

TEST_CASE("load_survey validation failures") {
    const auto out_of_range = write_temp_survey("range", std::string(kHeader) +
                                                             "A,alice,developer,1,6,,,,,,,,\n");
    CHECK_THROWS_AS(load_survey(out_of_range), ValidationError);

    const auto duplicate = write_temp_survey("dup", std::string(kHeader) +
                                                        "A,alice,developer,1,1,,,,,,,,\n"
                                                        "A,alice,developer,1,2,,,,,,,,\n");
    CHECK_THROWS_AS(load_survey(duplicate), ValidationError);

    const auto bad_sprint = write_temp_survey("sprint", std::string(kHeader) +
                                                            "A,alice,developer,5,1,,,,,,,,\n");
    CHECK_THROWS_AS(load_survey(bad_sprint), ValidationError);

    const auto bad_header = write_temp_survey("header", "team,developer,role\nA,alice,developer\n");
    CHECK_THROWS_AS(load_survey(bad_header), ParseError);
}

TEST_CASE("survey write/load round trip conserves valid and missing counts") {
    std::vector<LikertResponse> responses;
    std::mt19937_64 rng(5);
    for (int dev = 0; dev < 10; ++dev) {
        for (int sprint = 1; sprint <= 4; ++sprint) {
            for (QuestionId q : kAllQuestions) {
                LikertResponse r;
                r.developer_id = "dev" + std::to_string(dev);
                r.team_id = dev < 5 ? "A" : "B";
                r.role = dev % 5 == 0 ? store::Role::ProductOwner : store::Role::Developer;
                r.sprint_id = sprint;
                r.question = q;
                if (rng() % 5 != 0) r.rating = 1 + static_cast<int>(rng() % 5);
                responses.push_back(std::move(r));
            }
        }
    }
    const auto file = std::filesystem::temp_directory_path() / "agiledata_survey_roundtrip.csv";
    write_survey(responses, file);
    const auto again = load_survey(file);
    REQUIRE(again.size() == responses.size());

    long valid_before = 0, valid_after = 0;
    for (const auto& r : responses) valid_before += r.rating.has_value();
    for (const auto& r : again) valid_after += r.rating.has_value();
    CHECK(valid_before == valid_after);
}

TEST_CASE("descriptive stats on a constant sample") {
    const std::vector<double> ones = {1, 1, 1};
    const DescriptiveStats s = descriptive_stats(ones, 2);
    CHECK(s.valid == 3);
    CHECK(s.missing == 2);
    CHECK(*s.mean == 1.0);
    CHECK(*s.median == 1.0);
    CHECK(*s.stdev == 0.0);
    CHECK_FALSE(s.skewness.has_value());  // zero spread, skewness undefined
    CHECK(s.stderr_skewness.has_value());
}

TEST_CASE("descriptive stats on the symmetric 1..5 sample") {
    const std::vector<double> values = {1, 2, 3, 4, 5};
    const DescriptiveStats s = descriptive_stats(values, 0);
    CHECK(*s.mean == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(*s.median == 3.0);
    CHECK(*s.stdev == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK(*s.variance == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(*s.skewness == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("median averages the middle pair for even n") {
    const std::vector<double> values = {1, 2, 4, 5};
    CHECK(*descriptive_stats(values, 0).median == 3.0);
}

TEST_CASE("standard error of skewness matches the closed form at n = 158") {
    std::vector<double> values(158, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(1 + i % 5);
    const DescriptiveStats s = descriptive_stats(values, 10);
    REQUIRE(s.stderr_skewness.has_value());
    CHECK(std::fabs(*s.stderr_skewness - 0.193) < 0.001);
}

TEST_CASE("descriptive stats are permutation invariant") {
    std::mt19937_64 rng(19);
    std::vector<double> values;
    for (int i = 0; i < 40; ++i) values.push_back(static_cast<double>(1 + rng() % 5));
    const DescriptiveStats a = descriptive_stats(values, 3);
    std::shuffle(values.begin(), values.end(), rng);
    const DescriptiveStats b = descriptive_stats(values, 3);
    CHECK(*a.mean == doctest::Approx(*b.mean).epsilon(1e-12));
    CHECK(*a.median == *b.median);
    CHECK(*a.stdev == doctest::Approx(*b.stdev).epsilon(1e-12));
    CHECK(*a.skewness == doctest::Approx(*b.skewness).epsilon(1e-12));
}

TEST_CASE("empty sample reports counts only") {
    const DescriptiveStats s = descriptive_stats(std::vector<double>{}, 7);
    CHECK(s.valid == 0);
    CHECK(s.missing == 7);
    CHECK_FALSE(s.mean.has_value());
    CHECK_FALSE(s.median.has_value());
    CHECK_FALSE(s.stdev.has_value());
    CHECK_FALSE(s.skewness.has_value());
}

}  // TEST_SUITE
