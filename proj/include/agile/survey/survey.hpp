#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "agile/store/types.hpp"

namespace agile::survey {

enum class QuestionId { Q1, Q2, Q3, Q4, Q5, Q6, Q7, Q8, Q9 };

inline constexpr std::array<QuestionId, 9> kAllQuestions = {
    QuestionId::Q1, QuestionId::Q2, QuestionId::Q3, QuestionId::Q4, QuestionId::Q5,
    QuestionId::Q6, QuestionId::Q7, QuestionId::Q8, QuestionId::Q9};

std::string_view question_label(QuestionId q);  // "Q1".."Q9"
std::string_view claim_text(QuestionId q);      // the surveyed claim wording
QuestionId parse_question(std::string_view label);

// 1 = strongly agree .. 5 = strongly disagree.
int encode_likert(std::string_view label);

struct LikertResponse {
    std::string developer_id;
    std::string team_id;
    store::Role role = store::Role::Developer;
    int sprint_id = 0;  // 1..4
    QuestionId question = QuestionId::Q1;
    std::optional<int> rating;  // 1..5 when present
};

// Tabular survey file: header team,developer,role,sprint,q1..q9; one row
// per (developer, sprint); blank cells are missing ratings.
std::vector<LikertResponse> load_survey(const std::filesystem::path& file);
void write_survey(std::span<const LikertResponse> responses, const std::filesystem::path& file);

struct DescriptiveStats {
    long valid = 0;
    long missing = 0;
    std::optional<double> mean;
    std::optional<double> median;
    std::optional<double> stdev;      // sample (n-1)
    std::optional<double> variance;   // stdev^2
    std::optional<double> skewness;   // adjusted Fisher-Pearson G1; needs n >= 3 and spread
    std::optional<double> stderr_skewness;  // sqrt(6n(n-1)/((n-2)(n+1)(n+3))); needs n >= 3
};

// Order-independent descriptives over the valid values of one variable.
DescriptiveStats descriptive_stats(std::span<const double> valid_values, long missing_count);

}  // namespace agile::survey
