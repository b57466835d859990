#pragma once

#include <cstdint>
#include <filesystem>
#include <map>

#include "agile/measures/measures.hpp"
#include "agile/store/types.hpp"
#include "agile/survey/survey.hpp"

namespace agile::synth {

using measures::MeasureId;
using survey::QuestionId;

// Controls for the synthetic data generator. Ratings come from a latent
// standard normal per (developer, sprint, question), thresholded onto the
// 1..5 scale; shifts move the latent, couplings correlate a question's
// latent with the latent that drives a measurement. A positive coupling
// makes agreement (low ratings) coincide with high measurement values, so
// the recovered Kendall tau against raw values is negative.
struct EffectConfig {
    std::uint64_t seed = 1;
    int teams = 6;
    int devs_per_team = 7;
    int sprints = 4;  // 1..4
    double missing_rate = 0.08;   // chance a rating cell is blank
    double inactive_rate = 0.10;  // chance a (developer, sprint) has no commits

    // latent offsets per role, indexed by store::Role order (PO, SM, Dev)
    std::map<QuestionId, std::array<double, 3>> role_shift;
    // latent offsets per sprint id
    std::map<QuestionId, std::map<int, double>> sprint_shift;
    // correlation strength in [-1, 1] per (question, measure)
    std::map<std::pair<QuestionId, MeasureId>, double> coupling;
};

struct SynthDataset {
    store::ProjectDataset dataset;
    std::vector<survey::LikertResponse> responses;
};

// Deterministic for a fixed config (bit-identical output). Throws DataError
// on infeasible configs.
SynthDataset generate(const EffectConfig& config);

// Writes the archive files plus survey.csv into out_dir.
void write_synth(const SynthDataset& data, const std::filesystem::path& out_dir);

}  // namespace agile::synth
