#include "agile/synth/synth.hpp"

#include <algorithm>
#include <cmath>

#include "agile/errors.hpp"
#include "agile/store/archive.hpp"

namespace agile::synth {

namespace {

using store::Commit;
using store::Developer;
using store::FileChange;
using store::IssueRecord;
using store::PRCommentRecord;
using store::Role;
using store::SprintWindow;

// xoshiro-style generator with platform-independent output; the standard
// distributions are implementation-defined, so uniforms and normals are
// derived by hand.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ULL) {
        next();
        next();
    }

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() {  // in (0, 1)
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {  // Box-Muller
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238 * u2);
    }

    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
    }

    std::string hex_sha() {
        static const char* digits = "0123456789abcdef";
        std::string sha(40, '0');
        for (int block = 0; block < 3; ++block) {
            std::uint64_t v = next();
            for (int i = 0; i < 16 && block * 16 + i < 40; ++i) {
                sha[block * 16 + i] = digits[v & 0xf];
                v >>= 4;
            }
        }
        return sha;
    }
};

int threshold_rating(double latent) {
    if (latent <= -1.5) return 1;
    if (latent <= -0.5) return 2;
    if (latent <= 0.5) return 3;
    if (latent <= 1.5) return 4;
    return 5;
}

// Monotone maps from a standard-normal practice latent u to each measure's
// scale; medians and skews roughly follow the shapes seen in student
// repository data (heavy right tails for ratios and counts, high
// last-minute fractions).
double rta_target(double u) { return std::exp(std::log(0.5) + 1.0 * u); }
double lmc_target(double u) { return 1.0 / (1.0 + std::exp(-(1.5 + 1.2 * u))); }
long ufe_target(double u) { return std::max(1L, std::lround(std::exp(std::log(9.0) + 0.8 * u))); }
double alc_target(double u) { return std::exp(std::log(27.0) + 0.9 * u); }
long uus_target(double u) { return std::max(0L, std::lround(std::exp(0.3 + 0.7 * u) - 0.6)); }
long prc_target(double u) { return std::max(0L, std::lround(std::exp(0.2 + 1.3 * u) - 0.7)); }

constexpr UtcSeconds kSprintLength = 14 * kSecondsPerDay;
constexpr UtcSeconds kBaseStart = 1704672000;  // 2024-01-08T00:00:00Z

}  // namespace

SynthDataset generate(const EffectConfig& config) {
    if (config.teams < 1) throw DataError("synth: teams must be >= 1");
    if (config.devs_per_team < 1) throw DataError("synth: devs_per_team must be >= 1");
    if (config.sprints < 1 || config.sprints > 4) throw DataError("synth: sprints must be in 1..4");
    if (config.missing_rate < 0 || config.missing_rate >= 1)
        throw DataError("synth: missing_rate must be in [0, 1)");
    if (config.inactive_rate < 0 || config.inactive_rate >= 1)
        throw DataError("synth: inactive_rate must be in [0, 1)");
    for (const auto& [pair, rho] : config.coupling)
        if (rho < -1.0 || rho > 1.0) throw DataError("synth: coupling strength must be in [-1, 1]");

    Rng rng(config.seed);
    SynthDataset out;
    auto& ds = out.dataset;

    // coupling lookup: measure -> (question, rho); at most one question
    // drives a given measure
    std::map<MeasureId, std::pair<QuestionId, double>> coupled;
    for (const auto& [pair, rho] : config.coupling)
        if (rho != 0.0) coupled[pair.second] = {pair.first, rho};

    // teams, developers, windows
    std::vector<std::vector<std::string>> team_devs(config.teams);
    for (int t = 0; t < config.teams; ++t) {
        const std::string team_id = std::to_string(t + 1);
        for (int d = 0; d < config.devs_per_team; ++d) {
            Developer dev;
            dev.id = "d" + team_id + "_" + std::to_string(d + 1);
            dev.team_id = team_id;
            dev.role = d == 0 ? Role::ProductOwner : (d == 1 ? Role::ScrumMaster : Role::Developer);
            team_devs[t].push_back(dev.id);
            ds.developers.push_back(std::move(dev));
        }
        for (int s = 1; s <= config.sprints; ++s) {
            SprintWindow w;
            w.team_id = team_id;
            w.sprint_id = s;
            w.start = kBaseStart + static_cast<UtcSeconds>(s - 1) * kSprintLength;
            w.review_meeting = w.start + 13 * kSecondsPerDay + 12 * kSecondsPerHour;
            ds.sprint_windows.push_back(w);
        }
    }

    // issue pool per team: 6 stories per sprint
    int next_issue = 1;
    std::vector<std::vector<int>> team_issues(config.teams);
    for (int t = 0; t < config.teams; ++t) {
        for (int s = 1; s <= config.sprints; ++s) {
            for (int i = 0; i < 6; ++i) {
                IssueRecord issue;
                issue.number = next_issue++;
                issue.title = "Story " + std::to_string(issue.number);
                issue.body = "As a user I want feature " + std::to_string(issue.number);
                issue.labels = {"Team " + std::to_string(t + 1)};
                issue.assignees = {team_devs[t][static_cast<std::size_t>(
                    rng.uniform_int(0, config.devs_per_team - 1))]};
                const UtcSeconds created =
                    kBaseStart + static_cast<UtcSeconds>(s - 1) * kSprintLength + i * kSecondsPerHour;
                issue.status_history.push_back({store::IssueStatus::Open, created});
                if (rng.uniform() < 0.7)
                    issue.status_history.push_back(
                        {store::IssueStatus::Closed, created + 12 * kSecondsPerDay});
                team_issues[t].push_back(issue.number);
                ds.issues.push_back(std::move(issue));
            }
        }
    }

    for (int t = 0; t < config.teams; ++t) {
        const std::string team_id = std::to_string(t + 1);
        for (int d = 0; d < config.devs_per_team; ++d) {
            const std::string& dev_id = team_devs[t][d];
            const Role role = d == 0 ? Role::ProductOwner : (d == 1 ? Role::ScrumMaster : Role::Developer);

            for (int s = 1; s <= config.sprints; ++s) {
                const SprintWindow* window = nullptr;
                for (const auto& w : ds.sprint_windows)
                    if (w.team_id == team_id && w.sprint_id == s) window = &w;

                // question latents
                std::array<double, 9> latents{};
                for (auto& l : latents) l = rng.normal();

                // measurement latents, possibly tied to a question latent
                std::array<double, 6> practice{};
                for (std::size_t m = 0; m < practice.size(); ++m) {
                    const double fresh = rng.normal();
                    const auto it = coupled.find(static_cast<MeasureId>(m));
                    if (it != coupled.end()) {
                        const auto& [q, rho] = it->second;
                        const double zq = latents[static_cast<std::size_t>(q)];
                        // measurement rises as the rating latent falls
                        practice[m] = -(rho * zq + std::sqrt(1.0 - rho * rho) * fresh);
                    } else {
                        practice[m] = -fresh;
                    }
                }

                // survey row
                for (QuestionId q : survey::kAllQuestions) {
                    const auto qi = static_cast<std::size_t>(q);
                    survey::LikertResponse r;
                    r.developer_id = dev_id;
                    r.team_id = team_id;
                    r.role = role;
                    r.sprint_id = s;
                    r.question = q;
                    double latent = latents[qi];
                    if (const auto it = config.role_shift.find(q); it != config.role_shift.end())
                        latent += it->second[static_cast<std::size_t>(role)];
                    if (const auto it = config.sprint_shift.find(q); it != config.sprint_shift.end()) {
                        const auto sit = it->second.find(s);
                        if (sit != it->second.end()) latent += sit->second;
                    }
                    if (rng.uniform() >= config.missing_rate) r.rating = threshold_rating(latent);
                    out.responses.push_back(std::move(r));
                }

                // development artifacts
                const bool active = rng.uniform() >= config.inactive_rate;
                const long prc_count =
                    prc_target(practice[static_cast<std::size_t>(MeasureId::PRC)]);
                for (long i = 0; i < prc_count; ++i) {
                    PRCommentRecord c;
                    c.pr_number = team_issues[t][static_cast<std::size_t>(
                        rng.uniform_int(0, static_cast<int>(team_issues[t].size()) - 1))];
                    c.author_id = dev_id;
                    c.timestamp = window->start +
                                  static_cast<UtcSeconds>(rng.uniform() *
                                                          static_cast<double>(window->review_meeting -
                                                                              window->start));
                    c.body = "Looks fine, small nit.";
                    ds.pr_comments.push_back(std::move(c));
                }
                if (rng.uniform() < 0.2) {  // noise outside the window
                    PRCommentRecord c;
                    c.pr_number = team_issues[t][0];
                    c.author_id = dev_id;
                    c.timestamp = window->review_meeting + kSecondsPerHour;
                    c.body = "Late follow-up.";
                    ds.pr_comments.push_back(std::move(c));
                }
                if (!active) continue;

                const double rta_t = rta_target(practice[static_cast<std::size_t>(MeasureId::RTA)]);
                const double lmc_t = lmc_target(practice[static_cast<std::size_t>(MeasureId::LMC)]);
                const long ufe_t = ufe_target(practice[static_cast<std::size_t>(MeasureId::UFE)]);
                const double alc_t = alc_target(practice[static_cast<std::size_t>(MeasureId::ALC)]);
                const long uus_t = uus_target(practice[static_cast<std::size_t>(MeasureId::UUS)]);

                const int commit_count = 2 + rng.uniform_int(0, 3);
                const double total_lines = std::max(static_cast<double>(commit_count), alc_t * commit_count);
                double app_lines = total_lines / (1.0 + rta_t);
                double test_lines = total_lines - app_lines;

                // distinct paths, split between app and spec files
                long app_files = std::max(1L, std::lround(static_cast<double>(ufe_t) /
                                                          (1.0 + rta_t)));
                long test_files = std::max(test_lines >= 1.0 ? 1L : 0L, ufe_t - app_files);

                // issue references, spread over the first commits
                std::vector<int> refs;
                for (long i = 0; i < uus_t; ++i)
                    refs.push_back(team_issues[t][static_cast<std::size_t>(
                        rng.uniform_int(0, static_cast<int>(team_issues[t].size()) - 1))]);
                std::sort(refs.begin(), refs.end());
                refs.erase(std::unique(refs.begin(), refs.end()), refs.end());

                const long last_minute = std::lround(lmc_t * commit_count);
                const UtcSeconds lm_start = window->review_meeting - 12 * kSecondsPerHour;

                for (int c = 0; c < commit_count; ++c) {
                    Commit commit;
                    commit.sha = rng.hex_sha();
                    commit.author_id = dev_id;
                    const bool is_last_minute = c >= commit_count - last_minute;
                    if (is_last_minute) {
                        commit.timestamp =
                            lm_start + static_cast<UtcSeconds>(rng.uniform() * (12.0 * 3600.0 - 60.0));
                    } else {
                        commit.timestamp =
                            window->start + static_cast<UtcSeconds>(
                                                rng.uniform() *
                                                static_cast<double>(lm_start - window->start - 3600));
                    }
                    commit.message = "Update module " + std::to_string(c + 1);
                    if (c < static_cast<int>(refs.size()))
                        commit.message += "; refs #" + std::to_string(refs[static_cast<std::size_t>(c)]);
                    else if (!refs.empty() && c == commit_count - 1)
                        for (std::size_t extra = static_cast<std::size_t>(commit_count);
                             extra < refs.size(); ++extra)
                            commit.message += " #" + std::to_string(refs[extra]);

                    const long app_here =
                        std::max(1L, std::lround(app_lines / commit_count));
                    const long test_here = std::lround(test_lines / commit_count);
                    const long fa = std::max(1L, app_files / commit_count);
                    for (long f = 0; f < fa; ++f) {
                        FileChange fc;
                        fc.path = "app/models/m" + std::to_string(t + 1) + "_" + std::to_string(d + 1) +
                                  "_" + std::to_string(c * fa + f) + ".rb";
                        const long lines = std::max(1L, app_here / fa);
                        fc.lines_added = (lines + 1) / 2;
                        fc.lines_deleted = lines - fc.lines_added;
                        fc.classification = store::classify_path(fc.path);
                        commit.changes.push_back(std::move(fc));
                    }
                    if (test_here > 0) {
                        const long ft = std::max(1L, test_files / commit_count);
                        for (long f = 0; f < ft; ++f) {
                            FileChange fc;
                            fc.path = "spec/models/m" + std::to_string(t + 1) + "_" +
                                      std::to_string(d + 1) + "_" + std::to_string(c * ft + f) +
                                      "_spec.rb";
                            fc.lines_added = std::max(1L, test_here / ft);
                            fc.lines_deleted = 0;
                            fc.classification = store::classify_path(fc.path);
                            commit.changes.push_back(std::move(fc));
                        }
                    }
                    ds.commits.push_back(std::move(commit));
                }
            }
        }
    }

    store::sort_dataset(ds);
    store::validate_dataset(ds);
    return out;
}

void write_synth(const SynthDataset& data, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    store::write_archive(data.dataset, out_dir);
    survey::write_survey(data.responses, out_dir / "survey.csv");
}

}  // namespace agile::synth
