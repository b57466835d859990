#include "agile/measures/measures.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>

#include "agile/csv.hpp"
#include "agile/errors.hpp"

namespace agile::measures {

namespace {

constexpr std::array<std::string_view, 6> kNames = {"RTA", "UFE", "LMC", "ALC", "UUS", "PRC"};

}  // namespace

std::string_view measure_name(MeasureId m) { return kNames[static_cast<std::size_t>(m)]; }

MeasureId parse_measure(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (name == kNames[i]) return static_cast<MeasureId>(i);
    throw ValidationError("unknown measure: '" + std::string(name) + "'");
}

std::optional<double> rta(const DeveloperSlice& slice) {
    if (slice.commits.empty()) return std::nullopt;
    double test_lines = 0.0, app_lines = 0.0;
    for (const auto* c : slice.commits) {
        for (const auto& fc : c->changes) {
            if (fc.classification == store::PathClass::Test) test_lines += static_cast<double>(fc.lines_changed());
            else if (fc.classification == store::PathClass::Application)
                app_lines += static_cast<double>(fc.lines_changed());
        }
    }
    if (app_lines == 0.0) return std::nullopt;
    return test_lines / app_lines;
}

long ufe(const DeveloperSlice& slice) {
    std::set<std::string_view> paths;
    for (const auto* c : slice.commits)
        for (const auto& fc : c->changes) paths.insert(fc.path);
    return static_cast<long>(paths.size());
}

std::optional<double> lmc(const DeveloperSlice& slice) {
    if (slice.commits.empty()) return std::nullopt;
    const UtcSeconds cutoff = slice.window->review_meeting - kLastMinuteWindow;
    long last_minute = 0;
    for (const auto* c : slice.commits)
        if (c->timestamp >= cutoff) ++last_minute;
    return static_cast<double>(last_minute) / static_cast<double>(slice.commits.size());
}

std::optional<double> alc(const DeveloperSlice& slice) {
    if (slice.commits.empty()) return std::nullopt;
    double total = 0.0;
    for (const auto* c : slice.commits)
        for (const auto& fc : c->changes) total += static_cast<double>(fc.lines_changed());
    return total / static_cast<double>(slice.commits.size());
}

std::set<long> parse_story_refs(std::string_view message) {
    std::set<long> refs;
    std::size_t i = 0;
    while (i < message.size()) {
        if (message[i] == '#' && i + 1 < message.size() &&
            std::isdigit(static_cast<unsigned char>(message[i + 1]))) {
            std::size_t j = i + 1;
            long value = 0;
            bool overflow = false;
            while (j < message.size() && std::isdigit(static_cast<unsigned char>(message[j]))) {
                if (value > (std::numeric_limits<long>::max() - 9) / 10) overflow = true;
                if (!overflow) value = value * 10 + (message[j] - '0');
                ++j;
            }
            if (!overflow) refs.insert(value);
            i = j;
        } else {
            ++i;
        }
    }
    return refs;
}

long uus(const DeveloperSlice& slice) {
    std::set<long> refs;
    for (const auto* c : slice.commits) {
        const std::set<long> found = parse_story_refs(c->message);
        refs.insert(found.begin(), found.end());
    }
    return static_cast<long>(refs.size());
}

long prc(const DeveloperSlice& slice) { return static_cast<long>(slice.comments.size()); }

std::vector<MeasurementRecord> compute_all(const store::ProjectDataset& dataset,
                                           const ComputeOptions& options) {
    std::vector<MeasurementRecord> records;
    for (const auto& team : dataset.teams) {
        const auto members = dataset.team_members(team);
        if (members.empty()) continue;
        for (const auto* window : dataset.team_windows(team)) {
            const store::SprintSlice team_slice = slice_sprint(dataset, team, window->sprint_id);
            for (const auto* dev : members) {
                DeveloperSlice slice;
                slice.window = window;
                for (const auto* c : team_slice.commits) {
                    if (c->author_id != dev->id) continue;
                    if (options.exclude_merges && c->is_merge()) continue;
                    slice.commits.push_back(c);
                }
                for (const auto* c : team_slice.comments)
                    if (c->author_id == dev->id) slice.comments.push_back(c);

                auto add = [&](MeasureId m, std::optional<double> value) {
                    MeasurementRecord r;
                    r.developer_id = dev->id;
                    r.team_id = team;
                    r.sprint_id = window->sprint_id;
                    r.measure = m;
                    r.missing = !value.has_value();
                    r.value = value.value_or(0.0);
                    records.push_back(std::move(r));
                };
                add(MeasureId::RTA, rta(slice));
                add(MeasureId::UFE, static_cast<double>(ufe(slice)));
                add(MeasureId::LMC, lmc(slice));
                add(MeasureId::ALC, alc(slice));
                add(MeasureId::UUS, static_cast<double>(uus(slice)));
                add(MeasureId::PRC, static_cast<double>(prc(slice)));
            }
        }
    }
    std::sort(records.begin(), records.end(), [](const MeasurementRecord& a, const MeasurementRecord& b) {
        return std::tie(a.team_id, a.developer_id, a.sprint_id, a.measure) <
               std::tie(b.team_id, b.developer_id, b.sprint_id, b.measure);
    });
    return records;
}

void write_measurements_csv(std::span<const MeasurementRecord> records,
                            const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write measurements file " + file.string());
    out << "team,developer,sprint,measure,value,missing\n";
    for (const auto& r : records) {
        std::vector<std::string> fields = {r.team_id,
                                           r.developer_id,
                                           std::to_string(r.sprint_id),
                                           std::string(measure_name(r.measure)),
                                           r.missing ? "" : csv::format_double(r.value),
                                           r.missing ? "true" : "false"};
        out << csv::join_row(fields) << '\n';
    }
}

std::vector<MeasurementRecord> read_measurements_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open measurements file " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(file.filename().string() + ": empty measurements file");
    std::vector<MeasurementRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = file.filename().string() + ":" + std::to_string(lineno);
        const auto fields = csv::split_row(line);
        if (fields.size() != 6) throw ParseError(where + ": expected 6 fields");
        MeasurementRecord r;
        r.team_id = fields[0];
        r.developer_id = fields[1];
        const auto sprint = csv::parse_int(fields[2]);
        if (!sprint) throw ParseError(where + ": bad sprint number");
        r.sprint_id = static_cast<int>(*sprint);
        r.measure = parse_measure(fields[3]);
        if (fields[5] == "true") {
            r.missing = true;
        } else if (fields[5] == "false") {
            const auto value = csv::parse_double(fields[4]);
            if (!value) throw ParseError(where + ": bad value");
            r.value = *value;
        } else {
            throw ParseError(where + ": missing flag must be true or false");
        }
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace agile::measures
