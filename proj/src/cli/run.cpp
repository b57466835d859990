#include "agile/cli/run.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "agile/analysis/analysis.hpp"
#include "agile/analysis/report.hpp"
#include "agile/csv.hpp"
#include "agile/errors.hpp"
#include "agile/measures/measures.hpp"
#include "agile/store/archive.hpp"
#include "agile/store/forge.hpp"
#include "agile/synth/synth.hpp"

namespace agile::cli {

namespace {

void require_exists(const std::string& path, const char* what) {
    if (!std::filesystem::exists(path))
        throw UsageError(std::string(what) + " not found: " + path);
}

analysis::PairingPlan load_plan(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open plan file " + file);
    analysis::PairingPlan plan;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = csv::split_row(line);
        if (fields.size() != 2) throw DataError("plan file: expected 'question,measure' per line");
        if (fields[0] == "question") continue;  // header
        plan.emplace_back(survey::parse_question(fields[0]), measures::parse_measure(fields[1]));
    }
    if (plan.empty()) throw DataError("plan file: no pairs");
    return plan;
}

void apply_effects_file(synth::EffectConfig& config, const std::string& file) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open effects file " + file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("effects file: ") + e.what());
    }
    if (j.contains("missing_rate")) config.missing_rate = j["missing_rate"].get<double>();
    if (j.contains("inactive_rate")) config.inactive_rate = j["inactive_rate"].get<double>();
    if (j.contains("role_shift")) {
        for (const auto& [q, shifts] : j["role_shift"].items()) {
            std::array<double, 3> offsets{};
            for (const auto& [role, value] : shifts.items())
                offsets[static_cast<std::size_t>(store::parse_role(role))] = value.get<double>();
            config.role_shift[survey::parse_question(q)] = offsets;
        }
    }
    if (j.contains("sprint_shift")) {
        for (const auto& [q, shifts] : j["sprint_shift"].items()) {
            std::map<int, double> by_sprint;
            for (const auto& [sprint, value] : shifts.items())
                by_sprint[std::atoi(sprint.c_str())] = value.get<double>();
            config.sprint_shift[survey::parse_question(q)] = by_sprint;
        }
    }
    if (j.contains("coupling")) {
        for (const auto& c : j["coupling"]) {
            config.coupling[{survey::parse_question(c.at("question").get<std::string>()),
                             measures::parse_measure(c.at("measure").get<std::string>())}] =
                c.at("rho").get<double>();
        }
    }
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"agiledata — mine development artifacts, compute agile-practice "
                 "measurements and run the survey analysis pipeline"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Fetch commits, issues and PR comments from a forge "
                                                "into archive files");
    std::string repo, out_path, base_url = "https://api.github.com", since;
    int page_size = 100;
    ingest->add_option("--repo", repo, "Repository as owner/name")->required();
    ingest->add_option("--out", out_path, "Output archive directory")->required();
    ingest->add_option("--base-url", base_url, "Forge API base URL");
    ingest->add_option("--since", since, "Only commits at or after this ISO-8601 timestamp");
    ingest->add_option("--page-size", page_size, "Page size for list requests");

    // measure
    auto* measure = app.add_subcommand("measure", "Compute per-developer per-sprint measurements "
                                                  "from an archive");
    std::string archives, windows, measure_out;
    bool exclude_merges = false;
    measure->add_option("--archives", archives, "Archive directory")->required();
    measure->add_option("--windows", windows, "Sprint window file (overrides the archive's)");
    measure->add_option("--out", measure_out, "Output measurements CSV")->required();
    measure->add_flag("--exclude-merges", exclude_merges, "Skip commits with more than one parent");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Run the statistical analyses and write the "
                                                  "report directory");
    std::string measurements_path, survey_path, analyze_out, pooling = "pooled", plan_path,
                agreement_units = "question-sprint";
    bool exclude_pos = false;
    analyze->add_option("--measurements", measurements_path, "Measurements CSV")->required();
    analyze->add_option("--survey", survey_path, "Survey CSV")->required();
    analyze->add_option("--out", analyze_out, "Report output directory")->required();
    analyze->add_flag("--exclude-pos", exclude_pos,
                      "Exclude Product Owners from the headline agreement table");
    analyze->add_option("--pooling", pooling, "Perception-change grouping: pooled or per-team")
        ->check(CLI::IsMember({"pooled", "per-team"}));
    analyze->add_option("--plan", plan_path, "Pairing plan file (question,measure per line)");
    analyze->add_option("--agreement-units", agreement_units, "Agreement units: question-sprint or question")
        ->check(CLI::IsMember({"question-sprint", "question"}));

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic archive and survey");
    synth::EffectConfig config;
    std::string synth_out, effects_path;
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--seed", config.seed, "Generator seed");
    synth_cmd->add_option("--teams", config.teams, "Number of teams");
    synth_cmd->add_option("--devs-per-team", config.devs_per_team, "Developers per team");
    synth_cmd->add_option("--sprints", config.sprints, "Number of sprints (1..4)");
    synth_cmd->add_option("--effects", effects_path, "JSON file with shifts and couplings");

    // report
    auto* report = app.add_subcommand("report", "Re-render the document from a report directory");
    std::string report_dir, report_out;
    report->add_option("--report", report_dir, "Report directory written by analyze")->required();
    report->add_option("--out", report_out, "Write the document here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*ingest) {
        store::ForgeOptions options;
        options.repo = repo;
        options.base_url = base_url;
        options.page_size = page_size;
        if (const char* token = std::getenv("FORGE_TOKEN")) options.token = token;
        if (!since.empty()) options.since = parse_iso8601(since);
        fetch_forge(options, out_path);
        std::cout << "wrote forge archive to " << out_path << "\n";
        return 0;
    }

    if (*measure) {
        require_exists(archives, "archive directory");
        std::optional<std::filesystem::path> windows_file;
        if (!windows.empty()) {
            require_exists(windows, "sprint window file");
            windows_file = windows;
        }
        const store::ProjectDataset dataset = store::load_archive(archives, windows_file);
        measures::ComputeOptions options;
        options.exclude_merges = exclude_merges;
        const auto records = measures::compute_all(dataset, options);
        measures::write_measurements_csv(records, measure_out);
        std::cout << "wrote " << records.size() << " measurement records to " << measure_out << "\n";
        return 0;
    }

    if (*analyze) {
        require_exists(measurements_path, "measurements file");
        require_exists(survey_path, "survey file");
        analysis::AnalysisConfig cfg;
        cfg.exclude_product_owners = exclude_pos;
        cfg.pooling = pooling == "per-team" ? analysis::Pooling::PerTeam : analysis::Pooling::Pooled;
        cfg.agreement_units = agreement_units == "question" ? analysis::AgreementUnits::Question
                                                : analysis::AgreementUnits::QuestionSprint;
        if (!plan_path.empty()) {
            require_exists(plan_path, "plan file");
            cfg.plan = load_plan(plan_path);
        }
        const auto responses = survey::load_survey(survey_path);
        const auto records = measures::read_measurements_csv(measurements_path);
        const analysis::AnalysisReport result = analysis::analyze(responses, records, cfg);
        analysis::write_report_dir(result, analyze_out);
        std::cout << "wrote report to " << analyze_out << "\n";
        return 0;
    }

    if (*synth_cmd) {
        if (!effects_path.empty()) {
            require_exists(effects_path, "effects file");
            apply_effects_file(config, effects_path);
        }
        const synth::SynthDataset data = synth::generate(config);
        synth::write_synth(data, synth_out);
        std::cout << "wrote synthetic dataset (" << data.dataset.commits.size() << " commits, "
                  << data.responses.size() << " survey cells) to " << synth_out << "\n";
        return 0;
    }

    if (*report) {
        require_exists(report_dir, "report directory");
        const analysis::ReportTables tables = analysis::load_report_tables(report_dir);
        const std::string document = analysis::render_document(tables);
        if (report_out.empty()) {
            std::cout << document;
        } else {
            std::ofstream out(report_out, std::ios::binary);
            if (!out) throw DataError("cannot write " + report_out);
            out << document;
        }
        return 0;
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    try {
        return dispatch(args);
    } catch (const Error& e) {
        switch (e.category()) {
            case ErrorCategory::Usage:
                std::cerr << "usage error: " << e.what() << "\n";
                return 2;
            case ErrorCategory::Data:
                std::cerr << "data error: " << e.what() << "\n";
                return 3;
            case ErrorCategory::Transport:
                std::cerr << "transport error: " << e.what() << "\n";
                return 4;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace agile::cli
