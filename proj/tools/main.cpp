#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bpvec/consensus.hpp"
#include "bpvec/experiment.hpp"
#include "bpvec/rng.hpp"
#include "bpvec/scenario.hpp"
#include "bpvec/selection.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int cmd_run(const std::string& spec_path, const std::string& scenario_path, const std::string& out_dir,
            long long seed_override, int workers, bool traces) {
    bpvec::ExperimentSpec spec = bpvec::load_experiment_spec(spec_path);
    if (seed_override >= 0) spec.seed = static_cast<uint64_t>(seed_override);
    bpvec::ScenarioConfig cfg = bpvec::load_scenario(scenario_path);

    fs::create_directories(out_dir);
    bpvec::ExperimentTable table = bpvec::run_experiment(spec, cfg, workers);

    std::string csv_name = spec.name + ".csv";
    write_file(fs::path(out_dir) / csv_name, table.csv());
    write_file(fs::path(out_dir) / "manifest.json", bpvec::manifest_json(spec, cfg, table, csv_name));
    write_file(fs::path(out_dir) / (spec.name + "_diagnostics.json"),
               bpvec::diagnostics_json(spec, table));
    write_file(fs::path(out_dir) / "scenario_echo.json", bpvec::scenario_json(cfg));

    if (traces) {
        fs::path trace_dir = fs::path(out_dir) / "traces";
        fs::create_directories(trace_dir);
        std::ofstream ledger_csv(trace_dir / "ledgers.csv");
        ledger_csv << bpvec::ledger_csv_header() << "\n";
        for (size_t vi = 0; vi < spec.values.size(); ++vi) {
            for (int rep = 0; rep < spec.repetitions; ++rep) {
                bpvec::ScenarioConfig world = bpvec::materialize_world(spec, cfg, vi, rep);
                auto eligible = bpvec::filter_by_stay(world.pvs, world.parking, world.selection);
                if (eligible.empty()) continue;
                bpvec::PvGraph graph = bpvec::build_graph(eligible, world.channel, world.selection);
                bpvec::ConsensusSet set = bpvec::select_cds(graph);
                bpvec::ConsensusInstance inst = bpvec::pv_committee(world, graph, set);
                bpvec::FaultPlan plan;  // fault-free
                uint64_t run_seed = bpvec::mix_seed(spec.seed, vi * 10007ULL + uint64_t(rep));
                bpvec::ConsensusRun run = bpvec::run_consensus(inst, plan, {}, world.channel,
                                                               world.costs, 1, run_seed);
                std::string label = spec.name + "_v" + std::to_string(vi) + "_r" + std::to_string(rep);
                std::ofstream trace(trace_dir / (label + ".jsonl"));
                bpvec::write_trace_jsonl(run, trace);
                ledger_csv << bpvec::ledger_csv_row(label, run) << "\n";
            }
        }
    }
    std::cout << "wrote " << table.rows.size() << " rows to " << (fs::path(out_dir) / csv_name).string()
              << "\n";
    return 0;
}

int cmd_list(const std::string& dir) {
    std::vector<std::string> names;
    if (fs::exists(dir))
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".exp") names.push_back(entry.path().string());
    std::sort(names.begin(), names.end());
    for (const auto& path : names) {
        try {
            bpvec::ExperimentSpec spec = bpvec::load_experiment_spec(path);
            std::cout << spec.name << "  sweep=" << bpvec::sweep_var_name(spec.sweep) << "  values="
                      << spec.values.size() << "  schemes=" << spec.schemes.size() << "  (" << path
                      << ")\n";
        } catch (const std::exception& e) {
            std::cout << path << "  INVALID: " << e.what() << "\n";
        }
    }
    if (names.empty()) std::cout << "no .exp files under " << dir << "\n";
    return 0;
}

int cmd_validate(const std::string& spec_path, const std::string& scenario_path) {
    bpvec::ExperimentSpec spec = bpvec::load_experiment_spec(spec_path);
    std::cout << "spec ok: " << spec.name << "\n";
    if (!scenario_path.empty()) {
        bpvec::ScenarioConfig cfg = bpvec::load_scenario(scenario_path);
        std::cout << "scenario ok: " << cfg.pvs.size() << " pvs, " << cfg.rsus.size() << " rsus, "
                  << cfg.rvs.size() << " rvs\n";
        std::cout << bpvec::scenario_json(cfg) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parked-vehicle edge computing experiment runner"};
    app.require_subcommand(1);

    std::string spec_path, scenario_path, out_dir = "out", list_dir = "experiments";
    long long seed = -1;
    int workers = 1;
    bool traces = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment spec against a scenario");
    run->add_option("spec", spec_path, "experiment spec file")->required();
    run->add_option("--scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the spec seed");
    run->add_option("--workers", workers, "worker threads");
    run->add_flag("--traces", traces, "write consensus traces per sweep cell");

    CLI::App* list = app.add_subcommand("list-experiments", "list experiment specs in a directory");
    list->add_option("--dir", list_dir, "directory with .exp files");

    CLI::App* validate = app.add_subcommand("validate", "validate a spec (and optionally a scenario)");
    validate->add_option("spec", spec_path, "experiment spec file")->required();
    validate->add_option("--scenario", scenario_path, "scenario file");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(spec_path, scenario_path, out_dir, seed, workers, traces);
        if (list->parsed()) return cmd_list(list_dir);
        if (validate->parsed()) return cmd_validate(spec_path, scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
