#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bpvec/game.hpp"
#include "bpvec/scenario.hpp"

namespace bpvec {

enum class SweepVar { rate_pa, rate_rsu, n_rv, n_pv, n_rsu, n_consensus, price_pa, price_rsu };

std::string sweep_var_name(SweepVar v);
SweepVar sweep_var_from_name(const std::string& name);

struct ExperimentSpec {
    std::string name;
    SweepVar sweep = SweepVar::n_rv;
    std::vector<double> values;
    std::vector<std::string> schemes;
    int repetitions = 1;
    uint64_t seed = 0;
    // optional entity-count overrides applied before the sweep (0 = keep)
    int rv_count = 0;
    int pv_count = 0;
    int rsu_count = 0;
};

ExperimentSpec load_experiment_spec(const std::string& path);
ExperimentSpec parse_experiment_spec(std::istream& in);
void validate_experiment_spec(const ExperimentSpec& spec);
const std::vector<std::string>& known_schemes();

struct ExperimentRow {
    std::string experiment;
    std::string scheme;
    std::string sweep_variable;
    double sweep_value = 0.0;
    int repetition = 0;
    std::string metric;
    double value = 0.0;
    std::string status;  // ok / infeasible / partial
};

struct ExperimentTable {
    std::vector<ExperimentRow> rows;

    void to_csv(std::ostream& out) const;
    std::string csv() const;
    // mean of one metric per sweep value, for a scheme, ordered by value
    std::vector<double> metric_by_value(const std::string& scheme, const std::string& metric) const;
};

// Per-scheme utilities at fixed offload splits (the comparison baselines).
struct SchemeUtilities {
    double u_rv = 0.0;
    double u_pv = 0.0;
    double u_rsu = 0.0;
    double epsilon = 0.0;
    bool feasible = true;
};

SchemeUtilities baseline_scheme_utilities(const std::string& scheme, const OffloadInstance& inst,
                                          double p_pa, double p_rsu);

// Scenario with count overrides and the sweep's entity regeneration applied
// for one (value, repetition) cell. Scheme-independent by construction so
// all schemes compare on identical worlds.
ScenarioConfig materialize_world(const ExperimentSpec& spec, const ScenarioConfig& base,
                                 size_t value_i, int rep);

ExperimentTable run_experiment(const ExperimentSpec& spec, const ScenarioConfig& cfg,
                               int workers = 1);

std::string manifest_json(const ExperimentSpec& spec, const ScenarioConfig& cfg,
                          const ExperimentTable& table, const std::string& csv_name);
std::string diagnostics_json(const ExperimentSpec& spec, const ExperimentTable& table);

}  // namespace bpvec
