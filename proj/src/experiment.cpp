#include "bpvec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bpvec/rng.hpp"
#include "bpvec/selection.hpp"
#include "json.hpp"

namespace bpvec {

namespace {

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("experiment: " + msg); }

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

uint64_t name_hash(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::string sweep_var_name(SweepVar v) {
    switch (v) {
        case SweepVar::rate_pa: return "rate_pa";
        case SweepVar::rate_rsu: return "rate_rsu";
        case SweepVar::n_rv: return "n_rv";
        case SweepVar::n_pv: return "n_pv";
        case SweepVar::n_rsu: return "n_rsu";
        case SweepVar::n_consensus: return "n_consensus";
        case SweepVar::price_pa: return "price_pa";
        case SweepVar::price_rsu: return "price_rsu";
    }
    return "?";
}

SweepVar sweep_var_from_name(const std::string& name) {
    for (SweepVar v : {SweepVar::rate_pa, SweepVar::rate_rsu, SweepVar::n_rv, SweepVar::n_pv,
                       SweepVar::n_rsu, SweepVar::n_consensus, SweepVar::price_pa, SweepVar::price_rsu})
        if (sweep_var_name(v) == name) return v;
    fail("unknown sweep variable '" + name + "'");
}

const std::vector<std::string>& known_schemes() {
    static const std::vector<std::string> schemes = {
        "bpvec",  "rsu_and_local",      "rsu_only",     "pv_only", "local_only",
        "cds",    "random",             "capacity_only", "communication_only",
        "cds_hotstuff", "pbft"};
    return schemes;
}

ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream probe(line);
        std::string first;
        if (!(probe >> first)) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value at line " + std::to_string(lineno));
        std::istringstream keys(line.substr(0, eq));
        std::string key;
        keys >> key;
        std::istringstream vals(line.substr(eq + 1));
        if (key == "name") vals >> spec.name;
        else if (key == "sweep") {
            std::string v;
            vals >> v;
            spec.sweep = sweep_var_from_name(v);
        } else if (key == "values") {
            double v;
            spec.values.clear();
            while (vals >> v) spec.values.push_back(v);
        } else if (key == "schemes") {
            std::string s;
            spec.schemes.clear();
            while (vals >> s) spec.schemes.push_back(s);
        } else if (key == "repetitions") vals >> spec.repetitions;
        else if (key == "seed") vals >> spec.seed;
        else if (key == "rv_count") vals >> spec.rv_count;
        else if (key == "pv_count") vals >> spec.pv_count;
        else if (key == "rsu_count") vals >> spec.rsu_count;
        else fail("unknown key '" + key + "' at line " + std::to_string(lineno));
    }
    validate_experiment_spec(spec);
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    return parse_experiment_spec(in);
}

void validate_experiment_spec(const ExperimentSpec& spec) {
    if (spec.name.empty()) fail("name missing");
    if (spec.values.empty()) fail("values empty");
    bool inc = true, dec = true;
    for (size_t i = 1; i < spec.values.size(); ++i) {
        inc = inc && spec.values[i] > spec.values[i - 1];
        dec = dec && spec.values[i] < spec.values[i - 1];
    }
    if (spec.values.size() > 1 && !inc && !dec) fail("values must be strictly monotone");
    if (spec.schemes.empty()) fail("schemes empty");
    for (const auto& s : spec.schemes)
        if (std::find(known_schemes().begin(), known_schemes().end(), s) == known_schemes().end())
            fail("unknown scheme '" + s + "'");
    if (spec.repetitions < 1) fail("repetitions must be >= 1");
    if (spec.rv_count < 0 || spec.pv_count < 0 || spec.rsu_count < 0) fail("counts must be >= 0");
}

void ExperimentTable::to_csv(std::ostream& out) const {
    out << "experiment,scheme,sweep_variable,sweep_value,repetition,metric,value,status\n";
    for (const auto& r : rows)
        out << r.experiment << "," << r.scheme << "," << r.sweep_variable << ","
            << fmt_double(r.sweep_value) << "," << r.repetition << "," << r.metric << ","
            << fmt_double(r.value) << "," << r.status << "\n";
}

std::string ExperimentTable::csv() const {
    std::ostringstream os;
    to_csv(os);
    return os.str();
}

std::vector<double> ExperimentTable::metric_by_value(const std::string& scheme,
                                                     const std::string& metric) const {
    // means over repetitions, in first-appearance order of sweep values
    std::vector<double> values;
    std::vector<double> sums;
    std::vector<int> counts;
    for (const auto& r : rows) {
        if (r.scheme != scheme || r.metric != metric) continue;
        auto it = std::find(values.begin(), values.end(), r.sweep_value);
        size_t i;
        if (it == values.end()) {
            values.push_back(r.sweep_value);
            sums.push_back(0.0);
            counts.push_back(0);
            i = values.size() - 1;
        } else {
            i = static_cast<size_t>(it - values.begin());
        }
        sums[i] += r.value;
        counts[i] += 1;
    }
    std::vector<double> out(sums.size());
    for (size_t i = 0; i < sums.size(); ++i) out[i] = counts[i] ? sums[i] / counts[i] : 0.0;
    return out;
}

SchemeUtilities baseline_scheme_utilities(const std::string& scheme, const OffloadInstance& inst,
                                          double p_pa, double p_rsu) {
    SchemeUtilities su;
    auto [lo, hi] = feasible_epsilon_range(inst);
    if (scheme == "rsu_only") {
        su.epsilon = 1.0;
        su.u_rv = rv_utility(inst, 1.0, p_pa, p_rsu);
        su.u_pv = pv_utility(inst, 1.0, p_pa);
        su.u_rsu = rsu_utility(inst, 1.0, p_rsu);
        su.feasible = hi >= 1.0;
        return su;
    }
    if (scheme == "pv_only") {
        su.epsilon = 0.0;
        su.u_rv = rv_utility(inst, 0.0, p_pa, p_rsu);
        su.u_pv = pv_utility(inst, 0.0, p_pa);
        su.u_rsu = rsu_utility(inst, 0.0, p_rsu);
        su.feasible = lo <= 0.0;
        return su;
    }
    double t_local = inst.rv.task_bits * inst.local_cycles_per_bit / inst.local_cpu_hz;
    double local_energy_j = inst.cap_switch_v * inst.local_cpu_hz * inst.local_cpu_hz *
                            inst.rv.task_bits * inst.local_cycles_per_bit;
    if (scheme == "local_only") {
        su.epsilon = 0.0;
        su.u_rv = inst.rv.alpha * (inst.rv.max_time_s - t_local * t_local) -
                  inst.energy_price_v * local_energy_j;
        su.feasible = t_local <= inst.rv.max_time_s;
        return su;
    }
    if (scheme == "rsu_and_local") {
        // same follower machinery with the PV route replaced by on-board
        // compute: zero-latency "link", price = local energy cost per MB
        OffloadInstance hybrid = inst;
        hybrid.gamma_pa_s = t_local;
        hybrid.rate_pv_mbps = std::numeric_limits<double>::infinity();
        double p_local = inst.energy_price_v * inst.cap_switch_v * inst.local_cpu_hz *
                         inst.local_cpu_hz * inst.local_cycles_per_bit * kBitsPerMb;
        EpsilonResult er = optimal_epsilon(hybrid, p_local, p_rsu);
        if (!er.feasible) {
            er = optimal_epsilon_in(hybrid, p_local, p_rsu, 0.0, 1.0);
            su.feasible = false;
        }
        su.epsilon = er.epsilon;
        su.u_rv = rv_utility(hybrid, er.epsilon, p_local, p_rsu);
        su.u_rsu = rsu_utility(inst, er.epsilon, p_rsu);
        return su;
    }
    fail("baseline_scheme_utilities: unknown scheme '" + scheme + "'");
}

namespace {

ConsensusSet committee_of_size(const PvGraph& g, size_t n) {
    std::vector<size_t> order(g.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (g.quality[a] != g.quality[b]) return g.quality[a] > g.quality[b];
        return g.ids[a] < g.ids[b];
    });
    order.resize(std::min(n, order.size()));
    std::sort(order.begin(), order.end());
    ConsensusSet cs;
    for (size_t i : order) cs.members.push_back(g.ids[i]);
    cs.heads = cs.members;
    double best = -1.0;
    for (size_t i : order)
        if (g.quality[i] > best) {
            best = g.quality[i];
            cs.leader = g.ids[i];
        }
    return cs;
}

struct CellResult {
    std::vector<ExperimentRow> rows;
};

bool is_offload_baseline(const std::string& s) {
    return s == "rsu_and_local" || s == "rsu_only" || s == "pv_only" || s == "local_only";
}

CellResult run_cell(const ExperimentSpec& spec, const ScenarioConfig& base,
                    const std::string& scheme, size_t value_i, int rep) {
    double value = spec.values[value_i];
    uint64_t world_seed = mix_seed(spec.seed, static_cast<uint64_t>(rep));
    ScenarioConfig world = materialize_world(spec, base, value_i, rep);

    // committee selection
    std::vector<ParkedVehicle> eligible = filter_by_stay(world.pvs, world.parking, world.selection);
    CellResult out;
    auto emit = [&](const std::string& metric, double v, const std::string& status) {
        out.rows.push_back({spec.name, scheme, sweep_var_name(spec.sweep), value, rep, metric, v,
                            status});
    };
    if (eligible.empty()) {
        emit("error", 0.0, "no_eligible_pvs");
        return out;
    }
    PvGraph graph = build_graph(eligible, world.channel, world.selection);
    ConsensusSet cds_set = select_cds(graph);
    ConsensusSet set = cds_set;
    size_t rsu_committee_cap = 0;
    if (spec.sweep == SweepVar::n_consensus) {
        size_t n = std::min<size_t>(graph.size(), std::max<int64_t>(1, std::llround(value)));
        set = committee_of_size(graph, n);
        rsu_committee_cap = n;
    } else if (scheme == "random" || scheme == "capacity_only" || scheme == "communication_only") {
        SelectionStrategy strat = scheme == "random" ? SelectionStrategy::random
                                  : scheme == "capacity_only" ? SelectionStrategy::capacity_only
                                                              : SelectionStrategy::communication_only;
        set = select_baseline(graph, strat, cds_set.members.size(),
                              mix_seed(world_seed, name_hash(scheme)));
    }

    ConsensusInstance pv_inst = pv_committee(world, graph, set);
    ConsensusInstance rsu_inst = rsu_committee(world, rsu_committee_cap);
    double e_pv_1, e_rsu_1;
    if (scheme == "pbft") {
        e_pv_1 = pbft_baseline_energy(pv_inst, world.channel, world.costs, 1.0);
        e_rsu_1 = pbft_baseline_energy(rsu_inst, world.channel, world.costs, 1.0);
    } else {
        e_pv_1 = consensus_total_energy(1.0, pv_inst, world.channel, world.costs);
        e_rsu_1 = consensus_total_energy(1.0, rsu_inst, world.channel, world.costs);
    }

    double ov_pa = spec.sweep == SweepVar::rate_pa ? value : 0.0;
    double ov_rsu = spec.sweep == SweepVar::rate_rsu ? value : 0.0;
    bool fixed_prices = spec.sweep == SweepVar::price_pa || spec.sweep == SweepVar::price_rsu;

    double sum_eps = 0, sum_pa = 0, sum_rsu = 0;
    double sum_urv = 0, sum_upv = 0, sum_ursu = 0;
    int feasible_count = 0, converged_count = 0;
    for (const RequestingVehicle& rv : world.rvs) {
        OffloadInstance inst = make_offload_instance(world, rv, e_pv_1, e_rsu_1, ov_pa, ov_rsu);
        double p_pa, p_rsu, eps, urv, upv, ursu;
        bool feasible, converged = true;
        if (fixed_prices) {
            p_pa = spec.sweep == SweepVar::price_pa ? value : 0.2;
            p_rsu = spec.sweep == SweepVar::price_rsu ? value : 0.5;
            if (is_offload_baseline(scheme)) {
                // baselines are evaluated at their forced split; rows stay
                // comparable by keying feasibility on the instance itself
                SchemeUtilities su = baseline_scheme_utilities(scheme, inst, p_pa, p_rsu);
                eps = su.epsilon;
                urv = su.u_rv;
                upv = su.u_pv;
                ursu = su.u_rsu;
                feasible = optimal_epsilon(inst, p_pa, p_rsu).feasible;
            } else {
                EpsilonResult er = optimal_epsilon(inst, p_pa, p_rsu);
                feasible = er.feasible;
                eps = er.epsilon;
                urv = feasible ? rv_utility(inst, eps, p_pa, p_rsu) : 0.0;
                upv = feasible ? pv_utility(inst, eps, p_pa) : 0.0;
                ursu = feasible ? rsu_utility(inst, eps, p_rsu) : 0.0;
            }
        } else {
            OffloadSolution sol = solve_stackelberg(inst, world.game);
            p_pa = sol.p_pa;
            p_rsu = sol.p_rsu;
            converged = sol.converged;
            if (is_offload_baseline(scheme)) {
                SchemeUtilities su = baseline_scheme_utilities(scheme, inst, p_pa, p_rsu);
                eps = su.epsilon;
                urv = su.u_rv;
                upv = su.u_pv;
                ursu = su.u_rsu;
                feasible = sol.feasible;
            } else {
                eps = sol.epsilon;
                urv = sol.u_rv;
                upv = sol.u_pv;
                ursu = sol.u_rsu;
                feasible = sol.feasible;
            }
        }
        if (feasible) {
            sum_eps += eps;
            sum_pa += p_pa;
            sum_rsu += p_rsu;
            sum_urv += urv;
            sum_upv += upv;
            sum_ursu += ursu;
            ++feasible_count;
            if (converged) ++converged_count;
        }
    }

    int v_count = static_cast<int>(world.rvs.size());
    std::string status = feasible_count == v_count ? "ok"
                         : feasible_count > 0      ? "partial"
                                                   : "infeasible";
    double inv = feasible_count > 0 ? 1.0 / feasible_count : 0.0;
    emit("epsilon_mean", sum_eps * inv, status);
    emit("price_pa_mean", sum_pa * inv, status);
    emit("price_rsu_mean", sum_rsu * inv, status);
    emit("rv_utility_mean", sum_urv * inv, status);
    emit("rv_utility_total", sum_urv, status);
    emit("pv_utility_mean", sum_upv * inv, status);
    emit("pv_utility_total", sum_upv, status);
    emit("pv_utility_per_provider", world.pvs.empty() ? 0.0 : sum_upv / double(world.pvs.size()),
         status);
    emit("rsu_utility_mean", sum_ursu * inv, status);
    emit("rsu_utility_total", sum_ursu, status);
    emit("rsu_utility_per_provider", world.rsus.empty() ? 0.0 : sum_ursu / double(world.rsus.size()),
         status);
    emit("consensus_energy_pv", e_pv_1 * v_count, status);
    emit("consensus_energy_rsu", e_rsu_1 * v_count, status);
    emit("committee_size", double(set.members.size()), status);
    emit("infeasible_count", double(v_count - feasible_count), status);
    emit("converged_count", double(converged_count), status);
    return out;
}

}  // namespace

ScenarioConfig materialize_world(const ExperimentSpec& spec, const ScenarioConfig& base,
                                 size_t value_i, int rep) {
    double value = spec.values.at(value_i);
    // One world per repetition, shared by every sweep value and scheme:
    // sampled entity fields are keyed by id, so count sweeps grow the same
    // world instead of resampling it.
    uint64_t world_seed = mix_seed(spec.seed, static_cast<uint64_t>(rep));
    ScenarioConfig world = base;
    auto regen_pvs = [&](int n) {
        world.pvs.clear();
        world.pvs = generate_pvs(world, n, world_seed);
    };
    auto regen_rsus = [&](int n) {
        world.rsus.clear();
        world.rsus = generate_rsus(world, n, mix_seed(world_seed, 2));
    };
    auto regen_rvs = [&](int n) {
        world.rvs.clear();
        world.rvs = generate_rvs(world, n, mix_seed(world_seed, 3));
    };
    if (spec.pv_count > 0) regen_pvs(spec.pv_count);
    if (spec.rsu_count > 0) regen_rsus(spec.rsu_count);
    if (spec.rv_count > 0) regen_rvs(spec.rv_count);
    switch (spec.sweep) {
        case SweepVar::n_pv: regen_pvs(static_cast<int>(std::llround(value))); break;
        case SweepVar::n_rsu: regen_rsus(static_cast<int>(std::llround(value))); break;
        case SweepVar::n_rv: regen_rvs(static_cast<int>(std::llround(value))); break;
        default: break;
    }
    return world;
}

ExperimentTable run_experiment(const ExperimentSpec& spec, const ScenarioConfig& cfg, int workers) {
    validate_experiment_spec(spec);
    struct Cell {
        size_t scheme_i;
        size_t value_i;
        int rep;
    };
    std::vector<Cell> cells;
    for (size_t s = 0; s < spec.schemes.size(); ++s)
        for (size_t v = 0; v < spec.values.size(); ++v)
            for (int r = 0; r < spec.repetitions; ++r) cells.push_back({s, v, r});
    std::vector<CellResult> results(cells.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            results[i] = run_cell(spec, cfg, spec.schemes[c.scheme_i], c.value_i, c.rep);
        }
    };
    int n_workers = std::max(1, workers);
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    ExperimentTable table;
    for (const auto& r : results)
        table.rows.insert(table.rows.end(), r.rows.begin(), r.rows.end());
    return table;
}

std::string manifest_json(const ExperimentSpec& spec, const ScenarioConfig& cfg,
                          const ExperimentTable& table, const std::string& csv_name) {
    using nlohmann::json;
    char hash_hex[32];
    snprintf(hash_hex, sizeof(hash_hex), "%016llx",
             static_cast<unsigned long long>(scenario_hash(cfg)));
    json j;
    j["experiment"] = spec.name;
    j["sweep_variable"] = sweep_var_name(spec.sweep);
    j["sweep_values"] = spec.values;
    j["schemes"] = spec.schemes;
    j["repetitions"] = spec.repetitions;
    j["seed"] = spec.seed;
    j["scenario_hash"] = std::string(hash_hex);
    j["rows"] = table.rows.size();
    j["output"] = csv_name;
    j["version"] = kVersion;
    return j.dump(2);
}

std::string diagnostics_json(const ExperimentSpec& spec, const ExperimentTable& table) {
    using nlohmann::json;
    json cells = json::array();
    for (const auto& r : table.rows) {
        if (r.metric != "converged_count" && r.metric != "infeasible_count") continue;
        cells.push_back({{"scheme", r.scheme},
                         {"sweep_value", r.sweep_value},
                         {"repetition", r.repetition},
                         {"metric", r.metric},
                         {"value", r.value},
                         {"status", r.status}});
    }
    json j;
    j["experiment"] = spec.name;
    j["cells"] = cells;
    return j.dump(2);
}

}  // namespace bpvec
