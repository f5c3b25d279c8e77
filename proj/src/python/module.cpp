#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bpvec/channel.hpp"
#include "bpvec/consensus.hpp"
#include "bpvec/experiment.hpp"
#include "bpvec/game.hpp"
#include "bpvec/parking.hpp"
#include "bpvec/scenario.hpp"
#include "bpvec/selection.hpp"

namespace py = pybind11;
using namespace bpvec;

namespace {

ScenarioConfig scenario_from_text(const std::string& text) {
    std::istringstream is(text);
    return parse_scenario(is);
}

std::string run_trace_jsonl(const ConsensusRun& run) {
    std::ostringstream os;
    write_trace_jsonl(run, os);
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "parked-vehicle edge computing: consensus cost model and offloading game";

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init([](double x, double y) { return Vec2{x, y}; }))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y);

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init<>())
        .def_readwrite("bandwidth_mb", &ChannelParams::bandwidth_mb)
        .def_readwrite("tx_power_w", &ChannelParams::tx_power_w)
        .def_readwrite("transceiver_eta", &ChannelParams::transceiver_eta)
        .def_readwrite("ref_distance_m", &ChannelParams::ref_distance_m)
        .def_readwrite("noise_w", &ChannelParams::noise_w)
        .def_readwrite("pathloss_exp", &ChannelParams::pathloss_exp);

    m.def("snr", [](const Vec2& a, const Vec2& b, const ChannelParams& ch) { return snr(a, b, ch); });
    m.def("rate_mbps",
          [](const Vec2& a, const Vec2& b, const ChannelParams& ch) { return rate_mbps(a, b, ch); });

    py::enum_<GammaArgMode>(m, "GammaArgMode")
        .value("theta_pow_kappa", GammaArgMode::theta_pow_kappa)
        .value("theta", GammaArgMode::theta);

    py::class_<GammaMixRow>(m, "GammaMixRow")
        .def(py::init<>())
        .def_readwrite("shape_short", &GammaMixRow::shape_short)
        .def_readwrite("scale_short", &GammaMixRow::scale_short)
        .def_readwrite("shape_long", &GammaMixRow::shape_long)
        .def_readwrite("scale_long", &GammaMixRow::scale_long)
        .def_readwrite("weight_short", &GammaMixRow::weight_short)
        .def_readwrite("weight_long", &GammaMixRow::weight_long);

    py::class_<ParkingMixture>(m, "ParkingMixture")
        .def(py::init<>())
        .def_readwrite("arg_mode", &ParkingMixture::arg_mode)
        .def("set_all_hours",
             [](ParkingMixture& t, const GammaMixRow& r) { t.hours.fill(r); })
        .def("row", [](const ParkingMixture& t, int h) { return t.hours.at(size_t(h)); });

    m.def("lower_incomplete_gamma", &lower_incomplete_gamma);
    m.def("residence_cdf", &residence_cdf);
    m.def("stay_probability", [](double parked_s, double horizon_s, int hour,
                                 const ParkingMixture& tbl) {
        StayProbability p = stay_probability({parked_s, horizon_s, hour}, tbl);
        return py::make_tuple(p.value, p.departed);
    });

    py::class_<ParkedVehicle>(m, "ParkedVehicle")
        .def(py::init<>())
        .def_readwrite("id", &ParkedVehicle::id)
        .def_readwrite("pos", &ParkedVehicle::pos)
        .def_readwrite("cpu_hz", &ParkedVehicle::cpu_hz)
        .def_readwrite("cycles_per_bit", &ParkedVehicle::cycles_per_bit)
        .def_readwrite("parked_s", &ParkedVehicle::parked_s)
        .def_readwrite("arrival_hour", &ParkedVehicle::arrival_hour);

    py::class_<Rsu>(m, "Rsu")
        .def(py::init<>())
        .def_readwrite("id", &Rsu::id)
        .def_readwrite("pos", &Rsu::pos)
        .def_readwrite("cpu_hz", &Rsu::cpu_hz)
        .def_readwrite("cycles_per_bit", &Rsu::cycles_per_bit);

    py::class_<RequestingVehicle>(m, "RequestingVehicle")
        .def(py::init<>())
        .def_readwrite("id", &RequestingVehicle::id)
        .def_readwrite("pos", &RequestingVehicle::pos)
        .def_readwrite("task_bits", &RequestingVehicle::task_bits)
        .def_readwrite("max_time_s", &RequestingVehicle::max_time_s)
        .def_readwrite("alpha", &RequestingVehicle::alpha);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("rng_seed", &ScenarioConfig::rng_seed)
        .def_readwrite("channel", &ScenarioConfig::channel)
        .def_readwrite("parking", &ScenarioConfig::parking)
        .def_readwrite("pvs", &ScenarioConfig::pvs)
        .def_readwrite("rsus", &ScenarioConfig::rsus)
        .def_readwrite("rvs", &ScenarioConfig::rvs)
        .def("json", &scenario_json)
        .def("text", &scenario_text);

    m.def("load_scenario", &load_scenario);
    m.def("parse_scenario", &scenario_from_text);
    m.def("compute_capacity_shares", &compute_capacity_shares);

    py::class_<PvGraph>(m, "PvGraph")
        .def_readonly("ids", &PvGraph::ids)
        .def_readonly("quality", &PvGraph::quality)
        .def_readonly("snr_sum", &PvGraph::snr_sum)
        .def("adjacent", [](const PvGraph& g, size_t i, size_t j) { return bool(g.adj.at(i).at(j)); })
        .def("__len__", [](const PvGraph& g) { return g.size(); });

    py::class_<ConsensusSet>(m, "ConsensusSet")
        .def_readonly("members", &ConsensusSet::members)
        .def_readonly("heads", &ConsensusSet::heads)
        .def_readonly("leader", &ConsensusSet::leader)
        .def_readonly("partitioned", &ConsensusSet::partitioned);

    py::enum_<SelectionStrategy>(m, "SelectionStrategy")
        .value("cds", SelectionStrategy::cds)
        .value("random", SelectionStrategy::random)
        .value("capacity_only", SelectionStrategy::capacity_only)
        .value("communication_only", SelectionStrategy::communication_only);

    m.def("filter_by_stay",
          [](const ScenarioConfig& cfg) { return filter_by_stay(cfg.pvs, cfg.parking, cfg.selection); });
    m.def("build_graph",
          [](const ScenarioConfig& cfg, const std::vector<ParkedVehicle>& eligible) {
              return build_graph(eligible, cfg.channel, cfg.selection);
          });
    m.def("select_cds", &select_cds);
    m.def("select_baseline", &select_baseline);

    py::enum_<Phase>(m, "Phase")
        .value("new_view", Phase::new_view)
        .value("prepare", Phase::prepare)
        .value("pre_commit", Phase::pre_commit)
        .value("commit", Phase::commit)
        .value("decide", Phase::decide);
    py::enum_<Role>(m, "Role").value("leader", Role::leader).value("replica", Role::replica);

    py::class_<ConsensusInstance>(m, "ConsensusInstance")
        .def_readonly("kappa", &ConsensusInstance::kappa)
        .def_readonly("block_bits", &ConsensusInstance::block_bits)
        .def_readonly("tx_per_block", &ConsensusInstance::tx_per_block)
        .def("__len__", [](const ConsensusInstance& inst) { return inst.size(); });

    m.def("pv_committee", &pv_committee);
    m.def("rsu_committee", &rsu_committee, py::arg("cfg"), py::arg("max_nodes") = 0);
    m.def("phase_cycles",
          [](Role role, Phase phase, const ScenarioConfig& cfg, int f) {
              return phase_cycles(role, phase, cfg.costs, f);
          });
    m.def("consensus_compute_energy",
          [](const ConsensusInstance& inst, const ScenarioConfig& cfg) {
              return consensus_compute_energy(inst, cfg.costs);
          });
    m.def("consensus_tx_energy", [](const ConsensusInstance& inst, const ScenarioConfig& cfg) {
        return consensus_tx_energy(inst, cfg.channel, cfg.costs);
    });
    m.def("consensus_total_energy",
          [](double n_rvs, const ConsensusInstance& inst, const ScenarioConfig& cfg) {
              return consensus_total_energy(n_rvs, inst, cfg.channel, cfg.costs);
          });
    m.def("pbft_baseline_energy",
          [](const ConsensusInstance& inst, const ScenarioConfig& cfg, double n_rvs) {
              return pbft_baseline_energy(inst, cfg.channel, cfg.costs, n_rvs);
          });

    py::enum_<ByzBehavior>(m, "ByzBehavior")
        .value("silent", ByzBehavior::silent)
        .value("equivocate", ByzBehavior::equivocate)
        .value("vote_invalid", ByzBehavior::vote_invalid);

    py::class_<FaultPlan>(m, "FaultPlan").def(py::init<>());
    m.def("make_fault_plan", &make_fault_plan, py::arg("inst"), py::arg("byzantine_ids"),
          py::arg("behavior"), py::arg("leader_failures") = std::vector<uint64_t>{});

    py::class_<ConsensusRun>(m, "ConsensusRun")
        .def_readonly("n", &ConsensusRun::n)
        .def_readonly("f_max", &ConsensusRun::f_max)
        .def_readonly("commits", &ConsensusRun::commits)
        .def_readonly("committed", &ConsensusRun::committed)
        .def("views", [](const ConsensusRun& r) { return r.views.size(); })
        .def("compute_j", [](const ConsensusRun& r) { return r.ledger.compute_j; })
        .def("tx_j", [](const ConsensusRun& r) { return r.ledger.tx_j; })
        .def("trace_jsonl", &run_trace_jsonl)
        .def("ledger_csv", [](const ConsensusRun& r) { return ledger_csv_row("run", r); });

    m.def("run_consensus",
          [](const ConsensusInstance& inst, const FaultPlan& plan, const ScenarioConfig& cfg,
             int rounds, uint64_t seed, double base_latency_s, double jitter_s) {
              return run_consensus(inst, plan, {base_latency_s, jitter_s}, cfg.channel, cfg.costs,
                                   rounds, seed);
          },
          py::arg("inst"), py::arg("plan"), py::arg("cfg"), py::arg("rounds"), py::arg("seed"),
          py::arg("base_latency_s") = 0.002, py::arg("jitter_s") = 0.0);

    py::enum_<Regime>(m, "Regime")
        .value("pv_binding", Regime::pv_binding)
        .value("rsu_binding", Regime::rsu_binding)
        .value("balanced", Regime::balanced);

    py::class_<OffloadInstance>(m, "OffloadInstance")
        .def_readwrite("gamma_pa_s", &OffloadInstance::gamma_pa_s)
        .def_readwrite("gamma_rsu_s", &OffloadInstance::gamma_rsu_s)
        .def_readwrite("rate_pv_mbps", &OffloadInstance::rate_pv_mbps)
        .def_readwrite("rate_rsu_mbps", &OffloadInstance::rate_rsu_mbps)
        .def_readonly("consensus_pv_j", &OffloadInstance::consensus_pv_j)
        .def_readonly("consensus_rsu_j", &OffloadInstance::consensus_rsu_j);

    m.def("make_offload_instance", &make_offload_instance, py::arg("cfg"), py::arg("rv"),
          py::arg("consensus_pv_j"), py::arg("consensus_rsu_j"), py::arg("rate_pv_override_mbps") = 0.0,
          py::arg("rate_rsu_override_mbps") = 0.0);
    m.def("completion_times", &completion_times);
    m.def("rv_utility", &rv_utility);
    m.def("pv_utility", &pv_utility);
    m.def("rsu_utility", &rsu_utility);
    m.def("optimal_epsilon", [](const OffloadInstance& inst, double p_pa, double p_rsu) {
        EpsilonResult er = optimal_epsilon(inst, p_pa, p_rsu);
        return py::make_tuple(er.epsilon, er.regime, er.clamped, er.feasible);
    });

    py::class_<OffloadSolution>(m, "OffloadSolution")
        .def_readonly("epsilon", &OffloadSolution::epsilon)
        .def_readonly("p_pa", &OffloadSolution::p_pa)
        .def_readonly("p_rsu", &OffloadSolution::p_rsu)
        .def_readonly("u_rv", &OffloadSolution::u_rv)
        .def_readonly("u_pv", &OffloadSolution::u_pv)
        .def_readonly("u_rsu", &OffloadSolution::u_rsu)
        .def_readonly("regime", &OffloadSolution::regime)
        .def_readonly("iterations", &OffloadSolution::iterations)
        .def_readonly("converged", &OffloadSolution::converged)
        .def_readonly("feasible", &OffloadSolution::feasible);

    m.def("solve_stackelberg",
          [](const OffloadInstance& inst, const ScenarioConfig& cfg) {
              return solve_stackelberg(inst, cfg.game);
          });
    m.def("closed_form_equilibrium",
          [](const OffloadInstance& inst, const ScenarioConfig& cfg, double hint_pa, double hint_rsu) {
              ClosedFormPair p = closed_form_equilibrium(inst, cfg.game, hint_pa, hint_rsu);
              return py::make_tuple(p.p_pa, p.p_rsu, p.raw_pa, p.raw_rsu, p.clamped, p.singular);
          },
          py::arg("inst"), py::arg("cfg"), py::arg("hint_pa") = 0.2, py::arg("hint_rsu") = 0.5);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("name", &ExperimentSpec::name)
        .def_readwrite("values", &ExperimentSpec::values)
        .def_readwrite("schemes", &ExperimentSpec::schemes)
        .def_readwrite("repetitions", &ExperimentSpec::repetitions)
        .def_readwrite("seed", &ExperimentSpec::seed);

    m.def("load_experiment_spec", &load_experiment_spec);
    m.def("parse_experiment_spec", [](const std::string& text) {
        std::istringstream is(text);
        return parse_experiment_spec(is);
    });

    py::class_<ExperimentTable>(m, "ExperimentTable")
        .def("csv", &ExperimentTable::csv)
        .def("metric_by_value", &ExperimentTable::metric_by_value)
        .def("__len__", [](const ExperimentTable& t) { return t.rows.size(); });

    m.def("run_experiment", &run_experiment, py::arg("spec"), py::arg("cfg"), py::arg("workers") = 1);
    m.def("baseline_scheme_utilities",
          [](const std::string& scheme, const OffloadInstance& inst, double p_pa, double p_rsu) {
              SchemeUtilities su = baseline_scheme_utilities(scheme, inst, p_pa, p_rsu);
              return py::make_tuple(su.u_rv, su.u_pv, su.u_rsu, su.epsilon, su.feasible);
          });

    m.attr("__version__") = "0.1.0";
}
