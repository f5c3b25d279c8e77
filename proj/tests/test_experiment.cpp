#include <sstream>

#include "bpvec/experiment.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bpvec;

namespace {

ScenarioConfig small_world() {
    std::istringstream is(
        "seed = 5\n"
        "[generator]\n"
        "alpha = 60\n"
        "tolerance_s = 0.18 0.2\n"
        "task_mb = 11 16\n"
        "parked_s = 7200 21600\n"
        "pv = 1 100 100 1.8e9 24 14400 8\n"
        "pv = 2 180 120 2.2e9 24 10800 9\n"
        "pv = 3 260 100 1.5e9 24 9000 7\n"
        "pv = 4 200 200 2.4e9 24 12600 10\n"
        "rsu = 1 100 420 5.5e9 24\n"
        "rsu = 2 300 420 4.5e9 24\n"
        "rv = 1 150 360 12 0.3 60\n"
        "rv = 2 250 340 14 0.28 60\n");
    return parse_scenario(is);
}

ExperimentSpec tiny_spec() {
    std::istringstream is(
        "name = tiny\n"
        "sweep = n_rv\n"
        "values = 2\n"
        "schemes = bpvec rsu_only\n"
        "repetitions = 1\n"
        "seed = 3\n");
    return parse_experiment_spec(is);
}

}  // namespace

TEST_CASE("spec parsing and validation") {
    ExperimentSpec spec = tiny_spec();
    CHECK(spec.name == "tiny");
    CHECK(spec.sweep == SweepVar::n_rv);
    CHECK(spec.values == std::vector<double>{2});
    CHECK(spec.schemes == std::vector<std::string>{"bpvec", "rsu_only"});

    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return parse_experiment_spec(is);
    };
    CHECK_THROWS_WITH_AS(parse("name = x\nsweep = n_rv\nvalues = 3 2 4\nschemes = bpvec\n"),
                         doctest::Contains("monotone"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse("name = x\nsweep = n_rv\nvalues = 1 2\nschemes = nope\n"),
                         doctest::Contains("unknown scheme"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse("name = x\nsweep = wat\nvalues = 1\nschemes = bpvec\n"),
                         doctest::Contains("sweep"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse("name = x\nsweep = n_rv\nvalues = 1\nschemes = bpvec\nrepetitions = 0\n"),
        doctest::Contains("repetitions"), std::runtime_error);
}

TEST_CASE("row counting is rectangular") {
    ExperimentTable t = run_experiment(tiny_spec(), small_world());
    // 16 metrics per (scheme, value, repetition) cell
    CHECK(t.rows.size() == 2 * 1 * 1 * 16);
    for (const auto& r : t.rows) {
        CHECK(r.experiment == "tiny");
        CHECK(std::isfinite(r.value));
    }
}

TEST_CASE("identical runs produce byte-identical csv, regardless of workers") {
    ScenarioConfig cfg = small_world();
    ExperimentSpec spec = tiny_spec();
    std::string a = run_experiment(spec, cfg, 1).csv();
    std::string b = run_experiment(spec, cfg, 1).csv();
    std::string c = run_experiment(spec, cfg, 3).csv();
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.rfind("experiment,scheme,sweep_variable,sweep_value,repetition,metric,value,status\n",
                  0) == 0);
}

TEST_CASE("baseline utilities") {
    ScenarioConfig cfg = small_world();
    OffloadInstance inst = make_offload_instance(cfg, cfg.rvs[0], 0.05, 0.08);
    double p_pa = 0.2, p_rsu = 0.3;

    SchemeUtilities pv_only = baseline_scheme_utilities("pv_only", inst, p_pa, p_rsu);
    CHECK(pv_only.epsilon == 0.0);
    CHECK(pv_only.u_rsu == doctest::Approx(rsu_utility(inst, 0.0, p_rsu)).epsilon(1e-12));
    CHECK(pv_only.u_rv == doctest::Approx(rv_utility(inst, 0.0, p_pa, p_rsu)).epsilon(1e-12));

    SchemeUtilities rsu_only = baseline_scheme_utilities("rsu_only", inst, p_pa, p_rsu);
    CHECK(rsu_only.epsilon == 1.0);
    CHECK(rsu_only.u_pv == doctest::Approx(pv_utility(inst, 1.0, p_pa)).epsilon(1e-12));

    // an over-provisioned local CPU pushes the utility to a*Tmax minus energy
    OffloadInstance fast_local = inst;
    fast_local.local_cpu_hz = 1e12;
    SchemeUtilities local = baseline_scheme_utilities("local_only", fast_local, p_pa, p_rsu);
    double energy = fast_local.cap_switch_v * 1e24 * fast_local.rv.task_bits *
                    fast_local.local_cycles_per_bit * fast_local.energy_price_v;
    CHECK(local.u_rv ==
          doctest::Approx(fast_local.rv.alpha * fast_local.rv.max_time_s - energy).epsilon(1e-6));

    SchemeUtilities hybrid = baseline_scheme_utilities("rsu_and_local", inst, p_pa, p_rsu);
    CHECK(hybrid.epsilon >= 0.0);
    CHECK(hybrid.epsilon <= 1.0);
    CHECK(hybrid.u_pv == 0.0);

    CHECK_THROWS_AS(baseline_scheme_utilities("wat", inst, p_pa, p_rsu), std::runtime_error);
}

TEST_CASE("the equilibrium scheme dominates the fixed-split baselines") {
    ScenarioConfig cfg = small_world();
    OffloadInstance inst = make_offload_instance(cfg, cfg.rvs[1], 0.05, 0.08);
    OffloadSolution sol = solve_stackelberg(inst, cfg.game);
    REQUIRE(sol.feasible);
    for (const char* scheme : {"rsu_and_local", "rsu_only", "pv_only", "local_only"}) {
        SchemeUtilities su = baseline_scheme_utilities(scheme, inst, sol.p_pa, sol.p_rsu);
        CHECK(sol.u_rv >= su.u_rv - 1e-9);
    }
    SchemeUtilities hybrid = baseline_scheme_utilities("rsu_and_local", inst, sol.p_pa, sol.p_rsu);
    for (const char* scheme : {"rsu_only", "local_only"}) {
        SchemeUtilities su = baseline_scheme_utilities(scheme, inst, sol.p_pa, sol.p_rsu);
        CHECK(hybrid.u_rv >= su.u_rv - 1e-9);
    }
}

TEST_CASE("infeasible cells are flagged and the run continues") {
    ScenarioConfig cfg = small_world();
    cfg.rvs[0].max_time_s = 1e-4;
    cfg.rvs[1].max_time_s = 1e-4;
    ExperimentSpec spec = tiny_spec();
    spec.sweep = SweepVar::rate_pa;  // keep the hand-written RVs
    spec.values = {100.0};
    ExperimentTable t = run_experiment(spec, cfg);
    bool saw_infeasible = false;
    for (const auto& r : t.rows) {
        CHECK(std::isfinite(r.value));
        saw_infeasible = saw_infeasible || r.status == "infeasible";
    }
    CHECK(saw_infeasible);
}

TEST_CASE("count sweeps regenerate entities and nest across values") {
    ScenarioConfig cfg = small_world();
    ExperimentSpec spec = tiny_spec();
    spec.sweep = SweepVar::n_pv;
    spec.values = {6, 9};
    ScenarioConfig w6 = materialize_world(spec, cfg, 0, 0);
    ScenarioConfig w9 = materialize_world(spec, cfg, 1, 0);
    CHECK(w6.pvs.size() == 6);
    CHECK(w9.pvs.size() == 9);
    for (size_t i = 0; i < 6; ++i) CHECK(w6.pvs[i] == w9.pvs[i]);
    CHECK(w6.rvs == w9.rvs);
}

TEST_CASE("metric extraction orders means by sweep value") {
    ExperimentTable t;
    auto row = [&](double v, int rep, double val) {
        t.rows.push_back({"e", "bpvec", "n_rv", v, rep, "m", val, "ok"});
    };
    row(1, 0, 10);
    row(1, 1, 12);
    row(2, 0, 20);
    CHECK(t.metric_by_value("bpvec", "m") == std::vector<double>{11.0, 20.0});
    CHECK(t.metric_by_value("bpvec", "nope").empty());
}

TEST_CASE("manifest and diagnostics are deterministic json") {
    ScenarioConfig cfg = small_world();
    ExperimentSpec spec = tiny_spec();
    ExperimentTable t = run_experiment(spec, cfg);
    std::string m1 = manifest_json(spec, cfg, t, "tiny.csv");
    std::string m2 = manifest_json(spec, cfg, t, "tiny.csv");
    CHECK(m1 == m2);
    CHECK(m1.find("\"experiment\": \"tiny\"") != std::string::npos);
    CHECK(m1.find("scenario_hash") != std::string::npos);
    CHECK(diagnostics_json(spec, t).find("converged_count") != std::string::npos);
}
