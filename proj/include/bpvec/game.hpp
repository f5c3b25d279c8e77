#pragma once

#include <utility>

#include "bpvec/consensus.hpp"
#include "bpvec/scenario.hpp"

namespace bpvec {

// One requesting vehicle's pricing/offloading problem against the PV and
// RSU aggregates. Completion times are linear in the offload ratio:
// T_pv = (1-eps) * gamma_pa, T_rsu = eps * gamma_rsu. Prices are per MB of
// task; energy terms are per bit.
struct OffloadInstance {
    RequestingVehicle rv;
    double gamma_pa_s = 0.0;
    double gamma_rsu_s = 0.0;
    double rate_pv_mbps = 0.0;    // link to the binding PV
    double rate_rsu_mbps = 0.0;   // link to the binding RSU
    double pv_energy_rate = 0.0;  // sum kappa_v phi f^2 C, joules per bit
    double rsu_energy_rate = 0.0;
    double pv_m_aggregate = 0.0;  // sum kappa_v phi f^2 (no C), closed-form term
    double rsu_m_aggregate = 0.0;
    double consensus_pv_j = 0.0;  // per-request consensus energy, PV chain
    double consensus_rsu_j = 0.0;
    double energy_price_v = 0.1;
    double energy_price_r = 0.05;
    double tx_power_w = 0.0;
    double cap_switch_v = 1e-27;
    double local_cpu_hz = 0.8e9;  // baseline-only RV CPU
    double local_cycles_per_bit = 24.0;
    ConsensusTermSign sign = ConsensusTermSign::minus_as_defined;

    double task_mb() const { return bits_to_mb(rv.task_bits); }
};

OffloadInstance make_offload_instance(const ScenarioConfig& cfg, const RequestingVehicle& rv,
                                      double consensus_pv_j, double consensus_rsu_j,
                                      double rate_pv_override_mbps = 0.0,
                                      double rate_rsu_override_mbps = 0.0);

enum class Regime { pv_binding, rsu_binding, balanced };

struct EpsilonResult {
    double epsilon = 0.0;
    Regime regime = Regime::balanced;
    bool clamped = false;   // projected onto a bound, not a stationary point
    bool feasible = false;  // some ratio satisfies both time constraints
};

std::pair<double, double> completion_times(const OffloadInstance& inst, double epsilon);

double rv_utility(const OffloadInstance& inst, double epsilon, double p_pa, double p_rsu);
double pv_utility(const OffloadInstance& inst, double epsilon, double p_pa);
double rsu_utility(const OffloadInstance& inst, double epsilon, double p_rsu);

// Price attractiveness gap between the PV route and the RSU route
// (payment plus transmission energy), per task.
double price_gap_a(const OffloadInstance& inst, double p_pa, double p_rsu);

// Offload ratio interval allowed by the deadline; first > second when empty.
std::pair<double, double> feasible_epsilon_range(const OffloadInstance& inst);

// Follower best response: piecewise closed form from the first-order
// conditions, restricted to the deadline-feasible interval.
EpsilonResult optimal_epsilon(const OffloadInstance& inst, double p_pa, double p_rsu);

// Same, over an explicit ratio interval (deadline ignored).
EpsilonResult optimal_epsilon_in(const OffloadInstance& inst, double p_pa, double p_rsu, double lo,
                                 double hi);

struct PriceGradients {
    double d_pv = 0.0;    // dU_pv / dp_pa at the follower optimum
    double d_rsu = 0.0;   // dU_rsu / dp_rsu
    bool at_boundary = false;  // follower sat on a clamp; derivative is one-sided
};

PriceGradients price_gradients(const OffloadInstance& inst, const EpsilonResult& eps, double p_pa,
                               double p_rsu);

// Equal-utility price maps of the time-balanced regime: each leader's price
// written as a function of the other's.
double balanced_price_rsu(const OffloadInstance& inst, double p_pa);
double balanced_price_pa(const OffloadInstance& inst, double p_rsu);

struct ClosedFormPair {
    double p_pa = 0.0;   // floored values
    double p_rsu = 0.0;
    double raw_pa = 0.0; // pre-floor solution of the simultaneous maps
    double raw_rsu = 0.0;
    bool clamped = false;
    bool singular = false;  // gamma ratio 1: the maps coincide, hint projected
};

ClosedFormPair closed_form_equilibrium(const OffloadInstance& inst, const GameSolverParams& params,
                                       double hint_pa = 0.2, double hint_rsu = 0.5);

struct OffloadSolution {
    double epsilon = 0.0;
    double p_pa = 0.0;
    double p_rsu = 0.0;
    double u_rv = 0.0;
    double u_pv = 0.0;
    double u_rsu = 0.0;
    Regime regime = Regime::balanced;
    int iterations = 0;
    bool converged = false;
    bool feasible = true;
};

// Gradient-ascent price loops around the follower's closed-form response;
// time-balanced instances jump to the closed-form pair. Never throws on
// non-convergence: the flag is reported instead.
OffloadSolution solve_stackelberg(const OffloadInstance& inst, const GameSolverParams& params,
                                  double init_epsilon = 0.5, double init_p_pa = 0.2,
                                  double init_p_rsu = 0.5);

}  // namespace bpvec
