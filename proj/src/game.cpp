#include "bpvec/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bpvec/channel.hpp"

namespace bpvec {

OffloadInstance make_offload_instance(const ScenarioConfig& cfg, const RequestingVehicle& rv,
                                      double consensus_pv_j, double consensus_rsu_j,
                                      double rate_pv_override_mbps, double rate_rsu_override_mbps) {
    auto [phi_pv, phi_rsu] = compute_capacity_shares(cfg.pvs, cfg.rsus);
    OffloadInstance inst;
    inst.rv = rv;
    double worst_pv = 0.0;
    for (size_t k = 0; k < cfg.pvs.size(); ++k) {
        const ParkedVehicle& p = cfg.pvs[k];
        double r = rate_pv_override_mbps > 0.0 ? rate_pv_override_mbps : rate_mbps(rv.pos, p.pos, cfg.channel);
        double gamma = rv.task_bits * phi_pv[k] * p.cycles_per_bit / p.cpu_hz +
                       rv.task_bits / mbps_to_bps(r);
        if (gamma > worst_pv) {
            worst_pv = gamma;
            inst.rate_pv_mbps = r;
        }
    }
    inst.gamma_pa_s = worst_pv;
    double worst_rsu = 0.0;
    for (size_t j = 0; j < cfg.rsus.size(); ++j) {
        const Rsu& r = cfg.rsus[j];
        double rate = rate_rsu_override_mbps > 0.0 ? rate_rsu_override_mbps
                                                   : rate_mbps(rv.pos, r.pos, cfg.channel);
        double gamma = rv.task_bits * phi_rsu[j] * r.cycles_per_bit / r.cpu_hz +
                       rv.task_bits / mbps_to_bps(rate);
        if (gamma > worst_rsu) {
            worst_rsu = gamma;
            inst.rate_rsu_mbps = rate;
        }
    }
    inst.gamma_rsu_s = worst_rsu;
    for (size_t k = 0; k < cfg.pvs.size(); ++k) {
        double f2 = cfg.pvs[k].cpu_hz * cfg.pvs[k].cpu_hz;
        inst.pv_energy_rate += cfg.costs.cap_switch_vehicle * f2 * phi_pv[k] * cfg.pvs[k].cycles_per_bit;
        inst.pv_m_aggregate += cfg.costs.cap_switch_vehicle * f2 * phi_pv[k];
    }
    for (size_t j = 0; j < cfg.rsus.size(); ++j) {
        double f2 = cfg.rsus[j].cpu_hz * cfg.rsus[j].cpu_hz;
        inst.rsu_energy_rate += cfg.costs.cap_switch_rsu * f2 * phi_rsu[j] * cfg.rsus[j].cycles_per_bit;
        inst.rsu_m_aggregate += cfg.costs.cap_switch_rsu * f2 * phi_rsu[j];
    }
    inst.consensus_pv_j = consensus_pv_j;
    inst.consensus_rsu_j = consensus_rsu_j;
    inst.energy_price_v = cfg.costs.energy_price_vehicle;
    inst.energy_price_r = cfg.costs.energy_price_rsu;
    inst.tx_power_w = cfg.channel.tx_power_w;
    inst.cap_switch_v = cfg.costs.cap_switch_vehicle;
    inst.local_cpu_hz = cfg.generator.local_cpu_hz;
    inst.local_cycles_per_bit = cfg.generator.local_cycles_per_bit;
    inst.sign = cfg.game.consensus_sign;
    return inst;
}

std::pair<double, double> completion_times(const OffloadInstance& inst, double epsilon) {
    return {(1.0 - epsilon) * inst.gamma_pa_s, epsilon * inst.gamma_rsu_s};
}

namespace {

double signed_consensus(const OffloadInstance& inst, double price, double energy) {
    return inst.sign == ConsensusTermSign::minus_as_defined ? -price * energy : price * energy;
}

}  // namespace

double rv_utility(const OffloadInstance& inst, double epsilon, double p_pa, double p_rsu) {
    auto [t_pv, t_rsu] = completion_times(inst, epsilon);
    double t = std::max(t_pv, t_rsu);
    double satisfaction = inst.rv.alpha * (inst.rv.max_time_s - t * t);
    double mb = inst.task_mb();
    double payment = (1.0 - epsilon) * mb * p_pa + epsilon * mb * p_rsu;
    double tx = inst.energy_price_v * inst.tx_power_w *
                (epsilon * inst.rv.task_bits / mbps_to_bps(inst.rate_rsu_mbps) +
                 (1.0 - epsilon) * inst.rv.task_bits / mbps_to_bps(inst.rate_pv_mbps));
    return satisfaction - payment - tx;
}

double pv_utility(const OffloadInstance& inst, double epsilon, double p_pa) {
    double revenue = (1.0 - epsilon) * inst.task_mb() * p_pa;
    double compute = inst.energy_price_v * (1.0 - epsilon) * inst.rv.task_bits * inst.pv_energy_rate;
    return revenue - compute + signed_consensus(inst, inst.energy_price_v, inst.consensus_pv_j);
}

double rsu_utility(const OffloadInstance& inst, double epsilon, double p_rsu) {
    double revenue = epsilon * inst.task_mb() * p_rsu;
    double compute = inst.energy_price_r * epsilon * inst.rv.task_bits * inst.rsu_energy_rate;
    return revenue - compute + signed_consensus(inst, inst.energy_price_r, inst.consensus_rsu_j);
}

double price_gap_a(const OffloadInstance& inst, double p_pa, double p_rsu) {
    double mb = inst.task_mb();
    double pv_cost = mb * p_pa + inst.energy_price_v * inst.tx_power_w * inst.rv.task_bits /
                                     mbps_to_bps(inst.rate_pv_mbps);
    double rsu_cost = mb * p_rsu + inst.energy_price_v * inst.tx_power_w * inst.rv.task_bits /
                                       mbps_to_bps(inst.rate_rsu_mbps);
    return pv_cost - rsu_cost;
}

std::pair<double, double> feasible_epsilon_range(const OffloadInstance& inst) {
    double lo = std::max(0.0, 1.0 - inst.rv.max_time_s / inst.gamma_pa_s);
    double hi = std::min(1.0, inst.rv.max_time_s / inst.gamma_rsu_s);
    return {lo, hi};
}

namespace {

constexpr double kBalancedRelTol = 1e-9;

struct Candidate {
    double eps;
    bool clamped;
};

EpsilonResult pick_epsilon(const OffloadInstance& inst, double p_pa, double p_rsu, double lo,
                           double hi) {
    if (inst.gamma_pa_s <= 0.0 || inst.gamma_rsu_s <= 0.0)
        throw std::invalid_argument("optimal_epsilon: completion-time coefficients must be positive");
    EpsilonResult res;
    if (lo > hi) return res;  // feasible=false
    res.feasible = true;
    double a = price_gap_a(inst, p_pa, p_rsu);
    double alpha = inst.rv.alpha;
    double e_bal = inst.gamma_pa_s / (inst.gamma_pa_s + inst.gamma_rsu_s);

    // stationary points of the two branches, each confined to its region
    double c_pv = 1.0 + a / (2.0 * alpha * inst.gamma_pa_s * inst.gamma_pa_s);
    double c_rsu = a / (2.0 * alpha * inst.gamma_rsu_s * inst.gamma_rsu_s);
    double pv_hi = std::min(hi, e_bal);
    double rsu_lo = std::max(lo, e_bal);

    std::vector<Candidate> cands;
    if (pv_hi >= lo) {
        double e = std::clamp(c_pv, lo, pv_hi);
        cands.push_back({e, e != c_pv});
    }
    if (hi >= rsu_lo) {
        double e = std::clamp(c_rsu, rsu_lo, hi);
        cands.push_back({e, e != c_rsu});
    }
    if (e_bal >= lo && e_bal <= hi) cands.push_back({e_bal, false});

    double best_u = -std::numeric_limits<double>::infinity();
    Candidate best{lo, true};
    for (const Candidate& c : cands) {
        double u = rv_utility(inst, c.eps, p_pa, p_rsu);
        if (u > best_u) {
            best_u = u;
            best = c;
        }
    }
    res.epsilon = best.eps;
    res.clamped = best.clamped;
    auto [t_pv, t_rsu] = completion_times(inst, best.eps);
    if (std::fabs(t_pv - t_rsu) <= kBalancedRelTol * std::max({t_pv, t_rsu, 1e-300})) {
        res.regime = Regime::balanced;
        res.clamped = false;
    } else {
        res.regime = best.eps < e_bal ? Regime::pv_binding : Regime::rsu_binding;
    }
    return res;
}

}  // namespace

EpsilonResult optimal_epsilon(const OffloadInstance& inst, double p_pa, double p_rsu) {
    auto [lo, hi] = feasible_epsilon_range(inst);
    return pick_epsilon(inst, p_pa, p_rsu, lo, hi);
}

EpsilonResult optimal_epsilon_in(const OffloadInstance& inst, double p_pa, double p_rsu, double lo,
                                 double hi) {
    return pick_epsilon(inst, p_pa, p_rsu, lo, hi);
}

PriceGradients price_gradients(const OffloadInstance& inst, const EpsilonResult& eps, double p_pa,
                               double p_rsu) {
    (void)p_rsu;
    PriceGradients g;
    double mb = inst.task_mb();
    double de = 0.0;  // d eps*/d p_pa; the p_rsu derivative is its negative
    if (eps.clamped) {
        g.at_boundary = true;
    } else if (eps.regime == Regime::pv_binding) {
        de = mb / (2.0 * inst.rv.alpha * inst.gamma_pa_s * inst.gamma_pa_s);
    } else if (eps.regime == Regime::rsu_binding) {
        de = mb / (2.0 * inst.rv.alpha * inst.gamma_rsu_s * inst.gamma_rsu_s);
    }
    double e = eps.epsilon;
    double pv_marginal_cost = inst.energy_price_v * inst.rv.task_bits * inst.pv_energy_rate;
    double rsu_marginal_cost = inst.energy_price_r * inst.rv.task_bits * inst.rsu_energy_rate;
    g.d_pv = (1.0 - e) * mb - (mb * p_pa - pv_marginal_cost) * de;
    g.d_rsu = e * mb + (mb * p_rsu - rsu_marginal_cost) * (-de);
    return g;
}

namespace {

double m_aggregate(const OffloadInstance& inst) {
    double w = inst.gamma_rsu_s / (inst.gamma_rsu_s + inst.gamma_pa_s);
    double pv_side = w * inst.rv.task_bits * inst.pv_m_aggregate + inst.consensus_pv_j;
    double rsu_side = w * inst.rv.task_bits * inst.rsu_m_aggregate + inst.consensus_rsu_j;
    return inst.energy_price_v * (pv_side - rsu_side);
}

}  // namespace

double balanced_price_rsu(const OffloadInstance& inst, double p_pa) {
    double m = m_aggregate(inst);
    double gp = inst.gamma_pa_s, gr = inst.gamma_rsu_s;
    return p_pa * gr / gp - (gr + gp) / (inst.task_mb() * gp) * m;
}

double balanced_price_pa(const OffloadInstance& inst, double p_rsu) {
    double m = m_aggregate(inst);
    double gp = inst.gamma_pa_s, gr = inst.gamma_rsu_s;
    return p_rsu * gr / gp + (gr + gp) / (inst.task_mb() * gr) * m;
}

ClosedFormPair closed_form_equilibrium(const OffloadInstance& inst, const GameSolverParams& params,
                                       double hint_pa, double hint_rsu) {
    (void)hint_rsu;
    double m = m_aggregate(inst);
    double gp = inst.gamma_pa_s, gr = inst.gamma_rsu_s;
    double a = gr / gp;
    double b1 = (gr + gp) / (inst.task_mb() * gp) * m;
    double b2 = (gr + gp) / (inst.task_mb() * gr) * m;
    ClosedFormPair out;
    if (std::fabs(1.0 - a * a) < 1e-12) {
        // the two maps describe the same line; keep the caller's PV price
        out.singular = true;
        out.raw_pa = hint_pa;
        out.raw_rsu = balanced_price_rsu(inst, hint_pa);
    } else {
        out.raw_pa = (b2 - a * b1) / (1.0 - a * a);
        out.raw_rsu = a * out.raw_pa - b1;
    }
    out.p_pa = std::clamp(out.raw_pa, params.price_floor, params.price_cap);
    out.p_rsu = std::clamp(out.raw_rsu, params.price_floor, params.price_cap);
    out.clamped = out.p_pa != out.raw_pa || out.p_rsu != out.raw_rsu;
    return out;
}

namespace {

double rel_sq_change(double now, double before) {
    double denom = before * before;
    if (denom <= 0.0) denom = 1e-30;
    return (now - before) * (now - before) / denom;
}

}  // namespace

OffloadSolution solve_stackelberg(const OffloadInstance& inst, const GameSolverParams& params,
                                  double init_epsilon, double init_p_pa, double init_p_rsu) {
    OffloadSolution sol;
    double p_pa = std::clamp(init_p_pa, params.price_floor, params.price_cap);
    double p_rsu = std::clamp(init_p_rsu, params.price_floor, params.price_cap);
    double eps = std::clamp(init_epsilon, 0.0, 1.0);
    // mu is expressed in price-floor units; rescale to raw price steps
    double step_pa = params.lr_pa * params.price_floor;
    double step_rsu = params.lr_rsu * params.price_floor;
    int iters = 0;
    bool converged = false;

    auto follower = [&](double pa, double pr) { return optimal_epsilon(inst, pa, pr); };

    EpsilonResult er = follower(p_pa, p_rsu);
    if (!er.feasible) {
        sol.feasible = false;
        sol.p_pa = p_pa;
        sol.p_rsu = p_rsu;
        return sol;
    }

    auto price_loop = [&](bool pv_side) {
        double& price = pv_side ? p_pa : p_rsu;
        double omega = pv_side ? params.shrink_pa : params.shrink_rsu;
        double step = pv_side ? step_pa : step_rsu;
        while (iters < params.max_iters) {
            ++iters;
            EpsilonResult cur = follower(p_pa, p_rsu);
            double u = pv_side ? pv_utility(inst, cur.epsilon, p_pa)
                               : rsu_utility(inst, cur.epsilon, p_rsu);
            double next;
            if (cur.regime != Regime::balanced) {
                if (u <= 0.0) {
                    next = std::max(params.price_floor, price / omega);
                } else {
                    PriceGradients g = price_gradients(inst, cur, p_pa, p_rsu);
                    double grad = pv_side ? g.d_pv : g.d_rsu;
                    double delta = step * grad;
                    double cap = 0.5 * std::max(price, params.price_floor);
                    delta = std::clamp(delta, -cap, cap);
                    next = std::clamp(price + delta, params.price_floor, params.price_cap);
                }
            } else {
                if (u < 0.0) {
                    next = std::max(params.price_floor, price / omega);
                } else {
                    // the balanced ratio is price-insensitive: place both
                    // prices on the closed-form pair at once; the outer loop
                    // re-checks the cross move
                    ClosedFormPair cf = closed_form_equilibrium(inst, params, p_pa, p_rsu);
                    if (pv_side) p_rsu = cf.p_rsu;
                    else p_pa = cf.p_pa;
                    next = pv_side ? cf.p_pa : cf.p_rsu;
                }
            }
            double change = rel_sq_change(next, price);
            price = next;
            if (change < params.tolerance) break;
        }
    };

    while (iters < params.max_iters) {
        ++iters;
        double eps_prev = eps;
        double pa_prev = p_pa;
        double rsu_prev = p_rsu;
        er = follower(p_pa, p_rsu);
        if (!er.feasible) {
            sol.feasible = false;
            break;
        }
        eps = er.epsilon;
        price_loop(true);
        price_loop(false);
        if (rel_sq_change(eps, eps_prev) < params.tolerance &&
            rel_sq_change(p_pa, pa_prev) < params.tolerance &&
            rel_sq_change(p_rsu, rsu_prev) < params.tolerance) {
            converged = true;
            break;
        }
    }

    er = follower(p_pa, p_rsu);
    sol.epsilon = er.feasible ? er.epsilon : 0.0;
    sol.regime = er.regime;
    sol.feasible = sol.feasible && er.feasible;
    sol.p_pa = p_pa;
    sol.p_rsu = p_rsu;
    if (sol.feasible) {
        sol.u_rv = rv_utility(inst, sol.epsilon, p_pa, p_rsu);
        sol.u_pv = pv_utility(inst, sol.epsilon, p_pa);
        sol.u_rsu = rsu_utility(inst, sol.epsilon, p_rsu);
    }
    sol.iterations = iters;
    sol.converged = converged && sol.feasible;
    return sol;
}

}  // namespace bpvec
