#pragma once

// Test-side oracles, kept independent of the library code paths they check.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bpvec/consensus.hpp"
#include "bpvec/game.hpp"
#include "bpvec/parking.hpp"
#include "bpvec/rng.hpp"
#include "bpvec/selection.hpp"

namespace testsupport {

// Adaptive Simpson quadrature, used as the incomplete-gamma oracle.
inline double simpson(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps, double whole, int depth) {
    double c = 0.5 * (a + b);
    double left = simpson(f, a, c);
    double right = simpson(f, c, b);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, c, eps / 2.0, left, depth - 1) +
           adaptive_simpson(f, c, b, eps / 2.0, right, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13) {
    return adaptive_simpson(f, a, b, eps, simpson(f, a, b), 60);
}

// integral of t^(k-1) e^(-t) over [0, x]; the singular head for k < 1 is
// handled by a two-term series start
inline double gamma_tail_integral(double k, double x) {
    double a = 1e-10;
    double head = std::pow(a, k) / k - std::pow(a, k + 1.0) / (k + 1.0);
    return head + integrate([k](double t) { return std::pow(t, k - 1.0) * std::exp(-t); }, a, x);
}

// The stay-probability fraction written out with gamma-function products
// (numerator and denominator share the sign); independent arithmetic route
// from the survival-ratio implementation.
inline double stay_fraction_literal(double t_p, double tau, const bpvec::GammaMixRow& r,
                                    bpvec::GammaArgMode mode) {
    auto arg = [&](double t, double shape, double scale) {
        double denom = mode == bpvec::GammaArgMode::theta_pow_kappa ? std::pow(scale, shape) : scale;
        return t / denom;
    };
    double gs = std::tgamma(r.shape_short);
    double gl = std::tgamma(r.shape_long);
    auto term = [&](double t) {
        return r.weight_short * bpvec::lower_incomplete_gamma(r.shape_short, arg(t, r.shape_short, r.scale_short)) * gl +
               r.weight_long * bpvec::lower_incomplete_gamma(r.shape_long, arg(t, r.shape_long, r.scale_long)) * gs -
               gs * gl;
    };
    return term(t_p + tau) / term(t_p);
}

// --- random graphs for the selection properties ---------------------------

inline bpvec::PvGraph random_connected_graph(size_t n, bpvec::SplitMix64& rng) {
    bpvec::PvGraph g;
    g.ids.resize(n);
    g.positions.resize(n);
    g.cpu_hz.resize(n);
    g.adj.assign(n, std::vector<uint8_t>(n, 0));
    for (size_t i = 0; i < n; ++i) {
        g.ids[i] = int(i + 1);
        g.positions[i] = {rng.uniform(0, 500), rng.uniform(0, 500)};
        g.cpu_hz[i] = rng.uniform(1e9, 2.5e9);
    }
    // random spanning tree keeps it connected, extra edges add density
    for (size_t i = 1; i < n; ++i) {
        size_t j = rng.below(i);
        g.adj[i][j] = g.adj[j][i] = 1;
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (rng.u01() < 0.15) g.adj[i][j] = g.adj[j][i] = 1;
    g.snr_sum.assign(n, 0.0);
    g.quality.resize(n);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += g.cpu_hz[i];
    for (size_t i = 0; i < n; ++i) g.quality[i] = rng.u01() * 0.5 + 0.5 * g.cpu_hz[i] / total;
    return g;
}

// Test-local predicates (the library has its own; these stay independent).
inline bool check_dominating(const bpvec::PvGraph& g, const std::vector<int>& members) {
    std::set<int> mem(members.begin(), members.end());
    for (size_t i = 0; i < g.size(); ++i) {
        if (mem.count(g.ids[i])) continue;
        bool covered = false;
        for (size_t j = 0; j < g.size(); ++j)
            if (g.adj[i][j] && mem.count(g.ids[j])) covered = true;
        if (!covered) return false;
    }
    return true;
}

// Connectivity of the member-induced subgraph, required separately inside
// each component of the underlying graph.
inline bool check_connected(const bpvec::PvGraph& g, const std::vector<int>& members) {
    std::vector<int> comp(g.size(), -1);
    int next = 0;
    for (size_t s = 0; s < g.size(); ++s) {
        if (comp[s] != -1) continue;
        comp[s] = next;
        std::vector<size_t> stack{s};
        while (!stack.empty()) {
            size_t u = stack.back();
            stack.pop_back();
            for (size_t v = 0; v < g.size(); ++v)
                if (g.adj[u][v] && comp[v] == -1) {
                    comp[v] = next;
                    stack.push_back(v);
                }
        }
        ++next;
    }
    std::set<int> mem(members.begin(), members.end());
    for (int c = 0; c < next; ++c) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < g.size(); ++i)
            if (comp[i] == c && mem.count(g.ids[i])) idx.push_back(i);
        if (idx.size() <= 1) continue;
        std::set<size_t> seen{idx[0]};
        std::vector<size_t> stack{idx[0]};
        while (!stack.empty()) {
            size_t u = stack.back();
            stack.pop_back();
            for (size_t v : idx)
                if (!seen.count(v) && g.adj[u][v]) {
                    seen.insert(v);
                    stack.push_back(v);
                }
        }
        if (seen.size() != idx.size()) return false;
    }
    return true;
}

// --- consensus trace checking ---------------------------------------------

// Replays commit events from the trace; returns false when two nodes ever
// commit different blocks at the same height.
inline bool commits_consistent(const bpvec::ConsensusRun& run) {
    std::map<uint64_t, uint64_t> by_height;
    for (const auto& e : run.events) {
        if (e.kind != "commit") continue;
        uint64_t h = 0, b = 0;
        if (sscanf(e.detail.c_str(), "height=%llu block=%llu", (unsigned long long*)&h,
                   (unsigned long long*)&b) != 2)
            return false;
        auto it = by_height.find(h);
        if (it == by_height.end()) by_height[h] = b;
        else if (it->second != b) return false;
    }
    return true;
}

// --- random offloading instances -------------------------------------------

struct InstanceOpts {
    double gamma_lo = 0.05, gamma_hi = 0.4;
    double min_ratio = 1.0;    // gamma asymmetry (either orientation)
    bool slow_pv = false;      // pin the asymmetry to gamma_pa > gamma_rsu
    bool scale_alpha = false;  // alpha tied to task/gamma scale
    bool full_window = false;  // deadline loose enough for any split
    double alpha_lo = 1.0, alpha_hi = 400.0;
};

// Price-loop iterates start on the pv-binding side; keeping the slow route
// on the PV side (big ratio) leaves the whole solution path in that regime,
// where the interior equilibrium is a genuine mutual best response.
inline InstanceOpts interior_equilibrium_opts() {
    InstanceOpts o;
    o.min_ratio = 6.0;
    o.slow_pv = true;
    o.scale_alpha = true;
    o.full_window = true;
    return o;
}

inline bpvec::OffloadInstance random_instance(bpvec::SplitMix64& rng,
                                              const InstanceOpts& opt = {}) {
    bpvec::OffloadInstance inst;
    inst.rv.id = 1;
    inst.rv.task_bits = bpvec::mb_to_bits(rng.uniform(10, 30));
    double gp = rng.uniform(opt.gamma_lo, opt.gamma_hi);
    double gr = rng.uniform(opt.gamma_lo, opt.gamma_hi);
    if (opt.min_ratio > 1.0) {
        double ratio = rng.uniform(opt.min_ratio, 2.0 * opt.min_ratio);
        if (opt.slow_pv || rng.u01() < 0.5) gr = gp / ratio;
        else gr = gp * ratio;
    }
    inst.gamma_pa_s = gp;
    inst.gamma_rsu_s = gr;
    if (opt.full_window) {
        inst.rv.max_time_s = std::max(gp, gr) * rng.uniform(1.05, 1.6);
    } else {
        double t_bal = gp * gr / (gp + gr);
        inst.rv.max_time_s = t_bal * rng.uniform(1.1, 2.5);
    }
    if (opt.scale_alpha) {
        // ties the curvature to the binding route so the slow side's
        // first-order point stays inside its own regime
        double g_big = std::max(gp, gr);
        inst.rv.alpha = inst.task_mb() / (2.0 * g_big * g_big) * rng.uniform(0.7, 1.4);
    } else {
        inst.rv.alpha = std::exp(rng.uniform(std::log(opt.alpha_lo), std::log(opt.alpha_hi)));
    }
    inst.rate_pv_mbps = rng.uniform(40, 400);
    inst.rate_rsu_mbps = rng.uniform(40, 400);
    inst.pv_energy_rate = rng.uniform(5e-8, 1.2e-7);
    inst.rsu_energy_rate = rng.uniform(3e-8, 8e-8);
    inst.pv_m_aggregate = inst.pv_energy_rate / 24.0 * rng.uniform(0.8, 1.2);
    inst.rsu_m_aggregate = inst.rsu_energy_rate / 24.0 * rng.uniform(0.8, 1.2);
    inst.consensus_pv_j = rng.uniform(0.0, 0.5);
    inst.consensus_rsu_j = rng.uniform(0.0, 0.5);
    inst.energy_price_v = 0.1;
    inst.energy_price_r = 0.05;
    inst.tx_power_w = 0.28183815;
    return inst;
}

// Grid argmax of the requester utility over the deadline-feasible interval.
inline double grid_best_epsilon(const bpvec::OffloadInstance& inst, double p_pa, double p_rsu,
                                double step = 1e-4) {
    auto [lo, hi] = bpvec::feasible_epsilon_range(inst);
    double best_e = lo, best_u = -1e300;
    for (double e = lo; e <= hi + 1e-12; e += step) {
        double ec = std::min(e, hi);
        double u = bpvec::rv_utility(inst, ec, p_pa, p_rsu);
        if (u > best_u) {
            best_u = u;
            best_e = ec;
        }
    }
    return best_e;
}

// Numeric leader best response: coarse grid plus golden-section refinement
// inside the best bracket.
inline double best_response_price(const bpvec::OffloadInstance& inst, bool pv_side, double other,
                                  double floor, double cap) {
    auto value = [&](double p) {
        double p_pa = pv_side ? p : other;
        double p_rsu = pv_side ? other : p;
        bpvec::EpsilonResult er = bpvec::optimal_epsilon(inst, p_pa, p_rsu);
        if (!er.feasible) return -1e300;
        return pv_side ? bpvec::pv_utility(inst, er.epsilon, p_pa)
                       : bpvec::rsu_utility(inst, er.epsilon, p_rsu);
    };
    const int n = 4000;
    double best_p = floor, best_u = -1e300;
    for (int i = 0; i <= n; ++i) {
        double p = floor + (cap - floor) * i / n;
        double u = value(p);
        if (u > best_u) {
            best_u = u;
            best_p = p;
        }
    }
    double a = std::max(floor, best_p - (cap - floor) / n);
    double b = std::min(cap, best_p + (cap - floor) / n);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = value(x1), f2 = value(x2);
    for (int i = 0; i < 80; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = value(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = value(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace testsupport
