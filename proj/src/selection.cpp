#include "bpvec/selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bpvec/rng.hpp"

namespace bpvec {

std::vector<ParkedVehicle> filter_by_stay(const std::vector<ParkedVehicle>& pvs,
                                          const ParkingMixture& parking,
                                          const SelectionParams& params) {
    std::vector<ParkedVehicle> out;
    for (const auto& p : pvs) {
        StayProbability s = stay_probability({p.parked_s, params.horizon_s, p.arrival_hour}, parking);
        if (!s.departed && s.value >= params.stay_threshold) out.push_back(p);
    }
    return out;
}

PvGraph build_graph(const std::vector<ParkedVehicle>& eligible, const ChannelParams& ch,
                    const SelectionParams& params) {
    if (eligible.empty()) throw std::invalid_argument("build_graph: empty node set");
    PvGraph g;
    size_t n = eligible.size();
    g.ids.reserve(n);
    g.positions.reserve(n);
    g.cpu_hz.reserve(n);
    for (const auto& p : eligible) {
        g.ids.push_back(p.id);
        g.positions.push_back(p.pos);
        g.cpu_hz.push_back(p.cpu_hz);
    }
    g.adj.assign(n, std::vector<uint8_t>(n, 0));
    g.snr_sum.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double s = snr(g.positions[i], g.positions[j], ch);
            g.snr_sum[i] += s;
            g.snr_sum[j] += s;
            if (s >= params.snr_threshold) g.adj[i][j] = g.adj[j][i] = 1;
        }
    }
    double snr_total = std::accumulate(g.snr_sum.begin(), g.snr_sum.end(), 0.0);
    double cpu_total = std::accumulate(g.cpu_hz.begin(), g.cpu_hz.end(), 0.0);
    g.quality.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double comm = snr_total > 0.0 ? g.snr_sum[i] / snr_total : (n == 1 ? 1.0 : 1.0 / double(n));
        g.quality[i] = params.w1 * comm + params.w2 * g.cpu_hz[i] / cpu_total;
    }
    return g;
}

namespace {

std::vector<size_t> quality_order(const PvGraph& g) {
    std::vector<size_t> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (g.quality[a] != g.quality[b]) return g.quality[a] > g.quality[b];
        return g.ids[a] < g.ids[b];
    });
    return order;
}

std::vector<int> graph_components(const PvGraph& g) {
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
    return comp;
}

// Union-find over member indices, used while stitching heads together.
struct Dsu {
    std::vector<int> parent;
    explicit Dsu(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

int pick_leader(const PvGraph& g, const std::vector<size_t>& member_idx) {
    int leader = -1;
    double best = -1.0;
    for (size_t i : member_idx) {
        if (g.quality[i] > best || (g.quality[i] == best && g.ids[i] < leader)) {
            best = g.quality[i];
            leader = g.ids[i];
        }
    }
    return leader;
}

ConsensusSet finish_set(const PvGraph& g, const std::vector<size_t>& member_idx,
                        const std::vector<size_t>& head_idx, bool partitioned) {
    ConsensusSet cs;
    cs.partitioned = partitioned;
    cs.leader = pick_leader(g, member_idx);
    for (size_t i : member_idx) cs.members.push_back(g.ids[i]);
    for (size_t i : head_idx) cs.heads.push_back(g.ids[i]);
    std::sort(cs.members.begin(), cs.members.end());
    std::sort(cs.heads.begin(), cs.heads.end());
    return cs;
}

}  // namespace

ConsensusSet select_cds(const PvGraph& g) {
    if (g.size() == 0) throw std::invalid_argument("select_cds: empty graph");
    size_t n = g.size();
    std::vector<int> comp = graph_components(g);
    bool partitioned = *std::max_element(comp.begin(), comp.end()) > 0;

    // Pass 1: quality-descending sweep; an uncovered node becomes a head and
    // covers its closed neighborhood.
    std::vector<uint8_t> covered(n, 0);
    std::vector<uint8_t> in_set(n, 0);
    std::vector<size_t> heads;
    for (size_t i : quality_order(g)) {
        if (covered[i]) continue;
        heads.push_back(i);
        in_set[i] = 1;
        covered[i] = 1;
        for (size_t j = 0; j < n; ++j)
            if (g.adj[i][j]) covered[j] = 1;
    }

    // Pass 2: within each graph component, merge head groups via a common
    // neighbor when one exists, otherwise via the best adjacent pair.
    std::vector<size_t> members = heads;
    Dsu dsu(n);
    auto member_edges_unite = [&]() {
        for (size_t a : members)
            for (size_t b : members)
                if (a < b && g.adj[a][b]) dsu.unite(int(a), int(b));
    };
    member_edges_unite();

    auto group_of = [&](size_t i) { return dsu.find(int(i)); };
    auto distinct_groups = [&](int c) {
        std::vector<int> gs;
        for (size_t m : members)
            if (comp[m] == c) {
                int r = group_of(m);
                if (std::find(gs.begin(), gs.end(), r) == gs.end()) gs.push_back(r);
            }
        return gs;
    };

    int max_comp = *std::max_element(comp.begin(), comp.end());
    for (int c = 0; c <= max_comp; ++c) {
        while (distinct_groups(c).size() > 1) {
            // single connector: non-member adjacent to members of >= 2 groups
            size_t best_single = n;
            double best_q = -1.0;
            for (size_t k = 0; k < n; ++k) {
                if (in_set[k] || comp[k] != c) continue;
                std::vector<int> touched;
                for (size_t m : members)
                    if (comp[m] == c && g.adj[k][m]) {
                        int r = group_of(m);
                        if (std::find(touched.begin(), touched.end(), r) == touched.end())
                            touched.push_back(r);
                    }
                if (touched.size() >= 2 &&
                    (g.quality[k] > best_q ||
                     (g.quality[k] == best_q && (best_single == n || g.ids[k] < g.ids[best_single])))) {
                    best_q = g.quality[k];
                    best_single = k;
                }
            }
            auto absorb = [&](size_t k) {
                members.push_back(k);
                in_set[k] = 1;
                for (size_t m : members)
                    if (m != k && comp[m] == c && g.adj[k][m]) dsu.unite(int(k), int(m));
            };
            if (best_single < n) {
                absorb(best_single);
                continue;
            }
            // connector pair (k, l): adjacent non-members touching different groups
            size_t bk = n, bl = n;
            double best_pair_q = -1.0;
            for (size_t k = 0; k < n; ++k) {
                if (in_set[k] || comp[k] != c) continue;
                for (size_t l = 0; l < n; ++l) {
                    if (in_set[l] || l == k || comp[l] != c || !g.adj[k][l]) continue;
                    int gk = -1, gl = -1;
                    for (size_t m : members)
                        if (comp[m] == c) {
                            if (g.adj[k][m] && gk == -1) gk = group_of(m);
                            if (g.adj[l][m] && gl == -1) gl = group_of(m);
                        }
                    if (gk != -1 && gl != -1 && gk != gl) {
                        double q = g.quality[k] + g.quality[l];
                        if (q > best_pair_q) {
                            best_pair_q = q;
                            bk = k;
                            bl = l;
                        }
                    }
                }
            }
            if (bk == n) break;  // cannot happen for a dominating set of a connected graph
            absorb(bk);
            absorb(bl);
            dsu.unite(int(bk), int(bl));
        }
    }
    return finish_set(g, members, heads, partitioned);
}

ConsensusSet select_baseline(const PvGraph& g, SelectionStrategy strategy, size_t size_n,
                             uint64_t seed) {
    if (g.size() == 0) throw std::invalid_argument("select_baseline: empty graph");
    if (size_n == 0 || size_n > g.size())
        throw std::invalid_argument("select_baseline: size_n exceeds node count");
    if (strategy == SelectionStrategy::cds) {
        return select_cds(g);
    }
    std::vector<size_t> idx(g.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (strategy == SelectionStrategy::random) {
        SplitMix64 rng(mix_seed(seed, 0xce15));
        for (size_t i = idx.size() - 1; i > 0; --i)
            std::swap(idx[i], idx[rng.below(i + 1)]);
    } else if (strategy == SelectionStrategy::capacity_only) {
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            if (g.cpu_hz[a] != g.cpu_hz[b]) return g.cpu_hz[a] > g.cpu_hz[b];
            return g.ids[a] < g.ids[b];
        });
    } else {
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            if (g.snr_sum[a] != g.snr_sum[b]) return g.snr_sum[a] > g.snr_sum[b];
            return g.ids[a] < g.ids[b];
        });
    }
    idx.resize(size_n);
    return finish_set(g, idx, idx, false);
}

bool is_dominating(const PvGraph& g, const std::vector<int>& members) {
    std::vector<uint8_t> in_set(g.size(), 0);
    for (size_t i = 0; i < g.size(); ++i)
        if (std::find(members.begin(), members.end(), g.ids[i]) != members.end()) in_set[i] = 1;
    for (size_t i = 0; i < g.size(); ++i) {
        if (in_set[i]) continue;
        bool covered = false;
        for (size_t j = 0; j < g.size() && !covered; ++j)
            if (in_set[j] && g.adj[i][j]) covered = true;
        if (!covered) return false;
    }
    return true;
}

bool is_connected_within_components(const PvGraph& g, const std::vector<int>& members) {
    std::vector<int> comp = graph_components(g);
    std::vector<size_t> midx;
    for (size_t i = 0; i < g.size(); ++i)
        if (std::find(members.begin(), members.end(), g.ids[i]) != members.end()) midx.push_back(i);
    int max_comp = comp.empty() ? -1 : *std::max_element(comp.begin(), comp.end());
    for (int c = 0; c <= max_comp; ++c) {
        std::vector<size_t> local;
        for (size_t i : midx)
            if (comp[i] == c) local.push_back(i);
        if (local.size() <= 1) continue;
        // BFS over the member-induced subgraph
        std::vector<uint8_t> seen(g.size(), 0);
        std::vector<size_t> stack{local[0]};
        seen[local[0]] = 1;
        size_t reached = 1;
        while (!stack.empty()) {
            size_t u = stack.back();
            stack.pop_back();
            for (size_t v : local)
                if (!seen[v] && g.adj[u][v]) {
                    seen[v] = 1;
                    ++reached;
                    stack.push_back(v);
                }
        }
        if (reached != local.size()) return false;
    }
    return true;
}

}  // namespace bpvec
