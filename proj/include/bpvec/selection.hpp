#pragma once

#include <cstdint>
#include <vector>

#include "bpvec/scenario.hpp"

namespace bpvec {

// SNR-threshold adjacency over the stay-filtered vehicles, plus the
// per-node quality score mixing normalized SNR mass and capacity share.
struct PvGraph {
    std::vector<int> ids;                       // vehicle ids, index-aligned
    std::vector<Vec2> positions;
    std::vector<double> cpu_hz;
    std::vector<std::vector<uint8_t>> adj;      // symmetric, zero diagonal
    std::vector<double> snr_sum;                // sum of SNR to other nodes
    std::vector<double> quality;                // Q_k, sums to 1 when w1+w2=1

    size_t size() const { return ids.size(); }
};

struct ConsensusSet {
    std::vector<int> members;  // vehicle ids
    std::vector<int> heads;    // dominators (subset of members)
    int leader = -1;           // member with max quality
    bool partitioned = false;  // filtered graph was disconnected
};

// Vehicles whose stay probability over the selection horizon clears the
// threshold; preserves input order.
std::vector<ParkedVehicle> filter_by_stay(const std::vector<ParkedVehicle>& pvs,
                                          const ParkingMixture& parking,
                                          const SelectionParams& params);

PvGraph build_graph(const std::vector<ParkedVehicle>& eligible, const ChannelParams& ch,
                    const SelectionParams& params);

// Greedy connected-dominating-set extraction: quality-ordered head sweep,
// then connector insertion until the members induce a connected subgraph
// per component. Deterministic; ties break toward the lower id.
ConsensusSet select_cds(const PvGraph& g);

ConsensusSet select_baseline(const PvGraph& g, SelectionStrategy strategy, size_t size_n,
                             uint64_t seed);

// Predicates used by tests and sanity checks.
bool is_dominating(const PvGraph& g, const std::vector<int>& members);
bool is_connected_within_components(const PvGraph& g, const std::vector<int>& members);

}  // namespace bpvec
