#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bpvec/scenario.hpp"
#include "bpvec/selection.hpp"

namespace bpvec {

enum class Phase { new_view = 0, prepare = 1, pre_commit = 2, commit = 3, decide = 4 };
enum class Role { leader, replica };

// A committee bound to its chain constants. Nodes are kept in quality
// order (descending); index 0 is the first-view leader and views rotate
// round-robin through this order.
struct CommitteeNode {
    int id = 0;
    Vec2 pos;
    double cpu_hz = 0.0;
};

struct ConsensusInstance {
    std::vector<CommitteeNode> nodes;
    double kappa = 1e-27;      // capacitive switching coefficient
    double block_bits = 0.0;   // chain block size
    double tx_per_block = 1.0; // block size over mean transaction size

    size_t size() const { return nodes.size(); }
    int byzantine_capacity() const { return nodes.empty() ? 0 : int((nodes.size() - 1) / 3); }
};

// Committee builders: PV subchain committees come from a selection result,
// the RSU main chain runs over RSUs directly (quality order = capacity).
ConsensusInstance pv_committee(const ScenarioConfig& cfg, const PvGraph& g, const ConsensusSet& set);
ConsensusInstance rsu_committee(const ScenarioConfig& cfg, size_t max_nodes = 0);

// CPU cycles one node spends in one protocol phase. F is the number of
// tolerated Byzantine nodes (quorums are 2F+1).
double phase_cycles(Role role, Phase phase, const ConsensusCostParams& costs, int byzantine_f);
// Same with an explicit transactions-per-block ratio (for the RSU chain).
double phase_cycles_ratio(Role role, Phase phase, double sig_cycles, double mac_cycles,
                          double tx_per_block, int byzantine_f);

// Signature/MAC energy over one consensus round: leader runs all five
// phases, replicas all but decide.
double consensus_compute_energy(const ConsensusInstance& inst, const ConsensusCostParams& costs);

// Block-transfer energy: four block-bearing rounds in each direction per
// replica, at the pairwise channel rates.
double consensus_tx_energy(const ConsensusInstance& inst, const ChannelParams& ch,
                           const ConsensusCostParams& costs);

// Total consensus energy charged to n_rvs requests, amortized over the
// transactions per block. n_rvs = 1 gives the per-request share.
double consensus_total_energy(double n_rvs, const ConsensusInstance& inst, const ChannelParams& ch,
                              const ConsensusCostParams& costs);

// Three-phase all-to-all PBFT cost baseline under the same constants:
// every node verifies 2F+1 votes in prepare and commit, the block travels
// leader->replicas once, and each node signs per-transaction client
// replies. Vote messages are excluded from energy like everywhere else.
double pbft_baseline_energy(const ConsensusInstance& inst, const ChannelParams& ch,
                            const ConsensusCostParams& costs, double n_rvs);

// --- executable protocol -------------------------------------------------

enum class ByzBehavior { silent, equivocate, vote_invalid };

struct FaultPlan {
    std::vector<int> byzantine_ids;
    ByzBehavior behavior = ByzBehavior::silent;
    std::vector<uint64_t> leader_failures;  // views whose leader stays silent
};

// Validates |byzantine| <= floor((N-1)/3) against the committee.
FaultPlan make_fault_plan(const ConsensusInstance& inst, std::vector<int> byzantine_ids,
                          ByzBehavior behavior, std::vector<uint64_t> leader_failures = {});

struct LatencyModel {
    double base_s = 0.002;
    double jitter_s = 0.0;
};

struct QuorumCert {
    uint64_t view = 0;
    uint64_t block = 0;
    Phase phase = Phase::prepare;
    std::vector<int> voters;  // distinct node ids, >= 2F+1
};

struct TraceEvent {
    double t = 0.0;
    std::string kind;  // send / deliver / phase / commit / view_change / timeout
    uint64_t view = 0;
    int node = -1;
    int peer = -1;
    std::string detail;
    double payload_bits = 0.0;
};

struct ViewRecord {
    uint64_t view = 0;
    int leader_id = -1;
    bool committed = false;
    uint64_t block = 0;
};

struct CostLedger {
    std::array<double, 5> leader_cycles{};             // by phase
    std::map<int, std::array<double, 5>> replica_cycles;
    double compute_j = 0.0;
    double tx_j = 0.0;
    double total_j() const { return compute_j + tx_j; }
};

struct ConsensusRun {
    size_t n = 0;
    int f_max = 0;
    std::vector<ViewRecord> views;
    std::vector<QuorumCert> certs;
    std::vector<TraceEvent> events;
    // node id -> block id by commit height (height starts at 1)
    std::map<int, std::map<uint64_t, uint64_t>> committed;
    CostLedger ledger;
    int commits = 0;  // distinct heights committed by at least one node
};

// Deterministic discrete-event run of the five-phase protocol over the
// committee; stops once `rounds` heights commit or the view budget runs out.
ConsensusRun run_consensus(const ConsensusInstance& inst, const FaultPlan& plan,
                           const LatencyModel& net, const ChannelParams& ch,
                           const ConsensusCostParams& costs, int rounds, uint64_t seed);

void write_trace_jsonl(const ConsensusRun& run, std::ostream& out);
std::string ledger_csv_header();
std::string ledger_csv_row(const std::string& label, const ConsensusRun& run);

}  // namespace bpvec
