#include "bpvec/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bpvec/channel.hpp"
#include "bpvec/rng.hpp"
#include "json.hpp"

namespace bpvec {

ConsensusInstance pv_committee(const ScenarioConfig& cfg, const PvGraph& g, const ConsensusSet& set) {
    ConsensusInstance inst;
    inst.kappa = cfg.costs.cap_switch_vehicle;
    inst.block_bits = cfg.costs.block_bits;
    inst.tx_per_block = cfg.costs.tx_per_block();
    std::vector<size_t> idx;
    for (int id : set.members) {
        auto it = std::find(g.ids.begin(), g.ids.end(), id);
        if (it == g.ids.end()) throw std::invalid_argument("pv_committee: member not in graph");
        idx.push_back(static_cast<size_t>(it - g.ids.begin()));
    }
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (g.quality[a] != g.quality[b]) return g.quality[a] > g.quality[b];
        return g.ids[a] < g.ids[b];
    });
    for (size_t i : idx) inst.nodes.push_back({g.ids[i], g.positions[i], g.cpu_hz[i]});
    return inst;
}

ConsensusInstance rsu_committee(const ScenarioConfig& cfg, size_t max_nodes) {
    ConsensusInstance inst;
    inst.kappa = cfg.costs.cap_switch_rsu;
    inst.block_bits = cfg.costs.rsu_block_bits;
    inst.tx_per_block = cfg.costs.rsu_tx_per_block();
    std::vector<size_t> idx(cfg.rsus.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (cfg.rsus[a].cpu_hz != cfg.rsus[b].cpu_hz) return cfg.rsus[a].cpu_hz > cfg.rsus[b].cpu_hz;
        return cfg.rsus[a].id < cfg.rsus[b].id;
    });
    if (max_nodes > 0 && max_nodes < idx.size()) idx.resize(max_nodes);
    for (size_t i : idx) inst.nodes.push_back({cfg.rsus[i].id, cfg.rsus[i].pos, cfg.rsus[i].cpu_hz});
    return inst;
}

double phase_cycles_ratio(Role role, Phase phase, double beta, double theta, double tx_per_block,
                          int byzantine_f) {
    if (byzantine_f < 0) throw std::invalid_argument("phase_cycles: negative F");
    double quorum = 2.0 * byzantine_f + 1.0;
    if (role == Role::leader) {
        switch (phase) {
            case Phase::new_view: return tx_per_block * (beta + theta) + beta + quorum * theta;
            case Phase::prepare: return beta + theta;
            case Phase::pre_commit:
            case Phase::commit:
            case Phase::decide: return 2.0 * beta + quorum * theta;
        }
    } else {
        switch (phase) {
            case Phase::new_view: return beta + theta;
            case Phase::prepare: return 2.0 * beta + 2.0 * theta + tx_per_block * (beta + theta);
            case Phase::pre_commit:
            case Phase::commit: return 2.0 * beta + 2.0 * theta;
            case Phase::decide: return 0.0;
        }
    }
    return 0.0;
}

double phase_cycles(Role role, Phase phase, const ConsensusCostParams& costs, int byzantine_f) {
    return phase_cycles_ratio(role, phase, costs.sig_cycles, costs.mac_cycles, costs.tx_per_block(),
                              byzantine_f);
}

namespace {

double role_cycles(Role role, double beta, double theta, double ratio, int f) {
    double total = 0.0;
    for (Phase p : {Phase::new_view, Phase::prepare, Phase::pre_commit, Phase::commit, Phase::decide}) {
        if (role == Role::replica && p == Phase::decide) continue;
        total += phase_cycles_ratio(role, p, beta, theta, ratio, f);
    }
    return total;
}

}  // namespace

double consensus_compute_energy(const ConsensusInstance& inst, const ConsensusCostParams& costs) {
    if (inst.nodes.empty()) throw std::invalid_argument("consensus_compute_energy: empty committee");
    int f = inst.byzantine_capacity();
    double beta = costs.sig_cycles, theta = costs.mac_cycles;
    const CommitteeNode& leader = inst.nodes[0];
    double e = inst.kappa * leader.cpu_hz * leader.cpu_hz *
               role_cycles(Role::leader, beta, theta, inst.tx_per_block, f);
    double replica_sum = role_cycles(Role::replica, beta, theta, inst.tx_per_block, f);
    for (size_t i = 1; i < inst.nodes.size(); ++i)
        e += inst.kappa * inst.nodes[i].cpu_hz * inst.nodes[i].cpu_hz * replica_sum;
    return e;
}

double consensus_tx_energy(const ConsensusInstance& inst, const ChannelParams& ch,
                           const ConsensusCostParams& costs) {
    if (inst.nodes.empty()) throw std::invalid_argument("consensus_tx_energy: empty committee");
    (void)costs;
    const CommitteeNode& leader = inst.nodes[0];
    double e = 0.0;
    for (size_t i = 1; i < inst.nodes.size(); ++i) {
        double up = mbps_to_bps(rate_mbps(inst.nodes[i].pos, leader.pos, ch));
        double down = mbps_to_bps(rate_mbps(leader.pos, inst.nodes[i].pos, ch));
        if (up <= 0.0 || down <= 0.0)
            throw std::runtime_error("consensus_tx_energy: zero rate on a committee link");
        e += 4.0 * inst.block_bits / up * ch.tx_power_w;
        e += 4.0 * inst.block_bits / down * ch.tx_power_w;
    }
    return e;
}

double consensus_total_energy(double n_rvs, const ConsensusInstance& inst, const ChannelParams& ch,
                              const ConsensusCostParams& costs) {
    if (n_rvs < 0) throw std::invalid_argument("consensus_total_energy: negative request count");
    if (n_rvs == 0) return 0.0;
    double per_block = consensus_compute_energy(inst, costs) + consensus_tx_energy(inst, ch, costs);
    return n_rvs / inst.tx_per_block * per_block;
}

double pbft_baseline_energy(const ConsensusInstance& inst, const ChannelParams& ch,
                            const ConsensusCostParams& costs, double n_rvs) {
    if (inst.nodes.empty()) throw std::invalid_argument("pbft_baseline_energy: empty committee");
    if (n_rvs < 0) throw std::invalid_argument("pbft_baseline_energy: negative request count");
    int f = inst.byzantine_capacity();
    double beta = costs.sig_cycles, theta = costs.mac_cycles;
    double quorum = 2.0 * f + 1.0;
    double ratio = inst.tx_per_block;
    // Leader: verify block txs, sign pre-prepare, verify quorum votes in
    // prepare and commit plus its own two vote signatures, then sign one
    // client reply per transaction. Replicas add the pre-prepare check.
    double leader_cycles = ratio * (beta + theta) + beta + 2.0 * quorum * (beta + theta) +
                           2.0 * beta + ratio * beta;
    double replica_cycles = ratio * (beta + theta) + (beta + theta) + 2.0 * quorum * (beta + theta) +
                            2.0 * beta + ratio * beta;
    const CommitteeNode& leader = inst.nodes[0];
    double compute = inst.kappa * leader.cpu_hz * leader.cpu_hz * leader_cycles;
    double tx = 0.0;
    for (size_t i = 1; i < inst.nodes.size(); ++i) {
        compute += inst.kappa * inst.nodes[i].cpu_hz * inst.nodes[i].cpu_hz * replica_cycles;
        double down = mbps_to_bps(rate_mbps(leader.pos, inst.nodes[i].pos, ch));
        if (down <= 0.0) throw std::runtime_error("pbft_baseline_energy: zero rate on a committee link");
        tx += inst.block_bits / down * ch.tx_power_w;
    }
    return n_rvs / ratio * (compute + tx);
}

// --- discrete-event protocol run -----------------------------------------

FaultPlan make_fault_plan(const ConsensusInstance& inst, std::vector<int> byzantine_ids,
                          ByzBehavior behavior, std::vector<uint64_t> leader_failures) {
    std::set<int> uniq(byzantine_ids.begin(), byzantine_ids.end());
    if (static_cast<int>(uniq.size()) > inst.byzantine_capacity())
        throw std::invalid_argument("fault plan: byzantine nodes exceed floor((N-1)/3)");
    for (int id : uniq) {
        bool found = false;
        for (const auto& nd : inst.nodes) found = found || nd.id == id;
        if (!found) throw std::invalid_argument("fault plan: unknown node id");
    }
    FaultPlan p;
    p.byzantine_ids.assign(uniq.begin(), uniq.end());
    p.behavior = behavior;
    p.leader_failures = std::move(leader_failures);
    return p;
}

namespace {

struct Block {
    uint64_t parent = 0;
    uint64_t height = 0;
    uint64_t view = 0;
};

struct Msg {
    uint64_t view = 0;
    Phase phase = Phase::new_view;
    bool is_vote = false;
    int from = -1;
    uint64_t block = 0;     // proposal target or vote target
    uint64_t qc_block = 0;  // attached justify QC
    uint64_t qc_view = 0;
    bool valid = true;
    double bits = 0.0;
};

struct Event {
    double t = 0.0;
    uint64_t seq = 0;
    bool is_timeout = false;
    int node = -1;
    uint64_t view = 0;  // timeout view
    Msg msg;
};

struct EventCmp {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct NodeState {
    uint64_t view = 0;
    uint64_t prepare_qc_view = 0, prepare_qc_block = 0;
    uint64_t locked_view = 0, locked_block = 0;
    uint64_t voted_prepare_view = 0, voted_precommit_view = 0, voted_commit_view = 0;
    double last_progress = 0.0;
};

struct LeaderTally {
    uint64_t view = 0;
    std::set<int> new_views;
    uint64_t best_qc_view = 0, best_qc_block = 0;
    bool proposed = false;
    uint64_t proposal = 0;
    std::map<uint64_t, std::set<int>> votes[3];  // prepare / pre_commit / commit by block
    bool qc_formed[3] = {false, false, false};
};

class Sim {
  public:
    Sim(const ConsensusInstance& inst, const FaultPlan& plan, const LatencyModel& net,
        const ChannelParams& ch, const ConsensusCostParams& costs, int rounds, uint64_t seed)
        : inst_(inst), net_(net), ch_(ch), costs_(costs), rounds_(rounds), rng_(seed) {
        n_ = inst.nodes.size();
        f_ = inst.byzantine_capacity();
        quorum_ = 2 * f_ + 1;
        timeout_s_ = 4.0 * (net.base_s + net.jitter_s);
        byz_.assign(n_, false);
        for (int id : plan.byzantine_ids)
            for (size_t i = 0; i < n_; ++i)
                if (inst.nodes[i].id == id) byz_[i] = true;
        behavior_ = plan.behavior;
        failed_views_.insert(plan.leader_failures.begin(), plan.leader_failures.end());
        blocks_.push_back({0, 0, 0});  // genesis
        states_.resize(n_);
        run_.n = n_;
        run_.f_max = f_;
    }

    ConsensusRun run() {
        size_t silent = 0;
        if (behavior_ == ByzBehavior::silent)
            for (bool b : byz_) silent += b ? 1 : 0;
        size_t active = n_ - silent;
        auto done = [&]() {
            size_t finished = 0;
            for (size_t i = 0; i < n_; ++i) {
                auto it = commits_.find(i);
                if (it != commits_.end() &&
                    static_cast<int>(it->second.size()) >= rounds_)
                    ++finished;
            }
            return finished >= active;
        };
        for (size_t i = 0; i < n_; ++i) enter_view(i, 1, 0.0);
        uint64_t max_view_budget = static_cast<uint64_t>(rounds_) * 4 + 16;
        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.t;
            if (done()) break;
            if (highest_view_ > max_view_budget) break;
            if (ev.is_timeout) on_timeout(ev.node, ev.view);
            else on_deliver(ev.node, ev.msg);
        }
        for (size_t i = 0; i < n_; ++i)
            run_.committed[inst_.nodes[i].id] =
                std::map<uint64_t, uint64_t>(commits_[i].begin(), commits_[i].end());
        return std::move(run_);
    }

  private:
    size_t leader_of(uint64_t view) const { return static_cast<size_t>((view - 1) % n_); }

    bool leader_silent(uint64_t view) const {
        size_t l = leader_of(view);
        return (byz_[l] && behavior_ == ByzBehavior::silent) || failed_views_.count(view) > 0;
    }

    void trace(const char* kind, uint64_t view, int node, int peer, std::string detail,
               double bits = 0.0) {
        run_.events.push_back({now_, kind, view, node, peer, std::move(detail), bits});
    }

    void charge(size_t node, Role role, Phase phase) {
        double cycles = phase_cycles_ratio(role, phase, costs_.sig_cycles, costs_.mac_cycles,
                                           inst_.tx_per_block, f_);
        if (cycles == 0.0) return;
        auto pi = static_cast<size_t>(phase);
        if (role == Role::leader) run_.ledger.leader_cycles[pi] += cycles;
        else run_.ledger.replica_cycles[inst_.nodes[node].id][pi] += cycles;
        run_.ledger.compute_j += cycles * inst_.kappa * inst_.nodes[node].cpu_hz * inst_.nodes[node].cpu_hz;
    }

    void send(size_t from, size_t to, Msg m) {
        if (byz_[from] && behavior_ == ByzBehavior::silent) return;
        m.from = static_cast<int>(from);
        double latency = from == to ? 0.0 : net_.base_s + net_.jitter_s * rng_.u01();
        // only block-bearing transfers count toward transmission energy
        if (from != to && m.bits >= inst_.block_bits) {
            double bps = mbps_to_bps(rate_mbps(inst_.nodes[from].pos, inst_.nodes[to].pos, ch_));
            run_.ledger.tx_j += m.bits / bps * ch_.tx_power_w;
        }
        trace("send", m.view, int(from), int(to), phase_name(m.phase, m.is_vote), m.bits);
        queue_.push({now_ + latency, seq_++, false, static_cast<int>(to), 0, m});
    }

    void broadcast(size_t from, const Msg& proto) {
        for (size_t i = 0; i < n_; ++i)
            if (i != from) send(from, i, proto);
    }

    static std::string phase_name(Phase p, bool vote) {
        static const char* names[5] = {"new_view", "prepare", "pre_commit", "commit", "decide"};
        std::string s = names[static_cast<size_t>(p)];
        return vote ? "vote_" + s : s;
    }

    void enter_view(size_t node, uint64_t view, double at) {
        NodeState& st = states_[node];
        if (view <= st.view) return;
        st.view = view;
        st.last_progress = at;
        highest_view_ = std::max(highest_view_, view);
        if (views_seen_.insert(view).second)
            run_.views.push_back({view, inst_.nodes[leader_of(view)].id, false, 0});
        if (byz_[node] && behavior_ == ByzBehavior::silent) return;
        // announce the view with the highest prepare QC we know
        Msg nv;
        nv.view = view;
        nv.phase = Phase::new_view;
        nv.qc_block = st.prepare_qc_block;
        nv.qc_view = st.prepare_qc_view;
        nv.bits = costs_.vote_bits;
        if (node != leader_of(view)) charge(node, Role::replica, Phase::new_view);
        send(node, leader_of(view), nv);
        schedule_timeout(node, view);
    }

    void schedule_timeout(size_t node, uint64_t view) {
        queue_.push({now_ + timeout_s_, seq_++, true, static_cast<int>(node), view, {}});
    }

    void on_timeout(int node_i, uint64_t view) {
        size_t node = static_cast<size_t>(node_i);
        NodeState& st = states_[node];
        if (st.view != view) return;  // moved on already
        if (now_ - st.last_progress < timeout_s_ - 1e-12) {
            queue_.push({st.last_progress + timeout_s_, seq_++, true, node_i, view, {}});
            return;
        }
        trace("timeout", view, node_i, -1, "view expired");
        trace("view_change", view + 1, node_i, -1, "");
        enter_view(node, view + 1, now_);
    }

    void progress(size_t node) { states_[node].last_progress = now_; }

    LeaderTally& tally(uint64_t view) {
        auto [it, fresh] = tallies_.try_emplace(view);
        if (fresh) it->second.view = view;
        return it->second;
    }

    uint64_t new_block(uint64_t parent, uint64_t view) {
        blocks_.push_back({parent, blocks_[parent].height + 1, view});
        return blocks_.size() - 1;
    }

    bool extends(uint64_t b, uint64_t ancestor) const {
        while (b != 0) {
            if (b == ancestor) return true;
            b = blocks_[b].parent;
        }
        return ancestor == 0;
    }

    void commit_chain(size_t node, uint64_t block) {
        std::vector<uint64_t> chain;
        for (uint64_t b = block; b != 0; b = blocks_[b].parent) {
            if (commits_[node].count(blocks_[b].height)) break;
            chain.push_back(b);
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            uint64_t h = blocks_[*it].height;
            commits_[node][h] = *it;
            committed_heights_.insert(h);
            run_.commits = static_cast<int>(committed_heights_.size());
            trace("commit", blocks_[*it].view, int(node), -1,
                  "height=" + std::to_string(h) + " block=" + std::to_string(*it));
            for (auto& vr : run_.views)
                if (vr.view == blocks_[*it].view) {
                    vr.committed = true;
                    vr.block = *it;
                }
        }
    }

    void record_cert(uint64_t view, uint64_t block, Phase phase, const std::set<int>& voters) {
        QuorumCert qc;
        qc.view = view;
        qc.block = block;
        qc.phase = phase;
        for (int v : voters) qc.voters.push_back(inst_.nodes[static_cast<size_t>(v)].id);
        run_.certs.push_back(std::move(qc));
    }

    void on_deliver(int node_i, const Msg& m) {
        size_t node = static_cast<size_t>(node_i);
        trace("deliver", m.view, m.from, node_i, phase_name(m.phase, m.is_vote), m.bits);
        if (byz_[node] && behavior_ == ByzBehavior::silent) return;
        NodeState& st = states_[node];
        if (m.view > st.view && !m.is_vote && m.phase != Phase::new_view)
            enter_view(node, m.view, now_);  // catch up with the network

        if (m.phase == Phase::new_view && !m.is_vote) return leader_collect_new_view(node, m);
        if (m.is_vote) return leader_collect_vote(node, m);
        replica_handle(node, m);
    }

    void leader_collect_new_view(size_t node, const Msg& m) {
        if (leader_of(m.view) != node || m.view < states_[node].view) return;
        LeaderTally& t = tally(m.view);
        t.new_views.insert(m.from);
        if (m.qc_view > t.best_qc_view) {
            t.best_qc_view = m.qc_view;
            t.best_qc_block = m.qc_block;
        }
        maybe_propose(node, m.view);
    }

    void maybe_propose(size_t node, uint64_t view) {
        LeaderTally& t = tally(view);
        if (t.proposed || static_cast<int>(t.new_views.size()) < quorum_) return;
        if (states_[node].view != view) return;
        if (leader_silent(view)) return;
        t.proposed = true;
        charge(node, Role::leader, Phase::new_view);
        trace("phase", view, int(node), -1, "new_view quorum");
        trace("phase", view, int(node), -1, "prepare proposal");
        progress(node);
        uint64_t parent = t.best_qc_block;
        if (byz_[node] && behavior_ == ByzBehavior::equivocate) {
            uint64_t a = new_block(parent, view);
            uint64_t b = new_block(parent, view);
            t.proposal = a;
            charge(node, Role::leader, Phase::prepare);
            for (size_t i = 0; i < n_; ++i) {
                if (i == node) continue;
                Msg p;
                p.view = view;
                p.phase = Phase::prepare;
                p.block = i % 2 == 0 ? a : b;
                p.qc_block = t.best_qc_block;
                p.qc_view = t.best_qc_view;
                p.bits = inst_.block_bits;
                send(node, i, p);
            }
        } else {
            t.proposal = new_block(parent, view);
            charge(node, Role::leader, Phase::prepare);
            Msg p;
            p.view = view;
            p.phase = Phase::prepare;
            p.block = t.proposal;
            p.qc_block = t.best_qc_block;
            p.qc_view = t.best_qc_view;
            p.bits = inst_.block_bits;
            broadcast(node, p);
            // the leader votes for its own proposal; no extra cost is charged
            Msg self = p;
            self.is_vote = true;
            send(node, node, self);
        }
    }

    void leader_collect_vote(size_t node, const Msg& m) {
        if (leader_of(m.view) != node) return;
        if (!m.valid) return;  // invalid signature: discarded after the check
        LeaderTally& t = tally(m.view);
        size_t pi;
        Phase next;
        switch (m.phase) {
            case Phase::prepare: pi = 0; next = Phase::pre_commit; break;
            case Phase::pre_commit: pi = 1; next = Phase::commit; break;
            case Phase::commit: pi = 2; next = Phase::decide; break;
            default: return;
        }
        if (m.block >= blocks_.size() || m.block != t.proposal) return;  // equivocated vote
        auto& voters = t.votes[pi][m.block];
        voters.insert(m.from);
        if (t.qc_formed[pi] || static_cast<int>(voters.size()) < quorum_) return;
        if (states_[node].view != m.view) return;
        t.qc_formed[pi] = true;
        record_cert(m.view, m.block, m.phase, voters);
        charge(node, Role::leader, next);
        trace("phase", m.view, int(node), -1, phase_name(next, false) + " quorum");
        progress(node);
        if (m.phase == Phase::prepare) {
            NodeState& st = states_[node];
            st.prepare_qc_view = m.view;
            st.prepare_qc_block = m.block;
        }
        Msg out;
        out.view = m.view;
        out.phase = next;
        out.block = m.block;
        out.qc_block = m.block;
        out.qc_view = m.view;
        out.bits = inst_.block_bits;
        broadcast(node, out);
        if (next == Phase::decide) {
            commit_chain(node, m.block);
            enter_view(node, m.view + 1, now_);
        } else {
            Msg self = out;
            self.is_vote = true;
            self.phase = next;
            send(node, node, self);
        }
    }

    void replica_handle(size_t node, const Msg& m) {
        NodeState& st = states_[node];
        if (m.view != st.view || leader_of(m.view) != static_cast<size_t>(m.from)) return;
        progress(node);
        switch (m.phase) {
            case Phase::prepare: {
                if (st.voted_prepare_view >= m.view) return;
                // safety rule: extend the locked block or show a newer QC
                if (!(extends(m.block, st.locked_block) || m.qc_view > st.locked_view)) return;
                st.voted_prepare_view = m.view;
                charge(node, Role::replica, Phase::prepare);
                vote(node, m, Phase::prepare);
                break;
            }
            case Phase::pre_commit: {
                if (st.voted_precommit_view >= m.view) return;
                st.voted_precommit_view = m.view;
                st.prepare_qc_view = m.qc_view;
                st.prepare_qc_block = m.qc_block;
                charge(node, Role::replica, Phase::pre_commit);
                vote(node, m, Phase::pre_commit);
                break;
            }
            case Phase::commit: {
                if (st.voted_commit_view >= m.view) return;
                st.voted_commit_view = m.view;
                st.locked_view = m.qc_view;
                st.locked_block = m.qc_block;
                charge(node, Role::replica, Phase::commit);
                vote(node, m, Phase::commit);
                break;
            }
            case Phase::decide: {
                commit_chain(node, m.block);
                enter_view(node, m.view + 1, now_);
                break;
            }
            default: break;
        }
    }

    void vote(size_t node, const Msg& m, Phase phase) {
        Msg v;
        v.view = m.view;
        v.phase = phase;
        v.is_vote = true;
        v.block = m.block;
        v.bits = costs_.vote_bits;
        if (byz_[node]) {
            if (behavior_ == ByzBehavior::equivocate) v.block = m.block ^ 0x8000000000000000ULL;
            if (behavior_ == ByzBehavior::vote_invalid) v.valid = false;
        }
        send(node, leader_of(m.view), v);
    }

    const ConsensusInstance& inst_;
    LatencyModel net_;
    ChannelParams ch_;
    ConsensusCostParams costs_;
    int rounds_;
    SplitMix64 rng_;
    size_t n_ = 0;
    int f_ = 0;
    int quorum_ = 1;
    double timeout_s_ = 0.0;
    double now_ = 0.0;
    uint64_t seq_ = 0;
    uint64_t highest_view_ = 1;
    ByzBehavior behavior_ = ByzBehavior::silent;
    std::vector<bool> byz_;
    std::set<uint64_t> failed_views_;
    std::vector<Block> blocks_;
    std::vector<NodeState> states_;
    std::map<uint64_t, LeaderTally> tallies_;
    std::map<size_t, std::map<uint64_t, uint64_t>> commits_;
    std::set<uint64_t> committed_heights_;
    std::set<uint64_t> views_seen_;
    std::priority_queue<Event, std::vector<Event>, EventCmp> queue_;
    ConsensusRun run_;
};

}  // namespace

ConsensusRun run_consensus(const ConsensusInstance& inst, const FaultPlan& plan,
                           const LatencyModel& net, const ChannelParams& ch,
                           const ConsensusCostParams& costs, int rounds, uint64_t seed) {
    if (inst.nodes.empty()) throw std::invalid_argument("run_consensus: empty committee");
    if (rounds < 1) throw std::invalid_argument("run_consensus: rounds must be >= 1");
    Sim sim(inst, plan, net, ch, costs, rounds, seed);
    return sim.run();
}

void write_trace_jsonl(const ConsensusRun& run, std::ostream& out) {
    using nlohmann::json;
    for (const auto& e : run.events) {
        json j = {{"t", e.t},       {"kind", e.kind},     {"view", e.view},
                  {"node", e.node}, {"peer", e.peer},     {"detail", e.detail},
                  {"bits", e.payload_bits}};
        out << j.dump() << "\n";
    }
}

std::string ledger_csv_header() {
    return "label,n,f,views,commits,leader_cycles,replica_cycles,compute_j,tx_j,total_j";
}

std::string ledger_csv_row(const std::string& label, const ConsensusRun& run) {
    double leader = 0.0, replica = 0.0;
    for (double c : run.ledger.leader_cycles) leader += c;
    for (const auto& [id, arr] : run.ledger.replica_cycles)
        for (double c : arr) replica += c;
    std::ostringstream os;
    os << label << "," << run.n << "," << run.f_max << "," << run.views.size() << "," << run.commits
       << "," << leader << "," << replica << "," << run.ledger.compute_j << "," << run.ledger.tx_j
       << "," << run.ledger.total_j();
    return os.str();
}

}  // namespace bpvec
