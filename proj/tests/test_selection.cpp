#include <algorithm>
#include <set>

#include "bpvec/selection.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bpvec;

namespace {

ParkedVehicle pv(int id, double x, double y, double f, double parked = 14400.0) {
    return {id, {x, y}, f, 24.0, parked, 9};
}

SelectionParams params_with_threshold(double snr_th) {
    SelectionParams p;
    p.snr_threshold = snr_th;
    p.snr_threshold_auto = false;
    return p;
}

SelectionParams range_params(double range_m) {
    return params_with_threshold(snr_at_distance(range_m, ChannelParams{}));
}

}  // namespace

TEST_CASE("stay filter keeps long parkers and drops short ones at 0.95") {
    ParkingMixture tbl;
    SelectionParams sp;  // p_th 0.95, horizon 1800
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 2e9, 14400.0), pv(2, 10, 0, 2e9, 1800.0),
                                   pv(3, 20, 0, 2e9, 3600.0), pv(4, 30, 0, 2e9, 10800.0)};
    // the mid vehicle: confirm its computed stay sits below the threshold
    StayProbability mid = stay_probability({3600.0, sp.horizon_s, 9}, tbl);
    CHECK(mid.value > 0.8);
    CHECK(mid.value < 0.95);
    auto kept = filter_by_stay(pvs, tbl, sp);
    std::vector<int> ids;
    for (const auto& p : kept) ids.push_back(p.id);
    CHECK(ids == std::vector<int>{1, 4});
}

TEST_CASE("a vacuous threshold keeps everyone") {
    ParkingMixture tbl;
    SelectionParams sp;
    sp.stay_threshold = 1e-12;
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 2e9, 100.0), pv(2, 1, 0, 2e9, 50000.0)};
    CHECK(filter_by_stay(pvs, tbl, sp).size() == 2);
}

TEST_CASE("raising the threshold never grows the filtered set") {
    ParkingMixture tbl;
    std::vector<ParkedVehicle> pvs;
    for (int i = 0; i < 12; ++i) pvs.push_back(pv(i + 1, i * 10.0, 0, 2e9, 900.0 * (i + 1)));
    size_t prev = pvs.size() + 1;
    for (double th : {0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99}) {
        SelectionParams sp;
        sp.stay_threshold = th;
        size_t n = filter_by_stay(pvs, tbl, sp).size();
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("two identical nodes split quality evenly") {
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 2e9), pv(2, 100, 0, 2e9)};
    PvGraph g = build_graph(pvs, ChannelParams{}, range_params(300));
    CHECK(g.quality[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.quality[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.adj[0][1] == 1);
    CHECK(g.adj[0][0] == 0);
}

TEST_CASE("zero communication weight reduces quality to capacity share") {
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 1e9), pv(2, 50, 0, 2e9), pv(3, 100, 0, 1.5e9)};
    SelectionParams sp = range_params(300);
    sp.w1 = 0.0;
    sp.w2 = 1.0;
    PvGraph g = build_graph(pvs, ChannelParams{}, sp);
    CHECK(g.quality[0] == doctest::Approx(1.0 / 4.5).epsilon(1e-12));
    CHECK(g.quality[1] == doctest::Approx(2.0 / 4.5).epsilon(1e-12));
    CHECK(g.quality[2] == doctest::Approx(1.5 / 4.5).epsilon(1e-12));
}

TEST_CASE("qualities sum to one") {
    SplitMix64 rng(0x5EED);
    std::vector<ParkedVehicle> pvs;
    for (int i = 0; i < 5; ++i)
        pvs.push_back(pv(i + 1, rng.uniform(0, 400), rng.uniform(0, 400), rng.uniform(1e9, 2.5e9)));
    PvGraph g = build_graph(pvs, ChannelParams{}, range_params(300));
    double total = 0;
    for (double q : g.quality) total += q;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j) CHECK(g.adj[i][j] == g.adj[j][i]);
}

TEST_CASE("complete graph collapses to the single best node") {
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 1.2e9), pv(2, 50, 0, 2.4e9), pv(3, 0, 50, 1.8e9),
                                   pv(4, 50, 50, 1.1e9)};
    PvGraph g = build_graph(pvs, ChannelParams{}, range_params(300));
    ConsensusSet cs = select_cds(g);
    CHECK(cs.members == std::vector<int>{2});  // highest capacity wins on a clique
    CHECK(cs.leader == 2);
    CHECK_FALSE(cs.partitioned);
}

TEST_CASE("path graph centers on the middle node") {
    // 250 m spacing: ends are out of range of each other
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 1.1e9), pv(2, 250, 0, 2.5e9), pv(3, 500, 0, 1.2e9)};
    PvGraph g = build_graph(pvs, ChannelParams{}, range_params(300));
    CHECK(g.adj[0][2] == 0);
    ConsensusSet cs = select_cds(g);
    CHECK(cs.members == std::vector<int>{2});
    CHECK(cs.leader == 2);
}

TEST_CASE("greedy cds is dominating and connected on random graphs") {
    SplitMix64 rng(0xC0FFEE);
    for (int trial = 0; trial < 100; ++trial) {
        size_t n = 8 + rng.below(33);
        PvGraph g = testsupport::random_connected_graph(n, rng);
        ConsensusSet cs = select_cds(g);
        CHECK(testsupport::check_dominating(g, cs.members));
        CHECK(testsupport::check_connected(g, cs.members));
        CHECK(cs.members.size() >= 1);
        // heads are members and the leader holds the max quality
        for (int h : cs.heads)
            CHECK(std::find(cs.members.begin(), cs.members.end(), h) != cs.members.end());
        double best = -1;
        for (size_t i = 0; i < g.size(); ++i)
            if (std::find(cs.members.begin(), cs.members.end(), g.ids[i]) != cs.members.end())
                best = std::max(best, g.quality[i]);
        for (size_t i = 0; i < g.size(); ++i)
            if (g.ids[i] == cs.leader) CHECK(g.quality[i] == best);
    }
}

TEST_CASE("selection is independent of input order") {
    SplitMix64 rng(0xDA7A);
    std::vector<ParkedVehicle> pvs;
    for (int i = 0; i < 14; ++i)
        pvs.push_back(pv(i + 1, rng.uniform(0, 500), rng.uniform(0, 500), rng.uniform(1e9, 2.5e9)));
    SelectionParams sp = range_params(280);
    PvGraph g1 = build_graph(pvs, ChannelParams{}, sp);
    std::reverse(pvs.begin(), pvs.end());
    PvGraph g2 = build_graph(pvs, ChannelParams{}, sp);
    auto m1 = select_cds(g1).members;
    auto m2 = select_cds(g2).members;
    CHECK(m1 == m2);
}

TEST_CASE("disconnected graphs yield per-component sets with a warning") {
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 2e9), pv(2, 100, 0, 1.5e9),
                                   pv(3, 5000, 0, 2.2e9), pv(4, 5100, 0, 1.1e9)};
    PvGraph g = build_graph(pvs, ChannelParams{}, range_params(300));
    ConsensusSet cs = select_cds(g);
    CHECK(cs.partitioned);
    CHECK(testsupport::check_dominating(g, cs.members));
    CHECK(testsupport::check_connected(g, cs.members));
    // one dominator per cluster
    CHECK(cs.members.size() == 2);
}

TEST_CASE("baseline strategies") {
    std::vector<ParkedVehicle> pvs{pv(1, 0, 0, 1.3e9), pv(2, 80, 0, 2.5e9), pv(3, 160, 0, 1.9e9),
                                   pv(4, 240, 0, 1.0e9)};
    PvGraph g = build_graph(pvs, ChannelParams{}, range_params(300));

    ConsensusSet fastest = select_baseline(g, SelectionStrategy::capacity_only, 1, 1);
    CHECK(fastest.members == std::vector<int>{2});

    ConsensusSet r1 = select_baseline(g, SelectionStrategy::random, 2, 99);
    ConsensusSet r2 = select_baseline(g, SelectionStrategy::random, 2, 99);
    CHECK(r1.members == r2.members);
    ConsensusSet r3 = select_baseline(g, SelectionStrategy::random, 2, 100);
    CHECK(r3.members.size() == 2);

    CHECK_THROWS_AS(select_baseline(g, SelectionStrategy::random, 9, 1), std::invalid_argument);
}

TEST_CASE("communication-only picks the hub of a star") {
    std::vector<ParkedVehicle> pvs;
    pvs.push_back(pv(1, 0, 0, 1e9));  // hub, deliberately the slowest
    for (int i = 0; i < 6; ++i) {
        double angle = i * 3.14159265358979 / 3.0;
        pvs.push_back(pv(i + 2, 250 * std::cos(angle), 250 * std::sin(angle), 2.5e9));
    }
    PvGraph g = build_graph(pvs, ChannelParams{}, range_params(260));
    // hand check: the hub's snr mass beats every leaf's
    for (size_t i = 1; i < g.size(); ++i) CHECK(g.snr_sum[0] > g.snr_sum[i]);
    ConsensusSet cs = select_baseline(g, SelectionStrategy::communication_only, 1, 5);
    CHECK(cs.members == std::vector<int>{1});
}

TEST_CASE("empty graphs are rejected") {
    CHECK_THROWS_AS(build_graph({}, ChannelParams{}, SelectionParams{}), std::invalid_argument);
    CHECK_THROWS_AS(select_cds(PvGraph{}), std::invalid_argument);
}
