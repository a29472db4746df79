#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fake_host.hpp"
#include "mmroute/routing_bcp.hpp"

using namespace mmr;
using namespace mmr::bcp;
using mmr::testing::FakeHost;

namespace {

NeighborEstimate heard(std::uint32_t q, double rate, SimTime when = SimTime{})
{
    NeighborEstimate n;
    n.q_remote = q;
    n.rate_est = rate;
    n.last_hello_at = when;
    n.heard = true;
    return n;
}

// Reference argmax written out longhand: weight, strict positivity, lowest id on ties.
std::optional<NodeId> oracle_choice(const BackpressureState& s, SimTime now)
{
    std::optional<NodeId> best;
    double best_w = 0.0;
    for (const auto& [j, n] : s.neighbors) {
        if (!n.heard || n.link_down || n.rate_est <= 0.0 || now - n.last_hello_at > s.hello_interval * 3)
            continue;
        const double w = (double(s.q_local) - double(n.q_remote) - s.v * n.etx.etx()) * n.rate_est;
        if (w > best_w || (best && w == best_w && j < *best)) {
            best = j;
            best_w = w;
        }
    }
    return best;
}

BcpConfig config_with(Duration hello)
{
    BcpConfig c;
    c.hello_interval = hello;
    return c;
}

}  // namespace

TEST_CASE("link weight")
{
    BackpressureState s;
    s.q_local = 25;
    s.neighbors[4] = heard(2, 4.62e9);
    CHECK(compute_weight(s, 4) == doctest::Approx(21 * 4.62e9));
    s.neighbors[4].q_remote = 23;
    CHECK(compute_weight(s, 4) == 0.0);
    s.q_local = 0;
    CHECK(compute_weight(s, 4) < 0.0);
}

TEST_CASE("next-hop selection examples")
{
    BackpressureState s;
    s.q_local = 10;
    s.neighbors[4] = heard(3, 1e9);
    s.neighbors[1] = heard(9, 1e9);

    SUBCASE("largest weight wins")
    {
        const Decision d = select_next_hop(s, SimTime{});
        REQUIRE(d.candidates.size() == 2);
        CHECK(d.candidates[0].weight == doctest::Approx(-1e9));
        CHECK(d.candidates[1].weight == doctest::Approx(5e9));
        CHECK(d.chosen == NodeId{4});
    }
    SUBCASE("hold when nothing is positive")
    {
        s.q_local = 2;
        CHECK_FALSE(select_next_hop(s, SimTime{}).chosen.has_value());
    }
    SUBCASE("ties go to the lowest id")
    {
        s.neighbors[1].q_remote = 3;
        CHECK(select_next_hop(s, SimTime{}).chosen == NodeId{1});
    }
    SUBCASE("stale and downed neighbors are not candidates")
    {
        s.neighbors[1] = heard(0, 1e9);
        CHECK(select_next_hop(s, at(whole_seconds(3))).chosen == NodeId{1});
        s.neighbors[4].last_hello_at = at(whole_seconds(3));
        CHECK(select_next_hop(s, at(milliseconds(3001))).chosen == NodeId{4});
        s.neighbors[4].link_down = true;
        CHECK_FALSE(select_next_hop(s, at(milliseconds(3001))).chosen.has_value());
    }
    SUBCASE("after blockage the faster direct link beats the relay")
    {
        s.q_local = 400;
        s.neighbors.clear();
        s.neighbors[1] = heard(0, 4620e6);
        s.neighbors[4] = heard(0, 3850e6);
        CHECK(select_next_hop(s, SimTime{}).chosen == NodeId{1});
        s.neighbors[4].q_remote = 250;
        CHECK(select_next_hop(s, SimTime{}).chosen == NodeId{1});
    }
}

TEST_CASE("selection matches an argmax oracle on 1000 random instances")
{
    RngStream rng(11, "bcp-argmax");
    const auto table = phy::default_rate_table();
    int holds = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        BackpressureState s;
        s.q_local = static_cast<std::uint32_t>(rng.uniform() * 200);
        s.v = rng.uniform() * 5;
        const SimTime now = at(whole_seconds(5));
        const int degree = 1 + static_cast<int>(rng.uniform() * 6);
        for (int k = 0; k < degree; ++k) {
            const NodeId j = 1 + static_cast<NodeId>(rng.uniform() * 10);
            const auto& tier = table.tiers()[static_cast<std::size_t>(rng.uniform() * table.tiers().size())];
            NeighborEstimate n = heard(static_cast<std::uint32_t>(rng.uniform() * 200), tier.rate_bps,
                                       now - milliseconds(static_cast<std::int64_t>(rng.uniform() * 4000)));
            const int updates = static_cast<int>(rng.uniform() * 5);
            for (int u = 0; u < updates; ++u)
                n.etx.update(rng.uniform() < 0.7);
            n.link_down = rng.uniform() < 0.1;
            s.neighbors[j] = n;
        }
        const Decision d = select_next_hop(s, now);
        CHECK(d.chosen == oracle_choice(s, now));
        if (d.chosen) {
            for (const auto& c : d.candidates)
                if (c.neighbor == *d.chosen)
                    CHECK(c.weight > 0.0);
        } else {
            ++holds;
        }
    }
    CHECK(holds > 0);
    CHECK(holds < 1000);
}

TEST_CASE("scaling queues and V together preserves the choice")
{
    RngStream rng(12, "bcp-scale");
    for (int trial = 0; trial < 300; ++trial) {
        BackpressureState s;
        s.q_local = static_cast<std::uint32_t>(rng.uniform() * 100);
        s.v = 1 + static_cast<int>(rng.uniform() * 4);
        for (NodeId j = 1; j <= 4; ++j)
            s.neighbors[j] = heard(static_cast<std::uint32_t>(rng.uniform() * 100), 385e6 * (1 + j));
        const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.uniform() * 5);
        BackpressureState scaled = s;
        scaled.q_local *= k;
        scaled.v *= k;
        for (auto& [j, n] : scaled.neighbors)
            n.q_remote *= k;
        CHECK(select_next_hop(s, SimTime{}).chosen == select_next_hop(scaled, SimTime{}).chosen);
    }
}

TEST_CASE("ETX estimator")
{
    EtxEstimator e;
    CHECK(e.etx() == 1.0);
    for (int i = 0; i < 200; ++i) {
        e.update(true);
        e.update(false);
    }
    // Alternating outcomes settle at p = 0.1/0.19 after a success, 0.9 of that after a failure.
    CHECK(e.etx() == doctest::Approx(0.19 / 0.09).epsilon(1e-9));
    e.update(true);
    CHECK(e.etx() == doctest::Approx(1.9).epsilon(1e-9));

    EtxEstimator dead;
    for (int i = 0; i < 40; ++i)
        dead.update(false);
    CHECK(dead.etx() == EtxEstimator::kCap);
}

TEST_CASE("HELLO handling")
{
    BackpressureState s;
    s.neighbors[3].link_down = true;
    s.neighbors[3].first_failure = at(milliseconds(1));
    handle_hello(s, HelloMessage{3, 42, 4620e6, at(milliseconds(2))}, 3850e6, at(milliseconds(3)));
    const auto& n = s.neighbors.at(3);
    CHECK(n.q_remote == 42);
    CHECK(n.rate_est == 3850e6);
    CHECK(n.last_hello_at == at(milliseconds(3)));
    CHECK(n.heard);
    CHECK_FALSE(n.link_down);
    CHECK_FALSE(n.first_failure.has_value());
}

TEST_CASE("HELLO rounds follow the configured interval")
{
    for (auto [interval, expected] : {std::pair{whole_seconds(1), 10u}, std::pair{whole_seconds(5), 2u}}) {
        FakeHost host({1, 2});
        host.connect(1, 2);
        BcpRouting bcp(host, config_with(interval));
        host.set_protocol(&bcp);
        bcp.start();
        host.sim().run_until(at(whole_seconds(10)));
        CHECK(bcp.hello_rounds(1) == expected);
        CHECK(bcp.hello_rounds(2) == expected);
        CHECK(bcp.counters().hello_received == 2 * expected);
        CHECK(bcp.state(1).neighbors.at(2).rate_est == 4620e6);
    }
}

TEST_CASE("an isolated node still runs HELLO rounds")
{
    FakeHost host({1});
    BcpRouting bcp(host, BcpConfig{});
    CHECK(bcp.emit_hello(1) == 0);
    CHECK(bcp.hello_rounds(1) == 1);
    CHECK(host.sent.empty());
}

TEST_CASE("sustained failures mark the link down until the next HELLO")
{
    FakeHost host({1, 2});
    host.connect(1, 2);
    BcpRouting bcp(host, BcpConfig{});
    host.set_protocol(&bcp);
    host.set_queue(1, 100);
    bcp.emit_hello(2);
    host.sim().run_until(at(milliseconds(1)));
    bcp.reevaluate(1);
    CHECK(bcp.next_hop(1, 2) == NodeId{2});

    bcp.on_tx_outcome(1, 2, false);
    host.sim().run_until(at(milliseconds(21)));
    bcp.on_tx_outcome(1, 2, false);
    CHECK(bcp.state(1).neighbors.at(2).link_down);
    CHECK_FALSE(bcp.next_hop(1, 2).has_value());

    bcp.emit_hello(2);
    host.sim().run_until(at(milliseconds(22)));
    CHECK_FALSE(bcp.state(1).neighbors.at(2).link_down);
    CHECK(bcp.next_hop(1, 2) == NodeId{2});
    for (const auto& d : bcp.decisions())
        if (d.chosen)
            for (const auto& c : d.candidates)
                if (c.neighbor == *d.chosen)
                    CHECK(c.weight > 0.0);
}
