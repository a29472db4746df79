#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "mmroute/scenario.hpp"

using namespace mmr;
using namespace mmr::scenario;

namespace {

std::string bundled(const char* name)
{
    return std::string(MMROUTE_SCENARIO_DIR) + "/" + name;
}

std::vector<Diagnostic> errors_of(const std::string& text, const std::vector<Override>& ov = {})
{
    try {
        parse_scenario_text(text, ov);
    } catch (const ScenarioError& e) {
        return e.diagnostics();
    }
    return {};
}

bool has(const std::vector<Diagnostic>& d, std::size_t line, const std::string& needle)
{
    return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) {
        return x.line == line && x.message.find(needle) != std::string::npos;
    });
}

const char* kMinimal = R"(duration = 2s

[node]
id = 1
waypoint = 0s 0 0 1

[node]
id = 2
waypoint = 0s 3 0 1

[flow]
src = 2
dst = 1
rate = 100Mbps
)";

}  // namespace

TEST_CASE("bundled single-flow scenario")
{
    const auto c = parse_scenario(bundled("single_flow.scn"));
    CHECK(c.duration == whole_seconds(10));
    CHECK(c.seed == 1);
    CHECK(c.throughput_window == milliseconds(100));
    CHECK(c.protocol.type == Protocol::Aodv);
    CHECK(c.protocol.refinement);
    REQUIRE(c.nodes.size() == 3);
    CHECK(c.nodes[2].id == 5);
    CHECK(c.nodes[2].waypoints[0].p == phy::Position{7.2, 0, 1});
    CHECK(c.nodes[1].waypoints.size() == 2);
    REQUIRE(c.blockers.size() == 1);
    CHECK(c.blockers[0].windows == std::vector<phy::BlockageWindow>{{at(whole_seconds(5)), at(milliseconds(5200))}});
    CHECK(c.blockers[0].attenuation_db == 20.0);
    REQUIRE(c.flows.size() == 1);
    CHECK(c.flows[0].rate_bps == 2.5e9);
    CHECK(c.flows[0].packet_size == 7935);
    CHECK(c.flows[0].stop == at(whole_seconds(10)));
    CHECK(c.phy.rate_table == phy::default_rate_table());
    CHECK(validate(c).empty());
}

TEST_CASE("bundled BCP and multi-flow scenarios")
{
    const auto b = parse_scenario(bundled("single_flow_bcp.scn"));
    CHECK(b.protocol.type == Protocol::Bcp);
    CHECK(b.protocol.hello_interval == whole_seconds(1));
    CHECK(b.protocol.v == 2.0);
    CHECK(b.protocol.reroute_period == milliseconds(10));

    const auto m = parse_scenario(bundled("multi_flow.scn"));
    CHECK(m.nodes.size() == 5);
    REQUIRE(m.flows.size() == 3);
    CHECK(m.flows[0].id == 0);
    CHECK(m.flows[1].rate_bps == 45e6);
    CHECK(m.flows[2].rate_bps == 25e6);
}

TEST_CASE("every bundled scenario round-trips through serialization")
{
    for (const char* name : {"single_flow.scn", "single_flow_bcp.scn", "multi_flow.scn"}) {
        CAPTURE(name);
        const auto c = parse_scenario(bundled(name));
        const std::string text = serialize_scenario(c);
        CHECK(parse_scenario_text(text) == c);
        CHECK(serialize_scenario(parse_scenario_text(text)) == text);
    }
}

TEST_CASE("empty input has no nodes")
{
    const auto d = errors_of("");
    CHECK(has(d, 0, "no nodes"));
}

TEST_CASE("a flow naming a missing node is reported on its section line")
{
    std::string text = kMinimal;
    text.replace(text.find("src = 2"), 7, "src = 9");
    const auto d = errors_of(text);
    REQUIRE(d.size() == 1);
    CHECK(d[0].line == 11);
    CHECK(d[0].message == "flow 0: unknown src node 9");
}

TEST_CASE("every problem is collected with its line")
{
    const std::string text = "duration = 1s\n"
                             "colour = blue\n"
                             "[protocol]\n"
                             "type = olsr\n"
                             "type = aodv\n"
                             "[node]\n"
                             "id = 1\n"
                             "[wormhole]\n"
                             "[node]\n"
                             "id = 1\n"
                             "waypoint = 0s 0 0 1\n";
    const auto d = errors_of(text);
    CHECK(has(d, 2, "unknown key 'colour'"));
    CHECK(has(d, 4, "aodv or bcp"));
    CHECK(has(d, 5, "duplicate key 'type'"));
    CHECK(has(d, 6, "has no waypoint"));
    CHECK(has(d, 8, "unknown section [wormhole]"));
    CHECK(has(d, 9, "duplicate node id 1"));
    for (std::size_t i = 1; i < d.size(); ++i)
        CHECK(d[i - 1].line <= d[i].line);

    try {
        parse_scenario_text(text);
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("line 2: unknown key 'colour'") != std::string::npos);
    }
}

TEST_CASE("value checks")
{
    CHECK(has(errors_of(std::string(kMinimal) + "stop = 3s\n"), 11, "stop beyond duration"));
    CHECK(has(errors_of(std::string(kMinimal) + "start = 1s\nstop = 1s\n"), 11, "start must precede stop"));
    CHECK(has(errors_of(std::string(kMinimal) + "[blocker]\ncenter = 1 1 1\ndims = 0 1 1\n"), 15, "dims"));
    CHECK(has(errors_of(std::string(kMinimal) + "[blocker]\ncenter = 1 1 1\nwindow = 1s 5s\n"), 15, "outside"));
    CHECK(has(errors_of(std::string(kMinimal) + "[blocker]\ncenter = 1 1 1\npoisson_rate = -2\n"), 15, "poisson_rate"));
    CHECK(has(errors_of(std::string(kMinimal) + "[protocol]\nhello_interval = 0s\n"), 0, "hello_interval"));
    CHECK(has(errors_of(std::string(kMinimal) + "[phy]\nrate = 4 1e9\nrate = 2 2e9\n"), 0, "rate table"));
    CHECK(has(errors_of("[node]\nid = 1\nwaypoint = 1s 0 0 1\nwaypoint = 1s 1 0 1\n"), 1, "must increase"));
    CHECK(errors_of(kMinimal).empty());
}

TEST_CASE("command-line overrides")
{
    const auto c = parse_scenario(bundled("multi_flow.scn"),
                                  {{"duration", "1s"},
                                   {"blocker.0.window", "500ms 700ms"},
                                   {"protocol.refinement", "off"},
                                   {"flow.0.stop", "1s"},
                                   {"flow.1.stop", "1s"},
                                   {"flow.2.stop", "1s"},
                                   {"phy.tx_power_dbm", "10"},
                                   {"node.3.waypoint", "0s 1 1 1"},
                                   {"seed", "77"}});
    CHECK(c.duration == whole_seconds(1));
    CHECK_FALSE(c.protocol.refinement);
    CHECK(c.flows[0].stop == at(whole_seconds(1)));
    CHECK(c.phy.tx_power_dbm == 10.0);
    CHECK(c.nodes[3].waypoints.size() == 1);
    CHECK(c.seed == 77);

    CHECK(has(errors_of(kMinimal, {{"flow.4.rate", "1Gbps"}}), 0, "no such [flow]"));
    CHECK(has(errors_of(kMinimal, {{"protocol.nonsense", "1"}}), 0, "unknown key"));
    CHECK(has(errors_of(kMinimal, {{"duration", "1s"}}), 11, "stop beyond duration") == false);
}

TEST_CASE("durations")
{
    CHECK(parse_duration("5s") == whole_seconds(5));
    CHECK(parse_duration("5200ms") == milliseconds(5200));
    CHECK(parse_duration("300us") == microseconds(300));
    CHECK(parse_duration("17ns") == nanoseconds(17));
    CHECK(parse_duration("5.2s") == milliseconds(5200));
    CHECK(parse_duration(" 0.5ms ") == microseconds(500));
    CHECK_THROWS_AS(parse_duration("5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_duration("fast"), std::invalid_argument);
    CHECK(format_duration(milliseconds(5200)) == "5200ms");
    CHECK(format_duration(whole_seconds(3)) == "3s");
    CHECK(format_duration(nanoseconds(25392)) == "25392ns");
    for (std::int64_t ns : {1LL, 999LL, 1000LL, 25392LL, 5'200'000'000LL})
        CHECK(parse_duration(format_duration(nanoseconds(ns))) == nanoseconds(ns));
}

TEST_CASE("Poisson blockage windows")
{
    SUBCASE("mean on-period is 1/mu")
    {
        RngStream rng(8, "poisson");
        double total = 0.0;
        std::size_t n = 0;
        while (n < 10000) {
            for (const auto& w : poisson_blockage(2.0, rng, whole_seconds(1000))) {
                if (w.off == at(whole_seconds(1000)))
                    continue;  // truncated at the horizon
                total += (w.off - w.on).seconds();
                ++n;
            }
        }
        CHECK(total / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.1));
    }
    SUBCASE("windows are ordered, disjoint and inside the horizon")
    {
        for (double mu : {0.1, 2.0, 50.0, 1000.0}) {
            RngStream rng(9, "poisson");
            const auto ws = poisson_blockage(mu, rng, whole_seconds(10));
            for (std::size_t i = 0; i < ws.size(); ++i) {
                CHECK(ws[i].on < ws[i].off);
                CHECK(ws[i].on >= SimTime{});
                CHECK(ws[i].off <= at(whole_seconds(10)));
                if (i > 0)
                    CHECK(ws[i - 1].off <= ws[i].on);
            }
            if (mu >= 50.0)
                CHECK(ws.size() > 100);
        }
    }
    SUBCASE("deterministic per stream")
    {
        RngStream a(3, "blocker/0"), b(3, "blocker/0");
        CHECK(poisson_blockage(2.0, a, whole_seconds(10)) == poisson_blockage(2.0, b, whole_seconds(10)));
    }
    SUBCASE("non-positive rate is rejected")
    {
        RngStream rng(1, 0);
        CHECK_THROWS_AS(poisson_blockage(0.0, rng, whole_seconds(1)), std::invalid_argument);
    }
}
