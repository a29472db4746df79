#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "mmroute/traffic_metrics.hpp"

using namespace mmr;
using namespace mmr::traffic;

namespace {

Flow cbr(std::uint32_t id, double rate, Duration stop = whole_seconds(1))
{
    return Flow{id, 5, 1, rate, 7935, SimTime{}, at(stop)};
}

// Every packet delivered `lag` after creation.
std::vector<PacketRecord> deliver_all(const Flow& f, Duration lag)
{
    std::vector<PacketRecord> out;
    for (std::uint64_t k = 0; k < f.packet_count(); ++k) {
        const SimTime c = f.creation_time(k);
        out.push_back(PacketRecord{f.id, k, c, c + lag, 1});
    }
    return out;
}

}  // namespace

TEST_CASE("CBR creation times")
{
    const Flow f = cbr(0, 2.5e9);
    CHECK(f.nominal_period() == nanoseconds(25392));
    CHECK(f.creation_time(0) == SimTime{});
    CHECK(f.creation_time(1000) == at(nanoseconds(25'392'000)));

    const Flow slow = cbr(1, 45e6);
    CHECK(slow.packet_count() == 709);
    CHECK(1e9 / static_cast<double>(slow.nominal_period().ns) == doctest::Approx(708.9).epsilon(1e-3));

    for (std::uint64_t k = 1; k < f.packet_count(); ++k)
        REQUIRE(f.creation_time(k) > f.creation_time(k - 1));
    CHECK(f.creation_time(f.packet_count() - 1) < f.stop);
    CHECK(f.creation_time(f.packet_count()) >= f.stop);
}

TEST_CASE("invalid flows are rejected")
{
    CHECK_THROWS_AS(cbr(0, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(cbr(0, -1.0).validate(), std::invalid_argument);
    Flow f = cbr(0, 1e6);
    f.stop = f.start;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f = cbr(0, 1e6);
    f.packet_size = 0;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    CHECK_NOTHROW(cbr(0, 1e6).validate());
}

TEST_CASE("throughput series")
{
    const Flow f = cbr(0, 2.5e9);
    const Duration window = milliseconds(100);
    const double quantum = 7935.0 * 8.0 / window.seconds();

    SUBCASE("nothing delivered gives zero windows, not missing ones")
    {
        const auto rows = throughput_series({}, {f}, window, whole_seconds(1));
        REQUIRE(rows.size() == 10);
        for (const auto& r : rows)
            CHECK(r.bps == 0.0);
    }
    SUBCASE("instant delivery tracks the offered load within one packet per window")
    {
        const auto rows = throughput_series(deliver_all(f, Duration{}), {f}, window, whole_seconds(1));
        REQUIRE(rows.size() == 10);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(rows[i].t_start == at(window * static_cast<std::int64_t>(i)));
            CHECK(std::abs(rows[i].bps - 2.5e9) <= quantum);
        }
    }
    SUBCASE("window sums conserve delivered bits")
    {
        const Flow g = cbr(1, 300e6);
        auto recs = deliver_all(f, microseconds(700));
        auto more = deliver_all(g, milliseconds(40));
        recs.insert(recs.end(), more.begin(), more.end());
        // Leave every third packet undelivered.
        for (std::size_t i = 0; i < recs.size(); i += 3)
            recs[i].delivered_at.reset();
        const Duration dur = milliseconds(1250);
        const auto rows = throughput_series(recs, {f, g}, window, dur);
        CHECK(rows.size() == 13 * 2);
        double bits = 0.0;
        for (const auto& r : rows)
            bits += r.bps * window.seconds();
        const auto delivered = std::count_if(recs.begin(), recs.end(), [](const auto& p) { return p.delivered_at.has_value(); });
        CHECK(bits == doctest::Approx(static_cast<double>(delivered) * 7935 * 8).epsilon(1e-9));
    }
}

TEST_CASE("delay CDF")
{
    SUBCASE("single value steps straight to one")
    {
        const auto c = delay_cdf({5, 5, 5});
        REQUIRE(c.size() == 1);
        CHECK(c[0].delay_ns == 5);
        CHECK(c[0].fraction == 1.0);
    }
    SUBCASE("empty")
    {
        CHECK(delay_cdf({}).empty());
        CHECK_FALSE(quantile({}, 0.5).has_value());
    }
    SUBCASE("random samples give a monotone curve ending at one")
    {
        RngStream rng(5, 0);
        std::vector<std::int64_t> d;
        for (int i = 0; i < 5000; ++i)
            d.push_back(static_cast<std::int64_t>(rng.exponential(1e-6)));
        const auto c = delay_cdf(d);
        REQUIRE_FALSE(c.empty());
        for (std::size_t i = 1; i < c.size(); ++i) {
            CHECK(c[i].delay_ns > c[i - 1].delay_ns);
            CHECK(c[i].fraction > c[i - 1].fraction);
        }
        CHECK(c.back().fraction == 1.0);
        CHECK(c.back().delay_ns == *std::max_element(d.begin(), d.end()));
    }
}

TEST_CASE("nearest-rank quantile")
{
    const std::vector<std::int64_t> d{40, 10, 30, 20};
    CHECK(quantile(d, 0.0) == 10);
    CHECK(quantile(d, 0.25) == 10);
    CHECK(quantile(d, 0.26) == 20);
    CHECK(quantile(d, 0.5) == 20);
    CHECK(quantile(d, 1.0) == 40);
}

TEST_CASE("CSV outputs")
{
    MetricsReport r;
    r.flows = {cbr(0, 1e9), cbr(1, 1e9)};
    r.duration = milliseconds(200);
    r.window = milliseconds(100);
    r.packets = {{1, 0, SimTime{}, at(milliseconds(1)), 1},
                 {0, 1, at(milliseconds(2)), at(milliseconds(150)), 2},
                 {0, 0, SimTime{}, at(milliseconds(3)), 2},
                 {0, 2, at(milliseconds(4)), std::nullopt, 0}};
    r.generated = {{0, 3}, {1, 1}};
    r.overhead_bytes = {{"ssw", 208}, {"hello", 22}};

    CHECK(r.delivered(0) == 2);
    CHECK(r.queued(0) == 1);
    CHECK(r.queued(1) == 0);

    std::ostringstream tp, dl, cdf, oh;
    write_throughput_csv(r, tp);
    write_delays_csv(r, dl);
    write_cdf_csv(r, cdf);
    write_overhead_csv(r, oh);
    CHECK(tp.str() ==
          "t_start,flow,bps\n"
          "0,0,634800\n0,1,634800\n100000000,0,634800\n100000000,1,0\n");
    CHECK(dl.str() == "flow,created_ns,delivered_ns\n0,0,3000000\n0,2000000,150000000\n1,0,1000000\n");
    CHECK(cdf.str() == "delay_ns,fraction\n1000000,0.3333333333333333\n3000000,0.6666666666666666\n148000000,1\n");
    CHECK(oh.str() == "category,bytes\nhello,22\nssw,208\n");
}
