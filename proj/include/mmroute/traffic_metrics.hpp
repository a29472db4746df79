#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mmroute/engine.hpp"

namespace mmr::traffic {

struct Flow {
    std::uint32_t id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double rate_bps = 0.0;
    std::uint32_t packet_size = 7935;
    SimTime start;
    SimTime stop;

    /// Throws std::invalid_argument unless rate > 0, size > 0 and start < stop.
    void validate() const;
    /// Creation instant of the k-th packet (phase 0 at start), exact to the nanosecond.
    SimTime creation_time(std::uint64_t k) const;
    /// Number of packets created in [start, stop).
    std::uint64_t packet_count() const;
    Duration nominal_period() const;
    bool operator==(const Flow&) const = default;
};

struct PacketRecord {
    std::uint32_t flow = 0;
    std::uint64_t seq = 0;
    SimTime created_at;
    std::optional<SimTime> delivered_at;
    std::uint32_t hops_traversed = 0;
};

struct ThroughputRow {
    SimTime t_start;
    std::uint32_t flow;
    double bps;
};

/// Delivered payload bits per window, tiling [0, duration) without gaps.
std::vector<ThroughputRow> throughput_series(const std::vector<PacketRecord>& records,
                                             const std::vector<Flow>& flows, Duration window,
                                             Duration duration);

struct CdfPoint {
    std::int64_t delay_ns;
    double fraction;
};

/// Empirical CDF: one point per distinct delay, ascending. Empty input
/// yields an empty curve.
std::vector<CdfPoint> delay_cdf(std::vector<std::int64_t> delays_ns);
/// Smallest sample whose CDF value reaches q (nearest-rank quantile).
std::optional<std::int64_t> quantile(std::vector<std::int64_t> delays_ns, double q);

struct MetricsReport {
    std::vector<Flow> flows;
    Duration duration;
    Duration window;
    std::vector<PacketRecord> packets;
    std::map<std::uint32_t, std::uint64_t> generated;
    std::map<std::uint32_t, std::uint64_t> dropped;
    std::map<std::string, std::uint64_t> overhead_bytes;
    std::map<std::string, std::uint64_t> frame_counts;

    std::uint64_t delivered(std::uint32_t flow) const;
    std::uint64_t queued(std::uint32_t flow) const;
    std::vector<std::int64_t> delays(std::optional<std::uint32_t> flow = std::nullopt) const;
    /// Delays of packets created in [from, to).
    std::vector<std::int64_t> delays_created_between(std::uint32_t flow, SimTime from, SimTime to) const;
    std::vector<ThroughputRow> throughput() const { return throughput_series(packets, flows, window, duration); }
};

void write_throughput_csv(const MetricsReport& r, std::ostream& os);
void write_delays_csv(const MetricsReport& r, std::ostream& os);
void write_cdf_csv(const MetricsReport& r, std::ostream& os);
void write_overhead_csv(const MetricsReport& r, std::ostream& os);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace mmr::traffic
