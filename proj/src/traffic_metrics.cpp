#include "mmroute/traffic_metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mmr::traffic {

void Flow::validate() const
{
    if (!(rate_bps > 0.0) || !std::isfinite(rate_bps))
        throw std::invalid_argument("flow " + std::to_string(id) + ": rate must be positive");
    if (packet_size == 0)
        throw std::invalid_argument("flow " + std::to_string(id) + ": packet size must be positive");
    if (!(start < stop))
        throw std::invalid_argument("flow " + std::to_string(id) + ": start must precede stop");
}

SimTime Flow::creation_time(std::uint64_t k) const
{
    const long double bits = static_cast<long double>(packet_size) * 8.0L;
    const long double offset = static_cast<long double>(k) * bits * 1e9L / rate_bps;
    return start + Duration{static_cast<std::int64_t>(std::floor(offset + 1e-6L))};
}

std::uint64_t Flow::packet_count() const
{
    const long double span = static_cast<long double>((stop - start).ns);
    auto n = static_cast<std::uint64_t>(span * rate_bps / (packet_size * 8.0L * 1e9L));
    while (creation_time(n) < stop)
        ++n;
    while (n > 0 && creation_time(n - 1) >= stop)
        --n;
    return n;
}

Duration Flow::nominal_period() const
{
    return creation_time(1) - creation_time(0);
}

std::vector<ThroughputRow> throughput_series(const std::vector<PacketRecord>& records,
                                             const std::vector<Flow>& flows, Duration window,
                                             Duration duration)
{
    if (window.ns <= 0)
        throw std::invalid_argument("throughput window must be positive");
    const std::int64_t windows = (duration.ns + window.ns - 1) / window.ns;
    std::map<std::uint32_t, std::uint32_t> size_of;
    std::map<std::uint32_t, std::vector<std::uint64_t>> bits;
    for (const Flow& f : flows) {
        size_of[f.id] = f.packet_size;
        bits[f.id].assign(static_cast<std::size_t>(windows), 0);
    }
    for (const PacketRecord& p : records) {
        if (!p.delivered_at)
            continue;
        const std::int64_t w = p.delivered_at->ns / window.ns;
        auto it = bits.find(p.flow);
        if (it == bits.end() || w < 0 || w >= windows)
            continue;
        it->second[static_cast<std::size_t>(w)] += static_cast<std::uint64_t>(size_of[p.flow]) * 8;
    }
    std::vector<ThroughputRow> rows;
    rows.reserve(static_cast<std::size_t>(windows) * flows.size());
    for (std::int64_t w = 0; w < windows; ++w)
        for (const auto& [flow, series] : bits)
            rows.push_back(ThroughputRow{SimTime{w * window.ns}, flow,
                                         static_cast<double>(series[static_cast<std::size_t>(w)]) /
                                             window.seconds()});
    return rows;
}

std::vector<CdfPoint> delay_cdf(std::vector<std::int64_t> delays_ns)
{
    std::vector<CdfPoint> out;
    if (delays_ns.empty())
        return out;
    std::sort(delays_ns.begin(), delays_ns.end());
    const double n = static_cast<double>(delays_ns.size());
    for (std::size_t i = 0; i < delays_ns.size(); ++i) {
        if (i + 1 < delays_ns.size() && delays_ns[i + 1] == delays_ns[i])
            continue;
        out.push_back(CdfPoint{delays_ns[i], static_cast<double>(i + 1) / n});
    }
    return out;
}

std::optional<std::int64_t> quantile(std::vector<std::int64_t> delays_ns, double q)
{
    if (delays_ns.empty())
        return std::nullopt;
    std::sort(delays_ns.begin(), delays_ns.end());
    const auto n = delays_ns.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return delays_ns[rank - 1];
}

std::uint64_t MetricsReport::delivered(std::uint32_t flow) const
{
    return static_cast<std::uint64_t>(std::count_if(packets.begin(), packets.end(), [flow](const PacketRecord& p) {
        return p.flow == flow && p.delivered_at.has_value();
    }));
}

std::uint64_t MetricsReport::queued(std::uint32_t flow) const
{
    const auto gen = generated.count(flow) ? generated.at(flow) : 0;
    const auto drop = dropped.count(flow) ? dropped.at(flow) : 0;
    return gen - drop - delivered(flow);
}

std::vector<std::int64_t> MetricsReport::delays(std::optional<std::uint32_t> flow) const
{
    std::vector<std::int64_t> out;
    for (const auto& p : packets)
        if (p.delivered_at && (!flow || p.flow == *flow))
            out.push_back((*p.delivered_at - p.created_at).ns);
    return out;
}

std::vector<std::int64_t> MetricsReport::delays_created_between(std::uint32_t flow, SimTime from, SimTime to) const
{
    std::vector<std::int64_t> out;
    for (const auto& p : packets)
        if (p.flow == flow && p.delivered_at && p.created_at >= from && p.created_at < to)
            out.push_back((*p.delivered_at - p.created_at).ns);
    return out;
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_throughput_csv(const MetricsReport& r, std::ostream& os)
{
    os << "t_start,flow,bps\n";
    for (const auto& row : r.throughput())
        os << row.t_start.ns << ',' << row.flow << ',' << format_double(row.bps) << '\n';
}

void write_delays_csv(const MetricsReport& r, std::ostream& os)
{
    std::vector<const PacketRecord*> rows;
    for (const auto& p : r.packets)
        if (p.delivered_at)
            rows.push_back(&p);
    std::stable_sort(rows.begin(), rows.end(), [](const PacketRecord* a, const PacketRecord* b) {
        return a->flow != b->flow ? a->flow < b->flow : a->seq < b->seq;
    });
    os << "flow,created_ns,delivered_ns\n";
    for (const auto* p : rows)
        os << p->flow << ',' << p->created_at.ns << ',' << p->delivered_at->ns << '\n';
}

void write_cdf_csv(const MetricsReport& r, std::ostream& os)
{
    os << "delay_ns,fraction\n";
    for (const auto& pt : delay_cdf(r.delays()))
        os << pt.delay_ns << ',' << format_double(pt.fraction) << '\n';
}

void write_overhead_csv(const MetricsReport& r, std::ostream& os)
{
    os << "category,bytes\n";
    for (const auto& [cat, bytes] : r.overhead_bytes)
        os << cat << ',' << bytes << '\n';
}

}  // namespace mmr::traffic
