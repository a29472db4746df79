#include "mmroute/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace mmr {

Duration seconds(double s)
{
    return {static_cast<std::int64_t>(std::llround(s * 1e9))};
}

std::string_view to_string(EventKind kind)
{
    switch (kind) {
        case EventKind::FrameDelivery: return "frame-delivery";
        case EventKind::Timer: return "timer";
        case EventKind::BlockageToggle: return "blockage-toggle";
        case EventKind::MobilityUpdate: return "mobility-update";
        case EventKind::TrafficTick: return "traffic-tick";
    }
    return "unknown";
}

EventHandle Simulator::schedule(SimTime fire_at, NodeId target, EventKind kind, Action action)
{
    if (fire_at < now_)
        throw std::logic_error("event scheduled in the past: " + std::to_string(fire_at.ns) +
                               "ns < now " + std::to_string(now_.ns) + "ns");
    const std::uint64_t seq = next_seq_++;
    queue_.push(Entry{fire_at, seq, target, kind, std::move(action)});
    return EventHandle{seq};
}

void Simulator::cancel(EventHandle handle)
{
    if (handle.seq == 0 || handle.seq >= next_seq_)
        return;
    if (cancelled_.size() <= handle.seq)
        cancelled_.resize(handle.seq + 1, false);
    cancelled_[handle.seq] = true;
}

std::uint64_t Simulator::run_until(SimTime end)
{
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().fire_at <= end) {
        // priority_queue::top is const; the entry is popped right after.
        Entry entry = std::move(const_cast<Entry&>(queue_.top()));
        queue_.pop();
        if (entry.seq < cancelled_.size() && cancelled_[entry.seq])
            continue;
        now_ = entry.fire_at;
        ++count;
        ++dispatched_;
        if (observer_)
            observer_(DispatchRecord{entry.fire_at, entry.target, entry.kind, entry.seq});
        entry.action();
    }
    if (end > now_)
        now_ = end;
    return count;
}

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
{
    std::uint64_t mix = seed;
    const std::uint64_t a = splitmix64(mix);
    std::uint64_t mix2 = stream_id ^ 0xD1B54A32D192ED03ULL;
    const std::uint64_t b = splitmix64(mix2);
    state_ = a ^ (b * 0x9E3779B97F4A7C15ULL);
}

RngStream::RngStream(std::uint64_t seed, std::string_view stream_name)
    : RngStream(seed, fnv1a(stream_name))
{
}

std::uint64_t RngStream::next_u64()
{
    return splitmix64(state_);
}

double RngStream::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate)
{
    if (!(rate > 0.0))
        throw std::invalid_argument("exponential rate must be positive");
    // 1 - u lies in (0, 1], so the log is finite.
    return -std::log(1.0 - uniform()) / rate;
}

}  // namespace mmr
