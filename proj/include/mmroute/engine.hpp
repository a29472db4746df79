#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

namespace mmr {

using NodeId = std::uint32_t;

/// Signed span of simulated time in integer nanoseconds.
struct Duration {
    std::int64_t ns = 0;

    constexpr auto operator<=>(const Duration&) const = default;
    constexpr Duration operator+(Duration o) const { return {ns + o.ns}; }
    constexpr Duration operator-(Duration o) const { return {ns - o.ns}; }
    constexpr Duration operator*(std::int64_t k) const { return {ns * k}; }
    constexpr Duration operator/(std::int64_t k) const { return {ns / k}; }
    constexpr double seconds() const { return static_cast<double>(ns) * 1e-9; }
};

/// Absolute simulated time, nanoseconds since simulation start. Never negative.
struct SimTime {
    std::int64_t ns = 0;

    constexpr auto operator<=>(const SimTime&) const = default;
    constexpr SimTime operator+(Duration d) const { return {ns + d.ns}; }
    constexpr SimTime operator-(Duration d) const { return {ns - d.ns}; }
    constexpr Duration operator-(SimTime o) const { return {ns - o.ns}; }
    SimTime& operator+=(Duration d) { ns += d.ns; return *this; }
    constexpr double seconds() const { return static_cast<double>(ns) * 1e-9; }
};

constexpr Duration nanoseconds(std::int64_t v) { return {v}; }
constexpr Duration microseconds(std::int64_t v) { return {v * 1'000}; }
constexpr Duration milliseconds(std::int64_t v) { return {v * 1'000'000}; }
constexpr Duration whole_seconds(std::int64_t v) { return {v * 1'000'000'000}; }
/// Rounds to the nearest nanosecond.
Duration seconds(double s);
constexpr SimTime at(Duration since_start) { return {since_start.ns}; }

enum class EventKind : std::uint8_t {
    FrameDelivery,
    Timer,
    BlockageToggle,
    MobilityUpdate,
    TrafficTick,
};

std::string_view to_string(EventKind kind);

struct EventHandle {
    std::uint64_t seq = 0;
};

/// What the dispatch observer sees for every event that fires.
struct DispatchRecord {
    SimTime fire_at;
    NodeId target;
    EventKind kind;
    std::uint64_t seq;
};

/// Single-threaded discrete-event core. Events at equal times fire in
/// insertion order.
class Simulator {
public:
    using Action = std::function<void()>;
    using Observer = std::function<void(const DispatchRecord&)>;

    SimTime now() const { return now_; }

    /// Throws std::logic_error when `fire_at` lies in the past.
    EventHandle schedule(SimTime fire_at, NodeId target, EventKind kind, Action action);
    EventHandle schedule_in(Duration delay, NodeId target, EventKind kind, Action action) {
        return schedule(now_ + delay, target, kind, std::move(action));
    }

    /// Cancelling an already-dispatched or unknown handle is a no-op.
    void cancel(EventHandle handle);

    /// Dispatches every event with fire_at <= end, then sets now() = end.
    std::uint64_t run_until(SimTime end);

    std::size_t pending() const { return queue_.size(); }
    std::uint64_t dispatched() const { return dispatched_; }

    void set_observer(Observer obs) { observer_ = std::move(obs); }

private:
    struct Entry {
        SimTime fire_at;
        std::uint64_t seq;
        NodeId target;
        EventKind kind;
        Action action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    SimTime now_{};
    std::uint64_t next_seq_ = 1;
    std::uint64_t dispatched_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::vector<bool> cancelled_;  // indexed by seq
    Observer observer_;
};

/// Deterministic pseudo-random stream keyed by (master seed, stream id).
/// The raw integer sequence is fixed by splitmix64; continuous variates use
/// explicit inverse-CDF transforms rather than <random> distributions.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);
    RngStream(std::uint64_t seed, std::string_view stream_name);

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform();
    /// Exponential variate with the given rate (mean 1/rate).
    double exponential(double rate);

private:
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mmr
