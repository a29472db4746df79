#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mmroute/routing.hpp"

namespace mmr::bcp {

/// Success-ratio EWMA; ETX is its inverse, capped.
class EtxEstimator {
public:
    static constexpr double kAlpha = 0.9;
    static constexpr double kCap = 10.0;

    void update(bool success) { p_ = kAlpha * p_ + (1.0 - kAlpha) * (success ? 1.0 : 0.0); }
    double success_ratio() const { return p_; }
    double etx() const { return p_ <= 1.0 / kCap ? kCap : 1.0 / p_; }

private:
    double p_ = 1.0;
};

struct NeighborEstimate {
    std::uint32_t q_remote = 0;
    double rate_est = 0.0;
    EtxEstimator etx;
    SimTime last_hello_at;
    bool heard = false;
    /// Set after sustained TXOP failures; cleared by the next HELLO from the neighbor.
    bool link_down = false;
    std::optional<SimTime> first_failure;
};

struct BackpressureState {
    std::uint32_t q_local = 0;
    std::map<NodeId, NeighborEstimate> neighbors;
    double v = 2.0;
    Duration hello_interval = whole_seconds(1);
    Duration reroute_period = milliseconds(10);

    Duration staleness() const { return hello_interval * 3; }
    bool candidate(NodeId j, SimTime now) const;
};

/// (Q_local - Q_j - V * ETX_j) * R_j
double compute_weight(const BackpressureState& state, NodeId j);

struct Candidate {
    NodeId neighbor;
    std::uint32_t q_remote;
    double etx;
    double rate;
    double weight;
};

struct Decision {
    SimTime t;
    NodeId node = 0;
    std::uint32_t q_local = 0;
    double v = 0.0;
    std::vector<Candidate> candidates;
    /// nullopt means hold for a reroute period.
    std::optional<NodeId> chosen;
};

/// Argmax of the weights over fresh neighbors; ties go to the lowest id.
/// Holds unless the best weight is strictly positive.
Decision select_next_hop(const BackpressureState& state, SimTime now);

/// Receiver-side bookkeeping for one HELLO.
void handle_hello(BackpressureState& state, const HelloMessage& msg, double measured_rate, SimTime now);

void update_etx(BackpressureState& state, NodeId j, bool success);

struct BcpConfig {
    double v = 2.0;
    Duration hello_interval = whole_seconds(1);
    Duration reroute_period = milliseconds(10);
    Duration loss_detect_window = milliseconds(20);
    /// First HELLO round and reroute tick; after the first BHI by default.
    Duration first_hello = milliseconds(5);
};

struct BcpCounters {
    std::uint64_t hello_sent = 0;
    std::uint64_t hello_received = 0;
    std::uint64_t decisions = 0;
};

class BcpRouting final : public RoutingProtocol {
public:
    BcpRouting(RoutingHost& host, BcpConfig config);

    void start() override;
    std::optional<NodeId> next_hop(NodeId node, NodeId destination) override;
    void on_packet_queued(NodeId node, NodeId destination) override;
    void on_tx_outcome(NodeId node, NodeId next_hop, bool success) override;
    void on_control(NodeId at, NodeId from, const ControlMessage& msg) override;

    /// One HELLO round from `node`; returns the number of messages sent.
    std::size_t emit_hello(NodeId node);
    const Decision& reevaluate(NodeId node);

    const BackpressureState& state(NodeId node) const;
    std::uint64_t hello_rounds(NodeId node) const;
    const std::vector<Decision>& decisions() const { return log_; }
    const BcpCounters& counters() const { return counters_; }

private:
    struct NodeBcp {
        BackpressureState state;
        std::optional<NodeId> chosen;
        std::uint64_t rounds = 0;
    };

    NodeBcp& node_state(NodeId node);
    void schedule_hello(NodeId node, SimTime t);
    void schedule_reroute(NodeId node, SimTime t);

    RoutingHost& host_;
    BcpConfig config_;
    std::map<NodeId, NodeBcp> nodes_;
    std::vector<Decision> log_;
    BcpCounters counters_;
};

}  // namespace mmr::bcp
