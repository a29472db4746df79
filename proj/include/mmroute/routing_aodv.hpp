#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mmroute/routing.hpp"

namespace mmr::aodv {

struct RoutingTableEntry {
    NodeId destination = 0;
    NodeId next_hop = 0;
    std::uint32_t hop_count = 0;
    std::uint32_t dest_seq = 0;
    SimTime expires_at;
    bool valid = true;

    bool usable(SimTime now) const { return valid && now < expires_at; }
    bool operator==(const RoutingTableEntry&) const = default;
};

/// Destination-indexed table with AODV freshness ordering.
class RoutingTable {
public:
    /// Installs `candidate` if there is no usable entry and its sequence
    /// number is not older, or if it is strictly fresher, or if it has an
    /// equal sequence number and strictly fewer hops. Returns true when
    /// the table changed.
    bool offer(const RoutingTableEntry& candidate, SimTime now);

    std::optional<RoutingTableEntry> lookup(NodeId destination, SimTime now) const;
    /// Any entry, valid or not.
    std::optional<RoutingTableEntry> find(NodeId destination) const;
    /// Marks every usable route through `next_hop` invalid and bumps its
    /// sequence number. Returns the affected destinations.
    std::vector<NodeId> invalidate_via(NodeId next_hop, SimTime now);
    const std::map<NodeId, RoutingTableEntry>& entries() const { return entries_; }

private:
    std::map<NodeId, RoutingTableEntry> entries_;
};

/// Single-slot holder for the request piggybacked on the next TXSS.
struct SweepStash {
    std::optional<RouteRequestFields> pending;
    SimTime stashed_at;
};

struct AodvConfig {
    bool refinement = true;
    Duration loss_detect_window = milliseconds(20);
    Duration route_lifetime = whole_seconds(10);
    std::uint32_t net_diameter = 4;
    /// A destination counts as active for refinement if traffic for it was
    /// seen within this window.
    Duration activity_window = milliseconds(300);
};

struct AodvCounters {
    std::uint64_t rreq_sent = 0;
    std::uint64_t rrep_sent = 0;
    std::uint64_t duplicate_rreq = 0;
    std::uint64_t route_losses = 0;
    std::uint64_t refinements = 0;
    std::uint64_t stashed = 0;
};

class AodvRouting final : public RoutingProtocol {
public:
    using TableObserver = std::function<void(NodeId node, const RoutingTableEntry&)>;

    AodvRouting(RoutingHost& host, AodvConfig config);

    void start() override;
    std::optional<NodeId> next_hop(NodeId node, NodeId destination) override;
    void on_packet_queued(NodeId node, NodeId destination) override;
    void on_tx_outcome(NodeId node, NodeId next_hop, bool success) override;
    void on_control(NodeId at, NodeId from, const ControlMessage& msg) override;

    std::optional<RouteRequestFields> sweep_payload(NodeId initiator) override;
    std::optional<RouteReplyFields> answer_sweep(NodeId responder, NodeId initiator,
                                                 const RouteRequestFields& req) override;
    void on_sweep_reply(NodeId initiator, NodeId via, const RouteReplyFields& reply) override;
    void on_sweep_complete(NodeId initiator) override;

    /// Starts route discovery: RREQ to every fresh neighbor plus a stash
    /// for the next TXSS. Returns the request that was issued.
    RouteRequestFields originate_rreq(NodeId origin, NodeId destination);
    void handle_rreq(NodeId at, NodeId from, const RouteRequestFields& req);
    void handle_rrep(NodeId at, NodeId from, const RouteReplyFields& rep);
    /// Newest request wins the single slot.
    void stash_for_sweep(NodeId node, const RouteRequestFields& req);
    std::optional<RouteReplyFields> respond_enhanced_ssw(NodeId responder, NodeId initiator,
                                                         const RouteRequestFields& payload) const;
    /// Returns true when the initiator's table changed.
    bool apply_refinement(NodeId initiator, const RouteReplyFields& reply, NodeId via);
    /// Per-BI decision; stashes a refinement request when warranted.
    std::optional<RouteRequestFields> refine_policy(NodeId node);

    const RoutingTable& table(NodeId node) const { return state(node).table; }
    const SweepStash& stash(NodeId node) const { return state(node).stash; }
    const AodvCounters& counters() const { return counters_; }
    const AodvConfig& config() const { return config_; }
    /// Install a route directly (test setup and static configuration).
    void seed_route(NodeId node, const RoutingTableEntry& entry);
    void set_table_observer(TableObserver obs) { observer_ = std::move(obs); }

private:
    struct NodeRouting {
        std::uint32_t own_seq = 0;
        std::uint32_t next_request_id = 0;
        RoutingTable table;
        SweepStash stash;
        std::set<std::pair<NodeId, std::uint32_t>> seen_requests;
        std::set<NodeId> pending_discovery;
        std::map<NodeId, SimTime> first_failure;
        std::map<NodeId, SimTime> last_activity;
        std::size_t refine_cursor = 0;
    };

    NodeRouting& state(NodeId node);
    const NodeRouting& state(NodeId node) const;
    SimTime now() const { return host_.sim().now(); }
    bool offer(NodeId node, const RoutingTableEntry& candidate, const char* cause);
    void link_lost(NodeId node, NodeId neighbor);
    void route_installed(NodeId node, NodeId destination);
    void send(NodeId from, NodeId to, const ControlMessage& msg);
    void trace_entry(NodeId node, const RoutingTableEntry& e, const char* cause);

    RoutingHost& host_;
    AodvConfig config_;
    std::map<NodeId, NodeRouting> nodes_;
    AodvCounters counters_;
    TableObserver observer_;
};

}  // namespace mmr::aodv
