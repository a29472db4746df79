#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "mmroute/engine.hpp"
#include "mmroute/phy.hpp"
#include "mmroute/routing_fields.hpp"
#include "mmroute/trace.hpp"

namespace mmr {

using ControlMessage = std::variant<RouteRequestFields, RouteReplyFields, HelloMessage>;

/// Services the network layer needs from the rest of the simulated stack.
class RoutingHost {
public:
    virtual ~RoutingHost() = default;

    virtual Simulator& sim() = 0;
    virtual TraceLog& trace() = 0;
    virtual std::vector<NodeId> node_ids() const = 0;
    virtual std::vector<NodeId> fresh_neighbors(NodeId node) const = 0;
    virtual bool is_fresh_neighbor(NodeId node, NodeId neighbor) const = 0;
    /// Directional unicast over the best known sector. Returns false when
    /// the frame cannot reach `to` (no sector entry or link unusable); the
    /// frame is then lost.
    virtual bool send_control(NodeId from, NodeId to, const ControlMessage& msg) = 0;
    virtual std::size_t queue_length(NodeId node) const = 0;
    virtual std::vector<NodeId> queued_destinations(NodeId node) const = 0;
    /// Link from->to on from's stored best sector, evaluated now.
    virtual std::optional<phy::LinkState> link(NodeId from, NodeId to) const = 0;
    virtual const phy::RateTable& rate_table() const = 0;
    /// New forwarding state may have unblocked queued packets.
    virtual void kick() = 0;
};

/// Network-layer protocol hooks called by the MAC and traffic layers.
class RoutingProtocol {
public:
    virtual ~RoutingProtocol() = default;

    virtual void start() = 0;
    /// Next hop for a packet at `node` heading to `destination`; nullopt holds it.
    virtual std::optional<NodeId> next_hop(NodeId node, NodeId destination) = 0;
    virtual void on_packet_queued(NodeId node, NodeId destination) = 0;
    virtual void on_tx_outcome(NodeId node, NodeId next_hop, bool success) = 0;
    virtual void on_control(NodeId at, NodeId from, const ControlMessage& msg) = 0;

    /// Payload to piggyback on this node's TXSS (Enhanced-SSW) or nullopt for legacy.
    virtual std::optional<RouteRequestFields> sweep_payload(NodeId initiator) { (void)initiator; return std::nullopt; }
    /// Responder side of an Enhanced-SSW exchange.
    virtual std::optional<RouteReplyFields> answer_sweep(NodeId responder, NodeId initiator,
                                                         const RouteRequestFields& req)
    {
        (void)responder; (void)initiator; (void)req;
        return std::nullopt;
    }
    /// Initiator side: routing fields extracted from Enhanced-SSW feedback.
    virtual void on_sweep_reply(NodeId initiator, NodeId via, const RouteReplyFields& reply)
    {
        (void)initiator; (void)via; (void)reply;
    }
    /// All feedback for the initiator's TXSS has been processed.
    virtual void on_sweep_complete(NodeId initiator) { (void)initiator; }
};

}  // namespace mmr
