#include "mmroute/routing_bcp.hpp"

#include <sstream>
#include <stdexcept>
#include <string>

namespace mmr::bcp {

bool BackpressureState::candidate(NodeId j, SimTime now) const
{
    auto it = neighbors.find(j);
    if (it == neighbors.end())
        return false;
    const NeighborEstimate& n = it->second;
    return n.heard && !n.link_down && n.rate_est > 0.0 && now - n.last_hello_at <= staleness();
}

double compute_weight(const BackpressureState& state, NodeId j)
{
    const NeighborEstimate& n = state.neighbors.at(j);
    const double dq = static_cast<double>(state.q_local) - static_cast<double>(n.q_remote);
    return (dq - state.v * n.etx.etx()) * n.rate_est;
}

Decision select_next_hop(const BackpressureState& state, SimTime now)
{
    Decision d;
    d.t = now;
    d.q_local = state.q_local;
    d.v = state.v;
    std::optional<std::size_t> best;
    for (const auto& [j, n] : state.neighbors) {
        if (!state.candidate(j, now))
            continue;
        d.candidates.push_back(Candidate{j, n.q_remote, n.etx.etx(), n.rate_est, compute_weight(state, j)});
        // Neighbors iterate in ascending id order, so strict > keeps the lowest id on ties.
        if (!best || d.candidates.back().weight > d.candidates[*best].weight)
            best = d.candidates.size() - 1;
    }
    if (best && d.candidates[*best].weight > 0.0)
        d.chosen = d.candidates[*best].neighbor;
    return d;
}

void handle_hello(BackpressureState& state, const HelloMessage& msg, double measured_rate, SimTime now)
{
    NeighborEstimate& n = state.neighbors[msg.src];
    n.q_remote = msg.queue_len;
    n.rate_est = measured_rate;
    n.last_hello_at = now;
    n.heard = true;
    n.link_down = false;
    n.first_failure.reset();
}

void update_etx(BackpressureState& state, NodeId j, bool success)
{
    state.neighbors[j].etx.update(success);
}

BcpRouting::BcpRouting(RoutingHost& host, BcpConfig config) : host_(host), config_(config)
{
    if (config_.v < 0.0)
        throw std::invalid_argument("bcp: V must be non-negative");
    if (config_.hello_interval.ns <= 0 || config_.reroute_period.ns <= 0)
        throw std::invalid_argument("bcp: hello interval and reroute period must be positive");
    for (NodeId id : host_.node_ids()) {
        NodeBcp& nb = nodes_[id];
        nb.state.v = config_.v;
        nb.state.hello_interval = config_.hello_interval;
        nb.state.reroute_period = config_.reroute_period;
    }
}

BcpRouting::NodeBcp& BcpRouting::node_state(NodeId node)
{
    auto it = nodes_.find(node);
    if (it == nodes_.end())
        throw std::out_of_range("bcp: unknown node " + std::to_string(node));
    return it->second;
}

const BackpressureState& BcpRouting::state(NodeId node) const
{
    return nodes_.at(node).state;
}

std::uint64_t BcpRouting::hello_rounds(NodeId node) const
{
    return nodes_.at(node).rounds;
}

void BcpRouting::start()
{
    const SimTime first = at(config_.first_hello);
    for (auto& [id, _] : nodes_) {
        schedule_hello(id, first);
        schedule_reroute(id, first);
    }
}

void BcpRouting::schedule_hello(NodeId node, SimTime t)
{
    host_.sim().schedule(t, node, EventKind::Timer, [this, node] {
        emit_hello(node);
        schedule_hello(node, host_.sim().now() + config_.hello_interval);
    });
}

void BcpRouting::schedule_reroute(NodeId node, SimTime t)
{
    host_.sim().schedule(t, node, EventKind::Timer, [this, node] {
        reevaluate(node);
        schedule_reroute(node, host_.sim().now() + config_.reroute_period);
    });
}

std::size_t BcpRouting::emit_hello(NodeId node)
{
    NodeBcp& nb = node_state(node);
    ++nb.rounds;
    const SimTime now = host_.sim().now();
    std::size_t sent = 0;
    for (NodeId j : host_.fresh_neighbors(node)) {
        double advertised = 0.0;
        if (auto l = host_.link(node, j); l && l->rate_bps)
            advertised = *l->rate_bps;
        HelloMessage msg{node, static_cast<std::uint32_t>(host_.queue_length(node)), advertised, now};
        ++counters_.hello_sent;
        ++sent;
        host_.send_control(node, j, msg);
    }
    host_.trace().append(TraceRecord{now, "hello_round", node, {{"sent", std::to_string(sent)}}});
    return sent;
}

const Decision& BcpRouting::reevaluate(NodeId node)
{
    NodeBcp& nb = node_state(node);
    nb.state.q_local = static_cast<std::uint32_t>(host_.queue_length(node));
    Decision d = select_next_hop(nb.state, host_.sim().now());
    d.node = node;
    ++counters_.decisions;

    std::ostringstream weights;
    for (std::size_t i = 0; i < d.candidates.size(); ++i)
        weights << (i ? ";" : "") << d.candidates[i].neighbor << ':' << d.candidates[i].weight;
    host_.trace().append(TraceRecord{d.t, "bcp_decision", node,
                                     {{"q", std::to_string(d.q_local)},
                                      {"weights", weights.str()},
                                      {"chosen", d.chosen ? std::to_string(*d.chosen) : "hold"}}});
    const bool unblocked = d.chosen && d.chosen != nb.chosen;
    nb.chosen = d.chosen;
    log_.push_back(std::move(d));
    if (unblocked)
        host_.kick();
    return log_.back();
}

std::optional<NodeId> BcpRouting::next_hop(NodeId node, NodeId destination)
{
    (void)destination;
    return node_state(node).chosen;
}

void BcpRouting::on_packet_queued(NodeId node, NodeId destination)
{
    (void)node;
    (void)destination;
}

void BcpRouting::on_tx_outcome(NodeId node, NodeId next_hop, bool success)
{
    NodeBcp& nb = node_state(node);
    update_etx(nb.state, next_hop, success);
    NeighborEstimate& n = nb.state.neighbors[next_hop];
    const SimTime now = host_.sim().now();
    if (success) {
        n.first_failure.reset();
        return;
    }
    if (!n.first_failure) {
        n.first_failure = now;
        return;
    }
    if (!n.link_down && now - *n.first_failure >= config_.loss_detect_window) {
        n.link_down = true;
        host_.trace().append(TraceRecord{now, "link_lost", node, {{"neighbor", std::to_string(next_hop)}}});
        reevaluate(node);
    }
}

void BcpRouting::on_control(NodeId at, NodeId from, const ControlMessage& msg)
{
    const auto* hello = std::get_if<HelloMessage>(&msg);
    if (!hello || !host_.is_fresh_neighbor(at, from))
        return;
    double measured = 0.0;
    if (auto l = host_.link(from, at); l && l->usable)
        measured = phy::rate_for_snr(l->snr_db, host_.rate_table()).value_or(0.0);
    ++counters_.hello_received;
    handle_hello(node_state(at).state, *hello, measured, host_.sim().now());
    reevaluate(at);
}

}  // namespace mmr::bcp
