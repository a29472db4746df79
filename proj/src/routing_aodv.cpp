#include "mmroute/routing_aodv.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mmr::aodv {

bool RoutingTable::offer(const RoutingTableEntry& candidate, SimTime now)
{
    auto it = entries_.find(candidate.destination);
    if (it == entries_.end()) {
        entries_.emplace(candidate.destination, candidate);
        return true;
    }
    const RoutingTableEntry& cur = it->second;
    bool install = false;
    if (!cur.usable(now))
        install = candidate.dest_seq >= cur.dest_seq;
    else
        install = candidate.dest_seq > cur.dest_seq ||
                  (candidate.dest_seq == cur.dest_seq && candidate.hop_count < cur.hop_count);
    if (install)
        it->second = candidate;
    return install;
}

std::optional<RoutingTableEntry> RoutingTable::lookup(NodeId destination, SimTime now) const
{
    auto it = entries_.find(destination);
    if (it == entries_.end() || !it->second.usable(now))
        return std::nullopt;
    return it->second;
}

std::optional<RoutingTableEntry> RoutingTable::find(NodeId destination) const
{
    auto it = entries_.find(destination);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

std::vector<NodeId> RoutingTable::invalidate_via(NodeId next_hop, SimTime now)
{
    std::vector<NodeId> hit;
    for (auto& [dest, e] : entries_) {
        if (e.next_hop == next_hop && e.usable(now)) {
            e.valid = false;
            ++e.dest_seq;
            hit.push_back(dest);
        }
    }
    return hit;
}

AodvRouting::AodvRouting(RoutingHost& host, AodvConfig config) : host_(host), config_(config)
{
    for (NodeId id : host_.node_ids())
        nodes_[id];
}

AodvRouting::NodeRouting& AodvRouting::state(NodeId node)
{
    auto it = nodes_.find(node);
    if (it == nodes_.end())
        throw std::out_of_range("aodv: unknown node " + std::to_string(node));
    return it->second;
}

const AodvRouting::NodeRouting& AodvRouting::state(NodeId node) const
{
    auto it = nodes_.find(node);
    if (it == nodes_.end())
        throw std::out_of_range("aodv: unknown node " + std::to_string(node));
    return it->second;
}

void AodvRouting::start() {}

void AodvRouting::trace_entry(NodeId node, const RoutingTableEntry& e, const char* cause)
{
    host_.trace().append(TraceRecord{now(), "rt", node,
                                     {{"dest", std::to_string(e.destination)},
                                      {"next_hop", std::to_string(e.next_hop)},
                                      {"hops", std::to_string(e.hop_count)},
                                      {"seq", std::to_string(e.dest_seq)},
                                      {"expires_ns", std::to_string(e.expires_at.ns)},
                                      {"valid", e.valid ? "1" : "0"},
                                      {"cause", cause}}});
    if (observer_)
        observer_(node, e);
}

bool AodvRouting::offer(NodeId node, const RoutingTableEntry& candidate, const char* cause)
{
    if (candidate.destination == node)
        return false;
    NodeRouting& st = state(node);
    if (!st.table.offer(candidate, now()))
        return false;
    trace_entry(node, candidate, cause);
    return true;
}

void AodvRouting::seed_route(NodeId node, const RoutingTableEntry& entry)
{
    offer(node, entry, "seed");
}

void AodvRouting::send(NodeId from, NodeId to, const ControlMessage& msg)
{
    if (std::holds_alternative<RouteRequestFields>(msg))
        ++counters_.rreq_sent;
    else if (std::holds_alternative<RouteReplyFields>(msg))
        ++counters_.rrep_sent;
    host_.send_control(from, to, msg);
}

std::optional<NodeId> AodvRouting::next_hop(NodeId node, NodeId destination)
{
    NodeRouting& st = state(node);
    if (auto e = st.table.lookup(destination, now())) {
        if (host_.is_fresh_neighbor(node, e->next_hop))
            return e->next_hop;
        link_lost(node, e->next_hop);
        return std::nullopt;
    }
    if (!st.pending_discovery.contains(destination))
        originate_rreq(node, destination);
    return std::nullopt;
}

void AodvRouting::on_packet_queued(NodeId node, NodeId destination)
{
    NodeRouting& st = state(node);
    st.last_activity[destination] = now();
    if (!st.table.lookup(destination, now()) && !st.pending_discovery.contains(destination))
        originate_rreq(node, destination);
}

void AodvRouting::on_tx_outcome(NodeId node, NodeId next_hop, bool success)
{
    NodeRouting& st = state(node);
    if (success) {
        st.first_failure.erase(next_hop);
        return;
    }
    auto [it, fresh] = st.first_failure.try_emplace(next_hop, now());
    if (!fresh && now() - it->second >= config_.loss_detect_window) {
        st.first_failure.erase(it);
        link_lost(node, next_hop);
    }
}

void AodvRouting::link_lost(NodeId node, NodeId neighbor)
{
    NodeRouting& st = state(node);
    const std::vector<NodeId> lost = st.table.invalidate_via(neighbor, now());
    if (lost.empty())
        return;
    ++counters_.route_losses;
    host_.trace().append(TraceRecord{now(), "link_lost", node, {{"neighbor", std::to_string(neighbor)}}});
    for (NodeId dest : lost)
        trace_entry(node, *st.table.find(dest), "link-lost");
    const std::vector<NodeId> waiting = host_.queued_destinations(node);
    for (NodeId dest : lost)
        if (std::find(waiting.begin(), waiting.end(), dest) != waiting.end())
            originate_rreq(node, dest);
}

RouteRequestFields AodvRouting::originate_rreq(NodeId origin, NodeId destination)
{
    NodeRouting& st = state(origin);
    RouteRequestFields req;
    req.origin = origin;
    req.destination = destination;
    req.origin_seq = ++st.own_seq;
    req.request_id = ++st.next_request_id;
    if (auto e = st.table.find(destination))
        req.dest_seq = e->dest_seq;
    req.hop_count = 0;
    req.ttl = config_.net_diameter;
    req.route_metric = 0;

    st.seen_requests.emplace(origin, req.request_id);
    st.pending_discovery.insert(destination);
    stash_for_sweep(origin, req);

    const std::vector<NodeId> neighbors = host_.fresh_neighbors(origin);
    host_.trace().append(TraceRecord{now(), "rreq_originate", origin,
                                     {{"dest", std::to_string(destination)},
                                      {"request_id", std::to_string(req.request_id)},
                                      {"neighbors", std::to_string(neighbors.size())}}});
    for (NodeId n : neighbors)
        send(origin, n, req);
    return req;
}

void AodvRouting::handle_rreq(NodeId at, NodeId from, const RouteRequestFields& req)
{
    NodeRouting& st = state(at);
    if (req.origin == at)
        return;
    if (!st.seen_requests.emplace(req.origin, req.request_id).second) {
        ++counters_.duplicate_rreq;
        return;
    }
    const std::uint32_t hops = req.hop_count + 1;
    offer(at, RoutingTableEntry{req.origin, from, hops, req.origin_seq, now() + config_.route_lifetime, true},
          "reverse");

    if (at == req.destination) {
        st.own_seq = std::max(st.own_seq, req.dest_seq);
        send(at, from, RouteReplyFields{at, st.own_seq, 0, at, req.origin});
        return;
    }
    if (auto e = st.table.lookup(req.destination, now());
        e && e->dest_seq >= req.dest_seq && e->next_hop != from && host_.is_fresh_neighbor(at, e->next_hop)) {
        send(at, from, RouteReplyFields{req.destination, e->dest_seq, e->hop_count, at, req.origin});
        return;
    }
    if (req.ttl <= 1)
        return;
    RouteRequestFields fwd = req;
    fwd.hop_count = hops;
    fwd.route_metric = hops;
    fwd.ttl = req.ttl - 1;
    for (NodeId n : host_.fresh_neighbors(at))
        if (n != from && n != req.origin)
            send(at, n, fwd);
}

void AodvRouting::handle_rrep(NodeId at, NodeId from, const RouteReplyFields& rep)
{
    const std::uint32_t hops = rep.hop_count_to_dest + 1;
    const bool changed = offer(
        at, RoutingTableEntry{rep.destination, from, hops, rep.dest_seq, now() + config_.route_lifetime, true},
        "rrep");
    if (changed)
        route_installed(at, rep.destination);
    if (at == rep.origin)
        return;
    NodeRouting& st = state(at);
    auto back = st.table.lookup(rep.origin, now());
    if (!back)
        return;
    RouteReplyFields fwd = rep;
    fwd.hop_count_to_dest = hops;
    send(at, back->next_hop, fwd);
}

void AodvRouting::route_installed(NodeId node, NodeId destination)
{
    NodeRouting& st = state(node);
    st.pending_discovery.erase(destination);
    st.first_failure.clear();
    if (st.stash.pending && st.stash.pending->destination == destination)
        st.stash.pending.reset();
    host_.kick();
}

void AodvRouting::on_control(NodeId at, NodeId from, const ControlMessage& msg)
{
    if (const auto* req = std::get_if<RouteRequestFields>(&msg))
        handle_rreq(at, from, *req);
    else if (const auto* rep = std::get_if<RouteReplyFields>(&msg))
        handle_rrep(at, from, *rep);
}

void AodvRouting::stash_for_sweep(NodeId node, const RouteRequestFields& req)
{
    NodeRouting& st = state(node);
    st.stash.pending = req;
    st.stash.stashed_at = now();
    ++counters_.stashed;
}

std::optional<RouteRequestFields> AodvRouting::refine_policy(NodeId node)
{
    if (!config_.refinement)
        return std::nullopt;
    NodeRouting& st = state(node);
    const SimTime t = now();
    const std::vector<NodeId> waiting = host_.queued_destinations(node);
    std::vector<NodeId> candidates;
    for (const auto& [dest, e] : st.table.entries()) {
        if (!e.usable(t) || e.hop_count <= 1)
            continue;
        const bool queued = std::find(waiting.begin(), waiting.end(), dest) != waiting.end();
        auto act = st.last_activity.find(dest);
        const bool recent = act != st.last_activity.end() && t - act->second <= config_.activity_window;
        if (queued || recent)
            candidates.push_back(dest);
    }
    if (candidates.empty())
        return std::nullopt;
    const NodeId dest = candidates[st.refine_cursor++ % candidates.size()];
    const RoutingTableEntry e = *st.table.lookup(dest, t);
    RouteRequestFields req;
    req.origin = node;
    req.destination = dest;
    req.origin_seq = st.own_seq;
    req.dest_seq = e.dest_seq;
    req.request_id = ++st.next_request_id;
    req.hop_count = 0;
    req.ttl = 1;
    req.route_metric = e.hop_count;
    stash_for_sweep(node, req);
    return req;
}

std::optional<RouteRequestFields> AodvRouting::sweep_payload(NodeId initiator)
{
    refine_policy(initiator);
    NodeRouting& st = state(initiator);
    std::optional<RouteRequestFields> out = std::move(st.stash.pending);
    st.stash.pending.reset();
    return out;
}

std::optional<RouteReplyFields> AodvRouting::respond_enhanced_ssw(NodeId responder, NodeId initiator,
                                                                  const RouteRequestFields& payload) const
{
    const NodeRouting& st = state(responder);
    if (responder == payload.destination)
        return RouteReplyFields{responder, st.own_seq, 0, responder, payload.origin};
    auto e = st.table.lookup(payload.destination, now());
    if (!e || e->next_hop == initiator)
        return std::nullopt;
    return RouteReplyFields{payload.destination, e->dest_seq, e->hop_count, responder, payload.origin};
}

std::optional<RouteReplyFields> AodvRouting::answer_sweep(NodeId responder, NodeId initiator,
                                                          const RouteRequestFields& req)
{
    return respond_enhanced_ssw(responder, initiator, req);
}

bool AodvRouting::apply_refinement(NodeId initiator, const RouteReplyFields& reply, NodeId via)
{
    if (reply.destination == initiator)
        return false;
    const RoutingTableEntry candidate{reply.destination, via, reply.hop_count_to_dest + 1, reply.dest_seq,
                                      now() + config_.route_lifetime, true};
    if (!offer(initiator, candidate, "refinement"))
        return false;
    ++counters_.refinements;
    route_installed(initiator, reply.destination);
    return true;
}

void AodvRouting::on_sweep_reply(NodeId initiator, NodeId via, const RouteReplyFields& reply)
{
    apply_refinement(initiator, reply, via);
}

void AodvRouting::on_sweep_complete(NodeId initiator)
{
    NodeRouting& st = state(initiator);
    const std::vector<NodeId> pending(st.pending_discovery.begin(), st.pending_discovery.end());
    const std::vector<NodeId> waiting = host_.queued_destinations(initiator);
    for (NodeId dest : pending) {
        if (st.table.lookup(dest, now())) {
            st.pending_discovery.erase(dest);
            continue;
        }
        if (std::find(waiting.begin(), waiting.end(), dest) != waiting.end())
            originate_rreq(initiator, dest);
        else
            st.pending_discovery.erase(dest);
    }
}

}  // namespace mmr::aodv
