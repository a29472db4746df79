#include "mmroute/network.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>

namespace mmr {

namespace {

phy::Channel make_channel(const scenario::ScenarioConfig& cfg)
{
    std::map<NodeId, phy::Mobility> mobility;
    for (const auto& n : cfg.nodes)
        mobility.emplace(n.id, phy::Mobility(n.waypoints));
    std::vector<phy::Blocker> blockers;
    for (std::size_t i = 0; i < cfg.blockers.size(); ++i) {
        const auto& b = cfg.blockers[i];
        phy::Blocker blk{b.center, b.length, b.width, b.height, b.attenuation_db, b.windows};
        if (b.poisson_rate) {
            RngStream rng(cfg.seed, "blocker/" + std::to_string(i));
            blk.schedule = scenario::poisson_blockage(*b.poisson_rate, rng, cfg.duration);
        }
        blockers.push_back(std::move(blk));
    }
    return phy::Channel(cfg.phy, std::move(mobility), std::move(blockers));
}

std::uint32_t control_bytes(const ControlMessage& msg)
{
    if (std::holds_alternative<RouteRequestFields>(msg))
        return kRouteRequestBytes;
    if (std::holds_alternative<RouteReplyFields>(msg))
        return kRouteReplyBytes;
    return kHelloBytes;
}

const char* control_category(const ControlMessage& msg)
{
    if (std::holds_alternative<RouteRequestFields>(msg))
        return category::kRreq;
    if (std::holds_alternative<RouteReplyFields>(msg))
        return category::kRrep;
    return category::kHello;
}

}  // namespace

Network::Network(scenario::ScenarioConfig config)
    : config_(std::move(config)), channel_(make_channel(config_))
{
    if (auto diags = scenario::validate(config_); !diags.empty())
        throw scenario::ScenarioError(std::move(diags));
    schedule_.validate();

    ids_ = channel_.node_ids();
    const Duration staleness = schedule_.bi * 3;
    for (NodeId id : ids_)
        nodes_.emplace(id, NodeState(staleness));
    scheduler_ = std::make_unique<mac::TxopScheduler>(sim_, schedule_, ids_, *this);

    const auto& p = config_.protocol;
    if (p.type == scenario::Protocol::Aodv) {
        aodv::AodvConfig ac;
        ac.refinement = p.refinement;
        ac.loss_detect_window = p.loss_detect_window;
        ac.route_lifetime = p.route_lifetime;
        ac.net_diameter = p.net_diameter;
        ac.activity_window = staleness;
        auto r = std::make_unique<aodv::AodvRouting>(*this, ac);
        aodv_ = r.get();
        routing_ = std::move(r);
    } else {
        bcp::BcpConfig bc;
        bc.v = p.v;
        bc.hello_interval = p.hello_interval;
        bc.reroute_period = p.reroute_period;
        bc.loss_detect_window = p.loss_detect_window;
        bc.first_hello = schedule_.bhi;
        auto r = std::make_unique<bcp::BcpRouting>(*this, bc);
        bcp_ = r.get();
        routing_ = std::move(r);
    }

    report_.flows = config_.flows;
    report_.duration = config_.duration;
    report_.window = config_.throughput_window;
    for (const auto& f : config_.flows) {
        report_.generated[f.id] = 0;
        report_.dropped[f.id] = 0;
        in_flight_[f.id] = 0;
    }
    for (const char* cat : {category::kSsw, category::kEnhancedSswDelta, category::kSswFeedback,
                            category::kEnhancedFeedbackDelta, category::kRreq, category::kRrep, category::kHello}) {
        report_.overhead_bytes[cat] = 0;
        report_.frame_counts[cat] = 0;
    }
}

Network::~Network() = default;

void Network::run()
{
    if (ran_)
        throw std::logic_error("Network::run called twice");
    ran_ = true;

    const SimTime end = at(config_.duration);
    for (std::size_t i = 0; i < ids_.size(); ++i)
        schedule_sweep(ids_[i], SimTime{} + schedule_.sweep_offset(i, ids_.size()));
    for (std::size_t b = 0; b < channel_.blockers().size(); ++b) {
        for (const auto& w : channel_.blockers()[b].schedule) {
            for (auto [t, state] : {std::pair{w.on, "on"}, std::pair{w.off, "off"}}) {
                if (t > end)
                    continue;
                sim_.schedule(t, 0, EventKind::BlockageToggle, [this, b, state = std::string(state)] {
                    trace_.append(TraceRecord{sim_.now(), "blockage", 0,
                                              {{"blocker", std::to_string(b)}, {"state", state}}});
                });
            }
        }
    }
    for (std::size_t f = 0; f < config_.flows.size(); ++f)
        schedule_packet(f, 0);
    routing_->start();
    sim_.run_until(end);
}

void Network::count(const char* cat, std::uint64_t frames, std::uint64_t bytes)
{
    report_.frame_counts[cat] += frames;
    report_.overhead_bytes[cat] += bytes;
}

std::uint64_t Network::buffered(std::uint32_t flow) const
{
    std::uint64_t n = in_flight_.count(flow) ? in_flight_.at(flow) : 0;
    for (const auto& [id, ns] : nodes_)
        for (const auto& [dst, q] : ns.queues)
            for (const Packet& p : q)
                if (report_.packets[p.record].flow == flow)
                    ++n;
    return n;
}

// ---- sweeps

void Network::schedule_sweep(NodeId node, SimTime t)
{
    if (t >= at(config_.duration))
        return;
    sim_.schedule(t, node, EventKind::Timer, [this, node] {
        sweep(node);
        schedule_sweep(node, sim_.now() + schedule_.bi);
    });
}

void Network::sweep(NodeId node)
{
    const SimTime now = sim_.now();
    const double control_rate = config_.protocol.control_rate;
    const std::optional<RouteRequestFields> payload = routing_->sweep_payload(node);
    const std::uint64_t id = next_txss_id_++;
    NodeState& ns = nodes_.at(node);
    ns.mac.open_txss(id);

    const mac::TxssResult res = mac::run_txss(node, id, ids_, channel_, now, control_rate, payload);
    const auto k = static_cast<std::uint64_t>(res.frames.size());
    count(category::kSsw, k, k * mac::kSswFrameBytes);
    if (payload)
        count(category::kEnhancedSswDelta, k, k * kRouteRequestBytes);

    std::string heard;
    for (const auto& r : res.receptions)
        heard += (heard.empty() ? "" : ",") + std::to_string(r.responder);
    trace_.append(TraceRecord{now, "txss", node,
                              {{"txss_id", std::to_string(id)},
                               {"enhanced", payload ? "1" : "0"},
                               {"dest", payload ? std::to_string(payload->destination) : "-"},
                               {"responders", heard.empty() ? "-" : heard}}});

    // Responders answer one after another once the sweep is over.
    SimTime t = now + res.duration;
    for (const auto& r : res.receptions) {
        mac::SswFeedback fb{r.responder, r.best_sector, r.best_snr, id, std::nullopt};
        if (payload)
            fb.routing_payload = routing_->answer_sweep(r.responder, node, *payload);
        count(category::kSswFeedback, 1, mac::kSswFeedbackBytes);
        if (fb.enhanced())
            count(category::kEnhancedFeedbackDelta, 1, kRouteReplyBytes);
        t += mac::airtime(fb.bytes(), control_rate);
        sim_.schedule(t, node, EventKind::FrameDelivery, [this, node, fb] {
            if (auto rep = nodes_.at(node).mac.deliver_feedback(fb, sim_.now()))
                routing_->on_sweep_reply(node, fb.src, *rep);
        });
    }
    sim_.schedule(t, node, EventKind::Timer, [this, node] {
        nodes_.at(node).mac.close_txss();
        routing_->on_sweep_complete(node);
        kick();
    });
}

// ---- traffic

void Network::schedule_packet(std::size_t flow_index, std::uint64_t k)
{
    const traffic::Flow& f = config_.flows[flow_index];
    const SimTime t = f.creation_time(k);
    if (t >= f.stop || t >= at(config_.duration))
        return;
    sim_.schedule(t, f.src, EventKind::TrafficTick, [this, flow_index, k] {
        const traffic::Flow& fl = config_.flows[flow_index];
        report_.packets.push_back(traffic::PacketRecord{fl.id, k, sim_.now(), std::nullopt, 0});
        ++report_.generated[fl.id];
        enqueue(fl.src, Packet{report_.packets.size() - 1, fl.dst, fl.packet_size});
        schedule_packet(flow_index, k + 1);
    });
}

void Network::enqueue(NodeId node, Packet p)
{
    traffic::PacketRecord& rec = report_.packets[p.record];
    if (node == p.dst) {
        rec.delivered_at = sim_.now();
        return;
    }
    NodeState& ns = nodes_.at(node);
    if (ns.queued >= config_.protocol.queue_capacity) {
        ++report_.dropped[rec.flow];
        const std::int64_t bi = sim_.now().ns / schedule_.bi.ns;
        if (ns.last_drop_bi != bi) {
            ns.last_drop_bi = bi;
            trace_.append(TraceRecord{sim_.now(), "drop", node,
                                      {{"flow", std::to_string(rec.flow)}, {"queue", std::to_string(ns.queued)}}});
        }
        return;
    }
    ns.queues[p.dst].push_back(p);
    ++ns.queued;
    ns.max_queue = std::max(ns.max_queue, ns.queued);
    routing_->on_packet_queued(node, p.dst);
    kick();
}

// ---- RoutingHost

std::vector<NodeId> Network::fresh_neighbors(NodeId node) const
{
    return nodes_.at(node).mac.sectors().fresh_neighbors(sim_.now());
}

bool Network::is_fresh_neighbor(NodeId node, NodeId neighbor) const
{
    return nodes_.at(node).mac.sectors().fresh(neighbor, sim_.now()).has_value();
}

bool Network::send_control(NodeId from, NodeId to, const ControlMessage& msg)
{
    auto entry = nodes_.at(from).mac.sectors().fresh(to, sim_.now());
    if (!entry)
        return false;
    const std::uint32_t bytes = control_bytes(msg);
    count(control_category(msg), 1, bytes);
    const phy::LinkState ls = channel_.evaluate(from, to, entry->best_tx_sector.index, sim_.now());
    if (!ls.usable)
        return false;
    sim_.schedule_in(mac::airtime(bytes, config_.protocol.control_rate), to, EventKind::FrameDelivery,
                     [this, from, to, msg] { routing_->on_control(to, from, msg); });
    return true;
}

std::size_t Network::queue_length(NodeId node) const
{
    return nodes_.at(node).queued;
}

std::vector<NodeId> Network::queued_destinations(NodeId node) const
{
    std::vector<NodeId> out;
    for (const auto& [dst, q] : nodes_.at(node).queues)
        if (!q.empty())
            out.push_back(dst);
    return out;
}

std::optional<phy::LinkState> Network::link(NodeId from, NodeId to) const
{
    auto entry = nodes_.at(from).mac.sectors().fresh(to, sim_.now());
    if (!entry)
        return std::nullopt;
    return channel_.evaluate(from, to, entry->best_tx_sector.index, sim_.now());
}

void Network::kick()
{
    scheduler_->kick();
}

// ---- TxopClient

std::optional<mac::TxopRequest> Network::bid(NodeId node)
{
    NodeState& ns = nodes_.at(node);
    for (auto& [dst, q] : ns.queues) {
        if (q.empty())
            continue;
        auto hop = routing_->next_hop(node, dst);
        if (!hop)
            continue;
        return mac::TxopRequest{node, *hop, dst, q.size(), q.front().bytes};
    }
    return std::nullopt;
}

std::optional<phy::LinkState> Network::link_for(NodeId node, NodeId next_hop)
{
    return link(node, next_hop);
}

void Network::transmit(const mac::TxopRequest& req, const mac::AggregatePlan& plan, double rate_bps)
{
    (void)rate_bps;
    NodeState& ns = nodes_.at(req.node);
    auto& q = ns.queues.at(req.destination);
    std::vector<Packet> batch;
    batch.reserve(plan.mpdus);
    for (std::size_t i = 0; i < plan.mpdus && !q.empty(); ++i) {
        batch.push_back(q.front());
        q.pop_front();
        ++in_flight_[report_.packets[batch.back().record].flow];
    }
    ns.queued -= batch.size();
    routing_->on_tx_outcome(req.node, req.next_hop, true);

    const NodeId hop = req.next_hop;
    sim_.schedule_in(plan.airtime, hop, EventKind::FrameDelivery, [this, hop, batch = std::move(batch)] {
        for (const Packet& p : batch) {
            traffic::PacketRecord& rec = report_.packets[p.record];
            --in_flight_[rec.flow];
            ++rec.hops_traversed;
            enqueue(hop, p);
        }
    });
}

void Network::failed(const mac::TxopRequest& req)
{
    routing_->on_tx_outcome(req.node, req.next_hop, false);
}

// ---- top level

RunOutput run_scenario(const scenario::ScenarioConfig& config)
{
    Network net(config);
    net.run();
    return RunOutput{net.report(), net.trace_log()};
}

void write_outputs(const RunOutput& out, const std::filesystem::path& dir, bool with_trace)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("throughput.csv");
        traffic::write_throughput_csv(out.report, f);
    }
    {
        auto f = open("delays.csv");
        traffic::write_delays_csv(out.report, f);
    }
    {
        auto f = open("cdf.csv");
        traffic::write_cdf_csv(out.report, f);
    }
    {
        auto f = open("overhead.csv");
        traffic::write_overhead_csv(out.report, f);
    }
    if (with_trace) {
        auto f = open("trace.log");
        out.trace.write(f);
    }
}

}  // namespace mmr
