#pragma once

// Minimal RoutingHost over an explicit adjacency list: control frames reach
// a neighbor after a fixed 1 us, links have a fixed SNR.

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mmroute/routing.hpp"

namespace mmr::testing {

struct SentFrame {
    SimTime t;
    NodeId from;
    NodeId to;
    ControlMessage msg;
};

class FakeHost : public RoutingHost {
public:
    explicit FakeHost(std::vector<NodeId> ids) : ids_(std::move(ids)) {}

    void connect(NodeId a, NodeId b, double snr_db = 20.0)
    {
        snr_[{a, b}] = snr_db;
        snr_[{b, a}] = snr_db;
    }
    void disconnect(NodeId a, NodeId b)
    {
        snr_.erase({a, b});
        snr_.erase({b, a});
    }
    void set_protocol(RoutingProtocol* p) { proto_ = p; }
    void set_queue(NodeId node, std::size_t len, std::vector<NodeId> dests = {})
    {
        qlen_[node] = len;
        qdest_[node] = std::move(dests);
    }

    Simulator& sim() override { return sim_; }
    TraceLog& trace() override { return trace_; }
    std::vector<NodeId> node_ids() const override { return ids_; }
    std::vector<NodeId> fresh_neighbors(NodeId node) const override
    {
        std::vector<NodeId> out;
        for (const auto& [pair, snr] : snr_)
            if (pair.first == node)
                out.push_back(pair.second);
        return out;
    }
    bool is_fresh_neighbor(NodeId node, NodeId neighbor) const override { return snr_.contains({node, neighbor}); }
    bool send_control(NodeId from, NodeId to, const ControlMessage& msg) override
    {
        sent.push_back({sim_.now(), from, to, msg});
        if (!snr_.contains({from, to}))
            return false;
        sim_.schedule_in(microseconds(1), to, EventKind::FrameDelivery, [this, from, to, msg] {
            if (proto_)
                proto_->on_control(to, from, msg);
        });
        return true;
    }
    std::size_t queue_length(NodeId node) const override
    {
        auto it = qlen_.find(node);
        return it == qlen_.end() ? 0 : it->second;
    }
    std::vector<NodeId> queued_destinations(NodeId node) const override
    {
        auto it = qdest_.find(node);
        return it == qdest_.end() ? std::vector<NodeId>{} : it->second;
    }
    std::optional<phy::LinkState> link(NodeId from, NodeId to) const override
    {
        auto it = snr_.find({from, to});
        if (it == snr_.end())
            return std::nullopt;
        phy::LinkState ls;
        ls.snr_db = it->second;
        ls.usable = true;
        ls.rate_bps = phy::rate_for_snr(it->second, table_);
        return ls;
    }
    const phy::RateTable& rate_table() const override { return table_; }
    void kick() override { ++kicks; }

    std::vector<SentFrame> sent;
    int kicks = 0;

private:
    Simulator sim_;
    TraceLog trace_;
    std::vector<NodeId> ids_;
    std::map<std::pair<NodeId, NodeId>, double> snr_;
    std::map<NodeId, std::size_t> qlen_;
    std::map<NodeId, std::vector<NodeId>> qdest_;
    phy::RateTable table_ = phy::default_rate_table();
    RoutingProtocol* proto_ = nullptr;
};

}  // namespace mmr::testing
