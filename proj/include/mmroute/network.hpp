#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "mmroute/mac.hpp"
#include "mmroute/routing.hpp"
#include "mmroute/routing_aodv.hpp"
#include "mmroute/routing_bcp.hpp"
#include "mmroute/scenario.hpp"
#include "mmroute/trace.hpp"
#include "mmroute/traffic_metrics.hpp"

namespace mmr {

/// Overhead and frame-count categories.
namespace category {
inline constexpr const char* kSsw = "ssw";
inline constexpr const char* kEnhancedSswDelta = "enhanced_ssw_delta";
inline constexpr const char* kSswFeedback = "ssw_feedback";
inline constexpr const char* kEnhancedFeedbackDelta = "enhanced_feedback_delta";
inline constexpr const char* kRreq = "rreq";
inline constexpr const char* kRrep = "rrep";
inline constexpr const char* kHello = "hello";
}  // namespace category

/// One simulated run: channel, per-node MAC and queues, the selected
/// routing protocol and CBR sources.
class Network final : public RoutingHost, public mac::TxopClient {
public:
    explicit Network(scenario::ScenarioConfig config);
    ~Network() override;
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Runs to the configured duration. Call once.
    void run();

    const scenario::ScenarioConfig& config() const { return config_; }
    const traffic::MetricsReport& report() const { return report_; }
    const TraceLog& trace_log() const { return trace_; }
    const phy::Channel& channel() const { return channel_; }
    const mac::MacNode& mac_node(NodeId node) const { return nodes_.at(node).mac; }
    const mac::TxopScheduler& scheduler() const { return *scheduler_; }
    aodv::AodvRouting* aodv() { return aodv_; }
    bcp::BcpRouting* bcp() { return bcp_; }
    /// Packets of `flow` still buffered at any node or on the air.
    std::uint64_t buffered(std::uint32_t flow) const;
    std::size_t max_queue_length(NodeId node) const { return nodes_.at(node).max_queue; }
    std::uint64_t sweeps() const { return next_txss_id_; }

    // RoutingHost
    Simulator& sim() override { return sim_; }
    TraceLog& trace() override { return trace_; }
    std::vector<NodeId> node_ids() const override { return ids_; }
    std::vector<NodeId> fresh_neighbors(NodeId node) const override;
    bool is_fresh_neighbor(NodeId node, NodeId neighbor) const override;
    bool send_control(NodeId from, NodeId to, const ControlMessage& msg) override;
    std::size_t queue_length(NodeId node) const override;
    std::vector<NodeId> queued_destinations(NodeId node) const override;
    std::optional<phy::LinkState> link(NodeId from, NodeId to) const override;
    const phy::RateTable& rate_table() const override { return channel_.config().rate_table; }
    void kick() override;

    // TxopClient
    std::optional<mac::TxopRequest> bid(NodeId node) override;
    std::optional<phy::LinkState> link_for(NodeId node, NodeId next_hop) override;
    void transmit(const mac::TxopRequest& req, const mac::AggregatePlan& plan, double rate_bps) override;
    void failed(const mac::TxopRequest& req) override;

private:
    struct Packet {
        std::size_t record = 0;
        NodeId dst = 0;
        std::uint32_t bytes = 0;
    };
    struct NodeState {
        explicit NodeState(Duration staleness) : mac(staleness) {}
        mac::MacNode mac;
        std::map<NodeId, std::deque<Packet>> queues;
        std::size_t queued = 0;
        std::size_t max_queue = 0;
        std::optional<std::int64_t> last_drop_bi;
    };

    void schedule_sweep(NodeId node, SimTime t);
    void sweep(NodeId node);
    void schedule_packet(std::size_t flow_index, std::uint64_t k);
    void enqueue(NodeId node, Packet p);
    void count(const char* cat, std::uint64_t frames, std::uint64_t bytes);

    scenario::ScenarioConfig config_;
    mac::BeaconSchedule schedule_;
    Simulator sim_;
    TraceLog trace_;
    phy::Channel channel_;
    std::vector<NodeId> ids_;
    std::map<NodeId, NodeState> nodes_;
    std::unique_ptr<mac::TxopScheduler> scheduler_;
    std::unique_ptr<RoutingProtocol> routing_;
    aodv::AodvRouting* aodv_ = nullptr;
    bcp::BcpRouting* bcp_ = nullptr;
    traffic::MetricsReport report_;
    std::map<std::uint32_t, std::uint64_t> in_flight_;
    std::uint64_t next_txss_id_ = 0;
    bool ran_ = false;
};

struct RunOutput {
    traffic::MetricsReport report;
    TraceLog trace;
};

RunOutput run_scenario(const scenario::ScenarioConfig& config);

/// Writes the four CSV files, plus trace.log when `with_trace`.
void write_outputs(const RunOutput& out, const std::filesystem::path& dir, bool with_trace);

}  // namespace mmr
