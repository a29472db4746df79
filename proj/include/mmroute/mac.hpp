#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mmroute/engine.hpp"
#include "mmroute/phy.hpp"
#include "mmroute/routing_fields.hpp"

namespace mmr::mac {

/// 802.11ad SSW frame and SSW-Feedback frame lengths in octets.
inline constexpr std::uint32_t kSswFrameBytes = 26;
inline constexpr std::uint32_t kSswFeedbackBytes = 28;
inline constexpr double kDefaultControlRate = 27.5e6;

struct SectorId {
    int index = 0;
    bool operator==(const SectorId&) const = default;
};

struct SswFrame {
    NodeId src = 0;
    SectorId sector;
    int countdown = 0;
    std::uint64_t txss_id = 0;
    std::optional<RouteRequestFields> routing_payload;

    bool enhanced() const { return routing_payload.has_value(); }
    std::uint32_t bytes() const { return kSswFrameBytes + (enhanced() ? kRouteRequestBytes : 0); }
};

struct SswFeedback {
    NodeId src = 0;
    SectorId best_sector;
    double best_snr = 0.0;
    std::uint64_t txss_id = 0;
    std::optional<RouteReplyFields> routing_payload;

    bool enhanced() const { return routing_payload.has_value(); }
    std::uint32_t bytes() const { return kSswFeedbackBytes + (enhanced() ? kRouteReplyBytes : 0); }
};

/// Airtime of `bytes` at `rate_bps`, rounded up to whole nanoseconds.
Duration airtime(std::uint64_t bytes, double rate_bps);

/// Upgrades a legacy frame to Enhanced-SSW carrying `fields`.
SswFrame attach_routing_payload(SswFrame frame, const RouteRequestFields& fields);

struct BeaconSchedule {
    Duration bi = milliseconds(100);
    Duration bhi = milliseconds(5);
    Duration dti = milliseconds(95);
    Duration txop = microseconds(300);
    int max_aggregated_mpdu = 64;

    /// Throws std::invalid_argument unless bhi + dti == bi and all spans are positive.
    void validate() const;

    SimTime bi_start(SimTime t) const { return {t.ns - t.ns % bi.ns}; }
    SimTime dti_start(SimTime t) const { return bi_start(t) + bhi; }
    SimTime dti_end(SimTime t) const { return bi_start(t) + bi; }
    bool in_dti(SimTime t) const { return t >= dti_start(t); }
    /// Earliest instant >= t inside a DTI.
    SimTime next_dti_opening(SimTime t) const { return in_dti(t) ? t : dti_start(t); }
    /// TXSS offset within the BHI for the node at `index` out of `count`.
    Duration sweep_offset(std::size_t index, std::size_t count) const
    {
        return {bhi.ns / static_cast<std::int64_t>(count) * static_cast<std::int64_t>(index)};
    }
};

struct SectorEntry {
    SectorId best_tx_sector;
    double last_snr = 0.0;
    SimTime last_updated;
};

/// Per-node table of best transmit sectors toward neighbors.
class SectorTable {
public:
    explicit SectorTable(Duration staleness = milliseconds(300)) : staleness_(staleness) {}

    void update(NodeId neighbor, SectorId sector, double snr, SimTime now);
    std::optional<SectorEntry> fresh(NodeId neighbor, SimTime now) const;
    std::vector<NodeId> fresh_neighbors(SimTime now) const;
    Duration staleness() const { return staleness_; }

private:
    Duration staleness_;
    std::map<NodeId, SectorEntry> entries_;
};

/// What one responder measured during a TXSS.
struct TxssReception {
    NodeId responder = 0;
    /// Per-sector SNR for frames received above the preamble threshold.
    std::vector<std::optional<double>> sector_snr;
    SectorId best_sector;
    double best_snr = 0.0;
};

struct TxssResult {
    std::vector<SswFrame> frames;
    std::vector<TxssReception> receptions;
    Duration duration;
};

/// Transmit sector sweep from `initiator` at time `t`: one frame per sector
/// with countdown K-1..0, measured by every candidate in quasi-omni mode.
/// Candidates that decode no frame are absent from `receptions`.
TxssResult run_txss(NodeId initiator, std::uint64_t txss_id, const std::vector<NodeId>& candidates,
                    const phy::Channel& channel, SimTime t, double control_rate,
                    const std::optional<RouteRequestFields>& payload);

/// MAC state of one station.
class MacNode {
public:
    explicit MacNode(Duration staleness) : sectors_(staleness) {}

    SectorTable& sectors() { return sectors_; }
    const SectorTable& sectors() const { return sectors_; }

    std::uint64_t open_txss(std::uint64_t id) { open_txss_ = id; return id; }
    void close_txss() { open_txss_.reset(); }
    std::optional<std::uint64_t> open_txss_id() const { return open_txss_; }

    /// Refreshes the sector entry for the responder. Returns the routing
    /// payload to hand upward, or nullopt for legacy feedback. Feedback for
    /// a TXSS this node is not running is dropped and counted.
    std::optional<RouteReplyFields> deliver_feedback(const SswFeedback& fb, SimTime now);
    bool last_feedback_accepted() const { return last_accepted_; }
    std::uint64_t anomalies() const { return anomalies_; }

private:
    SectorTable sectors_;
    std::optional<std::uint64_t> open_txss_;
    std::uint64_t anomalies_ = 0;
    bool last_accepted_ = false;
};

struct AggregatePlan {
    std::size_t mpdus = 0;
    std::uint64_t bytes = 0;
    Duration airtime;
};

/// Packs up to `queued` equal-size MPDUs into one TXOP: at most
/// max_aggregated_mpdu, payload <= rate * txop, airtime <= `window`.
AggregatePlan plan_aggregate(std::size_t queued, std::uint32_t mpdu_bytes, double rate_bps,
                             Duration txop, int max_mpdu, Duration window);

/// A node's bid for the next TXOP.
struct TxopRequest {
    NodeId node = 0;
    NodeId next_hop = 0;
    NodeId destination = 0;
    std::size_t queued = 0;
    std::uint32_t mpdu_bytes = 0;
};

class TxopClient {
public:
    virtual ~TxopClient() = default;
    virtual std::optional<TxopRequest> bid(NodeId node) = 0;
    /// Current link toward next_hop on the node's stored best sector, or
    /// nullopt when the sector table has no fresh entry.
    virtual std::optional<phy::LinkState> link_for(NodeId node, NodeId next_hop) = 0;
    virtual void transmit(const TxopRequest& req, const AggregatePlan& plan, double rate_bps) = 0;
    virtual void failed(const TxopRequest& req) = 0;
};

/// Deterministic round-robin TXOP service among backlogged nodes inside each
/// DTI. The channel is a single collision domain; a TXOP holder releases the
/// medium as soon as its aggregate ends.
class TxopScheduler {
public:
    TxopScheduler(Simulator& sim, BeaconSchedule schedule, std::vector<NodeId> nodes, TxopClient& client);

    /// Wakes the scheduler if idle. Safe to call at any time.
    void kick();

    std::uint64_t grants() const { return grants_; }
    std::uint64_t failures() const { return failures_; }

private:
    void grant();
    void arm(SimTime t);

    Simulator& sim_;
    BeaconSchedule schedule_;
    std::vector<NodeId> nodes_;
    TxopClient& client_;
    std::size_t next_ = 0;
    bool armed_ = false;
    std::uint64_t grants_ = 0;
    std::uint64_t failures_ = 0;
};

}  // namespace mmr::mac
