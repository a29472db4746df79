#include "mmroute/mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmr::mac {

Duration airtime(std::uint64_t bytes, double rate_bps)
{
    if (!(rate_bps > 0.0))
        throw std::invalid_argument("airtime needs a positive rate");
    const long double ns = static_cast<long double>(bytes) * 8.0L * 1e9L / rate_bps;
    return {static_cast<std::int64_t>(std::ceil(ns - 1e-9L))};
}

SswFrame attach_routing_payload(SswFrame frame, const RouteRequestFields& fields)
{
    frame.routing_payload = fields;
    return frame;
}

void BeaconSchedule::validate() const
{
    if (bi.ns <= 0 || bhi.ns <= 0 || dti.ns <= 0 || txop.ns <= 0)
        throw std::invalid_argument("beacon schedule spans must be positive");
    if (bhi + dti != bi)
        throw std::invalid_argument("BHI + DTI must equal BI");
    if (max_aggregated_mpdu <= 0)
        throw std::invalid_argument("max aggregated MPDU must be positive");
}

void SectorTable::update(NodeId neighbor, SectorId sector, double snr, SimTime now)
{
    entries_[neighbor] = SectorEntry{sector, snr, now};
}

std::optional<SectorEntry> SectorTable::fresh(NodeId neighbor, SimTime now) const
{
    auto it = entries_.find(neighbor);
    if (it == entries_.end() || now - it->second.last_updated > staleness_)
        return std::nullopt;
    return it->second;
}

std::vector<NodeId> SectorTable::fresh_neighbors(SimTime now) const
{
    std::vector<NodeId> out;
    for (const auto& [id, e] : entries_)
        if (now - e.last_updated <= staleness_)
            out.push_back(id);
    return out;
}

TxssResult run_txss(NodeId initiator, std::uint64_t txss_id, const std::vector<NodeId>& candidates,
                    const phy::Channel& channel, SimTime t, double control_rate,
                    const std::optional<RouteRequestFields>& payload)
{
    const int k = channel.config().antenna.sectors;
    TxssResult out;
    out.frames.reserve(k);
    for (int s = 0; s < k; ++s) {
        SswFrame f{initiator, SectorId{s}, k - 1 - s, txss_id, std::nullopt};
        if (payload)
            f = attach_routing_payload(f, *payload);
        out.frames.push_back(f);
        out.duration = out.duration + airtime(f.bytes(), control_rate);
    }

    for (NodeId r : candidates) {
        if (r == initiator)
            continue;
        TxssReception rx;
        rx.responder = r;
        rx.sector_snr.resize(k);
        bool any = false;
        for (int s = 0; s < k; ++s) {
            const phy::LinkState ls = channel.evaluate(initiator, r, s, t);
            if (!ls.usable)
                continue;
            rx.sector_snr[s] = ls.snr_db;
            if (!any || ls.snr_db > rx.best_snr) {
                rx.best_sector = SectorId{s};
                rx.best_snr = ls.snr_db;
            }
            any = true;
        }
        if (any)
            out.receptions.push_back(std::move(rx));
    }
    return out;
}

std::optional<RouteReplyFields> MacNode::deliver_feedback(const SswFeedback& fb, SimTime now)
{
    if (!open_txss_ || *open_txss_ != fb.txss_id) {
        ++anomalies_;
        last_accepted_ = false;
        return std::nullopt;
    }
    last_accepted_ = true;
    sectors_.update(fb.src, fb.best_sector, fb.best_snr, now);
    return fb.routing_payload;
}

AggregatePlan plan_aggregate(std::size_t queued, std::uint32_t mpdu_bytes, double rate_bps,
                             Duration txop, int max_mpdu, Duration window)
{
    AggregatePlan plan;
    if (queued == 0 || mpdu_bytes == 0 || !(rate_bps > 0.0))
        return plan;
    const long double budget_bytes = static_cast<long double>(rate_bps) * txop.seconds() / 8.0L;
    const long double window_bytes = static_cast<long double>(rate_bps) * window.seconds() / 8.0L;
    const auto fit = static_cast<std::size_t>(
        std::floor(std::min(budget_bytes, window_bytes) / mpdu_bytes + 1e-12L));
    plan.mpdus = std::min({queued, fit, static_cast<std::size_t>(max_mpdu)});
    plan.bytes = static_cast<std::uint64_t>(plan.mpdus) * mpdu_bytes;
    if (plan.mpdus > 0)
        plan.airtime = airtime(plan.bytes, rate_bps);
    if (plan.airtime > window) {
        // Rounding pushed the aggregate past the window edge.
        --plan.mpdus;
        plan.bytes -= mpdu_bytes;
        plan.airtime = plan.mpdus ? airtime(plan.bytes, rate_bps) : Duration{};
    }
    return plan;
}

TxopScheduler::TxopScheduler(Simulator& sim, BeaconSchedule schedule, std::vector<NodeId> nodes,
                             TxopClient& client)
    : sim_(sim), schedule_(schedule), nodes_(std::move(nodes)), client_(client)
{
    schedule_.validate();
}

void TxopScheduler::kick()
{
    if (armed_)
        return;
    arm(schedule_.next_dti_opening(sim_.now()));
}

void TxopScheduler::arm(SimTime t)
{
    armed_ = true;
    sim_.schedule(t, 0, EventKind::Timer, [this] { grant(); });
}

void TxopScheduler::grant()
{
    armed_ = false;
    const SimTime now = sim_.now();
    if (!schedule_.in_dti(now)) {
        arm(schedule_.dti_start(now));
        return;
    }
    const Duration remaining = schedule_.dti_end(now) - now;

    for (std::size_t step = 0; step < nodes_.size(); ++step) {
        const std::size_t idx = (next_ + step) % nodes_.size();
        auto req = client_.bid(nodes_[idx]);
        if (!req)
            continue;
        next_ = (idx + 1) % nodes_.size();
        ++grants_;

        auto link = client_.link_for(req->node, req->next_hop);
        if (!link || !phy::Channel::serviceable(*link)) {
            ++failures_;
            client_.failed(*req);
            const Duration spent = std::min(schedule_.txop, remaining);
            arm(now + spent);
            return;
        }
        const AggregatePlan plan = plan_aggregate(req->queued, req->mpdu_bytes, *link->rate_bps,
                                                  schedule_.txop, schedule_.max_aggregated_mpdu, remaining);
        if (plan.mpdus == 0) {
            // Not enough DTI left for one MPDU; resume next DTI with the same node.
            next_ = idx;
            arm(schedule_.dti_start(now + remaining));
            return;
        }
        client_.transmit(*req, plan, *link->rate_bps);
        arm(now + plan.airtime);
        return;
    }
    // Nobody is backlogged: stay idle until kicked.
}

}  // namespace mmr::mac
