#include "mmroute/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmr::phy {

double distance(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

double bearing_deg(const Position& from, const Position& to)
{
    double deg = std::atan2(to.y - from.y, to.x - from.x) * 180.0 / std::numbers::pi;
    if (deg < 0.0)
        deg += 360.0;
    if (deg >= 360.0)
        deg -= 360.0;
    return deg;
}

double path_loss_db(double d)
{
    if (!(d > 0.0) || !std::isfinite(d))
        throw std::domain_error("path loss distance must be positive and finite, got " +
                                std::to_string(d));
    return 20.0 * std::log10(4.0 * std::numbers::pi * d / kWavelength);
}

bool Blocker::active_at(SimTime t) const
{
    return std::any_of(schedule.begin(), schedule.end(),
                       [t](const BlockageWindow& w) { return t >= w.on && t < w.off; });
}

bool is_blocked(const Position& tx, const Position& rx, const Blocker& blocker)
{
    const double lo[3] = {blocker.center.x - blocker.length / 2, blocker.center.y - blocker.width / 2,
                          blocker.center.z - blocker.height / 2};
    const double hi[3] = {blocker.center.x + blocker.length / 2, blocker.center.y + blocker.width / 2,
                          blocker.center.z + blocker.height / 2};
    const double origin[3] = {tx.x, tx.y, tx.z};
    const double dir[3] = {rx.x - tx.x, rx.y - tx.y, rx.z - tx.z};

    double t_min = 0.0;
    double t_max = 1.0;
    for (int axis = 0; axis < 3; ++axis) {
        if (dir[axis] == 0.0) {
            if (origin[axis] < lo[axis] || origin[axis] > hi[axis])
                return false;
            continue;
        }
        double t0 = (lo[axis] - origin[axis]) / dir[axis];
        double t1 = (hi[axis] - origin[axis]) / dir[axis];
        if (t0 > t1)
            std::swap(t0, t1);
        t_min = std::max(t_min, t0);
        t_max = std::min(t_max, t1);
        if (t_min > t_max)
            return false;
    }
    return true;
}

double link_snr(const LinkBudget& budget)
{
    return budget.received_power_dbm() - budget.noise_dbm;
}

RateTable::RateTable(std::vector<RateTier> tiers) : tiers_(std::move(tiers))
{
    for (std::size_t i = 0; i < tiers_.size(); ++i) {
        if (!std::isfinite(tiers_[i].min_snr_db) || !(tiers_[i].rate_bps > 0.0))
            throw std::invalid_argument("rate tier " + std::to_string(i) + " is not finite/positive");
        if (i > 0 && (tiers_[i].min_snr_db <= tiers_[i - 1].min_snr_db ||
                      tiers_[i].rate_bps <= tiers_[i - 1].rate_bps))
            throw std::invalid_argument("rate table must be strictly increasing at tier " +
                                        std::to_string(i));
    }
}

std::optional<double> rate_for_snr(double snr_db, const RateTable& table)
{
    std::optional<double> best;
    for (const auto& tier : table.tiers()) {
        if (tier.min_snr_db <= snr_db)
            best = tier.rate_bps;
        else
            break;
    }
    return best;
}

RateTable default_rate_table()
{
    return RateTable({
        {2.0, 385e6},
        {4.0, 770e6},
        {6.0, 1155e6},
        {8.0, 1540e6},
        {10.0, 1925e6},
        {12.0, 2502.5e6},
        {14.0, 3080e6},
        {16.0, 3850e6},
        {18.0, 4620e6},
    });
}

Mobility::Mobility(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints))
{
    if (waypoints_.empty())
        throw std::invalid_argument("mobility needs at least one waypoint");
    for (std::size_t i = 1; i < waypoints_.size(); ++i)
        if (waypoints_[i].t <= waypoints_[i - 1].t)
            throw std::invalid_argument("waypoint times must strictly increase");
}

Position Mobility::position_at(SimTime t) const
{
    if (waypoints_.empty())
        throw std::logic_error("position queried on empty mobility");
    if (t <= waypoints_.front().t)
        return waypoints_.front().p;
    if (t >= waypoints_.back().t)
        return waypoints_.back().p;
    auto next = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                                 [](SimTime v, const Waypoint& w) { return v < w.t; });
    const Waypoint& b = *next;
    const Waypoint& a = *(next - 1);
    const double f = static_cast<double>((t - a.t).ns) / static_cast<double>((b.t - a.t).ns);
    return {a.p.x + f * (b.p.x - a.p.x), a.p.y + f * (b.p.y - a.p.y), a.p.z + f * (b.p.z - a.p.z)};
}

int SectorAntenna::sector_toward(double bearing) const
{
    const double width = 360.0 / sectors;
    int k = static_cast<int>(std::floor(bearing / width));
    return std::clamp(k, 0, sectors - 1);
}

double SectorAntenna::gain(int sector, double bearing) const
{
    return sector == sector_toward(bearing) ? main_gain_db : side_gain_db;
}

Channel::Channel(PhyConfig config, std::map<NodeId, Mobility> nodes, std::vector<Blocker> blockers)
    : config_(std::move(config)), nodes_(std::move(nodes)), blockers_(std::move(blockers))
{
}

std::vector<NodeId> Channel::node_ids() const
{
    std::vector<NodeId> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_)
        ids.push_back(id);
    return ids;
}

Position Channel::position(NodeId node, SimTime t) const
{
    auto it = nodes_.find(node);
    if (it == nodes_.end())
        throw std::out_of_range("unknown node " + std::to_string(node));
    return it->second.position_at(t);
}

double Channel::blocker_loss_db(const Position& tx, const Position& rx, SimTime t) const
{
    double loss = 0.0;
    for (const auto& b : blockers_)
        if (b.active_at(t) && is_blocked(tx, rx, b))
            loss += b.attenuation_db;
    return loss;
}

LinkState Channel::evaluate(NodeId tx, NodeId rx, int tx_sector, SimTime t) const
{
    const Position a = position(tx, t);
    const Position b = position(rx, t);
    LinkState s;
    s.budget.tx_power_dbm = config_.tx_power_dbm;
    s.budget.path_loss_db = path_loss_db(distance(a, b));
    s.budget.blocker_loss_db = blocker_loss_db(a, b, t);
    s.budget.antenna_gain_db = config_.antenna.gain(tx_sector, bearing_deg(a, b)) + config_.rx_gain_db;
    s.budget.noise_dbm = config_.noise_dbm;
    s.budget.preamble_threshold_dbm = config_.preamble_threshold_dbm;
    s.snr_db = link_snr(s.budget);
    s.usable = s.budget.usable();
    if (s.usable)
        s.rate_bps = rate_for_snr(s.snr_db, config_.rate_table);
    return s;
}

}  // namespace mmr::phy
