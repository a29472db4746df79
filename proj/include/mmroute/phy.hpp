#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mmroute/engine.hpp"

namespace mmr::phy {

/// 60 GHz carrier wavelength in meters.
inline constexpr double kWavelength = 0.005;

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);
/// Azimuth of b as seen from a, degrees in [0, 360).
double bearing_deg(const Position& from, const Position& to);

/// Free-space path loss 20*log10(4*pi*d/lambda). Throws std::domain_error for d <= 0.
double path_loss_db(double d);

struct BlockageWindow {
    SimTime on;
    SimTime off;

    bool operator==(const BlockageWindow&) const = default;
};

/// Axis-aligned box obstacle. `length` runs along x, `width` along y,
/// `height` along z; `center` is the box center.
struct Blocker {
    Position center;
    double length = 0.5;
    double width = 0.5;
    double height = 1.8;
    double attenuation_db = 20.0;
    std::vector<BlockageWindow> schedule;

    bool active_at(SimTime t) const;
    bool operator==(const Blocker&) const = default;
};

/// True iff the closed segment tx-rx intersects the blocker's box (slab test).
bool is_blocked(const Position& tx, const Position& rx, const Blocker& blocker);

struct LinkBudget {
    double tx_power_dbm = 18.0;
    double path_loss_db = 0.0;
    double blocker_loss_db = 0.0;
    double antenna_gain_db = 0.0;
    double noise_dbm = -70.6;
    double preamble_threshold_dbm = -68.0;

    double received_power_dbm() const
    {
        return tx_power_dbm - path_loss_db - blocker_loss_db + antenna_gain_db;
    }
    bool usable() const { return received_power_dbm() >= preamble_threshold_dbm; }
};

/// Received power minus noise, in dB.
double link_snr(const LinkBudget& budget);

struct RateTier {
    double min_snr_db;
    double rate_bps;

    bool operator==(const RateTier&) const = default;
};

/// Monotone SNR-threshold staircase standing in for rate control.
class RateTable {
public:
    RateTable() = default;
    /// Throws std::invalid_argument unless thresholds and rates both strictly increase.
    explicit RateTable(std::vector<RateTier> tiers);

    const std::vector<RateTier>& tiers() const { return tiers_; }
    bool empty() const { return tiers_.empty(); }
    bool operator==(const RateTable&) const = default;

private:
    std::vector<RateTier> tiers_;
};

/// Highest rate whose threshold is <= snr; nullopt when below the lowest tier.
std::optional<double> rate_for_snr(double snr_db, const RateTable& table);

/// Nine-tier staircase over the 802.11ad single-carrier MCS rates, 2 dB apart.
RateTable default_rate_table();

struct Waypoint {
    SimTime t;
    Position p;

    bool operator==(const Waypoint&) const = default;
};

/// Piecewise-linear path through timestamped waypoints, clamped at both ends.
class Mobility {
public:
    Mobility() = default;
    /// Throws std::invalid_argument for an empty or time-unsorted list.
    explicit Mobility(std::vector<Waypoint> waypoints);

    Position position_at(SimTime t) const;
    const std::vector<Waypoint>& waypoints() const { return waypoints_; }
    bool is_static() const { return waypoints_.size() <= 1; }

private:
    std::vector<Waypoint> waypoints_;
};

/// K equal azimuth wedges, sector k covering [k*360/K, (k+1)*360/K).
struct SectorAntenna {
    int sectors = 8;
    double main_gain_db = 15.0;
    double side_gain_db = -10.0;

    int sector_toward(double bearing) const;
    double gain(int sector, double bearing) const;
    bool operator==(const SectorAntenna&) const = default;
};

struct PhyConfig {
    double tx_power_dbm = 18.0;
    double noise_dbm = -70.6;
    double preamble_threshold_dbm = -68.0;
    // Carried for completeness; the abstracted MAC performs no carrier sensing.
    double energy_detection_threshold_dbm = -48.0;
    /// Receiver pattern during sweeps and data (quasi-omni).
    double rx_gain_db = 0.0;
    SectorAntenna antenna;
    RateTable rate_table = default_rate_table();

    bool operator==(const PhyConfig&) const = default;
};

/// Instantaneous view of one directional link.
struct LinkState {
    LinkBudget budget;
    double snr_db = 0.0;
    bool usable = false;
    std::optional<double> rate_bps;
};

/// Immutable scenario geometry: node trajectories plus blockers.
class Channel {
public:
    Channel(PhyConfig config, std::map<NodeId, Mobility> nodes, std::vector<Blocker> blockers);

    const PhyConfig& config() const { return config_; }
    const std::vector<Blocker>& blockers() const { return blockers_; }
    std::vector<NodeId> node_ids() const;

    Position position(NodeId node, SimTime t) const;
    double blocker_loss_db(const Position& tx, const Position& rx, SimTime t) const;
    /// Link tx->rx with the transmitter on `tx_sector` and the receiver quasi-omni.
    LinkState evaluate(NodeId tx, NodeId rx, int tx_sector, SimTime t) const;
    /// Usable and mapped to a rate.
    static bool serviceable(const LinkState& s) { return s.usable && s.rate_bps.has_value(); }

private:
    PhyConfig config_;
    std::map<NodeId, Mobility> nodes_;
    std::vector<Blocker> blockers_;
};

}  // namespace mmr::phy
