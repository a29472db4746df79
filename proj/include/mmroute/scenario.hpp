#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmroute/engine.hpp"
#include "mmroute/phy.hpp"
#include "mmroute/traffic_metrics.hpp"

namespace mmr::scenario {

enum class Protocol { Aodv, Bcp };

struct NodeConfig {
    NodeId id = 0;
    std::vector<phy::Waypoint> waypoints;
    bool operator==(const NodeConfig&) const = default;
};

struct BlockerConfig {
    phy::Position center;
    double length = 0.5;
    double width = 0.5;
    double height = 1.8;
    double attenuation_db = 20.0;
    std::vector<phy::BlockageWindow> windows;
    /// Alternating on/off exponential periods with this rate (per second).
    std::optional<double> poisson_rate;
    bool operator==(const BlockerConfig&) const = default;
};

struct ProtocolConfig {
    Protocol type = Protocol::Aodv;
    bool refinement = true;
    Duration hello_interval = whole_seconds(1);
    double v = 2.0;
    Duration reroute_period = milliseconds(10);
    Duration loss_detect_window = milliseconds(20);
    Duration route_lifetime = whole_seconds(10);
    std::uint32_t net_diameter = 4;
    std::uint32_t queue_capacity = 20000;
    double control_rate = 27.5e6;
    bool operator==(const ProtocolConfig&) const = default;
};

struct ScenarioConfig {
    Duration duration = whole_seconds(10);
    std::uint64_t seed = 1;
    Duration throughput_window = milliseconds(100);
    std::vector<NodeConfig> nodes;
    std::vector<BlockerConfig> blockers;
    std::vector<traffic::Flow> flows;
    ProtocolConfig protocol;
    phy::PhyConfig phy;
    bool operator==(const ScenarioConfig&) const = default;
};

struct Diagnostic {
    std::size_t line = 0;  // 0 when not tied to a line
    std::string message;
};

/// Carries every problem found in a scenario, not just the first.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

/// `key=value` applied on top of the file. Keys are `name` for globals,
/// `section.name` for [protocol]/[phy], `section.N.name` for the N-th
/// (0-based) [node]/[blocker]/[flow].
using Override = std::pair<std::string, std::string>;

ScenarioConfig parse_scenario_text(const std::string& text, const std::vector<Override>& overrides = {});
ScenarioConfig parse_scenario(const std::filesystem::path& path, const std::vector<Override>& overrides = {});
std::string serialize_scenario(const ScenarioConfig& config);
/// Returns every invariant violation; empty when valid.
std::vector<Diagnostic> validate(const ScenarioConfig& config);

/// Alternating exponential gaps and exponential blockage durations, both
/// with mean 1/mu, truncated to [0, horizon).
std::vector<phy::BlockageWindow> poisson_blockage(double mu, RngStream& rng, Duration horizon);

Duration parse_duration(std::string_view text);
std::string format_duration(Duration d);
std::string_view to_string(Protocol p);

}  // namespace mmr::scenario
