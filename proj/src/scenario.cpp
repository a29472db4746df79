#include "mmroute/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mmr::scenario {

namespace {

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct RawSection {
    std::string name;  // empty for the global preamble
    std::size_t line = 0;
    std::vector<KeyValue> entries;
};

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;)
        out.push_back(w);
    return out;
}

double parse_number(std::string_view text)
{
    const std::string s = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::invalid_argument("expected a number, got '" + s + "'");
    return v;
}

std::uint64_t parse_unsigned(std::string_view text)
{
    const std::string s = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
    return v;
}

std::uint32_t parse_u32(std::string_view text)
{
    const auto v = parse_unsigned(text);
    if (v > 0xffffffffULL)
        throw std::invalid_argument("integer out of range: " + std::string(text));
    return static_cast<std::uint32_t>(v);
}

bool parse_bool(std::string_view text)
{
    const std::string s = trim(text);
    if (s == "on" || s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "off" || s == "false" || s == "0" || s == "no")
        return false;
    throw std::invalid_argument("expected on/off, got '" + s + "'");
}

/// Plain bits per second, or a number suffixed with bps, kbps, Mbps or Gbps.
double parse_rate(std::string_view text)
{
    const std::string s = trim(text);
    static const std::pair<const char*, double> units[] = {
        {"Gbps", 1e9}, {"Mbps", 1e6}, {"kbps", 1e3}, {"bps", 1.0}};
    for (const auto& [suffix, scale] : units) {
        const std::string_view suf(suffix);
        if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0)
            return parse_number(std::string_view(s).substr(0, s.size() - suf.size())) * scale;
    }
    return parse_number(s);
}

phy::Position parse_position(const std::string& value)
{
    const auto w = words(value);
    if (w.size() != 3)
        throw std::invalid_argument("expected 'x y z'");
    return {parse_number(w[0]), parse_number(w[1]), parse_number(w[2])};
}

std::string join(std::initializer_list<std::string> parts)
{
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty())
            out += ' ';
        out += p;
    }
    return out;
}

std::string num(double v) { return traffic::format_double(v); }

const std::set<std::string> kGlobalKeys = {"duration", "seed", "throughput_window"};
const std::set<std::string> kProtocolKeys = {"type",          "refinement",     "hello_interval",
                                             "v",             "reroute_period", "loss_detect_window",
                                             "route_lifetime", "net_diameter",  "queue_capacity",
                                             "control_rate"};
const std::set<std::string> kPhyKeys = {"sectors",
                                        "main_gain_db",
                                        "side_gain_db",
                                        "rx_gain_db",
                                        "tx_power_dbm",
                                        "noise_dbm",
                                        "preamble_threshold_dbm",
                                        "energy_detection_threshold_dbm",
                                        "rate"};
const std::set<std::string> kNodeKeys = {"id", "waypoint"};
const std::set<std::string> kBlockerKeys = {"center", "dims", "attenuation_db", "window", "poisson_rate"};
const std::set<std::string> kFlowKeys = {"src", "dst", "rate", "packet_size", "start", "stop"};

const std::set<std::string>* keys_for(const std::string& section)
{
    if (section.empty()) return &kGlobalKeys;
    if (section == "protocol") return &kProtocolKeys;
    if (section == "phy") return &kPhyKeys;
    if (section == "node") return &kNodeKeys;
    if (section == "blocker") return &kBlockerKeys;
    if (section == "flow") return &kFlowKeys;
    return nullptr;
}

bool repeatable(const std::string& section, const std::string& key)
{
    return (section == "phy" && key == "rate") || (section == "node" && key == "waypoint") ||
           (section == "blocker" && key == "window");
}

bool singleton_section(const std::string& name) { return name == "protocol" || name == "phy"; }

std::vector<RawSection> lex(const std::string& text, std::vector<Diagnostic>& diags)
{
    std::vector<RawSection> out(1);
    std::istringstream is(text);
    std::string raw;
    std::size_t lineno = 0;
    std::set<std::string> seen_singletons;
    while (std::getline(is, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                diags.push_back({lineno, "malformed section header '" + line + "'"});
                continue;
            }
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!keys_for(name) || name.empty()) {
                diags.push_back({lineno, "unknown section [" + name + "]"});
            } else if (singleton_section(name) && !seen_singletons.insert(name).second) {
                diags.push_back({lineno, "section [" + name + "] may appear only once"});
            }
            out.push_back(RawSection{name, lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            diags.push_back({lineno, "expected 'key = value'"});
            continue;
        }
        KeyValue kv{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), lineno};
        RawSection& sec = out.back();
        const auto* allowed = keys_for(sec.name);
        if (!allowed)
            continue;  // already reported at the header
        if (!allowed->contains(kv.key)) {
            diags.push_back({lineno, "unknown key '" + kv.key + "'" +
                                         (sec.name.empty() ? std::string(" before any section")
                                                           : " in [" + sec.name + "]")});
            continue;
        }
        if (!repeatable(sec.name, kv.key)) {
            const bool dup = std::any_of(sec.entries.begin(), sec.entries.end(),
                                         [&](const KeyValue& e) { return e.key == kv.key; });
            if (dup) {
                diags.push_back({lineno, "duplicate key '" + kv.key + "'"});
                continue;
            }
        }
        sec.entries.push_back(std::move(kv));
    }
    return out;
}

void apply_overrides(std::vector<RawSection>& sections, const std::vector<Override>& overrides,
                     std::vector<Diagnostic>& diags)
{
    for (const auto& [path, value] : overrides) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : path) {
            if (c == '.') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);

        std::string section;
        std::size_t index = 0;
        std::string key;
        try {
            if (parts.size() == 1) {
                key = parts[0];
            } else if (parts.size() == 2 && singleton_section(parts[0])) {
                section = parts[0];
                key = parts[1];
            } else if (parts.size() == 3 && keys_for(parts[0]) && !singleton_section(parts[0]) &&
                       !parts[0].empty()) {
                section = parts[0];
                index = static_cast<std::size_t>(parse_unsigned(parts[1]));
                key = parts[2];
            } else {
                throw std::invalid_argument("");
            }
        } catch (const std::invalid_argument&) {
            diags.push_back({0, "override '" + path + "': expected key, section.key or section.N.key"});
            continue;
        }
        const auto* allowed = keys_for(section);
        if (!allowed || !allowed->contains(key)) {
            diags.push_back({0, "override '" + path + "': unknown key"});
            continue;
        }

        RawSection* target = nullptr;
        if (section.empty()) {
            target = &sections.front();
        } else {
            std::size_t seen = 0;
            for (auto& s : sections) {
                if (s.name != section)
                    continue;
                if (singleton_section(section) || seen == index) {
                    target = &s;
                    break;
                }
                ++seen;
            }
            if (!target && singleton_section(section)) {
                sections.push_back(RawSection{section, 0, {}});
                target = &sections.back();
            }
        }
        if (!target) {
            diags.push_back({0, "override '" + path + "': no such [" + section + "] section"});
            continue;
        }
        auto& es = target->entries;
        es.erase(std::remove_if(es.begin(), es.end(), [&](const KeyValue& e) { return e.key == key; }), es.end());
        es.push_back(KeyValue{key, value, 0});
    }
}

/// Runs `fn` and converts a thrown message into a diagnostic for the entry's line.
template <typename Fn>
void guarded(const KeyValue& kv, std::vector<Diagnostic>& diags, Fn&& fn)
{
    try {
        fn();
    } catch (const std::exception& e) {
        diags.push_back({kv.line, kv.key + ": " + e.what()});
    }
}

ScenarioConfig build(const std::vector<RawSection>& sections, std::vector<Diagnostic>& diags,
                     std::vector<std::size_t>& node_lines, std::vector<std::size_t>& blocker_lines,
                     std::vector<std::size_t>& flow_lines)
{
    ScenarioConfig cfg;
    std::vector<phy::RateTier> tiers;
    bool custom_rates = false;

    for (const RawSection& sec : sections) {
        if (sec.name.empty()) {
            for (const auto& kv : sec.entries)
                guarded(kv, diags, [&] {
                    if (kv.key == "duration") cfg.duration = parse_duration(kv.value);
                    else if (kv.key == "seed") cfg.seed = parse_unsigned(kv.value);
                    else if (kv.key == "throughput_window") cfg.throughput_window = parse_duration(kv.value);
                });
        } else if (sec.name == "protocol") {
            ProtocolConfig& p = cfg.protocol;
            for (const auto& kv : sec.entries)
                guarded(kv, diags, [&] {
                    if (kv.key == "type") {
                        if (kv.value == "aodv") p.type = Protocol::Aodv;
                        else if (kv.value == "bcp") p.type = Protocol::Bcp;
                        else throw std::invalid_argument("expected aodv or bcp, got '" + kv.value + "'");
                    }
                    else if (kv.key == "refinement") p.refinement = parse_bool(kv.value);
                    else if (kv.key == "hello_interval") p.hello_interval = parse_duration(kv.value);
                    else if (kv.key == "v") p.v = parse_number(kv.value);
                    else if (kv.key == "reroute_period") p.reroute_period = parse_duration(kv.value);
                    else if (kv.key == "loss_detect_window") p.loss_detect_window = parse_duration(kv.value);
                    else if (kv.key == "route_lifetime") p.route_lifetime = parse_duration(kv.value);
                    else if (kv.key == "net_diameter") p.net_diameter = parse_u32(kv.value);
                    else if (kv.key == "queue_capacity") p.queue_capacity = parse_u32(kv.value);
                    else if (kv.key == "control_rate") p.control_rate = parse_rate(kv.value);
                });
        } else if (sec.name == "phy") {
            phy::PhyConfig& p = cfg.phy;
            for (const auto& kv : sec.entries)
                guarded(kv, diags, [&] {
                    if (kv.key == "sectors") p.antenna.sectors = static_cast<int>(parse_u32(kv.value));
                    else if (kv.key == "main_gain_db") p.antenna.main_gain_db = parse_number(kv.value);
                    else if (kv.key == "side_gain_db") p.antenna.side_gain_db = parse_number(kv.value);
                    else if (kv.key == "rx_gain_db") p.rx_gain_db = parse_number(kv.value);
                    else if (kv.key == "tx_power_dbm") p.tx_power_dbm = parse_number(kv.value);
                    else if (kv.key == "noise_dbm") p.noise_dbm = parse_number(kv.value);
                    else if (kv.key == "preamble_threshold_dbm") p.preamble_threshold_dbm = parse_number(kv.value);
                    else if (kv.key == "energy_detection_threshold_dbm")
                        p.energy_detection_threshold_dbm = parse_number(kv.value);
                    else if (kv.key == "rate") {
                        const auto w = words(kv.value);
                        if (w.size() != 2)
                            throw std::invalid_argument("expected '<min_snr_db> <rate>'");
                        custom_rates = true;
                        tiers.push_back({parse_number(w[0]), parse_rate(w[1])});
                    }
                });
        } else if (sec.name == "node") {
            NodeConfig n;
            bool has_id = false;
            for (const auto& kv : sec.entries)
                guarded(kv, diags, [&] {
                    if (kv.key == "id") {
                        n.id = parse_u32(kv.value);
                        has_id = true;
                    } else if (kv.key == "waypoint") {
                        const auto w = words(kv.value);
                        if (w.size() != 4)
                            throw std::invalid_argument("expected '<t> <x> <y> <z>'");
                        n.waypoints.push_back({at(parse_duration(w[0])),
                                               {parse_number(w[1]), parse_number(w[2]), parse_number(w[3])}});
                    }
                });
            if (!has_id)
                diags.push_back({sec.line, "[node] needs an id"});
            cfg.nodes.push_back(std::move(n));
            node_lines.push_back(sec.line);
        } else if (sec.name == "blocker") {
            BlockerConfig b;
            for (const auto& kv : sec.entries)
                guarded(kv, diags, [&] {
                    if (kv.key == "center") b.center = parse_position(kv.value);
                    else if (kv.key == "dims") {
                        const auto p = parse_position(kv.value);
                        b.length = p.x;
                        b.width = p.y;
                        b.height = p.z;
                    }
                    else if (kv.key == "attenuation_db") b.attenuation_db = parse_number(kv.value);
                    else if (kv.key == "poisson_rate") b.poisson_rate = parse_number(kv.value);
                    else if (kv.key == "window") {
                        const auto w = words(kv.value);
                        if (w.size() != 2)
                            throw std::invalid_argument("expected '<on> <off>'");
                        b.windows.push_back({at(parse_duration(w[0])), at(parse_duration(w[1]))});
                    }
                });
            cfg.blockers.push_back(std::move(b));
            blocker_lines.push_back(sec.line);
        } else if (sec.name == "flow") {
            traffic::Flow f;
            f.id = static_cast<std::uint32_t>(cfg.flows.size());
            bool has_stop = false;
            for (const auto& kv : sec.entries)
                guarded(kv, diags, [&] {
                    if (kv.key == "src") f.src = parse_u32(kv.value);
                    else if (kv.key == "dst") f.dst = parse_u32(kv.value);
                    else if (kv.key == "rate") f.rate_bps = parse_rate(kv.value);
                    else if (kv.key == "packet_size") f.packet_size = parse_u32(kv.value);
                    else if (kv.key == "start") f.start = at(parse_duration(kv.value));
                    else if (kv.key == "stop") {
                        f.stop = at(parse_duration(kv.value));
                        has_stop = true;
                    }
                });
            if (!has_stop)
                f.stop = at(cfg.duration);
            cfg.flows.push_back(f);
            flow_lines.push_back(sec.line);
        }
    }
    if (custom_rates) {
        try {
            cfg.phy.rate_table = phy::RateTable(tiers);
        } catch (const std::exception& e) {
            diags.push_back({0, std::string("rate table: ") + e.what()});
        }
    }
    return cfg;
}

void check(const ScenarioConfig& c, std::vector<Diagnostic>& diags, const std::vector<std::size_t>& node_lines,
           const std::vector<std::size_t>& blocker_lines, const std::vector<std::size_t>& flow_lines)
{
    auto line_of = [](const std::vector<std::size_t>& lines, std::size_t i) {
        return i < lines.size() ? lines[i] : 0;
    };
    if (c.duration.ns <= 0)
        diags.push_back({0, "duration must be positive"});
    if (c.throughput_window.ns <= 0)
        diags.push_back({0, "throughput_window must be positive"});
    if (c.nodes.empty())
        diags.push_back({0, "no nodes"});

    std::set<NodeId> ids;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const NodeConfig& n = c.nodes[i];
        const auto line = line_of(node_lines, i);
        if (!ids.insert(n.id).second)
            diags.push_back({line, "duplicate node id " + std::to_string(n.id)});
        if (n.waypoints.empty())
            diags.push_back({line, "node " + std::to_string(n.id) + " has no waypoint"});
        for (std::size_t k = 1; k < n.waypoints.size(); ++k)
            if (!(n.waypoints[k - 1].t < n.waypoints[k].t))
                diags.push_back({line, "node " + std::to_string(n.id) + ": waypoint times must increase"});
    }

    for (std::size_t i = 0; i < c.blockers.size(); ++i) {
        const BlockerConfig& b = c.blockers[i];
        const auto line = line_of(blocker_lines, i);
        if (!(b.length > 0.0 && b.width > 0.0 && b.height > 0.0))
            diags.push_back({line, "blocker dims must be positive"});
        if (b.attenuation_db < 0.0)
            diags.push_back({line, "blocker attenuation must be non-negative"});
        if (b.poisson_rate && !(*b.poisson_rate > 0.0))
            diags.push_back({line, "poisson_rate must be positive"});
        if (b.poisson_rate && !b.windows.empty())
            diags.push_back({line, "blocker has both windows and poisson_rate"});
        for (const auto& w : b.windows) {
            if (!(w.on < w.off))
                diags.push_back({line, "blockage window must have on < off"});
            if (w.on.ns < 0 || w.off > at(c.duration))
                diags.push_back({line, "blockage window outside [0, duration]"});
        }
    }

    for (std::size_t i = 0; i < c.flows.size(); ++i) {
        const traffic::Flow& f = c.flows[i];
        const auto line = line_of(flow_lines, i);
        const std::string tag = "flow " + std::to_string(i);
        if (!ids.contains(f.src))
            diags.push_back({line, tag + ": unknown src node " + std::to_string(f.src)});
        if (!ids.contains(f.dst))
            diags.push_back({line, tag + ": unknown dst node " + std::to_string(f.dst)});
        if (f.src == f.dst)
            diags.push_back({line, tag + ": src equals dst"});
        if (!(f.rate_bps > 0.0))
            diags.push_back({line, tag + ": rate must be positive"});
        if (f.packet_size == 0)
            diags.push_back({line, tag + ": packet_size must be positive"});
        if (!(f.start < f.stop))
            diags.push_back({line, tag + ": start must precede stop"});
        if (f.stop > at(c.duration))
            diags.push_back({line, tag + ": stop beyond duration"});
    }

    const ProtocolConfig& p = c.protocol;
    if (p.hello_interval.ns <= 0) diags.push_back({0, "hello_interval must be positive"});
    if (p.reroute_period.ns <= 0) diags.push_back({0, "reroute_period must be positive"});
    if (p.loss_detect_window.ns <= 0) diags.push_back({0, "loss_detect_window must be positive"});
    if (p.route_lifetime.ns <= 0) diags.push_back({0, "route_lifetime must be positive"});
    if (p.v < 0.0) diags.push_back({0, "v must be non-negative"});
    if (p.net_diameter == 0) diags.push_back({0, "net_diameter must be positive"});
    if (p.queue_capacity == 0) diags.push_back({0, "queue_capacity must be positive"});
    if (!(p.control_rate > 0.0)) diags.push_back({0, "control_rate must be positive"});
    if (c.phy.antenna.sectors < 1) diags.push_back({0, "sectors must be at least 1"});
    if (c.phy.rate_table.empty()) diags.push_back({0, "rate table is empty"});
}

}  // namespace

ScenarioError::ScenarioError(std::vector<Diagnostic> diags)
    : std::runtime_error([&] {
          std::string msg;
          for (const auto& d : diags) {
              if (!msg.empty())
                  msg += '\n';
              msg += d.line ? "line " + std::to_string(d.line) + ": " + d.message : d.message;
          }
          return msg;
      }()),
      diags_(std::move(diags))
{
}

Duration parse_duration(std::string_view text)
{
    const std::string s = trim(text);
    static const std::pair<const char*, std::int64_t> units[] = {
        {"ms", 1'000'000}, {"us", 1'000}, {"ns", 1}, {"s", 1'000'000'000}};
    for (const auto& [suffix, scale] : units) {
        const std::string_view suf(suffix);
        if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
            const std::string digits = s.substr(0, s.size() - suf.size());
            // Integers are exact; fractional values round to the nearest ns.
            std::int64_t whole = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), whole);
            if (ec == std::errc{} && ptr == digits.data() + digits.size())
                return Duration{whole * scale};
            const double v = parse_number(digits);
            return Duration{static_cast<std::int64_t>(std::llround(v * static_cast<double>(scale)))};
        }
    }
    throw std::invalid_argument("expected a duration with unit s, ms, us or ns, got '" + s + "'");
}

std::string format_duration(Duration d)
{
    static const std::pair<const char*, std::int64_t> units[] = {
        {"s", 1'000'000'000}, {"ms", 1'000'000}, {"us", 1'000}};
    for (const auto& [suffix, scale] : units)
        if (d.ns % scale == 0)
            return std::to_string(d.ns / scale) + suffix;
    return std::to_string(d.ns) + "ns";
}

std::string_view to_string(Protocol p)
{
    return p == Protocol::Aodv ? "aodv" : "bcp";
}

std::vector<Diagnostic> validate(const ScenarioConfig& config)
{
    std::vector<Diagnostic> diags;
    check(config, diags, {}, {}, {});
    return diags;
}

ScenarioConfig parse_scenario_text(const std::string& text, const std::vector<Override>& overrides)
{
    std::vector<Diagnostic> diags;
    std::vector<RawSection> sections = lex(text, diags);
    apply_overrides(sections, overrides, diags);
    std::vector<std::size_t> node_lines, blocker_lines, flow_lines;
    ScenarioConfig cfg = build(sections, diags, node_lines, blocker_lines, flow_lines);
    check(cfg, diags, node_lines, blocker_lines, flow_lines);
    if (!diags.empty()) {
        std::stable_sort(diags.begin(), diags.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
        throw ScenarioError(std::move(diags));
    }
    return cfg;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path, const std::vector<Override>& overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError({{0, "cannot open " + path.string()}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), overrides);
}

std::string serialize_scenario(const ScenarioConfig& c)
{
    std::ostringstream os;
    os << "duration = " << format_duration(c.duration) << '\n';
    os << "seed = " << c.seed << '\n';
    os << "throughput_window = " << format_duration(c.throughput_window) << '\n';

    const ProtocolConfig& p = c.protocol;
    os << "\n[protocol]\n";
    os << "type = " << to_string(p.type) << '\n';
    os << "refinement = " << (p.refinement ? "on" : "off") << '\n';
    os << "hello_interval = " << format_duration(p.hello_interval) << '\n';
    os << "v = " << num(p.v) << '\n';
    os << "reroute_period = " << format_duration(p.reroute_period) << '\n';
    os << "loss_detect_window = " << format_duration(p.loss_detect_window) << '\n';
    os << "route_lifetime = " << format_duration(p.route_lifetime) << '\n';
    os << "net_diameter = " << p.net_diameter << '\n';
    os << "queue_capacity = " << p.queue_capacity << '\n';
    os << "control_rate = " << num(p.control_rate) << '\n';

    const phy::PhyConfig& ph = c.phy;
    os << "\n[phy]\n";
    os << "sectors = " << ph.antenna.sectors << '\n';
    os << "main_gain_db = " << num(ph.antenna.main_gain_db) << '\n';
    os << "side_gain_db = " << num(ph.antenna.side_gain_db) << '\n';
    os << "rx_gain_db = " << num(ph.rx_gain_db) << '\n';
    os << "tx_power_dbm = " << num(ph.tx_power_dbm) << '\n';
    os << "noise_dbm = " << num(ph.noise_dbm) << '\n';
    os << "preamble_threshold_dbm = " << num(ph.preamble_threshold_dbm) << '\n';
    os << "energy_detection_threshold_dbm = " << num(ph.energy_detection_threshold_dbm) << '\n';
    for (const auto& t : ph.rate_table.tiers())
        os << "rate = " << num(t.min_snr_db) << ' ' << num(t.rate_bps) << '\n';

    for (const auto& n : c.nodes) {
        os << "\n[node]\nid = " << n.id << '\n';
        for (const auto& w : n.waypoints)
            os << "waypoint = "
               << join({format_duration(w.t - SimTime{}), num(w.p.x), num(w.p.y), num(w.p.z)}) << '\n';
    }
    for (const auto& b : c.blockers) {
        os << "\n[blocker]\n";
        os << "center = " << join({num(b.center.x), num(b.center.y), num(b.center.z)}) << '\n';
        os << "dims = " << join({num(b.length), num(b.width), num(b.height)}) << '\n';
        os << "attenuation_db = " << num(b.attenuation_db) << '\n';
        for (const auto& w : b.windows)
            os << "window = " << format_duration(w.on - SimTime{}) << ' ' << format_duration(w.off - SimTime{})
               << '\n';
        if (b.poisson_rate)
            os << "poisson_rate = " << num(*b.poisson_rate) << '\n';
    }
    for (const auto& f : c.flows) {
        os << "\n[flow]\n";
        os << "src = " << f.src << '\n';
        os << "dst = " << f.dst << '\n';
        os << "rate = " << num(f.rate_bps) << '\n';
        os << "packet_size = " << f.packet_size << '\n';
        os << "start = " << format_duration(f.start - SimTime{}) << '\n';
        os << "stop = " << format_duration(f.stop - SimTime{}) << '\n';
    }
    return os.str();
}

std::vector<phy::BlockageWindow> poisson_blockage(double mu, RngStream& rng, Duration horizon)
{
    if (!(mu > 0.0))
        throw std::invalid_argument("poisson_blockage: mu must be positive");
    std::vector<phy::BlockageWindow> out;
    const SimTime end = at(horizon);
    SimTime t{};
    while (true) {
        const SimTime on = t + seconds(rng.exponential(mu));
        if (on >= end)
            break;
        SimTime off = on + seconds(rng.exponential(mu));
        if (off > end)
            off = end;
        if (on < off)
            out.push_back({on, off});
        t = off;
    }
    return out;
}

}  // namespace mmr::scenario
