// mmroute: run, validate and compare mmWave routing scenarios.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmroute/network.hpp"
#include "mmroute/scenario.hpp"

namespace fs = std::filesystem;
using namespace mmr;

namespace {

std::vector<scenario::Override> split_overrides(const std::vector<std::string>& sets)
{
    std::vector<scenario::Override> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("--set expects key=value, got '" + s + "'");
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

void print_summary(std::ostream& os, const traffic::MetricsReport& r)
{
    os << "flow  generated  delivered  dropped  buffered  mean_bps  median_delay_ns\n";
    for (const auto& f : r.flows) {
        const auto delivered = r.delivered(f.id);
        const double mean_bps = static_cast<double>(delivered) * f.packet_size * 8.0 / r.duration.seconds();
        const auto med = traffic::quantile(r.delays(f.id), 0.5);
        os << f.id << "  " << r.generated.at(f.id) << "  " << delivered << "  " << r.dropped.at(f.id) << "  "
           << r.queued(f.id) << "  " << traffic::format_double(mean_bps) << "  "
           << (med ? std::to_string(*med) : "-") << '\n';
    }
}

int run_one(const fs::path& file, std::uint64_t seed, bool seed_given, const std::vector<scenario::Override>& sets,
            const fs::path& out, bool trace, std::ostream& log)
{
    auto overrides = sets;
    if (seed_given)
        overrides.emplace_back("seed", std::to_string(seed));
    const scenario::ScenarioConfig cfg = scenario::parse_scenario(file, overrides);
    const RunOutput result = run_scenario(cfg);
    write_outputs(result, out, trace);
    log << "seed " << cfg.seed << " -> " << out.string() << '\n';
    print_summary(log, result.report);
    return 0;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s)
{
    const auto dots = s.find("..");
    if (dots == std::string::npos)
        throw std::invalid_argument("--seeds expects N..M");
    const std::uint64_t lo = std::stoull(s.substr(0, dots));
    const std::uint64_t hi = std::stoull(s.substr(dots + 2));
    if (hi < lo)
        throw std::invalid_argument("--seeds range is empty");
    return {lo, hi};
}

// ---- compare

using Table = std::vector<std::vector<std::string>>;

Table read_csv(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot read " + p.string());
    Table rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

struct RunSummary {
    std::map<std::string, double> mean_bps;
    std::map<std::string, std::vector<std::int64_t>> delays;
    std::map<std::string, std::uint64_t> overhead;
};

RunSummary summarize(const fs::path& dir)
{
    RunSummary s;
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& row : read_csv(dir / "throughput.csv")) {
        auto& [sum, n] = acc[row.at(1)];
        sum += std::stod(row.at(2));
        ++n;
    }
    for (const auto& [flow, v] : acc)
        s.mean_bps[flow] = v.second ? v.first / static_cast<double>(v.second) : 0.0;
    for (const auto& row : read_csv(dir / "delays.csv"))
        s.delays[row.at(0)].push_back(std::stoll(row.at(2)) - std::stoll(row.at(1)));
    for (const auto& row : read_csv(dir / "overhead.csv"))
        s.overhead[row.at(0)] = std::stoull(row.at(1));
    return s;
}

std::string cell(std::optional<std::int64_t> v) { return v ? std::to_string(*v) : "-"; }

int compare(const fs::path& a, const fs::path& b)
{
    const RunSummary ra = summarize(a);
    const RunSummary rb = summarize(b);
    std::cout << "# throughput (mean over windows, bps)\nflow,A,B,B-A\n";
    for (const auto& [flow, va] : ra.mean_bps) {
        const double vb = rb.mean_bps.count(flow) ? rb.mean_bps.at(flow) : 0.0;
        std::cout << flow << ',' << traffic::format_double(va) << ',' << traffic::format_double(vb) << ','
                  << traffic::format_double(vb - va) << '\n';
    }
    std::cout << "\n# delay deciles (ns)\nflow,q,A,B,B-A\n";
    for (const auto& [flow, da] : ra.delays) {
        const auto db = rb.delays.count(flow) ? rb.delays.at(flow) : std::vector<std::int64_t>{};
        for (int d = 1; d <= 9; ++d) {
            const auto qa = traffic::quantile(da, d / 10.0);
            const auto qb = traffic::quantile(db, d / 10.0);
            std::cout << flow << ",0." << d << ',' << cell(qa) << ',' << cell(qb) << ','
                      << (qa && qb ? std::to_string(*qb - *qa) : "-") << '\n';
        }
    }
    std::cout << "\n# overhead (bytes)\ncategory,A,B,B-A\n";
    for (const auto& [cat, va] : ra.overhead) {
        const std::uint64_t vb = rb.overhead.count(cat) ? rb.overhead.at(cat) : 0;
        std::cout << cat << ',' << va << ',' << vb << ','
                  << static_cast<std::int64_t>(vb) - static_cast<std::int64_t>(va) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mmWave multi-hop routing simulator"};
    app.require_subcommand(1);

    std::string run_file;
    std::uint64_t seed = 0;
    std::vector<std::string> sets;
    std::string out_dir;
    bool trace = false;
    std::string seeds;
    auto* run = app.add_subcommand("run", "run a scenario and write CSV outputs");
    run->add_option("file", run_file, "scenario file")->required()->check(CLI::ExistingFile);
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--set", sets, "override a scenario key (key=value); repeatable");
    run->add_option("--out", out_dir, "output directory (default: $MMROUTE_OUT or ./out)");
    run->add_flag("--trace", trace, "also write trace.log");
    run->add_option("--seeds", seeds, "run seeds N..M in parallel, one subdirectory each")->excludes(seed_opt);

    std::string validate_file;
    auto* val = app.add_subcommand("validate", "check a scenario file");
    val->add_option("file", validate_file, "scenario file")->required();

    std::string dir_a, dir_b;
    auto* cmp = app.add_subcommand("compare", "delta tables between two output directories");
    cmp->add_option("dirA", dir_a)->required()->check(CLI::ExistingDirectory);
    cmp->add_option("dirB", dir_b)->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (out_dir.empty()) {
                const char* env = std::getenv("MMROUTE_OUT");
                out_dir = env && *env ? env : "out";
            }
            const auto overrides = split_overrides(sets);
            if (seeds.empty())
                return run_one(run_file, seed, seed_opt->count() > 0, overrides, out_dir, trace, std::cout);

            const auto [lo, hi] = parse_seed_range(seeds);
            std::vector<std::future<std::string>> jobs;
            for (std::uint64_t s = lo; s <= hi; ++s) {
                jobs.push_back(std::async(std::launch::async, [=, &overrides] {
                    std::ostringstream log;
                    run_one(run_file, s, true, overrides, fs::path(out_dir) / ("seed_" + std::to_string(s)), trace,
                            log);
                    return log.str();
                }));
            }
            int rc = 0;
            for (auto& j : jobs) {
                try {
                    std::cout << j.get();
                } catch (const std::exception& e) {
                    std::cerr << "error: " << e.what() << '\n';
                    rc = 1;
                }
            }
            return rc;
        }
        if (*val) {
            const auto cfg = scenario::parse_scenario(validate_file);
            std::cout << validate_file << ": ok (" << cfg.nodes.size() << " nodes, " << cfg.flows.size()
                      << " flows, protocol " << scenario::to_string(cfg.protocol.type) << ")\n";
            return 0;
        }
        if (*cmp)
            return compare(dir_a, dir_b);
    } catch (const scenario::ScenarioError& e) {
        for (const auto& d : e.diagnostics())
            std::cerr << (d.line ? "line " + std::to_string(d.line) + ": " : std::string()) << d.message << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
