#include "gridres/correction.hpp"
#include "gridres/finite_grid.hpp"
#include "gridres/kernel.hpp"
#include "gridres/oracle.hpp"
#include "gridres/selftest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace {

using gridres::CacheStats;
using gridres::CorrectionCache;
using gridres::GridSpec;
using gridres::HybridConfig;
using gridres::Method;
using gridres::NodeCoord;
using json = nlohmann::json;

constexpr int kExitBadFlags = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitUnwritable = 4;

class FlagError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridFlags {
    int lx = 0;
    int ly = 0;
    std::optional<double> rh;
    std::optional<double> rv;
    std::optional<double> alpha;
};

void add_grid_flags(CLI::App* cmd, GridFlags& g, bool alpha_allowed = true) {
    cmd->add_option("--lx", g.lx, "grid width (nodes)")->required();
    cmd->add_option("--ly", g.ly, "grid height (nodes)")->required();
    cmd->add_option("--rh", g.rh, "horizontal unit resistance (ohms)");
    cmd->add_option("--rv", g.rv, "vertical unit resistance (ohms)");
    if (alpha_allowed)
        cmd->add_option("--alpha", g.alpha, "anisotropy rh/rv (implies rv = 1)");
}

GridSpec resolve_grid(const GridFlags& g) {
    double rh = 1.0, rv = 1.0;
    if (g.alpha && (g.rh || g.rv)) {
        const double from_r = g.rh.value_or(1.0) / g.rv.value_or(1.0);
        if (std::abs(from_r - *g.alpha) > 1e-12 * std::max(from_r, *g.alpha))
            throw FlagError("--alpha contradicts --rh/--rv");
        rh = g.rh.value_or(*g.alpha * g.rv.value_or(1.0));
        rv = g.rv.value_or(rh / *g.alpha);
    } else if (g.alpha) {
        rh = *g.alpha;
        rv = 1.0;
    } else {
        rh = g.rh.value_or(1.0);
        rv = g.rv.value_or(1.0);
    }
    try {
        return GridSpec(g.lx, g.ly, rh, rv);
    } catch (const std::invalid_argument& e) {
        throw FlagError(e.what());
    }
}

NodeCoord parse_node(const std::string& text, const GridSpec& grid, const char* flag) {
    int x = 0, y = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%d,%d%c", &x, &y, &extra) != 2)
        throw FlagError(std::string(flag) + " expects x,y");
    const NodeCoord n{x, y};
    if (!in_bounds(n, grid))
        throw FlagError(std::string(flag) + ": node " + text + " out of bounds");
    return n;
}

Method parse_method(const std::string& name) {
    if (name == "theta") return Method::Theta;
    if (name == "hybrid") return Method::Hybrid;
    if (name == "oracle") return Method::Oracle;
    if (name == "analytic-infinite") return Method::AnalyticInfinite;
    if (name == "exact-infinite") return Method::ExactInfinite;
    throw FlagError("unknown method: " + name);
}

json cache_json(const CacheStats& s) {
    return {{"hits", s.hits}, {"misses", s.misses}, {"size", s.size}, {"hit_rate", s.hit_rate}};
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw OutputError("cannot write " + path);
    return out;
}

int cmd_resistance(const GridFlags& gf, const std::string& src, const std::string& dst,
                   const std::string& method_name) {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec grid = resolve_grid(gf);
    const NodeCoord s = parse_node(src, grid, "--src");
    const NodeCoord d = parse_node(dst, grid, "--dst");
    const Method method = parse_method(method_name);

    double ohms = 0.0;
    long corrections = 0;
    switch (method) {
        case Method::Theta:
            ohms = r_theta_closed(s, d, grid);
            break;
        case Method::Hybrid: {
            HybridConfig cfg;
            CorrectionCache cache(cfg.cache_capacity);
            const auto result = r_finite_hybrid(s, d, grid, cache, cfg);
            ohms = result.ohms;
            corrections = result.corrections_applied;
            break;
        }
        case Method::Oracle:
            ohms = r_oracle(s, d, grid);
            break;
        case Method::AnalyticInfinite:
            ohms = grid.r0() *
                   omega_analytic_infinite({d.x - s.x, d.y - s.y}, grid.anisotropy());
            break;
        case Method::ExactInfinite:
            ohms = grid.r0() * omega_exact({d.x - s.x, d.y - s.y}, grid.anisotropy());
            break;
    }

    json out = {{"resistance_ohms", ohms},
                {"method", gridres::method_name(method)},
                {"corrections_applied", corrections},
                {"wall_time_ms", elapsed_ms(start)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_errormap(const GridFlags& gf, const std::string& src, const std::string& method_name,
                 const std::string& out_path) {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec grid = resolve_grid(gf);
    const NodeCoord s = parse_node(src, grid, "--src");
    const Method method = parse_method(method_name);
    if (method != Method::Theta && method != Method::Hybrid)
        throw FlagError("errormap supports --method theta|hybrid");

    HybridConfig cfg;
    CorrectionCache cache(cfg.cache_capacity);
    const std::vector<double> oracle = all_resistances_from(s, grid);

    std::ofstream csv = open_output(out_path);
    csv << "x,y,r_method,r_oracle,rel_error_percent\n";

    double sum_err = 0.0, max_err = -1.0;
    NodeCoord max_node{0, 0};
    long count = 0;
    for (int y = 0; y < grid.ly; ++y) {
        for (int x = 0; x < grid.lx; ++x) {
            const NodeCoord t{x, y};
            if (t == s) continue;
            const double ref = oracle[node_index(t, grid)];
            const double val = method == Method::Theta
                                   ? r_theta_closed(s, t, grid)
                                   : r_finite_hybrid(s, t, grid, cache, cfg).ohms;
            const double rel = std::abs(val - ref) / ref;
            sum_err += rel;
            ++count;
            if (rel > max_err) {
                max_err = rel;
                max_node = t;
            }
            char line[160];
            std::snprintf(line, sizeof(line), "%d,%d,%.12g,%.12g,%.6g\n", x, y, val, ref,
                          100.0 * rel);
            csv << line;
        }
    }
    csv.close();
    if (!csv) throw OutputError("failed writing " + out_path);

    json out = {{"grid",
                 {{"lx", grid.lx},
                  {"ly", grid.ly},
                  {"rh", grid.r_h},
                  {"rv", grid.r_v},
                  {"alpha", grid.alpha()}}},
                {"source", {{"x", s.x}, {"y", s.y}}},
                {"method", gridres::method_name(method)},
                {"nodes", count},
                {"mean_rel_error", sum_err / count},
                {"max_rel_error", max_err},
                {"max_error_node", {{"x", max_node.x}, {"y", max_node.y}}},
                {"cache", cache_json(cache.stats())},
                {"out", out_path},
                {"wall_time_ms", elapsed_ms(start)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_bench(const GridFlags& gf, long queries, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec grid = resolve_grid(gf);
    if (queries < 0) throw FlagError("--queries must be >= 0");

    HybridConfig cfg;
    CorrectionCache cache(cfg.cache_capacity);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> xd(0, grid.lx - 1), yd(0, grid.ly - 1);

    std::vector<double> latencies_us;
    latencies_us.reserve(static_cast<std::size_t>(queries));
    double resistance_sum = 0.0;
    for (long i = 0; i < queries; ++i) {
        const NodeCoord s{xd(rng), yd(rng)};
        const NodeCoord d{xd(rng), yd(rng)};
        const auto t0 = std::chrono::steady_clock::now();
        resistance_sum += r_finite_hybrid(s, d, grid, cache, cfg).ohms;
        latencies_us.push_back(
            std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
                .count());
    }

    double mean_us = 0.0, p99_us = 0.0;
    if (!latencies_us.empty()) {
        for (double v : latencies_us) mean_us += v;
        mean_us /= double(latencies_us.size());
        std::vector<double> sorted = latencies_us;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t idx =
            std::min(sorted.size() - 1,
                     static_cast<std::size_t>(std::ceil(0.99 * double(sorted.size()))) - 1);
        p99_us = sorted[idx];
    }

    const CacheStats stats = cache.stats();
    char sum_text[64];
    std::snprintf(sum_text, sizeof(sum_text), "%.17g", resistance_sum);
    json out = {{"grid",
                 {{"lx", grid.lx},
                  {"ly", grid.ly},
                  {"rh", grid.r_h},
                  {"rv", grid.r_v},
                  {"alpha", grid.alpha()}}},
                {"queries", queries},
                {"seed", seed},
                {"total_time_ms", elapsed_ms(start)},
                {"mean_latency_us", mean_us},
                {"p99_latency_us", p99_us},
                {"cache", cache_json(stats)},
                {"unique_integrations", stats.misses},
                {"resistance_sum", std::string(sum_text)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_netlist(const GridFlags& gf, const std::string& src, const std::string& dst,
                const std::string& out_path) {
    const GridSpec grid = resolve_grid(gf);
    const NodeCoord s = parse_node(src, grid, "--src");
    const NodeCoord d = parse_node(dst, grid, "--dst");
    if (s == d) throw FlagError("--src and --dst must differ");

    std::ofstream out = open_output(out_path);
    out << emit_netlist(grid, s, d);
    out.close();
    if (!out) throw OutputError("failed writing " + out_path);
    return 0;
}

int cmd_selftest(bool fast) {
    const auto results = gridres::run_selftest(fast);
    int failures = 0;
    for (const auto& r : results) {
        if (r.passed) {
            std::cout << "ok   " << r.name << "\n";
        } else {
            ++failures;
            std::cout << "FAIL " << r.name << ": " << r.detail << "\n";
        }
    }
    std::cout << results.size() << " checks, " << failures << " failed\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective resistance engine for anisotropic 2D resistor grids"};
    app.require_subcommand(1);

    GridFlags res_grid, map_grid, bench_grid, net_grid;
    std::string res_src, res_dst, res_method = "hybrid";
    std::string map_src, map_method = "hybrid", map_out;
    std::string net_src, net_dst, net_out;
    long bench_queries = 1000;
    std::uint64_t bench_seed = 1;
    bool selftest_fast = false;

    auto* res = app.add_subcommand("resistance", "two-point resistance query");
    add_grid_flags(res, res_grid);
    res->add_option("--src", res_src, "source node x,y")->required();
    res->add_option("--dst", res_dst, "drain node x,y")->required();
    res->add_option("--method", res_method,
                    "theta|hybrid|oracle|analytic-infinite|exact-infinite");

    auto* map = app.add_subcommand("errormap", "per-node error map vs the oracle");
    add_grid_flags(map, map_grid);
    map->add_option("--src", map_src, "source node x,y")->required();
    map->add_option("--method", map_method, "theta|hybrid");
    map->add_option("--out", map_out, "CSV output path")->required();

    auto* bench = app.add_subcommand("bench", "random-pair hybrid benchmark");
    add_grid_flags(bench, bench_grid);
    bench->add_option("--queries", bench_queries, "number of random pair queries");
    bench->add_option("--seed", bench_seed, "RNG seed");

    auto* net = app.add_subcommand("netlist", "SPICE netlist export");
    add_grid_flags(net, net_grid);
    net->add_option("--src", net_src, "source node x,y")->required();
    net->add_option("--dst", net_dst, "drain node x,y")->required();
    net->add_option("--out", net_out, "netlist output path")->required();

    auto* self = app.add_subcommand("selftest", "run the module invariant suites");
    self->add_flag("--fast", selftest_fast, "skip the heavy oracle sweeps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadFlags;
    }

    try {
        if (res->parsed()) return cmd_resistance(res_grid, res_src, res_dst, res_method);
        if (map->parsed()) return cmd_errormap(map_grid, map_src, map_method, map_out);
        if (bench->parsed()) return cmd_bench(bench_grid, bench_queries, bench_seed);
        if (net->parsed()) return cmd_netlist(net_grid, net_src, net_dst, net_out);
        if (self->parsed()) return cmd_selftest(selftest_fast);
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFlags;
    } catch (const OutputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnwritable;
    } catch (const gridres::QuadratureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const gridres::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFlags;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFlags;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadFlags;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return 0;
}
