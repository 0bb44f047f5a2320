// curvelrr: generate curve datasets, cluster them, and run repeated benchmarks.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 solver failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvelrr/curvelrr.hpp"

namespace fs = std::filesystem;
using namespace curvelrr;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct GenFlags {
    std::string kind = "sine";
    int clusters = 3;
    int per_cluster = 20;
    Index length = 100;
    Index dim = 2;
    std::vector<double> shift;
    std::vector<double> stretch;
    double local_warp = -1.0;
    double separation = kDefaultBasisSeparation;
};

struct MethodFlags {
    double lambda = 0.1;
    double dtw_window = 0.10;
    unsigned threads = 1;
    bool zero_diagonal = false;
};

void add_gen_flags(CLI::App* cmd, GenFlags& g) {
    cmd->add_option("kind", g.kind, "Dataset kind")->check(CLI::IsMember({"sine", "warped-basis"}))->required();
    cmd->add_option("--clusters", g.clusters, "Number of clusters")->check(CLI::PositiveNumber);
    cmd->add_option("--per-cluster", g.per_cluster, "Curves per cluster")->check(CLI::PositiveNumber);
    cmd->add_option("--length", g.length, "Samples per curve T")->check(CLI::Range(3, 1000000));
    cmd->add_option("--dim", g.dim, "Curve dimension n (warped-basis only)")->check(CLI::PositiveNumber);
    cmd->add_option("--shift-range", g.shift, "Warp shift interval LO HI")->expected(2);
    cmd->add_option("--stretch-range", g.stretch, "Warp stretch interval LO HI")->expected(2);
    cmd->add_option("--local-warp", g.local_warp, "Local warp amplitude in [0, 1)");
    cmd->add_option("--separation", g.separation, "Minimum normalized L2 distance between bases");
}

void add_method_flags(CLI::App* cmd, MethodFlags& m) {
    cmd->add_option("--lambda", m.lambda, "Low-rank regularization weight")->check(CLI::PositiveNumber);
    cmd->add_option("--dtw-window", m.dtw_window, "DTW band as a fraction of curve length");
    cmd->add_option("--threads", m.threads, "Worker threads for the Gram tensor")->check(CLI::PositiveNumber);
    cmd->add_flag("--zero-diagonal", m.zero_diagonal, "Drop self-affinity before spectral clustering");
}

BenchmarkSpec make_spec(const GenFlags& g, std::uint64_t seed) {
    BenchmarkSpec spec;
    spec.kind = parse_kind(g.kind);
    spec.clusters = g.clusters;
    spec.per_cluster = g.per_cluster;
    spec.length = g.length;
    spec.dim = g.dim;
    spec.seed = seed;
    spec.basis_separation = g.separation;
    spec.warp = spec.kind == DatasetKind::sine ? default_sine_warp() : default_basis_warp();
    if (!g.shift.empty()) spec.warp.shift_range = {g.shift[0], g.shift[1]};
    if (!g.stretch.empty()) spec.warp.stretch_range = {g.stretch[0], g.stretch[1]};
    if (g.local_warp >= 0.0) spec.warp.local_warp_amplitude = g.local_warp;
    spec.validate();
    return spec;
}

PipelineConfig make_pipeline(const MethodFlags& m) {
    PipelineConfig cfg;
    cfg.set_lambda(m.lambda);
    cfg.dtw.window_fraction = m.dtw_window;
    cfg.dtw.validate();
    cfg.gram.threads = m.threads;
    cfg.zero_diagonal = m.zero_diagonal;
    return cfg;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError(file.string() + ": cannot open for writing");
    out << text;
    if (!out) throw DataError(file.string() + ": write failed");
}

std::vector<Method> parse_methods(const std::string& csv) {
    std::vector<Method> out;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(parse_method(item));
    if (out.empty()) throw InvalidArgument("--methods: empty list");
    return out;
}

int cmd_generate(const GenFlags& g, std::uint64_t seed, const fs::path& out) {
    const BenchmarkSpec spec = make_spec(g, seed);
    const Dataset ds = make_dataset(spec, seed);
    save_dataset(ds, out);
    std::cout << "wrote " << ds.size() << " curves (" << ds.length() << " x " << ds.dim() << ") to " << out.string()
              << '\n';
    return 0;
}

int cmd_cluster(const fs::path& data, const std::string& method_str, int clusters, const MethodFlags& m,
                std::uint64_t seed, const fs::path& out) {
    const Method method = parse_method(method_str);
    const PipelineConfig cfg = make_pipeline(m);
    const Dataset ds = load_dataset(data);
    const int c = clusters > 0 ? clusters : static_cast<int>(std::set<int>(ds.truth.begin(), ds.truth.end()).size());
    const auto start = std::chrono::steady_clock::now();
    const MethodOutcome res = run_method(method, ds, c, seed, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_text(out, nlohmann::json(res.labels).dump() + "\n");
    std::cout << "method=" << method_name(method) << " clusters=" << c << " sca=" << sca(res.labels, ds.truth)
              << " runtime_s=" << secs;
    if (res.iters) std::cout << " iters=" << *res.iters << " converged=" << (*res.converged ? "true" : "false");
    std::cout << '\n';
    return 0;
}

int cmd_benchmark(const GenFlags& g, const MethodFlags& m, const std::string& methods, int repeats,
                  std::uint64_t seed, const fs::path& out, bool quiet) {
    BenchmarkSpec spec = make_spec(g, seed);
    spec.methods = parse_methods(methods);
    spec.repeats = repeats;
    spec.pipeline = make_pipeline(m);
    spec.validate();
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw DataError(out.string() + ": cannot create output directory: " + ec.message());

    const auto results = run_benchmark(spec, [quiet](const RunRecord& r) {
        if (quiet) return;
        std::cerr << "repeat " << r.repeat << ' ' << method_name(r.method) << " sca=" << r.sca
                  << " time=" << r.runtime_seconds << "s";
        if (!r.error.empty()) std::cerr << " FAILED: " << r.error;
        std::cerr << '\n';
    });
    const std::string table = format_table(results);
    write_text(out / "runs.csv", runs_csv(results));
    write_text(out / "summary.csv", summary_csv(results));
    write_text(out / "timings.csv", timings_csv(results));
    write_text(out / "table.txt", table);
    std::cout << table;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curve clustering with low-rank representations on the SRVF quotient manifold"};
    app.set_config("--config", "", "TOML/INI file with default flag values");
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out;

    GenFlags gen;
    auto* generate = app.add_subcommand("generate", "Generate a labelled dataset directory");
    add_gen_flags(generate, gen);
    generate->add_option("--seed", seed, "Random seed");
    generate->add_option("--out", out, "Output dataset directory")->required();

    std::string data, method = "clrr";
    int clusters = 0;
    MethodFlags mflags;
    auto* cluster = app.add_subcommand("cluster", "Cluster a dataset and score it against its labels");
    cluster->add_option("data", data, "Dataset directory or manifest.json")->required();
    cluster->add_option("--method", method, "kmeans, dtw, lrr or clrr");
    cluster->add_option("--clusters", clusters, "Number of clusters (default: number of true labels)");
    cluster->add_option("--seed", seed, "Random seed for k-means restarts");
    cluster->add_option("--out", out, "Output labels file (JSON array)")->default_str("labels.json");
    add_method_flags(cluster, mflags);

    GenFlags bgen;
    MethodFlags bflags;
    std::string methods = "kmeans,dtw,lrr,clrr";
    int repeats = 1;
    bool quiet = false;
    auto* bench = app.add_subcommand("benchmark", "Repeat generate + cluster and tabulate SCA statistics");
    add_gen_flags(bench, bgen);
    add_method_flags(bench, bflags);
    bench->add_option("--methods", methods, "Comma-separated methods");
    bench->add_option("--repeats", repeats, "Number of fresh datasets")->check(CLI::PositiveNumber);
    bench->add_option("--seed", seed, "Seed of repeat 0; repeat r uses seed + r");
    bench->add_option("--out", out, "Output directory for CSV files and table")->required();
    bench->add_flag("--quiet", quiet, "Suppress per-run progress");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*generate) return cmd_generate(gen, seed, out);
        if (*cluster) return cmd_cluster(data, method, clusters, mflags, seed, out.empty() ? "labels.json" : out);
        if (*bench) return cmd_benchmark(bgen, bflags, methods, repeats, seed, out, quiet);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitUsage;
}
