#pragma once

// End-to-end clustering methods and the repeated benchmark harness.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curvelrr/baselines.hpp"
#include "curvelrr/clustering.hpp"
#include "curvelrr/datagen.hpp"
#include "curvelrr/dataset.hpp"
#include "curvelrr/dtw.hpp"
#include "curvelrr/lrr.hpp"
#include "curvelrr/manifold.hpp"
#include "curvelrr/solver.hpp"

namespace curvelrr {

enum class Method { kmeans, dtw, lrr, clrr };

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> m{Method::kmeans, Method::dtw, Method::lrr, Method::clrr};
    return m;
}

inline std::string method_name(Method m) {
    switch (m) {
    case Method::kmeans: return "kmeans";
    case Method::dtw: return "dtw";
    case Method::lrr: return "lrr";
    case Method::clrr: return "clrr";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    for (Method m : all_methods())
        if (method_name(m) == s) return m;
    throw InvalidArgument("unknown method '" + s + "' (expected kmeans, dtw, lrr or clrr)");
}

struct PipelineConfig {
    SolverConfig solver;
    LrrConfig lrr;
    DtwConfig dtw;
    GramOptions gram;
    SigmaRule sigma_rule = SigmaRule::median;
    bool zero_diagonal = false;  ///< drop self-affinity before spectral clustering

    /// Sets the regularization weight of both low-rank methods.
    void set_lambda(double lambda) {
        solver.lambda = lambda;
        lrr.lambda = lambda;
    }
};

struct MethodOutcome {
    Labels labels;
    std::optional<int> iters;
    std::optional<bool> converged;
};

namespace detail {

inline Labels cluster_coefficients(const MatrixXd& W, int c, std::uint64_t seed, bool zero_diagonal) {
    MatrixXd a = W.cwiseAbs();
    if (zero_diagonal) a.diagonal().setZero();
    return spectral_cluster(symmetrize(a), c, seed);
}

} // namespace detail

/// Runs one method from raw curves to labels. `seed` drives k-means restarts.
inline MethodOutcome run_method(Method method, const Dataset& ds, int c, std::uint64_t seed,
                                const PipelineConfig& cfg = {}) {
    ds.validate();
    detail::require(c >= 1 && c <= ds.size(), "run_method: need 1 <= clusters <= N");
    MethodOutcome out;
    switch (method) {
    case Method::kmeans:
        out.labels = kmeans(stack_columns(ds.curves).transpose(), c, seed);
        break;
    case Method::dtw:
        out.labels = spectral_cluster(dtw_affinity(ds.curves, cfg.dtw, cfg.sigma_rule), c, seed);
        break;
    case Method::lrr: {
        const LrrResult r = euclidean_lrr(stack_columns(ds.curves), cfg.lrr);
        out.labels = detail::cluster_coefficients(r.Z, c, seed, cfg.zero_diagonal);
        out.iters = r.iters;
        out.converged = r.converged;
        break;
    }
    case Method::clrr: {
        std::vector<Srvf> srvfs;
        srvfs.reserve(ds.curves.size());
        for (const auto& curve : ds.curves) srvfs.push_back(to_srvf(curve));
        const SolveReport r = solve(build_gram_tensor(srvfs, cfg.gram), cfg.solver);
        out.labels = detail::cluster_coefficients(r.W, c, seed, cfg.zero_diagonal);
        out.iters = r.iters;
        out.converged = r.converged;
        break;
    }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Benchmark

enum class DatasetKind { sine, warped_basis };

inline std::string kind_name(DatasetKind k) { return k == DatasetKind::sine ? "sine" : "warped-basis"; }

inline DatasetKind parse_kind(const std::string& s) {
    if (s == "sine") return DatasetKind::sine;
    if (s == "warped-basis") return DatasetKind::warped_basis;
    throw InvalidArgument("unknown dataset kind '" + s + "' (expected sine or warped-basis)");
}

/// Warp parameters used for the sine benchmark unless overridden.
inline WarpSpec default_sine_warp() {
    WarpSpec w;
    w.shift_range = {-0.3, 0.3};
    w.stretch_range = {0.4, 2.5};
    w.local_warp_amplitude = 0.8;
    return w;
}

/// Warp parameters used for the warped-basis benchmark unless overridden.
inline WarpSpec default_basis_warp() {
    WarpSpec w;
    w.shift_range = {-0.25, 0.25};
    w.stretch_range = {0.5, 2.0};
    w.local_warp_amplitude = 0.7;
    return w;
}

inline constexpr double kDefaultBasisSeparation = 0.5;

struct BenchmarkSpec {
    DatasetKind kind = DatasetKind::sine;
    int clusters = 3;
    int per_cluster = 20;
    Index length = 100;
    Index dim = 2;  ///< curve dimension of warped-basis data; sine data is 1-D
    WarpSpec warp = default_sine_warp();
    double basis_separation = kDefaultBasisSeparation;
    std::vector<Method> methods = all_methods();
    int repeats = 1;
    std::uint64_t seed = 0;
    PipelineConfig pipeline;

    void validate() const {
        detail::require(clusters >= 1 && per_cluster >= 1, "benchmark: need clusters >= 1 and per_cluster >= 1");
        detail::require(repeats >= 1, "benchmark: repeats must be >= 1");
        detail::require(!methods.empty(), "benchmark: no methods selected");
        warp.validate();
    }
};

/// The dataset of one repeat, generated from spec with the given seed.
inline Dataset make_dataset(const BenchmarkSpec& spec, std::uint64_t seed) {
    WarpSpec warp = spec.warp;
    warp.seed = seed;
    if (spec.kind == DatasetKind::sine) return gen_sine_clusters(spec.clusters, spec.per_cluster, spec.length, warp);
    const auto bases = draw_separated_bases(spec.clusters, spec.length, spec.dim, seed, spec.basis_separation);
    Dataset ds = gen_warped_basis_clusters(bases, spec.per_cluster, warp);
    ds.meta["basis_seed"] = seed;
    ds.meta["basis_separation"] = spec.basis_separation;
    return ds;
}

struct RunRecord {
    Method method = Method::clrr;
    int repeat = 0;
    std::uint64_t seed = 0;
    double sca = 0.0;
    double runtime_seconds = 0.0;
    std::optional<int> iters;
    std::optional<bool> converged;
    std::string error;  ///< non-empty for failed runs, which score SCA 0
};

struct Summary {
    double mean = 0.0, median = 0.0, max = 0.0, min = 0.0, std = 0.0;
    double mean_runtime = 0.0;
};

/// Mean, median, extremes and sample standard deviation (0 for a single run).
inline Summary summarize(std::vector<double> sca, const std::vector<double>& runtimes) {
    detail::require(!sca.empty(), "summarize: no runs");
    Summary s;
    const double n = static_cast<double>(sca.size());
    for (double v : sca) s.mean += v;
    s.mean /= n;
    double ss = 0.0;
    for (double v : sca) ss += (v - s.mean) * (v - s.mean);
    s.std = sca.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::sort(sca.begin(), sca.end());
    const size_t m = sca.size() / 2;
    s.median = sca.size() % 2 ? sca[m] : 0.5 * (sca[m - 1] + sca[m]);
    s.min = sca.front();
    s.max = sca.back();
    for (double t : runtimes) s.mean_runtime += t;
    if (!runtimes.empty()) s.mean_runtime /= static_cast<double>(runtimes.size());
    return s;
}

struct BenchmarkResult {
    Method method = Method::clrr;
    std::vector<RunRecord> runs;
    Summary summary;

    void resummarize() {
        std::vector<double> sca, rt;
        for (const auto& r : runs) sca.push_back(r.sca), rt.push_back(r.runtime_seconds);
        summary = summarize(sca, rt);
    }
};

/// Times one method end to end on ds. Exceptions become failed runs.
inline RunRecord run_timed(Method method, const Dataset& ds, int c, std::uint64_t seed, const PipelineConfig& cfg) {
    RunRecord rec;
    rec.method = method;
    rec.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const MethodOutcome out = run_method(method, ds, c, seed, cfg);
        rec.sca = sca(out.labels, ds.truth);
        rec.iters = out.iters;
        rec.converged = out.converged;
    } catch (const std::exception& e) {
        rec.sca = 0.0;
        rec.error = e.what();
    }
    rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

/// Repeat r uses a fresh dataset with seed spec.seed + r; results are ordered
/// by method (in spec order) then repeat.
inline std::vector<BenchmarkResult> run_benchmark(const BenchmarkSpec& spec,
                                                  const std::function<void(const RunRecord&)>& progress = {}) {
    spec.validate();
    std::vector<BenchmarkResult> results(spec.methods.size());
    for (size_t m = 0; m < spec.methods.size(); ++m) results[m].method = spec.methods[m];
    for (int r = 0; r < spec.repeats; ++r) {
        const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(r);
        const Dataset ds = make_dataset(spec, seed);
        for (size_t m = 0; m < spec.methods.size(); ++m) {
            RunRecord rec = run_timed(spec.methods[m], ds, spec.clusters, seed, spec.pipeline);
            rec.repeat = r;
            if (progress) progress(rec);
            results[m].runs.push_back(std::move(rec));
        }
    }
    for (auto& res : results) res.resummarize();
    return results;
}

// ---------------------------------------------------------------------------
// Output

/// Per-run results without timings, so identical seeds give identical bytes.
inline std::string runs_csv(const std::vector<BenchmarkResult>& results) {
    std::ostringstream os;
    os << "method,repeat,seed,sca,iters,converged,error\n";
    for (const auto& res : results)
        for (const auto& r : res.runs) {
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            os << method_name(r.method) << ',' << r.repeat << ',' << r.seed << ',' << detail::format_double(r.sca)
               << ',' << (r.iters ? std::to_string(*r.iters) : "") << ','
               << (r.converged ? (*r.converged ? "true" : "false") : "") << ',' << err << '\n';
        }
    return os.str();
}

inline std::string timings_csv(const std::vector<BenchmarkResult>& results) {
    std::ostringstream os;
    os << "method,repeat,runtime_seconds\n";
    for (const auto& res : results)
        for (const auto& r : res.runs)
            os << method_name(r.method) << ',' << r.repeat << ',' << detail::format_double(r.runtime_seconds) << '\n';
    return os.str();
}

/// SCA statistics per method. Mean run time is left to the table and
/// timings_csv so this file stays reproducible.
inline std::string summary_csv(const std::vector<BenchmarkResult>& results) {
    std::ostringstream os;
    os << "method,runs,mean,median,max,min,std\n";
    for (const auto& res : results) {
        const Summary& s = res.summary;
        os << method_name(res.method) << ',' << res.runs.size() << ',' << detail::format_double(s.mean) << ','
           << detail::format_double(s.median) << ',' << detail::format_double(s.max) << ','
           << detail::format_double(s.min) << ',' << detail::format_double(s.std) << '\n';
    }
    return os.str();
}

/// Human-readable table: SCA statistics in percent plus mean run time.
inline std::string format_table(const std::vector<BenchmarkResult>& results) {
    std::ostringstream os;
    auto cell = [&os](const std::string& s, int w) {
        os.width(w);
        os << s;
    };
    auto pct = [](double v) {
        std::ostringstream p;
        p.setf(std::ios::fixed);
        p.precision(1);
        p << 100.0 * v;
        return p.str();
    };
    cell("Method", 8);
    for (const char* h : {"Mean", "Median", "Max", "Min", "Std"}) cell(h, 9);
    cell("Run Time (s)", 14);
    os << '\n';
    for (const auto& res : results) {
        const Summary& s = res.summary;
        cell(method_name(res.method), 8);
        for (double v : {s.mean, s.median, s.max, s.min, s.std}) cell(pct(v), 9);
        std::ostringstream t;
        t.setf(std::ios::fixed);
        t.precision(3);
        t << s.mean_runtime;
        cell(t.str(), 14);
        os << '\n';
    }
    return os.str();
}

} // namespace curvelrr
