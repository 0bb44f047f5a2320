#include <charconv>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "curvelrr/pipeline.hpp"

using namespace curvelrr;

namespace {

BenchmarkSpec tiny_spec() {
    BenchmarkSpec spec;
    spec.clusters = 2;
    spec.per_cluster = 4;
    spec.length = 40;
    spec.repeats = 3;
    spec.seed = 11;
    return spec;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

double to_double(const std::string& s) {
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

} // namespace

TEST(Methods, NamesRoundTrip) {
    for (Method m : all_methods()) EXPECT_EQ(parse_method(method_name(m)), m);
    EXPECT_THROW(parse_method("ssc"), InvalidArgument);
    EXPECT_EQ(parse_kind("warped-basis"), DatasetKind::warped_basis);
    EXPECT_THROW(parse_kind("spiral"), InvalidArgument);
}

TEST(Summary, HandExample) {
    const Summary s = summarize({0.5, 1.0, 0.75, 1.0}, {1.0, 3.0});
    EXPECT_DOUBLE_EQ(s.mean, 0.8125);
    EXPECT_DOUBLE_EQ(s.median, 0.875);
    EXPECT_DOUBLE_EQ(s.max, 1.0);
    EXPECT_DOUBLE_EQ(s.min, 0.5);
    EXPECT_NEAR(s.std, std::sqrt(0.171875 / 3.0), 1e-15);
    EXPECT_DOUBLE_EQ(s.mean_runtime, 2.0);
    EXPECT_EQ(summarize({0.9}, {}).std, 0.0);
}

TEST(RunMethod, ZeroWarpSinesAreSeparatedByEveryMethod) {
    const Dataset ds = gen_sine_clusters(2, 5, 50, WarpSpec{});
    for (Method m : all_methods()) {
        const MethodOutcome out = run_method(m, ds, 2, 0);
        EXPECT_EQ(sca(out.labels, ds.truth), 1.0) << method_name(m);
        EXPECT_EQ(out.iters.has_value(), m == Method::lrr || m == Method::clrr);
    }
    EXPECT_THROW(run_method(Method::kmeans, ds, 11, 0), InvalidArgument);
}

TEST(Benchmark, CsvShapeAndSummaryRecomputation) {
    const BenchmarkSpec spec = tiny_spec();
    const auto results = run_benchmark(spec);
    ASSERT_EQ(results.size(), 4u);
    const auto rows = parse_csv(runs_csv(results));
    ASSERT_EQ(rows.size(), 1u + 4u * 3u);
    EXPECT_EQ(rows[0][0], "method");

    std::map<std::string, std::vector<double>> per_method;
    for (size_t r = 1; r < rows.size(); ++r) per_method[rows[r][0]].push_back(to_double(rows[r][3]));
    for (const auto& res : results) {
        const Summary again = summarize(per_method.at(method_name(res.method)), {});
        EXPECT_EQ(again.mean, res.summary.mean);
        EXPECT_EQ(again.median, res.summary.median);
        EXPECT_EQ(again.max, res.summary.max);
        EXPECT_EQ(again.min, res.summary.min);
        EXPECT_EQ(again.std, res.summary.std);
    }
    const auto summary_rows = parse_csv(summary_csv(results));
    ASSERT_EQ(summary_rows.size(), 5u);
    for (size_t r = 1; r < summary_rows.size(); ++r) {
        const Summary& s = results[r - 1].summary;
        EXPECT_EQ(to_double(summary_rows[r][2]), s.mean);
        EXPECT_EQ(to_double(summary_rows[r][6]), s.std);
    }
    std::istringstream table(format_table(results));
    int lines = 0;
    for (std::string l; std::getline(table, l);) ++lines;
    EXPECT_EQ(lines, 5);
}

TEST(Benchmark, DeterministicOutputs) {
    const BenchmarkSpec spec = tiny_spec();
    const auto a = run_benchmark(spec), b = run_benchmark(spec);
    EXPECT_EQ(runs_csv(a), runs_csv(b));
    EXPECT_EQ(summary_csv(a), summary_csv(b));
}

TEST(Benchmark, SingleRepeatHasZeroStd) {
    BenchmarkSpec spec = tiny_spec();
    spec.repeats = 1;
    spec.methods = {Method::kmeans};
    EXPECT_EQ(run_benchmark(spec).front().summary.std, 0.0);
}

TEST(Benchmark, FailedRunsScoreZeroWithoutAborting) {
    BenchmarkSpec spec = tiny_spec();
    spec.repeats = 2;
    spec.methods = {Method::clrr, Method::kmeans};
    spec.pipeline.solver.rho0 = 0.5;  // invalid, so every clrr run fails
    const auto results = run_benchmark(spec);
    for (const auto& r : results[0].runs) {
        EXPECT_EQ(r.sca, 0.0);
        EXPECT_FALSE(r.error.empty());
    }
    for (const auto& r : results[1].runs) EXPECT_TRUE(r.error.empty());
}

TEST(Benchmark, WarpedBasisDatasetsUseSeparatedBases) {
    BenchmarkSpec spec = tiny_spec();
    spec.kind = DatasetKind::warped_basis;
    spec.warp = default_basis_warp();
    const Dataset ds = make_dataset(spec, 5);
    EXPECT_EQ(ds.size(), 8);
    EXPECT_EQ(ds.dim(), 2);
    EXPECT_EQ(ds.meta.at("basis_seed"), 5);
}
