#pragma once

// Labelled curve collections and their on-disk form: a JSON manifest
// {"name", "n", "T", "labels", "curves", "meta"} plus one headerless CSV per
// curve with T lines of n comma-separated decimals.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curvelrr/curve.hpp"
#include "curvelrr/error.hpp"
#include "curvelrr/kmeans.hpp"

namespace curvelrr {

struct Dataset {
    std::vector<Curve> curves;
    Labels truth;
    std::string name;
    nlohmann::json meta = nlohmann::json::object();

    Index size() const noexcept { return static_cast<Index>(curves.size()); }
    Index length() const { return curves.empty() ? 0 : curves.front().length(); }
    Index dim() const { return curves.empty() ? 0 : curves.front().dim(); }

    /// Throws DataError unless labels match curves and all curves share T and n.
    void validate() const {
        if (curves.empty()) throw DataError("dataset '" + name + "' has no curves");
        if (truth.size() != curves.size())
            throw DataError("dataset '" + name + "': " + std::to_string(truth.size()) + " labels for " +
                            std::to_string(curves.size()) + " curves");
        for (size_t i = 0; i < curves.size(); ++i) {
            if (curves[i].length() != length() || curves[i].dim() != dim())
                throw DataError("dataset '" + name + "': curve " + std::to_string(i) + " is " +
                                std::to_string(curves[i].length()) + "x" + std::to_string(curves[i].dim()) +
                                ", expected " + std::to_string(length()) + "x" + std::to_string(dim()));
        }
    }

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.name == b.name && a.truth == b.truth && a.meta == b.meta && a.curves == b.curves;
    }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string curve_file_name(size_t i) {
    std::ostringstream os;
    os << "curves/curve_";
    os.width(4);
    os.fill('0');
    os << i << ".csv";
    return os.str();
}

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline MatrixXd read_curve_csv(const std::filesystem::path& file, Index T, Index n) {
    std::ifstream in(file);
    if (!in) throw DataError(file.string() + ": cannot open curve file");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw DataError(file.string() + ": empty curve file");
    if (static_cast<Index>(lines.size()) != T)
        throw DataError(file.string() + ": expected " + std::to_string(T) + " lines, found " +
                        std::to_string(lines.size()));
    MatrixXd m(T, n);
    for (Index r = 0; r < T; ++r) {
        const std::string& line = lines[static_cast<size_t>(r)];
        const std::string where = file.string() + ":" + std::to_string(r + 1);
        Index col = 0;
        size_t pos = 0;
        while (true) {
            const size_t comma = line.find(',', pos);
            const std::string field = trim(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
            if (col >= n)
                throw DataError(where + ": more than " + std::to_string(n) + " values (ragged row)");
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
                throw DataError(where + ": cannot parse value '" + field + "'");
            if (!std::isfinite(v)) throw DataError(where + ": non-finite value");
            m(r, col++) = v;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (col != n)
            throw DataError(where + ": expected " + std::to_string(n) + " values, found " + std::to_string(col) +
                            " (ragged row)");
    }
    return m;
}

} // namespace detail

/// Writes `dir/manifest.json` and `dir/curves/curve_NNNN.csv`. Values are
/// printed in shortest round-trip form, so load_dataset restores them exactly.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    ds.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir / "curves", ec);
    if (ec) throw DataError(dir.string() + ": cannot create dataset directory: " + ec.message());

    nlohmann::json manifest;
    manifest["name"] = ds.name;
    manifest["n"] = ds.dim();
    manifest["T"] = ds.length();
    manifest["labels"] = ds.truth;
    manifest["curves"] = nlohmann::json::array();
    manifest["meta"] = ds.meta;
    for (size_t i = 0; i < ds.curves.size(); ++i) {
        const std::string rel = detail::curve_file_name(i);
        manifest["curves"].push_back(rel);
        std::ofstream out(dir / rel, std::ios::binary);
        if (!out) throw DataError((dir / rel).string() + ": cannot write curve file");
        const MatrixXd& s = ds.curves[i].samples();
        for (Index r = 0; r < s.rows(); ++r) {
            for (Index c = 0; c < s.cols(); ++c) {
                if (c) out << ',';
                out << detail::format_double(s(r, c));
            }
            out << '\n';
        }
        if (!out) throw DataError((dir / rel).string() + ": write failed");
    }
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError((dir / "manifest.json").string() + ": cannot write manifest");
    out << manifest.dump(2) << '\n';
    if (!out) throw DataError((dir / "manifest.json").string() + ": write failed");
}

/// Loads a dataset from a manifest file or a directory containing manifest.json.
inline Dataset load_dataset(const std::filesystem::path& path) {
    const std::filesystem::path manifest_path =
        std::filesystem::is_directory(path) ? path / "manifest.json" : path;
    std::ifstream in(manifest_path);
    if (!in) throw DataError(manifest_path.string() + ": cannot open manifest");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (detail::trim(text).empty()) throw DataError(manifest_path.string() + ": empty manifest");

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(manifest_path.string() + ": malformed manifest: " + e.what());
    }
    auto field = [&](const char* key) -> const nlohmann::json& {
        if (!manifest.is_object() || !manifest.contains(key))
            throw DataError(manifest_path.string() + ": manifest lacks field '" + key + "'");
        return manifest.at(key);
    };

    Dataset ds;
    try {
        ds.name = field("name").get<std::string>();
        const auto n = field("n").get<Index>();
        const auto T = field("T").get<Index>();
        if (n < 1 || T < 3) throw DataError(manifest_path.string() + ": need n >= 1 and T >= 3");
        ds.truth = field("labels").get<Labels>();
        const auto files = field("curves").get<std::vector<std::string>>();
        if (manifest.contains("meta")) ds.meta = manifest.at("meta");
        if (files.empty()) throw DataError(manifest_path.string() + ": manifest lists no curves");
        if (files.size() != ds.truth.size())
            throw DataError(manifest_path.string() + ": " + std::to_string(ds.truth.size()) + " labels for " +
                            std::to_string(files.size()) + " curves");
        const std::filesystem::path base = manifest_path.parent_path();
        for (size_t i = 0; i < files.size(); ++i) {
            try {
                ds.curves.emplace_back(detail::read_curve_csv(base / files[i], T, n));
            } catch (const DataError& e) {
                throw DataError("curve " + std::to_string(i) + " (" + files[i] + "): " + e.what());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest_path.string() + ": bad manifest field: " + e.what());
    }
    ds.validate();
    return ds;
}

} // namespace curvelrr
