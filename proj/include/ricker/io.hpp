// io.hpp
//
// Flat-file artifacts: sample and survival CSVs, shortest round-trip number
// formatting, and a content hash for configs.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ricker/estimators.hpp"
#include "ricker/hitting.hpp"

namespace ricker::io {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed significant digits for human-readable reports.
inline std::string format_sig(double v, int digits = 4)
{
    if (!std::isfinite(v)) {
        return format_double(v);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string samples_csv(const SampleSet& samples)
{
    std::string out = "trajectory_index,outcome,n\n";
    out.reserve(out.size() + samples.size() * 16);
    for (std::size_t i = 0; i < samples.outcomes.size(); ++i) {
        const auto& o = samples.outcomes[i];
        out += std::to_string(i);
        out += ',';
        out += to_string(o.kind);
        out += ',';
        out += std::to_string(o.n);
        out += '\n';
    }
    return out;
}

inline std::string survival_csv(const SurvivalCurve& curve)
{
    std::string out = "n,S\n";
    for (const auto& p : curve.points) {
        out += std::to_string(p.n) + ',' + format_double(p.S) + '\n';
    }
    return out;
}

/// Parses the sample schema. Rows may come in any order; the result is
/// ordered by trajectory index. The horizon is taken from censored rows when
/// present, otherwise from `horizon_hint`, otherwise the largest n.
inline SampleSet parse_samples_csv(const std::string& text, std::int64_t horizon_hint = 0)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "trajectory_index,outcome,n") {
        throw std::invalid_argument("samples csv: expected header trajectory_index,outcome,n");
    }
    std::vector<std::pair<std::size_t, HittingOutcome>> rows;
    std::int64_t censor_h = -1;
    std::int64_t max_n = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw std::invalid_argument("samples csv: malformed line " + std::to_string(line_no));
        }
        std::size_t idx = 0;
        std::int64_t n = 0;
        const auto r1 = std::from_chars(line.data(), line.data() + c1, idx);
        const auto r2 = std::from_chars(line.data() + c2 + 1, line.data() + line.size(), n);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            throw std::invalid_argument("samples csv: bad number on line " + std::to_string(line_no));
        }
        const auto kind = outcome_kind_from_string(line.substr(c1 + 1, c2 - c1 - 1));
        if (kind == OutcomeKind::censored) {
            if (censor_h >= 0 && censor_h != n) {
                throw std::invalid_argument("samples csv: mixed censoring horizons");
            }
            censor_h = n;
        }
        max_n = std::max(max_n, n);
        rows.push_back({idx, HittingOutcome{kind, n, 0.0}});
    }
    if (rows.empty()) {
        throw std::invalid_argument("samples csv: no rows");
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SampleSet s;
    s.horizon = censor_h >= 0 ? censor_h : (horizon_hint > 0 ? horizon_hint : max_n);
    s.outcomes.reserve(rows.size());
    for (auto& r : rows) {
        s.outcomes.push_back(r.second);
    }
    return s;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

}  // namespace ricker::io
