#ifndef HAZMIX_DATA_IO_HPP
#define HAZMIX_DATA_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hazmix/errors.hpp"
#include "hazmix/survival.hpp"

namespace hazmix {

struct RawDataset {
    std::string name;
    std::string unit;
    std::vector<Observation> rows;

    [[nodiscard]] std::size_t censored_count() const {
        std::size_t k = 0;
        for (const auto& o : rows) k += o.exact ? 0 : 1;
        return k;
    }

    [[nodiscard]] double max_time() const {
        double m = 0.0;
        for (const auto& o : rows) m = std::max(m, o.time);
        return m;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Shortest decimal form that round-trips through from_chars.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses `time,event` CSV text. Errors name the 1-based line number.
inline RawDataset parse_csv(std::istream& in, std::string name = "csv") {
    RawDataset ds;
    ds.name = std::move(name);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view view = detail::trim(line);
        if (view.empty()) continue;
        if (!header) {
            const auto comma = view.find(',');
            if (comma == std::string_view::npos || detail::trim(view.substr(0, comma)) != "time" ||
                detail::trim(view.substr(comma + 1)) != "event")
                throw DataError("line " + std::to_string(lineno) + ": expected header `time,event`");
            header = true;
            continue;
        }
        const auto comma = view.find(',');
        if (comma == std::string_view::npos)
            throw DataError("line " + std::to_string(lineno) + ": expected two comma-separated fields");
        const std::string_view tf = detail::trim(view.substr(0, comma));
        const std::string_view ef = detail::trim(view.substr(comma + 1));
        double t = 0.0;
        const auto rt = std::from_chars(tf.data(), tf.data() + tf.size(), t);
        if (rt.ec != std::errc() || rt.ptr != tf.data() + tf.size())
            throw DataError("line " + std::to_string(lineno) + ": malformed time `" + std::string(tf) + "`");
        if (!(t > 0.0) || !std::isfinite(t))
            throw DataError("line " + std::to_string(lineno) + ": time must be positive and finite");
        if (ef != "0" && ef != "1")
            throw DataError("line " + std::to_string(lineno) + ": event flag must be 0 or 1");
        ds.rows.push_back({t, ef == "1"});
    }
    if (!header) throw DataError("missing header `time,event`");
    return ds;
}

inline RawDataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return parse_csv(in, path);
}

inline void write_csv(std::ostream& out, const RawDataset& ds) {
    out << "time,event\n";
    for (const auto& o : ds.rows) out << detail::format_double(o.time) << ',' << (o.exact ? 1 : 0) << '\n';
}

inline void write_csv(const std::string& path, const RawDataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    write_csv(out, ds);
}

/// Leukemia remission times in weeks: the treated sample (censored times
/// flagged) and the placebo sample (all exact).
inline std::pair<RawDataset, RawDataset> builtin_leukemia() {
    RawDataset treatment{"leukemia-treatment", "weeks", {}};
    const double t_times[] = {6, 6, 6, 6, 7, 9, 10, 10, 11, 13, 16, 17, 19, 20, 22, 23, 25, 32, 32, 34, 35};
    const bool t_exact[] = {true, true, true, false, true, false, true, false, true, true, true,
                            false, false, false, true, true, false, false, false, false, false};
    for (std::size_t i = 0; i < std::size(t_times); ++i) treatment.rows.push_back({t_times[i], t_exact[i]});
    RawDataset placebo{"leukemia-placebo", "weeks", {}};
    for (double t : {1, 1, 2, 2, 3, 4, 4, 5, 5, 8, 8, 8, 11, 11, 12, 12, 15, 17, 22, 23})
        placebo.rows.push_back({t, true});
    return {treatment, placebo};
}

/// S(t) = 1/2 exp(-(t/2)^2) + 1/2 exp(-(2t)^2): Weibull shape 2 with scales
/// 2 and 1/2, in the convention S(t) = exp(-(t/scale)^shape).
inline double weibull_mixture_survival(double t) {
    return 0.5 * std::exp(-(t / 2.0) * (t / 2.0)) + 0.5 * std::exp(-(2.0 * t) * (2.0 * t));
}

inline RawDataset simulate_weibull_mixture(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_weibull_mixture: n must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RawDataset ds{"weibull-mix", "", {}};
    ds.rows.reserve(n);
    while (ds.rows.size() < n) {
        const double scale = unif(rng) < 0.5 ? 2.0 : 0.5;
        const double u = unif(rng);
        const double t = scale * std::sqrt(-std::log1p(-u));
        if (t > 0.0) ds.rows.push_back({t, true});
    }
    return ds;
}

}  // namespace hazmix

#endif  // HAZMIX_DATA_IO_HPP
