#ifndef HAZMIX_COMMANDS_HPP
#define HAZMIX_COMMANDS_HPP

// Batch commands behind the `hazmix` executable. Each writes its artifacts
// into an output directory; files use `,` separators and LF line endings.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hazmix/data_io.hpp"
#include "hazmix/errors.hpp"
#include "hazmix/gibbs.hpp"
#include "hazmix/inference.hpp"
#include "hazmix/validation.hpp"

namespace hazmix {

struct RunConfig {
    std::string data;      // path, or builtin:leukemia-treatment / builtin:leukemia-placebo
    std::string simulate;  // weibull-mix:n=<count>
    std::optional<double> M;
    std::optional<std::size_t> q;
    int N = 10;
    std::size_t iters = 10000;
    std::size_t burnin = 1000;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    std::string out = "out";
    bool trace = false;
};

struct LoadedData {
    RawDataset raw;
    double M;
    std::size_t q;
};

/// Resolves the dataset source and the grid defaults attached to it.
inline LoadedData resolve_dataset(const RunConfig& cfg) {
    if (cfg.data.empty() == cfg.simulate.empty())
        throw std::invalid_argument("exactly one of --data and --simulate is required");
    LoadedData out;
    double M = 0.0;
    std::size_t q = 100;
    if (!cfg.simulate.empty()) {
        const std::string prefix = "weibull-mix:n=";
        if (cfg.simulate.rfind(prefix, 0) != 0)
            throw std::invalid_argument("--simulate expects weibull-mix:n=<count>");
        const std::string count = cfg.simulate.substr(prefix.size());
        std::size_t n = 0;
        const auto res = std::from_chars(count.data(), count.data() + count.size(), n);
        if (res.ec != std::errc() || res.ptr != count.data() + count.size() || n < 1)
            throw std::invalid_argument("--simulate: invalid sample size `" + count + "`");
        out.raw = simulate_weibull_mixture(n, cfg.seed);
        M = 5.0;
    } else if (cfg.data == "builtin:leukemia-treatment" || cfg.data == "builtin:leukemia-placebo") {
        const auto [treatment, placebo] = builtin_leukemia();
        out.raw = cfg.data == "builtin:leukemia-treatment" ? treatment : placebo;
        M = 70.0;
        q = 50;
    } else if (cfg.data.rfind("builtin:", 0) == 0) {
        throw std::invalid_argument("unknown builtin dataset `" + cfg.data + "`");
    } else {
        out.raw = load_csv(cfg.data);
        if (out.raw.rows.empty()) throw DataError(cfg.data + ": dataset has no rows");
        M = 2.0 * out.raw.max_time();
    }
    out.M = cfg.M.value_or(M);
    out.q = cfg.q.value_or(q);
    return out;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

inline void write_row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << format_double(v);
        first = false;
    }
    os << '\n';
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    auto f = open_output(path);
    f << j.dump(2) << '\n';
}

}  // namespace detail

struct FitResult {
    MomentEstimates estimates;
    SurvivalSummary summary;
    double M = 0.0;
    std::size_t q = 0;
};

/// Chain, reconstruction and summaries without touching the filesystem.
inline FitResult run_fit(const RunConfig& cfg, const RawDataset& raw, double M, std::size_t q) {
    if (cfg.N < 2) throw std::invalid_argument("--N must be at least 2");
    if (cfg.samples < 1) throw std::invalid_argument("--samples must be positive");
    GibbsConfig g;
    g.l_max = cfg.iters;
    g.l_min = cfg.burnin;
    g.seed = cfg.seed;
    g.N = cfg.N;
    g.q = q;
    g.M = M;
    g.keep_trace = cfg.trace;
    g.validate();
    const SurvivalData data(raw.rows);
    FitResult res;
    res.M = M;
    res.q = q;
    res.estimates = run_chain(data, g);
    res.summary = t_by_t_summaries(res.estimates, cfg.samples, cfg.seed);
    return res;
}

/// Writes summary.csv, moments.csv, median_survival.json, summary.json and
/// optionally trace.csv into cfg.out.
inline FitResult cmd_fit(const RunConfig& cfg) {
    const LoadedData ld = resolve_dataset(cfg);
    FitResult res = run_fit(cfg, ld.raw, ld.M, ld.q);
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);

    {
        auto f = detail::open_output(dir / "summary.csv");
        f << "t,mean,median,mode,hpd_lo,hpd_hi,marg_lo,marg_hi,c_i\n";
        for (const auto& r : res.summary.rows)
            detail::write_row(f, {r.t, r.mean, r.median, r.mode, r.hpd_lo, r.hpd_hi, r.marg_lo, r.marg_hi, r.c});
    }
    {
        auto f = detail::open_output(dir / "moments.csv");
        f << 't';
        for (int r = 1; r <= res.estimates.N; ++r) f << ",mu_" << r;
        f << '\n';
        for (std::size_t i = 0; i < res.estimates.grid.size(); ++i) {
            f << detail::format_double(res.estimates.grid[i]);
            for (int r = 1; r <= res.estimates.N; ++r) f << ',' << detail::format_double(res.estimates.mu[i][r]);
            f << '\n';
        }
    }
    if (cfg.trace) {
        auto f = detail::open_output(dir / "trace.csv");
        f << "l,c,beta,k\n";
        for (const auto& row : res.estimates.trace)
            f << row.l << ',' << detail::format_double(row.c) << ',' << detail::format_double(row.beta) << ','
              << row.k << '\n';
    }

    const auto& med = res.summary.median;
    nlohmann::ordered_json mj;
    mj["m_hat"] = med.m_hat;
    mj["interval"] = {med.lo, med.hi};
    mj["level"] = 0.95;
    mj["grid"] = res.estimates.grid;
    mj["c"] = med.c;
    detail::write_json(dir / "median_survival.json", mj);

    nlohmann::ordered_json sj;
    sj["dataset"] = {{"name", ld.raw.name},
                     {"n", ld.raw.rows.size()},
                     {"censored", ld.raw.censored_count()}};
    sj["settings"] = {{"M", res.M},           {"q", res.q},           {"N", cfg.N},
                      {"iters", cfg.iters},   {"burnin", cfg.burnin}, {"samples", cfg.samples},
                      {"seed", cfg.seed}};
    sj["median_survival"] = mj;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : res.summary.rows) {
        rows.push_back({{"t", r.t},
                        {"mean", r.mean},
                        {"median", r.median},
                        {"mode", r.mode},
                        {"hpd", {r.hpd_lo, r.hpd_hi}},
                        {"hpd_conservative", r.hpd_conservative},
                        {"marginal", {r.marg_lo, r.marg_hi}},
                        {"c", r.c},
                        {"order", r.order},
                        {"degenerate", r.degenerate},
                        {"ess", r.ess}});
    }
    sj["summaries"] = rows;
    detail::write_json(dir / "summary.json", sj);
    return res;
}

/// Writes l2_curve.csv, intervals.csv and densities.csv for the synthetic
/// families.
inline void cmd_validate_approx(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    const FamilyTag tags[] = {FamilyTag::Beta, FamilyTag::BetaMixture, FamilyTag::TruncNormal};
    {
        auto f = detail::open_output(dir / "l2_curve.csv");
        f << "family,N,mean_l2,accepted,rejected\n";
        for (FamilyTag tag : tags) {
            SyntheticFamily fam;
            fam.tag = tag;
            for (const auto& p : l2_error_curve(fam, default_l2_orders()))
                f << family_name(tag) << ',' << p.N << ',' << detail::format_double(p.mean_error) << ','
                  << p.accepted << ',' << p.rejected << '\n';
        }
    }
    {
        auto f = detail::open_output(dir / "intervals.csv");
        f << "family,t,mean,true_lo,true_hi,approx_lo,approx_hi,is_lo,is_hi\n";
        std::size_t stream = 0;
        for (FamilyTag tag : tags) {
            SyntheticFamily fam;
            fam.tag = tag;
            for (const auto& row : interval_comparison(fam, cfg.N)) {
                auto rng = time_point_rng(cfg.seed, stream++);
                const auto d = reconstruct_family(fam, row.t, cfg.N);
                const WeightedSample ws = importance_sample(d, cfg.samples, rng);
                f << family_name(tag) << ',';
                detail::write_row(f, {row.t, row.mean, row.true_lo, row.true_hi, row.approx_lo, row.approx_hi,
                                      weighted_quantile(ws, 0.025), weighted_quantile(ws, 0.975)});
            }
        }
    }
    {
        auto f = detail::open_output(dir / "densities.csv");
        f << "family,t,s,true,approx\n";
        for (FamilyTag tag : tags) {
            SyntheticFamily fam;
            fam.tag = tag;
            for (double t : {0.1, 0.5, 2.5}) {
                const auto d = reconstruct_family(fam, t, cfg.N);
                for (int k = 1; k < 200; ++k) {
                    const double s = k / 200.0;
                    f << family_name(tag) << ',';
                    detail::write_row(f, {t, s, fam.density(t, s), static_cast<double>(d.fN(s))});
                }
            }
        }
    }
}

/// Writes km.csv with the product-limit step function.
inline KaplanMeier cmd_km(const RunConfig& cfg) {
    const LoadedData ld = resolve_dataset(cfg);
    const KaplanMeier km = kaplan_meier(ld.raw.rows);
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    auto f = detail::open_output(dir / "km.csv");
    f << "time,survival,at_risk,events\n";
    f << "0,1," << ld.raw.rows.size() << ",0\n";
    for (std::size_t i = 0; i < km.times.size(); ++i)
        f << detail::format_double(km.times[i]) << ',' << detail::format_double(km.survival[i]) << ','
          << km.at_risk[i] << ',' << km.events[i] << '\n';
    return km;
}

}  // namespace hazmix

#endif  // HAZMIX_COMMANDS_HPP
