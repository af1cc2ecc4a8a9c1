#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wmark/attacks.hpp"
#include "wmark/codec.hpp"
#include "wmark/metrics.hpp"

namespace wmark {

inline std::vector<AttackSpec> table1_attacks() {
    return {AttackSpec::parse("median3"), AttackSpec::parse("awgn:15"),
            AttackSpec::parse("sp:0.03"), AttackSpec::parse("sp:0.04"),
            AttackSpec::parse("sp:0.05"), AttackSpec::parse("gauss:1.5")};
}

inline std::vector<AttackSpec> table2_attacks() {
    return {AttackSpec::parse("median3"), AttackSpec::parse("median5"),
            AttackSpec::parse("jpeg:20"), AttackSpec::parse("jpeg:30"),
            AttackSpec::parse("jpeg:40")};
}

/// Union of the two presets, used by the gamma sweep.
inline std::vector<AttackSpec> full_attack_suite() {
    return {AttackSpec::parse("median3"),  AttackSpec::parse("median5"),
            AttackSpec::parse("gauss:1.5"), AttackSpec::parse("sp:0.03"),
            AttackSpec::parse("sp:0.04"),   AttackSpec::parse("sp:0.05"),
            AttackSpec::parse("awgn:15"),   AttackSpec::parse("jpeg:20"),
            AttackSpec::parse("jpeg:30"),   AttackSpec::parse("jpeg:40")};
}

struct BenchRow {
    std::string image;
    std::string attack;
    std::uint64_t seed = 0;
    int message_length = 0;
    double gamma = 0.0;
    double beta = 0.0;
    double ber_percent = 0.0;
    double psnr_attack = 0.0;  // attacked vs watermarked
};

struct BenchAggregate {
    std::string image;
    std::string attack;
    int rows = 0;
    double mean_ber = 0.0;
    double min_ber = 0.0;
    double max_ber = 0.0;
    double mean_psnr_attack = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<std::string> images;         // cover name -> embed PSNR achieved
    std::vector<double> embed_psnr;
    std::vector<double> betas;
    int message_length = 0;
    double gamma = 0.0;
    std::optional<double> target_psnr;
    std::uint64_t seed_base = 0;
    int seed_count = 0;

    std::vector<BenchAggregate> aggregates() const {
        std::vector<BenchAggregate> out;
        std::map<std::pair<std::string, std::string>, std::vector<const BenchRow*>> groups;
        for (const BenchRow& r : rows) groups[{r.image, r.attack}].push_back(&r);
        // Preserve first-appearance order rather than map order.
        std::vector<std::pair<std::string, std::string>> order;
        for (const BenchRow& r : rows) {
            const auto key = std::make_pair(r.image, r.attack);
            if (std::find(order.begin(), order.end(), key) == order.end()) order.push_back(key);
        }
        for (const auto& key : order) {
            const auto& g = groups[key];
            BenchAggregate a;
            a.image = key.first;
            a.attack = key.second;
            a.rows = static_cast<int>(g.size());
            a.min_ber = g.front()->ber_percent;
            a.max_ber = g.front()->ber_percent;
            for (const BenchRow* r : g) {
                a.mean_ber += r->ber_percent;
                a.mean_psnr_attack += r->psnr_attack;
                a.min_ber = std::min(a.min_ber, r->ber_percent);
                a.max_ber = std::max(a.max_ber, r->ber_percent);
            }
            a.mean_ber /= a.rows;
            a.mean_psnr_attack /= a.rows;
            out.push_back(a);
        }
        return out;
    }
};

struct BenchConfig {
    std::vector<std::pair<std::string, Image>> images;  // name, pixels
    std::vector<AttackSpec> attacks;
    int message_length = 128;
    int seed_count = 10;
    std::uint64_t seed_base = 1;
    double gamma = 0.4;
    double alpha_min = 0.5;
    double beta = 1.0;                         // used when target_psnr is empty
    std::optional<double> target_psnr = 45.0;  // calibrated once per cover
    CannyParams canny;
};

/// Runs the full methodology: per cover, calibrate beta once (first seed's
/// message), then for every seed embed a fresh random message, apply every
/// attack with that seed, extract, and record BER and attack PSNR.
inline BenchReport run_bench(const BenchConfig& cfg) {
    if (cfg.images.empty()) throw std::invalid_argument("bench: no cover images");
    if (cfg.seed_count < 1) throw std::invalid_argument("bench: seed count must be >= 1");
    if (cfg.attacks.empty()) throw std::invalid_argument("bench: no attacks");

    BenchReport report;
    report.message_length = cfg.message_length;
    report.gamma = cfg.gamma;
    report.target_psnr = cfg.target_psnr;
    report.seed_base = cfg.seed_base;
    report.seed_count = cfg.seed_count;

    for (const auto& [name, cover] : cfg.images) {
        const EmbedPlan plan = make_embed_plan(cover, cfg.gamma, cfg.alpha_min, cfg.canny);
        double beta = cfg.beta;
        if (cfg.target_psnr) {
            const Watermark first = Watermark::random(cfg.message_length, cfg.seed_base);
            beta = calibrate_beta(plan, first, *cfg.target_psnr);
        }
        double psnr_sum = 0.0;
        for (int s = 0; s < cfg.seed_count; ++s) {
            const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(s);
            const Watermark wm = Watermark::random(cfg.message_length, seed);
            const auto [marked, side] = embed_with_plan(plan, wm, beta);
            psnr_sum += psnr(cover, marked);
            for (const AttackSpec& spec : cfg.attacks) {
                const Image attacked = apply_attack(marked, spec, seed);
                const std::vector<std::uint8_t> got = extract(attacked, side);
                BenchRow row;
                row.image = name;
                row.attack = spec.name();
                row.seed = seed;
                row.message_length = cfg.message_length;
                row.gamma = cfg.gamma;
                row.beta = beta;
                row.ber_percent = ber(wm.bits, got);
                row.psnr_attack = psnr(marked, attacked);
                report.rows.push_back(std::move(row));
            }
        }
        report.images.push_back(name);
        report.embed_psnr.push_back(psnr_sum / cfg.seed_count);
        report.betas.push_back(beta);
    }
    return report;
}

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace detail

/// Flat CSV rows; aggregates follow as '#' comment lines so external tools
/// can re-derive every statistic from the rows alone.
inline void write_bench_csv(const BenchReport& report, std::ostream& os) {
    os << "image,attack,seed,message_length,gamma,beta,ber_percent,psnr_attack\n";
    for (const BenchRow& r : report.rows) {
        os << r.image << ',' << r.attack << ',' << r.seed << ',' << r.message_length << ','
           << detail::fmt_double(r.gamma) << ',' << detail::fmt_double(r.beta) << ','
           << detail::fmt_double(r.ber_percent) << ',' << detail::fmt_double(r.psnr_attack)
           << '\n';
    }
    os << "# aggregate,image,attack,rows,mean_ber,min_ber,max_ber,mean_psnr_attack\n";
    for (const BenchAggregate& a : report.aggregates()) {
        os << "# aggregate," << a.image << ',' << a.attack << ',' << a.rows << ','
           << detail::fmt_double(a.mean_ber) << ',' << detail::fmt_double(a.min_ber) << ','
           << detail::fmt_double(a.max_ber) << ',' << detail::fmt_double(a.mean_psnr_attack)
           << '\n';
    }
}

inline void write_bench_text(const BenchReport& report, std::ostream& os) {
    os << "watermark robustness bench\n";
    os << "message_length=" << report.message_length << " gamma="
       << detail::fmt_double(report.gamma);
    if (report.target_psnr)
        os << " target_psnr=" << detail::fmt_double(*report.target_psnr);
    os << " seeds=" << report.seed_count << " (base " << report.seed_base << ")\n\n";
    for (std::size_t i = 0; i < report.images.size(); ++i) {
        os << "cover " << report.images[i] << ": beta=" << detail::fmt_double(report.betas[i])
           << " embed_psnr=" << detail::fmt_double(report.embed_psnr[i]) << " dB\n";
    }
    os << "\nmean BER (%) per cover and attack:\n";
    for (const BenchAggregate& a : report.aggregates()) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-12s %-12s mean %8.4f  min %8.4f  max %8.4f\n",
                      a.image.c_str(), a.attack.c_str(), a.mean_ber, a.min_ber, a.max_ber);
        os << line;
    }
}

struct GammaSweepRow {
    double gamma = 0.0;
    double psnr_no_attack = 0.0;  // uncalibrated, beta = 1
    double mean_ber = 0.0;        // over the attack suite
};

/// Fixed beta=1 sweep over gamma: records the no-attack PSNR and the mean
/// BER over the attack suite for each grid value.
inline std::vector<GammaSweepRow> run_gamma_sweep(const Image& cover,
                                                  const std::vector<double>& gammas,
                                                  int message_length, std::uint64_t seed,
                                                  double alpha_min = 0.5,
                                                  const std::vector<AttackSpec>& attacks =
                                                      full_attack_suite(),
                                                  const CannyParams& canny_params = {}) {
    if (gammas.empty()) throw std::invalid_argument("gamma sweep: empty grid");
    for (double g : gammas)
        if (!(g >= 0.0 && g <= 1.0))
            throw std::invalid_argument("gamma sweep: gamma values must lie in [0,1]");

    std::vector<GammaSweepRow> rows;
    const Watermark wm = Watermark::random(message_length, seed);
    for (double gamma : gammas) {
        const EmbedPlan plan = make_embed_plan(cover, gamma, alpha_min, canny_params);
        const auto [marked, side] = embed_with_plan(plan, wm, 1.0);
        GammaSweepRow row;
        row.gamma = gamma;
        row.psnr_no_attack = psnr(cover, marked);
        double ber_sum = 0.0;
        for (const AttackSpec& spec : attacks) {
            const Image attacked = apply_attack(marked, spec, seed);
            ber_sum += ber(wm.bits, extract(attacked, side));
        }
        row.mean_ber = ber_sum / static_cast<double>(attacks.size());
        rows.push_back(row);
    }
    return rows;
}

inline void write_gamma_sweep_csv(const std::vector<GammaSweepRow>& rows, std::ostream& os) {
    os << "gamma,psnr_no_attack,mean_ber\n";
    for (const GammaSweepRow& r : rows)
        os << detail::fmt_double(r.gamma) << ',' << detail::fmt_double(r.psnr_no_attack) << ','
           << detail::fmt_double(r.mean_ber) << '\n';
}

}  // namespace wmark
