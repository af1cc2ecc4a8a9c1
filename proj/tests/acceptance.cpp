// Acceptance suite: ten go/no-go checks covering transform integrity, the
// no-attack round trip, PSNR calibration, the robustness bands, monotonicity,
// voting gain, metric exactness, CLI determinism and edge-detector sanity.
// Prints one PASS/FAIL line per criterion; exit code is the failure count.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "support/synthetic.hpp"
#include "support/testutil.hpp"
#include "wmark/attacks.hpp"
#include "wmark/bench.hpp"
#include "wmark/codec.hpp"
#include "wmark/complexity.hpp"
#include "wmark/haar.hpp"
#include "wmark/image.hpp"
#include "wmark/metrics.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

/// Covers, plans and calibrated strengths shared across criteria. Plans and
/// betas are computed once on first use; a criterion that needs them still
/// pays the cost inside its own timer if it runs first.
struct Context {
    std::vector<std::pair<std::string, wmark::Image>> covers = synth::standard_covers();
    std::map<std::string, wmark::EmbedPlan> plans;
    std::map<std::string, double> betas;  // calibrated to 45 dB per cover
    // cover, message length, seed, achieved PSNR; filled by criterion 2.
    std::vector<std::tuple<std::string, int, std::uint64_t, double>> embed_psnrs;

    const wmark::EmbedPlan& plan(const std::string& name) {
        auto it = plans.find(name);
        if (it != plans.end()) return it->second;
        for (const auto& [n, img] : covers)
            if (n == name) return plans.emplace(name, wmark::make_embed_plan(img, 0.4, 0.5)).first->second;
        throw std::runtime_error("unknown cover " + name);
    }

    // One calibration per cover; the probe message length does not matter
    // because the per-block offset magnitudes are message-independent.
    double beta(const std::string& name) {
        auto it = betas.find(name);
        if (it != betas.end()) return it->second;
        const double b =
            wmark::calibrate_beta(plan(name), wmark::Watermark::random(128, 1), 45.0);
        betas[name] = b;
        return b;
    }

    const wmark::Image& cover(const std::string& name) const {
        for (const auto& [n, img] : covers)
            if (n == name) return img;
        throw std::runtime_error("unknown cover " + name);
    }
};

double energy(const wmark::Mat& m) {
    double e = 0.0;
    for (double v : m.a) e += v * v;
    return e;
}

double energy(const wmark::SubbandSet& s) {
    return energy(s.cA) + energy(s.cH) + energy(s.cV) + energy(s.cD);
}

// --- criterion 1: transform round trip and energy preservation ---------------

Outcome criterion1() {
    std::mt19937_64 rng(1001);
    double max_err = 0.0, max_rel = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const wmark::Mat block = testutil::random_block(rng);
        const wmark::BlockPyramid pyr = wmark::pyramid_forward(block);
        const wmark::Mat back = wmark::pyramid_inverse(pyr);
        for (int i = 0; i < 64; ++i)
            max_err = std::max(max_err, std::abs(back.a[i] - block.a[i]));

        const double e0 = energy(block);
        const double e1 = energy(pyr.level1);
        const double e2 = energy(pyr.level2) + energy(pyr.level1.cH) +
                          energy(pyr.level1.cV) + energy(pyr.level1.cD);
        const double e3 = energy(pyr.level3) + energy(pyr.level2.cH) +
                          energy(pyr.level2.cV) + energy(pyr.level2.cD) +
                          energy(pyr.level1.cH) + energy(pyr.level1.cV) +
                          energy(pyr.level1.cD);
        for (double e : {e1, e2, e3})
            max_rel = std::max(max_rel, std::abs(e - e0) / e0);
    }
    const bool pass = max_err <= 1e-9 && max_rel <= 1e-9;
    return {pass, "1000 blocks, max abs err " + fmt("%.2e", max_err) + ", max energy drift " +
                      fmt("%.2e", max_rel)};
}

// --- criterion 2: no-attack BER is exactly zero ------------------------------

Outcome criterion2(Context& ctx) {
    const auto t0 = Clock::now();
    int runs = 0, nonzero = 0;
    std::string first_bad;
    for (const auto& [name, cover] : ctx.covers) {
        const wmark::EmbedPlan& plan = ctx.plan(name);
        const double beta = ctx.beta(name);
        for (int length : {128, 256}) {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                const wmark::Watermark wm = wmark::Watermark::random(length, seed);
                const auto [marked, side] = wmark::embed_with_plan(plan, wm, beta);
                ctx.embed_psnrs.emplace_back(name, length, seed, wmark::psnr(cover, marked));
                const double b = wmark::ber(wm.bits, wmark::extract(marked, side));
                ++runs;
                if (b != 0.0) {
                    ++nonzero;
                    if (first_bad.empty())
                        first_bad = name + "/" + std::to_string(length) + "b/seed" +
                                    std::to_string(seed) + " ber=" + fmt("%.3f", b) + "%";
                }
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = nonzero == 0 && secs < 30.0;
    std::string detail = std::to_string(runs) + " runs, " + std::to_string(nonzero) +
                         " with nonzero BER, " + fmt("%.1f", secs) + "s (budget 30s)";
    if (!first_bad.empty()) detail += "; first: " + first_bad;
    return {pass, detail};
}

// --- criterion 3: calibration lands inside [44.9, 45.1] dB -------------------

Outcome criterion3(Context& ctx) {
    if (ctx.embed_psnrs.empty()) {
        // Criterion 2 did not run to completion; measure directly.
        for (const auto& [name, cover] : ctx.covers) {
            const wmark::Watermark wm = wmark::Watermark::random(128, 1);
            const auto [marked, side] =
                wmark::embed_with_plan(ctx.plan(name), wm, ctx.beta(name));
            ctx.embed_psnrs.emplace_back(name, 128, 1, wmark::psnr(cover, marked));
        }
    }
    double lo = 1e9, hi = -1e9;
    std::string worst;
    for (const auto& [name, length, seed, p] : ctx.embed_psnrs) {
        if (p < lo) {
            lo = p;
            worst = name + "/" + std::to_string(length) + "b/seed" + std::to_string(seed);
        }
        hi = std::max(hi, p);
    }
    const bool pass = lo >= 44.9 && hi <= 45.1;
    return {pass, "achieved PSNR in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) +
                      "] dB over " + std::to_string(ctx.embed_psnrs.size()) +
                      " embeds (min at " + worst + ")"};
}

// --- criteria 4 and 5: robustness bands --------------------------------------

Outcome check_bands(const wmark::BenchReport& report,
                    const std::map<std::string, double>& bands) {
    std::string worst;
    double worst_margin = 1e9;
    bool pass = true;
    for (const auto& agg : report.aggregates()) {
        const auto band = bands.find(agg.attack);
        if (band == bands.end()) continue;
        const double margin = band->second - agg.mean_ber;
        if (margin < worst_margin) {
            worst_margin = margin;
            worst = agg.image + "/" + agg.attack + " mean " + fmt("%.3f", agg.mean_ber) +
                    "% (band " + fmt("%.0f", band->second) + "%)";
        }
        if (agg.mean_ber > band->second) pass = false;
    }
    return {pass, "tightest: " + worst};
}

Outcome criterion4(Context& ctx) {
    const auto t0 = Clock::now();
    wmark::BenchConfig cfg;
    cfg.images = ctx.covers;
    cfg.attacks = wmark::table1_attacks();
    cfg.message_length = 128;
    cfg.seed_count = 10;
    const wmark::BenchReport report = wmark::run_bench(cfg);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    Outcome o = check_bands(report, {{"median3", 1.0},
                                     {"gauss:1.5", 1.0},
                                     {"sp:0.03", 4.0},
                                     {"sp:0.05", 8.0},
                                     {"awgn:15", 10.0}});
    o.pass = o.pass && secs < 180.0;
    o.detail += ", " + fmt("%.1f", secs) + "s (budget 180s)";
    return o;
}

Outcome criterion5(Context& ctx) {
    wmark::BenchConfig cfg;
    cfg.images = ctx.covers;
    cfg.attacks = wmark::table2_attacks();
    cfg.message_length = 256;
    cfg.seed_count = 10;
    const wmark::BenchReport report = wmark::run_bench(cfg);
    return check_bands(report, {{"jpeg:40", 1.0},
                                {"jpeg:30", 2.0},
                                {"jpeg:20", 10.0},
                                {"median3", 2.0}});
}

// --- criterion 6: monotonicity in noise density and JPEG quality -------------

Outcome criterion6(Context& ctx) {
    const std::vector<std::string> densities = {"sp:0.03", "sp:0.04", "sp:0.05"};
    std::vector<double> mean_ber(densities.size(), 0.0);
    int runs = 0;
    for (const auto& [name, cover] : ctx.covers) {
        const wmark::EmbedPlan& plan = ctx.plan(name);
        const double beta = ctx.beta(name);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const wmark::Watermark wm = wmark::Watermark::random(128, seed);
            const auto [marked, side] = wmark::embed_with_plan(plan, wm, beta);
            for (std::size_t d = 0; d < densities.size(); ++d) {
                const wmark::Image attacked =
                    wmark::apply_attack(marked, wmark::AttackSpec::parse(densities[d]), seed);
                mean_ber[d] += wmark::ber(wm.bits, wmark::extract(attacked, side));
            }
            ++runs;
        }
    }
    for (double& m : mean_ber) m /= runs;

    bool pass = mean_ber[0] <= mean_ber[1] && mean_ber[1] <= mean_ber[2];
    std::string detail = "sp mean BER " + fmt("%.3f", mean_ber[0]) + "% -> " +
                         fmt("%.3f", mean_ber[1]) + "% -> " + fmt("%.3f", mean_ber[2]) + "%";

    // JPEG side: on every cover, heavier quantization cannot reduce the error.
    bool jpeg_ok = true;
    for (const auto& [name, cover] : ctx.covers) {
        double prev = std::numeric_limits<double>::infinity();
        for (int q = 20; q <= 100; q += 10) {
            const double m = wmark::mse(cover, wmark::jpeg_sim(cover, q));
            if (m > prev) {
                jpeg_ok = false;
                detail += "; jpeg MSE rises on " + name + " at Q=" + std::to_string(q);
            }
            prev = m;
        }
    }
    if (jpeg_ok) detail += "; jpeg MSE non-increasing in Q on all 4 covers";
    return {pass && jpeg_ok, detail};
}

// --- criterion 7: majority voting beats single-coefficient decoding ----------

Outcome criterion7(Context& ctx) {
    const std::vector<wmark::AttackSpec> suite = wmark::full_attack_suite();
    double sum_majority = 0.0, sum_approx = 0.0;
    int runs = 0;
    for (const std::string name : {"texture", "scene"}) {
        const wmark::EmbedPlan& plan = ctx.plan(name);
        const double beta = ctx.beta(name);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const wmark::Watermark wm = wmark::Watermark::random(128, seed);
            const auto [marked, side] = wmark::embed_with_plan(plan, wm, beta);
            for (const auto& spec : suite) {
                const wmark::Image attacked = wmark::apply_attack(marked, spec, seed);
                sum_majority += wmark::ber(
                    wm.bits, wmark::extract(attacked, side, wmark::VoteMode::all_coefficients));
                sum_approx += wmark::ber(
                    wm.bits, wmark::extract(attacked, side, wmark::VoteMode::approx_only));
                ++runs;
            }
        }
    }
    const double mean_majority = sum_majority / runs;
    const double mean_approx = sum_approx / runs;
    return {mean_majority <= mean_approx,
            "mean BER majority " + fmt("%.4f", mean_majority) + "% vs approx-only " +
                fmt("%.4f", mean_approx) + "% over " + std::to_string(runs) + " runs"};
}

// --- criterion 8: metric implementations match brute force -------------------

Outcome criterion8() {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 8 + static_cast<int>(rng() % 64);
        const int h = 8 + static_cast<int>(rng() % 64);
        wmark::Image a(w, h), b(w, h);
        for (auto& p : a.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
        for (auto& p : b.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);

        double acc = 0.0;  // same left-to-right order as the implementation
        for (std::size_t i = 0; i < a.pixels.size(); ++i) {
            const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
            acc += d * d;
        }
        const double brute_mse = acc / static_cast<double>(a.pixels.size());
        const double brute_psnr = brute_mse == 0.0
                                      ? std::numeric_limits<double>::infinity()
                                      : 10.0 * std::log10(255.0 * 255.0 / brute_mse);
        if (wmark::mse(a, b) != brute_mse) return {false, "mse mismatch"};
        if (wmark::psnr(a, b) != brute_psnr) return {false, "psnr mismatch"};

        const int n = 1 + static_cast<int>(rng() % 256);
        std::vector<std::uint8_t> x(n), y(n);
        for (auto& v : x) v = static_cast<std::uint8_t>(rng() & 1u);
        for (auto& v : y) v = static_cast<std::uint8_t>(rng() & 1u);
        int bad = 0;
        for (int i = 0; i < n; ++i) bad += x[i] != y[i];
        if (wmark::ber(x, y) != 100.0 * bad / static_cast<double>(n))
            return {false, "ber mismatch"};
    }

    // Uniform +1 shift: MSE 1, PSNR 20*log10(255) = 48.1308... dB.
    const wmark::Image z(32, 32, 0), o(32, 32, 1);
    const double p = wmark::psnr(z, o);
    if (std::abs(p - 48.1308) > 1e-3)
        return {false, "closed form off: " + fmt("%.6f", p)};
    return {true, "100 random pairs exact, closed form " + fmt("%.4f", p) + " dB"};
}

// --- criterion 9: CLI reruns are byte-identical ------------------------------

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(WMARK_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliRun res;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

wmark::Image crop128(const wmark::Image& src, int row0, int col0) {
    wmark::Image out(128, 128);
    for (int r = 0; r < 128; ++r)
        for (int c = 0; c < 128; ++c) out.at(r, c) = src.at(row0 + r, col0 + c);
    return out;
}

Outcome criterion9(Context& ctx) {
    testutil::TempDir tmp;
    const std::string cover = tmp.file("cover.pgm");
    wmark::write_pgm(crop128(ctx.cover("texture"), 0, 0), cover);
    const std::string covers_dir = tmp.file("covers");
    std::filesystem::create_directory(covers_dir);
    wmark::write_pgm(crop128(ctx.cover("texture"), 128, 128), covers_dir + "/c1.pgm");
    wmark::write_pgm(crop128(ctx.cover("rings"), 0, 0), covers_dir + "/c2.pgm");

    // Each entry: subcommand arguments with OUT placeholders, output files.
    struct Step {
        std::string name;
        std::string args;  // "%1", "%2"... replaced per run
        int outputs = 0;
    };
    const std::vector<Step> steps = {
        {"embed",
         "embed --input " + cover + " --bits 32 --seed 3 --target-psnr 45 --output %1"
         " --side-info %2 --message-out %3",
         3},
        {"extract", "extract --input " + tmp.file("embed-a0") + " --side-info " +
                        tmp.file("embed-a1") + " --output %1", 1},
        {"attack", "attack --input " + cover + " --spec sp:0.05 --seed 11 --output %1", 1},
        {"bench", "bench --covers " + covers_dir +
                      " --attacks median3 --attacks awgn:15 --bits 16 --seeds 2"
                      " --target-psnr none --beta 4 --csv %1",
         1},
        {"gamma-sweep", "gamma-sweep --input " + cover + " --bits 16 --seed 2 --csv %1", 1},
        {"metrics", "metrics --image-a " + cover + " --image-b " + cover, 0},
    };

    for (const Step& step : steps) {
        std::string out_a, out_b;
        for (int run = 0; run < 2; ++run) {
            std::string args = step.args;
            std::vector<std::string> files;
            for (int i = 1; i <= step.outputs; ++i) {
                const std::string placeholder = "%" + std::to_string(i);
                const std::string path =
                    tmp.file(step.name + "-" + (run == 0 ? "a" : "b") + std::to_string(i - 1));
                args.replace(args.find(placeholder), placeholder.size(), path);
                files.push_back(path);
            }
            const CliRun res = run_cli(args);
            if (res.code != 0)
                return {false, step.name + " exited " + std::to_string(res.code) + ": " + res.out};
            std::string concat = res.out;
            for (const std::string& f : files) concat += "\x1f" + slurp(f);
            (run == 0 ? out_a : out_b) = concat;
        }
        if (out_a != out_b) return {false, step.name + " rerun differed"};
    }
    return {true, "6 subcommands rerun byte-identical (stdout and output files)"};
}

// --- criterion 10: edge detector sanity ---------------------------------------

Outcome criterion10() {
    const wmark::EdgeMap flat = wmark::canny(wmark::Image(128, 128, 77));
    for (int r = 0; r < flat.height; ++r)
        for (int c = 0; c < flat.width; ++c)
            if (flat.at(r, c)) return {false, "constant image produced an edge pixel"};

    // Hard vertical step between columns 63 and 64.
    wmark::Image step(128, 128);
    for (int r = 0; r < 128; ++r)
        for (int c = 0; c < 128; ++c) step.at(r, c) = c < 64 ? 60 : 190;
    const wmark::EdgeMap edges = wmark::canny(step);
    int count = 0, min_col = 1 << 30, max_col = -1;
    for (int r = 0; r < edges.height; ++r)
        for (int c = 0; c < edges.width; ++c)
            if (edges.at(r, c)) {
                ++count;
                min_col = std::min(min_col, c);
                max_col = std::max(max_col, c);
            }
    if (count == 0) return {false, "step image produced no edges"};
    const bool confined = min_col >= 62 && max_col <= 65;
    return {confined, "step edges in columns [" + std::to_string(min_col) + ", " +
                          std::to_string(max_col) + "], " + std::to_string(count) + " pixels"};
}

template <typename Fn>
bool run_criterion(int id, const char* label, Fn&& fn) {
    const auto t0 = Clock::now();
    Outcome outcome;
    try {
        outcome = fn();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s criterion %d (%s) [%.1fs]%s%s\n", outcome.pass ? "PASS" : "FAIL", id, label,
                secs, outcome.detail.empty() ? "" : ": ", outcome.detail.c_str());
    std::fflush(stdout);
    return outcome.pass;
}

}  // namespace

int main() {
    Context ctx;
    int failures = 0;
    failures += !run_criterion(1, "transform round trip and energy", [] { return criterion1(); });
    failures += !run_criterion(2, "no-attack BER zero", [&] { return criterion2(ctx); });
    failures += !run_criterion(3, "45 dB calibration", [&] { return criterion3(ctx); });
    failures += !run_criterion(4, "filtering and noise bands, 128-bit", [&] { return criterion4(ctx); });
    failures += !run_criterion(5, "compression bands, 256-bit", [&] { return criterion5(ctx); });
    failures += !run_criterion(6, "attack monotonicity", [&] { return criterion6(ctx); });
    failures += !run_criterion(7, "voting dominance", [&] { return criterion7(ctx); });
    failures += !run_criterion(8, "metric oracles", [] { return criterion8(); });
    failures += !run_criterion(9, "CLI determinism", [&] { return criterion9(ctx); });
    failures += !run_criterion(10, "edge detector sanity", [] { return criterion10(); });
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures;
}
