// Command line front end: embed/extract/attack/bench/gamma-sweep/metrics.
// Every subcommand exits nonzero with a one-line diagnostic on bad input.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmark/attacks.hpp"
#include "wmark/bench.hpp"
#include "wmark/codec.hpp"
#include "wmark/image.hpp"
#include "wmark/metrics.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Message files hold one '0' or '1' per line; blank lines are ignored.
std::vector<std::uint8_t> load_message(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::uint8_t> bits;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "0")
            bits.push_back(0);
        else if (line == "1")
            bits.push_back(1);
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected '0' or '1'");
    }
    if (bits.empty()) throw std::runtime_error(path + ": no message bits");
    return bits;
}

void save_message(const std::string& path, const std::vector<std::uint8_t>& bits) {
    std::string out;
    for (std::uint8_t b : bits) {
        out += b ? '1' : '0';
        out += '\n';
    }
    write_file(path, out);
}

// --target-psnr accepts a number or "none" (fixed beta, no calibration).
std::optional<double> parse_target_psnr(const std::string& text) {
    if (text == "none") return std::nullopt;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("invalid --target-psnr '" + text + "'");
    }
    if (pos != text.size() || !std::isfinite(v))
        throw std::runtime_error("invalid --target-psnr '" + text + "'");
    return v;
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

int run(int argc, char** argv) {
    CLI::App app{"wavelet watermark embedder and robustness bench"};
    app.require_subcommand(1);

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "embed a message into a PGM cover");
    std::string embed_in, embed_out, embed_side, embed_message_file, embed_message_out;
    std::uint64_t embed_seed = 1;
    int embed_bits = 128;
    double embed_gamma = 0.4, embed_alpha_min = 0.5, embed_beta = 1.0;
    std::string embed_target = "45";
    embed_cmd->add_option("--input", embed_in, "cover image (PGM)")->required();
    embed_cmd->add_option("--output", embed_out, "watermarked image (PGM)")->required();
    embed_cmd->add_option("--side-info", embed_side, "side info output (WMSI)")->required();
    embed_cmd->add_option("--message-file", embed_message_file,
                          "message bits to embed verbatim (one 0/1 per line); "
                          "overrides --bits/--seed");
    embed_cmd->add_option("--message-out", embed_message_out,
                          "write the embedded bits here (one 0/1 per line)");
    embed_cmd->add_option("--bits", embed_bits, "random message length");
    embed_cmd->add_option("--seed", embed_seed, "random message seed");
    embed_cmd->add_option("--gamma", embed_gamma, "strength exponent in [0,1]");
    embed_cmd->add_option("--alpha-min", embed_alpha_min, "strength floor (gray levels)");
    embed_cmd->add_option("--beta", embed_beta, "global strength scale (used when no target)");
    embed_cmd->add_option("--target-psnr", embed_target, "target PSNR in dB, or 'none'");

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "extract a message from an image");
    std::string extract_in, extract_side, extract_out, extract_ref;
    extract_cmd->add_option("--input", extract_in, "received image (PGM)")->required();
    extract_cmd->add_option("--side-info", extract_side, "side info from embedding")->required();
    extract_cmd->add_option("--output", extract_out, "extracted bits output (one per line)")
        ->required();
    extract_cmd->add_option("--reference", extract_ref,
                            "original message bits; when given, BER is printed");

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "apply one attack to an image");
    std::string attack_in, attack_out, attack_spec;
    std::uint64_t attack_seed = 1;
    attack_cmd->add_option("--input", attack_in, "input image (PGM)")->required();
    attack_cmd->add_option("--output", attack_out, "attacked image (PGM)")->required();
    attack_cmd->add_option("--spec", attack_spec,
                           "attack spec (median3, median5, gauss:V, sp:D, awgn:V, jpeg:Q)")
        ->required();
    attack_cmd->add_option("--seed", attack_seed, "noise seed (sp and awgn)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run the robustness benchmark");
    std::string bench_dir, bench_csv, bench_preset = "table1";
    std::vector<std::string> bench_attack_names;
    int bench_bits = 0, bench_seeds = 10;
    std::uint64_t bench_seed_base = 1;
    double bench_gamma = 0.4, bench_alpha_min = 0.5, bench_beta = 1.0;
    std::string bench_target = "45";
    bench_cmd->add_option("--covers", bench_dir, "directory of cover PGM files")->required();
    bench_cmd->add_option("--csv", bench_csv, "write per-run rows as CSV");
    bench_cmd->add_option("--preset", bench_preset,
                          "attack preset: table1 (128 bits), table2 (256 bits), full");
    bench_cmd->add_option("--attacks", bench_attack_names,
                          "explicit attack specs (override the preset)");
    bench_cmd->add_option("--bits", bench_bits, "message length (default from preset)");
    bench_cmd->add_option("--seeds", bench_seeds, "number of seeds");
    bench_cmd->add_option("--seed-base", bench_seed_base, "first seed");
    bench_cmd->add_option("--gamma", bench_gamma, "strength exponent in [0,1]");
    bench_cmd->add_option("--alpha-min", bench_alpha_min, "strength floor (gray levels)");
    bench_cmd->add_option("--beta", bench_beta, "global strength scale (used when no target)");
    bench_cmd->add_option("--target-psnr", bench_target, "target PSNR in dB, or 'none'");

    // gamma-sweep
    auto* sweep_cmd = app.add_subcommand(
        "gamma-sweep", "sweep gamma at fixed beta=1 over the full attack suite");
    std::string sweep_in, sweep_csv;
    std::vector<double> sweep_gammas;
    int sweep_bits = 128;
    std::uint64_t sweep_seed = 1;
    sweep_cmd->add_option("--input", sweep_in, "cover image (PGM)")->required();
    sweep_cmd->add_option("--csv", sweep_csv, "write sweep rows as CSV");
    sweep_cmd->add_option("--gamma", sweep_gammas,
                          "gamma grid values in [0,1] (default 0,0.2,0.4,0.6,0.8,1)");
    sweep_cmd->add_option("--bits", sweep_bits, "message length");
    sweep_cmd->add_option("--seed", sweep_seed, "message and attack seed");

    // metrics
    auto* metrics_cmd =
        app.add_subcommand("metrics", "PSNR between two images, BER between bit files");
    std::string metrics_a, metrics_b, metrics_bits_a, metrics_bits_b;
    metrics_cmd->add_option("--image-a", metrics_a, "reference image (PGM)");
    metrics_cmd->add_option("--image-b", metrics_b, "distorted image (PGM)");
    metrics_cmd->add_option("--bits-a", metrics_bits_a, "reference bits file");
    metrics_cmd->add_option("--bits-b", metrics_bits_b, "received bits file");

    CLI11_PARSE(app, argc, argv);

    if (*embed_cmd) {
        const wmark::Image cover = wmark::read_pgm(embed_in);
        wmark::Watermark wm;
        if (!embed_message_file.empty()) {
            wm.bits = load_message(embed_message_file);
            wm.seed = 0;
        } else {
            wm = wmark::Watermark::random(embed_bits, embed_seed);
        }
        wmark::EmbedParams params;
        params.gamma = embed_gamma;
        params.alpha_min = embed_alpha_min;
        params.beta = embed_beta;
        params.target_psnr = parse_target_psnr(embed_target);
        const wmark::EmbedResult res = wmark::embed(cover, wm, params);
        wmark::write_pgm(res.image, embed_out);
        wmark::write_side_info(res.side, embed_side);
        if (!embed_message_out.empty()) save_message(embed_message_out, wm.bits);
        std::cout << "embedded " << wm.length()
                  << " bits: beta=" << wmark::detail::fmt_double(res.beta)
                  << " psnr=" << wmark::detail::fmt_double(res.psnr_db) << " dB\n";
        return 0;
    }

    if (*extract_cmd) {
        const wmark::Image img = wmark::read_pgm(extract_in);
        const wmark::SideInfo side = wmark::read_side_info(extract_side);
        const std::vector<std::uint8_t> bits = wmark::extract(img, side);
        save_message(extract_out, bits);
        std::cout << "extracted " << bits.size() << " bits";
        if (!extract_ref.empty())
            std::cout << ": ber=" << wmark::detail::fmt_double(
                             wmark::ber(load_message(extract_ref), bits))
                      << " %";
        std::cout << '\n';
        return 0;
    }

    if (*attack_cmd) {
        const wmark::Image img = wmark::read_pgm(attack_in);
        const wmark::AttackSpec spec = wmark::AttackSpec::parse(attack_spec);
        const wmark::Image attacked = wmark::apply_attack(img, spec, attack_seed);
        wmark::write_pgm(attacked, attack_out);
        std::cout << "applied " << spec.name()
                  << ": psnr=" << wmark::detail::fmt_double(wmark::psnr(img, attacked))
                  << " dB\n";
        return 0;
    }

    if (*bench_cmd) {
        wmark::BenchConfig cfg;
        std::vector<std::string> paths;
        for (const auto& entry : std::filesystem::directory_iterator(bench_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".pgm")
                paths.push_back(entry.path().string());
        std::sort(paths.begin(), paths.end());
        if (paths.empty())
            throw std::runtime_error("no .pgm cover images found in " + bench_dir);
        for (const std::string& p : paths)
            cfg.images.emplace_back(stem_of(p), wmark::read_pgm(p));

        if (!bench_attack_names.empty()) {
            for (const std::string& s : bench_attack_names)
                cfg.attacks.push_back(wmark::AttackSpec::parse(s));
            cfg.message_length = bench_bits > 0 ? bench_bits : 128;
        } else if (bench_preset == "table1") {
            cfg.attacks = wmark::table1_attacks();
            cfg.message_length = bench_bits > 0 ? bench_bits : 128;
        } else if (bench_preset == "table2") {
            cfg.attacks = wmark::table2_attacks();
            cfg.message_length = bench_bits > 0 ? bench_bits : 256;
        } else if (bench_preset == "full") {
            cfg.attacks = wmark::full_attack_suite();
            cfg.message_length = bench_bits > 0 ? bench_bits : 128;
        } else {
            throw std::runtime_error("unknown preset '" + bench_preset + "'");
        }
        cfg.seed_count = bench_seeds;
        cfg.seed_base = bench_seed_base;
        cfg.gamma = bench_gamma;
        cfg.alpha_min = bench_alpha_min;
        cfg.beta = bench_beta;
        cfg.target_psnr = parse_target_psnr(bench_target);
        const wmark::BenchReport report = wmark::run_bench(cfg);
        if (!bench_csv.empty()) {
            std::ostringstream ss;
            wmark::write_bench_csv(report, ss);
            write_file(bench_csv, ss.str());
        }
        wmark::write_bench_text(report, std::cout);
        return 0;
    }

    if (*sweep_cmd) {
        const wmark::Image cover = wmark::read_pgm(sweep_in);
        if (sweep_gammas.empty()) sweep_gammas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        const auto rows = wmark::run_gamma_sweep(cover, sweep_gammas, sweep_bits, sweep_seed);
        std::ostringstream ss;
        wmark::write_gamma_sweep_csv(rows, ss);
        if (!sweep_csv.empty()) write_file(sweep_csv, ss.str());
        std::cout << ss.str();
        return 0;
    }

    if (*metrics_cmd) {
        bool did = false;
        if (!metrics_a.empty() || !metrics_b.empty()) {
            if (metrics_a.empty() || metrics_b.empty())
                throw std::runtime_error("metrics: need both --image-a and --image-b");
            const wmark::Image a = wmark::read_pgm(metrics_a);
            const wmark::Image b = wmark::read_pgm(metrics_b);
            std::cout << "psnr=" << wmark::detail::fmt_double(wmark::psnr(a, b))
                      << " dB mse=" << wmark::detail::fmt_double(wmark::mse(a, b)) << '\n';
            did = true;
        }
        if (!metrics_bits_a.empty() || !metrics_bits_b.empty()) {
            if (metrics_bits_a.empty() || metrics_bits_b.empty())
                throw std::runtime_error("metrics: need both --bits-a and --bits-b");
            const auto a = load_message(metrics_bits_a);
            const auto b = load_message(metrics_bits_b);
            std::cout << "ber=" << wmark::detail::fmt_double(wmark::ber(a, b)) << " %\n";
            did = true;
        }
        if (!did) throw std::runtime_error("metrics: nothing to compare (pass images or bits)");
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
