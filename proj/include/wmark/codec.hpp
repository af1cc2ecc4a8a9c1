#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmark/complexity.hpp"
#include "wmark/haar.hpp"
#include "wmark/image.hpp"
#include "wmark/metrics.hpp"

namespace wmark {

/// The embedded message: an ordered bit vector plus the seed it was drawn
/// from (0 when the bits came from elsewhere).
struct Watermark {
    std::vector<std::uint8_t> bits;
    std::uint64_t seed = 0;

    int length() const { return static_cast<int>(bits.size()); }

    static Watermark random(int length, std::uint64_t seed) {
        if (length < 1)
            throw std::invalid_argument("Watermark: length must be >= 1");
        Watermark wm;
        wm.seed = seed;
        wm.bits.resize(length);
        std::mt19937_64 rng(seed);
        for (auto& b : wm.bits) b = static_cast<std::uint8_t>(rng() & 1u);
        return wm;
    }
};

struct EmbedParams {
    double gamma = 0.4;
    double alpha_min = 0.5;               // gray levels; floor for flat blocks
    double beta = 1.0;                    // global strength multiplier
    std::optional<double> target_psnr = 45.0;  // nullopt = use beta as given
    CannyParams canny;
};

/// Per-block side information: the pre-embedding third-level coefficients
/// the extractor compares against, plus diagnostics.
struct SideInfoBlock {
    std::uint8_t is_complex = 0;
    double alpha = 0.0;
    double ca = 0.0;
    double ch = 0.0;
    double cv = 0.0;
};

struct SideInfo {
    int width = 0;
    int height = 0;
    int message_length = 0;
    double gamma = 0.0;
    double beta = 0.0;
    std::vector<SideInfoBlock> blocks;  // row-major block order
};

enum class VoteValue : std::uint8_t { vote_zero = 0, vote_one = 1, abstain = 2 };

struct Vote {
    int bit_index = 0;
    VoteValue value = VoteValue::abstain;
};

/// Round-robin bit-to-block mapping: block i carries bit i mod n.
inline int bit_for_block(long block_index, int message_length) {
    if (message_length < 1)
        throw std::invalid_argument("bit_for_block: message_length must be >= 1");
    return static_cast<int>(block_index % message_length);
}

/// Adds +alpha (bit 1) or -alpha (bit 0) to the third-level cA, cH and cV
/// coefficients; cD and every other subband stay untouched.
inline BlockPyramid embed_block(BlockPyramid p, int bit, double alpha) {
    if (alpha <= 0.0)
        throw std::invalid_argument("embed_block: alpha must be positive");
    const double delta = bit ? alpha : -alpha;
    p.level3.cA.a[0] += delta;
    p.level3.cH.a[0] += delta;
    p.level3.cV.a[0] += delta;
    return p;
}

namespace detail {

inline void check_codec_dims(int width, int height) {
    if (width < 8 || height < 8 || width % 8 != 0 || height % 8 != 0)
        throw std::invalid_argument("image dimensions must be positive multiples of 8");
}

inline Mat slice_block(const RealImage& img, int block_row, int block_col) {
    Mat b(8, 8);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            b.at(r, c) = img.at(block_row * 8 + r, block_col * 8 + c);
    return b;
}

inline void place_block(RealImage& img, const Mat& b, int block_row, int block_col) {
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            img.at(block_row * 8 + r, block_col * 8 + c) = b.at(r, c);
}

}  // namespace detail

/// Everything about a cover that does not depend on beta or the message:
/// per-block sigma, unit strength factor, complexity flags and the original
/// third-level coefficients. Lets calibration re-embed cheaply.
struct EmbedPlan {
    int width = 0;
    int height = 0;
    double gamma = 0.0;
    double alpha_min = 0.0;
    RealImage cover;
    std::vector<BlockComplexity> blocks;          // sigma, alpha_unit in .alpha
    std::vector<std::array<double, 3>> level3;    // pre-embedding CA*, CH*, CV*
};

inline EmbedPlan make_embed_plan(const Image& cover, double gamma, double alpha_min,
                                 const CannyParams& canny_params = {}) {
    detail::check_codec_dims(cover.width, cover.height);
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("embed: gamma must lie in [0,1]");
    if (alpha_min <= 0.0)
        throw std::invalid_argument("embed: alpha_min must be positive");

    EmbedPlan plan;
    plan.width = cover.width;
    plan.height = cover.height;
    plan.gamma = gamma;
    plan.alpha_min = alpha_min;
    plan.cover = to_real(cover);

    const std::vector<int> counts = block_edge_counts(canny(cover, canny_params));
    const std::vector<std::uint8_t> complex_flags = classify_complex(counts);

    const int bw = cover.width / 8, bh = cover.height / 8;
    plan.blocks.resize(static_cast<std::size_t>(bw) * bh);
    plan.level3.resize(plan.blocks.size());
    for (int br = 0; br < bh; ++br) {
        for (int bc = 0; bc < bw; ++bc) {
            const std::size_t i = static_cast<std::size_t>(br) * bw + bc;
            const BlockPyramid pyr = pyramid_forward(detail::slice_block(plan.cover, br, bc));
            BlockComplexity& blk = plan.blocks[i];
            blk.block_index = static_cast<int>(i);
            blk.edge_count = counts[i];
            blk.is_complex = complex_flags[i] != 0;
            {
                double mean = 0.0;
                for (double v : pyr.level1.cA.a) mean += v;
                mean /= 16.0;
                double var = 0.0;
                for (double v : pyr.level1.cA.a) var += (v - mean) * (v - mean);
                blk.sigma_A = std::sqrt(var / 16.0);
            }
            blk.alpha = strength_factor(blk.sigma_A, gamma, alpha_min);  // unit-beta value
            plan.level3[i] = {pyr.level3.cA.a[0], pyr.level3.cH.a[0], pyr.level3.cV.a[0]};
        }
    }
    return plan;
}

/// Embeds with a fixed beta. Returns the quantized watermarked image and the
/// side info needed at extraction.
inline std::pair<Image, SideInfo> embed_with_plan(const EmbedPlan& plan, const Watermark& wm,
                                                  double beta) {
    if (beta <= 0.0)
        throw std::invalid_argument("embed: beta must be positive");
    const long block_count = static_cast<long>(plan.blocks.size());
    if (wm.length() < 1)
        throw std::invalid_argument("embed: message must have at least one bit");
    if (wm.length() > block_count)
        throw std::invalid_argument("embed: message longer than block count (" +
                                    std::to_string(wm.length()) + " bits, " +
                                    std::to_string(block_count) + " blocks)");

    const int bw = plan.width / 8;
    RealImage out = plan.cover;
    SideInfo side;
    side.width = plan.width;
    side.height = plan.height;
    side.message_length = wm.length();
    side.gamma = plan.gamma;
    side.beta = beta;
    side.blocks.resize(plan.blocks.size());

    for (long i = 0; i < block_count; ++i) {
        const int br = static_cast<int>(i) / bw, bc = static_cast<int>(i) % bw;
        const double alpha = beta * plan.blocks[i].alpha;
        const int bit = wm.bits[bit_for_block(i, wm.length())];
        const BlockPyramid pyr =
            embed_block(pyramid_forward(detail::slice_block(plan.cover, br, bc)), bit, alpha);
        detail::place_block(out, pyramid_inverse(pyr), br, bc);

        SideInfoBlock& rec = side.blocks[i];
        rec.is_complex = plan.blocks[i].is_complex ? 1 : 0;
        rec.alpha = alpha;
        rec.ca = plan.level3[i][0];
        rec.ch = plan.level3[i][1];
        rec.cv = plan.level3[i][2];
    }
    return {from_real(out), side};
}

/// Binary search for the beta whose watermarked image hits the target PSNR
/// within 0.1 dB. PSNR is monotone decreasing in beta.
inline double calibrate_beta(const EmbedPlan& plan, const Watermark& wm, double target_psnr) {
    if (!(target_psnr > 25.0) || !std::isfinite(target_psnr))
        throw std::invalid_argument("calibrate_beta: target PSNR must be finite and > 25 dB");

    const Image cover = from_real(plan.cover);
    auto psnr_at = [&](double beta) {
        return psnr(cover, embed_with_plan(plan, wm, beta).first);
    };

    double lo = 1e-3, hi = 1e3;
    if (psnr_at(lo) < target_psnr)
        throw std::runtime_error("calibration failed: target " + std::to_string(target_psnr) +
                                 " dB unattainable (above the quantization noise floor)");
    if (psnr_at(hi) > target_psnr)
        throw std::runtime_error("calibration failed: target " + std::to_string(target_psnr) +
                                 " dB unattainable within beta bounds");

    double beta = hi;
    for (int iter = 0; iter < 60; ++iter) {
        beta = 0.5 * (lo + hi);
        const double p = psnr_at(beta);
        if (std::abs(p - target_psnr) <= 0.1) return beta;
        if (p > target_psnr)
            lo = beta;
        else
            hi = beta;
    }
    throw std::runtime_error("calibration failed: no beta reaches " +
                             std::to_string(target_psnr) + " +/- 0.1 dB (quantized PSNR plateau)");
}

inline double calibrate_beta(const Image& cover, const Watermark& wm, double gamma,
                             double alpha_min, double target_psnr,
                             const CannyParams& canny_params = {}) {
    return calibrate_beta(make_embed_plan(cover, gamma, alpha_min, canny_params), wm, target_psnr);
}

struct EmbedResult {
    Image image;
    SideInfo side;
    double beta = 0.0;
    double psnr_db = 0.0;
};

/// Full embedding pipeline: complexity analysis, per-block strength factors,
/// optional PSNR calibration, coefficient offsets, inverse transform, one
/// final quantization.
inline EmbedResult embed(const Image& cover, const Watermark& wm, const EmbedParams& params) {
    const EmbedPlan plan = make_embed_plan(cover, params.gamma, params.alpha_min, params.canny);
    if (wm.length() > static_cast<long>(plan.blocks.size()))
        throw std::invalid_argument("embed: message longer than block count");
    const double beta =
        params.target_psnr ? calibrate_beta(plan, wm, *params.target_psnr) : params.beta;
    auto [img, side] = embed_with_plan(plan, wm, beta);
    EmbedResult res;
    res.psnr_db = psnr(cover, img);
    res.image = std::move(img);
    res.side = std::move(side);
    res.beta = beta;
    return res;
}

/// Compares the received third-level coefficients against the stored
/// originals: greater decodes 1, smaller decodes 0, exact equality abstains.
inline std::array<VoteValue, 3> extract_block_votes(const BlockPyramid& pyr,
                                                    const SideInfoBlock& rec) {
    const double received[3] = {pyr.level3.cA.a[0], pyr.level3.cH.a[0], pyr.level3.cV.a[0]};
    const double original[3] = {rec.ca, rec.ch, rec.cv};
    std::array<VoteValue, 3> votes{};
    for (int i = 0; i < 3; ++i) {
        if (received[i] > original[i])
            votes[i] = VoteValue::vote_one;
        else if (received[i] < original[i])
            votes[i] = VoteValue::vote_zero;
        else
            votes[i] = VoteValue::abstain;
    }
    return votes;
}

/// Which coefficients feed the vote. The single-coefficient decoder exists
/// as a baseline for measuring what majority voting buys.
enum class VoteMode { all_coefficients, approx_only };

/// Majority-vote extraction over every block copy of each bit. Ties and
/// all-abstain bits decode to 0.
inline std::vector<std::uint8_t> extract(const Image& img, const SideInfo& side,
                                         VoteMode mode = VoteMode::all_coefficients) {
    detail::check_codec_dims(side.width, side.height);
    if (img.width != side.width || img.height != side.height)
        throw std::invalid_argument("extract: image dimensions do not match side info");
    const int bw = side.width / 8, bh = side.height / 8;
    if (side.blocks.size() != static_cast<std::size_t>(bw) * bh)
        throw std::invalid_argument("extract: corrupt side info (block count mismatch)");
    const int n = side.message_length;
    if (n < 1 || n > static_cast<int>(side.blocks.size()))
        throw std::invalid_argument("extract: corrupt side info (bad message length)");

    const RealImage real = to_real(img);
    std::vector<long> ones(n, 0), zeros(n, 0);
    for (int br = 0; br < bh; ++br) {
        for (int bc = 0; bc < bw; ++bc) {
            const long i = static_cast<long>(br) * bw + bc;
            const BlockPyramid pyr = pyramid_forward(detail::slice_block(real, br, bc));
            const std::array<VoteValue, 3> votes = extract_block_votes(pyr, side.blocks[i]);
            const int bit = bit_for_block(i, n);
            const int coefs = mode == VoteMode::all_coefficients ? 3 : 1;
            for (int k = 0; k < coefs; ++k) {
                if (votes[k] == VoteValue::vote_one) ++ones[bit];
                else if (votes[k] == VoteValue::vote_zero) ++zeros[bit];
            }
        }
    }
    std::vector<std::uint8_t> bits(n);
    for (int b = 0; b < n; ++b) bits[b] = ones[b] > zeros[b] ? 1 : 0;
    return bits;
}

// ---------------------------------------------------------------------------
// Side-info file format (little-endian):
//   magic "WMSI", version u32=1, width u32, height u32, message_length u32,
//   gamma f64, beta f64, then per block: is_complex u8, alpha f64,
//   CA* f64, CH* f64, CV* f64.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double d) {
    const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos++])) << (8 * i);
    return v;
}

inline double get_f64(const std::string& in, std::size_t& pos) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos++])) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace detail

inline constexpr std::uint32_t kSideInfoVersion = 1;

inline std::string encode_side_info(const SideInfo& side) {
    std::string out;
    out.reserve(36 + side.blocks.size() * 33);
    out += "WMSI";
    detail::put_u32(out, kSideInfoVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(side.width));
    detail::put_u32(out, static_cast<std::uint32_t>(side.height));
    detail::put_u32(out, static_cast<std::uint32_t>(side.message_length));
    detail::put_f64(out, side.gamma);
    detail::put_f64(out, side.beta);
    for (const SideInfoBlock& b : side.blocks) {
        out.push_back(static_cast<char>(b.is_complex));
        detail::put_f64(out, b.alpha);
        detail::put_f64(out, b.ca);
        detail::put_f64(out, b.ch);
        detail::put_f64(out, b.cv);
    }
    return out;
}

inline SideInfo decode_side_info(const std::string& buf) {
    if (buf.size() < 36) throw std::runtime_error("side info: truncated header");
    if (buf.compare(0, 4, "WMSI") != 0)
        throw std::runtime_error("side info: bad magic (not a WMSI file)");
    std::size_t pos = 4;
    const std::uint32_t version = detail::get_u32(buf, pos);
    if (version != kSideInfoVersion)
        throw std::runtime_error("side info: unsupported version " + std::to_string(version));

    SideInfo side;
    side.width = static_cast<int>(detail::get_u32(buf, pos));
    side.height = static_cast<int>(detail::get_u32(buf, pos));
    side.message_length = static_cast<int>(detail::get_u32(buf, pos));
    side.gamma = detail::get_f64(buf, pos);
    side.beta = detail::get_f64(buf, pos);
    detail::check_codec_dims(side.width, side.height);

    const std::size_t block_count =
        static_cast<std::size_t>(side.width / 8) * static_cast<std::size_t>(side.height / 8);
    const std::size_t expected = 36 + block_count * 33;
    if (buf.size() < expected)
        throw std::runtime_error("side info: truncated (header implies " +
                                 std::to_string(block_count) + " blocks)");
    if (buf.size() > expected)
        throw std::runtime_error("side info: block count mismatch with header dimensions");
    if (side.message_length < 1 || static_cast<std::size_t>(side.message_length) > block_count)
        throw std::runtime_error("side info: bad message length");

    side.blocks.resize(block_count);
    for (SideInfoBlock& b : side.blocks) {
        b.is_complex = static_cast<std::uint8_t>(buf[pos++]);
        b.alpha = detail::get_f64(buf, pos);
        b.ca = detail::get_f64(buf, pos);
        b.ch = detail::get_f64(buf, pos);
        b.cv = detail::get_f64(buf, pos);
    }
    return side;
}

inline void write_side_info(const SideInfo& side, const std::string& path) {
    const std::string out = encode_side_info(side);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline SideInfo read_side_info(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_side_info(buf);
}

}  // namespace wmark
