#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmark/complexity.hpp"  // convolve_separable, gaussian_kernel
#include "wmark/image.hpp"
#include "wmark/random.hpp"

namespace wmark {

enum class AttackKind { median, gaussian_filter, salt_pepper, awgn, jpeg };

/// One attack of the benchmark suite. Spec strings: "median3", "median5",
/// "gauss:<var>", "sp:<density>", "awgn:<var>", "jpeg:<quality>".
struct AttackSpec {
    AttackKind kind = AttackKind::median;
    double parameter = 3.0;

    static AttackSpec parse(const std::string& text);
    std::string name() const;
};

/// side x side median with replicate padding.
inline Image median_filter(const Image& img, int side) {
    if (side <= 0 || side % 2 == 0)
        throw std::invalid_argument("median_filter: window side must be odd and positive");
    const int w = img.width, h = img.height, radius = side / 2;
    Image out(w, h);
    std::vector<std::uint8_t> window(static_cast<std::size_t>(side) * side);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            std::size_t k = 0;
            for (int dr = -radius; dr <= radius; ++dr) {
                int rr = std::clamp(r + dr, 0, h - 1);
                for (int dc = -radius; dc <= radius; ++dc) {
                    int cc = std::clamp(c + dc, 0, w - 1);
                    window[k++] = img.at(rr, cc);
                }
            }
            auto mid = window.begin() + window.size() / 2;
            std::nth_element(window.begin(), mid, window.end());
            out.at(r, c) = *mid;
        }
    }
    return out;
}

/// Normalized Gaussian blur with sigma = sqrt(variance), kernel side
/// 2*ceil(3*sigma)+1, replicate padding.
inline Image gaussian_filter(const Image& img, double variance) {
    if (variance <= 0.0)
        throw std::invalid_argument("gaussian_filter: variance must be positive");
    const double sigma = std::sqrt(variance);
    const std::size_t n = img.pixels.size();
    std::vector<double> src(n);
    for (std::size_t i = 0; i < n; ++i) src[i] = img.pixels[i];
    const std::vector<double> blurred =
        detail::convolve_separable(src, img.width, img.height, detail::gaussian_kernel(sigma));
    Image out(img.width, img.height);
    for (std::size_t i = 0; i < n; ++i) out.pixels[i] = quantize_pixel(blurred[i]);
    return out;
}

/// Replaces exactly round(density*N) distinct pixels; the first half of the
/// drawn positions become salt (255), the rest pepper (0). Odd counts give
/// the extra pixel to salt.
inline Image salt_pepper(const Image& img, double density, std::uint64_t seed) {
    if (!(density > 0.0 && density < 1.0))
        throw std::invalid_argument("salt_pepper: density must lie in (0,1)");
    const std::uint64_t n = img.pixels.size();
    const std::uint64_t count = std::min<std::uint64_t>(
        n, static_cast<std::uint64_t>(std::llround(density * static_cast<double>(n))));
    Image out = img;
    if (count == 0) return out;

    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> index(n);
    for (std::uint64_t i = 0; i < n; ++i) index[i] = static_cast<std::uint32_t>(i);
    // Partial Fisher-Yates: the first `count` entries are a uniform sample
    // of distinct positions in draw order.
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + uniform_below(rng, n - i);
        std::swap(index[i], index[j]);
    }
    const std::uint64_t salt = (count + 1) / 2;
    for (std::uint64_t i = 0; i < count; ++i)
        out.pixels[index[i]] = i < salt ? 255 : 0;
    return out;
}

/// Adds zero-mean Gaussian noise of the given variance per pixel in
/// row-major order, then rounds and clamps.
inline Image awgn(const Image& img, double variance, std::uint64_t seed) {
    if (variance <= 0.0)
        throw std::invalid_argument("awgn: variance must be positive");
    const double sigma = std::sqrt(variance);
    std::mt19937_64 rng(seed);
    Image out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = quantize_pixel(static_cast<double>(img.pixels[i]) + sigma * gaussian(rng));
    return out;
}

namespace detail {

// Annex-K luminance quantization table.
inline constexpr std::array<int, 64> kJpegLuminanceTable = {
    16, 11, 10, 16, 24,  40,  51,  61,
    12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,
    14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,
    24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99};

inline std::array<int, 64> scaled_quant_table(int quality) {
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<int, 64> t{};
    for (int i = 0; i < 64; ++i)
        t[i] = std::clamp((kJpegLuminanceTable[i] * scale + 50) / 100, 1, 255);
    return t;
}

// Orthonormal 8-point DCT-II basis matrix.
inline const std::array<double, 64>& dct_basis() {
    static const std::array<double, 64> basis = [] {
        std::array<double, 64> b{};
        const double pi = 3.14159265358979323846;
        for (int u = 0; u < 8; ++u) {
            const double s = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int x = 0; x < 8; ++x)
                b[static_cast<std::size_t>(u) * 8 + x] =
                    s * std::cos((2.0 * x + 1.0) * u * pi / 16.0);
        }
        return b;
    }();
    return basis;
}

}  // namespace detail

/// JPEG distortion model: per 8x8 block, level shift, 2-D DCT, quantize with
/// the quality-scaled luminance table, dequantize, inverse DCT. The lossless
/// entropy-coding stage is omitted.
inline Image jpeg_sim(const Image& img, int quality) {
    if (quality < 1 || quality > 100)
        throw std::invalid_argument("jpeg_sim: quality must lie in [1,100]");
    if (img.width <= 0 || img.height <= 0 || img.width % 8 != 0 || img.height % 8 != 0)
        throw std::invalid_argument("jpeg_sim: dimensions must be positive multiples of 8");

    const std::array<int, 64> q = detail::scaled_quant_table(quality);
    const std::array<double, 64>& basis = detail::dct_basis();
    Image out(img.width, img.height);

    double block[64], tmp[64], coef[64];
    for (int br = 0; br < img.height; br += 8) {
        for (int bc = 0; bc < img.width; bc += 8) {
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    block[r * 8 + c] = static_cast<double>(img.at(br + r, bc + c)) - 128.0;

            // coef = B * block * B^T
            for (int u = 0; u < 8; ++u)
                for (int c = 0; c < 8; ++c) {
                    double acc = 0.0;
                    for (int x = 0; x < 8; ++x) acc += basis[u * 8 + x] * block[x * 8 + c];
                    tmp[u * 8 + c] = acc;
                }
            for (int u = 0; u < 8; ++u)
                for (int v = 0; v < 8; ++v) {
                    double acc = 0.0;
                    for (int y = 0; y < 8; ++y) acc += tmp[u * 8 + y] * basis[v * 8 + y];
                    coef[u * 8 + v] = acc;
                }

            for (int i = 0; i < 64; ++i)
                coef[i] = static_cast<double>(std::llround(coef[i] / q[i])) * q[i];

            // block = B^T * coef * B
            for (int x = 0; x < 8; ++x)
                for (int v = 0; v < 8; ++v) {
                    double acc = 0.0;
                    for (int u = 0; u < 8; ++u) acc += basis[u * 8 + x] * coef[u * 8 + v];
                    tmp[x * 8 + v] = acc;
                }
            for (int x = 0; x < 8; ++x)
                for (int y = 0; y < 8; ++y) {
                    double acc = 0.0;
                    for (int v = 0; v < 8; ++v) acc += tmp[x * 8 + v] * basis[v * 8 + y];
                    block[x * 8 + y] = acc;
                }

            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    out.at(br + r, bc + c) = quantize_pixel(block[r * 8 + c] + 128.0);
        }
    }
    return out;
}

inline Image apply_attack(const Image& img, const AttackSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case AttackKind::median:
            return median_filter(img, static_cast<int>(spec.parameter));
        case AttackKind::gaussian_filter:
            return gaussian_filter(img, spec.parameter);
        case AttackKind::salt_pepper:
            return salt_pepper(img, spec.parameter, seed);
        case AttackKind::awgn:
            return awgn(img, spec.parameter, seed);
        case AttackKind::jpeg:
            return jpeg_sim(img, static_cast<int>(spec.parameter));
    }
    throw std::logic_error("apply_attack: unreachable");
}

inline AttackSpec AttackSpec::parse(const std::string& text) {
    if (text == "median3") return {AttackKind::median, 3.0};
    if (text == "median5") return {AttackKind::median, 5.0};
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string kind = text.substr(0, colon);
        const std::string arg = text.substr(colon + 1);
        double value = 0.0;
        std::size_t used = 0;
        try {
            value = std::stod(arg, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("attack spec '" + text + "': malformed parameter");
        }
        if (used != arg.size())
            throw std::invalid_argument("attack spec '" + text + "': malformed parameter");
        if (kind == "gauss") {
            if (value <= 0.0)
                throw std::invalid_argument("attack spec '" + text + "': variance must be positive");
            return {AttackKind::gaussian_filter, value};
        }
        if (kind == "sp") {
            if (!(value > 0.0 && value < 1.0))
                throw std::invalid_argument("attack spec '" + text + "': density must lie in (0,1)");
            return {AttackKind::salt_pepper, value};
        }
        if (kind == "awgn") {
            if (value <= 0.0)
                throw std::invalid_argument("attack spec '" + text + "': variance must be positive");
            return {AttackKind::awgn, value};
        }
        if (kind == "jpeg") {
            if (value != std::floor(value) || value < 1.0 || value > 100.0)
                throw std::invalid_argument("attack spec '" + text +
                                            "': quality must be an integer in [1,100]");
            return {AttackKind::jpeg, value};
        }
    }
    throw std::invalid_argument("unknown attack spec '" + text + "'");
}

inline std::string AttackSpec::name() const {
    auto trim = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    switch (kind) {
        case AttackKind::median:
            return "median" + std::to_string(static_cast<int>(parameter));
        case AttackKind::gaussian_filter:
            return "gauss:" + trim(parameter);
        case AttackKind::salt_pepper:
            return "sp:" + trim(parameter);
        case AttackKind::awgn:
            return "awgn:" + trim(parameter);
        case AttackKind::jpeg:
            return "jpeg:" + std::to_string(static_cast<int>(parameter));
    }
    return "?";
}

}  // namespace wmark
