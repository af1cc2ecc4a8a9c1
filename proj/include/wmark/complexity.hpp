#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wmark/haar.hpp"
#include "wmark/image.hpp"

namespace wmark {

struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> edges;  // 0/1, row-major

    EdgeMap() = default;
    EdgeMap(int w, int h)
        : width(w), height(h), edges(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int row, int col) const {
        return edges[static_cast<std::size_t>(row) * width + col] != 0;
    }
};

struct CannyParams {
    double gaussian_sigma = 1.4;
    double high_fraction = 0.2;   // of the max gradient magnitude
    double low_fraction = 0.08;

    void validate() const {
        if (gaussian_sigma <= 0.0)
            throw std::invalid_argument("canny: gaussian_sigma must be positive");
        if (!(0.0 < low_fraction && low_fraction < high_fraction && high_fraction < 1.0))
            throw std::invalid_argument("canny: need 0 < low_fraction < high_fraction < 1");
    }
};

/// Per-block complexity record kept for diagnostics and side info.
struct BlockComplexity {
    int block_index = 0;
    int edge_count = 0;
    bool is_complex = false;
    double sigma_A = 0.0;  // std-dev of level-1 approximation coefficients
    double alpha = 0.0;    // strength factor in gray levels
};

namespace detail {

// Separable convolution with replicate padding; kernel must sum to 1.
inline std::vector<double> convolve_separable(const std::vector<double>& src, int w, int h,
                                              const std::vector<double>& kernel) {
    const int radius = static_cast<int>(kernel.size()) / 2;
    std::vector<double> tmp(src.size()), dst(src.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int cc = c + k;
                if (cc < 0) cc = 0;
                if (cc >= w) cc = w - 1;
                acc += kernel[k + radius] * src[static_cast<std::size_t>(r) * w + cc];
            }
            tmp[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int rr = r + k;
                if (rr < 0) rr = 0;
                if (rr >= h) rr = h - 1;
                acc += kernel[k + radius] * tmp[static_cast<std::size_t>(rr) * w + c];
            }
            dst[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    return dst;
}

inline std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

}  // namespace detail

/// Canny edge detection: Gaussian smoothing, Sobel gradients, 4-direction
/// non-maximum suppression, double threshold relative to the max gradient
/// magnitude, hysteresis with 8-connectivity.
inline EdgeMap canny(const Image& img, const CannyParams& params = {}) {
    params.validate();
    if (img.width < 8 || img.height < 8)
        throw std::invalid_argument("canny: image must be at least 8x8");

    const int w = img.width, h = img.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    std::vector<double> gray(n);
    for (std::size_t i = 0; i < n; ++i) gray[i] = img.pixels[i];
    const std::vector<double> smooth =
        detail::convolve_separable(gray, w, h, detail::gaussian_kernel(params.gaussian_sigma));

    auto s = [&](int r, int c) {
        if (r < 0) r = 0;
        if (r >= h) r = h - 1;
        if (c < 0) c = 0;
        if (c >= w) c = w - 1;
        return smooth[static_cast<std::size_t>(r) * w + c];
    };

    std::vector<double> gx(n), gy(n), mag(n);
    double max_mag = 0.0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double dx = (s(r - 1, c + 1) + 2.0 * s(r, c + 1) + s(r + 1, c + 1)) -
                              (s(r - 1, c - 1) + 2.0 * s(r, c - 1) + s(r + 1, c - 1));
            const double dy = (s(r + 1, c - 1) + 2.0 * s(r + 1, c) + s(r + 1, c + 1)) -
                              (s(r - 1, c - 1) + 2.0 * s(r - 1, c) + s(r - 1, c + 1));
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            gx[i] = dx;
            gy[i] = dy;
            mag[i] = std::hypot(dx, dy);
            if (mag[i] > max_mag) max_mag = mag[i];
        }
    }

    EdgeMap out(w, h);
    if (max_mag <= 0.0) return out;

    auto m = [&](int r, int c) -> double {
        if (r < 0 || r >= h || c < 0 || c >= w) return 0.0;
        return mag[static_cast<std::size_t>(r) * w + c];
    };

    // Non-maximum suppression along the quantized gradient direction.
    std::vector<double> nms(n, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            if (mag[i] <= 0.0) continue;
            double angle = std::atan2(gy[i], gx[i]) * (180.0 / 3.14159265358979323846);
            if (angle < 0.0) angle += 180.0;
            double n1, n2;
            if (angle < 22.5 || angle >= 157.5) {          // gradient ~horizontal
                n1 = m(r, c - 1), n2 = m(r, c + 1);
            } else if (angle < 67.5) {                     // ~down-right
                n1 = m(r - 1, c - 1), n2 = m(r + 1, c + 1);
            } else if (angle < 112.5) {                    // ~vertical
                n1 = m(r - 1, c), n2 = m(r + 1, c);
            } else {                                       // ~down-left
                n1 = m(r - 1, c + 1), n2 = m(r + 1, c - 1);
            }
            if (mag[i] >= n1 && mag[i] >= n2) nms[i] = mag[i];
        }
    }

    const double high = params.high_fraction * max_mag;
    const double low = params.low_fraction * max_mag;

    // 0 = none, 1 = weak, 2 = strong
    std::vector<std::uint8_t> grade(n, 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (nms[i] >= high) {
            grade[i] = 2;
            out.edges[i] = 1;
            stack.push_back(i);
        } else if (nms[i] >= low && nms[i] > 0.0) {
            grade[i] = 1;
        }
    }

    // Hysteresis: grow strong edges into connected weak pixels.
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int r = static_cast<int>(i) / w;
        const int c = static_cast<int>(i) % w;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
                if (grade[j] == 1) {
                    grade[j] = 2;
                    out.edges[j] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    return out;
}

/// Edge-pixel count of every 8x8 block, row-major block order.
inline std::vector<int> block_edge_counts(const EdgeMap& edges) {
    if (edges.width <= 0 || edges.height <= 0 ||
        edges.width % 8 != 0 || edges.height % 8 != 0)
        throw std::invalid_argument("block_edge_counts: dimensions must be positive multiples of 8");
    const int bw = edges.width / 8, bh = edges.height / 8;
    std::vector<int> counts(static_cast<std::size_t>(bw) * bh, 0);
    for (int r = 0; r < edges.height; ++r)
        for (int c = 0; c < edges.width; ++c)
            if (edges.at(r, c)) ++counts[static_cast<std::size_t>(r / 8) * bw + c / 8];
    return counts;
}

/// A block is complex when its edge count strictly exceeds the mean count.
inline std::vector<std::uint8_t> classify_complex(const std::vector<int>& counts) {
    if (counts.empty())
        throw std::invalid_argument("classify_complex: empty count list");
    double mean = 0.0;
    for (int c : counts) mean += c;
    mean /= static_cast<double>(counts.size());
    std::vector<std::uint8_t> flags(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        flags[i] = counts[i] > mean ? 1 : 0;
    return flags;
}

/// Population standard deviation of the 16 level-1 approximation
/// coefficients of an 8x8 block.
inline double sigma_A(const Mat& block) {
    if (block.rows != 8 || block.cols != 8)
        throw std::invalid_argument("sigma_A: block must be 8x8");
    const Mat cA = dwt2_level(block).cA;
    double mean = 0.0;
    for (double v : cA.a) mean += v;
    mean /= 16.0;
    double var = 0.0;
    for (double v : cA.a) var += (v - mean) * (v - mean);
    var /= 16.0;
    return std::sqrt(var);
}

/// Per-block strength factor: sigma^gamma, floored at alpha_min so that
/// zero-variance blocks still carry a decodable offset.
inline double strength_factor(double sigma, double gamma, double alpha_min) {
    if (sigma < 0.0)
        throw std::invalid_argument("strength_factor: sigma must be non-negative");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("strength_factor: gamma must lie in [0,1]");
    if (alpha_min <= 0.0)
        throw std::invalid_argument("strength_factor: alpha_min must be positive");
    const double a = std::pow(sigma, gamma);
    return a > alpha_min ? a : alpha_min;
}

}  // namespace wmark
