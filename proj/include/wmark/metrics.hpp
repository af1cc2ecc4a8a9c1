#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wmark/image.hpp"

namespace wmark {

struct QualityReport {
    double psnr = 0.0;         // dB; +infinity when images are identical
    double mse = 0.0;          // gray-level^2
    double ber_percent = 0.0;  // [0,100]
    long bits_total = 0;
    long bits_wrong = 0;
};

inline double mse(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("mse: image dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.pixels.size());
}

/// 10*log10(255^2 / MSE); +infinity for identical images.
inline double psnr(const Image& a, const Image& b) {
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

/// Bit-error rate in percent between two equal-length bit streams.
inline double ber(const std::vector<std::uint8_t>& sent,
                  const std::vector<std::uint8_t>& received) {
    if (sent.size() != received.size())
        throw std::invalid_argument("ber: bit stream lengths differ");
    if (sent.empty())
        throw std::invalid_argument("ber: empty bit streams");
    long wrong = 0;
    for (std::size_t i = 0; i < sent.size(); ++i)
        if ((sent[i] != 0) != (received[i] != 0)) ++wrong;
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(sent.size());
}

}  // namespace wmark
