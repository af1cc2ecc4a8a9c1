#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmark {

/// 8-bit grayscale image, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int row, int col) {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    std::size_t size() const { return pixels.size(); }

    bool operator==(const Image&) const = default;
};

/// Working-precision image used by the transform arithmetic. Values may
/// leave [0,255]; pixels are quantized once, when converting back.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
};

inline RealImage to_real(const Image& img) {
    RealImage r(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        r.values[i] = static_cast<double>(img.pixels[i]);
    return r;
}

/// Round half away from zero, then clamp to [0,255].
inline std::uint8_t quantize_pixel(double v) {
    long long q = std::llround(v);
    if (q < 0) q = 0;
    if (q > 255) q = 255;
    return static_cast<std::uint8_t>(q);
}

inline Image from_real(const RealImage& r) {
    Image img(r.width, r.height);
    for (std::size_t i = 0; i < r.values.size(); ++i)
        img.pixels[i] = quantize_pixel(r.values[i]);
    return img;
}

namespace detail {

// Reads one header token, skipping whitespace and '#' comments.
inline std::string pgm_token(const std::string& buf, std::size_t& pos) {
    while (pos < buf.size()) {
        char c = buf[pos];
        if (c == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    std::size_t start = pos;
    while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos])))
        ++pos;
    if (start == pos) throw std::runtime_error("PGM: truncated header");
    return buf.substr(start, pos - start);
}

inline int pgm_int(const std::string& buf, std::size_t& pos, const char* what) {
    const std::string tok = pgm_token(buf, pos);
    int value = 0;
    for (char c : tok) {
        if (c < '0' || c > '9')
            throw std::runtime_error(std::string("PGM: malformed ") + what);
        if (value > 100000000)
            throw std::runtime_error(std::string("PGM: out-of-range ") + what);
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace detail

/// Parses a binary PGM ("P5") byte buffer with maxval 255.
inline Image decode_pgm(const std::string& buf) {
    std::size_t pos = 0;
    if (detail::pgm_token(buf, pos) != "P5")
        throw std::runtime_error("PGM: not a binary PGM (expected magic P5)");
    const int width = detail::pgm_int(buf, pos, "width");
    const int height = detail::pgm_int(buf, pos, "height");
    const int maxval = detail::pgm_int(buf, pos, "maxval");
    if (width <= 0 || height <= 0)
        throw std::runtime_error("PGM: non-positive dimensions");
    if (maxval != 255)
        throw std::runtime_error("PGM: unsupported maxval " + std::to_string(maxval));
    if (pos >= buf.size())
        throw std::runtime_error("PGM: truncated pixel data");
    ++pos;  // single whitespace byte separates maxval from raster

    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (buf.size() - pos < count)
        throw std::runtime_error("PGM: truncated pixel data");

    Image img(width, height);
    for (std::size_t i = 0; i < count; ++i)
        img.pixels[i] = static_cast<std::uint8_t>(buf[pos + i]);
    return img;
}

/// Serializes with the exact header "P5\n<w> <h>\n255\n".
inline std::string encode_pgm(const Image& img) {
    std::string out = "P5\n" + std::to_string(img.width) + ' ' +
                      std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

inline Image read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
    return decode_pgm(buf);
}

inline void write_pgm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::string buf = encode_pgm(img);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace wmark
