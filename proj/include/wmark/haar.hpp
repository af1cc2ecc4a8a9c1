#pragma once

#include <stdexcept>
#include <vector>

namespace wmark {

/// Small dense real matrix, row-major.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

/// One level of 2-D Haar output: approximation plus the three detail
/// orientations, each half the input side length.
struct SubbandSet {
    Mat cA, cH, cV, cD;
};

/// Three-level decomposition of one 8x8 block. Level 3 subbands are scalars.
struct BlockPyramid {
    SubbandSet level1;  // 4x4 subbands
    SubbandSet level2;  // 2x2 subbands
    SubbandSet level3;  // 1x1 subbands
};

/// Orthonormal 2-D Haar analysis of a square even-sided matrix.
/// Per 2x2 cell [[p00,p01],[p10,p11]]:
///   cA=(p00+p01+p10+p11)/2, cH=(p00+p01-p10-p11)/2,
///   cV=(p00-p01+p10-p11)/2, cD=(p00-p01-p10+p11)/2
inline SubbandSet dwt2_level(const Mat& in) {
    if (in.rows != in.cols)
        throw std::invalid_argument("dwt2_level: input must be square");
    if (in.rows <= 0 || in.rows % 2 != 0)
        throw std::invalid_argument("dwt2_level: side length must be even and positive");
    const int half = in.rows / 2;
    SubbandSet s{Mat(half, half), Mat(half, half), Mat(half, half), Mat(half, half)};
    for (int r = 0; r < half; ++r) {
        for (int c = 0; c < half; ++c) {
            const double p00 = in.at(2 * r, 2 * c);
            const double p01 = in.at(2 * r, 2 * c + 1);
            const double p10 = in.at(2 * r + 1, 2 * c);
            const double p11 = in.at(2 * r + 1, 2 * c + 1);
            s.cA.at(r, c) = (p00 + p01 + p10 + p11) / 2.0;
            s.cH.at(r, c) = (p00 + p01 - p10 - p11) / 2.0;
            s.cV.at(r, c) = (p00 - p01 + p10 - p11) / 2.0;
            s.cD.at(r, c) = (p00 - p01 - p10 + p11) / 2.0;
        }
    }
    return s;
}

/// Exact algebraic inverse of dwt2_level.
inline Mat idwt2_level(const SubbandSet& s) {
    const int half = s.cA.rows;
    if (half <= 0)
        throw std::invalid_argument("idwt2_level: empty subbands");
    for (const Mat* m : {&s.cA, &s.cH, &s.cV, &s.cD})
        if (m->rows != half || m->cols != half)
            throw std::invalid_argument("idwt2_level: mismatched subband dimensions");
    Mat out(half * 2, half * 2);
    for (int r = 0; r < half; ++r) {
        for (int c = 0; c < half; ++c) {
            const double a = s.cA.at(r, c);
            const double h = s.cH.at(r, c);
            const double v = s.cV.at(r, c);
            const double d = s.cD.at(r, c);
            out.at(2 * r, 2 * c) = (a + h + v + d) / 2.0;
            out.at(2 * r, 2 * c + 1) = (a + h - v - d) / 2.0;
            out.at(2 * r + 1, 2 * c) = (a - h + v - d) / 2.0;
            out.at(2 * r + 1, 2 * c + 1) = (a - h - v + d) / 2.0;
        }
    }
    return out;
}

/// Three-level decomposition of an 8x8 block (level k+1 decomposes level
/// k's approximation).
inline BlockPyramid pyramid_forward(const Mat& block) {
    if (block.rows != 8 || block.cols != 8)
        throw std::invalid_argument("pyramid_forward: block must be 8x8");
    BlockPyramid p;
    p.level1 = dwt2_level(block);
    p.level2 = dwt2_level(p.level1.cA);
    p.level3 = dwt2_level(p.level2.cA);
    return p;
}

inline Mat pyramid_inverse(const BlockPyramid& p) {
    if (p.level3.cA.rows != 1 || p.level2.cA.rows != 2 || p.level1.cA.rows != 4)
        throw std::invalid_argument("pyramid_inverse: malformed pyramid");
    SubbandSet l2 = p.level2;
    l2.cA = idwt2_level(p.level3);
    SubbandSet l1 = p.level1;
    l1.cA = idwt2_level(l2);
    return idwt2_level(l1);
}

}  // namespace wmark
