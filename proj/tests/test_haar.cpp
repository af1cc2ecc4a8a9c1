#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/testutil.hpp"
#include "wmark/haar.hpp"

using testutil::mat_from;
using testutil::random_block;
using wmark::BlockPyramid;
using wmark::Mat;
using wmark::SubbandSet;

namespace {

double block_energy(const Mat& m) {
    double e = 0.0;
    for (double v : m.a) e += v * v;
    return e;
}

double subband_energy(const SubbandSet& s) {
    return block_energy(s.cA) + block_energy(s.cH) + block_energy(s.cV) + block_energy(s.cD);
}

double max_abs_diff(const Mat& a, const Mat& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i)
        m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

}  // namespace

TEST_CASE("dwt2_level on constant 2x2", "[haar]") {
    const SubbandSet s = wmark::dwt2_level(mat_from({{1, 1}, {1, 1}}));
    REQUIRE(s.cA.at(0, 0) == 2.0);
    REQUIRE(s.cH.at(0, 0) == 0.0);
    REQUIRE(s.cV.at(0, 0) == 0.0);
    REQUIRE(s.cD.at(0, 0) == 0.0);
}

TEST_CASE("dwt2_level on [[4,2],[2,0]]", "[haar]") {
    const SubbandSet s = wmark::dwt2_level(mat_from({{4, 2}, {2, 0}}));
    REQUIRE(s.cA.at(0, 0) == 4.0);
    REQUIRE(s.cH.at(0, 0) == 2.0);
    REQUIRE(s.cV.at(0, 0) == 2.0);
    REQUIRE(s.cD.at(0, 0) == 0.0);
}

TEST_CASE("dwt2_level of an 8x8 constant block", "[haar]") {
    const double v = 37.0;
    const SubbandSet s = wmark::dwt2_level(Mat(8, 8, v));
    REQUIRE(s.cA.rows == 4);
    for (double a : s.cA.a) REQUIRE(a == 2.0 * v);
    for (const Mat* d : {&s.cH, &s.cV, &s.cD})
        for (double x : d->a) REQUIRE(x == 0.0);
}

TEST_CASE("dwt2_level input validation", "[haar]") {
    REQUIRE_THROWS(wmark::dwt2_level(Mat(3, 3, 1.0)));
    REQUIRE_THROWS(wmark::dwt2_level(Mat(2, 4, 1.0)));
    REQUIRE_THROWS(wmark::dwt2_level(Mat(0, 0)));
}

TEST_CASE("idwt2_level basis synthesis", "[haar]") {
    SubbandSet s{Mat(1, 1, 2.0), Mat(1, 1, 0.0), Mat(1, 1, 0.0), Mat(1, 1, 0.0)};
    Mat m = wmark::idwt2_level(s);
    REQUIRE(max_abs_diff(m, mat_from({{1, 1}, {1, 1}})) == 0.0);

    s = {Mat(1, 1, 0.0), Mat(1, 1, 0.0), Mat(1, 1, 0.0), Mat(1, 1, 2.0)};
    m = wmark::idwt2_level(s);
    REQUIRE(max_abs_diff(m, mat_from({{1, -1}, {-1, 1}})) == 0.0);
}

TEST_CASE("idwt2_level rejects mismatched subbands", "[haar]") {
    SubbandSet s{Mat(2, 2), Mat(2, 2), Mat(1, 1), Mat(2, 2)};
    REQUIRE_THROWS(wmark::idwt2_level(s));
    SubbandSet empty{};
    REQUIRE_THROWS(wmark::idwt2_level(empty));
}

TEST_CASE("single level round trip and energy on random matrices", "[haar]") {
    std::mt19937_64 rng(42);
    for (int side : {2, 4, 8, 16}) {
        for (int trial = 0; trial < 50; ++trial) {
            const Mat x = random_block(rng, side);
            const SubbandSet s = wmark::dwt2_level(x);
            REQUIRE(max_abs_diff(wmark::idwt2_level(s), x) < 1e-12);
            const double ein = block_energy(x), eout = subband_energy(s);
            REQUIRE(std::abs(ein - eout) <= 1e-9 * ein);
        }
    }
}

TEST_CASE("pyramid of a constant block of 1", "[haar]") {
    const BlockPyramid p = wmark::pyramid_forward(Mat(8, 8, 1.0));
    REQUIRE(p.level3.cA.at(0, 0) == 8.0);
    for (const SubbandSet* s : {&p.level1, &p.level2, &p.level3})
        for (const Mat* d : {&s->cH, &s->cV, &s->cD})
            for (double x : d->a) REQUIRE(x == 0.0);
}

TEST_CASE("pyramid round trip, energy and linearity", "[haar]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat x = random_block(rng);
        const BlockPyramid p = wmark::pyramid_forward(x);
        REQUIRE(max_abs_diff(wmark::pyramid_inverse(p), x) <= 1e-9);

        // Energy: input = {L1 details} + {L2 details} + all of L3.
        const double details =
            block_energy(p.level1.cH) + block_energy(p.level1.cV) + block_energy(p.level1.cD) +
            block_energy(p.level2.cH) + block_energy(p.level2.cV) + block_energy(p.level2.cD) +
            subband_energy(p.level3);
        const double ein = block_energy(x);
        REQUIRE(std::abs(ein - details) <= 1e-9 * ein);

        // Linearity of the forward transform.
        const Mat y = random_block(rng);
        Mat combo(8, 8);
        for (int i = 0; i < 64; ++i) combo.a[i] = 2.0 * x.a[i] - 0.5 * y.a[i];
        const BlockPyramid px = wmark::pyramid_forward(x);
        const BlockPyramid py = wmark::pyramid_forward(y);
        const BlockPyramid pc = wmark::pyramid_forward(combo);
        REQUIRE(std::abs(pc.level3.cA.a[0] -
                         (2.0 * px.level3.cA.a[0] - 0.5 * py.level3.cA.a[0])) <= 1e-9);
        REQUIRE(std::abs(pc.level1.cH.a[5] -
                         (2.0 * px.level1.cH.a[5] - 0.5 * py.level1.cH.a[5])) <= 1e-9);
    }
}

TEST_CASE("pyramid_forward rejects non-8x8 blocks", "[haar]") {
    REQUIRE_THROWS(wmark::pyramid_forward(Mat(4, 4, 1.0)));
    REQUIRE_THROWS(wmark::pyramid_forward(Mat(16, 16, 1.0)));
}

TEST_CASE("pyramid_inverse rejects malformed pyramids", "[haar]") {
    BlockPyramid p = wmark::pyramid_forward(Mat(8, 8, 3.0));
    p.level3.cA = Mat(2, 2);
    REQUIRE_THROWS(wmark::pyramid_inverse(p));
}

TEST_CASE("level-3 cA synthesis: +a shifts every pixel by a/8", "[haar]") {
    std::mt19937_64 rng(13);
    const Mat x = random_block(rng);
    const double alpha = 4.8;
    BlockPyramid p = wmark::pyramid_forward(x);
    p.level3.cA.a[0] += alpha;
    const Mat y = wmark::pyramid_inverse(p);
    for (int i = 0; i < 64; ++i)
        REQUIRE(std::abs((y.a[i] - x.a[i]) - alpha / 8.0) <= 1e-9);
}

TEST_CASE("level-3 cH synthesis: +a splits top/bottom halves", "[haar]") {
    std::mt19937_64 rng(14);
    const Mat x = random_block(rng);
    const double alpha = 3.2;
    BlockPyramid p = wmark::pyramid_forward(x);
    p.level3.cH.a[0] += alpha;
    const Mat y = wmark::pyramid_inverse(p);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            const double expected = r < 4 ? alpha / 8.0 : -alpha / 8.0;
            REQUIRE(std::abs((y.at(r, c) - x.at(r, c)) - expected) <= 1e-9);
        }
}

TEST_CASE("level-3 cA shift moves the block mean by exactly a/8", "[haar]") {
    std::mt19937_64 rng(15);
    const Mat x = random_block(rng);
    BlockPyramid p = wmark::pyramid_forward(x);
    p.level3.cA.a[0] += 2.0;
    const Mat y = wmark::pyramid_inverse(p);
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < 64; ++i) mx += x.a[i], my += y.a[i];
    REQUIRE(std::abs((my - mx) / 64.0 - 0.25) <= 1e-9);
}
