#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "beamtrack/locator.hpp"
#include "beamtrack/synth.hpp"
#include "oracles.hpp"

using namespace beamtrack;

namespace {

BinaryImage binary_from_rects(int w, int h, const std::vector<Roi>& rects) {
    BinaryImage b{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
    for (const Roi& r : rects)
        for (int row = r.y; row < r.y + r.height; ++row)
            for (int col = r.x; col < r.x + r.width; ++col)
                b.bits[static_cast<std::size_t>(row) * w + col] = 1;
    return b;
}

}  // namespace

TEST_CASE("find_contours on a single square") {
    BinaryImage b = binary_from_rects(20, 20, {Roi{0, 0, 10, 10}});
    auto contours = find_contours(b);
    REQUIRE(contours.size() == 1);
    CHECK(contours[0].area == 100);
    CHECK(contours[0].centroid_row == doctest::Approx(4.5));
    CHECK(contours[0].centroid_col == doctest::Approx(4.5));
}

TEST_CASE("find_contours separates disjoint squares and sorts by area") {
    BinaryImage b = binary_from_rects(30, 30, {Roi{0, 0, 5, 5}, Roi{15, 15, 8, 8}});
    auto contours = find_contours(b);
    REQUIRE(contours.size() == 2);
    CHECK(contours[0].area == 64);
    CHECK(contours[1].area == 25);
}

TEST_CASE("find_contours joins 8-connected diagonals") {
    BinaryImage b = binary_from_rects(4, 4, {});
    b.bits[0] = 1;      // (0,0)
    b.bits[5] = 1;      // (1,1) touches diagonally
    auto contours = find_contours(b);
    CHECK(contours.size() == 1);
    CHECK(contours[0].area == 2);
}

TEST_CASE("find_contours returns nothing for an empty image") {
    BinaryImage b = binary_from_rects(10, 10, {});
    CHECK(find_contours(b).empty());
}

TEST_CASE("find_contours matches flood-fill labeling on random images") {
    std::mt19937 rng(11);
    std::bernoulli_distribution coin(0.35);
    for (int trial = 0; trial < 30; ++trial) {
        BinaryImage b{32, 32, std::vector<std::uint8_t>(32 * 32)};
        for (auto& bit : b.bits) bit = coin(rng);

        int n_labels = 0;
        std::vector<int> labels = oracles::flood_fill_labels(b, &n_labels);
        auto contours = find_contours(b);
        CHECK(static_cast<int>(contours.size()) == n_labels);

        // membership: all pixels of one contour share one oracle label, and
        // every foreground pixel is covered exactly once
        std::size_t covered = 0;
        for (const Contour& c : contours) {
            REQUIRE(!c.pixels.empty());
            int label = labels[static_cast<std::size_t>(c.pixels[0].row) * 32 + c.pixels[0].col];
            CHECK(label != 0);
            for (const PixelCoord& p : c.pixels)
                CHECK(labels[static_cast<std::size_t>(p.row) * 32 + p.col] == label);
            covered += c.pixels.size();
        }
        std::size_t foreground = 0;
        for (auto bit : b.bits) foreground += bit;
        CHECK(covered == foreground);

        // area ordering is non-increasing
        for (std::size_t i = 1; i < contours.size(); ++i)
            CHECK(contours[i - 1].area >= contours[i].area);
    }
}

TEST_CASE("select_clamps picks extremal centroid rows above the area gate") {
    BinaryImage b = binary_from_rects(
        40, 100, {Roi{5, 2, 20, 10}, Roi{18, 48, 3, 2}, Roi{5, 80, 20, 10}});
    auto contours = find_contours(b);
    REQUIRE(contours.size() == 3);
    auto [top, bottom] = select_clamps(contours, 50);
    CHECK(top.centroid_row == doctest::Approx(6.5));
    CHECK(bottom.centroid_row == doctest::Approx(84.5));
}

TEST_CASE("select_clamps fails with fewer than two qualifying contours") {
    BinaryImage b = binary_from_rects(40, 40, {Roi{5, 5, 10, 10}});
    auto contours = find_contours(b);
    CHECK_THROWS_AS(select_clamps(contours, 1), LocateFailure);

    BinaryImage b2 = binary_from_rects(40, 40, {Roi{5, 5, 10, 10}, Roi{25, 25, 2, 2}});
    auto contours2 = find_contours(b2);
    CHECK_THROWS_AS(select_clamps(contours2, 50), LocateFailure);
}

TEST_CASE("central_line joins centroids") {
    Contour a, b;
    a.centroid_row = 10;
    a.centroid_col = 50;
    b.centroid_row = 340;
    b.centroid_col = 50;
    CentralLine vertical = central_line(a, b);
    CHECK(vertical.length_px() == doctest::Approx(330));
    CHECK(vertical.column_at(175.0) == doctest::Approx(50));

    Contour c, d;
    c.centroid_row = 0;
    c.centroid_col = 0;
    d.centroid_row = 30;
    d.centroid_col = 40;
    CHECK(central_line(c, d).length_px() == doctest::Approx(50));  // 3-4-5
}

TEST_CASE("central_line rejects inverted or degenerate ordering") {
    Contour a, b;
    a.centroid_row = 10;
    b.centroid_row = 10;
    CHECK_THROWS_AS(central_line(a, b), std::invalid_argument);
}

TEST_CASE("locate on a synthetic scene lands on the pad centers") {
    SceneSpec spec;  // noiseless defaults
    RenderedFrame rf = render_frame(spec, 0, 1);
    CentralLine line = locate(rf.frame);
    CHECK(line.top_row() == doctest::Approx(spec.pad_center_row(spec.top_pad)).epsilon(0.01));
    CHECK(line.top_col() == doctest::Approx(spec.pad_center_col(spec.top_pad)).epsilon(0.01));
    CHECK(line.bottom_row() ==
          doctest::Approx(spec.pad_center_row(spec.bottom_pad)).epsilon(0.01));
    CHECK(line.bottom_col() ==
          doctest::Approx(spec.pad_center_col(spec.bottom_pad)).epsilon(0.01));
}

TEST_CASE("locate fails on blank and single-pad frames") {
    Frame blank(40, 60, std::vector<std::uint8_t>(40 * 60, 0));
    CHECK_THROWS_AS(locate(blank), DegenerateInput);

    Frame one_pad(40, 60, std::vector<std::uint8_t>(40 * 60, 10));
    for (int r = 5; r < 15; ++r)
        for (int c = 10; c < 30; ++c) one_pad.at(r, c) = 200;
    CHECK_THROWS_AS(locate(one_pad), LocateFailure);
}

TEST_CASE("locate is translation-equivariant on the synthetic scene") {
    // pads interior on both sides: a pad touching the image border keeps its
    // corners through the truncated blur window while an interior pad loses
    // them, which would perturb the centroid by a fraction of a pixel
    SceneSpec base;
    base.width = 120;
    base.height = 372;
    base.top_pad = Roi{17, 4, 71, 20};
    base.bottom_pad = Roi{17, 334, 71, 20};
    SceneSpec shifted = base;
    const int dr = 6, dc = 9;
    shifted.top_pad.x += dc;
    shifted.top_pad.y += dr;
    shifted.bottom_pad.x += dc;
    shifted.bottom_pad.y += dr;

    CentralLine l0 = locate(render_frame(base, 0, 3).frame);
    CentralLine l1 = locate(render_frame(shifted, 0, 3).frame);
    CHECK(l1.top_row() - l0.top_row() == doctest::Approx(dr).epsilon(1e-9));
    CHECK(l1.top_col() - l0.top_col() == doctest::Approx(dc).epsilon(1e-9));
    CHECK(l1.bottom_row() - l0.bottom_row() == doctest::Approx(dr).epsilon(1e-9));
    CHECK(l1.bottom_col() - l0.bottom_col() == doctest::Approx(dc).epsilon(1e-9));
}
