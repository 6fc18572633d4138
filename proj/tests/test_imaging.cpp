#include <doctest.h>

#include <random>

#include "handgeom/imaging.hpp"
#include "support/testutil.hpp"

using namespace handgeom;

TEST_SUITE("imaging") {

TEST_CASE("grayscale conversion uses the 601 luminance weights") {
    RgbImage img(2, 2);
    auto set = [&](int r, int c, int red, int green, int blue) {
        img.at(r, c, 0) = static_cast<std::uint8_t>(red);
        img.at(r, c, 1) = static_cast<std::uint8_t>(green);
        img.at(r, c, 2) = static_cast<std::uint8_t>(blue);
    };
    set(0, 0, 255, 255, 255);
    set(0, 1, 0, 0, 0);
    set(1, 0, 100, 150, 200);
    set(1, 1, 200, 0, 0);

    GrayImage g = to_grayscale(img);
    CHECK(g.at(0, 0) == 255);
    CHECK(g.at(0, 1) == 0);
    // 0.299*100 + 0.587*150 + 0.114*200 = 140.75
    CHECK(g.at(1, 0) == 141);
    CHECK(g.at(1, 1) == 60); // 0.299*200 = 59.8
}

TEST_CASE("otsu separates a bimodal image") {
    GrayImage img(4, 4);
    for (int i = 0; i < 16; ++i) img.pixels()[i] = i < 8 ? 10 : 200;
    int t = otsu_threshold(img);
    CHECK(t >= 10);
    CHECK(t < 200);
}

TEST_CASE("otsu equals the exhaustive scan") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        GrayImage img = testutil::random_gray(8, 8, rng);
        CHECK(otsu_threshold(img) == testutil::otsu_bruteforce(img));
    }
}

TEST_CASE("otsu rejects a single-intensity image") {
    GrayImage img(4, 4, 128);
    CHECK_THROWS_AS(otsu_threshold(img), DegenerateHistogramError);
}

TEST_CASE("binarize applies the polarity rule pointwise") {
    GrayImage bright(3, 3, 255);
    BinaryImage all_one = binarize(bright, 100);
    CHECK(all_one.foreground_count() == 9);

    GrayImage dark(3, 3, 0);
    CHECK(binarize(dark, 100).foreground_count() == 0);

    GrayImage checker(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) checker.at(r, c) = (r + c) % 2 ? 255 : 0;
    BinaryImage b = binarize(checker, 100);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(b.at(r, c) == ((r + c) % 2 ? 1 : 0));

    CHECK(binarize(dark, 100, Polarity::DarkHand).foreground_count() == 9);
    CHECK_THROWS_AS(binarize(dark, 300), ParameterError);
}

TEST_CASE("binarize is idempotent on binary-valued input") {
    std::mt19937 rng(11);
    GrayImage img = testutil::random_gray(9, 7, rng);
    BinaryImage first = binarize(img, 128);
    GrayImage as_gray(first.width(), first.height());
    for (std::size_t i = 0; i < as_gray.pixels().size(); ++i)
        as_gray.pixels()[i] = first.pixels()[i];
    CHECK(binarize(as_gray, 0) == first);
}

TEST_CASE("median filter leaves constants alone and removes salt noise") {
    GrayImage flat(5, 5, 77);
    CHECK(median_filter(flat) == flat);

    GrayImage salt(5, 5, 0);
    salt.at(2, 2) = 255;
    GrayImage cleaned = median_filter(salt);
    CHECK(cleaned.at(2, 2) == 0);
}

TEST_CASE("median filter equals the sort oracle") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        GrayImage img = testutil::random_gray(5, 5, rng);
        GrayImage filtered = median_filter(img, 3);
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) {
                std::vector<std::uint8_t> window;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc)
                        window.push_back(
                            img.at(std::clamp(r + dr, 0, 4), std::clamp(c + dc, 0, 4)));
                std::sort(window.begin(), window.end());
                CHECK(filtered.at(r, c) == window[4]);
            }
    }
}

TEST_CASE("median filter validates the window") {
    GrayImage img(4, 4, 10);
    CHECK_THROWS_AS(median_filter(img, 0), ParameterError);
    CHECK_THROWS_AS(median_filter(img, 2), ParameterError);
    CHECK_THROWS_AS(median_filter(img, 4), ParameterError);
}

TEST_CASE("largest component keeps the biggest blob only") {
    BinaryImage img(20, 10);
    // 50-pixel blob
    for (int r = 1; r < 6; ++r)
        for (int c = 1; c < 11; ++c) img.set(r, c, true);
    // 3-pixel wristwatch artifact
    img.set(8, 15, true);
    img.set(8, 16, true);
    img.set(9, 15, true);

    BinaryImage kept = largest_component(img);
    CHECK(kept.foreground_count() == 50);
    CHECK(!kept.at(8, 15));

    CHECK(largest_component(kept) == kept);
    CHECK_THROWS_AS(largest_component(BinaryImage(5, 5)), NoHandError);
}

TEST_CASE("largest component agrees with the flood-fill oracle") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        BinaryImage img(24, 24);
        int blobs = 2 + static_cast<int>(rng() % 4);
        for (int b = 0; b < blobs; ++b) {
            int cr = 3 + static_cast<int>(rng() % 18);
            int cc = 3 + static_cast<int>(rng() % 18);
            int rad = 1 + static_cast<int>(rng() % 3);
            for (int r = cr - rad; r <= cr + rad; ++r)
                for (int c = cc - rad; c <= cc + rad; ++c)
                    if (r >= 0 && r < 24 && c >= 0 && c < 24 &&
                        (r - cr) * (r - cr) + (c - cc) * (c - cc) <= rad * rad)
                        img.set(r, c, true);
        }
        if (img.foreground_count() == 0) continue;
        CHECK(largest_component(img) == testutil::largest_component_bruteforce(img));
    }
}

TEST_CASE("square silhouette traces to a 36-point ring") {
    BinaryImage img(20, 20);
    for (int r = 5; r < 15; ++r)
        for (int c = 5; c < 15; ++c) img.set(r, c, true);

    Contour ct = sobel_contour(img);
    CHECK(ct.size() == 36);
    CHECK(ct.front() == Point{5, 5});

    // closed 8-connected walk
    for (std::size_t i = 0; i < ct.size(); ++i) {
        const Point& a = ct[i];
        const Point& b = ct[(i + 1) % ct.size()];
        CHECK(std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) <= 1);
    }
}

TEST_CASE("degenerate silhouettes cannot be traced") {
    BinaryImage dot(9, 9);
    dot.set(4, 4, true);
    CHECK_THROWS_AS(sobel_contour(dot), MalformedSilhouetteError);
    CHECK_THROWS_AS(sobel_contour(BinaryImage(9, 9)), NoHandError);
}

TEST_CASE("traced contour equals the morphological boundary") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        // Two overlapping convex shapes: hole-free, single component.
        BinaryImage img(40, 40);
        int cr = 14 + static_cast<int>(rng() % 8);
        int cc = 14 + static_cast<int>(rng() % 8);
        int rad = 6 + static_cast<int>(rng() % 5);
        for (int r = 0; r < 40; ++r)
            for (int c = 0; c < 40; ++c)
                if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= rad * rad) img.set(r, c, true);
        int h = 4 + static_cast<int>(rng() % 6), w = 4 + static_cast<int>(rng() % 10);
        for (int r = cr - 2; r < cr - 2 + h; ++r)
            for (int c = cc - 2; c < cc - 2 + w; ++c)
                if (r >= 0 && r < 40 && c >= 0 && c < 40) img.set(r, c, true);

        Contour ct = sobel_contour(img);
        std::set<std::pair<int, int>> traced;
        for (const auto& p : ct) traced.insert({p.row, p.col});
        CHECK(traced == testutil::boundary_set(img));

        // every contour pixel carries a nonzero gradient
        for (const auto& p : ct) CHECK(sobel_magnitude(img, p.row, p.col) > 0);
    }
}

} // TEST_SUITE
