#include <doctest.h>

#include <cmath>
#include <sstream>

#include "handgeom/normalize.hpp"
#include "handgeom/synth.hpp"
#include "support/testutil.hpp"

using namespace handgeom;

TEST_SUITE("synth") {

TEST_CASE("generation is bit-deterministic per seed") {
    HandSpec spec = HandSpec::standard(HandType::Right, 77);
    SyntheticHand a = generate(spec);
    SyntheticHand b = generate(spec);
    CHECK(a.image == b.image);
    CHECK(a.truth.features == b.truth.features);

    HandSpec other = spec;
    other.seed = 78;
    CHECK(generate(other).image.pixels() != a.image.pixels());
}

TEST_CASE("ground-truth landmarks lie on the silhouette boundary") {
    SyntheticHand hand = generate(HandSpec::standard(HandType::Right, 5));
    NormalizedHand norm = normalize_mask(hand.silhouette);
    auto edge = testutil::boundary_set(norm.mask);

    auto near_edge = [&](const Point& p) {
        for (int dr = -2; dr <= 2; ++dr)
            for (int dc = -2; dc <= 2; ++dc)
                if (edge.count({p.row + dr, p.col + dc})) return true;
        return false;
    };
    for (const auto& p : hand.truth.landmarks.tips) CHECK(near_edge(p));
    for (const auto& p : hand.truth.landmarks.valleys) CHECK(near_edge(p));
    for (const auto& p : hand.truth.landmarks.mirrored_valleys) CHECK(near_edge(p));
}

TEST_CASE("valid specs always normalize, all poses and hands") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (HandType type : {HandType::Right, HandType::Left}) {
            for (int pose : {0, 90, 180, 270}) {
                HandSpec spec = HandSpec::standard(type, seed);
                spec.pose_deg = pose;
                SyntheticHand hand = generate(spec);
                NormalizedHand norm = normalize(hand.image);
                CHECK(norm.hand_type == type);
            }
        }
    }
}

TEST_CASE("mirrored spec flips the hand type but keeps the features") {
    HandSpec right = HandSpec::standard(HandType::Right, 31);
    HandSpec left = right;
    left.hand_type = HandType::Left;

    SyntheticHand a = generate(right);
    SyntheticHand b = generate(left);
    CHECK(a.truth.hand_type == HandType::Right);
    CHECK(b.truth.hand_type == HandType::Left);
    for (int i = 0; i < kFeatureCount; ++i)
        CHECK(std::abs(a.truth.features[i] - b.truth.features[i]) <= 1.0);
}

TEST_CASE("analytic finger length equals the landmark formula") {
    SyntheticHand hand = generate(HandSpec::standard(HandType::Right, 41));
    const LandmarkSet& lm = hand.truth.landmarks;
    // thumb: baseline = mirrored outer valley + thumb-index valley
    PointF mid = midpoint(to_f(lm.mirrored_valleys[0]), to_f(lm.valleys[0]));
    double expect = distance(to_f(lm.tips[kThumb]), mid);
    CHECK(std::abs(hand.truth.features[kThumb] - expect) <= 1.5);
}

TEST_CASE("invalid specs are rejected") {
    HandSpec spec = HandSpec::standard(HandType::Right, 1);

    HandSpec bad = spec;
    bad.fingers[kMiddle].length = 200.0;
    CHECK_THROWS_AS(generate(bad), InvalidSpecError);

    bad = spec;
    bad.fingers[kIndex].tip_width = bad.fingers[kIndex].base_width + 5.0;
    CHECK_THROWS_AS(generate(bad), InvalidSpecError);

    bad = spec;
    bad.fingers[kThumb].splay_deg = 10.0;
    CHECK_THROWS_AS(generate(bad), InvalidSpecError);

    bad = spec;
    bad.pose_deg = 45;
    CHECK_THROWS_AS(generate(bad), InvalidSpecError);

    bad = spec;
    bad.noise_sigma = 15.0;
    CHECK_THROWS_AS(generate(bad), InvalidSpecError);

    bad = spec;
    bad.canvas_width = 50;
    CHECK_THROWS_AS(generate(bad), InvalidSpecError);

    // splay collision: ring leaning into the middle finger
    bad = spec;
    bad.fingers[kRing].splay_deg = 14.0;
    CHECK_THROWS_AS(generate(bad), InvalidSpecError);
}

TEST_CASE("population generation is deterministic and labelled") {
    Population a = generate_population(3, 3, 1.0, 20.0, 99);
    Population b = generate_population(3, 3, 1.0, 20.0, 99);
    REQUIRE(a.images.size() == 9);
    REQUIRE(b.images.size() == 9);
    for (std::size_t i = 0; i < a.images.size(); ++i) {
        CHECK(a.images[i].subject_id == b.images[i].subject_id);
        CHECK(a.images[i].image == b.images[i].image);
    }
    CHECK(a.images[0].subject_id == "s001");
    CHECK(a.images[8].subject_id == "s003");

    // all images of one subject share the hand type
    CHECK(a.images[0].hand_type == a.images[1].hand_type);
    CHECK(a.images[0].hand_type == a.images[2].hand_type);
}

TEST_CASE("zero intra-noise repeats the subject image") {
    Population p = generate_population(2, 3, 0.0, 20.0, 7);
    REQUIRE(p.images.size() == 6);
    CHECK(p.images[0].image == p.images[1].image);
    CHECK(p.images[0].image == p.images[2].image);
    CHECK(p.images[3].image == p.images[4].image);
}

TEST_CASE("a too-small gap only warns") {
    Population p = generate_population(2, 1, 3.0, 5.0, 11);
    CHECK(p.separability_warning);
    Population ok = generate_population(2, 1, 1.0, 20.0, 11);
    CHECK(!ok.separability_warning);
}

TEST_CASE("sidecar carries the reference geometry and 26 features") {
    SyntheticHand hand = generate(HandSpec::standard(HandType::Left, 3));
    std::ostringstream out;
    write_truth_sidecar(hand.truth, out);
    std::string text = out.str();
    CHECK(text.find("hand_type=left") != std::string::npos);
    CHECK(text.find("f1=") != std::string::npos);
    CHECK(text.find("f26=") != std::string::npos);
    CHECK(text.find("f27=") == std::string::npos);
}

} // TEST_SUITE
