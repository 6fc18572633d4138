#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "handgeom/eval.hpp"

using namespace handgeom;

namespace {

std::vector<ScoreSample> make_samples(std::initializer_list<double> genuine,
                                      std::initializer_list<double> impostor) {
    std::vector<ScoreSample> out;
    for (double s : genuine) out.push_back({s, true});
    for (double s : impostor) out.push_back({s, false});
    return out;
}

// Exhaustive sweep over every sample score as candidate threshold.
EerResult eer_oracle(const std::vector<ScoreSample>& samples) {
    std::set<double> grid;
    for (const auto& s : samples) grid.insert(s.score);
    EerResult best{0.0, 0.0};
    double best_gap = 1e18;
    for (double t : grid) {
        double fa = 0, ga = 0, ng = 0, ni = 0;
        for (const auto& s : samples) {
            if (s.genuine) {
                ++ng;
                if (s.score > t) ++ga;
            } else {
                ++ni;
                if (s.score <= t) ++fa;
            }
        }
        double far = fa / ni, frr = ga / ng;
        if (std::abs(far - frr) < best_gap) {
            best_gap = std::abs(far - frr);
            best = {t, (far + frr) / 2.0};
        }
    }
    return best;
}

FeatureVector vec(double fill) {
    FeatureVector v{};
    v.fill(fill);
    return v;
}

// Well-separated three-subject corpus with K+1 images each.
std::vector<LabeledFeature> separable_corpus(int images_per_subject) {
    std::vector<LabeledFeature> corpus;
    double base = 10.0;
    int idx = 0;
    for (const char* id : {"s1", "s2", "s3"}) {
        HandType hand = idx % 2 ? HandType::Left : HandType::Right;
        for (int i = 0; i < images_per_subject; ++i)
            corpus.push_back({id, hand, vec(base + 0.05 * i)});
        base += 40.0;
        ++idx;
    }
    return corpus;
}

} // namespace

TEST_SUITE("eval") {

TEST_CASE("rates at extreme thresholds") {
    auto samples = make_samples({1.0, 2.0}, {3.0, 4.0});
    RatePoint low = rates_at(samples, 0.5);
    CHECK(low.far == 0.0);
    CHECK(low.frr == 1.0);
    RatePoint high = rates_at(samples, 10.0);
    CHECK(high.far == 1.0);
    CHECK(high.frr == 0.0);
}

TEST_CASE("hand-counted rates for a separable set") {
    auto samples = make_samples({1.0, 2.0}, {3.0, 4.0});
    RatePoint p = rates_at(samples, 2.5);
    CHECK(p.far == 0.0);
    CHECK(p.frr == 0.0);
}

TEST_CASE("rates require both sample classes") {
    std::vector<ScoreSample> only_genuine = {{1.0, true}};
    CHECK_THROWS_AS(rates_at(only_genuine, 1.0), InsufficientSamplesError);
    CHECK_THROWS_AS(eer(only_genuine), InsufficientSamplesError);
}

TEST_CASE("eer of separable and indistinguishable score sets") {
    auto separable = make_samples({1.0, 2.0}, {8.0, 9.0});
    CHECK(eer(separable).rate == 0.0);

    auto identical = make_samples({1.0, 2.0}, {1.0, 2.0});
    CHECK(eer(identical).rate == doctest::Approx(0.5));
}

TEST_CASE("eer equals the exhaustive sweep oracle") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> gen(0.0, 5.0), imp(2.0, 9.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<ScoreSample> samples;
        for (int i = 0; i < 10; ++i) samples.push_back({gen(rng), true});
        for (int i = 0; i < 12; ++i) samples.push_back({imp(rng), false});
        EerResult got = eer(samples);
        EerResult want = eer_oracle(samples);
        CHECK(got.threshold == want.threshold);
        CHECK(got.rate == doctest::Approx(want.rate));
    }
}

TEST_CASE("FAR grows and FRR shrinks with the threshold") {
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> gen(0.0, 5.0), imp(2.0, 9.0);
    std::vector<ScoreSample> samples;
    for (int i = 0; i < 30; ++i) samples.push_back({gen(rng), true});
    for (int i = 0; i < 30; ++i) samples.push_back({imp(rng), false});

    double prev_far = -1.0, prev_frr = 2.0;
    for (int k = 0; k <= 100; ++k) {
        RatePoint p = rates_at(samples, 0.1 * k);
        CHECK(p.far >= prev_far);
        CHECK(p.frr <= prev_frr);
        CHECK(p.far >= 0.0);
        CHECK(p.far <= 1.0);
        CHECK(p.frr >= 0.0);
        CHECK(p.frr <= 1.0);
        prev_far = p.far;
        prev_frr = p.frr;
    }

    EerResult e = eer(samples);
    CHECK(e.threshold >= 0.0);
    CHECK(e.threshold <= 9.0);
}

TEST_CASE("protocol reaches 100% on a separable corpus") {
    auto corpus = separable_corpus(3);
    ProtocolResult r = table2_protocol(corpus, 2, Partition::Combined);
    CHECK(r.recognition_rate == 100.0);
    CHECK(r.population == 3);
    // threshold = the largest genuine identify score, a small value here
    CHECK(r.min_threshold < 26.0);

    // deterministic
    ProtocolResult again = table2_protocol(corpus, 2, Partition::Combined);
    CHECK(again.recognition_rate == r.recognition_rate);
    CHECK(again.min_threshold == r.min_threshold);
    CHECK(again.samples.size() == r.samples.size());
}

TEST_CASE("protocol enforces K+1 images per subject hand") {
    auto corpus = separable_corpus(2);
    CHECK_THROWS_AS(table2_protocol(corpus, 2, Partition::Combined), ParameterError);
    CHECK_NOTHROW(table2_protocol(corpus, 1, Partition::Combined));
}

TEST_CASE("partitions restrict the population") {
    auto corpus = separable_corpus(3);
    ProtocolResult left = table2_protocol(corpus, 1, Partition::Left);
    CHECK(left.population == 1); // only s2 is a left hand
    ProtocolResult right = table2_protocol(corpus, 1, Partition::Right);
    CHECK(right.population == 2);
}

TEST_CASE("population sweep covers prefixes and rejects oversizes") {
    auto corpus = separable_corpus(3);
    auto rows = population_sweep(corpus, {2, 3}, Partition::Combined);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].population == 2);
    CHECK(rows[1].population == 3);

    ProtocolResult direct_k1 = table2_protocol(corpus, 1, Partition::Combined);
    CHECK(rows[1].k1_rate == direct_k1.recognition_rate);
    CHECK(rows[1].k1_threshold == direct_k1.min_threshold);

    CHECK_THROWS_AS(population_sweep(corpus, {4}, Partition::Combined), ParameterError);
}

TEST_CASE("sweep shuffling is seeded and irrelevant at full size") {
    auto corpus = separable_corpus(3);
    auto a = population_sweep(corpus, {3}, Partition::Combined, DistanceKind::L1, 99);
    auto b = population_sweep(corpus, {3}, Partition::Combined, DistanceKind::L1, 99);
    CHECK(a[0].k1_rate == b[0].k1_rate);
    CHECK(a[0].k1_threshold == b[0].k1_threshold);

    // the full population is the same set of subjects in any order
    auto sorted = population_sweep(corpus, {3}, Partition::Combined);
    CHECK(a[0].k1_rate == sorted[0].k1_rate);
    CHECK(a[0].k2_rate == sorted[0].k2_rate);
}

TEST_CASE("csv emitters are stable and mark unsupported sizes") {
    auto corpus = separable_corpus(3);
    ProtocolResult r = table2_protocol(corpus, 2, Partition::Combined);

    std::ostringstream table2;
    write_protocol_csv(table2, Partition::Combined, 2, r);
    CHECK(table2.str().rfind("combined,2,3,", 0) == 0);

    std::ostringstream table3;
    auto rows = population_sweep(corpus, {2, 3}, Partition::Combined);
    write_sweep_csv(table3, Partition::Combined, rows, {2, 3, 50});
    CHECK(table3.str().find("combined,1,50,NA,NA") != std::string::npos);
    CHECK(table3.str().find("combined,2,50,NA,NA") != std::string::npos);

    std::ostringstream roc;
    write_roc_csv(roc, r.samples);
    CHECK(roc.str().rfind("threshold,far,frr\n", 0) == 0);
}

} // TEST_SUITE
