#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "handgeom/matching.hpp"

namespace handgeom {

struct ScoreSample {
    double score = 0.0;
    bool genuine = false;
};

struct RatePoint {
    double threshold = 0.0;
    double far = 0.0; // impostor samples accepted (score <= t)
    double frr = 0.0; // genuine samples rejected (score > t)
};

RatePoint rates_at(std::span<const ScoreSample> samples, double threshold);

struct EerResult {
    double threshold = 0.0;
    double rate = 0.0; // (FAR + FRR) / 2 at the chosen threshold
};

// Sweeps the sorted distinct scores and returns the point where
// |FAR - FRR| is smallest; ties go to the smaller threshold.
EerResult eer(std::span<const ScoreSample> samples);

enum class Partition { Left, Right, Combined };

std::string to_string(Partition p);

struct LabeledFeature {
    std::string subject_id;
    HandType hand_type = HandType::Right;
    FeatureVector values{};
};

struct ProtocolResult {
    double min_threshold = 0.0;        // smallest t reaching the peak rate
    double recognition_rate = 0.0;     // percent
    int population = 0;                // subjects in the partition
    std::vector<ScoreSample> samples;  // genuine + impostor verification scores
};

// Enrolls the first K images of each subject-hand group, tests the next
// held-out image, and reports the peak recognition rate together with the
// smallest observed-score threshold achieving it.
ProtocolResult table2_protocol(const std::vector<LabeledFeature>& corpus, int enrollment_size,
                               Partition partition, DistanceKind kind = DistanceKind::L1);

struct SweepRow {
    int population = 0;
    double k1_threshold = 0.0;
    double k1_rate = 0.0;
    double k2_threshold = 0.0;
    double k2_rate = 0.0;
};

// Runs the protocol on subject prefixes of the given sizes, for K=1 and
// K=2. Prefixes follow sorted subject ids; a shuffle seed samples a
// deterministic random subject order instead.
std::vector<SweepRow> population_sweep(const std::vector<LabeledFeature>& corpus,
                                       const std::vector<int>& sizes, Partition partition,
                                       DistanceKind kind = DistanceKind::L1,
                                       std::optional<std::uint64_t> shuffle_seed = std::nullopt);

// CSV emitters used by the eval command; formats are stable.
void write_protocol_csv(std::ostream& out, Partition partition, int enrollment_size,
                        const ProtocolResult& result);
void write_sweep_csv(std::ostream& out, Partition partition, const std::vector<SweepRow>& rows,
                     const std::vector<int>& requested_sizes);
void write_roc_csv(std::ostream& out, std::span<const ScoreSample> samples);

} // namespace handgeom
