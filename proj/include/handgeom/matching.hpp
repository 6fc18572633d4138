#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "handgeom/features.hpp"

namespace handgeom {

enum class DistanceKind { L1, L2 };

// Per-row dissimilarity: sum over features of |a_j - b_j| (the classifier's
// per-element sqrt((a-b)^2) collapses to the absolute difference). The L2
// variant is available for comparison studies only.
double row_distance(std::span<const double> a, std::span<const double> b,
                    DistanceKind kind = DistanceKind::L1);

struct TemplateRow {
    std::string subject_id;
    HandType hand_type = HandType::Right;
    FeatureVector values{};
};

// Enrolled feature matrix: K rows per subject per enrolled hand type.
class TemplateDB {
public:
    TemplateDB() = default;
    explicit TemplateDB(int enrollment_size) : enrollment_size_(enrollment_size) {}

    void add_row(TemplateRow row);

    const std::vector<TemplateRow>& rows() const { return rows_; }
    int enrollment_size() const { return enrollment_size_; }
    void set_enrollment_size(int k) { enrollment_size_ = k; }

    bool has_subject(const std::string& subject_id) const;
    std::vector<std::string> subjects() const;

    // Verifies the K-rows-per-subject-per-hand invariant; throws IoError.
    void validate() const;

    // File format: `handgeom-db v1 n=26 K=<k>` header then feature CSV rows.
    static TemplateDB load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::vector<TemplateRow> rows_;
    int enrollment_size_ = 0;
};

struct MatchResult {
    std::string best_subject;
    double score = 0.0; // min over subjects of the mean row distance
    std::map<std::string, double> per_subject_scores;
    bool accept = false; // score <= threshold
};

// One-to-many search within the probe's hand-type partition. Per-subject
// score is the mean of that subject's row distances; ties go to the
// lexicographically smallest id. The threshold only sets the accept flag.
MatchResult identify(const TemplateDB& db, std::span<const double> probe, HandType probe_hand,
                     double threshold, DistanceKind kind = DistanceKind::L1);

struct VerifyResult {
    double score = 0.0;
    bool accept = false;
};

// One-to-one check of a claimed identity.
VerifyResult verify(const TemplateDB& db, const std::string& claimed_id,
                    std::span<const double> probe, HandType probe_hand, double threshold,
                    DistanceKind kind = DistanceKind::L1);

struct LabeledProbe {
    std::string subject_id;
    HandType hand_type = HandType::Right;
    FeatureVector values{};
};

// Percentage of probes identified as their true subject with score <= t.
double recognition_rate(const TemplateDB& db, const std::vector<LabeledProbe>& probes,
                        double threshold, DistanceKind kind = DistanceKind::L1);

} // namespace handgeom
