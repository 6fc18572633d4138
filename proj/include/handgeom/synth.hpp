#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "handgeom/features.hpp"

namespace handgeom {

// One finger of the parametric hand. Sizes are in design pixels (the
// normalized 200x300 frame); the splay angle is measured from vertical,
// positive toward the thumb side of a right hand.
struct FingerSpec {
    double length = 80.0;
    double base_width = 22.0;
    double tip_width = 16.0;
    double splay_deg = 0.0;
};

struct HandSpec {
    HandType hand_type = HandType::Right;
    std::array<FingerSpec, 5> fingers; // thumb..little
    double palm_breadth = 112.0;
    double wrist_breadth = 64.0;
    double knuckle_row = 115.0;   // top of the palm in design coordinates
    double valley_dip = 12.0;     // webbing notch depth below the knuckle row
    double thumb_anchor = 0.34;   // thumb attachment along the palm side edge
    int pose_deg = 0;             // one of 0, 90, 180, 270
    int canvas_width = 383;
    int canvas_height = 526;
    double noise_sigma = 6.0;     // additive intensity noise, <= 10
    std::uint64_t seed = 1;

    // Plausible right/left hand with mild seed-driven variation.
    static HandSpec standard(HandType type = HandType::Right, std::uint64_t seed = 1);
};

// Exact pipeline targets computed from the spec geometry, expressed in the
// normalized 200x300 frame.
struct GroundTruth {
    LandmarkSet landmarks;
    FeatureVector features{};
    HandType hand_type = HandType::Right;
    Point reference_point;
    Point line_a;
    Point line_b;
};

struct SyntheticHand {
    GrayImage image;       // noisy grayscale scan, posed
    BinaryImage silhouette; // noise-free upright mask (debugging aid)
    GroundTruth truth;
};

// Renders the spec and derives its ground truth analytically; throws
// InvalidSpecError when the geometry violates the spec invariants.
SyntheticHand generate(const HandSpec& spec);

struct PopulationImage {
    std::string subject_id;
    int image_index = 0;
    HandType hand_type = HandType::Right;
    GrayImage image;
    GroundTruth truth;
};

struct PopulationOptions {
    int canvas_width = 383;
    int canvas_height = 526;
    double noise_sigma = 6.0;
    double left_fraction = 0.62; // matches a mixed left/right population
};

struct Population {
    std::vector<PopulationImage> images;
    bool separability_warning = false; // inter_gap <= 2 * intra_noise
};

// Draws one base spec per subject with pairwise parameter separation of at
// least inter_gap (L1 over lengths, base widths and palm breadth), then
// perturbs each image's parameters by at most intra_noise. Deterministic
// for a given seed.
Population generate_population(int subjects, int images_per_subject, double intra_noise,
                               double inter_gap, std::uint64_t seed,
                               const PopulationOptions& options = {});

// Ground-truth sidecar: hand_type, R, A, B plus f1..f26 as key=value lines.
void write_truth_sidecar(const GroundTruth& truth, std::ostream& out);

} // namespace handgeom
