#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "handgeom/eval.hpp"
#include "handgeom/netpbm.hpp"
#include "handgeom/synth.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace handgeom;

namespace {

GrayImage gray_from_bytes(int width, int height, const py::bytes& data) {
    std::string buf = data;
    return GrayImage(width, height, std::vector<std::uint8_t>(buf.begin(), buf.end()));
}

py::bytes gray_to_bytes(const GrayImage& img) {
    return py::bytes(reinterpret_cast<const char*>(img.pixels().data()), img.pixels().size());
}

py::tuple point_tuple(const Point& p) { return py::make_tuple(p.row, p.col); }

py::dict landmarks_dict(const LandmarkSet& lm) {
    py::dict d;
    py::list tips, valleys, mirrored;
    for (const auto& p : lm.tips) tips.append(point_tuple(p));
    for (const auto& p : lm.valleys) valleys.append(point_tuple(p));
    for (const auto& p : lm.mirrored_valleys) mirrored.append(point_tuple(p));
    d["tips"] = tips;
    d["valleys"] = valleys;
    d["mirrored_valleys"] = mirrored;
    return d;
}

FeatureVector to_features(const std::vector<double>& values) {
    if (values.size() != kFeatureCount)
        throw DimensionError("feature vectors carry exactly 26 values");
    FeatureVector v{};
    std::copy(values.begin(), values.end(), v.begin());
    return v;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "hand-geometry biometric pipeline";

    py::register_exception<Error>(m, "PipelineError");

    py::enum_<HandType>(m, "HandType")
        .value("LEFT", HandType::Left)
        .value("RIGHT", HandType::Right);

    py::enum_<DistanceKind>(m, "DistanceKind")
        .value("L1", DistanceKind::L1)
        .value("L2", DistanceKind::L2);

    py::class_<GrayImage>(m, "GrayImage")
        .def(py::init(&gray_from_bytes), "width"_a, "height"_a, "pixels"_a)
        .def_property_readonly("width", &GrayImage::width)
        .def_property_readonly("height", &GrayImage::height)
        .def_property_readonly("pixels", &gray_to_bytes)
        .def("__eq__", [](const GrayImage& a, const GrayImage& b) { return a == b; });

    m.def("load_pgm", &load_pgm, "path"_a);
    m.def("load_image_gray", &load_image_gray, "path"_a, "read a P5/P6 file as grayscale");
    m.def("save_pgm", &save_pgm, "image"_a, "path"_a);

    py::class_<NormalizedHand>(m, "NormalizedHand")
        .def_property_readonly("hand_type",
                               [](const NormalizedHand& h) { return to_string(h.hand_type); })
        .def_property_readonly("reference_point",
                               [](const NormalizedHand& h) { return point_tuple(h.reference_point); })
        .def_property_readonly("line_a", [](const NormalizedHand& h) { return point_tuple(h.line_a); })
        .def_property_readonly("line_b", [](const NormalizedHand& h) { return point_tuple(h.line_b); })
        .def_property_readonly("mask_width", [](const NormalizedHand& h) { return h.mask.width(); })
        .def_property_readonly("mask_height", [](const NormalizedHand& h) { return h.mask.height(); })
        .def_property_readonly("mask", [](const NormalizedHand& h) {
            return py::bytes(reinterpret_cast<const char*>(h.mask.pixels().data()),
                             h.mask.pixels().size());
        })
        .def_property_readonly("contour", [](const NormalizedHand& h) {
            py::list out;
            for (const auto& p : h.contour) out.append(point_tuple(p));
            return out;
        });

    m.def("normalize", [](const GrayImage& img) { return normalize(img); }, "image"_a,
          "segment, orient, guillotine and rescale a raw scan");
    m.def("landmarks", [](const NormalizedHand& h) { return landmarks_dict(locate_landmarks(h)); },
          "hand"_a);
    m.def(
        "extract_features",
        [](const NormalizedHand& h) {
            FeatureVector v = extract_features(h);
            return std::vector<double>(v.begin(), v.end());
        },
        "hand"_a);
    m.def(
        "features_of_image",
        [](const GrayImage& img) {
            FeatureVector v = extract_features(normalize(img));
            return std::vector<double>(v.begin(), v.end());
        },
        "image"_a, "full pipeline: normalize then measure");

    m.def(
        "row_distance",
        [](const std::vector<double>& a, const std::vector<double>& b, DistanceKind kind) {
            return row_distance(a, b, kind);
        },
        "a"_a, "b"_a, "kind"_a = DistanceKind::L1);

    py::class_<MatchResult>(m, "MatchResult")
        .def_readonly("best_subject", &MatchResult::best_subject)
        .def_readonly("score", &MatchResult::score)
        .def_readonly("accept", &MatchResult::accept)
        .def_readonly("per_subject_scores", &MatchResult::per_subject_scores);

    py::class_<VerifyResult>(m, "VerifyResult")
        .def_readonly("score", &VerifyResult::score)
        .def_readonly("accept", &VerifyResult::accept);

    py::class_<TemplateDB>(m, "TemplateDB")
        .def(py::init<int>(), "enrollment_size"_a)
        .def_static("load", &TemplateDB::load, "path"_a)
        .def("save", &TemplateDB::save, "path"_a)
        .def(
            "add_row",
            [](TemplateDB& db, const std::string& subject, const std::string& hand,
               const std::vector<double>& values) {
                db.add_row({subject, hand_type_from_string(hand), to_features(values)});
            },
            "subject_id"_a, "hand_type"_a, "values"_a)
        .def_property_readonly("enrollment_size", &TemplateDB::enrollment_size)
        .def_property_readonly("subjects", &TemplateDB::subjects)
        .def("__len__", [](const TemplateDB& db) { return db.rows().size(); });

    m.def(
        "identify",
        [](const TemplateDB& db, const std::vector<double>& probe, const std::string& hand,
           double threshold, DistanceKind kind) {
            return identify(db, to_features(probe), hand_type_from_string(hand), threshold, kind);
        },
        "db"_a, "probe"_a, "hand_type"_a, "threshold"_a, "kind"_a = DistanceKind::L1);
    m.def(
        "verify",
        [](const TemplateDB& db, const std::string& claimed, const std::vector<double>& probe,
           const std::string& hand, double threshold, DistanceKind kind) {
            return verify(db, claimed, to_features(probe), hand_type_from_string(hand), threshold,
                          kind);
        },
        "db"_a, "claimed_id"_a, "probe"_a, "hand_type"_a, "threshold"_a,
        "kind"_a = DistanceKind::L1);

    m.def(
        "rates_at",
        [](const std::vector<std::pair<double, bool>>& samples, double threshold) {
            std::vector<ScoreSample> s;
            for (auto& [score, genuine] : samples) s.push_back({score, genuine});
            RatePoint p = rates_at(s, threshold);
            return py::make_tuple(p.far, p.frr);
        },
        "samples"_a, "threshold"_a, "samples are (score, is_genuine) pairs");
    m.def(
        "eer",
        [](const std::vector<std::pair<double, bool>>& samples) {
            std::vector<ScoreSample> s;
            for (auto& [score, genuine] : samples) s.push_back({score, genuine});
            EerResult e = eer(s);
            return py::make_tuple(e.threshold, e.rate);
        },
        "samples"_a);

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_property_readonly("hand_type",
                               [](const GroundTruth& t) { return to_string(t.hand_type); })
        .def_property_readonly("features",
                               [](const GroundTruth& t) {
                                   return std::vector<double>(t.features.begin(), t.features.end());
                               })
        .def_property_readonly("landmarks",
                               [](const GroundTruth& t) { return landmarks_dict(t.landmarks); });

    py::class_<SyntheticHand>(m, "SyntheticHand")
        .def_readonly("image", &SyntheticHand::image)
        .def_readonly("truth", &SyntheticHand::truth);

    m.def(
        "generate",
        [](const std::string& hand_type, std::uint64_t seed, int pose_deg, double noise_sigma,
           int canvas_width, int canvas_height) {
            HandSpec spec = HandSpec::standard(hand_type_from_string(hand_type), seed);
            spec.pose_deg = pose_deg;
            spec.noise_sigma = noise_sigma;
            spec.canvas_width = canvas_width;
            spec.canvas_height = canvas_height;
            return generate(spec);
        },
        "hand_type"_a = "right", "seed"_a = 1, "pose_deg"_a = 0, "noise_sigma"_a = 6.0,
        "canvas_width"_a = 383, "canvas_height"_a = 526,
        "render a seeded synthetic hand with ground truth");

    py::class_<PopulationImage>(m, "PopulationImage")
        .def_readonly("subject_id", &PopulationImage::subject_id)
        .def_readonly("image_index", &PopulationImage::image_index)
        .def_readonly("image", &PopulationImage::image)
        .def_readonly("truth", &PopulationImage::truth)
        .def_property_readonly("hand_type",
                               [](const PopulationImage& p) { return to_string(p.hand_type); });

    m.def(
        "generate_population",
        [](int subjects, int images_per_subject, double intra_noise, double inter_gap,
           std::uint64_t seed, int canvas_width, int canvas_height) {
            PopulationOptions options;
            options.canvas_width = canvas_width;
            options.canvas_height = canvas_height;
            Population pop =
                generate_population(subjects, images_per_subject, intra_noise, inter_gap, seed, options);
            return py::make_tuple(pop.images, pop.separability_warning);
        },
        "subjects"_a, "images_per_subject"_a, "intra_noise"_a = 1.0, "inter_gap"_a = 30.0,
        "seed"_a = 1, "canvas_width"_a = 383, "canvas_height"_a = 526);

    m.attr("FEATURE_COUNT") = kFeatureCount;
    m.attr("NORMALIZED_WIDTH") = kNormalizedWidth;
    m.attr("NORMALIZED_HEIGHT") = kNormalizedHeight;
}
