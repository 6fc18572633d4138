#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <unistd.h>

#include "handgeom/eval.hpp"
#include "handgeom/netpbm.hpp"
#include "handgeom/synth.hpp"

namespace fs = std::filesystem;
using namespace handgeom;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

// Advisory single-writer lock next to the database file.
class DbLock {
public:
    explicit DbLock(const std::string& db_path) : path_(db_path + ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw IoError("database is locked (remove " + path_ + " if stale)");
    }
    ~DbLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    DbLock(const DbLock&) = delete;
    DbLock& operator=(const DbLock&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

std::uint64_t seed_or_env(std::uint64_t seed, bool seed_set) {
    if (seed_set) return seed;
    if (const char* env = std::getenv("HANDGEOM_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

struct ManifestEntry {
    std::string path;
    std::string subject_id;
};

std::vector<ManifestEntry> read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw IoError("cannot open manifest " + manifest_path);
    fs::path base = fs::path(manifest_path).parent_path();

    std::vector<ManifestEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw IoError("manifest line needs `path,subject_id`: " + line);
        ManifestEntry e{line.substr(0, comma), line.substr(comma + 1)};
        if (!e.path.empty() && !fs::path(e.path).is_absolute())
            e.path = (base / e.path).string();
        if (e.subject_id.empty())
            throw IoError("empty subject id in manifest line: " + line);
        out.push_back(std::move(e));
    }
    if (out.empty())
        throw IoError("manifest is empty: " + manifest_path);
    return out;
}

FeatureVector features_of_file(const std::string& path, HandType* hand_out) {
    GrayImage img = load_image_gray(path);
    NormalizedHand norm = normalize(img);
    if (hand_out) *hand_out = norm.hand_type;
    return extract_features(norm);
}

void save_db_atomic(const TemplateDB& db, const std::string& path) {
    std::string tmp = path + ".tmp";
    db.save(tmp);
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot replace database " + path);
    }
}

DistanceKind parse_distance(const std::string& name) {
    if (name == "l1") return DistanceKind::L1;
    if (name == "l2") return DistanceKind::L2;
    throw ParameterError("distance must be l1 or l2");
}

Partition parse_partition(const std::string& name) {
    if (name == "left") return Partition::Left;
    if (name == "right") return Partition::Right;
    if (name == "combined") return Partition::Combined;
    throw ParameterError("partition must be left, right or combined");
}

int cmd_enroll(const std::string& db_path, const std::string& manifest_path, int enroll_size) {
    auto entries = read_manifest(manifest_path);

    TemplateDB db;
    bool existing = fs::exists(db_path);
    if (existing) db = TemplateDB::load(db_path);

    DbLock lock(db_path);

    std::map<std::pair<std::string, HandType>, int> counts;
    std::vector<TemplateRow> new_rows;
    for (const auto& entry : entries) {
        if (db.has_subject(entry.subject_id))
            throw DuplicateIdentityError("subject already enrolled: " + entry.subject_id);
        HandType hand;
        FeatureVector values;
        try {
            values = features_of_file(entry.path, &hand);
        } catch (const Error& e) {
            throw IoError(entry.path + ": " + e.what());
        }
        std::cout << entry.path << "," << entry.subject_id << "," << to_string(hand) << "\n";
        ++counts[{entry.subject_id, hand}];
        new_rows.push_back({entry.subject_id, hand, values});
    }

    int inferred = counts.begin()->second;
    for (const auto& [key, n] : counts)
        if (n != inferred)
            throw ParameterError("subjects have unequal image counts; cannot fix K");
    if (enroll_size > 0 && enroll_size != inferred)
        throw ParameterError("manifest provides K=" + std::to_string(inferred) +
                             " images per subject, expected K=" + std::to_string(enroll_size));
    if (existing && db.enrollment_size() != inferred)
        throw ParameterError("existing database has K=" + std::to_string(db.enrollment_size()));

    db.set_enrollment_size(inferred);
    for (auto& row : new_rows) db.add_row(std::move(row));
    save_db_atomic(db, db_path);
    std::cout << "enrolled " << counts.size() << " subject-hands, K=" << inferred << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& db_path, const std::string& claim, const std::string& image,
               double threshold, DistanceKind kind) {
    TemplateDB db = TemplateDB::load(db_path);
    HandType hand;
    FeatureVector probe = features_of_file(image, &hand);
    VerifyResult r = verify(db, claim, probe, hand, threshold, kind);
    std::cout << claim << " " << r.score << " " << (r.accept ? "accept" : "reject") << " "
              << to_string(hand) << "\n";
    return r.accept ? kExitOk : kExitReject;
}

int cmd_identify(const std::string& db_path, const std::string& image, double threshold,
                 DistanceKind kind) {
    TemplateDB db = TemplateDB::load(db_path);
    HandType hand;
    FeatureVector probe = features_of_file(image, &hand);
    MatchResult r = identify(db, probe, hand, threshold, kind);
    std::cout << r.best_subject << " " << r.score << " " << (r.accept ? "accept" : "reject")
              << " " << to_string(hand) << "\n";
    return r.accept ? kExitOk : kExitReject;
}

int cmd_landmarks(const std::string& image, const std::string& prefix) {
    GrayImage img = load_image_gray(image);
    NormalizedHand norm = normalize(img);
    LandmarkSet lm = locate_landmarks(norm);

    {
        std::ofstream out(prefix + ".txt");
        write_landmarks_text(lm, out);
    }
    save_pgm(annotate_landmarks(norm, lm), prefix + ".pgm");

    GrayImage mask(norm.mask.width(), norm.mask.height());
    for (std::size_t i = 0; i < mask.pixels().size(); ++i)
        mask.pixels()[i] = norm.mask.pixels()[i] ? 255 : 0;
    save_pgm(mask, prefix + "_mask.pgm");
    {
        std::ofstream out(prefix + "_mask.txt");
        write_normalize_sidecar(norm, out);
    }
    std::cout << "hand_type " << to_string(norm.hand_type) << "\n";
    return kExitOk;
}

int cmd_synth(const std::string& out_dir, int subjects, int images, double intra_noise,
              double inter_gap, std::uint64_t seed, int canvas_w, int canvas_h) {
    fs::create_directories(out_dir);
    PopulationOptions options;
    options.canvas_width = canvas_w;
    options.canvas_height = canvas_h;
    Population pop = generate_population(subjects, images, intra_noise, inter_gap, seed, options);
    if (pop.separability_warning)
        std::cerr << "warning: inter_gap <= 2*intra_noise; subjects may not be separable\n";

    std::ofstream manifest(fs::path(out_dir) / "manifest.csv");
    for (const auto& item : pop.images) {
        std::string stem = item.subject_id + "_" + std::to_string(item.image_index);
        fs::path img_path = fs::path(out_dir) / (stem + ".pgm");
        save_pgm(item.image, img_path.string());
        std::ofstream sidecar(fs::path(out_dir) / (stem + ".txt"));
        write_truth_sidecar(item.truth, sidecar);
        manifest << stem + ".pgm" << "," << item.subject_id << "\n";
    }
    std::cout << "wrote " << pop.images.size() << " images to " << out_dir << "\n";
    return kExitOk;
}

std::vector<LabeledFeature> corpus_from_manifest(const std::string& manifest_path) {
    std::vector<LabeledFeature> corpus;
    for (const auto& entry : read_manifest(manifest_path)) {
        HandType hand;
        FeatureVector values = features_of_file(entry.path, &hand);
        corpus.push_back({entry.subject_id, hand, values});
    }
    return corpus;
}

std::vector<LabeledFeature> corpus_from_synth(int subjects, int images, double intra_noise,
                                              double inter_gap, std::uint64_t seed, int canvas_w,
                                              int canvas_h) {
    PopulationOptions options;
    options.canvas_width = canvas_w;
    options.canvas_height = canvas_h;
    Population pop = generate_population(subjects, images, intra_noise, inter_gap, seed, options);
    std::vector<LabeledFeature> corpus;
    for (const auto& item : pop.images) {
        NormalizedHand norm = normalize(item.image);
        corpus.push_back({item.subject_id, norm.hand_type, extract_features(norm)});
    }
    return corpus;
}

int cmd_eval(const std::vector<LabeledFeature>& corpus, int enroll_size, Partition partition,
             const std::vector<int>& sizes, const std::string& out_dir, DistanceKind kind,
             std::optional<std::uint64_t> shuffle_seed) {
    fs::create_directories(out_dir);

    ProtocolResult main_run = table2_protocol(corpus, enroll_size, partition, kind);
    {
        std::ofstream out(fs::path(out_dir) / "table2.csv");
        out << "partition,K,population,threshold,rate\n";
        write_protocol_csv(out, partition, enroll_size, main_run);
    }
    {
        std::vector<SweepRow> rows;
        std::vector<int> supported;
        for (int size : sizes) {
            try {
                auto one = population_sweep(corpus, {size}, partition, kind, shuffle_seed);
                rows.push_back(one.front());
                supported.push_back(size);
            } catch (const ParameterError&) {
                // left for the error marker
            }
        }
        std::ofstream out(fs::path(out_dir) / "table3.csv");
        out << "partition,K,population,threshold,rate\n";
        write_sweep_csv(out, partition, rows, sizes);
    }
    {
        std::ofstream out(fs::path(out_dir) / "roc.csv");
        write_roc_csv(out, main_run.samples);
    }
    EerResult e = eer(main_run.samples);
    std::cout << "partition=" << to_string(partition) << " K=" << enroll_size
              << " rate=" << main_run.recognition_rate << "% threshold=" << main_run.min_threshold
              << " (score/n=" << main_run.min_threshold / kFeatureCount << ")"
              << " eer=" << e.rate << "@" << e.threshold << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hand-geometry verification pipeline"};
    app.require_subcommand(1);

    std::string db_path, manifest_path, image_path, claim, out_dir = ".", prefix = "landmarks";
    std::string distance = "l1", partition = "combined";
    double threshold = 0.0, intra_noise = 1.0, inter_gap = 10.0;
    int enroll_size = 0, subjects = 10, images = 3, canvas_w = 383, canvas_h = 526;
    std::uint64_t seed = 1;
    bool seed_set = false, synthetic = false, sweep_shuffle = false;
    std::vector<int> sizes = {50, 100, 150, 200, 253};

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed (or HANDGEOM_SEED)")
            ->each([&](const std::string&) { seed_set = true; });
    };

    CLI::App* enroll = app.add_subcommand("enroll", "extract features and build a template db");
    enroll->add_option("--db", db_path, "database file")->required();
    enroll->add_option("--manifest", manifest_path, "csv of `path,subject_id`")->required();
    enroll->add_option("--enroll-size", enroll_size, "expected images per subject per hand");

    CLI::App* verify_cmd = app.add_subcommand("verify", "one-to-one identity check");
    verify_cmd->add_option("--db", db_path)->required();
    verify_cmd->add_option("--claim", claim, "claimed subject id")->required();
    verify_cmd->add_option("--threshold", threshold)->required();
    verify_cmd->add_option("image", image_path)->required();
    verify_cmd->add_option("--distance", distance, "l1 (default) or l2");

    CLI::App* identify_cmd = app.add_subcommand("identify", "one-to-many search");
    identify_cmd->add_option("--db", db_path)->required();
    identify_cmd->add_option("--threshold", threshold)->required();
    identify_cmd->add_option("image", image_path)->required();
    identify_cmd->add_option("--distance", distance);

    CLI::App* landmarks_cmd = app.add_subcommand("landmarks", "debug landmark dump");
    landmarks_cmd->add_option("image", image_path)->required();
    landmarks_cmd->add_option("--out-prefix", prefix, "output file prefix");

    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synth_cmd->add_option("--out", out_dir, "output directory")->required();
    synth_cmd->add_option("--subjects", subjects);
    synth_cmd->add_option("--images", images, "images per subject");
    synth_cmd->add_option("--intra-noise", intra_noise, "per-image parameter noise, px");
    synth_cmd->add_option("--inter-gap", inter_gap, "minimum subject separation, px");
    synth_cmd->add_option("--canvas-width", canvas_w);
    synth_cmd->add_option("--canvas-height", canvas_h);
    add_seed(synth_cmd);

    CLI::App* eval_cmd = app.add_subcommand("eval", "run the evaluation protocol");
    eval_cmd->add_option("--manifest", manifest_path, "csv of `path,subject_id`");
    eval_cmd->add_flag("--synthetic", synthetic, "use the generator instead of a manifest");
    eval_cmd->add_option("--enroll-size", enroll_size, "K (default 2)");
    eval_cmd->add_option("--partition", partition, "left|right|combined");
    eval_cmd->add_option("--sizes", sizes, "population sweep sizes");
    eval_cmd->add_option("--subjects", subjects, "synthetic: subject count");
    eval_cmd->add_option("--images", images, "synthetic: images per subject");
    eval_cmd->add_option("--intra-noise", intra_noise);
    eval_cmd->add_option("--inter-gap", inter_gap);
    eval_cmd->add_option("--canvas-width", canvas_w);
    eval_cmd->add_option("--canvas-height", canvas_h);
    eval_cmd->add_option("--out-dir", out_dir, "where the csv reports go");
    eval_cmd->add_option("--distance", distance);
    eval_cmd->add_flag("--sweep-shuffle", sweep_shuffle,
                       "sample sweep subjects in seeded random order instead of sorted ids");
    add_seed(eval_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (enroll->parsed()) return cmd_enroll(db_path, manifest_path, enroll_size);
        if (verify_cmd->parsed())
            return cmd_verify(db_path, claim, image_path, threshold, parse_distance(distance));
        if (identify_cmd->parsed())
            return cmd_identify(db_path, image_path, threshold, parse_distance(distance));
        if (landmarks_cmd->parsed()) return cmd_landmarks(image_path, prefix);
        if (synth_cmd->parsed())
            return cmd_synth(out_dir, subjects, images, intra_noise, inter_gap,
                             seed_or_env(seed, seed_set), canvas_w, canvas_h);
        if (eval_cmd->parsed()) {
            int k = enroll_size > 0 ? enroll_size : 2;
            std::uint64_t run_seed = seed_or_env(seed, seed_set);
            std::vector<LabeledFeature> corpus =
                synthetic ? corpus_from_synth(subjects, images, intra_noise, inter_gap, run_seed,
                                              canvas_w, canvas_h)
                          : corpus_from_manifest(manifest_path);
            std::optional<std::uint64_t> shuffle;
            if (sweep_shuffle) shuffle = run_seed;
            return cmd_eval(corpus, k, parse_partition(partition), sizes, out_dir,
                            parse_distance(distance), shuffle);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
