#include "handgeom/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>

namespace handgeom {

std::string to_string(Partition p) {
    switch (p) {
        case Partition::Left: return "left";
        case Partition::Right: return "right";
        default: return "combined";
    }
}

namespace {

void require_both_classes(std::span<const ScoreSample> samples) {
    bool has_genuine = false, has_impostor = false;
    for (const auto& s : samples) (s.genuine ? has_genuine : has_impostor) = true;
    if (!has_genuine || !has_impostor)
        throw InsufficientSamplesError("need at least one genuine and one impostor sample");
}

} // namespace

RatePoint rates_at(std::span<const ScoreSample> samples, double threshold) {
    require_both_classes(samples);
    std::size_t genuine = 0, impostor = 0, false_rejects = 0, false_accepts = 0;
    for (const auto& s : samples) {
        if (s.genuine) {
            ++genuine;
            if (s.score > threshold) ++false_rejects;
        } else {
            ++impostor;
            if (s.score <= threshold) ++false_accepts;
        }
    }
    return {threshold, static_cast<double>(false_accepts) / impostor,
            static_cast<double>(false_rejects) / genuine};
}

EerResult eer(std::span<const ScoreSample> samples) {
    require_both_classes(samples);

    std::set<double> grid;
    for (const auto& s : samples) grid.insert(s.score);

    EerResult best{0.0, 0.0};
    double best_gap = std::numeric_limits<double>::infinity();
    for (double t : grid) {
        RatePoint p = rates_at(samples, t);
        double gap = std::abs(p.far - p.frr);
        if (gap < best_gap) {
            best_gap = gap;
            best = {t, (p.far + p.frr) / 2.0};
        }
    }
    return best;
}

ProtocolResult table2_protocol(const std::vector<LabeledFeature>& corpus, int enrollment_size,
                               Partition partition, DistanceKind kind) {
    if (enrollment_size < 1)
        throw ParameterError("enrollment size K must be >= 1");

    // Group images per subject-hand, preserving corpus order.
    std::map<std::pair<std::string, HandType>, std::vector<const LabeledFeature*>> groups;
    for (const auto& item : corpus) {
        if (partition == Partition::Left && item.hand_type != HandType::Left) continue;
        if (partition == Partition::Right && item.hand_type != HandType::Right) continue;
        groups[{item.subject_id, item.hand_type}].push_back(&item);
    }
    if (groups.empty())
        throw ParameterError("no images in the requested partition");

    TemplateDB db(enrollment_size);
    std::vector<LabeledProbe> probes;
    for (const auto& [key, images] : groups) {
        if (static_cast<int>(images.size()) < enrollment_size + 1)
            throw ParameterError("subject " + key.first + " needs K+1=" +
                                 std::to_string(enrollment_size + 1) + " images per hand");
        for (int i = 0; i < enrollment_size; ++i)
            db.add_row({key.first, key.second, images[i]->values});
        const LabeledFeature* held_out = images[enrollment_size];
        probes.push_back({held_out->subject_id, held_out->hand_type, held_out->values});
    }

    ProtocolResult result;
    result.population = static_cast<int>(groups.size());

    int correct = 0;
    double max_correct_score = 0.0;
    for (const auto& probe : probes) {
        MatchResult m =
            identify(db, probe.values, probe.hand_type, std::numeric_limits<double>::infinity(), kind);
        bool right_subject = m.best_subject == probe.subject_id;
        if (right_subject) {
            ++correct;
            max_correct_score = std::max(max_correct_score, m.score);
        }
        // Verification score samples: the probe against every enrolled
        // subject of its partition.
        for (const auto& [subject, score] : m.per_subject_scores)
            result.samples.push_back({score, subject == probe.subject_id});
    }

    // The smallest observed-score threshold reaching the peak rate accepts
    // exactly the correctly identified probes.
    result.min_threshold = max_correct_score;
    result.recognition_rate = 100.0 * correct / static_cast<double>(probes.size());
    return result;
}

std::vector<SweepRow> population_sweep(const std::vector<LabeledFeature>& corpus,
                                       const std::vector<int>& sizes, Partition partition,
                                       DistanceKind kind, std::optional<std::uint64_t> shuffle_seed) {
    std::set<std::string> unique;
    for (const auto& item : corpus) unique.insert(item.subject_id);
    std::vector<std::string> ordered(unique.begin(), unique.end());
    if (shuffle_seed) {
        std::mt19937_64 rng(*shuffle_seed);
        for (std::size_t i = ordered.size(); i > 1; --i)
            std::swap(ordered[i - 1], ordered[rng() % i]);
    }

    std::vector<SweepRow> rows;
    for (int size : sizes) {
        if (size <= 0 || size > static_cast<int>(ordered.size()))
            throw ParameterError("population size " + std::to_string(size) + " exceeds " +
                                 std::to_string(ordered.size()) + " subjects");
        std::set<std::string> keep(ordered.begin(), ordered.begin() + size);
        std::vector<LabeledFeature> subset;
        for (const auto& item : corpus)
            if (keep.count(item.subject_id)) subset.push_back(item);

        SweepRow row;
        row.population = size;
        ProtocolResult k1 = table2_protocol(subset, 1, partition, kind);
        ProtocolResult k2 = table2_protocol(subset, 2, partition, kind);
        row.k1_threshold = k1.min_threshold;
        row.k1_rate = k1.recognition_rate;
        row.k2_threshold = k2.min_threshold;
        row.k2_rate = k2.recognition_rate;
        rows.push_back(row);
    }
    return rows;
}

void write_protocol_csv(std::ostream& out, Partition partition, int enrollment_size,
                        const ProtocolResult& result) {
    out << to_string(partition) << "," << enrollment_size << "," << result.population << ","
        << std::fixed << std::setprecision(6) << result.min_threshold << ","
        << std::setprecision(2) << result.recognition_rate << "\n";
    out.unsetf(std::ios_base::floatfield);
}

void write_sweep_csv(std::ostream& out, Partition partition, const std::vector<SweepRow>& rows,
                     const std::vector<int>& requested_sizes) {
    std::map<int, const SweepRow*> by_size;
    for (const auto& r : rows) by_size[r.population] = &r;
    for (int size : requested_sizes) {
        auto it = by_size.find(size);
        if (it == by_size.end()) {
            // Error marker for sizes the corpus cannot support.
            out << to_string(partition) << ",1," << size << ",NA,NA\n";
            out << to_string(partition) << ",2," << size << ",NA,NA\n";
            continue;
        }
        const SweepRow& r = *it->second;
        out << to_string(partition) << ",1," << r.population << "," << std::fixed
            << std::setprecision(6) << r.k1_threshold << "," << std::setprecision(2) << r.k1_rate
            << "\n";
        out << to_string(partition) << ",2," << r.population << "," << std::setprecision(6)
            << r.k2_threshold << "," << std::setprecision(2) << r.k2_rate << "\n";
        out.unsetf(std::ios_base::floatfield);
    }
}

void write_roc_csv(std::ostream& out, std::span<const ScoreSample> samples) {
    std::set<double> grid;
    for (const auto& s : samples) grid.insert(s.score);
    out << "threshold,far,frr\n";
    out << std::fixed << std::setprecision(6);
    for (double t : grid) {
        RatePoint p = rates_at(samples, t);
        out << t << "," << p.far << "," << p.frr << "\n";
    }
    out.unsetf(std::ios_base::floatfield);
}

} // namespace handgeom
