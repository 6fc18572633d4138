#include "handgeom/matching.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace handgeom {

double row_distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
    if (a.size() != b.size())
        throw DimensionError("feature vectors differ in length");
    double acc = 0.0;
    if (kind == DistanceKind::L1) {
        for (std::size_t j = 0; j < a.size(); ++j) acc += std::abs(a[j] - b[j]);
        return acc;
    }
    for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(acc);
}

void TemplateDB::add_row(TemplateRow row) {
    if (row.subject_id.empty())
        throw ParameterError("subject id must be non-empty");
    rows_.push_back(std::move(row));
}

bool TemplateDB::has_subject(const std::string& subject_id) const {
    return std::any_of(rows_.begin(), rows_.end(),
                       [&](const TemplateRow& r) { return r.subject_id == subject_id; });
}

std::vector<std::string> TemplateDB::subjects() const {
    std::set<std::string> unique;
    for (const auto& r : rows_) unique.insert(r.subject_id);
    return {unique.begin(), unique.end()};
}

void TemplateDB::validate() const {
    if (enrollment_size_ < 1)
        throw IoError("enrollment size K must be >= 1");
    std::map<std::pair<std::string, HandType>, int> counts;
    for (const auto& r : rows_) ++counts[{r.subject_id, r.hand_type}];
    for (const auto& [key, count] : counts)
        if (count != enrollment_size_)
            throw IoError("subject " + key.first + " has " + std::to_string(count) +
                          " rows, expected K=" + std::to_string(enrollment_size_));
}

namespace {

double parse_double(const std::string& field) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw IoError("bad numeric field: " + field);
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

} // namespace

TemplateDB TemplateDB::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open database " + path);

    std::string header;
    if (!std::getline(in, header))
        throw IoError("empty database file " + path);

    std::istringstream hs(header);
    std::string magic, version, nfield, kfield;
    hs >> magic >> version >> nfield >> kfield;
    if (magic != "handgeom-db" || version != "v1")
        throw IoError("not a handgeom-db v1 file: " + path);
    if (nfield != "n=" + std::to_string(kFeatureCount))
        throw IoError("unsupported feature dimension in " + path + ": " + nfield);
    if (kfield.rfind("K=", 0) != 0)
        throw IoError("missing K= in header of " + path);

    TemplateDB db;
    db.enrollment_size_ = std::stoi(kfield.substr(2));

    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 2 + kFeatureCount)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(2 + kFeatureCount) + " fields");
        TemplateRow row;
        row.subject_id = fields[0];
        row.hand_type = hand_type_from_string(fields[1]);
        for (int j = 0; j < kFeatureCount; ++j) row.values[j] = parse_double(fields[2 + j]);
        db.add_row(std::move(row));
    }
    db.validate();
    return db;
}

void TemplateDB::save(const std::string& path) const {
    validate();
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write database " + path);
    out << "handgeom-db v1 n=" << kFeatureCount << " K=" << enrollment_size_ << "\n";
    for (const auto& r : rows_) write_feature_row(out, r.subject_id, r.hand_type, r.values);
    if (!out)
        throw IoError("write failed: " + path);
}

MatchResult identify(const TemplateDB& db, std::span<const double> probe, HandType probe_hand,
                     double threshold, DistanceKind kind) {
    if (db.rows().empty())
        throw EmptyDatabaseError("template database is empty");

    // Sum and count per subject within the probe's hand partition; the
    // map's ordering makes the argmin tie-break lexicographic.
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& row : db.rows()) {
        if (row.hand_type != probe_hand) continue;
        auto& [sum, count] = acc[row.subject_id];
        sum += row_distance(probe, row.values, kind);
        ++count;
    }
    if (acc.empty())
        throw EmptyDatabaseError("no enrolled rows for the probe hand type");

    MatchResult result;
    result.score = std::numeric_limits<double>::infinity();
    for (const auto& [subject, sc] : acc) {
        double mean = sc.first / sc.second;
        result.per_subject_scores[subject] = mean;
        if (mean < result.score) {
            result.score = mean;
            result.best_subject = subject;
        }
    }
    result.accept = result.score <= threshold;
    return result;
}

VerifyResult verify(const TemplateDB& db, const std::string& claimed_id,
                    std::span<const double> probe, HandType probe_hand, double threshold,
                    DistanceKind kind) {
    double sum = 0.0;
    int matched = 0, total = 0;
    double sum_all = 0.0;
    for (const auto& row : db.rows()) {
        if (row.subject_id != claimed_id) continue;
        ++total;
        sum_all += row_distance(probe, row.values, kind);
        if (row.hand_type == probe_hand) {
            sum += row_distance(probe, row.values, kind);
            ++matched;
        }
    }
    if (total == 0)
        throw UnknownIdentityError("subject not enrolled: " + claimed_id);

    // Prefer templates of the probe's hand; fall back to all of the
    // subject's rows when that hand was never enrolled.
    double score = matched > 0 ? sum / matched : sum_all / total;
    return {score, score <= threshold};
}

double recognition_rate(const TemplateDB& db, const std::vector<LabeledProbe>& probes,
                        double threshold, DistanceKind kind) {
    if (probes.empty())
        throw ParameterError("probe set is empty");
    int hits = 0;
    for (const auto& probe : probes) {
        if (!db.has_subject(probe.subject_id))
            throw UnknownIdentityError("probe label not enrolled: " + probe.subject_id);
        MatchResult r = identify(db, probe.values, probe.hand_type, threshold, kind);
        if (r.best_subject == probe.subject_id && r.accept) ++hits;
    }
    return 100.0 * hits / static_cast<double>(probes.size());
}

} // namespace handgeom
