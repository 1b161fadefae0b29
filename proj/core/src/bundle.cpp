#include "spoofguard/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_io.hpp"
#include "text_io.hpp"

namespace spoofguard {

using nlohmann::json;

std::string_view pipeline_name(PipelineKind k) {
    switch (k) {
        case PipelineKind::Dtw: return "dtw";
        case PipelineKind::Statistical: return "statistical";
        case PipelineKind::EndToEnd: return "e2e";
    }
    return "dtw";
}

PipelineKind parse_pipeline(std::string_view name) {
    if (name == "dtw") return PipelineKind::Dtw;
    if (name == "statistical") return PipelineKind::Statistical;
    if (name == "e2e") return PipelineKind::EndToEnd;
    throw Error(ErrorKind::Config, "unknown pipeline '" + std::string(name) + "' (dtw, statistical, e2e)");
}

namespace {

static_assert(std::endian::native == std::endian::little, "sidecar format assumes a little-endian host");

/// Numeric arrays either inline in the JSON or appended to a binary blob.
struct ArrayWriter {
    bool binary = false;
    std::string blob;

    json put(std::span<const double> v) {
        if (!binary) return json(std::vector<double>(v.begin(), v.end()));
        json ref = {{"offset", blob.size()}, {"count", v.size()}};
        blob.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
        return ref;
    }
};

struct ArrayReader {
    std::string blob;

    std::vector<double> get(const json& j) const {
        if (j.is_array()) return j.get<std::vector<double>>();
        const auto offset = j.at("offset").get<std::size_t>();
        const auto count = j.at("count").get<std::size_t>();
        if (offset > blob.size() || count > (blob.size() - offset) / sizeof(double))
            throw Error(ErrorKind::Incompatible, "bundle sidecar is truncated");
        std::vector<double> v(count);
        std::memcpy(v.data(), blob.data() + offset, count * sizeof(double));
        return v;
    }
};

json summary_to_json(const MetricSummary& m) {
    auto stat = [](const MetricStat& s) { return json{{"mean", s.mean}, {"std", s.std}}; };
    return {{"eer", stat(m.eer)},
            {"dr", stat(m.dr)},
            {"far", stat(m.far)},
            {"splits_used", m.splits_used},
            {"splits_skipped", m.splits_skipped}};
}

MetricSummary summary_from_json(const json& j) {
    auto stat = [](const json& s) { return MetricStat{s.at("mean").get<double>(), s.at("std").get<double>()}; };
    MetricSummary m;
    m.eer = stat(j.at("eer"));
    m.dr = stat(j.at("dr"));
    m.far = stat(j.at("far"));
    m.splits_used = j.at("splits_used").get<std::size_t>();
    m.splits_skipped = j.at("splits_skipped").get<std::size_t>();
    return m;
}

json model_to_json(const TrainedModel& m, ArrayWriter& arrays) {
    json j = {{"spec", m.spec.identifier()}, {"dims", m.dims}, {"n_negative", m.n_negative}, {"n_positive", m.n_positive}};
    if (const auto* knn = std::get_if<KnnModel>(&m.params)) {
        j["knn"] = {{"rows", knn->train_x.rows},
                    {"cols", knn->train_x.cols},
                    {"train_x", arrays.put(knn->train_x.data)},
                    {"train_y", knn->train_y}};
    } else if (const auto* svm = std::get_if<SvmModel>(&m.params)) {
        j["svm"] = {{"feature_mean", svm->feature_mean},
                    {"feature_scale", svm->feature_scale},
                    {"weights", svm->weights},
                    {"bias", svm->bias},
                    {"objective_trace", svm->objective_trace}};
    } else if (const auto* rf = std::get_if<ForestModel>(&m.params)) {
        json trees = json::array();
        for (const auto& t : rf->trees) {
            trees.push_back({{"feature", t.feature},
                             {"threshold", t.threshold},
                             {"left", t.left},
                             {"right", t.right},
                             {"positive_fraction", t.positive_fraction}});
        }
        j["forest"] = {{"oob_error", rf->oob_error}, {"trees", trees}};
    }
    return j;
}

TrainedModel model_from_json(const json& j, const ArrayReader& arrays) {
    TrainedModel m;
    m.spec = ClassifierSpec::parse(j.at("spec").get<std::string>());
    m.dims = j.at("dims").get<std::size_t>();
    m.n_negative = j.at("n_negative").get<std::size_t>();
    m.n_positive = j.at("n_positive").get<std::size_t>();
    switch (m.spec.family) {
        case Family::Knn: {
            const auto& k = j.at("knn");
            KnnModel knn;
            knn.train_x.rows = k.at("rows").get<std::size_t>();
            knn.train_x.cols = k.at("cols").get<std::size_t>();
            knn.train_x.data = arrays.get(k.at("train_x"));
            knn.train_y = k.at("train_y").get<std::vector<std::uint8_t>>();
            if (knn.train_x.data.size() != knn.train_x.rows * knn.train_x.cols || knn.train_y.size() != knn.train_x.rows ||
                knn.train_x.cols != m.dims)
                throw Error(ErrorKind::Incompatible, "kNN table has inconsistent dimensions");
            m.params = std::move(knn);
            break;
        }
        case Family::LinearSvm: {
            const auto& s = j.at("svm");
            SvmModel svm;
            svm.feature_mean = s.at("feature_mean").get<std::vector<double>>();
            svm.feature_scale = s.at("feature_scale").get<std::vector<double>>();
            svm.weights = s.at("weights").get<std::vector<double>>();
            svm.bias = s.at("bias").get<double>();
            svm.objective_trace = s.at("objective_trace").get<std::vector<double>>();
            if (svm.weights.size() != m.dims || svm.feature_mean.size() != m.dims || svm.feature_scale.size() != m.dims)
                throw Error(ErrorKind::Incompatible, "SVM weights have inconsistent dimensions");
            m.params = std::move(svm);
            break;
        }
        case Family::RandomForest: {
            const auto& f = j.at("forest");
            ForestModel rf;
            rf.oob_error = f.at("oob_error").get<double>();
            for (const auto& t : f.at("trees")) {
                DecisionTree tree;
                tree.feature = t.at("feature").get<std::vector<int>>();
                tree.threshold = t.at("threshold").get<std::vector<double>>();
                tree.left = t.at("left").get<std::vector<int>>();
                tree.right = t.at("right").get<std::vector<int>>();
                tree.positive_fraction = t.at("positive_fraction").get<std::vector<double>>();
                const auto n = tree.feature.size();
                if (n == 0 || tree.threshold.size() != n || tree.left.size() != n || tree.right.size() != n ||
                    tree.positive_fraction.size() != n)
                    throw Error(ErrorKind::Incompatible, "forest tree arrays are inconsistent");
                for (std::size_t i = 0; i < n; ++i) {
                    if (tree.feature[i] < 0) continue;
                    if (static_cast<std::size_t>(tree.feature[i]) >= m.dims || tree.left[i] <= static_cast<int>(i) ||
                        tree.right[i] <= static_cast<int>(i) || static_cast<std::size_t>(tree.left[i]) >= n ||
                        static_cast<std::size_t>(tree.right[i]) >= n)
                        throw Error(ErrorKind::Incompatible, "forest tree has an invalid node");
                }
                rf.trees.push_back(std::move(tree));
            }
            if (rf.trees.empty()) throw Error(ErrorKind::Incompatible, "forest has no trees");
            m.params = std::move(rf);
            break;
        }
    }
    return m;
}

std::size_t large_payload_bytes(const ModelBundle& b) {
    std::size_t n = 0;
    for (const auto& p : b.prototypes.prototypes)
        for (const auto& s : p.series) n += s.size();
    if (const auto* knn = std::get_if<KnnModel>(&b.model.params)) n += knn->train_x.data.size();
    return n * sizeof(double);
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Incompatible, "cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path sidecar_path(const std::filesystem::path& p) {
    auto s = p;
    s += ".bin";
    return s;
}

}  // namespace

void save_bundle(const ModelBundle& b, const std::filesystem::path& path, const BundleWriteOptions& options) {
    ArrayWriter arrays;
    arrays.binary = large_payload_bytes(b) > options.sidecar_threshold_bytes;

    json j;
    j["schema_version"] = b.schema_version;
    j["event_type"] = b.event_type;
    j["pipeline"] = pipeline_name(b.pipeline);
    j["sample_every_s"] = b.sample_every_s;
    j["band"] = band_to_json(b.band);
    j["fingerprint"] = b.fingerprint;
    j["threshold"] = b.threshold;

    json windows = json::array();
    for (const auto& w : b.selection.windows)
        windows.push_back({{"sensor_id", w.sensor_id}, {"t_minus", w.t_minus}, {"t_plus", w.t_plus}, {"rmi", w.rmi}});
    j["selection"] = {{"event_type", b.selection.event_type}, {"threshold", b.selection.threshold}, {"windows", windows}};

    json protos = json::array();
    for (const auto& p : b.prototypes.prototypes) {
        json series = json::array();
        for (const auto& s : p.series) series.push_back(arrays.put(s));
        protos.push_back({{"anchor", p.anchor}, {"series", series}});
    }
    j["prototypes"] = {{"event_type", b.prototypes.event_type},
                       {"sensor_ids", b.prototypes.sensor_ids},
                       {"prototypes", protos}};

    json stats = json::array();
    for (const auto& s : b.stats.sensors) stats.push_back({{"sensor_id", s.sensor_id}, {"mean", s.mean}, {"std", s.stddev}});
    j["normalization"] = stats;

    j["model"] = model_to_json(b.model, arrays);
    j["validation"] = summary_to_json(b.validation);
    json board = json::array();
    for (const auto& e : b.leaderboard)
        board.push_back({{"classifier_id", e.spec.identifier()}, {"summary", summary_to_json(e.summary)}, {"rank_score", e.score}});
    j["leaderboard"] = board;

    const auto side = sidecar_path(path);
    if (arrays.binary) {
        j["sidecar"] = side.filename().string();
        write_text_file(side, arrays.blob);
    } else {
        std::error_code ec;
        std::filesystem::remove(side, ec);
    }
    write_text_file(path, j.dump(1) + "\n");
}

ModelBundle load_bundle(const std::filesystem::path& path) {
    ModelBundle b;
    try {
        const json j = json::parse(read_all(path));
        b.schema_version = j.at("schema_version").get<int>();
        if (b.schema_version != ModelBundle::kSchemaVersion)
            throw Error(ErrorKind::Incompatible, "bundle schema version " + std::to_string(b.schema_version) +
                                                     " is not supported (expected " +
                                                     std::to_string(ModelBundle::kSchemaVersion) + ")");
        ArrayReader arrays;
        if (j.contains("sidecar")) arrays.blob = read_all(path.parent_path() / j.at("sidecar").get<std::string>());

        b.event_type = j.at("event_type").get<std::string>();
        try {
            b.pipeline = parse_pipeline(j.at("pipeline").get<std::string>());
        } catch (const Error& e) {
            throw Error(ErrorKind::Incompatible, e.what());
        }
        b.sample_every_s = j.at("sample_every_s").get<std::int64_t>();
        b.band = band_from_json(j.at("band"));
        b.fingerprint = j.at("fingerprint").get<std::string>();
        b.threshold = j.at("threshold").get<double>();

        const auto& sel = j.at("selection");
        b.selection.event_type = sel.at("event_type").get<std::string>();
        b.selection.threshold = sel.at("threshold").get<double>();
        for (const auto& w : sel.at("windows")) {
            b.selection.windows.push_back({w.at("sensor_id").get<std::string>(), w.at("t_minus").get<std::int64_t>(),
                                           w.at("t_plus").get<std::int64_t>(), w.at("rmi").get<double>()});
        }
        const auto& pr = j.at("prototypes");
        b.prototypes.event_type = pr.at("event_type").get<std::string>();
        b.prototypes.sensor_ids = pr.at("sensor_ids").get<std::vector<std::string>>();
        for (const auto& p : pr.at("prototypes")) {
            Prototype proto;
            proto.anchor = p.at("anchor").get<Timestamp>();
            for (const auto& s : p.at("series")) proto.series.push_back(arrays.get(s));
            if (proto.series.size() != b.prototypes.sensor_ids.size())
                throw Error(ErrorKind::Incompatible, "prototype series count differs from its sensor list");
            b.prototypes.prototypes.push_back(std::move(proto));
        }
        for (const auto& s : j.at("normalization"))
            b.stats.sensors.push_back({s.at("sensor_id").get<std::string>(), s.at("mean").get<double>(), s.at("std").get<double>()});

        b.model = model_from_json(j.at("model"), arrays);
        b.validation = summary_from_json(j.at("validation"));
        for (const auto& e : j.at("leaderboard")) {
            b.leaderboard.push_back({ClassifierSpec::parse(e.at("classifier_id").get<std::string>()),
                                     summary_from_json(e.at("summary")), e.at("rank_score").get<double>()});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Incompatible, path.string() + ": malformed bundle: " + e.what());
    }

    const std::size_t expected_dims = b.pipeline == PipelineKind::Statistical
                                          ? b.selection.windows.size() * 5
                                          : b.selection.windows.size() * b.prototypes.size();
    if (b.model.dims != expected_dims)
        throw Error(ErrorKind::Incompatible, path.string() + ": model dimension does not match selection and prototypes");
    for (const auto& w : b.selection.windows) (void)b.stats.at(w.sensor_id);
    return b;
}

std::optional<std::string> fingerprint_mismatch(const ModelBundle& bundle, const std::string& expected) {
    if (bundle.fingerprint == expected) return std::nullopt;
    return "bundle for '" + bundle.event_type + "' was trained with different settings (fingerprint " + bundle.fingerprint +
           ", current " + expected + ")";
}

}  // namespace spoofguard
