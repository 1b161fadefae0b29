#include "spoofguard/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "json_io.hpp"
#include "spoofguard/rng.hpp"
#include "spoofguard/statistical.hpp"

namespace spoofguard {

using nlohmann::json;

namespace {

EswOptions effective_esw(const PipelineOptions& o) {
    EswOptions e = o.esw;
    e.sample_every_s = o.sample_every_s;
    e.band = o.band;
    e.seed = o.seed;
    return e;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string options_fingerprint(const PipelineOptions& o) {
    json j;
    j["pipeline"] = pipeline_name(o.kind);
    j["sample_every_s"] = o.sample_every_s;
    j["rmi_threshold"] = o.rmi_threshold;
    j["band"] = band_to_json(o.band);
    j["cv_folds"] = o.cv_folds;
    j["max_prototypes"] = o.max_prototypes;
    j["rank_std_penalty"] = o.rank_std_penalty;
    j["esw"] = {{"search_min_s", o.esw.search_min_s},
                {"search_max_s", o.esw.search_max_s},
                {"rmi_bins", o.esw.rmi_bins},
                {"max_pairs", o.esw.max_pairs}};
    j["seed"] = o.seed;
    json specs = json::array();
    for (const auto& s : o.specs) specs.push_back(s.identifier());
    j["specs"] = specs;
    return hex64(fnv1a64(j.dump()));
}

TimeRange guarded_train_range(const Dataset& dataset, const EswOptions& esw) {
    auto r = dataset.segment(Segment::Train);
    r.end -= seconds_to_ns(std::max<std::int64_t>(0, esw.search_max_s));
    r.end = std::max(r.begin, r.end);
    return r;
}

namespace {

std::string with_event(const std::string& event_type, const Error& e) {
    return "event '" + event_type + "': " + e.what();
}

}  // namespace

EmbeddingMatrix bundle_features(const ModelBundle& b, const Dataset& dataset, std::span<const Instance> instances) {
    if (b.pipeline == PipelineKind::Statistical) {
        return embed_statistical_all(instances, StatisticalContext{dataset, b.selection, b.stats});
    }
    return embed_all(instances, EmbeddingContext{dataset, b.selection, b.prototypes, b.stats, b.band});
}

TrainOutcome train_event(const Dataset& dataset, const std::string& event_type, const PipelineOptions& o) {
    if (!dataset.find_log(event_type))
        throw Error(ErrorKind::Config, "unknown event type '" + event_type + "'");
    if (o.specs.empty()) throw Error(ErrorKind::Config, "no classifier specs");
    const auto esw = effective_esw(o);

    TrainOutcome out;
    ModelBundle& b = out.bundle;
    b.event_type = event_type;
    b.pipeline = o.kind;
    b.sample_every_s = o.sample_every_s;
    b.band = o.band;
    b.fingerprint = options_fingerprint(o);

    try {
        const auto method = o.kind == PipelineKind::EndToEnd ? EswMethod::DistanceBased : EswMethod::MutualInformation;
        b.selection = select_sensors(dataset, event_type, o.rmi_threshold, esw, method);
        const auto ids = b.selection.sensor_ids();
        b.stats = compute_normalization(dataset, ids, dataset.segment(Segment::Train));

        const auto range = guarded_train_range(dataset, esw);
        const auto instances = build_instances(dataset.log(event_type), range, o.sample_every_s);

        LabeledMatrix data;
        if (o.kind != PipelineKind::Statistical) {
            b.prototypes = build_prototypes(dataset, event_type, b.selection, b.stats, range, o.max_prototypes, o.seed);
            for (std::size_t s = 0; s < ids.size(); ++s)
                for (const auto& p : b.prototypes.prototypes) data.column_origin.push_back(p.anchor);
        }
        auto features = bundle_features(b, dataset, instances);
        data.x = std::move(features.values);
        for (const auto& inst : instances) {
            data.y.push_back(inst.label);
            data.anchors.push_back(inst.anchor);
        }

        auto sel = select_best(o.specs, data, o.cv_folds, o.seed, RankOptions{o.rank_std_penalty});
        b.model = std::move(sel.model);
        b.threshold = sel.threshold;
        b.validation = sel.summary;
        b.leaderboard = std::move(sel.leaderboard);
        for (auto& w : sel.warnings) out.warnings.push_back("event '" + event_type + "': " + w);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Untrainable) throw Error(ErrorKind::Untrainable, with_event(event_type, e));
        throw;
    }
    return out;
}

void check_compatible(const ModelBundle& b, const Dataset& dataset) {
    if (!dataset.find_log(b.event_type))
        throw Error(ErrorKind::Incompatible, "dataset has no event log for '" + b.event_type + "'");
    for (const auto& w : b.selection.windows)
        if (!dataset.find_stream(w.sensor_id))
            throw Error(ErrorKind::Incompatible, "dataset lacks sensor '" + w.sensor_id + "' used by the bundle");
}

bool has_coverage(const ModelBundle& b, const Dataset& dataset, Timestamp anchor) {
    for (const auto& w : b.selection.windows) {
        const Timestamp lo = anchor + seconds_to_ns(w.t_minus);
        const Timestamp hi = anchor + seconds_to_ns(w.t_plus);
        if (lo < dataset.span.begin || hi > dataset.span.end) return false;
        const auto* s = dataset.find_stream(w.sensor_id);
        if (!s || s->empty() || s->times.front() >= hi) return false;
    }
    return true;
}

EvaluationOutcome evaluate_event(const ModelBundle& b, const Dataset& dataset, Segment segment) {
    check_compatible(b, dataset);
    EvaluationOutcome out;
    out.event_type = b.event_type;
    out.classifier_id = b.model.spec.identifier();
    out.pipeline = b.pipeline;
    out.threshold = b.threshold;

    const auto all = build_instances(dataset.log(b.event_type), dataset.segment(segment), b.sample_every_s);
    std::vector<Instance> instances;
    for (const auto& inst : all) {
        if (has_coverage(b, dataset, inst.anchor)) instances.push_back(inst);
        else ++out.dropped;
    }
    if (out.dropped > 0)
        out.warnings.push_back("event '" + b.event_type + "': " + std::to_string(out.dropped) +
                               " instance(s) lack sensor coverage and were skipped");

    const auto features = bundle_features(b, dataset, instances);
    const auto scores = score_all(b.model, features.values);
    std::vector<double> s0, s1;
    for (std::size_t i = 0; i < instances.size(); ++i) (instances[i].label ? s1 : s0).push_back(scores[i]);
    out.n0 = s0.size();
    out.n1 = s1.size();
    if (s0.empty() || s1.empty()) {
        out.warnings.push_back("event '" + b.event_type + "': " + std::string(segment_name(segment)) +
                               " split lacks covered instances of one class; no metrics");
        return out;
    }
    out.sweep = eer_sweep(s0, s1);
    out.at_threshold = rates_at(s0, s1, b.threshold);
    out.complete = true;
    return out;
}

VerificationDecision verify_claim(const ModelBundle& b, const Dataset& dataset, Timestamp claim) {
    check_compatible(b, dataset);
    if (!has_coverage(b, dataset, claim)) throw Error(ErrorKind::Coverage, "insufficient evidence window");
    const Instance inst{b.event_type, claim, 1};
    const auto features = bundle_features(b, dataset, std::span<const Instance>(&inst, 1));
    VerificationDecision d;
    d.event_type = b.event_type;
    d.claim = claim;
    d.score = score(b.model, features.values.row(0));
    d.threshold = b.threshold;
    d.genuine = d.score >= b.threshold;
    return d;
}

}  // namespace spoofguard
