#include "spoofguard/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "spoofguard/parallel.hpp"
#include "spoofguard/pipeline.hpp"
#include "spoofguard/synth.hpp"
#include "text_io.hpp"

namespace spoofguard::cli {

namespace fs = std::filesystem;

namespace {

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config:
        case ErrorKind::Data: return kConfig;
        case ErrorKind::Untrainable: return kUntrainable;
        case ErrorKind::Incompatible: return kIncompatible;
        case ErrorKind::Coverage: return kCoverage;
        case ErrorKind::Invalid: return kFailure;
    }
    return kFailure;
}

std::string env_name(const std::string& flag) {
    std::string s = "SPOOFGUARD_";
    for (char c : flag) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    return app->add_option("--" + name, target, help)->envname(env_name(name));
}

/// "unbounded" | "inf" | integer radius | percentage such as "10%".
BandSpec parse_band(const std::string& text) {
    if (text == "unbounded" || text == "inf") return BandSpec::unbounded();
    if (!text.empty() && text.back() == '%') {
        double pct = 0.0;
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size() - 1, pct);
        if (ec != std::errc{} || p != text.data() + text.size() - 1 || !(pct >= 0.0))
            throw Error(ErrorKind::Config, "bad --band '" + text + "'");
        return BandSpec::fraction(pct / 100.0);
    }
    std::size_t r = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), r);
    if (ec != std::errc{} || p != text.data() + text.size()) throw Error(ErrorKind::Config, "bad --band '" + text + "'");
    return BandSpec::radius(r);
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

constexpr const char* kReportHeader = "event,classifier_id,mean_EER,std_EER,mean_DR,std_DR,mean_FAR,std_FAR,rank_score\n";

/// Metrics in percent (two decimals), rank score as a fraction.
std::string report_row(const std::string& event, const std::string& id, const MetricSummary& m, double rank) {
    return event + "," + id + "," + pct(m.eer.mean) + "," + pct(m.eer.std) + "," + pct(m.dr.mean) + "," + pct(m.dr.std) +
           "," + pct(m.far.mean) + "," + pct(m.far.std) + "," + fixed4(rank) + "\n";
}

std::vector<fs::path> bundle_paths(const fs::path& p) {
    if (!fs::exists(p)) throw Error(ErrorKind::Incompatible, "bundle path " + p.string() + " does not exist");
    if (!fs::is_directory(p)) return {p};
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 12 && name.ends_with(".bundle.json")) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw Error(ErrorKind::Incompatible, "no *.bundle.json in " + p.string());
    return out;
}

// ---- synth -------------------------------------------------------------------

struct SynthArgs {
    std::string config;
    bool use_default = false;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    if (a.config.empty() == !a.use_default) throw Error(ErrorKind::Config, "synth needs exactly one of --config or --default");
    auto config = a.use_default ? default_scenario() : load_scenario(a.config);
    if (a.seed_set) config.seed = a.seed;
    const auto corpus = generate(config);
    write_synthetic(corpus, a.out);
    std::size_t events = 0;
    for (const auto& e : corpus.truth.events) events += e.true_times.size();
    out << "wrote " << a.out << ": " << corpus.dataset.streams.size() << " sensors, " << corpus.dataset.logs.size()
        << " event types, " << events << " events\n";
    return kOk;
}

// ---- train -------------------------------------------------------------------

struct TrainArgs {
    std::string data;
    std::string event = "all";
    std::int64_t sample_every = 100;
    double rmi_threshold = 0.25;
    std::string band = "10%";
    std::size_t cv_folds = 5;
    std::string grid = "full";
    std::string pipeline = "dtw";
    std::string out;
    std::uint64_t seed = 0;
    std::size_t max_prototypes = 0;
};

PipelineOptions pipeline_options(const TrainArgs& a) {
    PipelineOptions o;
    o.kind = parse_pipeline(a.pipeline);
    if (a.sample_every < 1) throw Error(ErrorKind::Config, "--sample-every must be >= 1");
    o.sample_every_s = a.sample_every;
    if (!(a.rmi_threshold >= 0.0 && a.rmi_threshold <= 1.0)) throw Error(ErrorKind::Config, "--rmi-threshold must lie in [0, 1]");
    o.rmi_threshold = a.rmi_threshold;
    o.band = parse_band(a.band);
    if (a.cv_folds < 2) throw Error(ErrorKind::Config, "--cv-folds must be >= 2");
    o.cv_folds = a.cv_folds;
    if (a.grid == "small") o.specs = classifier_grid(GridSize::Small);
    else if (a.grid == "full") o.specs = classifier_grid(GridSize::Full);
    else throw Error(ErrorKind::Config, "--grid must be small or full");
    o.seed = a.seed;
    o.max_prototypes = a.max_prototypes;
    return o;
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    const auto options = pipeline_options(a);
    const auto dataset = ingest_corpus(a.data);
    for (const auto& w : dataset.warnings) err << "warning: " << w << "\n";

    std::vector<std::string> events;
    if (a.event == "all") {
        events = dataset.event_types();
    } else {
        if (!dataset.find_log(a.event)) throw Error(ErrorKind::Config, "unknown event type '" + a.event + "'");
        events.push_back(a.event);
    }
    fs::create_directories(a.out);
    const auto fingerprint = options_fingerprint(options);

    std::size_t trained = 0;
    for (const auto& ev : events) {
        TrainOutcome result;
        try {
            result = train_event(dataset, ev, options);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Untrainable) throw;
            err << "skipping: " << e.what() << "\n";
            continue;
        }
        for (const auto& w : result.warnings) err << "warning: " << w << "\n";
        const fs::path path = fs::path(a.out) / (ev + ".bundle.json");
        if (fs::exists(path)) {
            try {
                if (auto w = fingerprint_mismatch(load_bundle(path), fingerprint)) err << "warning: replacing " << *w << "\n";
            } catch (const Error&) {
            }
        }
        save_bundle(result.bundle, path);

        std::string board = kReportHeader;
        for (const auto& e : result.bundle.leaderboard) board += report_row(ev, e.spec.identifier(), e.summary, e.score);
        write_text_file(fs::path(a.out) / (ev + ".leaderboard.csv"), board);

        const auto& v = result.bundle.validation;
        out << "pipeline=" << pipeline_name(options.kind) << " event=" << ev
            << " classifier=" << result.bundle.model.spec.identifier() << " sensors=" << result.bundle.selection.windows.size()
            << " prototypes=" << result.bundle.prototypes.size() << "\n"
            << "  validation (" << v.splits_used << " CV splits): EER " << pct(v.eer.mean) << "% +- " << pct(v.eer.std)
            << "  DR " << pct(v.dr.mean) << "%  FAR " << pct(v.far.mean) << "%  threshold " << format_double(result.bundle.threshold)
            << "\n";
        ++trained;
    }
    if (trained == 0) {
        err << "error: no requested event could be trained\n";
        return kUntrainable;
    }
    return kOk;
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string bundle;
    std::string data;
    std::string split = "test";
    std::string report;
};

Segment parse_segment(const std::string& s) {
    if (s == "test") return Segment::Test;
    if (s == "train") return Segment::Train;
    if (s == "dev") return Segment::Dev;
    throw Error(ErrorKind::Config, "--split must be test, train or dev");
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    const auto segment = parse_segment(a.split);
    const auto paths = bundle_paths(a.bundle);
    std::vector<ModelBundle> bundles;
    for (const auto& p : paths) bundles.push_back(load_bundle(p));
    const auto dataset = ingest_corpus(a.data);
    for (const auto& w : dataset.warnings) err << "warning: " << w << "\n";

    std::string report = kReportHeader;
    for (const auto& b : bundles) {
        const auto r = evaluate_event(b, dataset, segment);
        for (const auto& w : r.warnings) err << "warning: " << w << "\n";
        const auto& v = b.validation;
        out << "pipeline=" << pipeline_name(b.pipeline) << " event=" << b.event_type << " classifier=" << r.classifier_id << "\n"
            << "  validation (CV mean +- std): EER " << pct(v.eer.mean) << "% +- " << pct(v.eer.std) << "  DR "
            << pct(v.dr.mean) << "% +- " << pct(v.dr.std) << "  FAR " << pct(v.far.mean) << "% +- " << pct(v.far.std)
            << "%\n";
        if (!r.complete) {
            out << "  " << a.split << ": no metrics (insufficient coverage)\n";
            continue;
        }
        out << "  " << a.split << " (n0=" << r.n0 << ", n1=" << r.n1 << "): EER " << pct(r.sweep.eer) << "%  at threshold "
            << format_double(r.threshold) << ": DR " << pct(r.at_threshold.dr) << "%  FAR " << pct(r.at_threshold.far)
            << "%\n";
        MetricSummary m;
        m.eer.mean = r.sweep.eer;
        m.dr.mean = r.at_threshold.dr;
        m.far.mean = r.at_threshold.far;
        m.splits_used = 1;
        report += report_row(b.event_type, r.classifier_id, m, rank_score(m));
    }
    if (!a.report.empty()) write_text_file(a.report, report);
    return kOk;
}

// ---- verify ------------------------------------------------------------------

struct VerifyArgs {
    std::string bundle;
    std::string data;
    std::string claims;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    std::map<std::string, ModelBundle> bundles;
    for (const auto& p : bundle_paths(a.bundle)) {
        auto b = load_bundle(p);
        auto key = b.event_type;
        bundles.emplace(std::move(key), std::move(b));
    }
    const auto dataset = ingest_corpus(a.data);
    for (const auto& b : bundles) check_compatible(b.second, dataset);

    std::ifstream in(a.claims, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read claims " + a.claims);
    std::string line;
    std::size_t lineno = 0;
    int status = kOk;
    out << "event_type,timestamp_ns,score,threshold,verdict\n";
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != "event_type,timestamp_ns")
                throw Error(ErrorKind::Config, a.claims + ":1: expected header 'event_type,timestamp_ns'");
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        Timestamp t = 0;
        const char* first = line.data() + (comma == std::string::npos ? line.size() : comma + 1);
        const char* last = line.data() + line.size();
        const auto [p, ec] = std::from_chars(first, last, t);
        if (comma == std::string::npos || ec != std::errc{} || p != last)
            throw Error(ErrorKind::Config, a.claims + ":" + std::to_string(lineno) + ": malformed claim row");
        const std::string event = line.substr(0, comma);
        const auto it = bundles.find(event);
        if (it == bundles.end()) {
            err << "error: " << a.claims << ":" << lineno << ": no bundle for event '" << event << "'\n";
            status = kIncompatible;
            continue;
        }
        try {
            const auto d = verify_claim(it->second, dataset, t);
            out << event << "," << t << "," << format_double(d.score) << "," << format_double(d.threshold) << ","
                << (d.genuine ? "genuine" : "spoofed") << "\n";
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Coverage) throw;
            out << event << "," << t << ",," << format_double(it->second.threshold) << ",insufficient_evidence\n";
            err << "warning: " << a.claims << ":" << lineno << ": " << e.what() << "\n";
            if (status == kOk) status = kCoverage;
        }
    }
    return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Verifies claimed IoT events against sensor evidence", "spoofguard"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    flag(&app, "threads", threads, "Worker threads (0: all cores)");

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    flag(synth, "config", sa.config, "Scenario JSON");
    synth->add_flag("--default", sa.use_default, "Use the built-in scenario")->envname(env_name("default"));
    flag(synth, "out", sa.out, "Output directory")->required();
    flag(synth, "seed", sa.seed, "Override the scenario seed");

    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "Learn windows, select a classifier, write bundles");
    flag(train_cmd, "data", ta.data, "Corpus directory")->required();
    flag(train_cmd, "event", ta.event, "Event type or 'all'");
    flag(train_cmd, "sample-every", ta.sample_every, "0-event grid spacing in seconds");
    flag(train_cmd, "rmi-threshold", ta.rmi_threshold, "Sensor selection threshold in [0, 1]");
    flag(train_cmd, "band", ta.band, "DTW band: radius, percentage of the longer series, or 'unbounded'");
    flag(train_cmd, "cv-folds", ta.cv_folds, "Rolling cross-validation folds");
    flag(train_cmd, "grid", ta.grid, "Classifier grid: small or full");
    flag(train_cmd, "pipeline", ta.pipeline, "dtw, statistical or e2e");
    flag(train_cmd, "out", ta.out, "Bundle directory")->required();
    flag(train_cmd, "seed", ta.seed, "Seed for every random choice");
    flag(train_cmd, "max-prototypes", ta.max_prototypes, "Prototype cap (0: all training 1-events)");

    EvaluateArgs ea;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a split with trained bundles");
    flag(eval_cmd, "bundle", ea.bundle, "Bundle file or directory")->required();
    flag(eval_cmd, "data", ea.data, "Corpus directory")->required();
    flag(eval_cmd, "split", ea.split, "test, train or dev");
    flag(eval_cmd, "report", ea.report, "CSV report path");

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "Verify claimed events");
    flag(verify_cmd, "bundle", va.bundle, "Bundle file or directory")->required();
    flag(verify_cmd, "data", va.data, "Corpus directory")->required();
    flag(verify_cmd, "claims", va.claims, "CSV with header event_type,timestamp_ns")->required();

    std::vector<std::string> argv_store{"spoofguard"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfig;
    }
    sa.seed_set = synth->count("--seed") > 0 || std::getenv(env_name("seed").c_str()) != nullptr;

    try {
        set_thread_count(threads);
        if (synth->parsed()) return cmd_synth(sa, out);
        if (train_cmd->parsed()) return cmd_train(ta, out, err);
        if (eval_cmd->parsed()) return cmd_evaluate(ea, out, err);
        if (verify_cmd->parsed()) return cmd_verify(va, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace spoofguard::cli
