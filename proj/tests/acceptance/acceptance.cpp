// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--only 1,5,7] [--verbose]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spoofguard/cli.hpp"
#include "spoofguard/data.hpp"
#include "spoofguard/distance.hpp"
#include "spoofguard/esw.hpp"
#include "spoofguard/evaluation.hpp"
#include "spoofguard/pipeline.hpp"
#include "spoofguard/rng.hpp"
#include "spoofguard/synth.hpp"

namespace sg = spoofguard;
namespace fs = std::filesystem;

namespace {

bool verbose = false;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<double> random_series(sg::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-10.0, 10.0);
    return v;
}

// ---- 1 ----------------------------------------------------------------------

Outcome dtw_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    sg::Rng rng(20240601);
    std::size_t mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_series(rng, 1 + rng.below(8));
        const auto b = random_series(rng, 1 + rng.below(8));
        if (sg::dtw(a, b, sg::BandSpec::unbounded()) != sg::dtw_bruteforce(a, b)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 10.0,
            "1000 pairs, " + std::to_string(mismatches) + " mismatches, " + fmt("%.2f s", secs)};
}

// ---- 2 ----------------------------------------------------------------------

Outcome dtw_properties() {
    sg::Rng rng(77);
    std::size_t violations = 0;
    const int cases = 10000;
    for (int i = 0; i < cases; ++i) {
        const auto a = random_series(rng, 1 + rng.below(24));
        const auto b = random_series(rng, 1 + rng.below(24));
        const std::size_t r1 = rng.below(12), r2 = r1 + rng.below(12);
        const double ab = sg::dtw(a, b), ba = sg::dtw(b, a);
        if (sg::dtw(a, a, sg::BandSpec::radius(r1)) != 0.0) ++violations;
        if (ab != ba || ab < 0.0) ++violations;
        if (sg::dtw(a, b, sg::BandSpec::radius(r1)) < sg::dtw(a, b, sg::BandSpec::radius(r2))) ++violations;
        if (sg::dtw(a, b, sg::BandSpec::radius(std::max(a.size(), b.size()))) != ab) ++violations;
        const auto c = random_series(rng, a.size());
        if (sg::dtw(a, c) > sg::euclidean(a, c)) ++violations;
    }
    return {violations == 0, std::to_string(cases) + " cases, " + std::to_string(violations) + " violations"};
}

// ---- 3 ----------------------------------------------------------------------

Outcome table_counts() {
    sg::EventLog log;
    log.event_type = "quiet";
    const sg::TimeRange grid{0, sg::seconds_to_ns(1'123'200)};
    const std::size_t expected[] = {1'123'200, 11'232, 2'247};
    const std::int64_t ks[] = {1, 100, 500};
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        const auto n = sg::build_instances(log, grid, ks[i]).size();
        ok = ok && n == expected[i];
        detail += (i ? " / " : "") + std::to_string(n);
    }
    return {ok, detail + " at k = 1 / 100 / 500"};
}

// ---- 4 ----------------------------------------------------------------------

Outcome eer_machinery() {
    const std::vector<double> z{0.1, 0.2}, o{0.8, 0.9};
    const auto perfect = sg::eer_sweep(z, o);
    const std::vector<double> z2{0.6}, o2{0.4};
    const auto inverted = sg::eer_sweep(z2, o2);
    sg::Rng rng(5);
    std::vector<double> u0(10000), u1(10000);
    for (auto& v : u0) v = rng.uniform();
    for (auto& v : u1) v = rng.uniform();
    const auto random = sg::eer_sweep(u0, u1);
    const bool ok = perfect.eer == 0.0 && perfect.dr == 1.0 && perfect.far == 0.0 && inverted.eer == 1.0 &&
                    std::abs(random.eer - 0.5) <= 0.05;
    return {ok, "perfect EER " + fmt("%.3f", perfect.eer) + " DR " + fmt("%.3f", perfect.dr) + " FAR " +
                    fmt("%.3f", perfect.far) + "; inverted EER " + fmt("%.3f", inverted.eer) + "; uniform EER " +
                    fmt("%.4f", random.eer)};
}

// ---- 5 ----------------------------------------------------------------------

Outcome esw_search() {
    const auto grid_size = sg::window_grid(-30, 30).size();
    std::size_t hits = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto config = sg::default_scenario();
        config.seed = seed;
        const auto corpus = sg::generate(config);
        sg::EswOptions options;
        for (const auto& e : config.events) {
            for (const auto& sensor : e.sensors) {
                const auto w = sg::search_esw(corpus.dataset, e.type, sensor, options);
                const double iou = sg::window_iou(w.window(), {e.window_a_s, e.window_b_s});
                hits += iou >= 0.5;
                ++total;
                if (verbose)
                    std::cout << "    seed " << seed << " " << e.type << "/" << sensor << " [" << w.t_minus << ","
                              << w.t_plus << "] rmi " << fmt("%.3f", w.rmi) << " IoU " << fmt("%.2f", iou) << "\n";
            }
        }
    }
    const double share = static_cast<double>(hits) / static_cast<double>(total);
    return {grid_size == 1830 && share >= 0.9, "grid " + std::to_string(grid_size) + " windows; IoU >= 0.5 in " +
                                                    std::to_string(hits) + "/" + std::to_string(total) + " (" +
                                                    fmt("%.1f%%", 100.0 * share) + ")"};
}

// ---- shared pipeline runner -------------------------------------------------

struct EventResult {
    std::string event;
    double test_eer = 1.0;
};

std::vector<EventResult> run_pipeline(const sg::Dataset& dataset, const sg::PipelineOptions& options) {
    std::vector<EventResult> out;
    for (const auto& ev : dataset.event_types()) {
        EventResult r{ev, 1.0};
        try {
            const auto trained = sg::train_event(dataset, ev, options);
            const auto eval = sg::evaluate_event(trained.bundle, dataset, sg::Segment::Test);
            if (eval.complete) r.test_eer = eval.sweep.eer;
        } catch (const sg::Error& e) {
            if (verbose) std::cout << "    " << e.what() << "\n";
        }
        out.push_back(r);
    }
    return out;
}

double mean_eer(const std::vector<EventResult>& r) {
    double s = 0.0;
    for (const auto& e : r) s += e.test_eer;
    return s / static_cast<double>(r.size());
}

std::string eer_list(const std::vector<EventResult>& r) {
    std::string s;
    for (const auto& e : r) s += (s.empty() ? "" : ", ") + e.event + " " + fmt("%.2f%%", 100.0 * e.test_eer);
    return s;
}

// ---- 6 ----------------------------------------------------------------------

Outcome desk_scale_run() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus = sg::generate(sg::default_scenario());
    sg::PipelineOptions options;
    options.sample_every_s = 100;
    const auto results = run_pipeline(corpus.dataset, options);
    const double secs = seconds_since(t0);
    bool ok = secs <= 300.0;
    for (const auto& r : results) ok = ok && r.test_eer <= 0.05;
    return {ok, "test EER " + eer_list(results) + "; " + fmt("%.1f s", secs)};
}

// ---- 7 ----------------------------------------------------------------------

Outcome thesis_reproduction() {
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto config = sg::default_scenario();
        config.seed = seed;
        config.warp_factor = 0.2;
        const auto corpus = sg::generate(config);
        sg::PipelineOptions options;
        options.sample_every_s = 500;
        options.seed = seed;
        const auto dtw = run_pipeline(corpus.dataset, options);
        options.kind = sg::PipelineKind::Statistical;
        const auto stat = run_pipeline(corpus.dataset, options);
        const double d = mean_eer(dtw), s = mean_eer(stat);
        wins += d < s;
        if (verbose)
            std::cout << "    seed " << seed << " dtw [" << eer_list(dtw) << "] statistical [" << eer_list(stat) << "]\n";
    }
    return {wins >= 7, "DTW mean test EER strictly lower in " + std::to_string(wins) + "/10 runs"};
}

// ---- 8 ----------------------------------------------------------------------

Outcome downsampling() {
    const auto corpus = sg::generate(sg::default_scenario());
    sg::PipelineOptions options;
    options.specs = sg::classifier_grid(sg::GridSize::Small);
    options.sample_every_s = 100;
    const auto coarse = run_pipeline(corpus.dataset, options);
    options.sample_every_s = 10;
    const auto fine = run_pipeline(corpus.dataset, options);
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const double gap = std::abs(coarse[i].test_eer - fine[i].test_eer);
        worst = std::max(worst, gap);
        ok = ok && gap <= 0.02;
    }
    return {ok, "k=100 [" + eer_list(coarse) + "] vs k=10 [" + eer_list(fine) + "]; max gap " +
                    fmt("%.2f pp", 100.0 * worst)};
}

// ---- 9 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = sg::cli::run(args, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "spoofguard_acceptance_determinism";
    fs::remove_all(root);
    bool ok = cli({"synth", "--default", "--out", (root / "data").string(), "--seed", "3"}) == 0;
    for (const char* threads : {"1", "4"}) {
        const auto out = root / (std::string("run") + threads);
        ok = ok && cli({"--threads", threads, "train", "--data", (root / "data").string(), "--grid", "small", "--seed", "11",
                        "--out", (out / "bundles").string()}) == 0;
        ok = ok && cli({"--threads", threads, "evaluate", "--bundle", (out / "bundles").string(), "--data",
                        (root / "data").string(), "--report", (out / "report.csv").string()}) == 0;
    }
    std::size_t compared = 0, differing = 0;
    for (const auto& e : fs::directory_iterator(root / "run1" / "bundles")) {
        ++compared;
        differing += slurp(e.path()) != slurp(root / "run4" / "bundles" / e.path().filename());
    }
    ++compared;
    differing += slurp(root / "run1" / "report.csv") != slurp(root / "run4" / "report.csv");
    ok = ok && compared > 1 && differing == 0;
    fs::remove_all(root);
    return {ok, std::to_string(compared) + " files compared across --threads 1 and 4, " + std::to_string(differing) +
                    " differ"};
}

// ---- 10 ---------------------------------------------------------------------

Outcome end_to_end_variant() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus = sg::generate(sg::default_scenario());
    sg::PipelineOptions options;
    options.kind = sg::PipelineKind::EndToEnd;
    const auto results = run_pipeline(corpus.dataset, options);
    int good = 0;
    for (const auto& r : results) good += r.test_eer <= 0.10;
    return {good >= 2, "test EER " + eer_list(results) + "; " + std::to_string(good) + "/3 within 10%; " +
                           fmt("%.1f s", seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--verbose") {
            verbose = true;
        } else if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string t; std::getline(ss, t, ',');) only.insert(std::stoi(t));
        } else {
            std::cerr << "usage: acceptance [--only 1,2,...] [--verbose]\n";
            return 2;
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"DTW oracle equivalence", dtw_oracle},
        {"DTW property suite", dtw_properties},
        {"sampling counts 1123200 / 11232 / 2247", table_counts},
        {"EER machinery", eer_machinery},
        {"ESW search grid and window recovery", esw_search},
        {"desk-scale DTW run, test EER <= 5%", desk_scale_run},
        {"DTW beats statistical features (warp 0.2, k=500)", thesis_reproduction},
        {"downsampling robustness k=100 vs k=10", downsampling},
        {"determinism across thread counts", determinism},
        {"end-to-end distance-based variant", end_to_end_variant},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << criteria[i].first << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
