#include <doctest.h>

#include "fixtures.hpp"
#include "spoofguard/bundle.hpp"

using namespace spoofguard;

namespace {

std::vector<double> test_scores(const ModelBundle& b) {
    const auto& d = fixtures::small_corpus().dataset;
    std::vector<double> out;
    for (auto t : fixtures::small_corpus().truth.event("door").true_times)
        if (d.segment(Segment::Test).contains(t)) out.push_back(verify_claim(b, d, t).score);
    for (auto t : fixtures::small_corpus().truth.event("door").spoofed_claims) out.push_back(verify_claim(b, d, t).score);
    return out;
}

}  // namespace

TEST_SUITE("bundle") {

TEST_CASE("save and load round-trip every pipeline") {
    for (auto kind : {PipelineKind::Dtw, PipelineKind::Statistical}) {
        const auto& b = fixtures::small_bundle(kind);
        const auto path = fixtures::scratch("bundle_rt") / "door.bundle.json";
        save_bundle(b, path);
        CHECK_FALSE(std::filesystem::exists(path.string() + ".bin"));
        const auto loaded = load_bundle(path);
        CHECK(loaded.event_type == b.event_type);
        CHECK(loaded.pipeline == b.pipeline);
        CHECK(loaded.selection == b.selection);
        CHECK(loaded.prototypes == b.prototypes);
        CHECK(loaded.stats == b.stats);
        CHECK(loaded.threshold == b.threshold);
        CHECK(loaded.validation == b.validation);
        CHECK(loaded.fingerprint == b.fingerprint);
        CHECK(loaded.leaderboard.size() == b.leaderboard.size());
        CHECK(test_scores(loaded) == test_scores(b));
        const auto again = path.parent_path() / "again.bundle.json";
        save_bundle(loaded, again);
        CHECK(fixtures::slurp(again) == fixtures::slurp(path));
    }
}

TEST_CASE("large arrays move to a binary sidecar") {
    const auto& b = fixtures::small_bundle(PipelineKind::Dtw);
    const auto dir = fixtures::scratch("bundle_sidecar");
    const auto path = dir / "door.bundle.json";
    save_bundle(b, path, BundleWriteOptions{0});
    CHECK(std::filesystem::exists(path.string() + ".bin"));
    const auto loaded = load_bundle(path);
    CHECK(loaded.prototypes == b.prototypes);
    CHECK(test_scores(loaded) == test_scores(b));
    std::filesystem::remove(path.string() + ".bin");
    CHECK_THROWS_AS(load_bundle(path), Error);
}

TEST_CASE("malformed and foreign bundles are incompatible") {
    const auto dir = fixtures::scratch("bundle_bad");
    std::ofstream(dir / "junk.json") << "{";
    std::ofstream(dir / "future.json") << R"({"schema_version": 99})";
    for (const auto* name : {"junk.json", "future.json", "missing.json"}) {
        try {
            load_bundle(dir / name);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Incompatible);
        }
    }
}

TEST_CASE("fingerprint mismatch produces a warning") {
    const auto& b = fixtures::small_bundle(PipelineKind::Dtw);
    CHECK_FALSE(fingerprint_mismatch(b, b.fingerprint).has_value());
    CHECK(fingerprint_mismatch(b, "0000000000000000").has_value());
}

}
