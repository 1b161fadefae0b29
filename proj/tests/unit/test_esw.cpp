#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "spoofguard/esw.hpp"
#include "spoofguard/rng.hpp"

using namespace spoofguard;

namespace {

EswOptions dev_options() {
    EswOptions o;
    o.sample_every_s = 100;
    return o;
}

}  // namespace

TEST_SUITE("esw") {

TEST_CASE("window grid has 1830 candidates in order") {
    const auto grid = window_grid(-30, 30);
    CHECK(grid.size() == 1830);
    CHECK(grid.front() == WindowCandidate{-30, -29});
    CHECK(grid.back() == WindowCandidate{29, 30});
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const bool ordered = grid[i - 1].t_minus < grid[i].t_minus ||
                             (grid[i - 1].t_minus == grid[i].t_minus && grid[i - 1].t_plus < grid[i].t_plus);
        REQUIRE(ordered);
    }
}

TEST_CASE("window statistic") {
    CHECK(window_statistic(std::vector<double>{5, 5, 5, 5}) == 0.0);
    CHECK(window_statistic(std::vector<double>{0, 1, 0, 1}) == 1.0);
    CHECK(window_statistic(std::vector<double>{}) == 0.0);
    CHECK(window_statistic(std::vector<double>{3}) == 0.0);
}

TEST_CASE("rmi extremes") {
    std::vector<std::uint8_t> y;
    std::vector<double> s, constant;
    for (int i = 0; i < 200; ++i) {
        y.push_back(i % 4 == 0);
        s.push_back(y.back());
        constant.push_back(3.0);
    }
    CHECK(rmi(y, s) == doctest::Approx(1.0));
    CHECK(rmi(y, constant) == doctest::Approx(0.0));
    CHECK_THROWS_AS(rmi(std::vector<std::uint8_t>{1, 1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("rmi of independent noise is near zero") {
    Rng rng(21);
    std::vector<std::uint8_t> y(10'000);
    std::vector<double> s(10'000);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = i % 2;
        s[i] = rng.normal();
    }
    CHECK(rmi(y, s) <= 0.02);
}

TEST_CASE("rmi depends on ranks only") {
    Rng rng(22);
    std::vector<std::uint8_t> y(500);
    std::vector<double> s(500), t(500);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = rng.uniform() < 0.3;
        s[i] = rng.normal() + y[i];
        t[i] = std::exp(3.0 * s[i]) + 7.0;
    }
    CHECK(rmi(y, s) == rmi(y, t));
}

TEST_CASE("tie-break prefers shorter, then closer to the anchor, then earlier") {
    const std::vector<WindowCandidate> grid{{-5, 5}, {-3, 1}, {1, 5}, {-1, 3}, {-4, 0}};
    CHECK(best_window_index(grid, std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5}) == 3);
    CHECK(best_window_index(grid, std::vector<double>{0.5, 0.5, 0.5, 0.4, 0.5}) == 2);
    const std::vector<WindowCandidate> near_far{{-3, -1}, {1, 3}};
    CHECK(best_window_index(near_far, std::vector<double>{0.2, 0.2}) == 1);
    const std::vector<WindowCandidate> mirrored{{2, 4}, {-2, 0}};
    CHECK(best_window_index(mirrored, std::vector<double>{0.2, 0.2}) == 1);
    CHECK(best_window_index(grid, std::vector<double>{0.9, 0.5, 0.5, 0.5, 0.5}) == 0);
}

TEST_CASE("window iou") {
    CHECK(window_iou({0, 5}, {0, 5}) == 1.0);
    CHECK(window_iou({0, 2}, {2, 4}) == 0.0);
    CHECK(window_iou({0, 4}, {2, 6}) == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("search recovers the planted window and ranks noise lower") {
    const auto& corpus = fixtures::small_corpus();
    const auto& truth = corpus.truth.event("door");
    const auto accel = search_esw(corpus.dataset, "door", "accel", dev_options());
    const auto contact = search_esw(corpus.dataset, "door", "contact", dev_options());
    const auto noise = search_esw(corpus.dataset, "door", "humidity", dev_options());
    const WindowCandidate planted{truth.window_a_s, truth.window_b_s};
    CHECK(window_iou(accel.window(), planted) >= 0.5);
    CHECK(window_iou(contact.window(), planted) >= 0.5);
    CHECK(noise.rmi < accel.rmi);
    CHECK(noise.rmi < contact.rmi);
    CHECK(accel.rmi <= 1.0);
    CHECK(noise.rmi >= 0.0);
    CHECK(search_esw(corpus.dataset, "door", "accel", dev_options()) == accel);
}

TEST_CASE("sensor selection thresholds") {
    const auto& d = fixtures::small_corpus().dataset;
    CHECK(select_sensors(d, "door", 0.0, dev_options()).windows.size() == 3);
    const auto sel = select_sensors(d, "door", 0.25, dev_options());
    auto ids = sel.sensor_ids();
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<std::string>{"accel", "contact"});
    for (std::size_t i = 1; i < sel.windows.size(); ++i) CHECK(sel.windows[i - 1].rmi >= sel.windows[i].rmi);
    try {
        select_sensors(d, "door", 1.0, dev_options());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Untrainable);
    }
}

TEST_CASE("default scenario keeps exactly the responders of each event") {
    const auto& corpus = fixtures::default_corpus();
    std::set<std::string> kept;
    for (const auto& e : corpus.truth.events) {
        auto ids = select_sensors(corpus.dataset, e.event_type, 0.2, dev_options()).sensor_ids();
        std::sort(ids.begin(), ids.end());
        auto want = e.sensors;
        std::sort(want.begin(), want.end());
        CHECK(ids == want);
        kept.insert(ids.begin(), ids.end());
    }
    CHECK(kept.size() == 6);
}

TEST_CASE("distance-based search separates responders from noise") {
    const auto& d = fixtures::small_corpus().dataset;
    auto o = dev_options();
    o.max_pairs = 60;
    const auto accel = search_esw_distance_based(d, "door", "accel", o);
    const auto noise = search_esw_distance_based(d, "door", "humidity", o);
    CHECK(accel.rmi >= 0.0);
    CHECK(accel.rmi < 1.0);
    CHECK(noise.rmi < accel.rmi);
    CHECK(accel.t_minus >= -30);
    CHECK(accel.t_plus <= 30);
    CHECK(search_esw_distance_based(d, "door", "accel", o) == accel);
}

TEST_CASE("search without dev 1-events is untrainable") {
    Dataset d = fixtures::small_corpus().dataset;
    for (auto& r : d.logs[0].records)
        if (d.segment(Segment::Dev).contains(r.time)) r.label = 0;
    CHECK_THROWS_AS(search_esw(d, "door", "accel", dev_options()), Error);
}

}
