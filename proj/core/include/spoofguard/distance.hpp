#pragma once

#include <cstddef>
#include <span>

#include "spoofguard/common.hpp"

namespace spoofguard {

using Series = std::span<const double>;

/// Sakoe-Chiba corridor width.
///
/// The corridor follows the straight line from (0,0) to (n-1,m-1), indexed
/// along the longer series, so both end cells are always inside it. A cell
/// (i,j) is admissible when |i*(m-1)/(n-1) - j| <= radius; the test is done in
/// integer arithmetic.
class BandSpec {
public:
    enum class Kind { Unbounded, Radius, Fraction };

    static BandSpec unbounded() { return BandSpec(Kind::Unbounded, 0, 0.0); }
    static BandSpec radius(std::size_t r) { return BandSpec(Kind::Radius, r, 0.0); }
    /// Radius = ceil(fraction * longer length).
    static BandSpec fraction(double f);
    /// 10% of the longer series.
    static BandSpec default_band() { return fraction(0.1); }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::size_t fixed_radius() const { return radius_; }
    [[nodiscard]] double ratio() const { return fraction_; }

    /// Requested radius for series of lengths n and m.
    [[nodiscard]] std::size_t radius_for(std::size_t n, std::size_t m) const;

    bool operator==(const BandSpec&) const = default;

private:
    BandSpec(Kind k, std::size_t r, double f) : kind_(k), radius_(r), fraction_(f) {}
    Kind kind_;
    std::size_t radius_;
    double fraction_;
};

/// Lock-step distance sum_i sqrt((a_i - b_i)^2), i.e. the L1 sum of point gaps.
/// Throws Error(Invalid) on length mismatch.
double euclidean(Series a, Series b);

struct DtwResult {
    double distance = 0.0;
    std::size_t cells = 0;        // DP cells evaluated
    std::size_t radius_used = 0;  // effective radius after feasibility fallback
};

/// Smallest radius whose corridor connects (0,0) to (n-1,m-1).
/// 0 for equal lengths, at most 1 otherwise.
std::size_t min_feasible_radius(std::size_t n, std::size_t m);

/// DTW with ground cost |a_i - b_j| and symmetric steps {(1,0),(0,1),(1,1)}.
/// Two rolling rows; cells outside the corridor are never touched.
/// Throws Error(Invalid) when either series is empty.
DtwResult dtw_detailed(Series a, Series b, BandSpec band = BandSpec::unbounded());

inline double dtw(Series a, Series b, BandSpec band = BandSpec::unbounded()) {
    return dtw_detailed(a, b, band).distance;
}

/// Exhaustive minimum over all monotone, continuous warping paths.
/// Test oracle; lengths are limited to 10.
double dtw_bruteforce(Series a, Series b);

}  // namespace spoofguard
