#include "spoofguard/distance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spoofguard/common.hpp"

namespace spoofguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Corridor {
    std::int64_t n, m, radius;

    // Column range admissible in row i, clipped to [0, m-1]. Empty when lo > hi.
    [[nodiscard]] std::pair<std::int64_t, std::int64_t> row(std::int64_t i) const {
        if (n == 1) return {0, m - 1};
        const std::int64_t den = n - 1;
        const std::int64_t num = i * (m - 1);
        const std::int64_t span = radius * den;
        // ceil((num - span) / den), floor((num + span) / den) for non-negative den
        auto floor_div = [](std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
        const std::int64_t lo = -floor_div(-(num - span), den);
        const std::int64_t hi = floor_div(num + span, den);
        return {std::max<std::int64_t>(lo, 0), std::min<std::int64_t>(hi, m - 1)};
    }

    [[nodiscard]] bool connected() const {
        auto [plo, phi] = row(0);
        if (plo != 0 || plo > phi) return false;
        for (std::int64_t i = 1; i < n; ++i) {
            auto [lo, hi] = row(i);
            if (lo > hi || lo > phi + 1 || hi < plo) return false;
            plo = lo;
            phi = hi;
        }
        return phi == m - 1;
    }
};

}  // namespace

BandSpec BandSpec::fraction(double f) {
    if (!(f >= 0.0)) throw Error(ErrorKind::Invalid, "band fraction must be non-negative");
    return BandSpec(Kind::Fraction, 0, f);
}

std::size_t BandSpec::radius_for(std::size_t n, std::size_t m) const {
    const std::size_t longer = std::max(n, m);
    switch (kind_) {
        case Kind::Unbounded: return longer;
        case Kind::Radius: return std::min(radius_, longer);
        case Kind::Fraction: return std::min(longer, static_cast<std::size_t>(std::ceil(fraction_ * static_cast<double>(longer))));
    }
    return longer;
}

double euclidean(Series a, Series b) {
    if (a.size() != b.size()) throw Error(ErrorKind::Invalid, "euclidean requires equal lengths");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

std::size_t min_feasible_radius(std::size_t n, std::size_t m) {
    const auto longer = static_cast<std::int64_t>(std::max(n, m));
    const auto shorter = static_cast<std::int64_t>(std::min(n, m));
    for (std::int64_t r = 0; r <= longer; ++r)
        if (Corridor{longer, shorter, r}.connected()) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(longer);
}

DtwResult dtw_detailed(Series a, Series b, BandSpec band) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::Invalid, "dtw requires non-empty series");
    // Rows run along the longer series so the corridor is never thinner than one column.
    const Series rows = a.size() >= b.size() ? a : b;
    const Series cols = a.size() >= b.size() ? b : a;
    const auto n = static_cast<std::int64_t>(rows.size());
    const auto m = static_cast<std::int64_t>(cols.size());

    std::int64_t radius = static_cast<std::int64_t>(band.radius_for(rows.size(), cols.size()));
    if (!Corridor{n, m, radius}.connected()) radius = static_cast<std::int64_t>(min_feasible_radius(rows.size(), cols.size()));
    const Corridor corridor{n, m, radius};

    // Scratch rows; only cells inside the previous row's corridor are ever read.
    thread_local std::vector<double> prev, curr;
    if (prev.size() < static_cast<std::size_t>(m)) {
        prev.resize(static_cast<std::size_t>(m));
        curr.resize(static_cast<std::size_t>(m));
    }
    std::size_t cells = 0;

    auto [plo, phi] = corridor.row(0);
    {
        const double x = rows[0];
        double acc = 0.0;
        for (std::int64_t j = plo; j <= phi; ++j) {
            const double c = std::abs(x - cols[static_cast<std::size_t>(j)]);
            acc = (j == plo) ? c : acc + c;
            prev[static_cast<std::size_t>(j)] = acc;
        }
        cells += static_cast<std::size_t>(phi - plo + 1);
    }

    for (std::int64_t i = 1; i < n; ++i) {
        const auto [lo, hi] = corridor.row(i);
        const double x = rows[static_cast<std::size_t>(i)];
        double left = kInf;
        for (std::int64_t j = lo; j <= hi; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double up = (j >= plo && j <= phi) ? prev[ju] : kInf;
            const double diag = (j - 1 >= plo && j - 1 <= phi) ? prev[ju - 1] : kInf;
            const double best = std::min(std::min(up, left), diag);
            left = std::abs(x - cols[ju]) + best;
            curr[ju] = left;
        }
        cells += static_cast<std::size_t>(hi - lo + 1);
        std::swap(prev, curr);
        plo = lo;
        phi = hi;
    }

    return {prev[static_cast<std::size_t>(m - 1)], cells, static_cast<std::size_t>(radius)};
}

namespace {

void enumerate_paths(Series a, Series b, std::size_t i, std::size_t j, double acc, double& best) {
    acc += std::abs(a[i] - b[j]);
    if (i + 1 == a.size() && j + 1 == b.size()) {
        best = std::min(best, acc);
        return;
    }
    if (i + 1 < a.size()) enumerate_paths(a, b, i + 1, j, acc, best);
    if (j + 1 < b.size()) enumerate_paths(a, b, i, j + 1, acc, best);
    if (i + 1 < a.size() && j + 1 < b.size()) enumerate_paths(a, b, i + 1, j + 1, acc, best);
}

}  // namespace

double dtw_bruteforce(Series a, Series b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::Invalid, "dtw requires non-empty series");
    if (a.size() > 10 || b.size() > 10) throw Error(ErrorKind::Invalid, "dtw_bruteforce is limited to length 10");
    double best = kInf;
    // First cell: acc starts at 0 and 0 + c == c exactly, matching the DP's D(0,0) = c.
    enumerate_paths(a, b, 0, 0, 0.0, best);
    return best;
}

}  // namespace spoofguard
