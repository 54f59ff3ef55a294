#pragma once

// Pairwise correlation coefficients (Pearson, Spearman, Theil's U) and the
// special functions behind their significance values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "corrlens/error.hpp"

namespace corrlens {

enum class Metric { pearson, spearman, theils_u };

inline constexpr Metric kAllMetrics[] = {Metric::pearson, Metric::spearman, Metric::theils_u};

inline std::string_view to_string(Metric m) noexcept {
    switch (m) {
        case Metric::pearson: return "pearson";
        case Metric::spearman: return "spearman";
        case Metric::theils_u: return "theils_u";
    }
    return "?";
}

inline Metric parse_metric(std::string_view s) {
    for (Metric m : kAllMetrics)
        if (to_string(m) == s) return m;
    throw ArgumentError("unknown correlation metric: " + std::string(s));
}

// Outcome of one metric on one column pair. An absent coefficient means the
// metric is undefined for the data (constant column, too few rows).
struct CorrelationResult {
    Metric metric = Metric::pearson;
    std::optional<double> coefficient;
    std::optional<double> p_value;
    std::size_t n = 0;

    bool defined() const noexcept { return coefficient.has_value(); }

    friend bool operator==(const CorrelationResult&, const CorrelationResult&) = default;
};

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) return h;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw ArgumentError("regularized_incomplete_beta: a and b must be positive and finite");
    if (!(x >= 0.0 && x <= 1.0))
        throw ArgumentError("regularized_incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The fraction converges fast below the mean; use the reflection above it.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Two-sided tail probability of Student's t with `df` degrees of freedom.
inline double t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw ArgumentError("t_two_sided_p: df must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const double p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Row selection and ranks

// Keeps the rows where both values are present, order preserved.
template <typename T, typename U>
std::pair<std::vector<T>, std::vector<U>> pairwise_complete(std::span<const std::optional<T>> xs,
                                                            std::span<const std::optional<U>> ys) {
    if (xs.size() != ys.size()) throw ArgumentError("pairwise_complete: length mismatch");
    std::pair<std::vector<T>, std::vector<U>> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] && ys[i]) {
            out.first.push_back(*xs[i]);
            out.second.push_back(*ys[i]);
        }
    }
    return out;
}

template <typename T, typename U>
std::pair<std::vector<T>, std::vector<U>> pairwise_complete(const std::vector<std::optional<T>>& xs,
                                                            const std::vector<std::optional<U>>& ys) {
    return pairwise_complete(std::span<const std::optional<T>>(xs),
                             std::span<const std::optional<U>>(ys));
}

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> rank_average_ties(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
        i = j;
    }
    return ranks;
}

// ---------------------------------------------------------------------------
// Coefficients

namespace detail {

inline bool is_constant(std::span<const double> v) noexcept {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>{}) == v.end();
}

inline CorrelationResult linear_correlation(Metric metric, std::span<const double> x,
                                            std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("correlation: length mismatch");
    CorrelationResult result{metric, std::nullopt, std::nullopt, x.size()};
    const std::size_t n = x.size();
    if (n < 2 || is_constant(x) || is_constant(y)) return result;

    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double denom = std::sqrt(sxx * syy);
    if (!(denom > 0.0) || !std::isfinite(denom)) return result;
    const double r = std::clamp(sxy / denom, -1.0, 1.0);
    result.coefficient = r;

    if (n >= 3) {
        const double df = static_cast<double>(n - 2);
        const double one_minus_r2 = (1.0 - r) * (1.0 + r);
        if (one_minus_r2 <= 0.0) {
            result.p_value = 0.0;
        } else {
            // df / (df + t^2) with t = r * sqrt(df / (1 - r^2)) simplifies to 1 - r^2.
            result.p_value =
                std::clamp(regularized_incomplete_beta(df / 2.0, 0.5, one_minus_r2), 0.0, 1.0);
        }
    }
    return result;
}

}  // namespace detail

inline CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    return detail::linear_correlation(Metric::pearson, x, y);
}

inline CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("spearman: length mismatch");
    const auto rx = rank_average_ties(x);
    const auto ry = rank_average_ties(y);
    return detail::linear_correlation(Metric::spearman, rx, ry);
}

namespace detail {

inline double entropy_bits(const std::unordered_map<std::string_view, std::size_t>& counts,
                           double total) {
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace detail

// Uncertainty coefficient U(X|Y): share of the entropy of x explained by y,
// with x and y treated as categorical labels.
inline CorrelationResult theils_u(std::span<const std::string> x, std::span<const std::string> y) {
    if (x.size() != y.size()) throw ArgumentError("theils_u: length mismatch");
    CorrelationResult result{Metric::theils_u, std::nullopt, std::nullopt, x.size()};
    if (x.empty()) return result;

    const double total = static_cast<double>(x.size());
    std::unordered_map<std::string_view, std::size_t> x_counts;
    std::unordered_map<std::string_view, std::unordered_map<std::string_view, std::size_t>> by_y;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ++x_counts[x[i]];
        ++by_y[y[i]][x[i]];
    }
    const double h_x = detail::entropy_bits(x_counts, total);
    if (h_x <= 0.0) {
        result.coefficient = 1.0;
        return result;
    }
    double h_x_given_y = 0.0;
    for (const auto& [_, cell] : by_y) {
        double y_total = 0.0;
        for (const auto& [__, c] : cell) y_total += static_cast<double>(c);
        h_x_given_y += (y_total / total) * detail::entropy_bits(cell, y_total);
    }
    result.coefficient = std::clamp((h_x - h_x_given_y) / h_x, 0.0, 1.0);
    return result;
}

}  // namespace corrlens
