#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "l0sense/errors.hpp"
#include "l0sense/numkit.hpp"

namespace l0sense {

enum class BoundRegime { binary_noiseless, real_noisy, higher_m };

/// Evaluated lower bound at finite (n, m): the threshold weight r0, the
/// overshoot ratio c_m, the bound value, the per-weight capacities that
/// produced it, and free-form numeric diagnostics.
struct BoundReport {
    std::uint64_t n = 0;
    std::uint32_t m = 0;
    BoundRegime regime = BoundRegime::binary_noiseless;
    std::uint32_t r0 = 0;
    double c_m = 0.0;
    double lower_bound = 0.0;
    std::uint64_t lower_bound_int = 0; // exact value in the binary regime
    std::vector<std::pair<std::uint32_t, double>> per_weight_capacity;
    std::vector<std::pair<std::string, double>> diagnostics;
};

/// Exact minimal l0 cost of any binary matrix with n distinct nonzero
/// columns of length m: weight classes 1..r0 filled completely, the
/// remainder at weight r0 + 1.
inline BoundReport exact_min_binary_cost(std::uint64_t n, std::uint32_t m) {
    if (n == 0) throw std::domain_error("exact_min_binary_cost: n must be positive");
    if (m == 0) throw std::domain_error("exact_min_binary_cost: m must be positive");
    if (!detail::binary_feasible(n, m))
        throw InfeasibleError("exact_min_binary_cost: n exceeds 2^m - 1 distinct nonzero columns",
                              std::exp2(static_cast<double>(m)) - 1.0);
    const auto g = detail::greedy_binary_profile(n, m);
    if (g.cost > uint128{std::numeric_limits<std::uint64_t>::max()})
        throw std::domain_error("exact_min_binary_cost: cost exceeds 64-bit range");
    BoundReport rep;
    rep.n = n;
    rep.m = m;
    rep.regime = BoundRegime::binary_noiseless;
    rep.r0 = g.r0;
    rep.c_m = g.c_m;
    rep.lower_bound_int = static_cast<std::uint64_t>(g.cost);
    rep.lower_bound = static_cast<double>(g.cost);
    uint128 filled = 0;
    for (std::uint32_t l = 1; l <= g.r0; ++l) {
        rep.per_weight_capacity.emplace_back(l, static_cast<double>(binomial(m, l)));
        filled += binomial(m, l);
    }
    if (uint128{n} > filled)
        rep.per_weight_capacity.emplace_back(g.r0 + 1, static_cast<double>(uint128{n} - filled));
    if (n >= 2) {
        const double nlogn = static_cast<double>(n) * std::log2(static_cast<double>(n));
        rep.diagnostics.emplace_back("t_factor", static_cast<double>(m) / std::log2(static_cast<double>(n)));
        rep.diagnostics.emplace_back("cost_over_nlogn", rep.lower_bound / nlogn);
    }
    return rep;
}

/// Sphere-packing parameters: column-norm cap tau, target error eps,
/// amplitude mu, and the separation d they induce. Factories keep
/// d = 2 Q^{-1}(eps) / mu consistent by construction.
struct PackingParams {
    double tau;
    double eps;
    double mu;
    double d;

    static PackingParams from_error_target(double tau, double eps, double mu) {
        if (!(tau > 0.0)) throw std::domain_error("PackingParams: tau must be positive");
        if (!(mu > 0.0)) throw std::domain_error("PackingParams: mu must be positive");
        return {tau, eps, mu, 2.0 * q_inverse(eps) / mu};
    }

    /// Fixes the ratio 2 tau / d directly, deriving the amplitude that makes
    /// d consistent with the given eps.
    static PackingParams from_ratio(double tau, double ratio, double eps = 0.05) {
        if (!(tau > 0.0)) throw std::domain_error("PackingParams: tau must be positive");
        if (!(ratio > 0.0)) throw std::domain_error("PackingParams: ratio must be positive");
        const double d = 2.0 * tau / ratio;
        return {tau, eps, 2.0 * q_inverse(eps) / d, d};
    }

    double ratio() const { return 2.0 * tau / d; }
};

namespace detail {

inline void check_packing(const PackingParams& p) {
    if (!(p.tau > 0.0) || !(p.mu > 0.0) || !(p.d > 0.0))
        throw std::domain_error("PackingParams: tau, mu, d must be positive");
    const double expected = 2.0 * q_inverse(p.eps) / p.mu;
    if (std::abs(p.d - expected) > 1e-9 * std::max(1.0, expected))
        throw std::domain_error("PackingParams: d inconsistent with 2 Q^{-1}(eps) / mu");
}

} // namespace detail

/// Capacity bound on distance-d-separated points of support size l inside
/// the radius-tau ball: C(m, l) (2 tau / d)^l.
inline double packing_capacity(std::uint32_t m, std::uint32_t l, const PackingParams& p) {
    if (l < 1 || l > m) throw std::domain_error("packing_capacity: l outside [1, m]");
    detail::check_packing(p);
    return static_cast<double>(binomial(m, l)) *
           std::pow(p.ratio(), static_cast<double>(l));
}

/// Lower bound on the l0 cost of any real matrix whose n columns fit in the
/// radius-tau ball at pairwise distance d: fill the per-weight capacities
/// v_l = C(m,l)(2 tau/d)^l from the cheapest weight up.
inline BoundReport noisy_lower_bound(std::uint64_t n, std::uint32_t m, const PackingParams& p) {
    if (n == 0) throw std::domain_error("noisy_lower_bound: n must be positive");
    if (m == 0) throw std::domain_error("noisy_lower_bound: m must be positive");
    detail::check_packing(p);
    std::vector<double> v(m); // v[l-1] = capacity of weight class l
    double total = 0.0;
    for (std::uint32_t l = 1; l <= m; ++l) {
        v[l - 1] = packing_capacity(m, l, p);
        total += v[l - 1];
    }
    if (static_cast<double>(n) > total)
        throw InfeasibleError("noisy_lower_bound: no matrix fits n columns under these constraints",
                              total);
    std::uint32_t r0 = 0;
    double filled = 0.0;
    double cost = 0.0;
    while (r0 < m && filled + v[r0] < static_cast<double>(n)) {
        filled += v[r0];
        cost += v[r0] * static_cast<double>(r0 + 1);
        ++r0;
    }
    cost += (static_cast<double>(n) - filled) * static_cast<double>(r0 + 1);
    BoundReport rep;
    rep.n = n;
    rep.m = m;
    rep.regime = BoundRegime::real_noisy;
    rep.r0 = r0;
    rep.lower_bound = cost;
    rep.lower_bound_int = cost <= static_cast<double>(std::numeric_limits<std::uint64_t>::max())
                              ? static_cast<std::uint64_t>(cost)
                              : 0;
    double denom = 0.0;
    for (std::uint32_t l = 1; l <= std::max<std::uint32_t>(r0, 1); ++l) denom += v[l - 1];
    rep.c_m = static_cast<double>(n) / denom;
    for (std::uint32_t l = 1; l <= m; ++l) rep.per_weight_capacity.emplace_back(l, v[l - 1]);
    rep.diagnostics.emplace_back("ratio_2tau_over_d", p.ratio());
    rep.diagnostics.emplace_back("separation_d", p.d);
    if (n >= 2)
        rep.diagnostics.emplace_back("t_factor",
                                     static_cast<double>(m) / std::log2(static_cast<double>(n)));
    return rep;
}

/// max over integer d in [2, 64] of
/// scale_c * (n / m^{1/(d-1)}) ((ln 2 log2(n/c_m)) / (2d))^{d/(d-1)}.
/// Ties go to the smallest d.
struct HigherMBound {
    double value;
    int argmax_d;
};

inline HigherMBound higher_m_bound(std::uint64_t n, std::uint32_t m, double c_m,
                                   double scale_c = 1.0) {
    if (m < 2) throw std::domain_error("higher_m_bound: m must be at least 2");
    if (!(scale_c > 0.0)) throw std::domain_error("higher_m_bound: scale_c must be positive");
    if (!(c_m > 0.0) || !(static_cast<double>(n) / c_m > 1.0))
        throw std::domain_error("higher_m_bound: requires n / c_m > 1");
    const double log_term = std::log2(static_cast<double>(n) / c_m);
    double best = -std::numeric_limits<double>::infinity();
    int best_d = 2;
    for (int d = 2; d <= 64; ++d) {
        const double exponent = static_cast<double>(d) / (d - 1.0);
        const double kernel =
            (static_cast<double>(n) / std::pow(static_cast<double>(m), 1.0 / (d - 1.0))) *
            std::pow(std::numbers::ln2 * log_term / (2.0 * d), exponent);
        if (kernel > best) {
            best = kernel;
            best_d = d;
        }
    }
    return {scale_c * best, best_d};
}

/// K-sparse recovery is at least as hard as one-sparse recovery: a matrix
/// with two equal columns already confuses two K-sized supports differing in
/// one element. The one-sparse bound therefore carries over unchanged.
inline BoundReport ksparse_lower_bound(std::uint64_t n, std::uint32_t m, std::uint32_t k) {
    if (k < 1) throw std::domain_error("ksparse_lower_bound: k must be positive");
    BoundReport rep = exact_min_binary_cost(n, m);
    rep.diagnostics.emplace_back("k", static_cast<double>(k));
    if (n >= 2)
        rep.diagnostics.emplace_back(
            "k_t_factor", static_cast<double>(m) /
                              (static_cast<double>(k) * std::log2(static_cast<double>(n))));
    return rep;
}

/// Exhaustive oracle: minimum total weight over all n-subsets of the
/// 2^m - 1 nonzero binary columns. Guarded to m <= 4 and at most 1e6
/// subsets; it certifies the greedy formula at toy scale.
inline std::uint64_t brute_force_min_cost(std::uint64_t n, std::uint32_t m) {
    if (m == 0 || m > 4)
        throw std::domain_error("brute_force_min_cost: enumeration guard limits m to [1, 4]");
    const std::uint32_t ncols = (1u << m) - 1;
    if (n == 0) throw std::domain_error("brute_force_min_cost: n must be positive");
    if (n > ncols)
        throw InfeasibleError("brute_force_min_cost: n exceeds 2^m - 1", static_cast<double>(ncols));
    if (std::exp2(log_binomial(ncols, static_cast<std::uint32_t>(n))) > 1e6)
        throw std::domain_error("brute_force_min_cost: subset count exceeds enumeration guard");
    // columns are the bitmasks 1..2^m-1; weight of a column = popcount
    std::vector<std::uint32_t> pick(static_cast<std::size_t>(n));
    for (std::uint32_t i = 0; i < n; ++i) pick[i] = i;
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    while (true) {
        std::uint64_t weight = 0;
        for (std::uint32_t idx : pick)
            weight += static_cast<std::uint64_t>(std::popcount(idx + 1));
        best = std::min(best, weight);
        std::uint32_t i = static_cast<std::uint32_t>(pick.size());
        while (i > 0 && pick[i - 1] == ncols - pick.size() + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::uint32_t j = i; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

} // namespace l0sense
