#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace l0sense {

// Wide enough for every binomial coefficient up to C(128, 64).
using uint128 = unsigned __int128;

/// Largest m for which binomial(m, l) is evaluated exactly. Beyond it,
/// callers must switch to log_binomial.
inline constexpr std::uint32_t exact_binomial_cap = 128;

inline std::string to_string(uint128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

namespace detail {

// Pascal's triangle, additions only, so nothing overflows on the way to the
// largest representable coefficient.
inline const std::vector<uint128>& pascal_table() {
    static const std::vector<uint128> table = [] {
        constexpr std::size_t cap = exact_binomial_cap;
        std::vector<uint128> t((cap + 1) * (cap + 2) / 2);
        auto at = [&t](std::size_t m, std::size_t l) -> uint128& {
            return t[m * (m + 1) / 2 + l];
        };
        at(0, 0) = 1;
        for (std::size_t m = 1; m <= cap; ++m) {
            at(m, 0) = 1;
            at(m, m) = 1;
            for (std::size_t l = 1; l < m; ++l)
                at(m, l) = at(m - 1, l - 1) + at(m - 1, l);
        }
        return t;
    }();
    return table;
}

} // namespace detail

/// Exact C(m, l).
inline uint128 binomial(std::uint32_t m, std::uint32_t l) {
    if (l > m) throw std::domain_error("binomial: l > m");
    if (m > exact_binomial_cap)
        throw std::domain_error("binomial: m exceeds exact cap " +
                                std::to_string(exact_binomial_cap) + ", use log_binomial");
    return detail::pascal_table()[static_cast<std::size_t>(m) * (m + 1) / 2 + l];
}

/// log2 C(m, l). Agrees with the exact value to 1e-9 for all m <= 128.
inline double log_binomial(std::uint32_t m, std::uint32_t l) {
    if (l > m) throw std::domain_error("log_binomial: l > m");
    return (std::lgamma(static_cast<double>(m) + 1.0) -
            std::lgamma(static_cast<double>(l) + 1.0) -
            std::lgamma(static_cast<double>(m - l) + 1.0)) / std::numbers::ln2;
}

/// H(p) in bits, with H(0) = H(1) = 0 by continuity.
inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("binary_entropy: p outside [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Standard normal tail probability Q(a) = P(Z > a).
inline double q_function(double a) {
    return 0.5 * std::erfc(a / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation to the standard normal quantile,
// accurate to about 1.2e-9 on its own. Only the p < 0.5 branches are
// needed here.
inline double normal_quantile_estimate(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

/// Inverse of q_function on (0, 0.5). Two Newton refinements on top of the
/// quantile approximation bring the round-trip error to well under 1e-9.
inline double q_inverse(double eps) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::domain_error("q_inverse: eps outside (0, 0.5)");
    double x = -detail::normal_quantile_estimate(eps);
    for (int i = 0; i < 2; ++i) {
        const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        x += (q_function(x) - eps) / density;
    }
    return x;
}

/// Bracketing check of one inequality chain: holds iff
/// lower_value <= subject_value <= upper_value.
struct LemmaVerdict {
    double lower_value;
    double subject_value;
    double upper_value;
    bool holds;
};

namespace detail {

inline LemmaVerdict make_verdict(double lower, double subject, double upper) {
    return {lower, subject, upper, lower <= subject && subject <= upper};
}

} // namespace detail

/// Partial binomial sum bracket: C(m,r) <= sum_{l=1}^{r} C(m,l) <= C(m,r)/(1-2r/m),
/// valid for 1 <= r < m/2.
inline LemmaVerdict lemma1_verdict(std::uint32_t m, std::uint32_t r) {
    if (r < 1 || 2 * r >= m)
        throw std::domain_error("lemma1_verdict: requires 1 <= r < m/2");
    uint128 sum = 0;
    for (std::uint32_t l = 1; l <= r; ++l) sum += binomial(m, l);
    const double last = static_cast<double>(binomial(m, r));
    const double p = static_cast<double>(r) / static_cast<double>(m);
    return detail::make_verdict(last, static_cast<double>(sum), last / (1.0 - 2.0 * p));
}

/// Entropy bracket on a single coefficient:
/// 2^{mH(p)}/sqrt(8mp(1-p)) <= C(m,r) <= 2^{mH(p)}/sqrt(2*pi*mp(1-p)), p = r/m.
inline LemmaVerdict lemma2_verdict(std::uint32_t m, std::uint32_t r) {
    if (r < 1 || r >= m)
        throw std::domain_error("lemma2_verdict: requires 1 <= r <= m-1");
    const double p = static_cast<double>(r) / static_cast<double>(m);
    const double scaled = std::exp2(static_cast<double>(m) * binary_entropy(p));
    const double mpq = static_cast<double>(m) * p * (1.0 - p);
    return detail::make_verdict(scaled / std::sqrt(8.0 * mpq),
                                static_cast<double>(binomial(m, r)),
                                scaled / std::sqrt(2.0 * std::numbers::pi * mpq));
}

/// Entropy upper bound H(p) <= (2d/ln 2) p^{1-1/d} for integer d >= 2, p < 1/2.
inline LemmaVerdict lemma3_verdict(double p, int d) {
    if (d < 2) throw std::domain_error("lemma3_verdict: requires integer d >= 2");
    if (!(p > 0.0 && p < 0.5))
        throw std::domain_error("lemma3_verdict: requires 0 < p < 0.5");
    const double upper = (2.0 * d / std::numbers::ln2) * std::pow(p, 1.0 - 1.0 / d);
    return detail::make_verdict(0.0, binary_entropy(p), upper);
}

namespace detail {

/// True when n distinct nonzero binary columns of length m exist.
inline bool binary_feasible(std::uint64_t n, std::uint32_t m) {
    return m >= 64 || n <= (std::uint64_t{1} << m) - 1;
}

// Profile of the greedy minimal-cost binary column set: weight classes
// 1..r0 fully used, the remaining n - filled columns at weight r0 + 1.
struct GreedyBinaryProfile {
    std::uint32_t r0 = 0;
    uint128 filled = 0; // sum_{l<=r0} C(m,l)
    uint128 cost = 0;   // exact minimal total weight of n distinct nonzero columns
    double c_m = 0.0;   // n / sum_{l<=max(r0,1)} C(m,l)
};

inline GreedyBinaryProfile greedy_binary_profile(std::uint64_t n, std::uint32_t m) {
    GreedyBinaryProfile g;
    uint128 cost = 0;
    while (g.r0 < m) {
        const uint128 next_class = binomial(m, g.r0 + 1);
        if (uint128{n} <= g.filled + next_class) break;
        g.filled += next_class;
        cost += next_class * uint128{g.r0 + 1};
        ++g.r0;
    }
    cost += (uint128{n} - g.filled) * uint128{g.r0 + 1};
    g.cost = cost;
    uint128 denom = 0;
    for (std::uint32_t l = 1; l <= std::max<std::uint32_t>(g.r0, 1); ++l)
        denom += binomial(m, l);
    g.c_m = static_cast<double>(n) / static_cast<double>(denom);
    return g;
}

} // namespace detail

} // namespace l0sense
