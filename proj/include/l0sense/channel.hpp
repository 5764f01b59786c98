#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "l0sense/errors.hpp"
#include "l0sense/matrices.hpp"
#include "l0sense/numkit.hpp"
#include "l0sense/rng.hpp"

namespace l0sense {

/// Signal with exactly one nonzero coordinate of known positive amplitude.
struct OneSparseSignal {
    std::uint64_t n;
    std::uint64_t support;
    double amplitude;
};

namespace detail {

inline void check_signal(const OneSparseSignal& x) {
    if (x.n == 0) throw std::domain_error("OneSparseSignal: n must be positive");
    if (x.support >= x.n) throw std::domain_error("OneSparseSignal: support out of range");
    if (!(x.amplitude > 0.0))
        throw std::domain_error("OneSparseSignal: amplitude must be positive");
}

} // namespace detail

/// Acquired measurement vector, with the noise seed that produced it.
struct MeasurementRecord {
    std::vector<double> values;
    std::uint64_t noise_seed;
    bool noisy;
};

/// y = mu * A_support, plus one unit-variance Gaussian per coordinate when
/// noisy. Deterministic for a fixed seed.
inline MeasurementRecord measure(const SensingMatrix& a, const OneSparseSignal& x,
                                 bool noisy, std::uint64_t seed) {
    detail::check_signal(x);
    if (x.n != a.cols())
        throw std::domain_error("measure: signal dimension does not match matrix columns");
    std::vector<double> y(a.rows(), 0.0);
    for (const MatrixEntry& e : a.column(static_cast<std::uint32_t>(x.support)))
        y[e.row] = x.amplitude * e.value;
    if (noisy) {
        RandomStream g(seed);
        for (double& v : y) v += g.normal();
    }
    return {std::move(y), seed, noisy};
}

/// Maximum-likelihood support estimate: the column index minimizing
/// ||y - mu A_i||_2, smallest index on ties. Requires pairwise distinct
/// nonzero columns; otherwise two supports are indistinguishable.
inline std::uint64_t ml_decode(const SensingMatrix& a, const MeasurementRecord& y, double mu) {
    if (!(mu > 0.0)) throw std::domain_error("ml_decode: mu must be positive");
    if (y.values.size() != a.rows())
        throw std::domain_error("ml_decode: measurement length does not match matrix rows");
    if (!a.columns_distinct_and_nonzero())
        throw InvalidMatrixError("ml_decode: duplicate or zero columns make recovery ill-posed");
    // ||y - mu A_i||^2 = ||y||^2 + sum over the column's support of
    // mu e (mu e - 2 y); the shared ||y||^2 term is dropped.
    std::uint64_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < a.cols(); ++i) {
        double score = 0.0;
        for (const MatrixEntry& e : a.column(i))
            score += mu * e.value * (mu * e.value - 2.0 * y.values[e.row]);
        if (score < best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

/// Exact ML error probability for two equiprobable scaled columns in
/// unit-variance Gaussian noise: Q(mu ||ai - aj||_2 / 2).
inline double pairwise_error(std::span<const double> ai, std::span<const double> aj, double mu) {
    if (ai.size() != aj.size()) throw std::domain_error("pairwise_error: length mismatch");
    if (!(mu > 0.0)) throw std::domain_error("pairwise_error: mu must be positive");
    double dist2 = 0.0;
    for (std::size_t k = 0; k < ai.size(); ++k) {
        const double diff = ai[k] - aj[k];
        dist2 += diff * diff;
    }
    return q_function(mu * std::sqrt(dist2) / 2.0);
}

/// Minimum pairwise column distance needed to reach error probability eps
/// at amplitude mu: 2 Q^{-1}(eps) / mu.
inline double separation_distance(double eps, double mu) {
    if (!(mu > 0.0)) throw std::domain_error("separation_distance: mu must be positive");
    return 2.0 * q_inverse(eps) / mu;
}

struct BisectionResult {
    std::uint64_t decoded;
    std::uint32_t measurements_used;
    std::uint64_t l0_cost_used;
};

/// Executes the plan: each step senses the first ceil(b/2) elements of the
/// current block, keeps the sensed half iff y > mu/2, and after the final
/// step the surviving singleton is the decoded support. When a block is
/// already a singleton the split is degenerate and the sensed half survives
/// regardless of the measurement.
inline BisectionResult run_bisection(const AdaptivePlan& plan, const OneSparseSignal& x,
                                     bool noisy, std::uint64_t seed) {
    detail::check_signal(x);
    if (x.n != plan.n())
        throw std::domain_error("run_bisection: signal dimension does not match plan");
    RandomStream g(seed);
    std::uint64_t lo = 0, hi = plan.n();
    std::uint64_t cost = 0;
    for (std::uint32_t t = 0; t < plan.step_count(); ++t) {
        const std::uint64_t mid = lo + (hi - lo + 1) / 2;
        cost += mid - lo;
        const bool in_sensed = x.support >= lo && x.support < mid;
        const double y = (in_sensed ? x.amplitude : 0.0) + (noisy ? g.normal() : 0.0);
        bool keep_sensed = y > x.amplitude / 2.0;
        if (mid == hi) keep_sensed = true;
        if (keep_sensed)
            hi = mid;
        else
            lo = mid;
    }
    return {lo, plan.step_count(), cost};
}

/// Amplitude that drives the noisy bisection's total error below eps by a
/// union bound: with mu = 2 Q^{-1}(eps / steps), each of the ceil(log2 n)
/// threshold tests errs with probability eps / steps.
inline double required_amplitude(std::uint64_t n, double eps) {
    if (n < 2) throw std::domain_error("required_amplitude: n must be at least 2");
    if (!(eps > 0.0 && eps < 0.5))
        throw std::domain_error("required_amplitude: eps outside (0, 0.5)");
    const std::uint32_t steps = static_cast<std::uint32_t>(std::bit_width(n - 1));
    return 2.0 * q_inverse(eps / static_cast<double>(steps));
}

/// Monte Carlo estimate with its 95% Wilson score interval.
struct ErrorEstimate {
    std::uint64_t trials;
    std::uint64_t failures;
    double rate;
    double ci_low;
    double ci_high;
};

inline ErrorEstimate wilson_estimate(std::uint64_t trials, std::uint64_t failures) {
    if (trials == 0) throw std::domain_error("wilson_estimate: trials must be positive");
    if (failures > trials) throw std::domain_error("wilson_estimate: failures > trials");
    constexpr double z = 1.959963984540054; // Phi^{-1}(0.975)
    const double t = static_cast<double>(trials);
    const double p = static_cast<double>(failures) / t;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / t;
    const double center = (p + z2 / (2.0 * t)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
    return {trials, failures, p, center - half, center + half};
}

namespace detail {

// Trial i draws its support and noise from splitmix64(seed ^ i), so the
// failure count does not depend on trial execution order.
template <typename TrialFails>
inline ErrorEstimate run_trials(std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                                TrialFails&& trial_fails) {
    if (trials == 0) throw std::domain_error("monte_carlo: trials must be positive");
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        RandomStream g(splitmix64(seed ^ i));
        const std::uint64_t support = g.index(n);
        const std::uint64_t noise_seed = g.next_u64();
        if (trial_fails(support, noise_seed)) ++failures;
    }
    return wilson_estimate(trials, failures);
}

} // namespace detail

/// Support-recovery failure rate of non-adaptive sensing with ML decoding,
/// uniform random support per trial.
inline ErrorEstimate monte_carlo(const SensingMatrix& a, double mu, bool noisy,
                                 std::uint64_t trials, std::uint64_t seed) {
    if (!a.columns_distinct_and_nonzero())
        throw InvalidMatrixError("monte_carlo: duplicate or zero columns make recovery ill-posed");
    return detail::run_trials(a.cols(), trials, seed,
                              [&](std::uint64_t support, std::uint64_t noise_seed) {
                                  const OneSparseSignal x{a.cols(), support, mu};
                                  const MeasurementRecord rec = measure(a, x, noisy, noise_seed);
                                  return ml_decode(a, rec, mu) != support;
                              });
}

/// Support-recovery failure rate of the adaptive bisection strategy.
inline ErrorEstimate monte_carlo(const AdaptivePlan& plan, double mu, bool noisy,
                                 std::uint64_t trials, std::uint64_t seed) {
    return detail::run_trials(plan.n(), trials, seed,
                              [&](std::uint64_t support, std::uint64_t noise_seed) {
                                  const OneSparseSignal x{plan.n(), support, mu};
                                  return run_bisection(plan, x, noisy, noise_seed).decoded !=
                                         support;
                              });
}

} // namespace l0sense
