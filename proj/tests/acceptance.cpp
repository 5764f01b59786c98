// Acceptance suite: one check per headline property, printed as a pass/fail
// line with timing. Exit code 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "l0sense/bounds.hpp"
#include "l0sense/channel.hpp"
#include "l0sense/harness.hpp"
#include "l0sense/matrices.hpp"
#include "l0sense/numkit.hpp"

#include "oracles.hpp"

using namespace l0sense;

namespace {

struct Criterion {
    std::string name;
    std::function<void()> run; // throws std::runtime_error with detail on failure
};

void expect(bool cond, const std::string& detail) {
    if (!cond) throw std::runtime_error(detail);
}

// -- 1 -----------------------------------------------------------------------
void exact_construction_tightness() {
    for (std::uint32_t m = 1; m <= 4; ++m) {
        const std::uint64_t n_max = (std::uint64_t{1} << m) - 1;
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            const std::uint64_t brute = brute_force_min_cost(n, m);
            const std::uint64_t formula = exact_min_binary_cost(n, m).lower_bound_int;
            const std::uint64_t built = l0_cost(min_cost_binary(n, m));
            expect(brute == formula && formula == built,
                   "mismatch at n=" + std::to_string(n) + " m=" + std::to_string(m) +
                       ": brute " + std::to_string(brute) + ", formula " +
                       std::to_string(formula) + ", built " + std::to_string(built));
        }
    }
}

// -- 2 -----------------------------------------------------------------------
void boundary_constant() {
    expect(exact_min_binary_cost(256, 9).lower_bound_int == 842,
           "spot value: exact_min_binary_cost(256, 9) != 842");
    for (std::uint32_t k : {8u, 10u, 12u, 14u, 16u}) {
        const std::uint64_t n = std::uint64_t{1} << k;
        const std::uint32_t m = k + 1; // floor(log2 n) + 1
        const double cost = exact_min_binary_cost(n, m).lower_bound;
        const double ratio = cost / (static_cast<double>(n) * k);
        expect(ratio >= 0.30 && ratio <= 0.60,
               "cost/(N log2 N) = " + std::to_string(ratio) + " outside [0.30, 0.60] at N=2^" +
                   std::to_string(k));
    }
}

// -- 3 -----------------------------------------------------------------------
void adaptive_separation() {
    for (std::uint32_t k = 8; k <= 16; ++k) {
        const std::uint64_t n = std::uint64_t{1} << k;
        const std::uint32_t m = min_binary_rows(n, 1.0);
        const double nonadaptive = exact_min_binary_cost(n, m).lower_bound;
        const std::uint64_t bisect = bisection_plan(n).worst_case_cost();
        expect(bisect == n - 1,
               "bisection cost != N - 1 at N=2^" + std::to_string(k));
        const double ratio = nonadaptive / static_cast<double>(bisect);
        expect(ratio >= 0.3 * k, "nonadaptive/bisection = " + std::to_string(ratio) +
                                     " below 0.3 log2 N at N=2^" + std::to_string(k));
    }
}

// -- 4 -----------------------------------------------------------------------
void lemma_suite() {
    for (std::uint32_t m = 3; m <= 64; ++m)
        for (std::uint32_t r = 1; 2 * r < m; ++r)
            expect(lemma1_verdict(m, r).holds,
                   "lemma1 fails at m=" + std::to_string(m) + " r=" + std::to_string(r));
    for (std::uint32_t m = 2; m <= 64; ++m)
        for (std::uint32_t r = 1; r < m; ++r)
            expect(lemma2_verdict(m, r).holds,
                   "lemma2 fails at m=" + std::to_string(m) + " r=" + std::to_string(r));
    std::uint32_t points = 0;
    for (int d = 2; d <= 10; ++d)
        for (int j = 0; j < 112; ++j) {
            const double p = 0.001 + (0.499 - 0.001) * (j + 0.5) / 112.0;
            expect(lemma3_verdict(p, d).holds,
                   "lemma3 fails at p=" + std::to_string(p) + " d=" + std::to_string(d));
            ++points;
        }
    expect(points >= 1000, "lemma3 grid smaller than 1000 points");
}

// -- 5 -----------------------------------------------------------------------
void noisy_decoding_calibration() {
    const std::vector<std::pair<double, double>> cases{
        {1.0, 0.3085375387259869},  // mu ||delta|| / 2 = 0.5
        {2.0, 0.15865525393145707}, // = 1
        {4.0, 0.02275013194817921}, // = 2
    };
    for (const auto& [delta, expected] : cases) {
        const SensingMatrix two(1, 2, MatrixKind::real, {{0, 0, 1.0}, {0, 1, 1.0 + delta}});
        const ErrorEstimate est = monte_carlo(two, 1.0, true, 100000, 20160705);
        const double slack = 3.0 * std::sqrt(expected * (1.0 - expected) / 100000.0);
        expect(std::abs(est.rate - expected) <= slack,
               "two-column rate " + std::to_string(est.rate) + " vs analytic " +
                   std::to_string(expected) + " (99.7% slack " + std::to_string(slack) + ")");
    }
}

// -- 6 -----------------------------------------------------------------------
void noiseless_exhaustive_recovery() {
    for (std::uint32_t m = 1; m <= 12; ++m) {
        const std::uint64_t n = (std::uint64_t{1} << m) - 1;
        const SensingMatrix a = min_cost_binary(n, m);
        for (std::uint64_t s = 0; s < n; ++s) {
            const MeasurementRecord rec = measure(a, {n, s, 1.0}, false, 0);
            expect(ml_decode(a, rec, 1.0) == s,
                   "ml_decode missed support " + std::to_string(s) + " at m=" +
                       std::to_string(m));
        }
    }
    for (std::uint64_t n = 2; n <= 4096; ++n) {
        const AdaptivePlan plan = bisection_plan(n);
        for (std::uint64_t s = 0; s < n; ++s)
            expect(run_bisection(plan, {n, s, 1.0}, false, 0).decoded == s,
                   "bisection missed support " + std::to_string(s) + " at n=" +
                       std::to_string(n));
    }
}

// -- 7 -----------------------------------------------------------------------
void noisy_bisection_target() {
    const std::uint64_t n = 1024;
    const double eps = 0.05;
    const double mu = required_amplitude(n, eps);
    const ErrorEstimate est = monte_carlo(bisection_plan(n), mu, true, 10000, 20160705);
    const double slack = est.ci_high - est.rate;
    expect(est.rate <= eps + slack,
           "noisy bisection rate " + std::to_string(est.rate) + " above " +
               std::to_string(eps) + " + Wilson slack " + std::to_string(slack));
}

// -- 8 -----------------------------------------------------------------------
void packing_validity_and_bound_consistency() {
    std::uint32_t configs = 0;
    for (std::uint32_t m : {2u, 3u, 4u, 5u, 6u})
        for (double ratio : {2.5, 4.0, 6.0, 8.0}) {
            const PackingParams p = PackingParams::from_ratio(2.0, ratio, 0.05);
            const std::uint64_t cap = oracles::grid_capacity(m, p.tau, p.d);
            expect(cap >= 1, "empty capacity in sweep config");
            const std::uint64_t n = std::min<std::uint64_t>(cap, 60);
            const SensingMatrix a = grid_packing(n, m, p.tau, p.d);
            expect(oracles::packing_valid(a, p.tau, p.d),
                   "grid_packing violates norm/distance at m=" + std::to_string(m) +
                       " ratio=" + std::to_string(ratio));
            const double bound = noisy_lower_bound(n, m, p).lower_bound;
            expect(bound <= static_cast<double>(l0_cost(a)) + 1e-9,
                   "lower bound " + std::to_string(bound) + " exceeds achieved cost " +
                       std::to_string(l0_cost(a)));
            ++configs;
        }
    expect(configs == 20, "expected 20 sweep configurations, ran " + std::to_string(configs));

    // degenerate 2 tau / d = 1 collapses to the binary formula
    const PackingParams unit = PackingParams::from_ratio(2.0, 1.0, 0.05);
    for (std::uint32_t m : {4u, 9u, 13u})
        for (std::uint64_t n : {std::uint64_t{3}, std::uint64_t{50}, std::uint64_t{400}}) {
            if (!detail::binary_feasible(n, m)) continue;
            const BoundReport noisy = noisy_lower_bound(n, m, unit);
            const BoundReport binary = exact_min_binary_cost(n, m);
            expect(noisy.r0 == binary.r0 &&
                       std::abs(noisy.lower_bound - binary.lower_bound) <= 1e-9,
                   "degenerate ratio-1 bound diverges from the binary formula at n=" +
                       std::to_string(n) + " m=" + std::to_string(m));
        }
}

// -- 9 -----------------------------------------------------------------------
void determinism() {
    SweepConfig cfg;
    cfg.n_values = {256, 1024, 4096};
    cfg.strategies = {Strategy::min_binary, Strategy::bisection, Strategy::gaussian};
    cfg.seed = 77;
    const std::string csv1 = sweep_csv(run_sweep(cfg));
    const std::string csv2 = sweep_csv(run_sweep(cfg));
    expect(csv1 == csv2, "sweep CSV bytes differ between runs");

    std::ostringstream sim1, sim2;
    for (std::ostringstream* sink : {&sim1, &sim2}) {
        const ErrorEstimate est = monte_carlo(bisection_plan(512), 4.0, true, 5000, 31337);
        *sink << est.trials << ' ' << est.failures << ' ' << est.rate << ' ' << est.ci_low
              << ' ' << est.ci_high << '\n';
    }
    expect(sim1.str() == sim2.str(), "simulate output bytes differ between runs");
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"exact-construction tightness (brute force = formula = built, m <= 4)",
         exact_construction_tightness},
        {"boundary constant: cost/(N log2 N) in [0.30, 0.60] at M = floor(log2 N)+1",
         boundary_constant},
        {"adaptive separation: min-binary / bisection >= 0.3 log2 N, bisection = N-1",
         adaptive_separation},
        {"lemma suite: brackets hold exhaustively (m <= 64) and on the 1000-point grid",
         lemma_suite},
        {"noisy decoding calibration: two-column Monte Carlo matches Q(mu d/2)",
         noisy_decoding_calibration},
        {"noiseless exhaustive recovery: ml_decode (m <= 12) and bisection (n <= 4096)",
         noiseless_exhaustive_recovery},
        {"noisy bisection target: n=1024, eps=0.05 at the design amplitude",
         noisy_bisection_target},
        {"packing validity and bound consistency over 20 configurations",
         packing_validity_and_bound_consistency},
        {"determinism: identical bytes from repeated seeded sweep/simulate runs",
         determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            criteria[i].run();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
                  << criteria[i].name << " [" << secs << " s]";
        if (!ok) std::cout << "\n     " << detail;
        std::cout << "\n";
        if (!ok) ++failed;
    }
    if (failed > 0) {
        std::cout << failed << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all " << criteria.size() << " criteria passed\n";
    return 0;
}
