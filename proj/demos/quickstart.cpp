// Walks through the library surface: build the cheapest binary matrix,
// measure and decode a one-sparse signal, run the adaptive bisection, and
// compare both costs against the exact bound.

#include <iostream>

#include "l0sense/bounds.hpp"
#include "l0sense/channel.hpp"
#include "l0sense/harness.hpp"
#include "l0sense/matrices.hpp"

int main() {
    using namespace l0sense;

    const std::uint64_t n = 256;
    const std::uint32_t m = min_binary_rows(n, 1.0);

    const SensingMatrix a = min_cost_binary(n, m);
    const BoundReport bound = exact_min_binary_cost(n, m);
    std::cout << "min-binary matrix: " << m << " x " << n << ", l0 cost " << l0_cost(a)
              << " (exact bound " << bound.lower_bound_int << ", r0 " << bound.r0 << ")\n";

    const OneSparseSignal x{n, 137, 4.0};
    const MeasurementRecord y = measure(a, x, /*noisy=*/true, /*seed=*/7);
    std::cout << "noisy ml decode of support 137 -> " << ml_decode(a, y, x.amplitude) << "\n";

    const AdaptivePlan plan = bisection_plan(n);
    const BisectionResult res = run_bisection(plan, x, /*noisy=*/true, /*seed=*/7);
    std::cout << "bisection decode -> " << res.decoded << " using " << res.measurements_used
              << " measurements, l0 cost " << res.l0_cost_used << " (plan worst case "
              << plan.worst_case_cost() << ")\n";

    const ErrorEstimate est = monte_carlo(plan, required_amplitude(n, 0.05), /*noisy=*/true,
                                          20000, /*seed=*/42);
    std::cout << "noisy bisection at the 5% design amplitude: rate " << est.rate << " ["
              << est.ci_low << ", " << est.ci_high << "]\n";
    return 0;
}
