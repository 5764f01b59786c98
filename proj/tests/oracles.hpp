// Independent reference implementations used only by tests. They stay
// deliberately naive (row-by-row Pascal, sums of logs, dense O(N^2)
// geometry) so they share no code path with the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "l0sense/matrices.hpp"

namespace oracles {

// Pascal's triangle row by row in plain uint64 (enough for m <= 40).
inline std::uint64_t pascal_binomial(unsigned m, unsigned l) {
    std::vector<std::uint64_t> row{1};
    for (unsigned i = 1; i <= m; ++i) {
        std::vector<std::uint64_t> next(i + 1, 1);
        for (unsigned j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
        row = std::move(next);
    }
    return l < row.size() ? row[l] : 0;
}

// log2 C(m, l) as an explicit sum of logs.
inline double sum_of_logs_log_binomial(unsigned m, unsigned l) {
    double acc = 0.0;
    for (unsigned i = 1; i <= l; ++i)
        acc += std::log2(static_cast<double>(m - l + i) / static_cast<double>(i));
    return acc;
}

// Direct O(N^2) check that every column fits in the radius-tau ball and
// every pair is at distance >= d.
inline bool packing_valid(const l0sense::SensingMatrix& a, double tau, double d) {
    std::vector<std::vector<double>> cols(a.cols());
    for (std::uint32_t c = 0; c < a.cols(); ++c) cols[c] = a.dense_column(c);
    for (std::uint32_t c = 0; c < a.cols(); ++c) {
        double norm2 = 0.0;
        for (double v : cols[c]) norm2 += v * v;
        if (std::sqrt(norm2) > tau + 1e-12) return false;
    }
    for (std::uint32_t i = 0; i < a.cols(); ++i)
        for (std::uint32_t j = i + 1; j < a.cols(); ++j) {
            double dist2 = 0.0;
            for (std::uint32_t r = 0; r < a.rows(); ++r) {
                const double diff = cols[i][r] - cols[j][r];
                dist2 += diff * diff;
            }
            if (std::sqrt(dist2) < d - 1e-12) return false;
        }
    return true;
}

// Total grid-packing capacity re-derived from the per-axis floor rule
// (shares the construction's 1e-14 boundary guard).
inline std::uint64_t grid_capacity(std::uint32_t m, double tau, double d) {
    std::uint64_t total = 0;
    for (std::uint32_t l = 1; l <= m; ++l) {
        const double x = tau / (d * std::sqrt(static_cast<double>(l)));
        const double per_axis = std::floor(x + x * 1e-14);
        if (per_axis < 1.0) continue;
        double cls = static_cast<double>(oracles::pascal_binomial(m, l));
        for (std::uint32_t k = 0; k < l; ++k) cls *= per_axis;
        if (cls > 1e12) return 1'000'000'000'000ULL; // saturate, plenty for tests
        total += static_cast<std::uint64_t>(cls);
    }
    return total;
}

} // namespace oracles
