#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <set>
#include <vector>

#include "l0sense/matrices.hpp"
#include "l0sense/rng.hpp"
#include "oracles.hpp"

using namespace l0sense;

namespace {

std::vector<std::vector<std::uint32_t>> column_supports(const SensingMatrix& a) {
    std::vector<std::vector<std::uint32_t>> out(a.cols());
    for (std::uint32_t c = 0; c < a.cols(); ++c)
        for (const MatrixEntry& e : a.column(c)) out[c].push_back(e.row);
    return out;
}

SensingMatrix random_matrix(RandomStream& g, bool binary) {
    const std::uint32_t rows = 1 + static_cast<std::uint32_t>(g.index(8));
    const std::uint32_t cols = 1 + static_cast<std::uint32_t>(g.index(12));
    std::set<std::pair<std::uint32_t, std::uint32_t>> coords;
    const std::uint64_t want = g.index(static_cast<std::uint64_t>(rows) * cols + 1);
    while (coords.size() < want)
        coords.insert({static_cast<std::uint32_t>(g.index(rows)),
                       static_cast<std::uint32_t>(g.index(cols))});
    std::vector<MatrixEntry> entries;
    for (const auto& [r, c] : coords) {
        double v = 1.0;
        if (!binary) {
            do {
                v = g.normal();
            } while (v == 0.0);
        }
        entries.push_back({r, c, v});
    }
    return SensingMatrix(rows, cols, binary ? MatrixKind::binary : MatrixKind::real,
                         std::move(entries));
}

} // namespace

TEST_CASE("min_cost_binary enumerates supports in weight then lexicographic order") {
    const SensingMatrix a = min_cost_binary(7, 3);
    const std::vector<std::vector<std::uint32_t>> expected = {
        {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
    CHECK(column_supports(a) == expected);
    CHECK(l0_cost(a) == 12);
    CHECK(a.kind() == MatrixKind::binary);
    CHECK(a.columns_distinct_and_nonzero());
}

TEST_CASE("min_cost_binary small cases") {
    const SensingMatrix a = min_cost_binary(3, 3);
    CHECK(l0_cost(a) == 3);
    for (std::uint32_t c = 0; c < 3; ++c) CHECK(a.column_weight(c) == 1);

    const SensingMatrix b = min_cost_binary(10, 4);
    CHECK(l0_cost(b) == 16);
    CHECK(b.column_weight(3) == 1);
    CHECK(b.column_weight(4) == 2);
}

TEST_CASE("min_cost_binary infeasible when n > 2^m - 1") {
    CHECK_THROWS_AS(min_cost_binary(8, 3), InfeasibleError);
    try {
        min_cost_binary(8, 3);
    } catch (const InfeasibleError& e) {
        CHECK(e.achievable_capacity() == 7.0);
    }
    CHECK_THROWS_AS(min_cost_binary(0, 3), std::domain_error);
}

TEST_CASE("min_cost_binary columns are distinct, nonzero, and prefix-stable") {
    for (std::uint32_t m = 1; m <= 16; ++m) {
        const std::uint64_t n_max =
            std::min<std::uint64_t>((std::uint64_t{1} << m) - 1, 2000);
        const SensingMatrix full = min_cost_binary(n_max, m);
        REQUIRE(full.columns_distinct_and_nonzero());
        // any smaller n is a prefix of the full enumeration
        for (std::uint64_t n : {std::uint64_t{1}, n_max / 3 + 1, n_max}) {
            const SensingMatrix part = min_cost_binary(n, m);
            for (std::uint32_t c = 0; c < part.cols(); ++c) {
                const auto lhs = part.column(c);
                const auto rhs = full.column(c);
                REQUIRE(lhs.size() == rhs.size());
                for (std::size_t i = 0; i < lhs.size(); ++i)
                    REQUIRE(lhs[i].row == rhs[i].row);
            }
        }
    }
}

TEST_CASE("grid_packing hand-checked enumeration") {
    const SensingMatrix a = grid_packing(5, 2, 2.0, 1.0);
    CHECK(a.kind() == MatrixKind::real);
    CHECK(a.dense_column(0) == std::vector<double>{1.0, 0.0});
    CHECK(a.dense_column(1) == std::vector<double>{2.0, 0.0});
    CHECK(a.dense_column(2) == std::vector<double>{0.0, 1.0});
    CHECK(a.dense_column(3) == std::vector<double>{0.0, 2.0});
    CHECK(a.dense_column(4) == std::vector<double>{1.0, 1.0});
    CHECK(l0_cost(a) == 6);
    CHECK(oracles::packing_valid(a, 2.0, 1.0));
}

TEST_CASE("grid_packing with tau = d degenerates to a scaled identity") {
    const SensingMatrix a = grid_packing(4, 4, 0.7, 0.7);
    CHECK(l0_cost(a) == 4);
    for (std::uint32_t c = 0; c < 4; ++c) {
        CHECK(a.column_weight(c) == 1);
        CHECK(a.column(c)[0].value == 0.7);
    }
    CHECK(oracles::packing_valid(a, 0.7, 0.7));
}

TEST_CASE("grid_packing reports achievable capacity when infeasible") {
    CHECK_THROWS_AS(grid_packing(4, 2, 1.0, 1.0), InfeasibleError);
    try {
        grid_packing(4, 2, 1.0, 1.0);
    } catch (const InfeasibleError& e) {
        CHECK(e.achievable_capacity() == 2.0); // weight-2 class has no room
    }
    CHECK_THROWS_AS(grid_packing(3, 2, 0.0, 1.0), std::domain_error);
}

TEST_CASE("grid_packing satisfies the norm and distance constraints") {
    for (const auto& [n, m, tau, d] :
         std::vector<std::tuple<std::uint64_t, std::uint32_t, double, double>>{
             {20, 3, 3.0, 1.0}, {50, 4, 2.0, 0.5}, {9, 2, 3.0, 1.0}, {64, 5, 2.5, 0.8}}) {
        const SensingMatrix a = grid_packing(n, m, tau, d);
        REQUIRE(a.cols() == n);
        REQUIRE(a.columns_distinct_and_nonzero());
        REQUIRE(oracles::packing_valid(a, tau, d));
    }
}

TEST_CASE("bisection_plan traces halving schedules") {
    const AdaptivePlan p8 = bisection_plan(8);
    REQUIRE(p8.step_count() == 3);
    CHECK(p8.steps()[0].sensed_size() == 4);
    CHECK(p8.steps()[1].sensed_size() == 2);
    CHECK(p8.steps()[2].sensed_size() == 1);
    CHECK(p8.worst_case_cost() == 7);

    const AdaptivePlan p2 = bisection_plan(2);
    REQUIRE(p2.step_count() == 1);
    CHECK(p2.worst_case_cost() == 1);

    CHECK(bisection_plan(16).worst_case_cost() == 15);
    CHECK_THROWS_AS(bisection_plan(1), std::domain_error);
}

TEST_CASE("bisection_plan cost is n - 1 at powers of two") {
    for (std::uint32_t k = 1; k <= 20; ++k) {
        const std::uint64_t n = std::uint64_t{1} << k;
        const AdaptivePlan p = bisection_plan(n);
        CHECK(p.step_count() == k);
        CHECK(p.worst_case_cost() == n - 1);
    }
}

TEST_CASE("bisection_plan cost and step bounds for general n") {
    for (std::uint64_t n = 2; n <= 2048; ++n) {
        const AdaptivePlan p = bisection_plan(n);
        const std::uint32_t k = static_cast<std::uint32_t>(std::bit_width(n - 1));
        REQUIRE(p.step_count() == k);
        REQUIRE(p.worst_case_cost() <= n + k);
        // stored steps nest: each block is the previous sensed half
        for (std::uint32_t t = 1; t < p.step_count(); ++t) {
            REQUIRE(p.steps()[t].block_begin == p.steps()[t - 1].block_begin);
            REQUIRE(p.steps()[t].block_end == p.steps()[t - 1].split);
        }
    }
}

TEST_CASE("baseline identity") {
    const SensingMatrix a = baseline_matrix(BaselineKind::identity, 5, 5, 0);
    CHECK(l0_cost(a) == 5);
    CHECK(a.kind() == MatrixKind::binary);
    CHECK(a.columns_distinct_and_nonzero());
    CHECK_THROWS_AS(baseline_matrix(BaselineKind::identity, 5, 4, 0), std::domain_error);
}

TEST_CASE("baseline gaussian is dense and seed-deterministic") {
    const SensingMatrix a = baseline_matrix(BaselineKind::gaussian, 8, 4, 42);
    CHECK(l0_cost(a) == 32);
    CHECK(a.kind() == MatrixKind::real);
    const SensingMatrix b = baseline_matrix(BaselineKind::gaussian, 8, 4, 42);
    CHECK(a == b);
    const SensingMatrix c = baseline_matrix(BaselineKind::gaussian, 8, 4, 43);
    CHECK(!(a == c));
}

TEST_CASE("l0_cost counts stored nonzeros") {
    CHECK(l0_cost(baseline_matrix(BaselineKind::identity, 5, 5, 0)) == 5);
    CHECK(l0_cost(min_cost_binary(7, 3)) == 12);
    const SensingMatrix empty(3, 2, MatrixKind::real, {});
    CHECK(l0_cost(empty) == 0);
    CHECK_FALSE(empty.columns_distinct_and_nonzero());
}

TEST_CASE("cost_report histogram and greedy diagnostics") {
    const CostReport rep = cost_report(min_cost_binary(7, 3));
    CHECK(rep.l0_cost == 12);
    CHECK(rep.per_weight_counts ==
          std::vector<std::pair<std::uint32_t, std::uint64_t>>{{1, 3}, {2, 3}, {3, 1}});
    CHECK(rep.r0 == 2);
    CHECK(rep.c_m == Catch::Approx(7.0 / 6.0).margin(1e-12));
    std::uint64_t weighted = 0;
    for (const auto& [w, count] : rep.per_weight_counts) weighted += w * count;
    CHECK(weighted == rep.l0_cost);
}

TEST_CASE("SensingMatrix constructor validation") {
    CHECK_THROWS_AS(SensingMatrix(2, 2, MatrixKind::binary, {{0, 0, 2.0}}),
                    std::domain_error); // binary value != 1
    CHECK_THROWS_AS(SensingMatrix(2, 2, MatrixKind::real, {{0, 0, 0.0}}), std::domain_error);
    CHECK_THROWS_AS(SensingMatrix(2, 2, MatrixKind::real, {{0, 2, 1.0}}), std::domain_error);
    CHECK_THROWS_AS(SensingMatrix(2, 2, MatrixKind::real, {{0, 0, 1.0}, {0, 0, 2.0}}),
                    std::domain_error); // duplicate coordinates
    CHECK_THROWS_AS(SensingMatrix(0, 2, MatrixKind::real, {}), std::domain_error);
}

TEST_CASE("serialize golden text") {
    const SensingMatrix eye = baseline_matrix(BaselineKind::identity, 2, 2, 0);
    CHECK(serialize(eye) == "SENSEMAT 1\nkind binary\nrows 2\ncols 2\nnnz 2\n0 0 1\n1 1 1\n");

    const std::string text = serialize(min_cost_binary(7, 3));
    CHECK(text.find("nnz 12\n") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 17); // 5 header + 12 entries
}

TEST_CASE("parse/serialize round-trip over randomized matrices") {
    RandomStream g(20210915);
    for (int i = 0; i < 100; ++i) {
        const SensingMatrix a = random_matrix(g, i % 2 == 0);
        const SensingMatrix b = parse(serialize(a));
        REQUIRE(a == b);
    }
}

TEST_CASE("parse rejects malformed input with line numbers") {
    const std::string good = "SENSEMAT 1\nkind binary\nrows 2\ncols 2\nnnz 1\n0 0 1\n";
    CHECK(parse(good).nnz() == 1);

    auto expect_error = [](const std::string& text, std::size_t line) {
        try {
            parse(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_error("SENSEMAT 2\nkind binary\nrows 2\ncols 2\nnnz 0\n", 1);
    expect_error("SENSEMAT 1\nkind ternary\nrows 2\ncols 2\nnnz 0\n", 2);
    expect_error("SENSEMAT 1\nkind real\nrows 2\ncols 2\nnnz 1\n0 0 0\n", 6);
    expect_error("SENSEMAT 1\nkind real\nrows 2\ncols 2\nnnz 2\n0 0 1\n0 0 2\n", 7);
    expect_error("SENSEMAT 1\nkind real\nrows 2\ncols 2\nnnz 1\n2 0 1\n", 6);
    expect_error("SENSEMAT 1\nkind real\nrows 2\ncols 2\nnnz 2\n1 1 1\n0 0 1\n", 7);
    expect_error("SENSEMAT 1\nkind binary\nrows 2\ncols 2\nnnz 1\n0 0 2\n", 6);
    expect_error("SENSEMAT 1\nkind real\nrows 2\ncols 2\nnnz 1\n0 0 nan\n", 6);
    expect_error("SENSEMAT 1\nkind real\nrows 2\ncols 2\nnnz 2\n0 0 1\n", 7); // truncated
    expect_error("SENSEMAT 1\nkind real\nrows 2\ncols 2\nnnz 1\n0 0 1\nleftover\n", 7);
}

TEST_CASE("plan serialization") {
    CHECK(serialize(bisection_plan(8)) ==
          "BISECTPLAN 1\nn 8\nsteps 3\n0 8 4\n0 4 2\n0 2 1\n");
}
