#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "l0sense/errors.hpp"
#include "l0sense/numkit.hpp"
#include "l0sense/rng.hpp"

namespace l0sense {

enum class MatrixKind { binary, real };

struct MatrixEntry {
    std::uint32_t row;
    std::uint32_t col;
    double value;

    friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Sparse M x N sensing matrix. Entries are kept sorted by (col, row) -- the
/// same order the file format uses -- with per-column offsets for O(degree)
/// column access. Values are immutable after construction; the constructor
/// rejects duplicate coordinates, zero values, non-finite values, and
/// non-unit values in binary matrices.
class SensingMatrix {
public:
    SensingMatrix(std::uint32_t rows, std::uint32_t cols, MatrixKind kind,
                  std::vector<MatrixEntry> entries)
        : rows_(rows), cols_(cols), kind_(kind), entries_(std::move(entries)) {
        if (rows_ == 0 || cols_ == 0)
            throw std::domain_error("SensingMatrix: rows and cols must be positive");
        std::sort(entries_.begin(), entries_.end(),
                  [](const MatrixEntry& a, const MatrixEntry& b) {
                      return std::tie(a.col, a.row) < std::tie(b.col, b.row);
                  });
        const MatrixEntry* prev = nullptr;
        for (const MatrixEntry& e : entries_) {
            if (e.row >= rows_ || e.col >= cols_)
                throw std::domain_error("SensingMatrix: entry index out of range");
            if (!std::isfinite(e.value))
                throw std::domain_error("SensingMatrix: non-finite entry value");
            if (e.value == 0.0)
                throw std::domain_error("SensingMatrix: zero entry stored explicitly");
            if (kind_ == MatrixKind::binary && e.value != 1.0)
                throw std::domain_error("SensingMatrix: binary matrix entry must be 1");
            if (prev != nullptr && prev->col == e.col && prev->row == e.row)
                throw std::domain_error("SensingMatrix: duplicate entry coordinates");
            prev = &e;
        }
        col_offsets_.assign(static_cast<std::size_t>(cols_) + 1, 0);
        for (const MatrixEntry& e : entries_) ++col_offsets_[e.col + 1];
        std::partial_sum(col_offsets_.begin(), col_offsets_.end(), col_offsets_.begin());
    }

    SensingMatrix(const SensingMatrix& other)
        : rows_(other.rows_), cols_(other.cols_), kind_(other.kind_),
          entries_(other.entries_), col_offsets_(other.col_offsets_),
          column_check_(other.column_check_.load(std::memory_order_relaxed)) {}

    SensingMatrix(SensingMatrix&& other) noexcept
        : rows_(other.rows_), cols_(other.cols_), kind_(other.kind_),
          entries_(std::move(other.entries_)), col_offsets_(std::move(other.col_offsets_)),
          column_check_(other.column_check_.load(std::memory_order_relaxed)) {}

    SensingMatrix& operator=(const SensingMatrix& other) {
        if (this != &other) {
            rows_ = other.rows_;
            cols_ = other.cols_;
            kind_ = other.kind_;
            entries_ = other.entries_;
            col_offsets_ = other.col_offsets_;
            column_check_.store(other.column_check_.load(std::memory_order_relaxed),
                                std::memory_order_relaxed);
        }
        return *this;
    }

    SensingMatrix& operator=(SensingMatrix&& other) noexcept {
        rows_ = other.rows_;
        cols_ = other.cols_;
        kind_ = other.kind_;
        entries_ = std::move(other.entries_);
        col_offsets_ = std::move(other.col_offsets_);
        column_check_.store(other.column_check_.load(std::memory_order_relaxed),
                            std::memory_order_relaxed);
        return *this;
    }

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    MatrixKind kind() const { return kind_; }
    std::uint64_t nnz() const { return entries_.size(); }
    std::span<const MatrixEntry> entries() const { return entries_; }

    std::span<const MatrixEntry> column(std::uint32_t col) const {
        if (col >= cols_) throw std::domain_error("SensingMatrix: column out of range");
        return {entries_.data() + col_offsets_[col], col_offsets_[col + 1] - col_offsets_[col]};
    }

    std::uint32_t column_weight(std::uint32_t col) const {
        return static_cast<std::uint32_t>(column(col).size());
    }

    std::vector<double> dense_column(std::uint32_t col) const {
        std::vector<double> v(rows_, 0.0);
        for (const MatrixEntry& e : column(col)) v[e.row] = e.value;
        return v;
    }

    /// Whether all columns are pairwise distinct and nonzero, the
    /// precondition for one-sparse recovery. Computed once and cached;
    /// concurrent first calls race benignly on the same answer.
    bool columns_distinct_and_nonzero() const {
        int state = column_check_.load(std::memory_order_relaxed);
        if (state < 0) {
            state = compute_column_check() ? 1 : 0;
            column_check_.store(state, std::memory_order_relaxed);
        }
        return state == 1;
    }

    friend bool operator==(const SensingMatrix& a, const SensingMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.kind_ == b.kind_ &&
               a.entries_ == b.entries_;
    }

private:
    bool compute_column_check() const {
        for (std::uint32_t c = 0; c < cols_; ++c)
            if (col_offsets_[c + 1] == col_offsets_[c]) return false; // zero column
        std::vector<std::uint32_t> order(cols_);
        std::iota(order.begin(), order.end(), 0);
        auto less = [this](std::uint32_t a, std::uint32_t b) {
            auto ca = column(a), cb = column(b);
            return std::lexicographical_compare(
                ca.begin(), ca.end(), cb.begin(), cb.end(),
                [](const MatrixEntry& x, const MatrixEntry& y) {
                    return std::tie(x.row, x.value) < std::tie(y.row, y.value);
                });
        };
        std::sort(order.begin(), order.end(), less);
        for (std::uint32_t i = 1; i < cols_; ++i) {
            auto ca = column(order[i - 1]), cb = column(order[i]);
            if (std::equal(ca.begin(), ca.end(), cb.begin(), cb.end(),
                           [](const MatrixEntry& x, const MatrixEntry& y) {
                               return x.row == y.row && x.value == y.value;
                           }))
                return false;
        }
        return true;
    }

    std::uint32_t rows_;
    std::uint32_t cols_;
    MatrixKind kind_;
    std::vector<MatrixEntry> entries_;
    std::vector<std::size_t> col_offsets_;
    mutable std::atomic<int> column_check_{-1}; // -1 unknown, 0 false, 1 true
};

inline std::uint64_t l0_cost(const SensingMatrix& a) { return a.nnz(); }

namespace detail {

// Lexicographic combination iterator over {0, .., m-1} choose w.
// Returns false once the last combination has been visited.
inline bool next_combination(std::vector<std::uint32_t>& support, std::uint32_t m) {
    const std::uint32_t w = static_cast<std::uint32_t>(support.size());
    std::uint32_t i = w;
    while (i > 0 && support[i - 1] == m - w + i - 1) --i;
    if (i == 0) return false;
    ++support[i - 1];
    for (std::uint32_t j = i; j < w; ++j) support[j] = support[j - 1] + 1;
    return true;
}

} // namespace detail

/// The n cheapest distinct nonzero binary columns of length m: all weight-1
/// columns, then all weight-2 columns, and so on, support sets in
/// lexicographic order inside each weight class.
inline SensingMatrix min_cost_binary(std::uint64_t n, std::uint32_t m) {
    if (n == 0) throw std::domain_error("min_cost_binary: n must be positive");
    if (m == 0) throw std::domain_error("min_cost_binary: m must be positive");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw std::domain_error("min_cost_binary: n exceeds column-index range");
    if (!detail::binary_feasible(n, m))
        throw InfeasibleError("min_cost_binary: n exceeds 2^m - 1 distinct nonzero columns",
                              std::exp2(static_cast<double>(m)) - 1.0);
    std::vector<MatrixEntry> entries;
    std::uint64_t emitted = 0;
    std::vector<std::uint32_t> support;
    for (std::uint32_t w = 1; w <= m && emitted < n; ++w) {
        support.resize(w);
        std::iota(support.begin(), support.end(), 0);
        do {
            for (std::uint32_t r : support)
                entries.push_back({r, static_cast<std::uint32_t>(emitted), 1.0});
            ++emitted;
        } while (emitted < n && detail::next_combination(support, m));
    }
    return SensingMatrix(m, static_cast<std::uint32_t>(n), MatrixKind::binary,
                         std::move(entries));
}

namespace detail {

// Grid levels per axis for weight-l columns: floor(tau / (d sqrt(l))), with a
// relative 1e-14 guard so ratios that are exact in real arithmetic (tau = 4,
// d = 2, ...) do not lose a level to rounding. Any wrongful admission
// overshoots the norm cap by at most tau * 1e-14.
inline std::uint64_t grid_levels(std::uint32_t weight, double tau, double d) {
    const double x = tau / (d * std::sqrt(static_cast<double>(weight)));
    const double guarded = std::floor(x + x * 1e-14);
    return guarded < 1.0 ? 0 : static_cast<std::uint64_t>(guarded);
}

} // namespace detail

/// n real columns in the radius-tau ball, pairwise at distance >= d, filled
/// in ascending weight order. Weight-l columns put each nonzero coordinate
/// on the grid {d, 2d, .., floor(tau/(d sqrt(l))) d}, so the norm cap and
/// the pairwise separation hold by construction.
inline SensingMatrix grid_packing(std::uint64_t n, std::uint32_t m, double tau, double d) {
    if (n == 0) throw std::domain_error("grid_packing: n must be positive");
    if (m == 0) throw std::domain_error("grid_packing: m must be positive");
    if (!(tau > 0.0) || !(d > 0.0))
        throw std::domain_error("grid_packing: tau and d must be positive");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw std::domain_error("grid_packing: n exceeds column-index range");
    std::vector<MatrixEntry> entries;
    std::uint64_t emitted = 0;
    std::vector<std::uint32_t> support;
    std::vector<std::uint64_t> level;
    for (std::uint32_t w = 1; w <= m && emitted < n; ++w) {
        const std::uint64_t levels = detail::grid_levels(w, tau, d);
        if (levels == 0) continue;
        support.resize(w);
        std::iota(support.begin(), support.end(), 0);
        do {
            level.assign(w, 1);
            while (emitted < n) {
                for (std::uint32_t j = 0; j < w; ++j)
                    entries.push_back({support[j], static_cast<std::uint32_t>(emitted),
                                       static_cast<double>(level[j]) * d});
                ++emitted;
                // next coordinate tuple in lexicographic order
                std::uint32_t j = w;
                while (j > 0 && level[j - 1] == levels) level[--j] = 1;
                if (j == 0) break;
                ++level[j - 1];
            }
        } while (emitted < n && detail::next_combination(support, m));
    }
    if (emitted < n)
        throw InfeasibleError("grid_packing: capacity exhausted before n columns",
                              static_cast<double>(emitted));
    return SensingMatrix(m, static_cast<std::uint32_t>(n), MatrixKind::real,
                         std::move(entries));
}

enum class BaselineKind { identity, gaussian };

/// identity: n weight-1 columns (requires m == n). gaussian: dense m x n
/// matrix with seeded standard-normal entries drawn column-major; an exact
/// zero from the generator is simply not stored.
inline SensingMatrix baseline_matrix(BaselineKind kind, std::uint64_t n, std::uint32_t m,
                                     std::uint64_t seed) {
    if (n == 0 || m == 0)
        throw std::domain_error("baseline_matrix: dimensions must be positive");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw std::domain_error("baseline_matrix: n exceeds column-index range");
    std::vector<MatrixEntry> entries;
    if (kind == BaselineKind::identity) {
        if (m != n) throw std::domain_error("baseline_matrix: identity requires m == n");
        for (std::uint32_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
        return SensingMatrix(m, static_cast<std::uint32_t>(n), MatrixKind::binary,
                             std::move(entries));
    }
    RandomStream g(seed);
    entries.reserve(static_cast<std::size_t>(n) * m);
    for (std::uint32_t c = 0; c < n; ++c)
        for (std::uint32_t r = 0; r < m; ++r)
            if (const double v = g.normal(); v != 0.0) entries.push_back({r, c, v});
    return SensingMatrix(m, static_cast<std::uint32_t>(n), MatrixKind::real,
                         std::move(entries));
}

/// Cost accounting for a matrix: total nonzeros plus the per-weight column
/// histogram. r0 and c_m are the greedy minimal-construction diagnostics for
/// the matrix's shape; they describe the matrix itself only when it came from
/// min_cost_binary.
struct CostReport {
    std::uint64_t l0_cost = 0;
    std::uint32_t r0 = 0;
    double c_m = 0.0;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> per_weight_counts;
};

inline CostReport cost_report(const SensingMatrix& a) {
    CostReport rep;
    rep.l0_cost = a.nnz();
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(a.rows()) + 1, 0);
    for (std::uint32_t c = 0; c < a.cols(); ++c) ++hist[a.column_weight(c)];
    for (std::uint32_t w = 0; w <= a.rows(); ++w)
        if (hist[w] > 0) rep.per_weight_counts.emplace_back(w, hist[w]);
    if (a.rows() <= exact_binomial_cap && detail::binary_feasible(a.cols(), a.rows())) {
        const auto g = detail::greedy_binary_profile(a.cols(), a.rows());
        rep.r0 = g.r0;
        rep.c_m = g.c_m;
    }
    return rep;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace detail

/// Text rendering of a matrix:
///
///   SENSEMAT 1
///   kind binary|real
///   rows <M>
///   cols <N>
///   nnz <count>
///   <row> <col> <value>     (nnz lines, 0-indexed, sorted by col then row)
///
/// Binary values print as "1"; real values use the shortest decimal string
/// that round-trips to the same binary64 value.
inline std::string serialize(const SensingMatrix& a) {
    std::string out = "SENSEMAT 1\n";
    out += a.kind() == MatrixKind::binary ? "kind binary\n" : "kind real\n";
    out += "rows " + std::to_string(a.rows()) + "\n";
    out += "cols " + std::to_string(a.cols()) + "\n";
    out += "nnz " + std::to_string(a.nnz()) + "\n";
    for (const MatrixEntry& e : a.entries()) {
        out += std::to_string(e.row);
        out += ' ';
        out += std::to_string(e.col);
        out += ' ';
        out += a.kind() == MatrixKind::binary ? "1" : detail::format_double(e.value);
        out += '\n';
    }
    return out;
}

namespace detail {

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    // Returns the next line, or throws if the input already ended.
    std::string_view require_line(const char* what) {
        if (pos_ >= text_.size())
            throw ParseError(line_ + 1, std::string("unexpected end of input, expected ") + what);
        ++line_;
        const std::size_t eol = text_.find('\n', pos_);
        std::string_view line = eol == std::string_view::npos ? text_.substr(pos_)
                                                              : text_.substr(pos_, eol - pos_);
        pos_ = eol == std::string_view::npos ? text_.size() : eol + 1;
        return line;
    }

    bool at_end() {
        while (pos_ < text_.size()) {
            const std::size_t eol = text_.find('\n', pos_);
            std::string_view line = eol == std::string_view::npos
                                        ? text_.substr(pos_)
                                        : text_.substr(pos_, eol - pos_);
            if (!line.empty()) return false;
            ++line_;
            pos_ = eol == std::string_view::npos ? text_.size() : eol + 1;
        }
        return true;
    }

    std::size_t line() const { return line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ') ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

template <typename T>
inline T parse_number(std::string_view field, std::size_t line, const char* what) {
    T value{};
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError(line, std::string("malformed ") + what);
    return value;
}

inline std::uint64_t parse_labeled(LineReader& in, const char* label) {
    const std::string_view line = in.require_line(label);
    const auto fields = split_fields(line);
    if (fields.size() != 2 || fields[0] != label)
        throw ParseError(in.line(), std::string("expected '") + label + " <value>'");
    return parse_number<std::uint64_t>(fields[1], in.line(), label);
}

} // namespace detail

/// Inverse of serialize. Enforces the grammar strictly: exact header, sorted
/// unique coordinates, in-range indices, nonzero finite values, "1" for
/// binary entries, and no trailing data. Errors carry the offending line.
inline SensingMatrix parse(std::string_view text) {
    detail::LineReader in(text);
    if (in.require_line("header") != "SENSEMAT 1")
        throw ParseError(in.line(), "malformed header, expected 'SENSEMAT 1'");
    const std::string_view kind_line = in.require_line("kind");
    MatrixKind kind;
    if (kind_line == "kind binary")
        kind = MatrixKind::binary;
    else if (kind_line == "kind real")
        kind = MatrixKind::real;
    else
        throw ParseError(in.line(), "expected 'kind binary' or 'kind real'");
    const std::uint64_t rows = detail::parse_labeled(in, "rows");
    const std::uint64_t cols = detail::parse_labeled(in, "cols");
    const std::uint64_t nnz = detail::parse_labeled(in, "nnz");
    if (rows == 0 || rows > std::numeric_limits<std::uint32_t>::max())
        throw ParseError(in.line(), "rows out of range");
    if (cols == 0 || cols > std::numeric_limits<std::uint32_t>::max())
        throw ParseError(in.line(), "cols out of range");

    std::vector<MatrixEntry> entries;
    entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(nnz, 1u << 20)));
    bool have_prev = false;
    MatrixEntry prev{};
    for (std::uint64_t i = 0; i < nnz; ++i) {
        const std::string_view line = in.require_line("entry line");
        const auto fields = detail::split_fields(line);
        if (fields.size() != 3)
            throw ParseError(in.line(), "entry line must be '<row> <col> <value>'");
        MatrixEntry e{};
        e.row = detail::parse_number<std::uint32_t>(fields[0], in.line(), "row index");
        e.col = detail::parse_number<std::uint32_t>(fields[1], in.line(), "col index");
        if (e.row >= rows) throw ParseError(in.line(), "row index out of range");
        if (e.col >= cols) throw ParseError(in.line(), "col index out of range");
        if (kind == MatrixKind::binary) {
            if (fields[2] != "1")
                throw ParseError(in.line(), "binary entry value must be '1'");
            e.value = 1.0;
        } else {
            e.value = detail::parse_number<double>(fields[2], in.line(), "value");
            if (!std::isfinite(e.value)) throw ParseError(in.line(), "non-finite value");
        }
        if (e.value == 0.0) throw ParseError(in.line(), "zero value");
        if (have_prev) {
            if (std::tie(e.col, e.row) == std::tie(prev.col, prev.row))
                throw ParseError(in.line(), "duplicate entry");
            if (std::tie(e.col, e.row) < std::tie(prev.col, prev.row))
                throw ParseError(in.line(), "entries not sorted by (col, row)");
        }
        prev = e;
        have_prev = true;
        entries.push_back(e);
    }
    if (!in.at_end()) throw ParseError(in.line() + 1, "trailing data after nnz entries");
    return SensingMatrix(static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols),
                         kind, std::move(entries));
}

/// One bisection step: the active block is [block_begin, block_end) and the
/// measurement senses its first half [block_begin, split).
struct PlanStep {
    std::uint64_t block_begin;
    std::uint64_t block_end;
    std::uint64_t split;

    std::uint64_t sensed_size() const { return split - block_begin; }

    friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

/// Adaptive bisection schedule. The stored steps trace the worst-case path,
/// where the sensed (larger) half survives every round; execution applies
/// the same split rule to whichever block actually survives, so realized
/// blocks are always subintervals of the stored ones and realized cost never
/// exceeds worst_case_cost().
class AdaptivePlan {
public:
    AdaptivePlan(std::uint64_t n, std::vector<PlanStep> steps)
        : n_(n), steps_(std::move(steps)) {}

    std::uint64_t n() const { return n_; }
    std::span<const PlanStep> steps() const { return steps_; }
    std::uint32_t step_count() const { return static_cast<std::uint32_t>(steps_.size()); }

    std::uint64_t worst_case_cost() const {
        std::uint64_t total = 0;
        for (const PlanStep& s : steps_) total += s.sensed_size();
        return total;
    }

private:
    std::uint64_t n_;
    std::vector<PlanStep> steps_;
};

/// Halve-and-sense schedule over n positions: each step senses the first
/// ceil(b/2) elements of the current block of size b. ceil(log2 n) steps;
/// worst-case cost n - 1 when n is a power of two, at most n + ceil(log2 n)
/// otherwise.
inline AdaptivePlan bisection_plan(std::uint64_t n) {
    if (n < 2) throw std::domain_error("bisection_plan: n must be at least 2");
    std::vector<PlanStep> steps;
    std::uint64_t lo = 0, hi = n;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo + 1) / 2;
        steps.push_back({lo, hi, mid});
        hi = mid;
    }
    return AdaptivePlan(n, std::move(steps));
}

inline std::string serialize(const AdaptivePlan& plan) {
    std::string out = "BISECTPLAN 1\n";
    out += "n " + std::to_string(plan.n()) + "\n";
    out += "steps " + std::to_string(plan.step_count()) + "\n";
    for (const PlanStep& s : plan.steps())
        out += std::to_string(s.block_begin) + " " + std::to_string(s.block_end) + " " +
               std::to_string(s.split) + "\n";
    return out;
}

} // namespace l0sense
