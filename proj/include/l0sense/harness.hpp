#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "l0sense/bounds.hpp"
#include "l0sense/channel.hpp"
#include "l0sense/errors.hpp"
#include "l0sense/matrices.hpp"
#include "l0sense/numkit.hpp"

namespace l0sense {

enum class Strategy { min_binary, bisection, gaussian, grid_packing };

inline std::string strategy_name(Strategy s) {
    switch (s) {
    case Strategy::min_binary: return "min-binary";
    case Strategy::bisection: return "bisection";
    case Strategy::gaussian: return "gaussian";
    case Strategy::grid_packing: return "grid-packing";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name) {
    if (name == "min-binary") return Strategy::min_binary;
    if (name == "bisection") return Strategy::bisection;
    if (name == "gaussian") return Strategy::gaussian;
    if (name == "grid-packing") return Strategy::grid_packing;
    throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

/// Non-adaptive measurement count for dimension n at factor t: ceil(t log2 n).
inline std::uint32_t measurement_rows(std::uint64_t n, double t) {
    if (n < 2) throw std::domain_error("measurement_rows: n must be at least 2");
    if (!(t >= 1.0)) throw std::domain_error("measurement_rows: t must be >= 1");
    return static_cast<std::uint32_t>(std::ceil(t * std::log2(static_cast<double>(n))));
}

/// Rows for the minimal binary construction: ceil(t log2 n), raised to the
/// smallest feasible count when 2^m - 1 < n (which happens exactly when n is
/// a power of two and t log2 n is integral).
inline std::uint32_t min_binary_rows(std::uint64_t n, double t) {
    return std::max(measurement_rows(n, t),
                    static_cast<std::uint32_t>(std::bit_width(n)));
}

struct SweepConfig {
    std::vector<std::uint64_t> n_values;
    double t_factor = 1.0;
    std::vector<Strategy> strategies;
    std::optional<PackingParams> packing;
    std::uint64_t seed = 0;
    std::string output_path; // empty: no file side effect
};

struct SweepRow {
    std::uint64_t n = 0;
    std::uint32_t m = 0;
    Strategy strategy = Strategy::min_binary;
    bool feasible = true;
    std::uint64_t l0_cost = 0;
    std::uint32_t measurements = 0;
    double cost_over_nlogn = 0.0;
    std::optional<double> lower_bound;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("failed while reading " + path);
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw IoError("failed while writing " + path);
}

inline SweepRow sweep_cell(std::uint64_t n, Strategy s, const SweepConfig& cfg) {
    SweepRow row;
    row.n = n;
    row.strategy = s;
    row.seed = cfg.seed;
    const double nlogn = static_cast<double>(n) * std::log2(static_cast<double>(n));
    try {
        switch (s) {
        case Strategy::min_binary: {
            row.m = min_binary_rows(n, cfg.t_factor);
            const BoundReport rep = exact_min_binary_cost(n, row.m);
            row.l0_cost = rep.lower_bound_int;
            row.measurements = row.m;
            row.lower_bound = rep.lower_bound;
            break;
        }
        case Strategy::bisection: {
            const AdaptivePlan plan = bisection_plan(n);
            row.m = plan.step_count();
            row.l0_cost = plan.worst_case_cost();
            row.measurements = plan.step_count();
            break;
        }
        case Strategy::gaussian: {
            row.m = measurement_rows(n, cfg.t_factor);
            row.l0_cost = n * row.m; // dense by construction
            row.measurements = row.m;
            break;
        }
        case Strategy::grid_packing: {
            if (!cfg.packing.has_value())
                throw std::invalid_argument("sweep: grid-packing requires packing parameters");
            row.m = measurement_rows(n, cfg.t_factor);
            const SensingMatrix a = grid_packing(n, row.m, cfg.packing->tau, cfg.packing->d);
            row.l0_cost = l0_cost(a);
            row.measurements = row.m;
            row.lower_bound = noisy_lower_bound(n, row.m, *cfg.packing).lower_bound;
            break;
        }
        }
        row.cost_over_nlogn = static_cast<double>(row.l0_cost) / nlogn;
    } catch (const InfeasibleError&) {
        row.feasible = false;
        if (row.m == 0 && s != Strategy::bisection)
            row.m = s == Strategy::min_binary ? min_binary_rows(n, cfg.t_factor)
                                              : measurement_rows(n, cfg.t_factor);
    }
    return row;
}

} // namespace detail

inline std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "n,m,strategy,l0_cost,measurements,cost_over_nlogn,lower_bound,status,seed\n";
    for (const SweepRow& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.m);
        out += ',';
        out += strategy_name(r.strategy);
        out += ',';
        if (r.feasible) {
            out += std::to_string(r.l0_cost);
            out += ',';
            out += std::to_string(r.measurements);
            out += ',';
            out += detail::format_double(r.cost_over_nlogn);
            out += ',';
            if (r.lower_bound.has_value()) out += detail::format_double(*r.lower_bound);
            out += ",ok,";
        } else {
            out += ",,,,infeasible,";
        }
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

/// One row per (n, strategy), sorted by (n, strategy name); infeasible cells
/// are emitted with status "infeasible" rather than dropped. Writes the CSV
/// to cfg.output_path when set; output bytes are a pure function of cfg.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    if (cfg.n_values.empty()) throw std::invalid_argument("sweep: n_values must be nonempty");
    for (std::uint64_t n : cfg.n_values)
        if (n < 2) throw std::invalid_argument("sweep: every n must be at least 2");
    if (!(cfg.t_factor >= 1.0)) throw std::invalid_argument("sweep: t_factor must be >= 1");
    if (cfg.strategies.empty())
        throw std::invalid_argument("sweep: strategies must be nonempty");
    std::vector<SweepRow> rows;
    rows.reserve(cfg.n_values.size() * cfg.strategies.size());
    for (std::uint64_t n : cfg.n_values)
        for (Strategy s : cfg.strategies) rows.push_back(detail::sweep_cell(n, s, cfg));
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.n != b.n ? a.n < b.n : strategy_name(a.strategy) < strategy_name(b.strategy);
    });
    if (!cfg.output_path.empty()) detail::write_file(cfg.output_path, sweep_csv(rows));
    return rows;
}

// ---------------------------------------------------------------------------
// SVG chart of cost_over_nlogn against log2 n, one polyline per strategy.

namespace detail {

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points; // (log2 n, cost_over_nlogn)
};

inline std::vector<ChartSeries> chart_series_from_csv(std::string_view csv_text) {
    LineReader in(csv_text);
    const std::string_view header = in.require_line("csv header");
    if (header != "n,m,strategy,l0_cost,measurements,cost_over_nlogn,lower_bound,status,seed")
        throw ParseError(in.line(), "unrecognized csv header");
    std::vector<ChartSeries> series;
    while (!in.at_end()) {
        const std::string_view line = in.require_line("csv row");
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 9) throw ParseError(in.line(), "csv row must have 9 fields");
        if (fields[7] != "ok") continue;
        const auto n = parse_number<std::uint64_t>(fields[0], in.line(), "n");
        const auto y = parse_number<double>(fields[5], in.line(), "cost_over_nlogn");
        const std::string name(fields[2]);
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const ChartSeries& s) { return s.name == name; });
        if (it == series.end()) {
            series.push_back({name, {}});
            it = series.end() - 1;
        }
        it->points.emplace_back(std::log2(static_cast<double>(n)), y);
    }
    for (ChartSeries& s : series) std::sort(s.points.begin(), s.points.end());
    std::sort(series.begin(), series.end(),
              [](const ChartSeries& a, const ChartSeries& b) { return a.name < b.name; });
    return series;
}

inline std::string render_chart_svg(const std::vector<ChartSeries>& series) {
    if (series.empty()) throw std::invalid_argument("chart: no plottable rows");
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const ChartSeries& s : series)
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    ymax *= 1.05;
    const double width = 720, height = 480;
    const double left = 70, right = 20, top = 24, bottom = 48;
    const auto px = [&](double x) {
        return left + (x - xmin) / (xmax - xmin) * (width - left - right);
    };
    const auto py = [&](double y) {
        return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
    };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
                      "viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    // axes and ticks
    svg += "<line x1=\"" + format_double(left) + "\" y1=\"" + format_double(height - bottom) +
           "\" x2=\"" + format_double(width - right) + "\" y2=\"" +
           format_double(height - bottom) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(left) + "\" y1=\"" + format_double(top) + "\" x2=\"" +
           format_double(left) + "\" y2=\"" + format_double(height - bottom) +
           "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 6; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 6.0;
        const double yv = ymin + (ymax - ymin) * i / 6.0;
        svg += "<line x1=\"" + format_double(px(xv)) + "\" y1=\"" +
               format_double(height - bottom) + "\" x2=\"" + format_double(px(xv)) +
               "\" y2=\"" + format_double(height - bottom + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + format_double(px(xv)) + "\" y=\"" +
               format_double(height - bottom + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + format_double(std::round(xv * 100) / 100) +
               "</text>\n";
        svg += "<line x1=\"" + format_double(left - 5) + "\" y1=\"" + format_double(py(yv)) +
               "\" x2=\"" + format_double(left) + "\" y2=\"" + format_double(py(yv)) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + format_double(left - 8) + "\" y=\"" + format_double(py(yv) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + format_double(std::round(yv * 1000) / 1000) +
               "</text>\n";
    }
    svg += "<text x=\"" + format_double((left + width - right) / 2) + "\" y=\"" +
           format_double(height - 10) + "\" font-size=\"13\" text-anchor=\"middle\">log2 N</text>\n";
    svg += "<text x=\"16\" y=\"" + format_double((top + height - bottom) / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           format_double((top + height - bottom) / 2) + ")\">l0 cost / (N log2 N)</text>\n";
    std::size_t color = 0;
    for (const ChartSeries& s : series) {
        const char* stroke = palette[color % std::size(palette)];
        std::string pts;
        for (const auto& [x, y] : s.points)
            pts += format_double(px(x)) + "," + format_double(py(y)) + " ";
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        for (const auto& [x, y] : s.points)
            svg += "<circle cx=\"" + format_double(px(x)) + "\" cy=\"" + format_double(py(y)) +
                   "\" r=\"2.5\" fill=\"" + std::string(stroke) + "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(color) + 8;
        svg += "<line x1=\"" + format_double(width - right - 150) + "\" y1=\"" +
               format_double(ly) + "\" x2=\"" + format_double(width - right - 126) + "\" y2=\"" +
               format_double(ly) + "\" stroke=\"" + std::string(stroke) +
               "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + format_double(width - right - 120) + "\" y=\"" +
               format_double(ly + 4) + "\" font-size=\"12\">" + s.name + "</text>\n";
        ++color;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace detail

} // namespace l0sense
