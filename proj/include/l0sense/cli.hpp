#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "l0sense/harness.hpp"

namespace l0sense {

namespace detail {

inline void print_bound_report(std::ostream& out, const BoundReport& rep) {
    out << "regime "
        << (rep.regime == BoundRegime::binary_noiseless ? "binary"
            : rep.regime == BoundRegime::real_noisy     ? "noisy"
                                                        : "higher-m")
        << "\n";
    out << "n " << rep.n << "\n";
    out << "m " << rep.m << "\n";
    out << "r0 " << rep.r0 << "\n";
    out << "c_m " << format_double(rep.c_m) << "\n";
    out << "lower_bound " << format_double(rep.lower_bound) << "\n";
    for (const auto& [w, cap] : rep.per_weight_capacity)
        out << "weight " << w << " capacity " << format_double(cap) << "\n";
    for (const auto& [key, value] : rep.diagnostics)
        out << "diag " << key << " " << format_double(value) << "\n";
}

inline void print_estimate(std::ostream& out, const ErrorEstimate& est) {
    out << "trials " << est.trials << "\n";
    out << "failures " << est.failures << "\n";
    out << "rate " << format_double(est.rate) << "\n";
    out << "ci_low " << format_double(est.ci_low) << "\n";
    out << "ci_high " << format_double(est.ci_high) << "\n";
}

inline PackingParams packing_from_flags(std::optional<double> tau, std::optional<double> eps,
                                        std::optional<double> mu) {
    if (!tau || !eps || !mu)
        throw std::invalid_argument("this operation requires --tau, --eps and --mu");
    return PackingParams::from_error_target(*tau, *eps, *mu);
}

} // namespace detail

/// Dispatches the CLI. `args` excludes the program name. Exit codes:
/// 0 success, 2 argument or domain errors, 3 infeasible constructions,
/// 4 I/O or input-format errors, 1 anything else.
inline int cli_main(std::vector<std::string> args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"sensing-matrix construction, l0-cost bounds, and one-sparse recovery simulation"};
    app.name("l0sense");
    app.require_subcommand(1);

    // construct ------------------------------------------------------------
    auto* construct = app.add_subcommand("construct", "build a matrix or bisection plan and write it to a file");
    std::string c_kind;
    std::uint64_t c_n = 0;
    std::optional<std::uint32_t> c_m;
    std::optional<double> c_t;
    std::optional<double> c_tau, c_eps, c_mu;
    std::uint64_t c_seed = 0;
    std::string c_out;
    construct->add_option("--kind", c_kind, "min-binary|grid-packing|identity|gaussian|bisection-plan")
        ->required();
    construct->add_option("--n", c_n, "signal dimension (columns)")->required();
    construct->add_option("--m", c_m, "measurement count (rows)");
    construct->add_option("--t", c_t, "rows factor, m = ceil(t log2 n)")->excludes("--m");
    construct->add_option("--tau", c_tau, "column norm cap (grid-packing)");
    construct->add_option("--eps", c_eps, "target error (grid-packing)");
    construct->add_option("--mu", c_mu, "signal amplitude (grid-packing)");
    construct->add_option("--seed", c_seed, "seed for randomized kinds");
    construct->add_option("--out", c_out, "output path")->required();
    construct->callback([&] {
        const double t = c_t.value_or(1.0);
        std::string payload;
        if (c_kind == "bisection-plan") {
            payload = serialize(bisection_plan(c_n));
        } else {
            std::optional<SensingMatrix> a;
            if (c_kind == "min-binary") {
                const std::uint32_t m = c_m ? *c_m : min_binary_rows(c_n, t);
                a = min_cost_binary(c_n, m);
            } else if (c_kind == "grid-packing") {
                const PackingParams p = detail::packing_from_flags(c_tau, c_eps, c_mu);
                const std::uint32_t m = c_m ? *c_m : measurement_rows(c_n, t);
                a = grid_packing(c_n, m, p.tau, p.d);
            } else if (c_kind == "identity") {
                if (c_m && *c_m != c_n)
                    throw std::domain_error("identity requires m == n");
                a = baseline_matrix(BaselineKind::identity, c_n,
                                    static_cast<std::uint32_t>(c_n), c_seed);
            } else if (c_kind == "gaussian") {
                const std::uint32_t m = c_m ? *c_m : measurement_rows(c_n, t);
                a = baseline_matrix(BaselineKind::gaussian, c_n, m, c_seed);
            } else {
                throw std::invalid_argument("unknown kind '" + c_kind + "'");
            }
            payload = serialize(*a);
        }
        detail::write_file(c_out, payload);
        err << "wrote " << c_out << "\n";
    });

    // cost -----------------------------------------------------------------
    auto* cost = app.add_subcommand("cost", "l0 cost and per-weight histogram of a matrix file");
    std::string k_matrix;
    cost->add_option("--matrix", k_matrix, "SENSEMAT file")->required();
    cost->callback([&] {
        const SensingMatrix a = parse(detail::read_file(k_matrix));
        const CostReport rep = cost_report(a);
        out << "rows " << a.rows() << "\n";
        out << "cols " << a.cols() << "\n";
        out << "kind " << (a.kind() == MatrixKind::binary ? "binary" : "real") << "\n";
        out << "l0_cost " << rep.l0_cost << "\n";
        for (const auto& [w, count] : rep.per_weight_counts)
            out << "weight " << w << " count " << count << "\n";
    });

    // bounds ---------------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "evaluate a lower bound at finite (n, m)");
    std::string b_regime;
    std::uint64_t b_n = 0;
    std::uint32_t b_m = 0;
    std::optional<double> b_tau, b_eps, b_mu, b_cm;
    double b_scale_c = 1.0;
    std::uint32_t b_k = 1;
    bounds->add_option("--regime", b_regime, "binary|noisy|higher-m|ksparse")->required();
    bounds->add_option("--n", b_n, "signal dimension")->required();
    bounds->add_option("--m", b_m, "measurement count")->required();
    bounds->add_option("--tau", b_tau, "column norm cap (noisy)");
    bounds->add_option("--eps", b_eps, "target error (noisy)");
    bounds->add_option("--mu", b_mu, "amplitude (noisy)");
    bounds->add_option("--k", b_k, "sparsity (ksparse)");
    bounds->add_option("--c-m", b_cm, "overshoot ratio (higher-m; default from the binary formula)");
    bounds->add_option("--scale-c", b_scale_c, "scale constant (higher-m)");
    bounds->callback([&] {
        if (b_regime == "binary") {
            detail::print_bound_report(out, exact_min_binary_cost(b_n, b_m));
        } else if (b_regime == "noisy") {
            const PackingParams p = detail::packing_from_flags(b_tau, b_eps, b_mu);
            detail::print_bound_report(out, noisy_lower_bound(b_n, b_m, p));
        } else if (b_regime == "ksparse") {
            detail::print_bound_report(out, ksparse_lower_bound(b_n, b_m, b_k));
        } else if (b_regime == "higher-m") {
            double cm = 1.0;
            if (b_cm)
                cm = *b_cm;
            else if (detail::binary_feasible(b_n, b_m) && b_m <= exact_binomial_cap)
                cm = exact_min_binary_cost(b_n, b_m).c_m;
            const HigherMBound hb = higher_m_bound(b_n, b_m, cm, b_scale_c);
            out << "regime higher-m\n";
            out << "n " << b_n << "\n";
            out << "m " << b_m << "\n";
            out << "c_m " << detail::format_double(cm) << "\n";
            out << "scale_c " << detail::format_double(b_scale_c) << "\n";
            out << "lower_bound " << detail::format_double(hb.value) << "\n";
            out << "argmax_d " << hb.argmax_d << "\n";
        } else {
            throw std::invalid_argument("unknown regime '" + b_regime + "'");
        }
    });

    // simulate ---------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo support-recovery error estimate");
    std::string s_strategy;
    std::optional<std::uint64_t> s_n;
    std::optional<std::string> s_matrix;
    double s_mu = 0.0;
    bool s_noisy = false;
    std::uint64_t s_trials = 0;
    std::uint64_t s_seed = 0;
    simulate->add_option("--strategy", s_strategy, "nonadaptive|bisection")->required();
    simulate->add_option("--n", s_n, "signal dimension");
    simulate->add_option("--matrix", s_matrix, "SENSEMAT file (nonadaptive)");
    simulate->add_option("--mu", s_mu, "signal amplitude")->required();
    simulate->add_flag("--noisy", s_noisy, "add unit-variance Gaussian noise");
    simulate->add_option("--trials", s_trials, "Monte Carlo trials")->required();
    simulate->add_option("--seed", s_seed, "base seed");
    simulate->callback([&] {
        ErrorEstimate est{};
        std::uint64_t n = 0;
        if (s_strategy == "bisection") {
            if (!s_n) throw std::invalid_argument("bisection requires --n");
            n = *s_n;
            est = monte_carlo(bisection_plan(n), s_mu, s_noisy, s_trials, s_seed);
        } else if (s_strategy == "nonadaptive") {
            std::optional<SensingMatrix> a;
            if (s_matrix) {
                a = parse(detail::read_file(*s_matrix));
                if (s_n && *s_n != a->cols())
                    throw std::invalid_argument("--n does not match the matrix's column count");
            } else if (s_n) {
                a = min_cost_binary(*s_n, min_binary_rows(*s_n, 1.0));
            } else {
                throw std::invalid_argument("nonadaptive requires --matrix or --n");
            }
            n = a->cols();
            est = monte_carlo(*a, s_mu, s_noisy, s_trials, s_seed);
        } else {
            throw std::invalid_argument("unknown strategy '" + s_strategy + "'");
        }
        out << "strategy " << s_strategy << "\n";
        out << "n " << n << "\n";
        out << "mu " << detail::format_double(s_mu) << "\n";
        out << "noisy " << (s_noisy ? 1 : 0) << "\n";
        detail::print_estimate(out, est);
    });

    // sweep ------------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "cost sweep over doubling n, one CSV row per (n, strategy)");
    std::uint64_t w_nmin = 0, w_nmax = 0;
    double w_t = 1.0;
    std::string w_strategies;
    std::optional<double> w_tau, w_eps, w_mu;
    std::uint64_t w_seed = 0;
    std::string w_out;
    sweep->add_option("--n-min", w_nmin, "first n (doubling up to --n-max)")->required();
    sweep->add_option("--n-max", w_nmax, "last n")->required();
    sweep->add_option("--t", w_t, "rows factor");
    sweep->add_option("--strategies", w_strategies, "comma list of min-binary,bisection,gaussian,grid-packing")
        ->required();
    sweep->add_option("--tau", w_tau, "column norm cap (grid-packing)");
    sweep->add_option("--eps", w_eps, "target error (grid-packing)");
    sweep->add_option("--mu", w_mu, "amplitude (grid-packing)");
    sweep->add_option("--seed", w_seed, "seed echoed into rows");
    sweep->add_option("--out", w_out, "CSV output path")->required();
    sweep->callback([&] {
        SweepConfig cfg;
        if (w_nmin < 2 || w_nmax < w_nmin)
            throw std::invalid_argument("sweep requires 2 <= n-min <= n-max");
        for (std::uint64_t n = w_nmin; n <= w_nmax; n *= 2) {
            cfg.n_values.push_back(n);
            if (n > w_nmax / 2) break;
        }
        cfg.t_factor = w_t;
        std::size_t start = 0;
        while (start <= w_strategies.size()) {
            const std::size_t comma = w_strategies.find(',', start);
            const std::string item = w_strategies.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!item.empty()) cfg.strategies.push_back(parse_strategy(item));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (w_tau || w_eps || w_mu)
            cfg.packing = detail::packing_from_flags(w_tau, w_eps, w_mu);
        cfg.seed = w_seed;
        cfg.output_path = w_out;
        const auto rows = run_sweep(cfg);
        err << "wrote " << w_out << " (" << rows.size() << " rows)\n";
    });

    // lemmas -----------------------------------------------------------------
    auto* lemmas = app.add_subcommand("lemmas", "exhaustive bracket verdicts for the three numeric lemmas");
    std::uint32_t l_mmax = 64;
    lemmas->add_option("--m-max", l_mmax, "largest m for the exhaustive sweeps");
    lemmas->callback([&] {
        if (l_mmax < 3 || l_mmax > exact_binomial_cap)
            throw std::invalid_argument("--m-max must be in [3, " +
                                        std::to_string(exact_binomial_cap) + "]");
        std::uint64_t checked1 = 0, failed1 = 0;
        for (std::uint32_t m = 3; m <= l_mmax; ++m)
            for (std::uint32_t r = 1; 2 * r < m; ++r) {
                ++checked1;
                if (!lemma1_verdict(m, r).holds) ++failed1;
            }
        std::uint64_t checked2 = 0, failed2 = 0;
        for (std::uint32_t m = 2; m <= l_mmax; ++m)
            for (std::uint32_t r = 1; r < m; ++r) {
                ++checked2;
                if (!lemma2_verdict(m, r).holds) ++failed2;
            }
        std::uint64_t checked3 = 0, failed3 = 0;
        for (int d = 2; d <= 10; ++d)
            for (int j = 0; j < 112; ++j) {
                const double p = 0.001 + (0.499 - 0.001) * (j + 0.5) / 112.0;
                ++checked3;
                if (!lemma3_verdict(p, d).holds) ++failed3;
            }
        out << "lemma1 checked " << checked1 << " failed " << failed1 << "\n";
        out << "lemma2 checked " << checked2 << " failed " << failed2 << "\n";
        out << "lemma3 checked " << checked3 << " failed " << failed3 << "\n";
        const bool ok = failed1 == 0 && failed2 == 0 && failed3 == 0;
        out << (ok ? "all verdicts hold\n" : "VIOLATIONS FOUND\n");
        if (!ok) throw std::runtime_error("lemma verdicts failed");
    });

    // chart ------------------------------------------------------------------
    auto* chart = app.add_subcommand("chart", "SVG line chart of cost_over_nlogn vs log2 n from a sweep CSV");
    std::string h_csv, h_out;
    chart->add_option("--csv", h_csv, "sweep CSV path")->required();
    chart->add_option("--out", h_out, "SVG output path")->required();
    chart->callback([&] {
        const auto series = detail::chart_series_from_csv(detail::read_file(h_csv));
        detail::write_file(h_out, detail::render_chart_svg(series));
        err << "wrote " << h_out << "\n";
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << " (achievable capacity "
            << detail::format_double(e.achievable_capacity()) << ")\n";
        return 3;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace l0sense
