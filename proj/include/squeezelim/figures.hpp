#ifndef SQUEEZELIM_FIGURES_HPP
#define SQUEEZELIM_FIGURES_HPP

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "squeezelim/optimize.hpp"
#include "squeezelim/single_mode.hpp"
#include "squeezelim/spectrum.hpp"
#include "squeezelim/table.hpp"

// Built-in datasets for the four figure families. Fixed parameters go into a
// "parameters:" header line; grids that are our own choice are listed under
// "default grid:".
namespace squeezelim::figures
{

using NamedTable = std::pair<std::string, Table>;

inline const std::vector<std::string>& names()
{
    static const std::vector<std::string> n{"fig2", "fig3", "fig4", "fig5"};
    return n;
}

namespace detail
{

inline constexpr double t_c = 0.01;
inline const std::vector<double> beta_db_levels{6.0, 10.0, 15.0};

inline std::vector<double> eps_read_grid() { return log_grid(1e-4, 0.5, 50); }
inline const char* eps_read_grid_text = "eps_read log-spaced 1e-4..0.5, 50 points";

inline Table start(const std::string& panel, const std::string& parameters, const std::string& grid)
{
    Table t;
    t.comments = {std::string("squeezelim ") + version, "figure " + panel, "parameters: " + parameters,
                  "default grid: " + grid, sbp_definition};
    return t;
}

inline CavityParams cavity(double eps_int, double eps_read)
{
    CavityParams p;
    p.t_c = t_c;
    p.eps_int = eps_int;
    p.eps_read = eps_read;
    return p;
}

inline std::string list(const std::vector<double>& v)
{
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
    return s + "}";
}

using single_mode::limit_q0;
using single_mode::optimal_sensitivity;

}  // namespace detail

// Improvement of optimal internal squeezing over none, vs readout loss.
inline std::vector<NamedTable> fig2()
{
    using namespace detail;
    const auto grid = eps_read_grid();
    const std::vector<std::string> cols{"series",  "eps_read",        "improvement", "q_opt",
                                        "q_opt_over_q_th", "S_opt_norm", "S_q0_norm"};

    auto fill = [&](Table& t, double eps_int, double beta_db, double series) {
        const double beta = db_to_power(beta_db);
        for (double er : grid) {
            const auto p = cavity(eps_int, er);
            const auto opt = optimal_sensitivity(p, beta);
            const double s_q0 = limit_q0(p, beta);
            const double n0 = strain_prefactor(p);
            t.add_row({format_number(series), format_number(er), format_number(s_q0 / opt.sensitivity),
                       format_number(opt.q), format_number(opt.q / threshold_gain_sm(p)),
                       format_number(opt.sensitivity / n0), format_number(s_q0 / n0)});
        }
    };

    Table top = start("fig2_top", "T_c=0.01, Omega=0, eps_int=0.001, series=beta_db in " + list(beta_db_levels),
                      eps_read_grid_text);
    top.columns = cols;
    for (double db : beta_db_levels) fill(top, 1e-3, db, db);

    const std::vector<double> eps_int_levels{1e-4, 1e-3, 1e-2};
    Table bottom = start("fig2_bottom", "T_c=0.01, Omega=0, beta_db=15, series=eps_int in " + list(eps_int_levels),
                         eps_read_grid_text);
    bottom.columns = cols;
    for (double e : eps_int_levels) fill(bottom, e, 15.0, e);

    return {{"fig2_top.csv", std::move(top)}, {"fig2_bottom.csv", std::move(bottom)}};
}

// Internal squeezing alone: SNR gain and bandwidth reduction vs internal gain.
inline std::vector<NamedTable> fig3()
{
    using namespace detail;
    const std::vector<double> eps_read_levels{0.01, 0.05, 0.1, 0.2};
    const std::string params = "T_c=0.01, eps_int=0, beta=1, zeta=1, Omega=0, series=eps_read in " + list(eps_read_levels);
    const std::string grid = "q linear 0..0.999 q_th, 200 points";

    Table snr = start("fig3_snr", params, grid);
    snr.columns = {"eps_read", "q", "q_over_q_th", "snr_gain"};
    Table bw = start("fig3_bandwidth", params, grid);
    bw.columns = {"eps_read", "q", "q_over_q_th", "omega_hwhm", "bandwidth_ratio"};

    for (double er : eps_read_levels) {
        const auto p = cavity(0.0, er);
        const double q_th = threshold_gain_sm(p);
        const double b0 = bandwidth(p, SqueezeSettings{}, Model::single_mode).omega_hwhm;
        for (double q : linear_grid(0.0, 0.999 * q_th, 200)) {
            const SqueezeSettings s{q, 1.0, 1.0};
            const double b = bandwidth(p, s, Model::single_mode).omega_hwhm;
            snr.add_row({format_number(er), format_number(q), format_number(q / q_th),
                         format_number(snr_gain(p, s, 0.0, Model::single_mode))});
            bw.add_row({format_number(er), format_number(q), format_number(q / q_th), format_number(b),
                        format_number(b / b0)});
        }
    }
    return {{"fig3_snr.csv", std::move(snr)}, {"fig3_bandwidth.csv", std::move(bw)}};
}

// Optimal internal squeezing compared with at-threshold operation.
inline std::vector<NamedTable> fig4()
{
    using namespace detail;
    const std::vector<std::string> cols{"series", "eps_read", "eps_int", "improvement_vs_threshold", "q_opt",
                                        "q_opt_over_q_th"};
    auto row = [](Table& t, double series, const CavityParams& p, double beta) {
        const auto opt = optimal_sensitivity(p, beta);
        t.add_row({format_number(series), format_number(p.eps_read), format_number(p.eps_int),
                   format_number(single_mode::limit_threshold(p) / opt.sensitivity), format_number(opt.q),
                   format_number(opt.q / threshold_gain_sm(p))});
    };

    Table top = start("fig4_top", "T_c=0.01, Omega=0, eps_int=0.001, series=beta_db in " + list(beta_db_levels),
                      eps_read_grid_text);
    top.columns = cols;
    for (double db : beta_db_levels)
        for (double er : eps_read_grid()) row(top, db, cavity(1e-3, er), db_to_power(db));

    const std::vector<double> eps_read_levels{0.005, 0.01, 0.02};
    Table bottom = start("fig4_bottom", "T_c=0.01, Omega=0, beta_db=15, series=eps_read in " + list(eps_read_levels),
                         "eps_int log-spaced 1e-5..2e-2, 50 points");
    bottom.columns = cols;
    for (double er : eps_read_levels)
        for (double e : log_grid(1e-5, 2e-2, 50)) row(bottom, er, cavity(e, er), db_to_power(15.0));

    return {{"fig4_top.csv", std::move(top)}, {"fig4_bottom.csv", std::move(bottom)}};
}

// Bandwidth and sensitivity-bandwidth product at the optimal internal gain,
// against no squeezing ("standard") and external squeezing only ("baseline").
inline std::vector<NamedTable> fig5()
{
    using namespace detail;
    constexpr double eps_int = 1e-4;
    const std::string params =
        "T_c=0.01, eps_int=0.0001, zeta=1, q=q_opt, series=beta_db in " + list(beta_db_levels);
    const std::string grid = std::string(eps_read_grid_text) + ", plus the eps_read where q_opt=0 (unity_point=1)";

    Table bw_std = start("fig5_bandwidth_standard", params, grid);
    Table bw_base = start("fig5_bandwidth_baseline", params, grid);
    Table sbp_std = start("fig5_sbp_standard", params, grid);
    Table sbp_base = start("fig5_sbp_baseline", params, grid);
    bw_std.columns = bw_base.columns = {"series", "eps_read", "unity_point", "q_opt", "omega_hwhm", "bandwidth_ratio"};
    sbp_std.columns = {"series", "eps_read", "unity_point", "q_opt", "sbp_ratio", "external_only_sbp_ratio"};
    sbp_base.columns = {"series", "eps_read", "unity_point", "q_opt", "sbp_ratio"};

    for (double db : beta_db_levels) {
        const double beta = db_to_power(db);
        const auto unity = sbp_unity_eps_read(cavity(eps_int, 0.0), beta);
        if (!unity) throw std::logic_error("no sign change of q_opt for beta_db=" + format_number(db));
        sbp_base.comments.push_back("unity eps_read beta_db=" + format_number(db) + ": " + format_number(*unity));

        auto grid_points = eps_read_grid();
        grid_points.insert(std::upper_bound(grid_points.begin(), grid_points.end(), *unity), *unity);

        for (double er : grid_points) {
            const auto p = cavity(eps_int, er);
            const SqueezeSettings s{0.0, beta, 1.0};
            const auto standard = sbp_compare(p, s, SbpReference::standard, Model::single_mode);
            const auto baseline = sbp_compare(p, s, SbpReference::external_only, Model::single_mode);
            const std::string sv = format_number(db), erv = format_number(er), flag = er == *unity ? "1" : "0";
            const std::string q = format_number(standard.q_opt);
            bw_std.add_row({sv, erv, flag, q, format_number(standard.optimal.omega_hwhm),
                            format_number(standard.bandwidth_ratio)});
            bw_base.add_row({sv, erv, flag, q, format_number(baseline.optimal.omega_hwhm),
                             format_number(baseline.bandwidth_ratio)});
            sbp_std.add_row({sv, erv, flag, q, format_number(standard.sbp_ratio),
                             format_number(baseline.reference.sbp / standard.reference.sbp)});
            sbp_base.add_row({sv, erv, flag, q, format_number(baseline.sbp_ratio)});
        }
    }
    return {{"fig5_bandwidth_standard.csv", std::move(bw_std)},
            {"fig5_bandwidth_baseline.csv", std::move(bw_base)},
            {"fig5_sbp_standard.csv", std::move(sbp_std)},
            {"fig5_sbp_baseline.csv", std::move(sbp_base)}};
}

inline std::vector<NamedTable> figure(const std::string& name)
{
    if (name == "fig2") return fig2();
    if (name == "fig3") return fig3();
    if (name == "fig4") return fig4();
    if (name == "fig5") return fig5();
    throw std::invalid_argument("unknown figure '" + name + "' (expected fig2, fig3, fig4 or fig5)");
}

}  // namespace squeezelim::figures

#endif
