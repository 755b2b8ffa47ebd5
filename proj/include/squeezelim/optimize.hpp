#ifndef SQUEEZELIM_OPTIMIZE_HPP
#define SQUEEZELIM_OPTIMIZE_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>

#include "squeezelim/full_model.hpp"
#include "squeezelim/minimize.hpp"
#include "squeezelim/model_core.hpp"
#include "squeezelim/single_mode.hpp"

namespace squeezelim
{

inline double sensitivity(const CavityParams& p, const SqueezeSettings& s, double omega, Model model)
{
    return model == Model::full ? full::sensitivity(p, s, omega) : single_mode::sensitivity_sm(p, s, omega);
}

struct OptimizerOptions
{
    double abs_tol = 1e-10;
    std::size_t max_iter = 500;
    double guard = 1e-6;  // bracket is (-q_th + guard q_th, q_th - guard q_th)
};

struct OptimizationResult
{
    double q_star = 0.0;
    double s_star = 0.0;
    std::size_t n_evals = 0;
    bool converged = false;
    bool clamped = false;
};

// Minimises the strain sensitivity over the internal gain q, holding beta and
// zeta (and every loss) fixed.
inline OptimizationResult numeric_optimal_gain(const CavityParams& p, const SqueezeSettings& s, double omega,
                                               Model model, const OptimizerOptions& opts = {})
{
    ensure_valid(p, SqueezeSettings{0.0, s.beta, s.zeta});
    const double q_th = threshold_gain_sm(p);
    const double lo = -q_th * (1.0 - opts.guard);
    const double hi = q_th * (1.0 - opts.guard);

    auto objective = [&](double q) { return sensitivity(p, SqueezeSettings{q, s.beta, s.zeta}, omega, model); };
    const auto m = numeric::golden_section_minimize(objective, lo, hi, opts.abs_tol, opts.max_iter);
    if (!m.converged) {
        std::ostringstream os;
        os << "golden-section search did not reach tolerance " << opts.abs_tol << " in " << opts.max_iter
           << " iterations";
        throw NonConvergence(os.str());
    }

    OptimizationResult r;
    r.q_star = m.x;
    r.s_star = m.fx;
    r.n_evals = m.n_evals;
    r.converged = true;
    r.clamped = (m.x - lo) <= 2.0 * opts.abs_tol || (hi - m.x) <= 2.0 * opts.abs_tol;
    return r;
}

struct BandwidthResult
{
    double omega_hwhm = 0.0;  // rad/s
    double s_peak = 0.0;      // S_hh(0)
    double sbp = 0.0;         // omega_hwhm / S_hh(0)
};

// Half-width at half-maximum of the sensitivity: the W > 0 where S_hh doubles.
inline BandwidthResult bandwidth(const CavityParams& p, const SqueezeSettings& s, Model model,
                                 double rel_tol = 1e-12)
{
    ensure_valid(p, s);
    BandwidthResult r;
    r.s_peak = sensitivity(p, s, 0.0, model);
    auto excess = [&](double w) { return sensitivity(p, s, w, model) - 2.0 * r.s_peak; };

    const double edge = std::numbers::pi / (4.0 * p.tau);
    double lo = 0.0;
    double hi = 1.0 / (100.0 * p.tau);
    while (excess(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > edge) {
            hi = edge;
            if (excess(hi) < 0.0) {
                std::ostringstream os;
                os << "sensitivity does not double below pi/(4 tau) = " << edge << " rad/s";
                throw BracketError(os.str());
            }
            break;
        }
    }
    r.omega_hwhm = numeric::bisect_root(excess, lo, hi, rel_tol);
    r.sbp = r.omega_hwhm / r.s_peak;
    return r;
}

inline constexpr double snr_gain_cap = 1e12;

// S_hh(q = 0) / S_hh(q) at the given frequency; > 1 is an improvement.
inline double snr_gain(const CavityParams& p, const SqueezeSettings& s, double omega, Model model)
{
    const double reference = sensitivity(p, SqueezeSettings{0.0, s.beta, s.zeta}, omega, model);
    const double value = sensitivity(p, s, omega, model);
    if (value <= reference / snr_gain_cap) return snr_gain_cap;
    return reference / value;
}

enum class SbpReference
{
    standard,      // no internal or external squeezing
    external_only  // same beta and zeta, q = 0
};

// Optimal internal gain for (beta, zeta): analytic in single mode, numeric for
// the full model.
inline double optimal_gain(const CavityParams& p, const SqueezeSettings& s, Model model)
{
    if (model == Model::full) return numeric_optimal_gain(p, s, 0.0, model).q_star;
    bool clamped = false;
    return single_mode::clamp_gain(p, single_mode::optimal_gain_unclamped(p, s.beta, s.zeta), clamped);
}

struct SbpComparison
{
    double q_opt = 0.0;
    BandwidthResult optimal;
    BandwidthResult reference;
    double sbp_ratio = 0.0;
    double bandwidth_ratio = 0.0;
};

inline SbpComparison sbp_compare(const CavityParams& p, const SqueezeSettings& s, SbpReference ref, Model model)
{
    SbpComparison c;
    c.q_opt = optimal_gain(p, s, model);
    c.optimal = bandwidth(p, SqueezeSettings{c.q_opt, s.beta, s.zeta}, model);
    const SqueezeSettings ref_settings =
        ref == SbpReference::standard ? SqueezeSettings{0.0, 1.0, 1.0} : SqueezeSettings{0.0, s.beta, s.zeta};
    c.reference = bandwidth(p, ref_settings, model);
    c.sbp_ratio = c.optimal.sbp / c.reference.sbp;
    c.bandwidth_ratio = c.optimal.omega_hwhm / c.reference.omega_hwhm;
    return c;
}

inline double sbp_gain(const CavityParams& p, const SqueezeSettings& s, SbpReference ref,
                       Model model = Model::single_mode)
{
    return sbp_compare(p, s, ref, model).sbp_ratio;
}

// Readout loss at which optimal internal squeezing leaves the sensitivity-
// bandwidth product unchanged relative to external squeezing alone: the point
// where q_opt = 0.
inline std::optional<double> sbp_unity_eps_read(const CavityParams& p, double beta, double zeta = 1.0)
{
    return single_mode::optimal_gain_sign_change(p, beta, zeta);
}

}  // namespace squeezelim

#endif
