#ifndef SQUEEZELIM_SINGLE_MODE_HPP
#define SQUEEZELIM_SINGLE_MODE_HPP

#include <cmath>
#include <optional>
#include <stdexcept>

#include "squeezelim/minimize.hpp"
#include "squeezelim/model_core.hpp"

namespace squeezelim::single_mode
{

// D(W) = (q + T_c + eps_int)^2 + 16 W^2 tau^2
inline double denominator(const CavityParams& p, double q, double omega)
{
    const double sum = q + p.t_c + p.eps_int;
    const double wt = omega * p.tau;
    return sum * sum + 16.0 * wt * wt;
}

// (q - T_c + eps_int)^2 + 16 W^2 tau^2: the squeezed-port reflection numerator.
inline double reflection_numerator(const CavityParams& p, double q, double omega)
{
    const double diff = q - p.t_c + p.eps_int;
    const double wt = omega * p.tau;
    return diff * diff + 16.0 * wt * wt;
}

// Spectral density of the injected field after injection loss, phase quadrature.
inline double injected_density(const CavityParams& p, double beta)
{
    return p.eps_inj + (1.0 - p.eps_inj) / beta;
}

// Noise spectral density for the reduced case (no injection loss, no output
// amplifier):
//   S_n = [D - 4 q T_c (1-eps_read) - (1 - 1/beta)(1-eps_read)((q-T_c+eps_int)^2 + 16 W^2 tau^2)] / D.
inline double noise_sm(const CavityParams& p, const SqueezeSettings& s, double omega)
{
    ensure_valid(p, s);
    if (p.eps_inj != 0.0 || s.zeta != 1.0)
        throw std::invalid_argument("noise_sm covers eps_inj = 0 and zeta = 1 only; use noise_sm_general");
    const double d = denominator(p, s.q, omega);
    const double m = reflection_numerator(p, s.q, omega);
    const double keep = 1.0 - p.eps_read;
    return (d - 4.0 * s.q * p.t_c * keep - (1.0 - 1.0 / s.beta) * keep * m) / d;
}

// Same model with injection loss and output amplification:
//   S_n = [eps_read D + zeta (1-eps_read)(4 T_c eps_int + S_in M)] / D.
// Reduces algebraically to noise_sm when eps_inj = 0, zeta = 1.
inline double noise_sm_general(const CavityParams& p, const SqueezeSettings& s, double omega)
{
    ensure_valid(p, s);
    const double d = denominator(p, s.q, omega);
    const double m = reflection_numerator(p, s.q, omega);
    const double cavity = 4.0 * p.t_c * p.eps_int + injected_density(p, s.beta) * m;
    return (p.eps_read * d + s.zeta * (1.0 - p.eps_read) * cavity) / d;
}

// |T(W)|^2 = zeta (8 pi P_c / hbar lambda c) 4 T_c (1-eps_read) / D(W)
inline double transfer_sq_sm(const CavityParams& p, const SqueezeSettings& s, double omega)
{
    ensure_valid(p, s);
    const double scale = NormalizationConstants::from(p).signal_scale;
    return s.zeta * scale * 4.0 * p.t_c * (1.0 - p.eps_read) / denominator(p, s.q, omega);
}

// Strain PSD: noise-to-signal ratio divided by L^2.
inline double sensitivity_sm(const CavityParams& p, const SqueezeSettings& s, double omega)
{
    return noise_sm_general(p, s, omega) / transfer_sq_sm(p, s, omega) / (p.length * p.length);
}

// Lossless bound N0 (T_c - q)^2 / (beta T_c).
inline double qcrb(const CavityParams& p, const SqueezeSettings& s)
{
    const double diff = p.t_c - s.q;
    return strain_prefactor(p) * diff * diff / (s.beta * p.t_c);
}

// The single-mode model evaluated without loss: N0 (T_c - q)^2 / (4 beta T_c).
// Differs from qcrb() by exactly a factor 4.
inline double qcrb_model(const CavityParams& p, const SqueezeSettings& s)
{
    const double diff = p.t_c - s.q;
    return strain_prefactor(p) * diff * diff / (4.0 * s.beta * p.t_c);
}

// Model sensitivity without internal squeezing at W = 0 for a given beta.
inline double limit_q0(const CavityParams& p, double beta)
{
    return sensitivity_sm(p, SqueezeSettings{0.0, beta, 1.0}, 0.0);
}

// Closed-form q = 0 references. The beta = 1 form is the loss-induced part
// (limit_q0(1) - N0 T_c / 4); the beta -> inf form equals limit_q0 exactly.
inline double ref_q0_no_squeezing(const CavityParams& p)
{
    const double e = p.eps_int, er = p.eps_read, tc = p.t_c;
    return strain_prefactor(p) / (1.0 - er) * (tc / 4.0 * er + e / 2.0 + e * e / (4.0 * tc));
}

inline double ref_q0_infinite_squeezing(const CavityParams& p)
{
    const double e = p.eps_int, er = p.eps_read, tc = p.t_c;
    return strain_prefactor(p) / (1.0 - er) * (tc / 4.0 * er + (2.0 - er) / 2.0 * e + er * e * e / (4.0 * tc));
}

// At-threshold reference (beta independent).
inline double limit_threshold(const CavityParams& p)
{
    const double e = p.eps_int, er = p.eps_read, tc = p.t_c;
    return strain_prefactor(p) / (1.0 - er) * (tc * er + e + e * e / (4.0 * tc));
}

struct OptimalPoint
{
    double sensitivity = 0.0;
    double q = 0.0;          // clamped into (-q_th, q_th)
    double q_unclamped = 0.0;
    bool clamped = false;
};

inline constexpr double threshold_guard = 1e-6;  // relative to q_th

inline double clamp_gain(const CavityParams& p, double q, bool& clamped)
{
    const double q_th = threshold_gain_sm(p);
    const double lim = q_th * (1.0 - threshold_guard);
    clamped = q >= lim || q <= -lim;
    return std::clamp(q, -lim, lim);
}

// Minimiser of the W = 0 sensitivity over q, including injection loss (from p)
// and output amplification:
//   q_opt = T_c (S_in - k)/(S_in + k) - eps_int,  k = eps_read / (zeta (1-eps_read)).
// With eps_inj = 0, zeta = 1 this is T_c (1 - 2 beta eps_read / (1 + eps_read (beta-1))) - eps_int.
inline double optimal_gain_unclamped(const CavityParams& p, double beta, double zeta = 1.0)
{
    const double s_in = injected_density(p, beta);
    const double k = p.eps_read / (zeta * (1.0 - p.eps_read));
    return p.t_c * (s_in - k) / (s_in + k) - p.eps_int;
}

// Alternative optimal-gain expression with denominator beta (1-eps_r) - eps_r.
// It does not minimise the model; kept only so the report can show the difference.
inline double optimal_gain_uncorrected(const CavityParams& p, double beta)
{
    const double er = p.eps_read;
    return p.t_c * (1.0 - 2.0 * er / (beta * (1.0 - er) - er)) - p.eps_int;
}

// S_opt = N0 (T_c eps_read / (1 + eps_read (beta - 1)) + eps_int) at W = 0.
inline OptimalPoint optimal_sensitivity(const CavityParams& p, double beta)
{
    OptimalPoint o;
    const double er = p.eps_read;
    o.sensitivity = strain_prefactor(p) * (p.t_c * er / (1.0 + er * (beta - 1.0)) + p.eps_int);
    CavityParams no_inj = p;
    no_inj.eps_inj = 0.0;
    o.q_unclamped = optimal_gain_unclamped(no_inj, beta);
    o.q = clamp_gain(p, o.q_unclamped, o.clamped);
    return o;
}

// Optimised sensitivity with injection loss and output amplification:
//   N0 [ T_c eps_r (1 - eps_i (1-beta)) / (beta eps_r + zeta (1-eps_r)(1-(1-beta) eps_i)) + eps_int
//        + 4 W^2 tau^2 / (T_c beta zeta (1-eps_r)) (beta eps_r + zeta (1-eps_r)(1-(1-beta) eps_i)) ]
inline double full_opt_sensitivity(const CavityParams& p, double beta, double zeta, double omega)
{
    const double er = p.eps_read, ei = p.eps_inj, tc = p.t_c;
    const double injected = 1.0 - (1.0 - beta) * ei;  // beta * S_in
    const double mix = beta * er + zeta * (1.0 - er) * injected;
    const double wt = omega * p.tau;
    const double bracket = tc * er * injected / mix + p.eps_int + 4.0 * wt * wt / (tc * beta * zeta * (1.0 - er)) * mix;
    return strain_prefactor(p) * bracket;
}

// beta -> inf limit of full_opt_sensitivity at W = 0.
inline double injection_limit(const CavityParams& p, double zeta)
{
    const double er = p.eps_read, ei = p.eps_inj;
    const double den = er + zeta * ei * (1.0 - er);
    const double first = den > 0.0 ? p.t_c * er * ei / den : 0.0;
    return strain_prefactor(p) * (first + p.eps_int);
}

// Decoherence floor N0 eps_int (beta -> inf, or zeta -> inf).
inline double decoherence_limit(const CavityParams& p) { return strain_prefactor(p) * p.eps_int; }

// q = 0 with zeta, beta -> inf.
inline double limit_output_amp_only(const CavityParams& p)
{
    const double d = p.t_c - p.eps_int;
    return strain_prefactor(p) * (p.eps_int + p.eps_inj * d * d / (4.0 * p.t_c));
}

// Readout loss at which the optimal gain changes sign, if any, for the given
// cavity with eps_read replaced.
inline std::optional<double> optimal_gain_sign_change(const CavityParams& p, double beta, double zeta = 1.0)
{
    auto q_of = [&](double er) {
        CavityParams c = p;
        c.eps_read = er;
        return optimal_gain_unclamped(c, beta, zeta);
    };
    const double hi = 1.0 - 1e-12;
    if (q_of(0.0) <= 0.0 || q_of(hi) >= 0.0) return std::nullopt;
    return numeric::bisect_root(q_of, 0.0, hi, 1e-14, 400, 1e-16);
}

inline std::optional<double> optimal_gain_uncorrected_sign_change(const CavityParams& p, double beta)
{
    auto q_of = [&](double er) {
        CavityParams c = p;
        c.eps_read = er;
        return optimal_gain_uncorrected(c, beta);
    };
    const double hi = beta / (beta + 1.0) * (1.0 - 1e-12);
    if (q_of(0.0) <= 0.0 || q_of(hi) >= 0.0) return std::nullopt;
    return numeric::bisect_root(q_of, 0.0, hi, 1e-14, 400, 1e-16);
}

struct LimitReport
{
    double n0 = 0.0;
    double qcrb = 0.0;
    double qcrb_model = 0.0;
    double qcrb_ratio = 0.0;  // qcrb / qcrb_model
    double ref_q0 = 0.0;      // model, q = 0, this beta
    double ref_no_isqz_nosqz = 0.0;
    double ref_no_isqz_infsqz = 0.0;
    double at_threshold = 0.0;
    double optimal = 0.0;
    double q_opt = 0.0;
    bool q_opt_clamped = false;
    double q_opt_uncorrected = 0.0;
    double decoherence_limit = 0.0;
    double full_opt = 0.0;
    double inj_limit = 0.0;
    double zeta_inf_limit = 0.0;
    double output_amp_only_limit = 0.0;
    std::optional<double> q_opt_sign_change_eps_read;
    std::optional<double> q_opt_uncorrected_sign_change_eps_read;
};

inline LimitReport limit_report(const CavityParams& p, const SqueezeSettings& s, double omega = 0.0)
{
    LimitReport r;
    r.n0 = strain_prefactor(p);
    r.qcrb = qcrb(p, s);
    r.qcrb_model = qcrb_model(p, s);
    r.qcrb_ratio = r.qcrb_model > 0.0 ? r.qcrb / r.qcrb_model : 4.0;
    r.ref_q0 = limit_q0(p, s.beta);
    r.ref_no_isqz_nosqz = ref_q0_no_squeezing(p);
    r.ref_no_isqz_infsqz = ref_q0_infinite_squeezing(p);
    r.at_threshold = limit_threshold(p);
    const auto opt = optimal_sensitivity(p, s.beta);
    r.optimal = opt.sensitivity;
    r.q_opt = opt.q;
    r.q_opt_clamped = opt.clamped;
    r.q_opt_uncorrected = optimal_gain_uncorrected(p, s.beta);
    r.decoherence_limit = decoherence_limit(p);
    r.full_opt = full_opt_sensitivity(p, s.beta, s.zeta, omega);
    r.inj_limit = injection_limit(p, s.zeta);
    r.zeta_inf_limit = decoherence_limit(p);
    r.output_amp_only_limit = limit_output_amp_only(p);
    CavityParams no_inj = p;
    no_inj.eps_inj = 0.0;
    r.q_opt_sign_change_eps_read = optimal_gain_sign_change(no_inj, s.beta);
    r.q_opt_uncorrected_sign_change_eps_read = optimal_gain_uncorrected_sign_change(p, s.beta);
    return r;
}

}  // namespace squeezelim::single_mode

#endif
