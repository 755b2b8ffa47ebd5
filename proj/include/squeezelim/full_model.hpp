#ifndef SQUEEZELIM_FULL_MODEL_HPP
#define SQUEEZELIM_FULL_MODEL_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>

#include "squeezelim/model_core.hpp"

namespace squeezelim::full
{

using complex = std::complex<double>;

// Input ports of the two-photon model. back_mirror is the vacuum entering
// through the back mirror (zero coupling when r_b = 1).
enum class Port : std::size_t
{
    vacuum = 0,      // injected (squeezed) field v
    internal_loss,   // n_int
    injection_loss,  // n_i
    back_mirror,     // n_c
    readout_loss,    // n_d
    signal,          // s, phase quadrature only
    count
};

inline constexpr std::size_t port_count = static_cast<std::size_t>(Port::count);

enum class Quadrature
{
    amplitude,  // d^x
    phase       // d^y, the homodyne readout
};

struct PortCoefficients
{
    double omega = 0.0;
    std::array<complex, port_count> x{};
    std::array<complex, port_count> y{};

    const complex& at(Quadrature q, Port p) const
    {
        const auto i = static_cast<std::size_t>(p);
        return q == Quadrature::amplitude ? x[i] : y[i];
    }
};

inline constexpr double denominator_guard = 1e-12;

inline void ensure_below_threshold(const FullModelParams& fp)
{
    if (!(fp.gain > 0.0) || threshold_product(fp) >= 1.0) {
        std::ostringstream os;
        os << "full model at or above threshold: max(G^2,G^-2) r_b r_c t_int = " << threshold_product(fp);
        throw ThresholdError(os.str());
    }
}

// Output coefficients of d^x and d^y for every input port, obtained by solving
//   b = a e^{2i W tau} G^{+-2} r_b t_int + (sources),  a = r_c b + t_c (t_i v + r_i n_i),
//   d = zeta^{-+1/2} t_d (t_c b - r_c (t_i v + r_i n_i)) + r_d n_d
// for the amplitude (upper sign in G, lower in zeta) and phase quadrature.
inline PortCoefficients io_coefficients(const FullModelParams& fp, double omega)
{
    ensure_below_threshold(fp);

    const double t_c = transmissivity(fp.r_c);
    const double t_b = transmissivity(fp.r_b);
    const double t_int = transmissivity(fp.r_int);
    const double t_i = transmissivity(fp.r_i);
    const double t_d = transmissivity(fp.r_d);

    const complex round_trip = std::polar(1.0, 2.0 * omega * fp.tau);
    const complex single_pass = std::polar(1.0, omega * fp.tau);

    PortCoefficients pc;
    pc.omega = omega;

    auto fill = [&](std::array<complex, port_count>& out, double g, double amp, bool with_signal) {
        // g is the single-pass field gain of this quadrature (G or 1/G)
        const double g2 = g * g;
        const complex den = 1.0 / g2 - fp.r_c * fp.r_b * t_int * round_trip;
        if (std::abs(den) < denominator_guard) throw ThresholdError("vanishing cavity denominator");
        const complex pre = amp * t_d / den;
        const complex reflect = -fp.r_c / g2 + fp.r_b * t_int * round_trip;

        out[static_cast<std::size_t>(Port::vacuum)] = pre * t_i * reflect;
        out[static_cast<std::size_t>(Port::injection_loss)] = pre * fp.r_i * reflect;
        out[static_cast<std::size_t>(Port::internal_loss)] = pre * t_c * fp.r_int / g2;
        out[static_cast<std::size_t>(Port::back_mirror)] = pre * t_c * t_b * t_int * single_pass / g;
        out[static_cast<std::size_t>(Port::readout_loss)] = fp.r_d;
        out[static_cast<std::size_t>(Port::signal)] =
            with_signal ? pre * t_c * t_int * single_pass / g : complex{};
    };

    const double sqrt_zeta = std::sqrt(fp.zeta);
    fill(pc.x, fp.gain, 1.0 / sqrt_zeta, false);
    fill(pc.y, 1.0 / fp.gain, sqrt_zeta, true);
    return pc;
}

// Spectral density of the injected field in each quadrature: anti-squeezed in
// amplitude (beta), squeezed in phase (1/beta).
inline double injected_density(Quadrature q, double beta)
{
    return q == Quadrature::amplitude ? beta : 1.0 / beta;
}

// Independent route: total output variance as sum over ports of S_in |coeff|^2.
inline double noise_psd_sum(const FullModelParams& fp, double beta, double omega,
                            Quadrature quad = Quadrature::phase)
{
    const auto pc = io_coefficients(fp, omega);
    double total = 0.0;
    for (std::size_t i = 0; i < port_count; ++i) {
        const auto port = static_cast<Port>(i);
        if (port == Port::signal) continue;
        const double density = port == Port::vacuum ? injected_density(quad, beta) : 1.0;
        total += density * std::norm(pc.at(quad, port));
    }
    return total;
}

struct QuadratureVariances
{
    double amplitude = 0.0;
    double phase = 0.0;
};

inline QuadratureVariances output_variances(const FullModelParams& fp, double beta, double omega)
{
    return {noise_psd_sum(fp, beta, omega, Quadrature::amplitude),
            noise_psd_sum(fp, beta, omega, Quadrature::phase)};
}

// |D(W)|^2 = G^4 + R_b R_c (1-eps_int) - 2 G^2 sqrt(R_b R_c (1-eps_int)) cos 2W tau
inline double denominator_sq(const FullModelParams& fp, double omega)
{
    const double g2 = fp.gain * fp.gain;
    const double loop = fp.r_b * fp.r_c * transmissivity(fp.r_int);
    return g2 * g2 + loop * loop - 2.0 * g2 * loop * std::cos(2.0 * omega * fp.tau);
}

// Closed-form phase-quadrature noise
//   S_n = 1 - (1-eps_read)/|D|^2 (S1 eps_int + S2 + S3 sqrt(R_b R_c (1-eps_int)) cos 2W tau).
// S2 carries +G^4 R_c inside the bracket; this is the sign that matches the
// coefficient sum and gives S_n = 1 for a passive cavity.
inline double noise_psd_closed(const FullModelParams& fp, double beta, double omega)
{
    ensure_below_threshold(fp);
    const double d2 = denominator_sq(fp, omega);
    if (d2 < denominator_guard * denominator_guard) throw ThresholdError("vanishing cavity denominator");

    const double g2 = fp.gain * fp.gain;
    const double g4 = g2 * g2;
    const double R_c = fp.r_c * fp.r_c;
    const double R_b = fp.r_b * fp.r_b;
    const double T_c = 1.0 - R_c;
    const double T_b = 1.0 - R_b;
    const double eps_int = fp.r_int * fp.r_int;
    const double eps_i = fp.r_i * fp.r_i;
    const double eps_read = fp.r_d * fp.r_d;
    const double z = fp.zeta;
    const double injected = eps_i + (1.0 - eps_i) / beta;  // = beta^-1 (1 - (1-beta) eps_i)

    const double s1 = -R_b * R_c + z * (g2 * T_c * (T_b - g2) + R_b * injected);
    const double s2 = g4 + R_b * R_c - z * (injected * (R_b + g4 * R_c) + g2 * T_b * T_c);
    const double s3 = 2.0 * g2 * (-1.0 + z * injected);
    const double loop = std::sqrt(R_b * R_c * (1.0 - eps_int));

    return 1.0 - (1.0 - eps_read) / d2 * (s1 * eps_int + s2 + s3 * loop * std::cos(2.0 * omega * fp.tau));
}

// |T(W)|^2 = zeta G^2 T_c (1-eps_read)(1-eps_int) / |D|^2, without the 8 pi P_c/(hbar lambda c) factor.
inline double transfer_sq_closed(const FullModelParams& fp, double omega)
{
    ensure_below_threshold(fp);
    const double d2 = denominator_sq(fp, omega);
    if (d2 < denominator_guard * denominator_guard) throw ThresholdError("vanishing cavity denominator");
    const double T_c = 1.0 - fp.r_c * fp.r_c;
    const double eps_int = fp.r_int * fp.r_int;
    const double eps_read = fp.r_d * fp.r_d;
    return fp.zeta * fp.gain * fp.gain * T_c * (1.0 - eps_read) * (1.0 - eps_int) / d2;
}

// G at which the amplitude-quadrature denominator vanishes at W = 0.
inline double threshold_gain(const FullModelParams& fp)
{
    return 1.0 / std::sqrt(fp.r_b * fp.r_c * transmissivity(fp.r_int));
}

// Exponent with e^{-x} = r_b r_c sqrt(1-eps_int); equals 2 ln G_th.
inline double threshold_exponent(const FullModelParams& fp)
{
    return -std::log(fp.r_b * fp.r_c * transmissivity(fp.r_int));
}

// Strain-referred sensitivity of the full model for a single-mode parameter set.
inline double sensitivity(const CavityParams& p, const SqueezeSettings& s, double omega)
{
    const auto fp = map_single_mode_to_full(p, s);
    const double noise = noise_psd_closed(fp, s.beta, omega);
    const double transfer = transfer_sq_closed(fp, omega);
    return strain_prefactor(p) * noise / transfer;
}

}  // namespace squeezelim::full

#endif
