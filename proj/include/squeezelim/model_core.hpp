#ifndef SQUEEZELIM_MODEL_CORE_HPP
#define SQUEEZELIM_MODEL_CORE_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace squeezelim
{

// Raised whenever an evaluation is requested at or above the parametric
// threshold, or a denominator would vanish.
class ThresholdError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class BracketError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace constants
{
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double speed_of_light = 299792458.0; // m/s
}  // namespace constants

enum class Model
{
    single_mode,
    full
};

inline const char* to_string(Model m) { return m == Model::full ? "full" : "single_mode"; }

// Sensor cavity: coupling mirror, loss channels, and the fixed quantities that
// set the strain normalisation.
struct CavityParams
{
    double t_c = 0.01;       // power transmissivity of the coupling mirror
    double eps_int = 0.0;    // internal loss per round trip
    double eps_read = 0.0;   // readout loss (propagation + detection)
    double eps_inj = 0.0;    // injection loss on the external squeezed field
    double tau = 4000.0 / constants::speed_of_light;  // single-pass time [s]
    double length = 4000.0;  // arm length for strain referencing [m]
    double power = 750e3;    // intracavity power [W]
    double wavelength = 1064e-9;  // [m]
};

struct SqueezeSettings
{
    double q = 0.0;     // single-mode internal gain; > 0 squeezes the signal quadrature
    double beta = 1.0;  // external squeeze factor e^{2 r_ext}
    double zeta = 1.0;  // output amplification (power)
};

// Amplitude-domain description used by the two-photon solver. Transmissivities
// are always derived as sqrt(1 - r^2).
struct FullModelParams
{
    double r_c = 0.0;
    double r_b = 1.0;
    double r_int = 0.0;
    double r_i = 0.0;
    double r_d = 0.0;
    double gain = 1.0;  // single-pass amplitude gain G on the amplitude quadrature
    double tau = 1.0;
    double zeta = 1.0;
};

inline double transmissivity(double r) { return std::sqrt(1.0 - r * r); }

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
inline double power_to_db(double factor) { return 10.0 * std::log10(factor); }

// Strain normalisation. N0 = hbar lambda c / (8 pi P_c L^2) multiplies every
// dimensionless sensitivity; signal_scale = 8 pi P_c / (hbar lambda c) is the
// displacement-to-signal factor of the transfer function.
struct NormalizationConstants
{
    double hbar = constants::hbar;
    double c = constants::speed_of_light;
    double n0 = 0.0;
    double signal_scale = 0.0;

    static NormalizationConstants from(const CavityParams& p)
    {
        NormalizationConstants n;
        n.signal_scale = 8.0 * std::numbers::pi * p.power / (n.hbar * p.wavelength * n.c);
        n.n0 = 1.0 / (n.signal_scale * p.length * p.length);
        return n;
    }
};

inline double strain_prefactor(const CavityParams& p) { return NormalizationConstants::from(p).n0; }

inline double threshold_gain_sm(const CavityParams& p) { return p.t_c + p.eps_int; }

// Default limit above which the single-mode approximation is flagged.
inline constexpr double single_mode_validity_limit = 0.1;

struct ValidationReport
{
    std::vector<std::string> violations;
    bool threshold_violated = false;
    double threshold_margin = 0.0;  // q_th - |q|
    bool single_mode_warning = false;

    bool ok() const { return violations.empty(); }

    std::string describe() const
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < violations.size(); ++i) {
            if (i) os << "; ";
            os << violations[i];
        }
        return os.str();
    }
};

inline ValidationReport validate(const CavityParams& p, const SqueezeSettings& s)
{
    ValidationReport r;
    auto require = [&](bool cond, const std::string& what) {
        if (!cond) r.violations.push_back(what);
    };
    auto finite = [](double v) { return std::isfinite(v); };

    require(finite(p.t_c) && p.t_c > 0.0 && p.t_c < 1.0, "t_c must lie in (0,1)");
    require(finite(p.eps_int) && p.eps_int >= 0.0 && p.eps_int < 1.0, "eps_int must lie in [0,1)");
    require(finite(p.eps_read) && p.eps_read >= 0.0 && p.eps_read < 1.0, "eps_read must lie in [0,1)");
    require(finite(p.eps_inj) && p.eps_inj >= 0.0 && p.eps_inj < 1.0, "eps_inj must lie in [0,1)");
    require(finite(p.tau) && p.tau > 0.0, "tau must be positive");
    require(finite(p.length) && p.length > 0.0, "length must be positive");
    require(finite(p.power) && p.power > 0.0, "power must be positive");
    require(finite(p.wavelength) && p.wavelength > 0.0, "wavelength must be positive");
    require(finite(s.q), "q must be finite");
    require(finite(s.beta) && s.beta >= 1.0, "beta must be >= 1");
    require(finite(s.zeta) && s.zeta >= 1.0, "zeta must be >= 1");

    if (r.ok()) {
        const double q_th = threshold_gain_sm(p);
        r.threshold_margin = q_th - std::abs(s.q);
        if (r.threshold_margin <= 0.0) {
            r.threshold_violated = true;
            std::ostringstream os;
            os << "|q| = " << std::abs(s.q) << " at or above threshold q_th = " << q_th
               << " (margin " << r.threshold_margin << ")";
            r.violations.push_back(os.str());
        }
        r.single_mode_warning = p.t_c + p.eps_int + std::abs(s.q) > single_mode_validity_limit;
    }
    return r;
}

// Throws std::invalid_argument for range violations, ThresholdError for
// threshold violations.
inline void ensure_valid(const CavityParams& p, const SqueezeSettings& s)
{
    const auto r = validate(p, s);
    if (r.ok()) return;
    if (r.threshold_violated) throw ThresholdError(r.describe());
    throw std::invalid_argument(r.describe());
}

// Scale between the single-mode gain q and the amplitude exponent 4 ln G. It is
// chosen so that q = q_th maps exactly onto the full-model threshold
// G^2 r_c t_int = 1, and tends to 1 for small T_c + eps_int.
inline double gain_exponent_scale(const CavityParams& p)
{
    const double q_th = threshold_gain_sm(p);
    return -(std::log1p(-p.t_c) + std::log1p(-p.eps_int)) / q_th;
}

inline double amplitude_gain(const CavityParams& p, double q)
{
    return std::exp(gain_exponent_scale(p) * q / 4.0);
}

// Below threshold in both quadratures: max(G^2, G^-2) r_b r_c t_int < 1.
inline double threshold_product(const FullModelParams& fp)
{
    const double g2 = fp.gain * fp.gain;
    return std::max(g2, 1.0 / g2) * fp.r_b * fp.r_c * transmissivity(fp.r_int);
}

inline FullModelParams map_single_mode_to_full(const CavityParams& p, const SqueezeSettings& s)
{
    ensure_valid(p, s);
    FullModelParams fp;
    fp.r_c = std::sqrt(1.0 - p.t_c);
    fp.r_b = 1.0;  // back-mirror transmission folded into eps_int
    fp.r_int = std::sqrt(p.eps_int);
    fp.r_i = std::sqrt(p.eps_inj);
    fp.r_d = std::sqrt(p.eps_read);
    fp.gain = amplitude_gain(p, s.q);
    fp.tau = p.tau;
    fp.zeta = s.zeta;
    if (threshold_product(fp) >= 1.0) {
        std::ostringstream os;
        os << "mapped gain G = " << fp.gain << " is at or above the full-model threshold";
        throw ThresholdError(os.str());
    }
    return fp;
}

}  // namespace squeezelim

#endif
