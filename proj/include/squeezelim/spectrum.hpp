#ifndef SQUEEZELIM_SPECTRUM_HPP
#define SQUEEZELIM_SPECTRUM_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "squeezelim/optimize.hpp"

namespace squeezelim
{

struct SpectrumMeta
{
    CavityParams cavity;
    SqueezeSettings squeeze;
    Model model = Model::single_mode;
};

struct SensitivitySpectrum
{
    std::vector<double> omega;
    std::vector<double> s_hh;
    SpectrumMeta meta;
};

inline std::vector<double> linear_grid(double start, double stop, std::size_t points)
{
    if (points < 2 || !(start < stop)) throw std::invalid_argument("grid needs start < stop and >= 2 points");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    g.back() = stop;
    return g;
}

inline std::vector<double> log_grid(double start, double stop, std::size_t points)
{
    if (!(start > 0.0)) throw std::invalid_argument("logarithmic grid needs a positive start");
    auto g = linear_grid(std::log(start), std::log(stop), points);
    for (auto& v : g) v = std::exp(v);
    g.front() = start;
    g.back() = stop;
    return g;
}

// 200 log-spaced points from 1/(1000 tau) to 1/(2 tau).
inline std::vector<double> default_frequency_grid(const CavityParams& p)
{
    return log_grid(1.0 / (1000.0 * p.tau), 1.0 / (2.0 * p.tau), 200);
}

inline SensitivitySpectrum compute_spectrum(const CavityParams& p, const SqueezeSettings& s, Model model,
                                            std::span<const double> omega)
{
    for (std::size_t i = 1; i < omega.size(); ++i)
        if (!(omega[i] > omega[i - 1])) throw std::invalid_argument("frequency grid must be strictly increasing");
    ensure_valid(p, s);

    SensitivitySpectrum out;
    out.meta = {p, s, model};
    out.omega.assign(omega.begin(), omega.end());
    out.s_hh.reserve(omega.size());
    for (double w : omega) out.s_hh.push_back(sensitivity(p, s, w, model));
    return out;
}

}  // namespace squeezelim

#endif
