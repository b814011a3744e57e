#pragma once

/// Complex log-gamma by shifted Stirling series plus reflection.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "lmoment/error.hpp"
#include "lmoment/numeric.hpp"

namespace lmoment {

namespace detail {

// B_{2k} / (2k (2k-1)) for k = 1..10
inline constexpr std::array<double, 10> stirling_coeffs = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
};

inline constexpr double stirling_radius = 15.0;

inline bool is_nonpositive_integer(cplx z)
{
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

inline cplx log_gamma_right(cplx z)
{
    // Re z >= 1/2 here, so the shifted argument stays well inside the sector.
    cplx shift_log{0.0, 0.0};
    while (std::abs(z) < stirling_radius) {
        shift_log += std::log(z);
        z += 1.0;
    }
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series{0.0, 0.0};
    cplx power = inv;
    for (double c : stirling_coeffs) {
        series += c * power;
        power *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(two_pi) + series - shift_log;
}

// log sin(pi z) without overflow for large |Im z|.
inline cplx log_sin_pi(cplx z)
{
    const double y = z.imag();
    const cplx i{0.0, 1.0};
    if (y > 1.0) {
        const cplx w = std::exp(two_pi * i * z);
        return -i * pi * z + std::log(cplx(0.0, 0.5)) + std::log(1.0 - w);
    }
    if (y < -1.0) {
        const cplx w = std::exp(-two_pi * i * z);
        return i * pi * z + std::log(cplx(0.0, -0.5)) + std::log(1.0 - w);
    }
    return std::log(std::sin(pi * z));
}

}  // namespace detail

/// log Gamma(z); the imaginary part is only determined mod 2 pi.
inline cplx log_gamma(cplx z)
{
    if (detail::is_nonpositive_integer(z))
        throw PoleError("Gamma has a pole at " + std::to_string(z.real()));
    if (z.real() >= 0.5) return detail::log_gamma_right(z);
    return std::log(pi) - detail::log_sin_pi(z) - detail::log_gamma_right(1.0 - z);
}

inline cplx complex_gamma(cplx z) { return std::exp(log_gamma(z)); }

/// Upper bound for log|Gamma(z)|, Re z > 0, from Stirling with the Binet remainder
/// bounded by 1/(6|z|).
inline double log_abs_gamma_upper(cplx z)
{
    const cplx main = (z - 0.5) * std::log(z) - z;
    return main.real() + 0.5 * std::log(two_pi) + 1.0 / (6.0 * std::abs(z));
}

/// Lower bound for log|Gamma(z)|, Re z > 0.
inline double log_abs_gamma_lower(cplx z)
{
    const cplx main = (z - 0.5) * std::log(z) - z;
    return main.real() + 0.5 * std::log(two_pi) - 1.0 / (6.0 * std::abs(z));
}

/// Upper bound for log|1/Gamma(w)|, any w with Re(1-w) > 0 or Re w > 0.
inline double log_abs_rgamma_upper(cplx w)
{
    if (w.real() > 0.0) return -log_abs_gamma_lower(w);
    const double y = std::abs(w.imag());
    // 1/Gamma(w) = Gamma(1-w) sin(pi w) / pi and |sin(pi w)| <= cosh(pi Im w).
    const double log_cosh = pi * y + std::log1p(std::exp(-2.0 * pi * y)) - std::log(2.0);
    return log_abs_gamma_upper(1.0 - w) + log_cosh - std::log(pi);
}

}  // namespace lmoment
