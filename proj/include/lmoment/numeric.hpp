#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace lmoment {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Neumaier-compensated running sum.
template <class T>
class CompensatedSum {
public:
    void add(T x) noexcept
    {
        const T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(T x) noexcept
    {
        add(x);
        return *this;
    }
    T value() const noexcept { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

template <>
class CompensatedSum<cplx> {
public:
    void add(cplx x) noexcept
    {
        re_.add(x.real());
        im_.add(x.imag());
    }
    CompensatedSum& operator+=(cplx x) noexcept
    {
        add(x);
        return *this;
    }
    cplx value() const noexcept { return {re_.value(), im_.value()}; }

private:
    CompensatedSum<double> re_;
    CompensatedSum<double> im_;
};

/// e(x) = exp(2 pi i x), with the argument reduced mod 1 first.
inline cplx unit_exp(double turns) noexcept
{
    const double frac = turns - std::floor(turns);
    return std::polar(1.0, two_pi * frac);
}

/// e(num/den) for integers, reduced exactly before the trigonometric call.
inline cplx unit_exp_ratio(long long num, long long den) noexcept
{
    long long r = num % den;
    if (r < 0) r += den;
    return std::polar(1.0, two_pi * static_cast<double>(r) / static_cast<double>(den));
}

}  // namespace lmoment
