#pragma once

/// Fast V1/V2 evaluation by piecewise Chebyshev interpolation in log x.
///
/// Each panel is checked against direct contour evaluation at three interior
/// points and split until the check passes. Past x_hi the weight is below
/// 1e-22 and decays monotonically, so it is returned as 0.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "lmoment/error.hpp"
#include "lmoment/weights.hpp"

namespace lmoment {

class WeightTable {
public:
    static constexpr int degree = 24;
    static constexpr double default_x_lo = 1e-5;
    static constexpr double check_tolerance = 1e-12;
    static constexpr double negligible = 1e-22;

    WeightTable(WeightKind kind, double T_f, double x_lo = default_x_lo, double contour_tol = 1e-12)
        : kind_(kind), T_(T_f), tol_(contour_tol), u_lo_(std::log(x_lo))
    {
        if (kind != WeightKind::V1 && kind != WeightKind::V2)
            throw InvalidArgument("weight tables cover V1 and V2 only");
        // V2 oscillates until about x = T/(2 pi); only decay past that is trusted.
        const double settle = kind == WeightKind::V1 ? 1.0 : std::abs(T_f) / two_pi + 1.0;
        double a = u_lo_;
        for (;;) {
            const double b = a + 0.5;
            double peak = 0.0;
            build(a, b, 0, peak);
            a = b;
            if (peak < negligible && std::exp(a) > settle) break;
            if (a > std::log(1e3)) throw QuadratureFailure("weight never fell below the negligible level");
        }
        u_hi_ = a;
    }

    WeightKind kind() const noexcept { return kind_; }
    double T_f() const noexcept { return T_; }
    double x_lo() const noexcept { return std::exp(u_lo_); }
    double x_hi() const noexcept { return std::exp(u_hi_); }
    /// Largest discrepancy seen at the check points.
    double interpolation_error() const noexcept { return max_check_error_; }
    std::size_t panel_count() const noexcept { return panels_.size(); }

    double operator()(double x) const
    {
        if (!(x > 0.0)) throw InvalidArgument("weight argument must be positive");
        const double u = std::log(x);
        if (u >= u_hi_) return 0.0;
        if (u < u_lo_) return direct(x);
        auto it = std::upper_bound(panels_.begin(), panels_.end(), u,
                                   [](double v, const Panel& p) { return v < p.b; });
        return it->eval(u);
    }

    /// Process-wide table for (kind, T_f), built once.
    static std::shared_ptr<const WeightTable> shared(WeightKind kind, double T_f)
    {
        static std::mutex mu;
        static std::map<std::pair<int, double>, std::shared_ptr<const WeightTable>> cache;
        std::lock_guard lock(mu);
        const std::pair<int, double> key{static_cast<int>(kind), kind == WeightKind::V1 ? 0.0 : T_f};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        auto t = std::make_shared<const WeightTable>(kind, key.second);
        cache.emplace(key, t);
        return t;
    }

private:
    struct Panel {
        double a, b;
        std::vector<double> coeffs;

        double eval(double u) const
        {
            const double y = (2.0 * u - a - b) / (b - a);
            double b1 = 0.0, b2 = 0.0;
            for (std::size_t k = coeffs.size(); k-- > 1;) {
                const double t = 2.0 * y * b1 - b2 + coeffs[k];
                b2 = b1;
                b1 = t;
            }
            return y * b1 - b2 + coeffs[0];
        }
    };

    double direct(double x) const
    {
        return v_relative(kind_, x, T_, tol_).value;
    }

    void build(double a, double b, int depth, double& peak)
    {
        constexpr int n = degree + 1;
        std::vector<double> f(n);
        for (int j = 0; j < n; ++j) {
            const double y = std::cos(pi * (j + 0.5) / n);
            f[j] = direct(std::exp(0.5 * (a + b) + 0.5 * (b - a) * y));
        }
        Panel p{a, b, std::vector<double>(n)};
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += f[j] * std::cos(pi * k * (j + 0.5) / n);
            p.coeffs[k] = (k == 0 ? 1.0 : 2.0) * acc / n;
        }
        double err = 0.0;
        for (double frac : {0.17, 0.5, 0.83}) {
            const double u = a + frac * (b - a);
            err = std::max(err, std::abs(p.eval(u) - direct(std::exp(u))));
        }
        if (err > check_tolerance) {
            if (depth >= 8) throw QuadratureFailure("weight interpolation did not reach its check tolerance");
            const double mid = 0.5 * (a + b);
            build(a, mid, depth + 1, peak);
            build(mid, b, depth + 1, peak);
            return;
        }
        max_check_error_ = std::max(max_check_error_, err);
        for (double v : f) peak = std::max(peak, std::abs(v));
        panels_.push_back(std::move(p));
    }

    WeightKind kind_;
    double T_;
    double tol_;
    double u_lo_, u_hi_ = 0.0;
    double max_check_error_ = 0.0;
    std::vector<Panel> panels_;
};

}  // namespace lmoment
