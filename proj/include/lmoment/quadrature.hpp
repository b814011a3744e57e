#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "lmoment/numeric.hpp"

namespace lmoment {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendre make_gauss_legendre(int order)
{
    GaussLegendre rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

/// Shared, lazily built rule of the given order.
inline const GaussLegendre& gauss_legendre(int order)
{
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gauss_legendre(order)).first;
    return it->second;
}

/// Composite Gauss-Legendre rule: `panels` equal panels on [a, b].
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline CompositeRule composite_rule(double a, double b, int panels, int order)
{
    const auto& gl = gauss_legendre(order);
    CompositeRule r;
    r.nodes.reserve(static_cast<std::size_t>(panels) * order);
    r.weights.reserve(static_cast<std::size_t>(panels) * order);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int i = 0; i < order; ++i) {
            r.nodes.push_back(mid + 0.5 * h * gl.nodes[i]);
            r.weights.push_back(0.5 * h * gl.weights[i]);
        }
    }
    return r;
}

/// Integrate f over [a, b], doubling the panel count until two successive
/// results agree to `tol`. Returns the finer value and the last difference.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double tol, int start_panels = 4,
                        int order = 20, int max_doublings = 14)
{
    using R = decltype(f(a));
    auto eval = [&](int panels) {
        const auto rule = composite_rule(a, b, panels, order);
        CompensatedSum<R> acc;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
        return acc.value();
    };
    int panels = start_panels;
    R prev = eval(panels);
    double diff = 0.0;
    for (int d = 0; d < max_doublings; ++d) {
        panels *= 2;
        const R cur = eval(panels);
        diff = std::abs(cur - prev);
        prev = cur;
        if (diff <= tol) break;
    }
    struct Result {
        R value;
        double error;
    };
    return Result{prev, diff};
}

}  // namespace lmoment
