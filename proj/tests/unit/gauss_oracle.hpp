#pragma once

// Brute-force reference quadrature, independent of the library's rules:
// a collapsed (Duffy) tensor Gauss-Legendre rule on a triangle.

#include "femscript/mesh.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle
{

/// Nodes and weights of the n-point Gauss-Legendre rule on [0, 1].
inline std::vector<std::pair<double, double>> gauss_legendre(int n)
{
    std::vector<std::pair<double, double>> rule;
    for(int i = 1; i <= n; ++i)
    {
        double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
        double dp = 0.0;
        for(int it = 0; it < 100; ++it)
        {
            double p0 = 1.0, p1 = x;
            for(int k = 2; k <= n; ++k)
            {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if(std::abs(dx) < 1e-16)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.emplace_back(0.5 * (x + 1.0), 0.5 * w);
    }
    return rule;
}

/// Integral of f over triangle (a, b, c).
inline double integrate(femscript::Vec2 a, femscript::Vec2 b, femscript::Vec2 c,
                        const std::function<double(double, double)>& f, int n = 12)
{
    const auto rule = gauss_legendre(n);
    const double jac = std::abs(femscript::orient2d(a, b, c));
    double sum = 0.0;
    for(const auto& [s, ws] : rule)
        for(const auto& [t, wt] : rule)
        {
            // (s, t) in the unit square -> (u, v) = (s, (1 - s) t) in the unit triangle
            const double u = s;
            const double v = (1.0 - s) * t;
            const double x = a.x + u * (b.x - a.x) + v * (c.x - a.x);
            const double y = a.y + u * (b.y - a.y) + v * (c.y - a.y);
            sum += ws * wt * (1.0 - s) * f(x, y);
        }
    return sum * jac;
}

/// Barycentric hat function of vertex k of triangle (p0, p1, p2), with its gradient.
struct Hat
{
    femscript::Vec2 p[3];
    int k;

    double operator()(double x, double y) const
    {
        const auto& a = p[(k + 1) % 3];
        const auto& b = p[(k + 2) % 3];
        return femscript::orient2d(a, b, {x, y}) / femscript::orient2d(p[0], p[1], p[2]);
    }
    femscript::Vec2 grad() const
    {
        const auto& a = p[(k + 1) % 3];
        const auto& b = p[(k + 2) % 3];
        const double d = femscript::orient2d(p[0], p[1], p[2]);
        return {-(b.y - a.y) / d, (b.x - a.x) / d};
    }
};

} // namespace oracle
