#pragma once

#include "femscript/mesh.hpp"

#include <array>
#include <functional>

namespace femscript
{

/// A point at which integrands and coefficients are evaluated. When
/// `triangle` is set, `bary` holds its barycentric coordinates there.
struct EvalPoint
{
    double x = 0.0;
    double y = 0.0;
    const Mesh* mesh = nullptr;
    int triangle = -1;
    std::array<double, 3> bary{};
    int label = 0;  ///< boundary label on int1d / on() points, else 0
    Vec2 normal{};  ///< outward unit normal on boundary points
};

/// Scalar coefficient: either a constant or a function of the point.
class Field
{
public:
    using Fn = std::function<double(const EvalPoint&)>;

    Field() = default;
    Field(double value) : constant_(value) {}
    Field(Fn fn) : fn_(std::move(fn)) {}

    /// Convenience for analytic functions of (x, y).
    static Field xy(std::function<double(double, double)> f)
    {
        return Field(Fn([f = std::move(f)](const EvalPoint& p) { return f(p.x, p.y); }));
    }

    double operator()(const EvalPoint& p) const { return fn_ ? fn_(p) : constant_; }
    bool is_constant() const noexcept { return !fn_; }
    double constant() const noexcept { return constant_; }

private:
    double constant_ = 0.0;
    Fn fn_;
};

} // namespace femscript
