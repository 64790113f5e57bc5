#pragma once

#include <array>
#include <span>
#include <string_view>

namespace femscript
{

enum class QuadRule
{
    Default,  ///< three edge midpoints, exact for quadratics
    Lumped,   ///< three vertices with weight |T|/3, exact for linears
    Centroid, ///< one point
    Degree5,  ///< seven points, exact for quintics
};

/// Barycentric point with weight relative to the triangle area (weights sum to 1).
struct QuadPoint
{
    std::array<double, 3> bary;
    double weight;
};

std::span<const QuadPoint> triangle_rule(QuadRule rule);

/// Point on the reference edge [0, 1] with weight relative to edge length.
struct EdgePoint
{
    double s;
    double weight;
};

/// Two-point Gauss rule (exact for cubics) or trapezoid for Lumped.
std::span<const EdgePoint> edge_rule(QuadRule rule);

/// qf1pT, qf2pT, qf5pT, qf1pTlump; InvalidArgument otherwise.
QuadRule quad_from_name(std::string_view name);

} // namespace femscript
