#include "femscript/quadrature.hpp"

#include "femscript/error.hpp"

#include <cmath>
#include <string>

namespace femscript
{

namespace
{

const std::array<QuadPoint, 3> kMidpoint{{
    {{0.5, 0.5, 0.0}, 1.0 / 3.0},
    {{0.0, 0.5, 0.5}, 1.0 / 3.0},
    {{0.5, 0.0, 0.5}, 1.0 / 3.0},
}};

const std::array<QuadPoint, 3> kVertex{{
    {{1.0, 0.0, 0.0}, 1.0 / 3.0},
    {{0.0, 1.0, 0.0}, 1.0 / 3.0},
    {{0.0, 0.0, 1.0}, 1.0 / 3.0},
}};

const std::array<QuadPoint, 1> kCentroid{{
    {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1.0},
}};

std::array<QuadPoint, 7> make_degree5()
{
    const double r = std::sqrt(15.0);
    const double a1 = (6.0 - r) / 21.0, b1 = (9.0 + 2.0 * r) / 21.0;
    const double a2 = (6.0 + r) / 21.0, b2 = (9.0 - 2.0 * r) / 21.0;
    const double w1 = (155.0 - r) / 1200.0, w2 = (155.0 + r) / 1200.0;
    return {{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
        {{b1, a1, a1}, w1},
        {{a1, b1, a1}, w1},
        {{a1, a1, b1}, w1},
        {{b2, a2, a2}, w2},
        {{a2, b2, a2}, w2},
        {{a2, a2, b2}, w2},
    }};
}

const std::array<QuadPoint, 7> kDegree5 = make_degree5();

const std::array<EdgePoint, 2> kGauss2{{
    {0.5 - 0.5 / std::sqrt(3.0), 0.5},
    {0.5 + 0.5 / std::sqrt(3.0), 0.5},
}};

const std::array<EdgePoint, 2> kTrapezoid{{{0.0, 0.5}, {1.0, 0.5}}};

} // namespace

std::span<const QuadPoint> triangle_rule(QuadRule rule)
{
    switch(rule)
    {
    case QuadRule::Lumped:
        return kVertex;
    case QuadRule::Centroid:
        return kCentroid;
    case QuadRule::Degree5:
        return kDegree5;
    case QuadRule::Default:
        break;
    }
    return kMidpoint;
}

std::span<const EdgePoint> edge_rule(QuadRule rule)
{
    if(rule == QuadRule::Lumped)
        return kTrapezoid;
    return kGauss2;
}

QuadRule quad_from_name(std::string_view name)
{
    if(name == "qf1pTlump")
        return QuadRule::Lumped;
    if(name == "qf1pT")
        return QuadRule::Centroid;
    if(name == "qf2pT")
        return QuadRule::Default;
    if(name == "qf5pT")
        return QuadRule::Degree5;
    throw InvalidArgument("unknown quadrature formula '" + std::string(name) + "'");
}

} // namespace femscript
