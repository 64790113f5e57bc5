#include <doctest.h>

#include "femscript/error.hpp"
#include "femscript/fespace.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace femscript;

namespace
{

std::shared_ptr<const FeSpace> space_on(Mesh mesh, Element e = Element::P1)
{
    return std::make_shared<FeSpace>(std::make_shared<const Mesh>(std::move(mesh)), e);
}

} // namespace

TEST_CASE("DOF counts")
{
    CHECK(space_on(build_square(10, 10))->ndof() == 121);
    CHECK(space_on(build_square(10, 10), Element::P0)->ndof() == 200);
    CHECK(element_from_name("P0") == Element::P0);
    CHECK_THROWS_AS(element_from_name("P2"), InvalidArgument);

    const double pi = std::numbers::pi;
    const Border c{"c", [](double t) { return Vec2{std::cos(t), std::sin(t)}; }, 0.0, 2 * pi, 20, 1};
    auto circle = space_on(build_from_borders(std::span(&c, 1)));
    CHECK(circle->ndof() == circle->mesh().nv());
}

TEST_CASE("interpolation and evaluation")
{
    auto vh = space_on(build_square(4, 3));
    const auto one = interpolate(vh, 1.0);
    for(double d : one.dofs())
        CHECK(d == 1.0);

    const auto lin = interpolate(vh, Field::xy([](double x, double y) { return x + 2 * y; }));
    CHECK(std::abs(evaluate(lin, 0.3, 0.4) - 1.1) <= 1e-13);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for(int k = 0; k < 50; ++k)
    {
        const double x = U(rng), y = U(rng);
        CHECK(std::abs(evaluate(lin, x, y) - (x + 2 * y)) <= 1e-14);
    }
    CHECK_THROWS_AS(evaluate(lin, 10.0, 10.0), OutOfDomain);

    const auto s = interpolate(space_on(build_square(2, 2)), Field::xy([](double x, double y) {
                                   return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
                               }));
    CHECK(s.dofs()[4] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(s, 0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(interpolate(vh, Field::xy([](double x, double) { return 1.0 / x; })), NumericError);
}

TEST_CASE("interpolation is exact at DOF sites and a projection")
{
    auto vh = space_on(build_square(5, 5, [](Vec2 p) { return Vec2{p.x + 0.1 * p.y * p.y, p.y}; }));
    const auto u = interpolate(vh, Field::xy([](double x, double y) { return std::exp(x) * std::cos(3 * y); }));
    const Mesh& m = vh->mesh();
    for(int i = 0; i < m.nv(); ++i)
        CHECK(evaluate(u, m.vertices()[i].x, m.vertices()[i].y) == doctest::Approx(u.dofs()[i]).epsilon(1e-14));
    auto shared = std::make_shared<FeFunction>(u);
    const auto again = interpolate(vh, FeFunction::as_field(shared));
    CHECK(again.dofs() == u.dofs());

    auto p0 = space_on(build_square(3, 3), Element::P0);
    const auto c = interpolate(p0, Field::xy([](double x, double y) { return x - y; }));
    for(int t = 0; t < p0->mesh().nt(); ++t)
    {
        const Vec2 b = p0->mesh().barycenter(t);
        CHECK(c.dofs()[t] == doctest::Approx(b.x - b.y).epsilon(1e-15));
        CHECK(evaluate(c, b.x, b.y) == c.dofs()[t]);
    }
}

TEST_CASE("P1 functions are continuous across interior edges")
{
    auto vh = space_on(build_square(6, 6));
    const auto u = interpolate(vh, Field::xy([](double x, double y) { return std::sin(4 * x) + y * y; }));
    const Mesh& m = vh->mesh();
    for(int t = 0; t < m.nt(); ++t)
        for(int k = 0; k < 3; ++k)
        {
            const int nb = m.neighbor(t, k);
            if(nb < 0)
                continue;
            const Vec2 mid = 0.5 * (m.corner(t, (k + 1) % 3) + m.corner(t, (k + 2) % 3));
            EvalPoint a{mid.x, mid.y, &m, t, m.barycentric(t, mid.x, mid.y)};
            EvalPoint b{mid.x, mid.y, &m, nb, m.barycentric(nb, mid.x, mid.y)};
            CHECK(std::abs(u.value(a) - u.value(b)) <= 1e-12);
        }
}

TEST_CASE("DOF text round trip")
{
    const std::vector<double> v{0.1, -2.5e-300, 1.0 / 3.0, 12345.678};
    std::stringstream ss;
    write_dofs(ss, v);
    CHECK(read_dofs(ss, v.size()) == v);
    std::stringstream short_input("1\n2\n");
    CHECK_THROWS(read_dofs(short_input, 3));
}
