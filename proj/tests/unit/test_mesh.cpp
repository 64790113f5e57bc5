#include <doctest.h>

#include "femscript/error.hpp"
#include "femscript/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace femscript;

namespace
{

constexpr double pi = std::numbers::pi;

Border circle(const std::string& name, double r, int count, int label)
{
    return {name, [r](double t) { return Vec2{r * std::cos(t), r * std::sin(t)}; }, 0.0,
            2.0 * pi, count, label};
}

/// Every interior edge shared by two triangles, every boundary edge by one.
void check_conforming(const Mesh& m)
{
    std::map<std::pair<int, int>, int> uses;
    for(const auto& t : m.triangles())
        for(int k = 0; k < 3; ++k)
        {
            int a = t.v[k], b = t.v[(k + 1) % 3];
            if(a > b)
                std::swap(a, b);
            ++uses[{a, b}];
        }
    int single = 0;
    for(const auto& [e, n] : uses)
    {
        CHECK(n <= 2);
        if(n == 1)
            ++single;
    }
    for(int t = 0; t < m.nt(); ++t)
        CHECK(m.area(t) > 0.0);
    CHECK(single <= m.nbe());
}

/// Brute-force Delaunay test for triangles with only interior vertices.
int delaunay_violations(const Mesh& m)
{
    int bad = 0;
    for(int t = 0; t < m.nt(); ++t)
    {
        const auto& tv = m.triangles()[t].v;
        if(m.vertices()[tv[0]].label || m.vertices()[tv[1]].label || m.vertices()[tv[2]].label)
            continue;
        const Vec2 a = m.corner(t, 0), b = m.corner(t, 1), c = m.corner(t, 2);
        const double d = 2.0 * orient2d(a, b, c);
        const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y,
                     c2 = c.x * c.x + c.y * c.y;
        const Vec2 cc{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                      (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
        const double r2 = (a.x - cc.x) * (a.x - cc.x) + (a.y - cc.y) * (a.y - cc.y);
        for(int v = 0; v < m.nv(); ++v)
        {
            if(v == tv[0] || v == tv[1] || v == tv[2])
                continue;
            const Vec2 p = m.point(v);
            if((p.x - cc.x) * (p.x - cc.x) + (p.y - cc.y) * (p.y - cc.y) < r2 * (1.0 - 1e-9))
                ++bad;
        }
    }
    return bad;
}

} // namespace

TEST_CASE("square counts and labels")
{
    const Mesh m1 = build_square(1, 1);
    CHECK(m1.nv() == 4);
    CHECK(m1.nt() == 2);
    CHECK(m1.nbe() == 4);

    const Mesh m2 = build_square(2, 2);
    CHECK(m2.nv() == 9);
    CHECK(m2.nt() == 8);
    CHECK(std::abs(m2.total_area() - 1.0) < 1e-14);

    const Mesh m = build_square(10, 10);
    for(const auto& e : m.edges())
    {
        const Vec2 a = m.point(e.v[0]), b = m.point(e.v[1]);
        const Vec2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        if(mid.y == 0.0)
            CHECK(e.label == 1);
        else if(mid.x == 1.0)
            CHECK(e.label == 2);
        else if(mid.y == 1.0)
            CHECK(e.label == 3);
        else
        {
            CHECK(mid.x == 0.0);
            CHECK(e.label == 4);
        }
    }
    check_conforming(m);
    CHECK_THROWS_AS(build_square(0, 3), InvalidArgument);
}

TEST_CASE("square diagonal runs from (i,j) to (i+1,j+1)")
{
    const Mesh m = build_square(1, 1);
    // Both triangles contain vertices 0 and 3.
    for(const auto& t : m.triangles())
    {
        const std::set<int> s(t.v.begin(), t.v.end());
        CHECK(s.count(0) == 1);
        CHECK(s.count(3) == 1);
    }
}

TEST_CASE("move_mesh")
{
    const Mesh sq = build_square(4, 4);
    const Mesh same = move_mesh(sq, [](Vec2 p) { return p; });
    for(int v = 0; v < sq.nv(); ++v)
    {
        CHECK(same.point(v).x == sq.point(v).x);
        CHECK(same.point(v).y == sq.point(v).y);
    }

    const Mesh moved = move_mesh(sq, [](Vec2 p) { return Vec2{p.x + 1.0, 2.0 * p.y}; });
    const auto bb = moved.bounding_box();
    CHECK(bb[0] == 1.0);
    CHECK(bb[1] == 0.0);
    CHECK(bb[2] == 2.0);
    CHECK(bb[3] == 2.0);
    CHECK(moved.nt() == sq.nt());
    CHECK(moved.labels() == sq.labels());

    const Mesh sheared = move_mesh(sq, [](Vec2 p) { return Vec2{2.0 * p.x + 0.5 * p.y, p.y}; });
    CHECK(std::abs(sheared.total_area() - 2.0) < 1e-12);

    CHECK_THROWS_AS(move_mesh(sq, [](Vec2 p) { return Vec2{-p.x, p.y}; }), FoldOverError);
}

TEST_CASE("msh round trip")
{
    const Mesh m = build_square(2, 2);
    std::stringstream ss;
    write_msh(ss, m);
    const Mesh r = read_msh(ss);
    REQUIRE(r.nv() == m.nv());
    REQUIRE(r.nt() == m.nt());
    REQUIRE(r.nbe() == m.nbe());
    for(int v = 0; v < m.nv(); ++v)
    {
        CHECK(r.vertices()[v].x == m.vertices()[v].x);
        CHECK(r.vertices()[v].y == m.vertices()[v].y);
        CHECK(r.vertices()[v].label == m.vertices()[v].label);
    }
    for(int t = 0; t < m.nt(); ++t)
        CHECK(r.triangles()[t].v == m.triangles()[t].v);
    for(int e = 0; e < m.nbe(); ++e)
    {
        CHECK(r.edges()[e].v == m.edges()[e].v);
        CHECK(r.edges()[e].label == m.edges()[e].label);
    }
}

TEST_CASE("msh parse errors")
{
    std::istringstream short_body("4 2 0\n0 0 1\n1 0 1\n");
    CHECK_THROWS_AS(read_msh(short_body), ParseError);

    std::istringstream extra("3 1 0\n0 0 0\n1 0 0\n0 1 0\n1 2 3 0\n1 2 3 0\n");
    CHECK_THROWS_AS(read_msh(extra), ParseError);

    std::istringstream junk("3 1 0\n0 0 0\n1 zero 0\n0 1 0\n1 2 3 0\n");
    try
    {
        read_msh(junk);
        FAIL("expected a parse error");
    }
    catch(const ParseError& e)
    {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("hand-written two triangle file")
{
    // Second triangle listed clockwise; it is reoriented on load.
    std::istringstream in("4 2 4\n"
                          "0 0 1\n2 0 1\n2 1 1\n0 1 1\n"
                          "1 2 3 0\n1 4 3 0\n"
                          "1 2 1\n2 3 1\n3 4 1\n4 1 1\n");
    const Mesh m = read_msh(in);
    for(int t = 0; t < m.nt(); ++t)
        CHECK(m.area(t) > 0.0);
    CHECK(std::abs(m.total_area() - 2.0) < 1e-14);
}

TEST_CASE("circle from one border")
{
    const std::vector<Border> b{circle("C", 1.0, 50, 1)};
    const Mesh m = build_from_borders(b);
    CHECK(m.nbe() == 50);
    for(const auto& e : m.edges())
        CHECK(e.label == 1);
    check_conforming(m);
    // Area of the inscribed 50-gon.
    const double polygon = 0.5 * 50 * std::sin(2.0 * pi / 50);
    CHECK(std::abs(m.total_area() - polygon) < 1e-12);
    CHECK(m.nt() > 50);
}

TEST_CASE("hole from a clockwise inner loop")
{
    const std::vector<Border> b{circle("a", 1.0, 50, 1), circle("b", 0.3, -30, 2)};
    const Mesh m = build_from_borders(b);
    for(int t = 0; t < m.nt(); ++t)
    {
        const Vec2 c = m.barycenter(t);
        CHECK(std::hypot(c.x, c.y) > 0.3 * std::cos(pi / 30));
    }
    std::map<int, int> per_label;
    for(const auto& e : m.edges())
        ++per_label[e.label];
    CHECK(per_label[1] == 50);
    CHECK(per_label[2] == 30);
    check_conforming(m);
}

TEST_CASE("counter-clockwise inner loop is an interface")
{
    const std::vector<Border> b{circle("a", 1.0, 50, 1), circle("b", 0.3, 30, 2)};
    const Mesh m = build_from_borders(b);
    CHECK(std::abs(m.total_area() - pi) < 0.02 * pi);
    bool inside = false;
    for(int t = 0; t < m.nt(); ++t)
    {
        const Vec2 c = m.barycenter(t);
        if(std::hypot(c.x, c.y) < 0.2)
            inside = true;
    }
    CHECK(inside);
    std::set<int> regions;
    for(const auto& t : m.triangles())
        regions.insert(t.region);
    CHECK(regions.size() == 2);
}

TEST_CASE("multi-border square with labels")
{
    const auto seg = [](Vec2 a, Vec2 b, int n, int label) {
        return Border{"s", [a, b](double t) { return Vec2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; },
                      0.0, 1.0, n, label};
    };
    const std::vector<Border> b{seg({0, 0}, {1, 0}, 8, 1), seg({1, 0}, {1, 1}, 8, 2),
                                seg({1, 1}, {0, 1}, 8, 3), seg({0, 1}, {0, 0}, 8, 4)};
    const Mesh m = build_from_borders(b);
    CHECK(std::abs(m.total_area() - 1.0) < 1e-13);
    std::map<int, int> per_label;
    for(const auto& e : m.edges())
        ++per_label[e.label];
    for(int l = 1; l <= 4; ++l)
        CHECK(per_label[l] == 8);
    check_conforming(m);
}

TEST_CASE("L-shaped domain with concave corner")
{
    const auto seg = [](Vec2 a, Vec2 b, int n, int label) {
        return Border{"s", [a, b](double t) { return Vec2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; },
                      0.0, 1.0, n, label};
    };
    const std::vector<Border> b{seg({0, 0}, {2, 0}, 10, 1), seg({2, 0}, {2, 1}, 5, 1),
                                seg({2, 1}, {1, 1}, 5, 1), seg({1, 1}, {1, 2}, 5, 1),
                                seg({1, 2}, {0, 2}, 5, 1), seg({0, 2}, {0, 0}, 10, 1)};
    const Mesh m = build_from_borders(b);
    CHECK(std::abs(m.total_area() - 3.0) < 1e-12);
    check_conforming(m);
}

TEST_CASE("delaunay property on small meshes")
{
    const std::vector<Border> b{circle("C", 1.0, 30, 1)};
    const Mesh m = build_from_borders(b);
    REQUIRE(m.nt() <= 500);
    CHECK(delaunay_violations(m) == 0);

    const std::vector<Border> h{circle("a", 1.0, 40, 1), circle("b", 0.4, -16, 2)};
    const Mesh mh = build_from_borders(h);
    REQUIRE(mh.nt() <= 500);
    CHECK(delaunay_violations(mh) == 0);
}

TEST_CASE("refinement follows the boundary spacing")
{
    const std::vector<Border> b{circle("C", 1.0, 64, 1)};
    const Mesh m = build_from_borders(b);
    const double h = 2.0 * std::sin(pi / 64);
    for(int t = 0; t < m.nt(); ++t)
        for(int k = 0; k < 3; ++k)
        {
            const Vec2 p = m.corner(t, k), q = m.corner(t, (k + 1) % 3);
            CHECK(std::hypot(p.x - q.x, p.y - q.y) <= 1.5 * h * (1 + 1e-9));
        }
}

TEST_CASE("geometry errors")
{
    SUBCASE("open loop")
    {
        const std::vector<Border> b{
            {"arc", [](double t) { return Vec2{std::cos(t), std::sin(t)}; }, 0.0, pi, 10, 1}};
        CHECK_THROWS_AS(build_from_borders(b), GeometryError);
    }
    SUBCASE("self intersection")
    {
        // Figure eight.
        const std::vector<Border> b{{"eight",
                                     [](double t) { return Vec2{std::sin(2 * t), std::sin(t)}; },
                                     0.0, 2 * pi, 40, 1}};
        CHECK_THROWS_AS(build_from_borders(b), GeometryError);
    }
    SUBCASE("crossing loops")
    {
        const std::vector<Border> b{circle("a", 1.0, 30, 1),
                                    {"b", [](double t) { return Vec2{1.0 + 0.5 * std::cos(t), 0.5 * std::sin(t)}; },
                                     0.0, 2 * pi, 20, 2}};
        CHECK_THROWS_AS(build_from_borders(b), GeometryError);
    }
}

TEST_CASE("locate and out of domain")
{
    const Mesh m = build_square(4, 4);
    const auto loc = m.locate(0.3, 0.4);
    REQUIRE(loc);
    CHECK(loc->bary[0] >= -1e-12);
    CHECK(!m.locate(10.0, 10.0));
    // Exactly on a vertex and on the boundary.
    CHECK(m.locate(1.0, 1.0));
    CHECK(m.locate(0.5, 0.0));
}
