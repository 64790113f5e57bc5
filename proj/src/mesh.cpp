#include "femscript/mesh.hpp"

#include "femscript/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

namespace femscript
{

namespace
{

std::uint64_t edge_key(int a, int b)
{
    if(a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

} // namespace

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> edges)
    : vertices_(std::move(vertices))
    , triangles_(std::move(triangles))
    , edges_(std::move(edges))
{
    build_topology();
}

Mesh::Mesh(const Mesh& other)
    : vertices_(other.vertices_)
    , triangles_(other.triangles_)
    , edges_(other.edges_)
    , neighbors_(other.neighbors_)
    , vertex_tri_(other.vertex_tri_)
    , edge_tri_(other.edge_tri_)
{}

Mesh& Mesh::operator=(const Mesh& other)
{
    if(this != &other)
    {
        vertices_ = other.vertices_;
        triangles_ = other.triangles_;
        edges_ = other.edges_;
        neighbors_ = other.neighbors_;
        vertex_tri_ = other.vertex_tri_;
        edge_tri_ = other.edge_tri_;
        last_hit_.store(0, std::memory_order_relaxed);
    }
    return *this;
}

Mesh::Mesh(Mesh&& other) noexcept
    : vertices_(std::move(other.vertices_))
    , triangles_(std::move(other.triangles_))
    , edges_(std::move(other.edges_))
    , neighbors_(std::move(other.neighbors_))
    , vertex_tri_(std::move(other.vertex_tri_))
    , edge_tri_(std::move(other.edge_tri_))
{}

Mesh& Mesh::operator=(Mesh&& other) noexcept
{
    vertices_ = std::move(other.vertices_);
    triangles_ = std::move(other.triangles_);
    edges_ = std::move(other.edges_);
    neighbors_ = std::move(other.neighbors_);
    vertex_tri_ = std::move(other.vertex_tri_);
    edge_tri_ = std::move(other.edge_tri_);
    last_hit_.store(0, std::memory_order_relaxed);
    return *this;
}

void Mesh::build_topology()
{
    const int n = nv();
    for(const auto& v : vertices_)
        if(!std::isfinite(v.x) || !std::isfinite(v.y))
            throw InvalidArgument("mesh vertex with non-finite coordinate");

    // Each undirected edge maps to the (triangle, opposite local vertex)
    // pairs that use it.
    struct EdgeUse
    {
        std::array<std::pair<int, int>, 2> owner{{{-1, -1}, {-1, -1}}};
        int count = 0;
    };
    std::unordered_map<std::uint64_t, EdgeUse> uses;
    uses.reserve(triangles_.size() * 2);
    neighbors_.assign(triangles_.size(), {-1, -1, -1});
    vertex_tri_.assign(vertices_.size(), {-1, -1});

    for(int t = 0; t < nt(); ++t)
    {
        const auto& tv = triangles_[t].v;
        for(int k = 0; k < 3; ++k)
            if(tv[k] < 0 || tv[k] >= n)
                throw InvalidArgument("triangle " + std::to_string(t)
                                      + " references vertex out of range");
        if(tv[0] == tv[1] || tv[1] == tv[2] || tv[0] == tv[2])
            throw InvalidArgument("triangle " + std::to_string(t)
                                  + " has repeated vertices");
        if(!(area(t) > 0.0))
            throw GeometryError("triangle " + std::to_string(t)
                                + " has non-positive area");
        for(int k = 0; k < 3; ++k)
        {
            if(vertex_tri_[tv[k]].first < 0)
                vertex_tri_[tv[k]] = {t, k};
            const int a = tv[(k + 1) % 3];
            const int b = tv[(k + 2) % 3];
            auto& use = uses[edge_key(a, b)];
            if(use.count == 2)
                throw GeometryError("non-conforming mesh: edge shared by more than two triangles");
            if(use.count == 1)
            {
                const auto [other, ko] = use.owner[0];
                const auto& ov = triangles_[other].v;
                // A conforming pair traverses the shared edge in opposite directions.
                if(ov[(ko + 1) % 3] != b || ov[(ko + 2) % 3] != a)
                    throw GeometryError("non-conforming mesh: inconsistent orientation");
                neighbors_[t][k] = other;
                neighbors_[other][ko] = t;
            }
            use.owner[use.count++] = {t, k};
        }
    }

    edge_tri_.assign(edges_.size(), {-1, -1});
    for(int e = 0; e < nbe(); ++e)
    {
        const auto [a, b] = edges_[e].v;
        if(a < 0 || a >= n || b < 0 || b >= n || a == b)
            throw InvalidArgument("boundary edge " + std::to_string(e) + " is invalid");
        const auto it = uses.find(edge_key(a, b));
        if(it == uses.end())
            throw GeometryError("boundary edge " + std::to_string(e)
                                + " is not an edge of any triangle");
        // Prefer the triangle lying left of the oriented edge.
        edge_tri_[e] = it->second.owner[0];
        for(int i = 0; i < it->second.count; ++i)
        {
            const auto [t, k] = it->second.owner[i];
            if(triangles_[t].v[(k + 1) % 3] == a)
            {
                edge_tri_[e] = {t, k};
                break;
            }
        }
    }
}

Vec2 Mesh::barycenter(int t) const
{
    const auto a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double Mesh::area(int t) const
{
    return 0.5 * orient2d(corner(t, 0), corner(t, 1), corner(t, 2));
}

double Mesh::total_area() const
{
    double s = 0.0;
    for(int t = 0; t < nt(); ++t)
        s += area(t);
    return s;
}

std::vector<int> Mesh::labels() const
{
    std::vector<int> out;
    for(const auto& e : edges_)
        out.push_back(e.label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::array<double, 4> Mesh::bounding_box() const
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::array<double, 4> bb{inf, inf, -inf, -inf};
    for(const auto& v : vertices_)
    {
        bb[0] = std::min(bb[0], v.x);
        bb[1] = std::min(bb[1], v.y);
        bb[2] = std::max(bb[2], v.x);
        bb[3] = std::max(bb[3], v.y);
    }
    return bb;
}

double Mesh::diameter() const
{
    if(vertices_.empty())
        return 0.0;
    const auto bb = bounding_box();
    return std::hypot(bb[2] - bb[0], bb[3] - bb[1]);
}

std::array<double, 3> Mesh::barycentric(int t, double x, double y) const
{
    const Vec2 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2), p{x, y};
    const double d = orient2d(a, b, c);
    return {orient2d(p, b, c) / d, orient2d(a, p, c) / d, orient2d(a, b, p) / d};
}

std::optional<Location> Mesh::locate(double x, double y, int hint) const
{
    if(triangles_.empty())
        return std::nullopt;
    constexpr double eps = 1e-12;
    int t = (hint >= 0 && hint < nt()) ? hint : last_hit_.load(std::memory_order_relaxed);
    if(t < 0 || t >= nt())
        t = 0;
    for(int steps = 0; steps <= nt(); ++steps)
    {
        const auto b = barycentric(t, x, y);
        const int worst = static_cast<int>(std::min_element(b.begin(), b.end()) - b.begin());
        if(b[worst] >= -eps)
        {
            last_hit_.store(t, std::memory_order_relaxed);
            return Location{t, b};
        }
        const int next = neighbors_[t][worst];
        if(next < 0)
            break;
        t = next;
    }
    for(int s = 0; s < nt(); ++s)
    {
        const auto b = barycentric(s, x, y);
        if(*std::min_element(b.begin(), b.end()) >= -eps)
        {
            last_hit_.store(s, std::memory_order_relaxed);
            return Location{s, b};
        }
    }
    return std::nullopt;
}

Mesh build_square(int m, int n, const Transform& transform)
{
    if(m < 1 || n < 1)
        throw InvalidArgument("square: m and n must be positive, got "
                              + std::to_string(m) + ", " + std::to_string(n));
    const auto id = [m](int i, int j) { return j * (m + 1) + i; };
    std::vector<Vertex> verts;
    verts.reserve(static_cast<std::size_t>((m + 1) * (n + 1)));
    for(int j = 0; j <= n; ++j)
        for(int i = 0; i <= m; ++i)
        {
            int label = 0;
            if(j == 0 && i < m)
                label = 1;
            else if(i == m && j < n)
                label = 2;
            else if(j == n && i > 0)
                label = 3;
            else if(i == 0 && j > 0)
                label = 4;
            Vec2 p{static_cast<double>(i) / m, static_cast<double>(j) / n};
            if(transform)
                p = transform(p);
            verts.push_back({p.x, p.y, label});
        }

    std::vector<Triangle> tris;
    tris.reserve(static_cast<std::size_t>(2 * m * n));
    for(int j = 0; j < n; ++j)
        for(int i = 0; i < m; ++i)
        {
            tris.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, 0});
            tris.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, 0});
        }

    std::vector<BoundaryEdge> edges;
    edges.reserve(static_cast<std::size_t>(2 * (m + n)));
    for(int i = 0; i < m; ++i)
        edges.push_back({{id(i, 0), id(i + 1, 0)}, 1});
    for(int j = 0; j < n; ++j)
        edges.push_back({{id(m, j), id(m, j + 1)}, 2});
    for(int i = m; i > 0; --i)
        edges.push_back({{id(i, n), id(i - 1, n)}, 3});
    for(int j = n; j > 0; --j)
        edges.push_back({{id(0, j), id(0, j - 1)}, 4});

    if(transform)
    {
        // A reflection flips every triangle consistently; restore orientation.
        int negative = 0;
        for(const auto& t : tris)
        {
            const auto& a = verts[t.v[0]];
            const auto& b = verts[t.v[1]];
            const auto& c = verts[t.v[2]];
            if(orient2d({a.x, a.y}, {b.x, b.y}, {c.x, c.y}) < 0)
                ++negative;
        }
        if(negative == static_cast<int>(tris.size()))
        {
            for(auto& t : tris)
                std::swap(t.v[1], t.v[2]);
            for(auto& e : edges)
                std::swap(e.v[0], e.v[1]);
        }
        else if(negative > 0)
            throw FoldOverError("square: transformation folds the mesh");
    }
    return Mesh(std::move(verts), std::move(tris), std::move(edges));
}

Mesh move_mesh(const Mesh& mesh, const Transform& transform)
{
    std::vector<Vertex> verts = mesh.vertices();
    for(auto& v : verts)
    {
        const Vec2 p = transform({v.x, v.y});
        if(!std::isfinite(p.x) || !std::isfinite(p.y))
            throw NumericError("movemesh: transformation produced a non-finite coordinate");
        v.x = p.x;
        v.y = p.y;
    }
    for(int t = 0; t < mesh.nt(); ++t)
    {
        const auto& tv = mesh.triangles()[t].v;
        const Vec2 a{verts[tv[0]].x, verts[tv[0]].y};
        const Vec2 b{verts[tv[1]].x, verts[tv[1]].y};
        const Vec2 c{verts[tv[2]].x, verts[tv[2]].y};
        if(!(orient2d(a, b, c) > 0.0))
            throw FoldOverError("movemesh: triangle " + std::to_string(t)
                                + " is flipped or degenerate after the transformation");
    }
    return Mesh(std::move(verts), mesh.triangles(), mesh.edges());
}

} // namespace femscript
