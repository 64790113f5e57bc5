#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace femscript
{

struct Vec2
{
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
inline double orient2d(Vec2 a, Vec2 b, Vec2 c)
{
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

struct Vertex
{
    double x = 0.0;
    double y = 0.0;
    int label = 0; ///< 0 for interior vertices
};

struct Triangle
{
    std::array<int, 3> v{};
    int region = 0;
};

struct BoundaryEdge
{
    std::array<int, 2> v{};
    int label = 0;
};

/// Result of point location: containing triangle and barycentric weights.
struct Location
{
    int triangle = -1;
    std::array<double, 3> bary{};
};

/// Immutable conforming triangulation with labelled boundary edges.
///
/// Construction validates the input (indices in range, counter-clockwise
/// triangles with positive area, edge-to-edge conformity) and builds the
/// triangle adjacency used by point location.
class Mesh
{
public:
    Mesh() = default;
    Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles,
         std::vector<BoundaryEdge> edges);

    Mesh(const Mesh& other);
    Mesh& operator=(const Mesh& other);
    Mesh(Mesh&&) noexcept;
    Mesh& operator=(Mesh&&) noexcept;

    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<BoundaryEdge>& edges() const noexcept { return edges_; }

    int nv() const noexcept { return static_cast<int>(vertices_.size()); }
    int nt() const noexcept { return static_cast<int>(triangles_.size()); }
    int nbe() const noexcept { return static_cast<int>(edges_.size()); }

    Vec2 point(int v) const { return {vertices_[v].x, vertices_[v].y}; }
    Vec2 corner(int t, int k) const { return point(triangles_[t].v[k]); }
    Vec2 barycenter(int t) const;
    double area(int t) const;
    double total_area() const;

    /// Neighbour across the edge opposite local vertex k, or -1.
    int neighbor(int t, int k) const { return neighbors_[t][k]; }

    /// One triangle incident to vertex v and the local index of v in it.
    std::pair<int, int> vertex_triangle(int v) const { return vertex_tri_[v]; }

    /// Triangle owning boundary edge e and the local index of the vertex
    /// opposite to it.
    std::pair<int, int> edge_triangle(int e) const { return edge_tri_[e]; }

    /// Sorted list of distinct boundary labels.
    std::vector<int> labels() const;

    /// Diameter of the bounding box.
    double diameter() const;
    std::array<double, 4> bounding_box() const; ///< xmin, ymin, xmax, ymax

    /// Walks from the last successful hit, falls back to a linear scan.
    /// Points within a relative 1e-12 of an edge are accepted.
    std::optional<Location> locate(double x, double y, int hint = -1) const;

    /// Barycentric coordinates of (x, y) with respect to triangle t.
    std::array<double, 3> barycentric(int t, double x, double y) const;

private:
    void build_topology();

    std::vector<Vertex> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<BoundaryEdge> edges_;
    std::vector<std::array<int, 3>> neighbors_;
    std::vector<std::pair<int, int>> vertex_tri_;
    std::vector<std::pair<int, int>> edge_tri_;
    mutable std::atomic<int> last_hit_{0};
};

using Transform = std::function<Vec2(Vec2)>;

/// Structured (m+1) x (n+1) grid on the unit square, every cell split along
/// its (i,j)-(i+1,j+1) diagonal. Labels: 1 bottom, 2 right, 3 top, 4 left.
Mesh build_square(int m, int n, const Transform& transform = {});

/// Same connectivity, transformed coordinates. Throws FoldOverError when a
/// triangle loses its positive orientation.
Mesh move_mesh(const Mesh& mesh, const Transform& transform);

/// A parametrized oriented curve sampled |count| times. A negative count
/// traverses the curve backwards.
struct Border
{
    std::string name;
    std::function<Vec2(double)> param;
    double t0 = 0.0;
    double t1 = 1.0;
    int count = 1;
    int label = 1;
};

/// Constrained Delaunay mesh of the region left of the oriented borders.
Mesh build_from_borders(std::span<const Border> borders);

/// Options for the refinement stage of build_from_borders.
struct MesherOptions
{
    /// Triangles whose longest edge exceeds size_factor times the local
    /// boundary spacing are refined.
    double size_factor = 1.5;
    /// Grow near-equilateral triangles inwards from the boundary before the
    /// size-driven pass.
    bool frontal = true;
    /// Frontal pass: a triangle is accepted when its circumradius is at most
    /// this multiple of the ideal equilateral circumradius.
    double front_acceptance = 2.2;
    /// Laplacian smoothing passes over interior points, each followed by
    /// Delaunay edge flips.
    int smoothing_sweeps = 4;
    /// Upper bound on inserted interior points.
    int max_points = 5'000'000;
};

Mesh build_from_borders(std::span<const Border> borders, const MesherOptions& options);

// .msh text format: "nv nt ne", then vertices, triangles and edges with
// 1-based indices.
void write_msh(std::ostream& out, const Mesh& mesh);
Mesh read_msh(std::istream& in);
void save_msh(const Mesh& mesh, const std::filesystem::path& path);
Mesh load_msh(const std::filesystem::path& path);

} // namespace femscript
