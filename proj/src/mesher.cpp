// Constrained Delaunay mesher for build_from_borders.
//
// Pipeline: sample borders -> merge coincident samples -> validate loops ->
// Bowyer-Watson triangulation of the samples inside a super triangle ->
// recovery of missing boundary segments -> winding-number classification ->
// size-driven refinement by circumcenter insertion.

#include "femscript/error.hpp"
#include "femscript/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace femscript
{

namespace
{

constexpr double kPredicateEps = 1e-12;

std::uint64_t edge_key(int a, int b)
{
    if(a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::uint64_t directed_key(int a, int b)
{
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

/// Sign of orient2d with a relative tie band: +1, -1 or 0.
int orient_sign(Vec2 a, Vec2 b, Vec2 c)
{
    const double l = (b.x - a.x) * (c.y - a.y);
    const double r = (b.y - a.y) * (c.x - a.x);
    const double det = l - r;
    const double bound = kPredicateEps * (std::abs(l) + std::abs(r));
    if(det > bound)
        return 1;
    if(det < -bound)
        return -1;
    return 0;
}

/// +1 when d lies strictly inside the circumcircle of counter-clockwise
/// (a, b, c), -1 strictly outside, 0 within the tie band.
int incircle_sign(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double t1 = alift * (bdx * cdy - cdx * bdy);
    const double t2 = blift * (cdx * ady - adx * cdy);
    const double t3 = clift * (adx * bdy - bdx * ady);
    const double det = t1 + t2 + t3;
    const double perm = alift * (std::abs(bdx * cdy) + std::abs(cdx * bdy))
                        + blift * (std::abs(cdx * ady) + std::abs(adx * cdy))
                        + clift * (std::abs(adx * bdy) + std::abs(bdx * ady));
    const double bound = kPredicateEps * perm;
    if(det > bound)
        return 1;
    if(det < -bound)
        return -1;
    return 0;
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c)
{
    const double bx = b.x - a.x, by = b.y - a.y;
    const double cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

double dist2(Vec2 a, Vec2 b)
{
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double circumradius(Vec2 a, Vec2 b, Vec2 c)
{
    const double area2 = std::abs(orient2d(a, b, c));
    return std::sqrt(dist2(a, b) * dist2(b, c) * dist2(c, a)) / (2.0 * area2);
}

struct Segment
{
    int a = 0;
    int b = 0;
    int label = 0;
};

struct Tri
{
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1}; ///< neighbour opposite v[k]
    bool alive = true;
    int winding = 0;
};

class Triangulator
{
public:
    Triangulator(std::vector<Vec2> points, std::vector<Segment> segments)
        : pts_(std::move(points))
        , segments_(std::move(segments))
    {
        n_input_ = static_cast<int>(pts_.size());
    }

    void triangulate();
    void recover_segments();
    void classify();
    void refine(const MesherOptions& options);
    void refine_frontal(const MesherOptions& options);
    void smooth(int sweeps);
    Mesh extract() const;

private:
    int add_triangle(int a, int b, int c)
    {
        Tri t;
        t.v = {a, b, c};
        tris_.push_back(t);
        return static_cast<int>(tris_.size()) - 1;
    }

    bool constrained(int a, int b) const { return constraint_net_.count(edge_key(a, b)) != 0; }

    int local_index(int t, int v) const
    {
        const auto& tv = tris_[t].v;
        for(int k = 0; k < 3; ++k)
            if(tv[k] == v)
                return k;
        return -1;
    }

    /// Neighbour slot of t across the edge (a, b), or -1 if not an edge of t.
    int edge_slot(int t, int a, int b) const
    {
        const auto& tv = tris_[t].v;
        for(int k = 0; k < 3; ++k)
        {
            const int u = tv[(k + 1) % 3], w = tv[(k + 2) % 3];
            if((u == a && w == b) || (u == b && w == a))
                return k;
        }
        return -1;
    }

    enum class WalkResult
    {
        Found,
        Outside,
        Blocked
    };

    /// Visibility walk. With `respect_constraints`, crossing a constrained
    /// edge aborts with Blocked.
    WalkResult walk(Vec2 p, int start, bool respect_constraints, int& found) const;
    int locate_any(Vec2 p) const;

    /// Bowyer-Watson insertion of p known to lie in (or on) triangle t.
    /// Returns the new vertex id or -1 if the insertion was rejected.
    int insert_in(Vec2 p, int t, double size, bool allow_on_constraint, int existing = -1);

    /// Re-link neighbours of freshly created triangles. `outside` maps the
    /// directed edge (u, w) of the replaced region to the triangle beyond it.
    void stitch(const std::vector<int>& fresh,
                const std::unordered_map<std::uint64_t, int>& outside);

    bool flip_if_needed(int t, int k);
    int restore_delaunay();

    void recover(int a, int b);
    void fill_pseudo_polygon(int p, int q, const std::vector<int>& chain,
                             std::vector<int>& fresh);

    double tri_size(int t) const
    {
        const auto& tv = tris_[t].v;
        return (size_[tv[0]] + size_[tv[1]] + size_[tv[2]]) / 3.0;
    }

    std::vector<Vec2> pts_;
    std::vector<double> size_;
    std::vector<Segment> segments_;
    std::vector<Tri> tris_;
    std::unordered_map<std::uint64_t, int> constraint_net_;
    int n_input_ = 0;
    int super_[3] = {-1, -1, -1};
    mutable int last_ = 0;
};

Triangulator::WalkResult Triangulator::walk(Vec2 p, int start, bool respect_constraints,
                                            int& found) const
{
    int t = start;
    if(t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive)
        t = locate_any(p);
    if(t < 0)
        return WalkResult::Outside;
    const int limit = static_cast<int>(tris_.size()) + 8;
    int rot = 0;
    for(int step = 0; step < limit; ++step)
    {
        const auto& tri = tris_[t];
        int next = -2;
        for(int i = 0; i < 3; ++i)
        {
            const int k = (i + rot) % 3;
            const Vec2 u = pts_[tri.v[(k + 1) % 3]];
            const Vec2 w = pts_[tri.v[(k + 2) % 3]];
            if(orient_sign(u, w, p) < 0)
            {
                if(respect_constraints && constrained(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]))
                    return WalkResult::Blocked;
                next = tri.nb[k];
                if(next < 0)
                    return WalkResult::Outside;
                break;
            }
        }
        if(next == -2)
        {
            found = t;
            last_ = t;
            return WalkResult::Found;
        }
        t = next;
        rot = (rot + 1) % 3;
    }
    found = locate_any(p);
    return found >= 0 ? WalkResult::Found : WalkResult::Outside;
}

int Triangulator::locate_any(Vec2 p) const
{
    for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
    {
        if(!tris_[t].alive)
            continue;
        const auto& tv = tris_[t].v;
        if(orient_sign(pts_[tv[0]], pts_[tv[1]], p) >= 0
           && orient_sign(pts_[tv[1]], pts_[tv[2]], p) >= 0
           && orient_sign(pts_[tv[2]], pts_[tv[0]], p) >= 0)
            return t;
    }
    return -1;
}

void Triangulator::stitch(const std::vector<int>& fresh,
                          const std::unordered_map<std::uint64_t, int>& outside)
{
    std::unordered_map<std::uint64_t, std::pair<int, int>> own;
    own.reserve(fresh.size() * 3);
    for(int t : fresh)
        for(int k = 0; k < 3; ++k)
        {
            const auto& tv = tris_[t].v;
            own.emplace(directed_key(tv[(k + 1) % 3], tv[(k + 2) % 3]), std::make_pair(t, k));
        }
    for(int t : fresh)
        for(int k = 0; k < 3; ++k)
        {
            const auto& tv = tris_[t].v;
            const int u = tv[(k + 1) % 3], w = tv[(k + 2) % 3];
            if(auto it = own.find(directed_key(w, u)); it != own.end())
            {
                tris_[t].nb[k] = it->second.first;
                continue;
            }
            auto ot = outside.find(directed_key(u, w));
            if(ot == outside.end() || ot->second < 0)
            {
                tris_[t].nb[k] = -1;
                continue;
            }
            const int o = ot->second;
            tris_[t].nb[k] = o;
            const int slot = edge_slot(o, u, w);
            if(slot >= 0)
                tris_[o].nb[slot] = t;
        }
}

int Triangulator::insert_in(Vec2 p, int t0, double size, bool allow_on_constraint, int existing)
{
    // Grow the cavity of triangles whose circumcircle contains p.
    std::vector<int> cavity{t0};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[t0] = 1;
    {
        // p on an edge of t0 pulls in the neighbour as well.
        const auto& tv = tris_[t0].v;
        for(int k = 0; k < 3; ++k)
        {
            const int u = tv[(k + 1) % 3], w = tv[(k + 2) % 3];
            if(orient_sign(pts_[u], pts_[w], p) == 0)
            {
                if(!allow_on_constraint && constrained(u, w))
                    return -1;
                const int nb = tris_[t0].nb[k];
                if(nb >= 0 && !in_cavity[nb])
                {
                    in_cavity[nb] = 1;
                    cavity.push_back(nb);
                }
            }
        }
    }
    for(std::size_t i = 0; i < cavity.size(); ++i)
    {
        const int t = cavity[i];
        for(int k = 0; k < 3; ++k)
        {
            const int nb = tris_[t].nb[k];
            if(nb < 0 || in_cavity[nb])
                continue;
            const auto& tv = tris_[t].v;
            if(constrained(tv[(k + 1) % 3], tv[(k + 2) % 3]))
                continue;
            const auto& nv = tris_[nb].v;
            if(incircle_sign(pts_[nv[0]], pts_[nv[1]], pts_[nv[2]], p) > 0)
            {
                in_cavity[nb] = 1;
                cavity.push_back(nb);
            }
        }
    }

    // Shrink until every boundary edge of the cavity sees p strictly on its left.
    for(bool changed = true; changed;)
    {
        changed = false;
        for(std::size_t i = 0; i < cavity.size(); ++i)
        {
            const int t = cavity[i];
            if(!in_cavity[t])
                continue;
            const auto& tv = tris_[t].v;
            for(int k = 0; k < 3; ++k)
            {
                const int nb = tris_[t].nb[k];
                if(nb >= 0 && in_cavity[nb])
                    continue;
                if(orient_sign(pts_[tv[(k + 1) % 3]], pts_[tv[(k + 2) % 3]], p) <= 0)
                {
                    if(t == t0)
                        return -1;
                    in_cavity[t] = 0;
                    changed = true;
                    break;
                }
            }
        }
        if(changed)
        {
            // Keep only the part still connected to t0.
            std::vector<int> kept{t0};
            std::vector<char> seen(tris_.size(), 0);
            seen[t0] = 1;
            for(std::size_t i = 0; i < kept.size(); ++i)
                for(int nb : tris_[kept[i]].nb)
                    if(nb >= 0 && in_cavity[nb] && !seen[nb])
                    {
                        seen[nb] = 1;
                        kept.push_back(nb);
                    }
            for(int t : cavity)
                in_cavity[t] = seen[t];
            cavity = kept;
        }
    }

    int id = existing;
    if(id < 0)
    {
        id = static_cast<int>(pts_.size());
        pts_.push_back(p);
        size_.push_back(size);
    }

    std::unordered_map<std::uint64_t, int> outside;
    std::vector<std::pair<int, int>> boundary;
    const int winding = tris_[t0].winding;
    for(int t : cavity)
    {
        const auto& tv = tris_[t].v;
        for(int k = 0; k < 3; ++k)
        {
            const int nb = tris_[t].nb[k];
            if(nb >= 0 && in_cavity[nb])
                continue;
            const int u = tv[(k + 1) % 3], w = tv[(k + 2) % 3];
            outside[directed_key(u, w)] = nb;
            boundary.emplace_back(u, w);
        }
    }
    for(int t : cavity)
        tris_[t].alive = false;

    std::vector<int> fresh;
    fresh.reserve(boundary.size());
    for(auto [u, w] : boundary)
    {
        const int nt = add_triangle(u, w, id);
        tris_[nt].winding = winding;
        fresh.push_back(nt);
    }
    stitch(fresh, outside);
    last_ = fresh.front();
    return id;
}

void Triangulator::triangulate()
{
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for(const auto& p : pts_)
    {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double d = std::max({xmax - xmin, ymax - ymin, 1e-300});
    size_.assign(pts_.size(), 0.0);

    // Boundary spacing at each sample: mean length of incident segments.
    std::vector<int> deg(pts_.size(), 0);
    for(const auto& s : segments_)
    {
        const double len = std::sqrt(dist2(pts_[s.a], pts_[s.b]));
        size_[s.a] += len;
        size_[s.b] += len;
        ++deg[s.a];
        ++deg[s.b];
    }
    for(std::size_t i = 0; i < pts_.size(); ++i)
        size_[i] = deg[i] > 0 ? size_[i] / deg[i] : d;

    super_[0] = static_cast<int>(pts_.size());
    pts_.push_back({cx - 40.0 * d, cy - 30.0 * d});
    pts_.push_back({cx + 40.0 * d, cy - 30.0 * d});
    pts_.push_back({cx, cy + 40.0 * d});
    super_[1] = super_[0] + 1;
    super_[2] = super_[0] + 2;
    size_.insert(size_.end(), 3, d);
    add_triangle(super_[0], super_[1], super_[2]);

    for(int i = 0; i < n_input_; ++i)
    {
        const Vec2 p = pts_[i];
        int t = -1;
        if(walk(p, last_, false, t) != WalkResult::Found)
            throw GeometryError("mesher: failed to locate boundary sample");
        if(insert_in(p, t, size_[i], true, i) < 0)
            throw GeometryError("mesher: failed to insert boundary sample");
    }
}

void Triangulator::fill_pseudo_polygon(int p, int q, const std::vector<int>& chain,
                                       std::vector<int>& fresh)
{
    if(chain.empty())
        return;
    std::size_t best = 0;
    for(std::size_t j = 1; j < chain.size(); ++j)
        if(incircle_sign(pts_[p], pts_[q], pts_[chain[best]], pts_[chain[j]]) > 0)
            best = j;
    const int c = chain[best];
    fresh.push_back(add_triangle(p, q, c));
    fill_pseudo_polygon(p, c, std::vector<int>(chain.begin(), chain.begin() + best), fresh);
    fill_pseudo_polygon(c, q, std::vector<int>(chain.begin() + best + 1, chain.end()), fresh);
}

void Triangulator::recover(int a, int b)
{
    // Already an edge?
    const Vec2 pa = pts_[a], pb = pts_[b];
    int start = -1;
    for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
    {
        if(!tris_[t].alive)
            continue;
        const int ka = local_index(t, a);
        if(ka < 0)
            continue;
        const int u = tris_[t].v[(ka + 1) % 3], w = tris_[t].v[(ka + 2) % 3];
        if(u == b || w == b)
            return;
        const int su = orient_sign(pa, pts_[u], pb);
        const int sw = orient_sign(pa, pts_[w], pb);
        if((su == 0 && dist2(pa, pts_[u]) < dist2(pa, pb) && orient_sign(pts_[u], pb, pa) == 0
            && (pts_[u].x - pa.x) * (pb.x - pa.x) + (pts_[u].y - pa.y) * (pb.y - pa.y) > 0)
           || (sw == 0 && dist2(pa, pts_[w]) < dist2(pa, pb)
               && (pts_[w].x - pa.x) * (pb.x - pa.x) + (pts_[w].y - pa.y) * (pb.y - pa.y) > 0))
            throw GeometryError("boundary segment passes through another boundary vertex");
        if(su > 0 && sw < 0)
            start = t;
    }
    if(start < 0)
    {
        // Every incident triangle was checked; the edge must exist by now.
        for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
            if(tris_[t].alive && local_index(t, a) >= 0 && local_index(t, b) >= 0)
                return;
        throw GeometryError("mesher: could not recover a boundary segment");
    }

    std::vector<int> removed{start};
    const int ka = local_index(start, a);
    int right = tris_[start].v[(ka + 1) % 3];
    int left = tris_[start].v[(ka + 2) % 3];
    std::vector<int> left_chain{left}, right_chain{right};
    int t = start;
    for(int guard = 0; guard < static_cast<int>(tris_.size()); ++guard)
    {
        const int slot = edge_slot(t, left, right);
        const int next = tris_[t].nb[slot];
        if(next < 0)
            throw GeometryError("mesher: boundary segment leaves the triangulation");
        if(constrained(left, right))
            throw GeometryError("boundary segments intersect");
        removed.push_back(next);
        const auto& nv = tris_[next].v;
        int z = -1;
        for(int k = 0; k < 3; ++k)
            if(nv[k] != left && nv[k] != right)
                z = nv[k];
        if(z == b)
            break;
        const int s = orient_sign(pa, pb, pts_[z]);
        if(s == 0)
            throw GeometryError("boundary segment passes through another vertex");
        if(s > 0)
        {
            left = z;
            left_chain.push_back(z);
        }
        else
        {
            right = z;
            right_chain.push_back(z);
        }
        t = next;
    }

    std::vector<char> gone(tris_.size(), 0);
    for(int r : removed)
        gone[r] = 1;
    std::unordered_map<std::uint64_t, int> outside;
    const int winding = tris_[start].winding;
    for(int r : removed)
    {
        const auto& tv = tris_[r].v;
        for(int k = 0; k < 3; ++k)
        {
            const int nb = tris_[r].nb[k];
            if(nb >= 0 && gone[nb])
                continue;
            outside[directed_key(tv[(k + 1) % 3], tv[(k + 2) % 3])] = nb;
        }
    }
    for(int r : removed)
        tris_[r].alive = false;

    std::vector<int> fresh;
    fill_pseudo_polygon(a, b, left_chain, fresh);
    std::vector<int> rev(right_chain.rbegin(), right_chain.rend());
    fill_pseudo_polygon(b, a, rev, fresh);
    for(int f : fresh)
        tris_[f].winding = winding;
    stitch(fresh, outside);
    last_ = fresh.front();
}

void Triangulator::recover_segments()
{
    for(const auto& s : segments_)
    {
        recover(s.a, s.b);
        constraint_net_[edge_key(s.a, s.b)] += (s.a < s.b) ? 1 : -1;
    }
}

void Triangulator::classify()
{
    const int n = static_cast<int>(tris_.size());
    std::vector<char> known(n, 0);
    std::vector<int> queue;
    for(int t = 0; t < n; ++t)
    {
        if(!tris_[t].alive)
            continue;
        for(int v : tris_[t].v)
            if(v >= super_[0] && v <= super_[2])
            {
                tris_[t].winding = 0;
                known[t] = 1;
                queue.push_back(t);
                break;
            }
    }
    for(std::size_t i = 0; i < queue.size(); ++i)
    {
        const int t = queue[i];
        const auto& tv = tris_[t].v;
        for(int k = 0; k < 3; ++k)
        {
            const int nb = tris_[t].nb[k];
            if(nb < 0)
                continue;
            const int u = tv[(k + 1) % 3], w = tv[(k + 2) % 3];
            int wind = tris_[t].winding;
            if(auto it = constraint_net_.find(edge_key(u, w)); it != constraint_net_.end())
            {
                const int p = std::min(u, w), q = std::max(u, w);
                int z = -1;
                for(int v : tris_[nb].v)
                    if(v != u && v != w)
                        z = v;
                const bool nb_left = orient_sign(pts_[p], pts_[q], pts_[z]) > 0;
                wind += nb_left ? it->second : -it->second;
            }
            if(known[nb])
            {
                if(tris_[nb].winding != wind)
                    throw GeometryError("inconsistent border orientation: region winding is ambiguous");
                continue;
            }
            known[nb] = 1;
            tris_[nb].winding = wind;
            queue.push_back(nb);
        }
    }
    for(int t = 0; t < n; ++t)
        if(tris_[t].alive && !known[t])
            throw GeometryError("mesher: disconnected triangulation");
}

// Frontal point placement: triangles grow inwards from the boundary, each
// new point completing a near-equilateral triangle on an accepted edge.
void Triangulator::refine_frontal(const MesherOptions& options)
{
    const double alpha = options.front_acceptance;
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    std::vector<char> accepted(tris_.size(), 0);

    const auto radius = [&](int t) {
        const auto& tv = tris_[t].v;
        return circumradius(pts_[tv[0]], pts_[tv[1]], pts_[tv[2]]);
    };
    const auto good_shape = [&](int t) { return radius(t) <= alpha * tri_size(t) * inv_sqrt3; };
    const auto in_domain = [&](int t) { return tris_[t].alive && tris_[t].winding > 0; };
    const auto front_edge = [&](int t) {
        int best = -1;
        double best_len = 0.0;
        const auto& tv = tris_[t].v;
        for(int k = 0; k < 3; ++k)
        {
            const int u = tv[(k + 1) % 3], w = tv[(k + 2) % 3];
            const int nb = tris_[t].nb[k];
            const bool front = constrained(u, w) || (nb >= 0 && in_domain(nb) && accepted[nb]);
            const double len = dist2(pts_[u], pts_[w]);
            if(front && len > best_len)
            {
                best = k;
                best_len = len;
            }
        }
        return best;
    };

    using Item = std::pair<double, int>;
    std::priority_queue<Item> queue;
    const auto push = [&](int t) {
        if(t >= 0 && in_domain(t) && !accepted[t] && front_edge(t) >= 0)
            queue.emplace(radius(t), -t);
    };
    for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
        if(in_domain(t))
            accepted[t] = good_shape(t);
    for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
        push(t);

    int inserted = 0;
    while(!queue.empty())
    {
        const int t = -queue.top().second;
        queue.pop();
        if(!in_domain(t) || accepted[t])
            continue;
        const int k = front_edge(t);
        if(k < 0)
            continue;
        if(inserted >= options.max_points)
            throw GeometryError("mesher: refinement exceeded the point budget");

        const auto tv = tris_[t].v;
        const Vec2 u = pts_[tv[(k + 1) % 3]], w = pts_[tv[(k + 2) % 3]];
        const Vec2 m{0.5 * (u.x + w.x), 0.5 * (u.y + w.y)};
        const double len = std::sqrt(dist2(u, w));
        const double p = 0.5 * len;
        const Vec2 n{-(w.y - u.y) / len, (w.x - u.x) / len}; // into t
        const Vec2 cc = circumcenter(pts_[tv[0]], pts_[tv[1]], pts_[tv[2]]);
        const double q = (cc.x - m.x) * n.x + (cc.y - m.y) * n.y;
        const double target = 0.5 * (size_[tv[(k + 1) % 3]] + size_[tv[(k + 2) % 3]]) * inv_sqrt3;
        double rho = std::max(target, p);
        if(q > 0.0)
            rho = std::min(rho, (p * p + q * q) / (2.0 * q));
        const double d = rho + std::sqrt(std::max(rho * rho - p * p, 0.0));
        const Vec2 x{m.x + d * n.x, m.y + d * n.y};

        int host = -1;
        if(walk(x, t, true, host) != WalkResult::Found)
        {
            accepted[t] = 1;
            continue;
        }
        bool crowded = false;
        for(int v : tris_[host].v)
            if(dist2(pts_[v], x) < 0.25 * target * target)
                crowded = true;
        if(crowded)
        {
            accepted[t] = 1;
            continue;
        }
        const auto& hv = tris_[host].v;
        const double det = orient2d(pts_[hv[0]], pts_[hv[1]], pts_[hv[2]]);
        const double l0 = orient2d(x, pts_[hv[1]], pts_[hv[2]]) / det;
        const double l1 = orient2d(pts_[hv[0]], x, pts_[hv[2]]) / det;
        const double xsize = l0 * size_[hv[0]] + l1 * size_[hv[1]] + (1.0 - l0 - l1) * size_[hv[2]];
        const int first_new = static_cast<int>(tris_.size());
        const int id = insert_in(x, host, xsize, false);
        if(id < 0)
        {
            accepted[t] = 1;
            continue;
        }
        ++inserted;
        accepted.resize(tris_.size(), 0);
        for(int f = first_new; f < static_cast<int>(tris_.size()); ++f)
            accepted[f] = good_shape(f);
        for(int f = first_new; f < static_cast<int>(tris_.size()); ++f)
        {
            push(f);
            for(int nb : tris_[f].nb)
                push(nb);
        }
    }
}

void Triangulator::refine(const MesherOptions& options)
{
    const double factor = options.size_factor;
    using Item = std::pair<double, int>;
    std::priority_queue<Item> queue;

    const auto badness = [&](int t) {
        const auto& tv = tris_[t].v;
        double longest = 0.0;
        for(int k = 0; k < 3; ++k)
            longest = std::max(longest, dist2(pts_[tv[k]], pts_[tv[(k + 1) % 3]]));
        const double target = factor * tri_size(t);
        return std::sqrt(longest) / target;
    };
    const auto consider = [&](int t) {
        if(!tris_[t].alive || tris_[t].winding <= 0)
            return;
        const double r = badness(t);
        if(r > 1.0)
            queue.emplace(r, -t); // ties favour older triangles
    };
    for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
        consider(t);

    int inserted = 0;
    while(!queue.empty())
    {
        const int t = -queue.top().second;
        queue.pop();
        if(!tris_[t].alive)
            continue;
        if(inserted >= options.max_points)
            throw GeometryError("mesher: refinement exceeded the point budget");

        const auto tv = tris_[t].v;
        const Vec2 a = pts_[tv[0]], b = pts_[tv[1]], c = pts_[tv[2]];
        const Vec2 centroid{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
        const double h = tri_size(t);

        Vec2 p = circumcenter(a, b, c);
        int host = -1;
        bool use_centroid = !std::isfinite(p.x) || !std::isfinite(p.y)
                            || walk(p, t, true, host) != WalkResult::Found;
        if(!use_centroid)
        {
            // Points encroaching a boundary segment would create slivers
            // against it; fall back to the centroid.
            const auto& hv = tris_[host].v;
            for(int k = 0; k < 3 && !use_centroid; ++k)
            {
                const int u = hv[(k + 1) % 3], w = hv[(k + 2) % 3];
                if(!constrained(u, w))
                    continue;
                const Vec2 m{0.5 * (pts_[u].x + pts_[w].x), 0.5 * (pts_[u].y + pts_[w].y)};
                if(dist2(m, p) < 0.25 * dist2(pts_[u], pts_[w]))
                    use_centroid = true;
            }
            for(int k = 0; k < 3 && !use_centroid; ++k)
                if(dist2(pts_[hv[k]], p) < 1e-4 * h * h)
                    use_centroid = true;
        }
        if(use_centroid)
        {
            p = centroid;
            host = t;
        }

        const auto bary_size = [&](int tri) {
            const auto& sv = tris_[tri].v;
            const Vec2 s0 = pts_[sv[0]], s1 = pts_[sv[1]], s2 = pts_[sv[2]];
            const double d = orient2d(s0, s1, s2);
            const double l0 = orient2d(p, s1, s2) / d;
            const double l1 = orient2d(s0, p, s2) / d;
            const double l2 = 1.0 - l0 - l1;
            return l0 * size_[sv[0]] + l1 * size_[sv[1]] + l2 * size_[sv[2]];
        };
        const double psize = bary_size(host);
        int id = insert_in(p, host, psize, false);
        if(id < 0 && host != t)
        {
            p = centroid;
            id = insert_in(p, t, bary_size(t), false);
        }
        if(id < 0)
            continue;
        ++inserted;
        for(int f = static_cast<int>(tris_.size()) - 1; f >= 0 && tris_[f].alive; --f)
        {
            const auto& fv = tris_[f].v;
            if(fv[0] == id || fv[1] == id || fv[2] == id)
                consider(f);
            else
                break;
        }
    }
}

bool Triangulator::flip_if_needed(int t, int k)
{
    const int n = tris_[t].nb[k];
    if(n < 0 || !tris_[n].alive)
        return false;
    const auto tv = tris_[t].v;
    const int a = tv[k], b = tv[(k + 1) % 3], c = tv[(k + 2) % 3];
    if(constrained(b, c))
        return false;
    const int kn = edge_slot(n, b, c);
    const int d = tris_[n].v[kn];
    if(incircle_sign(pts_[a], pts_[b], pts_[c], pts_[d]) <= 0)
        return false;
    if(orient_sign(pts_[a], pts_[b], pts_[d]) <= 0 || orient_sign(pts_[a], pts_[d], pts_[c]) <= 0)
        return false;

    const int tb = tris_[t].nb[(k + 1) % 3]; // across c-a
    const int tc = tris_[t].nb[(k + 2) % 3]; // across a-b
    // n is (d, c, b) up to rotation
    const int nc = tris_[n].nb[(kn + 1) % 3]; // across b-d
    const int nb = tris_[n].nb[(kn + 2) % 3]; // across d-c
    tris_[t].v = {a, b, d};
    tris_[t].nb = {nc, n, tc};
    tris_[n].v = {a, d, c};
    tris_[n].nb = {nb, tb, t};
    if(nc >= 0)
        tris_[nc].nb[edge_slot(nc, b, d)] = t;
    if(tb >= 0)
        tris_[tb].nb[edge_slot(tb, c, a)] = n;
    return true;
}

int Triangulator::restore_delaunay()
{
    int flips = 0;
    const int cap = 50 * static_cast<int>(tris_.size());
    for(bool changed = true; changed && flips < cap;)
    {
        changed = false;
        for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
        {
            if(!tris_[t].alive || tris_[t].winding <= 0)
                continue;
            for(int k = 0; k < 3; ++k)
                if(flip_if_needed(t, k))
                {
                    ++flips;
                    changed = true;
                    break;
                }
        }
    }
    return flips;
}

void Triangulator::smooth(int sweeps)
{
    const int np = static_cast<int>(pts_.size());
    for(int sweep = 0; sweep < sweeps; ++sweep)
    {
        std::vector<std::vector<int>> incident(static_cast<std::size_t>(np));
        for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
            if(tris_[t].alive)
                for(int v : tris_[t].v)
                    if(v >= super_[2] + 1)
                        incident[v].push_back(t);
        for(int v = super_[2] + 1; v < np; ++v)
        {
            const auto& ring = incident[v];
            if(ring.empty())
                continue;
            Vec2 sum{};
            for(int t : ring)
            {
                const int k = local_index(t, v);
                sum = sum + pts_[tris_[t].v[(k + 1) % 3]];
            }
            const Vec2 target = (1.0 / ring.size()) * sum;
            const Vec2 old = pts_[v];
            pts_[v] = target;
            bool ok = true;
            for(int t : ring)
            {
                const auto& tv = tris_[t].v;
                if(orient_sign(pts_[tv[0]], pts_[tv[1]], pts_[tv[2]]) <= 0)
                {
                    ok = false;
                    break;
                }
            }
            if(!ok)
                pts_[v] = old;
        }
        restore_delaunay();
    }
}

Mesh Triangulator::extract() const
{
    std::vector<int> remap(pts_.size(), -1);
    std::vector<char> used(pts_.size(), 0);
    std::vector<int> kept;
    for(int t = 0; t < static_cast<int>(tris_.size()); ++t)
        if(tris_[t].alive && tris_[t].winding > 0)
        {
            kept.push_back(t);
            for(int v : tris_[t].v)
                used[v] = 1;
        }
    if(kept.empty())
        throw GeometryError("borders enclose no region (check loop orientation)");

    std::vector<int> vertex_label(pts_.size(), 0);
    for(auto it = segments_.rbegin(); it != segments_.rend(); ++it)
        vertex_label[it->a] = it->label;

    std::vector<Vertex> verts;
    for(int i = 0; i < static_cast<int>(pts_.size()); ++i)
    {
        if(i >= super_[0] && i <= super_[2])
            continue;
        if(!used[i] && i >= n_input_)
            continue;
        if(!used[i])
            throw GeometryError("boundary sample not attached to the meshed region");
        remap[i] = static_cast<int>(verts.size());
        verts.push_back({pts_[i].x, pts_[i].y, vertex_label[i]});
    }

    // Regions: connected components across unconstrained edges.
    std::vector<int> region(tris_.size(), -1);
    int nregion = 0;
    for(int seed : kept)
    {
        if(region[seed] >= 0)
            continue;
        std::vector<int> stack{seed};
        region[seed] = nregion;
        while(!stack.empty())
        {
            const int t = stack.back();
            stack.pop_back();
            const auto& tv = tris_[t].v;
            for(int k = 0; k < 3; ++k)
            {
                const int nb = tris_[t].nb[k];
                if(nb < 0 || region[nb] >= 0 || !tris_[nb].alive || tris_[nb].winding <= 0)
                    continue;
                if(constrained(tv[(k + 1) % 3], tv[(k + 2) % 3]))
                    continue;
                region[nb] = nregion;
                stack.push_back(nb);
            }
        }
        ++nregion;
    }

    std::vector<Triangle> out;
    out.reserve(kept.size());
    for(int t : kept)
    {
        const auto& tv = tris_[t].v;
        out.push_back({{remap[tv[0]], remap[tv[1]], remap[tv[2]]}, region[t]});
    }
    std::vector<BoundaryEdge> edges;
    edges.reserve(segments_.size());
    for(const auto& s : segments_)
        edges.push_back({{remap[s.a], remap[s.b]}, s.label});
    return Mesh(std::move(verts), std::move(out), std::move(edges));
}

/// Proper or touching intersection of two segments that do not share an
/// endpoint, or collinear overlap of segments that do.
bool segments_conflict(Vec2 a, Vec2 b, Vec2 c, Vec2 d, bool shared)
{
    const int o1 = orient_sign(a, b, c), o2 = orient_sign(a, b, d);
    const int o3 = orient_sign(c, d, a), o4 = orient_sign(c, d, b);
    const auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
        // r collinear with pq: inside the open segment?
        const double dot = (r.x - p.x) * (q.x - p.x) + (r.y - p.y) * (q.y - p.y);
        return dot > 0.0 && dot < dist2(p, q);
    };
    if(shared)
    {
        // Only an overlap (fold back) is a conflict.
        if(o1 == 0 && o2 == 0)
            return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a)
                   || on_segment(c, d, b);
        return false;
    }
    if(o1 * o2 < 0 && o3 * o4 < 0)
        return true;
    if(o1 == 0 && (on_segment(a, b, c) || dist2(a, c) == 0.0 || dist2(b, c) == 0.0))
        return true;
    if(o2 == 0 && (on_segment(a, b, d) || dist2(a, d) == 0.0 || dist2(b, d) == 0.0))
        return true;
    if(o3 == 0 && on_segment(c, d, a))
        return true;
    if(o4 == 0 && on_segment(c, d, b))
        return true;
    return false;
}

} // namespace

Mesh build_from_borders(std::span<const Border> borders)
{
    return build_from_borders(borders, MesherOptions{});
}

Mesh build_from_borders(std::span<const Border> borders, const MesherOptions& options)
{
    if(borders.empty())
        throw GeometryError("buildmesh: no borders given");

    // Sample every border, including its end point.
    std::vector<Vec2> raw;
    std::vector<Segment> raw_segments;
    for(const auto& border : borders)
    {
        if(border.count == 0)
            throw InvalidArgument("border '" + border.name + "': count must be non-zero");
        if(!border.param)
            throw InvalidArgument("border '" + border.name + "' has no parametrization");
        const int n = std::abs(border.count);
        const int base = static_cast<int>(raw.size());
        for(int k = 0; k <= n; ++k)
        {
            const double s = static_cast<double>(k) / n;
            const double t = border.count > 0 ? border.t0 + (border.t1 - border.t0) * s
                                              : border.t1 - (border.t1 - border.t0) * s;
            const Vec2 p = border.param(t);
            if(!std::isfinite(p.x) || !std::isfinite(p.y))
                throw NumericError("border '" + border.name + "' evaluates to a non-finite point");
            raw.push_back(p);
        }
        for(int k = 0; k < n; ++k)
            raw_segments.push_back({base + k, base + k + 1, border.label});
    }

    // Merge coincident samples.
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin, xmax = -xmin, ymax = -xmin;
    for(const auto& p : raw)
    {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double diam = std::hypot(xmax - xmin, ymax - ymin);
    if(!(diam > 0.0))
        throw GeometryError("buildmesh: borders are degenerate");
    const double tol = 1e-9 * diam;

    std::vector<int> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return raw[i].x < raw[j].x || (raw[i].x == raw[j].x && i < j);
    });
    std::vector<int> rep(raw.size());
    std::iota(rep.begin(), rep.end(), 0);
    for(std::size_t i = 0; i < order.size(); ++i)
        for(std::size_t j = i + 1; j < order.size() && raw[order[j]].x - raw[order[i]].x <= tol;
            ++j)
            if(std::abs(raw[order[j]].y - raw[order[i]].y) <= tol)
            {
                const int a = order[i], b = order[j];
                // Union towards the smallest original index.
                int ra = a, rb = b;
                while(rep[ra] != ra)
                    ra = rep[ra];
                while(rep[rb] != rb)
                    rb = rep[rb];
                if(ra != rb)
                    rep[std::max(ra, rb)] = std::min(ra, rb);
            }
    std::vector<int> id(raw.size(), -1);
    std::vector<Vec2> points;
    for(std::size_t i = 0; i < raw.size(); ++i)
    {
        int r = static_cast<int>(i);
        while(rep[r] != r)
            r = rep[r];
        if(id[r] < 0)
        {
            id[r] = static_cast<int>(points.size());
            points.push_back(raw[r]);
        }
        id[i] = id[r];
    }
    std::vector<Segment> segments;
    segments.reserve(raw_segments.size());
    for(const auto& s : raw_segments)
    {
        const int a = id[s.a], b = id[s.b];
        if(a == b)
            throw GeometryError("buildmesh: zero-length boundary segment");
        segments.push_back({a, b, s.label});
    }

    // Closed loops: every vertex has matching in and out degree.
    std::vector<int> in(points.size(), 0), out(points.size(), 0);
    for(const auto& s : segments)
    {
        ++out[s.a];
        ++in[s.b];
    }
    for(std::size_t i = 0; i < points.size(); ++i)
        if(in[i] != out[i])
            throw GeometryError("buildmesh: border loop is not closed near ("
                                + std::to_string(points[i].x) + ", " + std::to_string(points[i].y)
                                + ")");

    // Self-intersection by a sweep over x-extents.
    {
        std::vector<int> sorder(segments.size());
        std::iota(sorder.begin(), sorder.end(), 0);
        const auto lo = [&](int s) { return std::min(points[segments[s].a].x, points[segments[s].b].x); };
        const auto hi = [&](int s) { return std::max(points[segments[s].a].x, points[segments[s].b].x); };
        std::sort(sorder.begin(), sorder.end(), [&](int i, int j) { return lo(i) < lo(j); });
        for(std::size_t i = 0; i < sorder.size(); ++i)
        {
            const auto& si = segments[sorder[i]];
            for(std::size_t j = i + 1; j < sorder.size() && lo(sorder[j]) <= hi(sorder[i]) + tol; ++j)
            {
                const auto& sj = segments[sorder[j]];
                const bool same = (si.a == sj.a && si.b == sj.b) || (si.a == sj.b && si.b == sj.a);
                if(same)
                    throw GeometryError("buildmesh: overlapping boundary segments");
                const bool shared = si.a == sj.a || si.a == sj.b || si.b == sj.a || si.b == sj.b;
                if(segments_conflict(points[si.a], points[si.b], points[sj.a], points[sj.b], shared))
                    throw GeometryError("buildmesh: self-intersecting boundary");
            }
        }
    }

    Triangulator tri(std::move(points), std::move(segments));
    tri.triangulate();
    tri.recover_segments();
    tri.classify();
    if(options.frontal)
        tri.refine_frontal(options);
    tri.refine(options);
    if(options.smoothing_sweeps > 0)
    {
        tri.smooth(options.smoothing_sweeps);
        // Smoothing may stretch a few edges past the size bound.
        tri.refine(options);
    }
    return tri.extract();
}

} // namespace femscript
