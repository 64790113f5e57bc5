#include "femscript/forms.hpp"

#include "femscript/error.hpp"
#include "femscript/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace femscript
{

namespace
{

EvalPoint triangle_point(const Mesh& mesh, int t, const std::array<double, 3>& bary)
{
    EvalPoint p;
    p.mesh = &mesh;
    p.triangle = t;
    p.bary = bary;
    for(int k = 0; k < 3; ++k)
    {
        const Vec2 c = mesh.corner(t, k);
        p.x += bary[k] * c.x;
        p.y += bary[k] * c.y;
    }
    return p;
}

/// Quadrature point at parameter s along boundary edge e, oriented as stored.
EvalPoint edge_point(const Mesh& mesh, int e, double s)
{
    const auto [t, k] = mesh.edge_triangle(e);
    const auto& ev = mesh.edges()[e].v;
    const auto& tv = mesh.triangles()[t].v;
    EvalPoint p;
    p.mesh = &mesh;
    p.triangle = t;
    p.label = mesh.edges()[e].label;
    for(int l = 0; l < 3; ++l)
    {
        if(tv[l] == ev[0])
            p.bary[l] = 1.0 - s;
        else if(tv[l] == ev[1])
            p.bary[l] = s;
    }
    const Vec2 a = mesh.point(ev[0]), b = mesh.point(ev[1]);
    p.x = (1.0 - s) * a.x + s * b.x;
    p.y = (1.0 - s) * a.y + s * b.y;
    // Outward: away from the vertex opposite the edge.
    const Vec2 opp = mesh.corner(t, k);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    Vec2 n{(b.y - a.y) / len, -(b.x - a.x) / len};
    if(n.x * (opp.x - a.x) + n.y * (opp.y - a.y) > 0.0)
        n = {-n.x, -n.y};
    p.normal = n;
    return p;
}

double edge_length(const Mesh& mesh, int e)
{
    const auto& ev = mesh.edges()[e].v;
    const Vec2 a = mesh.point(ev[0]), b = mesh.point(ev[1]);
    return std::hypot(b.x - a.x, b.y - a.y);
}

bool label_selected(const std::vector<int>& labels, int label)
{
    return labels.empty() || std::find(labels.begin(), labels.end(), label) != labels.end();
}

double checked(double v, const EvalPoint& p)
{
    if(!std::isfinite(v))
        throw NumericError("integrand is not finite at (" + format_real(p.x) + ", "
                           + format_real(p.y) + ")");
    return v;
}

double apply_op(const FeSpace& space, Op op, int t, int l, const std::array<double, 3>& bary)
{
    switch(op)
    {
    case Op::Value:
        return space.basis(l, bary);
    case Op::Dx:
        return space.basis_gradient(t, l).x;
    case Op::Dy:
        return space.basis_gradient(t, l).y;
    }
    return 0.0;
}

void check_labels(const Mesh& mesh, const std::vector<int>& labels, const char* what)
{
    const auto present = mesh.labels();
    for(int l : labels)
        if(!std::binary_search(present.begin(), present.end(), l))
            throw InvalidArgument(std::string(what) + ": label " + std::to_string(l)
                                  + " does not exist on the mesh");
}

} // namespace

double integrate_2d(const Mesh& mesh, const Field& g, QuadRule quad)
{
    const auto rule = triangle_rule(quad);
    double total = 0.0;
    for(int t = 0; t < mesh.nt(); ++t)
    {
        double s = 0.0;
        for(const auto& q : rule)
        {
            const EvalPoint p = triangle_point(mesh, t, q.bary);
            s += q.weight * checked(g(p), p);
        }
        total += s * mesh.area(t);
    }
    return total;
}

double integrate_1d(const Mesh& mesh, const std::vector<int>& labels, const Field& g)
{
    if(labels.empty())
        throw InvalidArgument("int1d: empty label set");
    const auto rule = edge_rule(QuadRule::Default);
    double total = 0.0;
    for(int e = 0; e < mesh.nbe(); ++e)
    {
        if(!label_selected(labels, mesh.edges()[e].label))
            continue;
        double s = 0.0;
        for(const auto& q : rule)
        {
            const EvalPoint p = edge_point(mesh, e, q.s);
            s += q.weight * checked(g(p), p);
        }
        total += s * edge_length(mesh, e);
    }
    return total;
}

std::vector<std::pair<int, double>> dirichlet_dofs(const FeSpace& space,
                                                   const std::vector<DirichletCondition>& conds)
{
    if(conds.empty())
        return {};
    if(space.element() != Element::P1)
        throw InvalidArgument("on(): Dirichlet conditions need a P1 space (P0 has no boundary DOFs)");
    const Mesh& mesh = space.mesh();
    std::map<int, double> values;
    for(const auto& c : conds)
    {
        check_labels(mesh, c.labels, "on()");
        for(int e = 0; e < mesh.nbe(); ++e)
        {
            const auto& edge = mesh.edges()[e];
            if(std::find(c.labels.begin(), c.labels.end(), edge.label) == c.labels.end())
                continue;
            for(int end = 0; end < 2; ++end)
            {
                EvalPoint p = edge_point(mesh, e, end == 0 ? 0.0 : 1.0);
                const int v = edge.v[end];
                p.x = mesh.vertices()[v].x;
                p.y = mesh.vertices()[v].y;
                values[v] = checked(c.value(p), p);
            }
        }
    }
    return {values.begin(), values.end()};
}

SparseMatrix assemble_bilinear(const VarForm& form, const FeSpace& trial, const FeSpace& test,
                               double tgv)
{
    if(&trial.mesh() != &test.mesh())
        throw InvalidArgument("assemble: trial and test spaces live on different meshes");
    const Mesh& mesh = test.mesh();
    const int nu = trial.dofs_per_triangle();
    const int nv = test.dofs_per_triangle();

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh.nt()) * nu * nv);

    bool any_area = false, any_boundary = false;
    for(const auto& term : form.bilinear)
        (term.where.kind == Integral::Area ? any_area : any_boundary) = true;

    if(any_area)
    {
        double local[3][3];
        for(int t = 0; t < mesh.nt(); ++t)
        {
            const double area = mesh.area(t);
            for(auto& row : local)
                std::fill(std::begin(row), std::end(row), 0.0);
            for(const auto& term : form.bilinear)
            {
                if(term.where.kind != Integral::Area)
                    continue;
                for(const auto& q : triangle_rule(term.where.quad))
                {
                    const EvalPoint p = triangle_point(mesh, t, q.bary);
                    const double c = checked(term.coef(p), p) * q.weight * area;
                    if(c == 0.0)
                        continue;
                    for(int i = 0; i < nv; ++i)
                    {
                        const double vi = apply_op(test, term.test, t, i, q.bary);
                        for(int j = 0; j < nu; ++j)
                            local[i][j] += c * vi * apply_op(trial, term.trial, t, j, q.bary);
                    }
                }
            }
            for(int i = 0; i < nv; ++i)
                for(int j = 0; j < nu; ++j)
                    trip.push_back({test.dof(t, i), trial.dof(t, j), local[i][j]});
        }
    }

    if(any_boundary)
    {
        for(const auto& term : form.bilinear)
            if(term.where.kind == Integral::Boundary)
                check_labels(mesh, term.where.labels, "int1d");
        for(int e = 0; e < mesh.nbe(); ++e)
        {
            const int t = mesh.edge_triangle(e).first;
            const double len = edge_length(mesh, e);
            for(const auto& term : form.bilinear)
            {
                if(term.where.kind != Integral::Boundary
                   || !label_selected(term.where.labels, mesh.edges()[e].label))
                    continue;
                double local[3][3] = {};
                for(const auto& q : edge_rule(term.where.quad))
                {
                    const EvalPoint p = edge_point(mesh, e, q.s);
                    const double c = checked(term.coef(p), p) * q.weight * len;
                    for(int i = 0; i < nv; ++i)
                    {
                        const double vi = apply_op(test, term.test, t, i, p.bary);
                        for(int j = 0; j < nu; ++j)
                            local[i][j] += c * vi * apply_op(trial, term.trial, t, j, p.bary);
                    }
                }
                for(int i = 0; i < nv; ++i)
                    for(int j = 0; j < nu; ++j)
                        trip.push_back({test.dof(t, i), trial.dof(t, j), local[i][j]});
            }
        }
    }

    const auto dir = dirichlet_dofs(test, form.dirichlet);
    for(const auto& [i, g] : dir)
        if(i < trial.ndof())
            trip.push_back({i, i, 0.0});
    SparseMatrix a = SparseMatrix::from_triplets(test.ndof(), trial.ndof(), std::move(trip));
    for(const auto& [i, g] : dir)
        if(double* d = a.find(i, i))
            *d = tgv;
    return a;
}

std::vector<double> assemble_linear(const VarForm& form, const FeSpace& test, double tgv)
{
    const Mesh& mesh = test.mesh();
    const int nv = test.dofs_per_triangle();
    std::vector<double> b(static_cast<std::size_t>(test.ndof()), 0.0);

    for(const auto& term : form.linear)
    {
        if(term.where.kind == Integral::Area)
        {
            const auto rule = triangle_rule(term.where.quad);
            for(int t = 0; t < mesh.nt(); ++t)
            {
                const double area = mesh.area(t);
                double local[3] = {};
                for(const auto& q : rule)
                {
                    const EvalPoint p = triangle_point(mesh, t, q.bary);
                    const double c = checked(term.coef(p), p) * q.weight * area;
                    for(int i = 0; i < nv; ++i)
                        local[i] += c * apply_op(test, term.test, t, i, q.bary);
                }
                for(int i = 0; i < nv; ++i)
                    b[test.dof(t, i)] += local[i];
            }
        }
        else
        {
            check_labels(mesh, term.where.labels, "int1d");
            for(int e = 0; e < mesh.nbe(); ++e)
            {
                if(!label_selected(term.where.labels, mesh.edges()[e].label))
                    continue;
                const int t = mesh.edge_triangle(e).first;
                const double len = edge_length(mesh, e);
                double local[3] = {};
                for(const auto& q : edge_rule(term.where.quad))
                {
                    const EvalPoint p = edge_point(mesh, e, q.s);
                    const double c = checked(term.coef(p), p) * q.weight * len;
                    for(int i = 0; i < nv; ++i)
                        local[i] += c * apply_op(test, term.test, t, i, p.bary);
                }
                for(int i = 0; i < nv; ++i)
                    b[test.dof(t, i)] += local[i];
            }
        }
    }

    for(const auto& [i, g] : dirichlet_dofs(test, form.dirichlet))
        b[i] = g * tgv;
    return b;
}

} // namespace femscript
