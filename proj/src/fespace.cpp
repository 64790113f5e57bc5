#include "femscript/fespace.hpp"

#include "femscript/error.hpp"
#include "femscript/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace femscript
{

Element element_from_name(std::string_view name)
{
    if(name == "P0")
        return Element::P0;
    if(name == "P1")
        return Element::P1;
    throw InvalidArgument("unsupported finite element '" + std::string(name)
                          + "' (only P0 and P1 are available)");
}

const char* element_name(Element e)
{
    return e == Element::P0 ? "P0" : "P1";
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, Element elem)
    : mesh_(std::move(mesh))
    , elem_(elem)
{
    if(!mesh_)
        throw InvalidArgument("fespace needs a mesh");
    if(elem_ != Element::P0 && elem_ != Element::P1)
        throw InvalidArgument("unsupported finite element kind");
}

int FeSpace::ndof() const noexcept
{
    return elem_ == Element::P1 ? mesh_->nv() : mesh_->nt();
}

Vec2 FeSpace::basis_gradient(int t, int l) const
{
    if(elem_ == Element::P0)
        return {};
    // grad lambda_l = rot90(opposite edge) / (2 |T|)
    const Vec2 a = mesh_->corner(t, (l + 1) % 3);
    const Vec2 b = mesh_->corner(t, (l + 2) % 3);
    const double twice = 2.0 * mesh_->area(t);
    return {(a.y - b.y) / twice, (b.x - a.x) / twice};
}

EvalPoint FeSpace::dof_site(int i) const
{
    EvalPoint p;
    p.mesh = mesh_.get();
    if(elem_ == Element::P1)
    {
        const auto [t, k] = mesh_->vertex_triangle(i);
        p.x = mesh_->vertices()[i].x;
        p.y = mesh_->vertices()[i].y;
        p.label = mesh_->vertices()[i].label;
        p.triangle = t;
        if(t >= 0)
            p.bary[k] = 1.0;
    }
    else
    {
        const Vec2 c = mesh_->barycenter(i);
        p.x = c.x;
        p.y = c.y;
        p.triangle = i;
        p.bary = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    }
    return p;
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space))
{
    if(!space_)
        throw InvalidArgument("finite element function needs a space");
    dofs_.assign(static_cast<std::size_t>(space_->ndof()), 0.0);
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space, std::vector<double> dofs)
    : space_(std::move(space))
    , dofs_(std::move(dofs))
{
    if(!space_)
        throw InvalidArgument("finite element function needs a space");
    if(dofs_.size() != static_cast<std::size_t>(space_->ndof()))
        throw InvalidArgument("DOF vector has length " + std::to_string(dofs_.size())
                              + ", space has " + std::to_string(space_->ndof()));
}

int FeFunction::triangle_of(const EvalPoint& p, std::array<double, 3>& bary) const
{
    const Mesh& m = space_->mesh();
    if(p.mesh == &m && p.triangle >= 0)
    {
        bary = p.bary;
        return p.triangle;
    }
    const auto loc = m.locate(p.x, p.y);
    if(!loc)
        throw OutOfDomain("point (" + format_real(p.x) + ", " + format_real(p.y)
                          + ") is outside the mesh");
    bary = loc->bary;
    return loc->triangle;
}

double FeFunction::value(const EvalPoint& p) const
{
    std::array<double, 3> b{};
    const int t = triangle_of(p, b);
    if(space_->element() == Element::P0)
        return dofs_[t];
    const auto& tv = space_->mesh().triangles()[t].v;
    return b[0] * dofs_[tv[0]] + b[1] * dofs_[tv[1]] + b[2] * dofs_[tv[2]];
}

double FeFunction::dx(const EvalPoint& p) const
{
    if(space_->element() == Element::P0)
        return 0.0;
    std::array<double, 3> b{};
    const int t = triangle_of(p, b);
    double s = 0.0;
    for(int l = 0; l < 3; ++l)
        s += dofs_[space_->dof(t, l)] * space_->basis_gradient(t, l).x;
    return s;
}

double FeFunction::dy(const EvalPoint& p) const
{
    if(space_->element() == Element::P0)
        return 0.0;
    std::array<double, 3> b{};
    const int t = triangle_of(p, b);
    double s = 0.0;
    for(int l = 0; l < 3; ++l)
        s += dofs_[space_->dof(t, l)] * space_->basis_gradient(t, l).y;
    return s;
}

Field FeFunction::as_field(std::shared_ptr<const FeFunction> self)
{
    return Field(Field::Fn([self = std::move(self)](const EvalPoint& p) { return self->value(p); }));
}

FeFunction interpolate(std::shared_ptr<const FeSpace> space, const Field& f)
{
    FeFunction u(space);
    auto& d = u.dofs();
    for(int i = 0; i < space->ndof(); ++i)
    {
        const EvalPoint p = space->dof_site(i);
        const double v = f(p);
        if(!std::isfinite(v))
            throw NumericError("interpolated function is not finite at (" + format_real(p.x) + ", "
                               + format_real(p.y) + ")");
        d[i] = v;
    }
    return u;
}

double evaluate(const FeFunction& u, double x, double y)
{
    EvalPoint p;
    p.x = x;
    p.y = y;
    return u.value(p);
}

void write_dofs(std::ostream& out, const std::vector<double>& dofs)
{
    for(double v : dofs)
        out << format_real(v) << '\n';
}

std::vector<double> read_dofs(std::istream& in, std::size_t expected)
{
    std::vector<double> out;
    out.reserve(expected);
    std::string word;
    while(out.size() < expected && in >> word)
    {
        double v = 0.0;
        const auto* end = word.data() + word.size();
        const auto res = std::from_chars(word.data(), end, v);
        if(res.ec != std::errc{} || res.ptr != end)
            throw ParseError("expected a real value, got '" + word + "'",
                             static_cast<int>(out.size()) + 1);
        out.push_back(v);
    }
    if(out.size() != expected)
        throw ParseError("expected " + std::to_string(expected) + " values, found "
                             + std::to_string(out.size()),
                         0);
    return out;
}

} // namespace femscript
