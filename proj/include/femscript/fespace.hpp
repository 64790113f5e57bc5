#pragma once

#include "femscript/field.hpp"
#include "femscript/mesh.hpp"

#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

namespace femscript
{

enum class Element
{
    P0,
    P1
};

/// "P0" or "P1"; anything else is an InvalidArgument.
Element element_from_name(std::string_view name);
const char* element_name(Element e);

/// Scalar finite element space over a shared mesh. P1 numbers its degrees
/// of freedom like the mesh vertices, P0 like the triangles.
class FeSpace
{
public:
    FeSpace(std::shared_ptr<const Mesh> mesh, Element elem);

    const Mesh& mesh() const noexcept { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
    Element element() const noexcept { return elem_; }
    int ndof() const noexcept;
    int dofs_per_triangle() const noexcept { return elem_ == Element::P1 ? 3 : 1; }

    /// Global DOF of local index l in triangle t.
    int dof(int t, int l) const { return elem_ == Element::P1 ? mesh_->triangles()[t].v[l] : t; }

    /// Value of local basis function l at barycentric point `bary`.
    double basis(int l, const std::array<double, 3>& bary) const
    {
        return elem_ == Element::P1 ? bary[l] : 1.0;
    }

    /// Constant gradient of local basis function l on triangle t.
    Vec2 basis_gradient(int t, int l) const;

    /// Sites where interpolation samples: vertices (P1) or barycenters (P0).
    EvalPoint dof_site(int i) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    Element elem_;
};

/// DOF vector bound to a space: u_h = sum_i u_i phi_i.
class FeFunction
{
public:
    explicit FeFunction(std::shared_ptr<const FeSpace> space);
    FeFunction(std::shared_ptr<const FeSpace> space, std::vector<double> dofs);

    const FeSpace& space() const noexcept { return *space_; }
    const std::shared_ptr<const FeSpace>& space_ptr() const noexcept { return space_; }
    std::vector<double>& dofs() noexcept { return dofs_; }
    const std::vector<double>& dofs() const noexcept { return dofs_; }

    /// Value at a point; uses the point's triangle when it belongs to this
    /// mesh, otherwise locates it. Throws OutOfDomain outside the mesh.
    double value(const EvalPoint& p) const;
    /// Partial derivatives, piecewise constant (zero for P0).
    double dx(const EvalPoint& p) const;
    double dy(const EvalPoint& p) const;

    /// Coefficient field reading this function; shares `self`.
    static Field as_field(std::shared_ptr<const FeFunction> self);

private:
    int triangle_of(const EvalPoint& p, std::array<double, 3>& bary) const;

    std::shared_ptr<const FeSpace> space_;
    std::vector<double> dofs_;
};

/// dofs[i] = f(site_i). Throws NumericError on non-finite samples.
FeFunction interpolate(std::shared_ptr<const FeSpace> space, const Field& f);

/// Point evaluation; OutOfDomain when (x, y) is outside the mesh.
double evaluate(const FeFunction& u, double x, double y);

/// Plain text DOF dump, one value per line.
void write_dofs(std::ostream& out, const std::vector<double>& dofs);
std::vector<double> read_dofs(std::istream& in, std::size_t expected);

} // namespace femscript
