#pragma once

#include "femscript/fespace.hpp"
#include "femscript/field.hpp"
#include "femscript/linalg.hpp"
#include "femscript/quadrature.hpp"

#include <vector>

namespace femscript
{

inline constexpr double kDefaultTgv = 1e30;

/// Which derivative of a trial or test function enters a term.
enum class Op
{
    Value,
    Dx,
    Dy,
};

/// Integration domain of a term: the whole mesh, or boundary edges whose
/// label is in `labels` (empty means every boundary edge).
struct Integral
{
    enum Kind
    {
        Area,
        Boundary
    };
    Kind kind = Area;
    std::vector<int> labels;
    QuadRule quad = QuadRule::Default;
};

/// coef * op(u) * op(v)
struct BilinearTerm
{
    Integral where;
    Op trial = Op::Value;
    Op test = Op::Value;
    Field coef{1.0};
};

/// coef * op(v)
struct LinearTerm
{
    Integral where;
    Op test = Op::Value;
    Field coef{1.0};
};

/// on(labels, u = value): penalised with tgv.
struct DirichletCondition
{
    std::vector<int> labels;
    Field value{0.0};
};

struct VarForm
{
    std::vector<BilinearTerm> bilinear;
    std::vector<LinearTerm> linear;
    std::vector<DirichletCondition> dirichlet;
};

/// Integral of g over the mesh with the given rule.
double integrate_2d(const Mesh& mesh, const Field& g, QuadRule quad = QuadRule::Default);

/// Integral of g over boundary edges carrying one of `labels`, with a
/// two-point Gauss rule per edge.
double integrate_1d(const Mesh& mesh, const std::vector<int>& labels, const Field& g);

/// Dirichlet DOFs and their interpolated values. Later conditions override
/// earlier ones at shared vertices. Returned in ascending DOF order.
std::vector<std::pair<int, double>> dirichlet_dofs(const FeSpace& space,
                                                   const std::vector<DirichletCondition>& conds);

/// Sum of all bilinear terms, then a_ii = tgv on Dirichlet DOFs.
SparseMatrix assemble_bilinear(const VarForm& form, const FeSpace& trial, const FeSpace& test,
                               double tgv = kDefaultTgv);

/// Sum of all linear terms, then b_i = g_i * tgv on Dirichlet DOFs.
std::vector<double> assemble_linear(const VarForm& form, const FeSpace& test,
                                    double tgv = kDefaultTgv);

} // namespace femscript
