#pragma once

#include "femscript/dsl/ast.hpp"
#include "femscript/fespace.hpp"
#include "femscript/forms.hpp"
#include "femscript/linalg.hpp"

#include <complex>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

namespace femscript::dsl
{

using Complex = std::complex<double>;
struct Value;
struct Scope;

struct RealArr
{
    std::shared_ptr<std::vector<double>> v;
    bool integer = false;
};

struct CplxArr
{
    std::shared_ptr<std::vector<Complex>> v;
};

struct RealMat
{
    std::shared_ptr<DenseMatrix> m;
};

struct CplxMat
{
    std::shared_ptr<ComplexMatrix> m;
};

/// `matrix` built from a varf, with its solver setting and a cached
/// factorisation.
struct SparseState
{
    SparseMatrix a;
    std::string solver = "LU";
    std::shared_ptr<const LuFactorization> lu;
};

struct SparseVal
{
    std::shared_ptr<SparseState> s;
};

/// A^-1, applied lazily by multiplication.
struct InverseVal
{
    std::shared_ptr<SparseState> s;
};

struct MeshVal
{
    std::shared_ptr<const Mesh> m;
};

struct TriangleRef
{
    std::shared_ptr<const Mesh> m;
    int t = 0;
};

struct VertexRef
{
    std::shared_ptr<const Mesh> m;
    int v = 0;
};

struct SpaceVal
{
    std::shared_ptr<const FeSpace> s;
};

/// Finite element function; the DOF vector is shared with `u[]` views.
struct FeVal
{
    std::shared_ptr<const FeSpace> space;
    std::shared_ptr<std::vector<double>> dofs;
};

/// Real-valued expression of the evaluation point (x, y, FE functions...).
struct LazyVal
{
    Field f;
};

/// coef * op(trial) * op(test); trial/test are -1 when absent.
struct Monomial
{
    Field coef;
    int trial = -1;
    int test = -1;
};

struct SymVal
{
    std::shared_ptr<const std::vector<Monomial>> terms;
};

/// Heterogeneous bracket list such as [dx(u), dy(u)].
struct TupleVal
{
    std::shared_ptr<const std::vector<Value>> items;
};

struct TransposedVal
{
    std::shared_ptr<const Value> inner;
};

/// Pieces of a variational form, accumulated with + and -.
struct FormPiece
{
    VarForm form;
    std::vector<std::string> unknowns; ///< on(..., u=g): the name of u
    std::shared_ptr<const Mesh> mesh;
};

struct FormVal
{
    std::shared_ptr<const FormPiece> p;
};

/// int2d(Th, ...) or int1d(Th, labels): waiting for its integrand.
struct IntegralVal
{
    std::shared_ptr<const Mesh> mesh;
    Integral where;
    bool quad_given = false;
};

struct FuncVal
{
    const Stmt* def = nullptr; ///< FuncDef statement
    ExprPtr body;              ///< analytic func body
    std::shared_ptr<Scope> env;
};

struct BorderDef
{
    const Stmt* def = nullptr;
    std::shared_ptr<Scope> env;
    double t0 = 0.0;
    double t1 = 0.0;
};

struct BorderVal
{
    std::shared_ptr<const BorderDef> b;
};

struct BorderChain
{
    std::vector<std::pair<std::shared_ptr<const BorderDef>, int>> parts;
};

struct ProblemState
{
    const Stmt* def = nullptr;
    std::shared_ptr<Scope> env;
    std::shared_ptr<const LuFactorization> lu; ///< reused when init != 0
    std::shared_ptr<const FeSpace> lu_space;
};

struct ProblemVal
{
    std::shared_ptr<ProblemState> p;
};

struct VarfVal
{
    const Stmt* def = nullptr;
    std::shared_ptr<Scope> env;
};

struct StreamState
{
    std::ostream* out = nullptr;
    std::istream* in = nullptr;
    std::unique_ptr<std::fstream> file;
    std::string path;
};

struct StreamVal
{
    std::shared_ptr<StreamState> s;
};

struct BuiltinVal
{
    std::string name;
};

struct Value
{
    using Data = std::variant<std::monostate, long long, double, Complex, std::string, RealArr, CplxArr,
                              RealMat, CplxMat, SparseVal, InverseVal, MeshVal, TriangleRef, VertexRef,
                              SpaceVal, FeVal, LazyVal, SymVal, TupleVal, TransposedVal, FormVal,
                              IntegralVal, FuncVal, BorderVal, BorderChain, ProblemVal, VarfVal, StreamVal,
                              BuiltinVal>;
    Data d;

    Value() = default;
    template <class T>
        requires std::is_constructible_v<Data, T>
    Value(T v) : d(std::move(v))
    {}

    template <class T>
    bool is() const
    {
        return std::holds_alternative<T>(d);
    }
    template <class T>
    const T& as() const
    {
        return std::get<T>(d);
    }
    template <class T>
    T& as()
    {
        return std::get<T>(d);
    }
};

struct Slot
{
    Value value;
    TypeSpec type; ///< empty for builtins and loose bindings
};

struct Scope
{
    std::unordered_map<std::string, Slot> vars;
    std::shared_ptr<Scope> parent;

    Slot* find(const std::string& name)
    {
        for(Scope* s = this; s; s = s->parent.get())
        {
            auto it = s->vars.find(name);
            if(it != s->vars.end())
                return &it->second;
        }
        return nullptr;
    }
};

// --- helpers shared by the evaluator (value.cpp) -----------------------

const char* type_name(const Value& v);
bool is_number(const Value& v);
bool is_pointwise(const Value& v); ///< LazyVal or FeVal
double to_real(const Value& v, const char* what);
long long to_int(const Value& v, const char* what);
Complex to_complex(const Value& v, const char* what);
bool truthy(const Value& v);

Value make_array(std::vector<double> v, bool integer = false);

/// Point value of an FE function; locates the point when it lies on
/// another mesh.
double fe_value(const FeVal& u, const EvalPoint& p);
double fe_derivative(const FeVal& u, const EvalPoint& p, int dir);

/// Numbers, LazyVal and FeVal as a coefficient field.
Field to_field(const Value& v, const char* what);
Field field_product(const Field& a, const Field& b);
Field field_scale(const Field& a, double s);

/// Binary and unary operators of the language (everything but assignment
/// and stream extraction). Throws Error subclasses with plain messages.
Value binary_op(const std::string& op, const Value& a, const Value& b);
Value unary_op(const std::string& op, const Value& a);
Value transpose_value(const Value& v);

/// Interpolation of a number, LazyVal or FeVal into a space.
std::vector<double> interpolate_value(const std::shared_ptr<const FeSpace>& space, const Value& v);

/// Scalar math builtins applied to numbers or pointwise values.
bool is_math_function(const std::string& name);
Value math_call(const std::string& name, const std::vector<Value>& args);

std::string to_display(const Value& v);

} // namespace femscript::dsl
