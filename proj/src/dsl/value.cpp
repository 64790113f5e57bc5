#include "value.hpp"

#include "femscript/error.hpp"
#include "femscript/numfmt.hpp"

#include <cmath>
#include <sstream>

namespace femscript::dsl
{
namespace
{

[[noreturn]] void bad_operands(const std::string& op, const Value& a, const Value& b)
{
    throw InvalidArgument(std::string("operator ") + op + " is not defined for " + type_name(a) + " and " +
                          type_name(b));
}

bool is_int(const Value& v) { return v.is<long long>(); }

long long ipow(long long base, long long exp)
{
    long long r = 1;
    while(exp-- > 0)
        r *= base;
    return r;
}

double real_op(const std::string& op, double a, double b)
{
    if(op == "+") return a + b;
    if(op == "-") return a - b;
    if(op == "*") return a * b;
    if(op == "/") return a / b;
    if(op == "^") return std::pow(a, b);
    if(op == "%") return std::fmod(a, b);
    if(op == "<") return a < b;
    if(op == ">") return a > b;
    if(op == "<=") return a <= b;
    if(op == ">=") return a >= b;
    if(op == "==") return a == b;
    if(op == "!=") return a != b;
    if(op == "&" || op == "&&") return (a != 0.0) && (b != 0.0);
    if(op == "|" || op == "||") return (a != 0.0) || (b != 0.0);
    throw InvalidArgument("operator " + op + " is not defined for real values");
}

bool is_comparison(const std::string& op)
{
    return op == "<" || op == ">" || op == "<=" || op == ">=" || op == "==" || op == "!=" || op == "&" ||
           op == "&&" || op == "|" || op == "||";
}

Value number_op(const std::string& op, const Value& a, const Value& b)
{
    if(is_int(a) && is_int(b))
    {
        const long long x = a.as<long long>(), y = b.as<long long>();
        if(op == "+") return x + y;
        if(op == "-") return x - y;
        if(op == "*") return x * y;
        if(op == "/")
        {
            if(y == 0)
                throw NumericError("integer division by zero");
            return x / y;
        }
        if(op == "%")
        {
            if(y == 0)
                throw NumericError("integer division by zero");
            return x % y;
        }
        if(op == "^")
            return y >= 0 ? Value(ipow(x, y)) : Value(std::pow(static_cast<double>(x), static_cast<double>(y)));
        return static_cast<long long>(real_op(op, static_cast<double>(x), static_cast<double>(y)));
    }
    if(a.is<Complex>() || b.is<Complex>())
    {
        const Complex x = to_complex(a, "operand"), y = to_complex(b, "operand");
        if(op == "+") return x + y;
        if(op == "-") return x - y;
        if(op == "*") return x * y;
        if(op == "/") return x / y;
        if(op == "^") return std::pow(x, y);
        if(op == "==") return static_cast<long long>(x == y);
        if(op == "!=") return static_cast<long long>(x != y);
        bad_operands(op, a, b);
    }
    const double r = real_op(op, to_real(a, "operand"), to_real(b, "operand"));
    if(is_comparison(op))
        return static_cast<long long>(r);
    return r;
}

Value lazy_op(const std::string& op, const Value& a, const Value& b)
{
    const Field fa = to_field(a, "operand");
    const Field fb = to_field(b, "operand");
    if(fa.is_constant() && fb.is_constant())
        return LazyVal{Field(real_op(op, fa.constant(), fb.constant()))};
    if(op == "*")
        return LazyVal{field_product(fa, fb)};
    if(op == "+")
        return LazyVal{Field(Field::Fn([fa, fb](const EvalPoint& p) { return fa(p) + fb(p); }))};
    if(op == "-")
        return LazyVal{Field(Field::Fn([fa, fb](const EvalPoint& p) { return fa(p) - fb(p); }))};
    if(op == "/")
        return LazyVal{Field(Field::Fn([fa, fb](const EvalPoint& p) { return fa(p) / fb(p); }))};
    if(op == "^" && fb.is_constant() && fb.constant() == 2.0)
        return LazyVal{Field(Field::Fn([fa](const EvalPoint& p) {
            const double v = fa(p);
            return v * v;
        }))};
    real_op(op, 0.0, 1.0); // rejects unknown operators
    return LazyVal{Field(Field::Fn([op, fa, fb](const EvalPoint& p) { return real_op(op, fa(p), fb(p)); }))};
}

// --- symbolic (trial/test) algebra ------------------------------------

std::vector<Monomial> to_terms(const Value& v)
{
    if(v.is<SymVal>())
        return *v.as<SymVal>().terms;
    return {Monomial{to_field(v, "form coefficient"), -1, -1}};
}

Value sym(std::vector<Monomial> terms)
{
    return SymVal{std::make_shared<const std::vector<Monomial>>(std::move(terms))};
}

Value sym_op(const std::string& op, const Value& a, const Value& b)
{
    if(a.is<Complex>() || b.is<Complex>())
        throw Unsupported("complex values cannot enter a variational form");
    if(op == "+" || op == "-")
    {
        auto terms = to_terms(a);
        for(Monomial m : to_terms(b))
        {
            if(op == "-")
                m.coef = field_scale(m.coef, -1.0);
            terms.push_back(std::move(m));
        }
        return sym(std::move(terms));
    }
    if(op == "*")
    {
        std::vector<Monomial> out;
        for(const Monomial& x : to_terms(a))
        {
            for(const Monomial& y : to_terms(b))
            {
                if((x.trial >= 0 && y.trial >= 0) || (x.test >= 0 && y.test >= 0))
                    throw InvalidArgument("a form term is at most linear in the unknown and in the test function");
                out.push_back({field_product(x.coef, y.coef), std::max(x.trial, y.trial), std::max(x.test, y.test)});
            }
        }
        return sym(std::move(out));
    }
    if(op == "/" && !b.is<SymVal>())
    {
        const Field d = to_field(b, "divisor");
        const Field inv = d.is_constant() ? Field(1.0 / d.constant())
                                          : Field(Field::Fn([d](const EvalPoint& p) { return 1.0 / d(p); }));
        return sym_op("*", a, LazyVal{inv});
    }
    if(op == "^" && b.is<long long>() && b.as<long long>() == 1)
        return a;
    throw InvalidArgument("operator " + op + " cannot be applied to the unknown or test function");
}

Value tuple(std::vector<Value> items)
{
    return TupleVal{std::make_shared<const std::vector<Value>>(std::move(items))};
}

const std::vector<double>& arr(const Value& v) { return *v.as<RealArr>().v; }

Value array_op(const std::string& op, const Value& a, const Value& b)
{
    const bool aa = a.is<RealArr>(), ba = b.is<RealArr>();
    if(aa && ba)
    {
        const auto& x = arr(a);
        const auto& y = arr(b);
        if(x.size() != y.size())
            throw InvalidArgument("array sizes differ: " + std::to_string(x.size()) + " and " +
                                  std::to_string(y.size()));
        if(op == ".*")
            return make_array(elementwise_mul(x, y));
        if(op == "./")
            return make_array(elementwise_div(x, y));
        if(op == "+" || op == "-")
        {
            std::vector<double> r(x.size());
            for(std::size_t i = 0; i < x.size(); ++i)
                r[i] = op == "+" ? x[i] + y[i] : x[i] - y[i];
            return make_array(std::move(r));
        }
        bad_operands(op, a, b);
    }
    const bool left = aa;
    const auto& x = left ? arr(a) : arr(b);
    const double s = to_real(left ? b : a, "array scalar");
    std::vector<double> r(x.size());
    for(std::size_t i = 0; i < x.size(); ++i)
    {
        if(op == "*")
            r[i] = x[i] * s;
        else if(op == "/" && left)
            r[i] = x[i] / s;
        else if(op == "+")
            r[i] = x[i] + s;
        else if(op == "-")
            r[i] = left ? x[i] - s : s - x[i];
        else
            bad_operands(op, a, b);
    }
    return make_array(std::move(r), a.is<RealArr>() && a.as<RealArr>().integer && is_int(b));
}

Value matrix_op(const std::string& op, const Value& a, const Value& b)
{
    if(a.is<RealMat>() && b.is<RealArr>() && op == "*")
        return make_array(matvec(*a.as<RealMat>().m, arr(b)));
    if(a.is<RealMat>() && b.is<RealMat>())
    {
        const DenseMatrix& x = *a.as<RealMat>().m;
        const DenseMatrix& y = *b.as<RealMat>().m;
        if(op == "*")
            return RealMat{std::make_shared<DenseMatrix>(matmul(x, y))};
        if((op == "+" || op == "-") && x.rows() == y.rows() && x.cols() == y.cols())
        {
            auto r = std::make_shared<DenseMatrix>(x);
            for(std::size_t i = 0; i < r->data().size(); ++i)
                r->data()[i] += op == "+" ? y.data()[i] : -y.data()[i];
            return RealMat{r};
        }
        bad_operands(op, a, b);
    }
    if(a.is<RealMat>() || b.is<RealMat>())
    {
        const DenseMatrix& m = a.is<RealMat>() ? *a.as<RealMat>().m : *b.as<RealMat>().m;
        const Value& other = a.is<RealMat>() ? b : a;
        if(!is_number(other) || (op != "*" && !(op == "/" && a.is<RealMat>())))
            bad_operands(op, a, b);
        const double s = op == "*" ? to_real(other, "scale") : 1.0 / to_real(other, "scale");
        auto r = std::make_shared<DenseMatrix>(m);
        for(double& v : r->data())
            v *= s;
        return RealMat{r};
    }
    if(a.is<SparseVal>() && op == "^" && is_int(b) && b.as<long long>() == -1)
        return InverseVal{a.as<SparseVal>().s};
    if(a.is<SparseVal>() && b.is<RealArr>() && op == "*")
        return make_array(a.as<SparseVal>().s->a.multiply(arr(b)));
    if(a.is<SparseVal>() && b.is<SparseVal>() && (op == "+" || op == "-"))
    {
        const SparseMatrix& x = a.as<SparseVal>().s->a;
        const SparseMatrix& y = b.as<SparseVal>().s->a;
        auto st = std::make_shared<SparseState>();
        st->a = op == "+" ? x + y : x + (-1.0) * y;
        return SparseVal{st};
    }
    if((a.is<SparseVal>() && is_number(b)) || (is_number(a) && b.is<SparseVal>()))
    {
        if(op != "*")
            bad_operands(op, a, b);
        auto st = std::make_shared<SparseState>();
        st->a = to_real(is_number(a) ? a : b, "scale") * (a.is<SparseVal>() ? a : b).as<SparseVal>().s->a;
        return SparseVal{st};
    }
    if(a.is<InverseVal>() && b.is<RealArr>() && op == "*")
    {
        SparseState& st = *a.as<InverseVal>().s;
        const auto& rhs = arr(b);
        if(static_cast<int>(rhs.size()) != st.a.rows())
            throw InvalidArgument("A^-1*b: matrix has " + std::to_string(st.a.rows()) + " rows, vector " +
                                  std::to_string(rhs.size()) + " entries");
        if(st.solver == "CG")
        {
            const CgResult r = solve_cg(st.a, rhs);
            if(!r.converged)
                throw SolverError("conjugate gradient did not converge");
            return make_array(r.x);
        }
        if(!st.lu)
            st.lu = std::make_shared<const LuFactorization>(st.a);
        return make_array(st.lu->solve(rhs));
    }
    bad_operands(op, a, b);
}

Value form_op(const std::string& op, const Value& a, const Value& b)
{
    if(op != "+" && op != "-")
        bad_operands(op, a, b);
    if(!a.is<FormVal>())
    {
        // 0 +/- form: start from an empty form
        if(!is_number(a) || to_real(a, "form") != 0.0)
            bad_operands(op, a, b);
        return form_op(op, FormVal{std::make_shared<const FormPiece>()}, b);
    }
    if(!b.is<FormVal>())
    {
        if(is_number(b) && to_real(b, "form") == 0.0)
            return a;
        bad_operands(op, a, b);
    }
    auto out = std::make_shared<FormPiece>(*a.as<FormVal>().p);
    const FormPiece& rhs = *b.as<FormVal>().p;
    if(out->mesh && rhs.mesh && out->mesh != rhs.mesh)
        throw InvalidArgument("all integrals of a form must use the same mesh");
    if(!out->mesh)
        out->mesh = rhs.mesh;
    const double s = op == "-" ? -1.0 : 1.0;
    for(BilinearTerm t : rhs.form.bilinear)
    {
        t.coef = field_scale(t.coef, s);
        out->form.bilinear.push_back(std::move(t));
    }
    for(LinearTerm t : rhs.form.linear)
    {
        t.coef = field_scale(t.coef, s);
        out->form.linear.push_back(std::move(t));
    }
    for(const auto& d : rhs.form.dirichlet)
        out->form.dirichlet.push_back(d);
    out->unknowns.insert(out->unknowns.end(), rhs.unknowns.begin(), rhs.unknowns.end());
    return FormVal{out};
}

Value dot_product(const Value& a, const Value& b)
{
    // a is the transposed left operand's inner value
    if(a.is<RealArr>() && b.is<RealArr>())
    {
        if(arr(a).size() != arr(b).size())
            throw InvalidArgument("dot product of arrays with different sizes");
        return dot(arr(a), arr(b));
    }
    if(a.is<TupleVal>() && b.is<TupleVal>())
    {
        const auto& x = *a.as<TupleVal>().items;
        const auto& y = *b.as<TupleVal>().items;
        if(x.size() != y.size() || x.empty())
            throw InvalidArgument("dot product of lists with different sizes");
        Value sum = binary_op("*", x[0], y[0]);
        for(std::size_t i = 1; i < x.size(); ++i)
            sum = binary_op("+", sum, binary_op("*", x[i], y[i]));
        return sum;
    }
    bad_operands("'*", a, b);
}

} // namespace

const char* type_name(const Value& v)
{
    static const char* names[] = {"nothing",     "int",        "real",          "complex",    "string",
                                  "real array",  "complex array", "real matrix", "complex matrix",
                                  "sparse matrix", "inverse matrix", "mesh",    "triangle",   "vertex",
                                  "fespace",     "finite element function", "function of x,y",
                                  "form expression", "list",   "transposed value", "variational form",
                                  "integral",    "function",   "border",        "border list", "problem",
                                  "varf",        "stream",     "builtin function"};
    return names[v.d.index()];
}

bool is_number(const Value& v) { return v.is<long long>() || v.is<double>() || v.is<Complex>(); }
bool is_pointwise(const Value& v) { return v.is<LazyVal>() || v.is<FeVal>(); }

double to_real(const Value& v, const char* what)
{
    if(v.is<double>())
        return v.as<double>();
    if(v.is<long long>())
        return static_cast<double>(v.as<long long>());
    throw InvalidArgument(std::string(what) + ": expected a real number, got " + type_name(v));
}

long long to_int(const Value& v, const char* what)
{
    if(v.is<long long>())
        return v.as<long long>();
    if(v.is<double>())
        return static_cast<long long>(v.as<double>());
    throw InvalidArgument(std::string(what) + ": expected an integer, got " + type_name(v));
}

Complex to_complex(const Value& v, const char* what)
{
    if(v.is<Complex>())
        return v.as<Complex>();
    return {to_real(v, what), 0.0};
}

bool truthy(const Value& v)
{
    if(v.is<Complex>())
        return v.as<Complex>() != Complex{};
    return to_real(v, "condition") != 0.0;
}

Value make_array(std::vector<double> v, bool integer)
{
    return RealArr{std::make_shared<std::vector<double>>(std::move(v)), integer};
}

namespace
{

int locate_on(const FeSpace& space, const EvalPoint& p, std::array<double, 3>& bary)
{
    if(p.mesh == &space.mesh() && p.triangle >= 0)
    {
        bary = p.bary;
        return p.triangle;
    }
    const auto loc = space.mesh().locate(p.x, p.y);
    if(!loc)
        throw OutOfDomain("point (" + format_real(p.x) + ", " + format_real(p.y) + ") is outside the mesh");
    bary = loc->bary;
    return loc->triangle;
}

} // namespace

double fe_value(const FeVal& u, const EvalPoint& p)
{
    std::array<double, 3> bary{};
    const int t = locate_on(*u.space, p, bary);
    const FeSpace& s = *u.space;
    double v = 0.0;
    for(int l = 0; l < s.dofs_per_triangle(); ++l)
        v += (*u.dofs)[s.dof(t, l)] * s.basis(l, bary);
    return v;
}

double fe_derivative(const FeVal& u, const EvalPoint& p, int dir)
{
    const FeSpace& s = *u.space;
    if(s.element() == Element::P0)
        return 0.0;
    std::array<double, 3> bary{};
    const int t = locate_on(s, p, bary);
    double v = 0.0;
    for(int l = 0; l < 3; ++l)
    {
        const Vec2 g = s.basis_gradient(t, l);
        v += (*u.dofs)[s.dof(t, l)] * (dir == 0 ? g.x : g.y);
    }
    return v;
}

Field to_field(const Value& v, const char* what)
{
    if(v.is<LazyVal>())
        return v.as<LazyVal>().f;
    if(v.is<FeVal>())
    {
        FeVal u = v.as<FeVal>();
        return Field(Field::Fn([u](const EvalPoint& p) { return fe_value(u, p); }));
    }
    if(v.is<Complex>())
        throw Unsupported(std::string(what) + ": complex values are not supported here");
    return Field(to_real(v, what));
}

Field field_product(const Field& a, const Field& b)
{
    if(a.is_constant() && b.is_constant())
        return Field(a.constant() * b.constant());
    if(a.is_constant())
        return field_scale(b, a.constant());
    if(b.is_constant())
        return field_scale(a, b.constant());
    return Field(Field::Fn([a, b](const EvalPoint& p) { return a(p) * b(p); }));
}

Field field_scale(const Field& a, double s)
{
    if(a.is_constant())
        return Field(a.constant() * s);
    if(s == 1.0)
        return a;
    return Field(Field::Fn([a, s](const EvalPoint& p) { return s * a(p); }));
}

Value binary_op(const std::string& op, const Value& a, const Value& b)
{
    if(a.is<StreamVal>() || b.is<StreamVal>())
        bad_operands(op, a, b);
    if(a.is<FormVal>() || b.is<FormVal>())
        return form_op(op, a, b);
    if(a.is<BorderChain>() || a.is<BorderVal>())
    {
        if(op != "+" || !b.is<BorderChain>() || !a.is<BorderChain>())
            bad_operands(op, a, b);
        BorderChain c = a.as<BorderChain>();
        const auto& more = b.as<BorderChain>().parts;
        c.parts.insert(c.parts.end(), more.begin(), more.end());
        return c;
    }
    if(a.is<TransposedVal>() && op == "*")
        return dot_product(*a.as<TransposedVal>().inner, b);
    if(a.is<RealArr>() && b.is<TransposedVal>() && op == "*" && b.as<TransposedVal>().inner->is<RealArr>())
        return RealMat{std::make_shared<DenseMatrix>(outer(arr(a), arr(*b.as<TransposedVal>().inner)))};
    if(a.is<std::string>() || b.is<std::string>())
    {
        if(op == "+")
            return to_display(a) + to_display(b);
        if(a.is<std::string>() && b.is<std::string>() && (op == "==" || op == "!="))
            return static_cast<long long>((a.as<std::string>() == b.as<std::string>()) == (op == "=="));
        bad_operands(op, a, b);
    }
    if(a.is<TupleVal>() || b.is<TupleVal>())
    {
        if(a.is<TupleVal>() && b.is<TupleVal>() && (op == "+" || op == "-"))
        {
            const auto& x = *a.as<TupleVal>().items;
            const auto& y = *b.as<TupleVal>().items;
            if(x.size() != y.size())
                throw InvalidArgument("lists of different lengths");
            std::vector<Value> r;
            for(std::size_t i = 0; i < x.size(); ++i)
                r.push_back(binary_op(op, x[i], y[i]));
            return tuple(std::move(r));
        }
        if(op == "*" || (op == "/" && a.is<TupleVal>()))
        {
            const bool left = a.is<TupleVal>();
            std::vector<Value> r;
            for(const Value& item : *(left ? a : b).as<TupleVal>().items)
                r.push_back(left ? binary_op(op, item, b) : binary_op(op, a, item));
            return tuple(std::move(r));
        }
        bad_operands(op, a, b);
    }
    if(a.is<SymVal>() || b.is<SymVal>())
        return sym_op(op, a, b);
    if(a.is<RealMat>() || b.is<RealMat>() || a.is<SparseVal>() || b.is<SparseVal>() || a.is<InverseVal>())
        return matrix_op(op, a, b);
    if(a.is<RealArr>() || b.is<RealArr>())
        return array_op(op, a, b);
    if((is_pointwise(a) || is_pointwise(b)) && (is_pointwise(a) || is_number(a)) &&
       (is_pointwise(b) || is_number(b)))
        return lazy_op(op, a, b);
    if(is_number(a) && is_number(b))
        return number_op(op, a, b);
    bad_operands(op, a, b);
}

Value unary_op(const std::string& op, const Value& a)
{
    if(op == "+")
        return a;
    if(op == "!")
    {
        if(is_pointwise(a))
        {
            const Field f = to_field(a, "operand");
            return LazyVal{Field(Field::Fn([f](const EvalPoint& p) { return f(p) == 0.0 ? 1.0 : 0.0; }))};
        }
        return static_cast<long long>(!truthy(a));
    }
    if(op != "-")
        throw InvalidArgument("unknown unary operator " + op);
    if(a.is<long long>())
        return -a.as<long long>();
    if(a.is<double>())
        return -a.as<double>();
    if(a.is<Complex>())
        return -a.as<Complex>();
    if(a.is<FormVal>())
        return form_op("-", Value(0LL), a);
    if(a.is<FormVal>() || a.is<SymVal>() || a.is<TupleVal>() || a.is<RealArr>() || a.is<RealMat>() ||
       a.is<SparseVal>() || is_pointwise(a))
        return binary_op("*", Value(-1.0), a);
    throw InvalidArgument(std::string("cannot negate a ") + type_name(a));
}

Value transpose_value(const Value& v)
{
    if(is_number(v) || is_pointwise(v) || v.is<SymVal>())
        return v;
    if(v.is<RealMat>())
        return RealMat{std::make_shared<DenseMatrix>(transpose(*v.as<RealMat>().m))};
    if(v.is<SparseVal>())
    {
        auto st = std::make_shared<SparseState>();
        st->a = v.as<SparseVal>().s->a.transposed();
        return SparseVal{st};
    }
    if(v.is<RealArr>() || v.is<TupleVal>())
        return TransposedVal{std::make_shared<const Value>(v)};
    if(v.is<TransposedVal>())
        return *v.as<TransposedVal>().inner;
    throw InvalidArgument(std::string("cannot transpose a ") + type_name(v));
}

std::vector<double> interpolate_value(const std::shared_ptr<const FeSpace>& space, const Value& v)
{
    if(v.is<FeVal>() && v.as<FeVal>().space == space)
        return *v.as<FeVal>().dofs;
    if(v.is<RealArr>())
    {
        const auto& a = arr(v);
        if(static_cast<int>(a.size()) != space->ndof())
            throw InvalidArgument("array of size " + std::to_string(a.size()) + " assigned to a space with " +
                                  std::to_string(space->ndof()) + " DOFs");
        return a;
    }
    return interpolate(space, to_field(v, "finite element value")).dofs();
}

bool is_math_function(const std::string& n)
{
    static const char* names[] = {"sin",  "cos",  "tan",   "asin", "acos",  "atan", "sinh", "cosh",
                                  "tanh", "asinh", "acosh", "atanh", "exp", "log",  "log10", "sqrt",
                                  "abs",  "floor", "ceil",  "round", "pow", "atan2", "min",  "max",
                                  "real", "imag", "conj",  "arg",  "norm"};
    for(const char* s : names)
        if(n == s)
            return true;
    return false;
}

namespace
{

double apply_real(const std::string& n, double a)
{
    if(n == "sin") return std::sin(a);
    if(n == "cos") return std::cos(a);
    if(n == "tan") return std::tan(a);
    if(n == "asin") return std::asin(a);
    if(n == "acos") return std::acos(a);
    if(n == "atan") return std::atan(a);
    if(n == "sinh") return std::sinh(a);
    if(n == "cosh") return std::cosh(a);
    if(n == "tanh") return std::tanh(a);
    if(n == "asinh") return std::asinh(a);
    if(n == "acosh") return std::acosh(a);
    if(n == "atanh") return std::atanh(a);
    if(n == "exp") return std::exp(a);
    if(n == "log") return std::log(a);
    if(n == "log10") return std::log10(a);
    if(n == "sqrt") return std::sqrt(a);
    if(n == "abs") return std::abs(a);
    if(n == "floor") return std::floor(a);
    if(n == "ceil") return std::ceil(a);
    if(n == "round") return std::round(a);
    if(n == "real") return a;
    if(n == "imag") return 0.0;
    if(n == "conj") return a;
    if(n == "arg") return a < 0 ? std::acos(-1.0) : 0.0;
    if(n == "norm") return a * a;
    throw InvalidArgument(n + " takes two arguments");
}

double apply_real2(const std::string& n, double a, double b)
{
    if(n == "pow") return std::pow(a, b);
    if(n == "atan2") return std::atan2(a, b);
    if(n == "min") return std::min(a, b);
    if(n == "max") return std::max(a, b);
    throw InvalidArgument(n + " takes one argument");
}

Value apply_complex(const std::string& n, Complex z)
{
    if(n == "sin") return std::sin(z);
    if(n == "cos") return std::cos(z);
    if(n == "exp") return std::exp(z);
    if(n == "log") return std::log(z);
    if(n == "sqrt") return std::sqrt(z);
    if(n == "abs") return std::abs(z);
    if(n == "real") return z.real();
    if(n == "imag") return z.imag();
    if(n == "conj") return std::conj(z);
    if(n == "arg") return std::arg(z);
    if(n == "norm") return std::norm(z);
    throw Unsupported(n + " of a complex value");
}

} // namespace

Value math_call(const std::string& name, const std::vector<Value>& args)
{
    if(args.size() == 1)
    {
        const Value& a = args[0];
        if(a.is<Complex>())
            return apply_complex(name, a.as<Complex>());
        if(is_pointwise(a))
        {
            const Field f = to_field(a, name.c_str());
            return LazyVal{Field(Field::Fn([f, name](const EvalPoint& p) { return apply_real(name, f(p)); }))};
        }
        if(a.is<RealArr>() && (name == "abs" || name == "sqrt" || name == "exp"))
        {
            std::vector<double> r = arr(a);
            for(double& v : r)
                v = apply_real(name, v);
            return make_array(std::move(r));
        }
        if(a.is<long long>() && name == "abs")
            return std::llabs(a.as<long long>());
        const double r = apply_real(name, to_real(a, name.c_str()));
        return r;
    }
    if(args.size() == 2)
    {
        if(is_pointwise(args[0]) || is_pointwise(args[1]))
        {
            const Field f = to_field(args[0], name.c_str());
            const Field g = to_field(args[1], name.c_str());
            return LazyVal{Field(Field::Fn([f, g, name](const EvalPoint& p) { return apply_real2(name, f(p), g(p)); }))};
        }
        if((name == "min" || name == "max") && args[0].is<long long>() && args[1].is<long long>())
            return name == "min" ? std::min(args[0].as<long long>(), args[1].as<long long>())
                                 : std::max(args[0].as<long long>(), args[1].as<long long>());
        return apply_real2(name, to_real(args[0], name.c_str()), to_real(args[1], name.c_str()));
    }
    throw InvalidArgument(name + ": wrong number of arguments");
}

std::string to_display(const Value& v)
{
    if(v.is<long long>())
        return std::to_string(v.as<long long>());
    if(v.is<double>())
        return format_real(v.as<double>());
    if(v.is<Complex>())
        return "(" + format_real(v.as<Complex>().real()) + "," + format_real(v.as<Complex>().imag()) + ")";
    if(v.is<std::string>())
        return v.as<std::string>();
    if(v.is<RealArr>())
    {
        const auto& a = arr(v);
        std::ostringstream out;
        out << a.size();
        for(std::size_t i = 0; i < a.size(); ++i)
            out << (i % 5 == 0 ? "\n\t" : "\t") << (v.as<RealArr>().integer ? std::to_string(static_cast<long long>(a[i])) : format_real(a[i]));
        out << '\n';
        return out.str();
    }
    if(v.is<CplxArr>())
    {
        const auto& a = *v.as<CplxArr>().v;
        std::ostringstream out;
        out << a.size();
        for(std::size_t i = 0; i < a.size(); ++i)
            out << (i % 5 == 0 ? "\n\t" : "\t") << to_display(Value(a[i]));
        out << '\n';
        return out.str();
    }
    if(v.is<RealMat>() || v.is<CplxMat>())
    {
        std::ostringstream out;
        const auto print = [&](const auto& m) {
            out << m.rows() << ' ' << m.cols() << '\n';
            for(int i = 0; i < m.rows(); ++i)
            {
                for(int j = 0; j < m.cols(); ++j)
                    out << '\t' << to_display(Value(m(i, j)));
                out << '\n';
            }
        };
        if(v.is<RealMat>())
            print(*v.as<RealMat>().m);
        else
            print(*v.as<CplxMat>().m);
        return out.str();
    }
    if(v.is<FeVal>())
        return to_display(Value(RealArr{v.as<FeVal>().dofs, false}));
    throw InvalidArgument(std::string("cannot print a ") + type_name(v));
}

} // namespace femscript::dsl
