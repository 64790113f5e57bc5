#include "femscript/dsl/interpreter.hpp"

#include "femscript/io.hpp"
#include "femscript/numfmt.hpp"
#include "value.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace femscript::dsl
{
namespace
{

struct BreakSignal
{};
struct ContinueSignal
{};
struct ReturnSignal
{
    Value value;
};
struct ExitSignal
{
    int code = 0;
};

constexpr int kTrialValue = 0;

Op op_of(int code)
{
    return code == 1 ? Op::Dx : code == 2 ? Op::Dy : Op::Value;
}

bool is_scalar_type(const std::string& base)
{
    return base == "int" || base == "real" || base == "complex" || base == "string" || base == "bool";
}

std::string solver_name(const std::string& s)
{
    if(s == "CG")
        return "CG";
    return "LU";
}

const std::set<std::string> kPlotOptions = {"cmm", "fill", "value", "dim", "wait", "ps", "nbiso", "bw", "grey"};

} // namespace

struct Interpreter::Impl
{
    RunOptions opt;
    std::ostream* out;
    std::istream* in;
    std::ostream* log;
    std::shared_ptr<Scope> global = std::make_shared<Scope>();
    std::shared_ptr<Scope> scope = global;
    std::vector<std::shared_ptr<const Program>> programs;

    explicit Impl(RunOptions o)
        : opt(std::move(o))
        , out(opt.out ? opt.out : &std::cout)
        , in(opt.in ? opt.in : &std::cin)
        , log(opt.log ? opt.log : &std::cerr)
    {
        define_root();
    }

    // --- environment ----------------------------------------------------

    void define_root()
    {
        auto& v = global->vars;
        v["x"] = {LazyVal{Field(Field::Fn([](const EvalPoint& p) { return p.x; }))}, {}};
        v["y"] = {LazyVal{Field(Field::Fn([](const EvalPoint& p) { return p.y; }))}, {}};
        v["label"] = {LazyVal{Field(Field::Fn([](const EvalPoint& p) { return static_cast<double>(p.label); }))},
                      {}};
        v["pi"] = {std::acos(-1.0), {}};
        v["true"] = {1LL, {}};
        v["false"] = {0LL, {}};
        v["endl"] = {std::string("\n"), {}};
        v["verbosity"] = {static_cast<long long>(opt.verbosity), {"int"}};
        auto cout_state = std::make_shared<StreamState>();
        cout_state->out = out;
        v["cout"] = {StreamVal{cout_state}, {}};
        auto cin_state = std::make_shared<StreamState>();
        cin_state->in = in;
        v["cin"] = {StreamVal{cin_state}, {}};
        for(const char* name : {"P0", "P1", "qf1pT", "qf1pTlump", "qf2pT", "qf5pT", "LU", "CG", "sparsesolver",
                                "UMFPACK", "GMRES", "Crout", "Cholesky"})
            v[name] = {std::string(name), {}};
    }

    int verbosity() const
    {
        const auto it = global->vars.find("verbosity");
        return it == global->vars.end() ? opt.verbosity : static_cast<int>(to_int(it->second.value, "verbosity"));
    }

    void note(int level, const std::string& msg) const
    {
        if(verbosity() >= level)
            *log << msg << '\n';
    }

    void warn(const std::string& msg, const SourcePos& pos) const
    {
        if(verbosity() > 0)
            *log << "warning: line " << pos.line << ": " << msg << '\n';
    }

    struct ScopeGuard
    {
        Impl& self;
        std::shared_ptr<Scope> saved;
        ScopeGuard(Impl& s, std::shared_ptr<Scope> parent) : self(s), saved(s.scope)
        {
            auto child = std::make_shared<Scope>();
            child->parent = std::move(parent);
            self.scope = child;
        }
        ~ScopeGuard() { self.scope = saved; }
    };

    Slot& slot(const std::string& name, const SourcePos& pos)
    {
        Slot* s = scope->find(name);
        if(!s)
            throw ScriptError("undeclared identifier '" + name + "'", pos.line);
        return *s;
    }

    std::filesystem::path resolve(const std::string& file) const
    {
        const std::filesystem::path p(file);
        return p.is_absolute() ? p : opt.base_dir / p;
    }

    // --- statements -----------------------------------------------------

    void exec_all(const std::vector<StmtPtr>& stmts)
    {
        for(const auto& s : stmts)
            exec(*s);
    }

    void exec(const Stmt& s)
    {
        try
        {
            exec_inner(s);
        }
        catch(const ScriptError&)
        {
            throw;
        }
        catch(const Error& e)
        {
            throw ScriptError(e.what(), s.pos.line);
        }
        catch(const std::bad_variant_access&)
        {
            throw ScriptError("type mismatch", s.pos.line);
        }
        catch(const std::bad_alloc&)
        {
            throw;
        }
        catch(const std::exception& e)
        {
            if(dynamic_cast<const std::logic_error*>(&e) || dynamic_cast<const std::runtime_error*>(&e))
                throw ScriptError(e.what(), s.pos.line);
            throw;
        }
    }

    void exec_inner(const Stmt& s)
    {
        switch(s.kind)
        {
        case StmtKind::Expr:
            exec_expression(*s.expr);
            break;
        case StmtKind::Decl:
            for(const auto& d : s.decls)
                declare(s.type, d);
            break;
        case StmtKind::Fespace:
            define_space(s);
            break;
        case StmtKind::Func:
            for(const auto& d : s.decls)
                bind(d.name, FuncVal{nullptr, d.init, scope}, d.pos);
            break;
        case StmtKind::FuncDef:
            bind(s.name, FuncVal{&s, nullptr, scope}, s.pos);
            break;
        case StmtKind::Border:
        {
            auto b = std::make_shared<BorderDef>();
            b->def = &s;
            b->env = scope;
            b->t0 = to_real(eval(*s.args[0].value), "border start");
            b->t1 = to_real(eval(*s.args[1].value), "border end");
            bind(s.name, BorderVal{b}, s.pos);
            break;
        }
        case StmtKind::Varf:
            bind(s.name, VarfVal{&s, scope}, s.pos);
            break;
        case StmtKind::Problem:
        case StmtKind::Solve:
        {
            auto st = std::make_shared<ProblemState>();
            st->def = &s;
            st->env = scope;
            bind(s.name, ProblemVal{st}, s.pos);
            if(s.kind == StmtKind::Solve)
                invoke(*st);
            break;
        }
        case StmtKind::If:
            if(truthy(eval(*s.expr)))
                exec(*s.body[0]);
            else if(s.body.size() > 1)
                exec(*s.body[1]);
            break;
        case StmtKind::For:
        {
            ScopeGuard guard(*this, scope);
            exec(*s.init);
            while(truthy(eval(*s.expr)))
            {
                try
                {
                    exec(*s.body[0]);
                }
                catch(const BreakSignal&)
                {
                    break;
                }
                catch(const ContinueSignal&)
                {}
                eval(*s.step);
            }
            break;
        }
        case StmtKind::While:
            while(truthy(eval(*s.expr)))
            {
                try
                {
                    exec(*s.body[0]);
                }
                catch(const BreakSignal&)
                {
                    break;
                }
                catch(const ContinueSignal&)
                {}
            }
            break;
        case StmtKind::Break:
            throw BreakSignal{};
        case StmtKind::Continue:
            throw ContinueSignal{};
        case StmtKind::Return:
            throw ReturnSignal{s.expr ? eval(*s.expr) : Value{}};
        case StmtKind::Block:
        {
            ScopeGuard guard(*this, scope);
            exec_all(s.body);
            break;
        }
        case StmtKind::Load:
            warn("load \"" + s.name + "\" ignored: plugins are not available", s.pos);
            break;
        case StmtKind::Macro:
        case StmtKind::Empty:
            break;
        }
    }

    void exec_expression(const Expr& e)
    {
        if(e.kind == ExprKind::Ident)
        {
            Slot& s = slot(e.text, e.pos);
            if(s.value.is<ProblemVal>())
            {
                invoke(*s.value.as<ProblemVal>().p);
                return;
            }
        }
        eval(e);
    }

    void bind(const std::string& name, Value v, const SourcePos& pos, TypeSpec type = {})
    {
        auto it = scope->vars.find(name);
        if(it != scope->vars.end())
        {
            const bool stream = it->second.type.base == "ofstream" || it->second.type.base == "ifstream";
            if(!stream)
                throw ScriptError("'" + name + "' is already declared in this scope", pos.line);
            scope->vars.erase(it); // closes the previous file
        }
        scope->vars[name] = Slot{std::move(v), std::move(type)};
    }

    void define_space(const Stmt& s)
    {
        std::vector<Value> pos;
        for(const Arg& a : s.args)
        {
            if(!a.name.empty())
                warn("fespace option '" + a.name + "' ignored", s.pos);
            else
                pos.push_back(eval(*a.value));
        }
        if(pos.size() != 2 || !pos[0].is<MeshVal>() || !pos[1].is<std::string>())
            throw InvalidArgument("fespace " + s.name + " expects (mesh, element)");
        const auto& mesh = pos[0].as<MeshVal>().m;
        if(!mesh)
            throw InvalidArgument("fespace " + s.name + " built on an empty mesh");
        bind(s.name, SpaceVal{std::make_shared<const FeSpace>(mesh, element_from_name(pos[1].as<std::string>()))},
             s.pos);
    }

    void declare(const TypeSpec& type, const Declarator& d)
    {
        std::vector<Value> ctor;
        for(const Arg& a : d.ctor)
            ctor.push_back(eval(*a.value));
        const auto ctor_int = [&](std::size_t i) { return to_int(ctor.at(i), "size"); };

        Value v;
        Slot* space_slot = scope->find(type.base);
        if(space_slot && space_slot->value.is<SpaceVal>() && !is_scalar_type(type.base))
        {
            if(type.complex)
                throw Unsupported("complex finite element functions are not supported");
            const auto& sp = space_slot->value.as<SpaceVal>().s;
            v = FeVal{sp, std::make_shared<std::vector<double>>(static_cast<std::size_t>(sp->ndof()), 0.0)};
        }
        else if(type.dims == 1)
        {
            const std::size_t n = ctor.empty() ? 0 : static_cast<std::size_t>(ctor_int(0));
            if(type.base == "complex")
                v = CplxArr{std::make_shared<std::vector<Complex>>(n)};
            else
                v = RealArr{std::make_shared<std::vector<double>>(n, 0.0), type.base == "int"};
        }
        else if(type.dims == 2)
        {
            const int m = ctor.size() > 0 ? static_cast<int>(ctor_int(0)) : 0;
            const int n = ctor.size() > 1 ? static_cast<int>(ctor_int(1)) : 0;
            if(type.base == "complex")
                v = CplxMat{std::make_shared<ComplexMatrix>(m, n)};
            else
                v = RealMat{std::make_shared<DenseMatrix>(m, n)};
        }
        else if(type.base == "int" || type.base == "bool")
            v = 0LL;
        else if(type.base == "real")
            v = 0.0;
        else if(type.base == "complex")
            v = Complex{};
        else if(type.base == "string")
            v = std::string();
        else if(type.base == "mesh")
        {
            std::shared_ptr<const Mesh> m;
            if(!ctor.empty())
            {
                if(!ctor[0].is<std::string>())
                    throw InvalidArgument("mesh constructor expects a file name");
                m = std::make_shared<const Mesh>(load_msh(resolve(ctor[0].as<std::string>())));
            }
            v = MeshVal{m};
        }
        else if(type.base == "matrix")
            v = SparseVal{std::make_shared<SparseState>()};
        else if(type.base == "ofstream" || type.base == "ifstream")
        {
            if(ctor.empty() || !ctor[0].is<std::string>())
                throw InvalidArgument(type.base + " expects a file name");
            const bool write = type.base == "ofstream";
            auto st = std::make_shared<StreamState>();
            st->path = ctor[0].as<std::string>();
            // drop an earlier stream of the same name first so its data is flushed
            auto it = scope->vars.find(d.name);
            if(it != scope->vars.end() && (it->second.type.base == "ofstream" || it->second.type.base == "ifstream"))
                scope->vars.erase(it);
            const auto mode = write ? std::ios::out | std::ios::trunc : std::ios::in;
            st->file = std::make_unique<std::fstream>(resolve(st->path), mode);
            if(!*st->file)
                throw IoError("cannot open " + st->path + (write ? " for writing" : ""));
            if(write)
                st->out = st->file.get();
            else
                st->in = st->file.get();
            v = StreamVal{st};
        }
        else if(type.base == "mesh3")
            throw Unsupported("3D meshes are not supported");
        else
            throw InvalidArgument("unknown type '" + type.base + "'");

        bind(d.name, std::move(v), d.pos, type);
        if(d.init)
        {
            Value init = eval(*d.init);
            assign_slot(scope->vars[d.name], std::move(init));
        }
    }

    void assign_slot(Slot& s, Value v)
    {
        const TypeSpec& t = s.type;
        if(t.empty())
        {
            s.value = std::move(v);
            return;
        }
        if(s.value.is<FeVal>())
        {
            const FeVal& u = s.value.as<FeVal>();
            if(v.is<SymVal>() || v.is<FormVal>())
                throw InvalidArgument("a form expression cannot be stored in a finite element function");
            std::vector<double> dofs = interpolate_value(u.space, v);
            *u.dofs = std::move(dofs);
            return;
        }
        if(t.dims == 1)
        {
            if(s.value.is<RealArr>())
            {
                auto& dst = *s.value.as<RealArr>().v;
                if(v.is<RealArr>())
                    dst = *v.as<RealArr>().v;
                else if(v.is<FeVal>())
                    dst = *v.as<FeVal>().dofs;
                else if(is_number(v))
                    std::fill(dst.begin(), dst.end(), to_real(v, "array value"));
                else
                    throw InvalidArgument(std::string("cannot assign a ") + type_name(v) + " to a real array");
                if(s.value.as<RealArr>().integer)
                    for(double& x : dst)
                        x = std::trunc(x);
            }
            else
            {
                auto& dst = *s.value.as<CplxArr>().v;
                if(v.is<CplxArr>())
                    dst = *v.as<CplxArr>().v;
                else if(v.is<RealArr>())
                    dst.assign(v.as<RealArr>().v->begin(), v.as<RealArr>().v->end());
                else if(is_number(v))
                    std::fill(dst.begin(), dst.end(), to_complex(v, "array value"));
                else
                    throw InvalidArgument(std::string("cannot assign a ") + type_name(v) + " to a complex array");
            }
            return;
        }
        if(t.dims == 2 || t.base == "matrix")
        {
            if(v.is<RealMat>())
                s.value = RealMat{std::make_shared<DenseMatrix>(*v.as<RealMat>().m)};
            else if(v.is<CplxMat>())
                s.value = CplxMat{std::make_shared<ComplexMatrix>(*v.as<CplxMat>().m)};
            else if(v.is<SparseVal>() && t.dims == 0)
                s.value = SparseVal{std::make_shared<SparseState>(*v.as<SparseVal>().s)};
            else if(v.is<RealArr>() && t.complex)
                throw InvalidArgument("cannot assign an array to a matrix");
            else
                throw InvalidArgument(std::string("cannot assign a ") + type_name(v) + " to a matrix");
            return;
        }
        if(t.base == "int" || t.base == "bool")
            s.value = t.base == "bool" ? static_cast<long long>(truthy(v)) : to_int(v, "int value");
        else if(t.base == "real")
            s.value = to_real(v, "real value");
        else if(t.base == "complex")
            s.value = to_complex(v, "complex value");
        else if(t.base == "string")
            s.value = to_display(v);
        else if(t.base == "mesh")
        {
            if(!v.is<MeshVal>())
                throw InvalidArgument(std::string("cannot assign a ") + type_name(v) + " to a mesh");
            s.value = std::move(v);
        }
        else
            throw InvalidArgument("cannot assign to a " + t.base);
    }

    // --- expressions ----------------------------------------------------

    Value eval(const Expr& e)
    {
        switch(e.kind)
        {
        case ExprKind::Int:
            return std::stoll(e.text);
        case ExprKind::Real:
            return std::stod(e.text);
        case ExprKind::Imaginary:
            return Complex(0.0, std::stod(e.text));
        case ExprKind::String:
            return e.text;
        case ExprKind::Ident:
            return lookup(e);
        case ExprKind::Unary:
            if(e.text == "++" || e.text == "--")
            {
                const Value next = binary_op(e.text == "++" ? "+" : "-", eval(*e.kids[0]), 1LL);
                store(*e.kids[0], next);
                return eval(*e.kids[0]);
            }
            return unary_op(e.text, eval(*e.kids[0]));
        case ExprKind::Binary:
            return eval_binary(e);
        case ExprKind::Assign:
        {
            Value rhs = eval(*e.kids[1]);
            if(e.text != "=")
                rhs = binary_op(e.text.substr(0, 1), eval(*e.kids[0]), rhs);
            store(*e.kids[0], rhs);
            return rhs;
        }
        case ExprKind::PostIncr:
        {
            Value old = eval(*e.kids[0]);
            store(*e.kids[0], binary_op(e.text == "++" ? "+" : "-", old, 1LL));
            return old;
        }
        case ExprKind::Transpose:
            return transpose_value(eval(*e.kids[0]));
        case ExprKind::Call:
            return call(e);
        case ExprKind::Index:
            return index(e);
        case ExprKind::Member:
            return member(eval(*e.kids[0]), e.text);
        case ExprKind::Array:
            return array_literal(e);
        case ExprKind::Range:
        {
            std::vector<Value> k;
            for(const auto& kid : e.kids)
                k.push_back(eval(*kid));
            const Value& a = k.front();
            const Value& b = k.back();
            const Value step = k.size() == 3 ? k[1] : Value(1LL);
            const bool integer = a.is<long long>() && b.is<long long>() && step.is<long long>();
            const double lo = to_real(a, "range"), hi = to_real(b, "range"), st = to_real(step, "range step");
            if(st == 0.0)
                throw InvalidArgument("range step is zero");
            std::vector<double> r;
            for(long long i = 0;; ++i)
            {
                const double v = lo + static_cast<double>(i) * st;
                if((st > 0 && v > hi + 1e-12 * std::abs(st)) || (st < 0 && v < hi - 1e-12 * std::abs(st)))
                    break;
                r.push_back(v);
            }
            return make_array(std::move(r), integer);
        }
        case ExprKind::Conditional:
            return truthy(eval(*e.kids[0])) ? eval(*e.kids[1]) : eval(*e.kids[2]);
        }
        throw InvalidArgument("unknown expression");
    }

    Value lookup(const Expr& e)
    {
        Slot* s = scope->find(e.text);
        if(!s)
        {
            if(is_builtin(e.text))
                return BuiltinVal{e.text};
            throw ScriptError("undeclared identifier '" + e.text + "'", e.pos.line);
        }
        if(s->value.is<FuncVal>() && !s->value.as<FuncVal>().def)
        {
            const FuncVal f = s->value.as<FuncVal>();
            ScopeGuard guard(*this, f.env);
            return eval(*f.body);
        }
        return s->value;
    }

    Value eval_binary(const Expr& e)
    {
        const std::string& op = e.text;
        if(op == "&&" || op == "||")
        {
            const Value a = eval(*e.kids[0]);
            if(is_number(a))
            {
                const bool l = truthy(a);
                if(op == "&&" && !l)
                    return 0LL;
                if(op == "||" && l)
                    return 1LL;
                const Value b = eval(*e.kids[1]);
                if(is_number(b))
                    return static_cast<long long>(truthy(b));
                return binary_op(op, a, b);
            }
            return binary_op(op, a, eval(*e.kids[1]));
        }
        Value a = eval(*e.kids[0]);
        if(op == "<<" || op == ">>")
        {
            if(!a.is<StreamVal>())
                throw InvalidArgument("operator " + op + " needs a stream on its left");
            StreamState& st = *a.as<StreamVal>().s;
            if(op == "<<")
            {
                if(!st.out)
                    throw IoError("stream " + st.path + " is not open for writing");
                const Value b = eval(*e.kids[1]);
                *st.out << to_display(b);
                if(!*st.out)
                    throw IoError("write to " + (st.path.empty() ? std::string("cout") : st.path) + " failed");
            }
            else
            {
                if(!st.in)
                    throw IoError("stream " + st.path + " is not open for reading");
                read_into(*st.in, *e.kids[1]);
            }
            return a;
        }
        return binary_op(op, a, eval(*e.kids[1]));
    }

    void read_into(std::istream& is, const Expr& target)
    {
        const Value cur = eval(target);
        if(cur.is<RealArr>() || cur.is<FeVal>())
        {
            auto& dst = cur.is<RealArr>() ? *cur.as<RealArr>().v : *cur.as<FeVal>().dofs;
            long long n = 0;
            if(!(is >> n) || n < 0)
                throw IoError("expected an array size in the input");
            if(static_cast<std::size_t>(n) != dst.size())
            {
                if(!dst.empty() || cur.is<FeVal>())
                    throw InvalidArgument("input holds " + std::to_string(n) + " values, array has " +
                                          std::to_string(dst.size()));
                dst.resize(static_cast<std::size_t>(n));
            }
            for(double& v : dst)
            {
                std::string word;
                if(!(is >> word))
                    throw IoError("input ended before all array values were read");
                v = parse_real(word);
            }
            return;
        }
        std::string word;
        if(!(is >> word))
            throw IoError("end of input");
        if(cur.is<std::string>())
            store(target, word);
        else if(cur.is<long long>())
            store(target, static_cast<long long>(std::stoll(word)));
        else
            store(target, parse_real(word));
    }

    static double parse_real(const std::string& w)
    {
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(w, &used);
        }
        catch(const std::exception&)
        {
            used = 0;
        }
        if(used != w.size())
            throw IoError("'" + w + "' is not a number");
        return v;
    }

    /// Assigns to an lvalue: name, a[i], a(i), A(i,j), u[] or u[][i].
    void store(const Expr& target, const Value& v)
    {
        if(target.kind == ExprKind::Ident)
        {
            Slot& s = slot(target.text, target.pos);
            if(s.value.is<FuncVal>() || s.value.is<ProblemVal>() || s.value.is<VarfVal>() || s.value.is<SpaceVal>())
                throw InvalidArgument("'" + target.text + "' cannot be assigned");
            if(&s == &global->vars["verbosity"])
            {
                assign_slot(s, v);
                opt.verbosity = static_cast<int>(s.value.as<long long>());
                return;
            }
            assign_slot(s, v);
            return;
        }
        if(target.kind == ExprKind::Index && target.kids.size() == 1)
        {
            const Value base = eval(*target.kids[0]);
            if(base.is<FeVal>())
            {
                const FeVal& u = base.as<FeVal>();
                if(!v.is<RealArr>())
                    throw InvalidArgument(std::string("u[] expects an array, got ") + type_name(v));
                const auto& src = *v.as<RealArr>().v;
                if(src.size() != u.dofs->size())
                    throw InvalidArgument("array of size " + std::to_string(src.size()) + " assigned to " +
                                          std::to_string(u.dofs->size()) + " DOFs");
                *u.dofs = src;
                return;
            }
            if(base.is<RealArr>())
            {
                store(*target.kids[0], v);
                return;
            }
            throw InvalidArgument(std::string("[] is not defined for a ") + type_name(base));
        }
        if(target.kind == ExprKind::Index || target.kind == ExprKind::Call)
        {
            const Value base = eval(*target.kids[0]);
            std::vector<long long> idx;
            if(target.kind == ExprKind::Index)
                idx.push_back(to_int(eval(*target.kids[1]), "index"));
            else
                for(const Arg& a : target.args)
                    idx.push_back(to_int(eval(*a.value), "index"));
            if(base.is<RealArr>() && idx.size() == 1)
            {
                auto& a = *base.as<RealArr>().v;
                check_index(idx[0], a.size());
                a[idx[0]] = base.as<RealArr>().integer ? std::trunc(to_real(v, "array value"))
                                                       : to_real(v, "array value");
                return;
            }
            if(base.is<CplxArr>() && idx.size() == 1)
            {
                auto& a = *base.as<CplxArr>().v;
                check_index(idx[0], a.size());
                a[idx[0]] = to_complex(v, "array value");
                return;
            }
            if(base.is<RealMat>() && idx.size() == 2)
            {
                auto& m = *base.as<RealMat>().m;
                check_index(idx[0], m.rows());
                check_index(idx[1], m.cols());
                m(static_cast<int>(idx[0]), static_cast<int>(idx[1])) = to_real(v, "matrix value");
                return;
            }
            if(base.is<CplxMat>() && idx.size() == 2)
            {
                auto& m = *base.as<CplxMat>().m;
                check_index(idx[0], m.rows());
                check_index(idx[1], m.cols());
                m(static_cast<int>(idx[0]), static_cast<int>(idx[1])) = to_complex(v, "matrix value");
                return;
            }
            throw InvalidArgument(std::string("cannot assign into a ") + type_name(base));
        }
        throw InvalidArgument("left side of an assignment is not assignable");
    }

    static void check_index(long long i, std::size_t n)
    {
        if(i < 0 || static_cast<std::size_t>(i) >= n)
            throw InvalidArgument("index " + std::to_string(i) + " out of range [0, " + std::to_string(n) + ")");
    }

    Value index(const Expr& e)
    {
        const Value base = eval(*e.kids[0]);
        if(e.kids.size() == 1)
        {
            if(base.is<FeVal>())
                return RealArr{base.as<FeVal>().dofs, false};
            if(base.is<RealArr>() || base.is<CplxArr>())
                return base;
            throw InvalidArgument(std::string("[] is not defined for a ") + type_name(base));
        }
        const long long i = to_int(eval(*e.kids[1]), "index");
        return element(base, {i});
    }

    Value element(const Value& base, const std::vector<long long>& idx)
    {
        if(base.is<RealArr>() && idx.size() == 1)
        {
            const auto& a = *base.as<RealArr>().v;
            check_index(idx[0], a.size());
            if(base.as<RealArr>().integer)
                return static_cast<long long>(a[idx[0]]);
            return a[idx[0]];
        }
        if(base.is<CplxArr>() && idx.size() == 1)
        {
            const auto& a = *base.as<CplxArr>().v;
            check_index(idx[0], a.size());
            return a[idx[0]];
        }
        if(base.is<RealMat>() && idx.size() == 2)
        {
            const auto& m = *base.as<RealMat>().m;
            check_index(idx[0], m.rows());
            check_index(idx[1], m.cols());
            return m(static_cast<int>(idx[0]), static_cast<int>(idx[1]));
        }
        if(base.is<CplxMat>() && idx.size() == 2)
        {
            const auto& m = *base.as<CplxMat>().m;
            check_index(idx[0], m.rows());
            check_index(idx[1], m.cols());
            return m(static_cast<int>(idx[0]), static_cast<int>(idx[1]));
        }
        if(base.is<SparseVal>() && idx.size() == 2)
        {
            const SparseMatrix& a = base.as<SparseVal>().s->a;
            check_index(idx[0], a.rows());
            check_index(idx[1], a.cols());
            return a.at(static_cast<int>(idx[0]), static_cast<int>(idx[1]));
        }
        if(base.is<MeshVal>() && idx.size() == 1)
        {
            const auto& m = base.as<MeshVal>().m;
            if(!m)
                throw InvalidArgument("indexing an empty mesh");
            check_index(idx[0], m->nt());
            return TriangleRef{m, static_cast<int>(idx[0])};
        }
        if(base.is<TriangleRef>() && idx.size() == 1)
        {
            const TriangleRef& t = base.as<TriangleRef>();
            check_index(idx[0], 3);
            return VertexRef{t.m, t.m->triangles()[t.t].v[idx[0]]};
        }
        if(base.is<TupleVal>() && idx.size() == 1)
        {
            const auto& items = *base.as<TupleVal>().items;
            check_index(idx[0], items.size());
            return items[idx[0]];
        }
        throw InvalidArgument(std::string("cannot index a ") + type_name(base));
    }

    Value member(const Value& v, const std::string& name)
    {
        if(v.is<MeshVal>() && v.as<MeshVal>().m)
        {
            const Mesh& m = *v.as<MeshVal>().m;
            if(name == "nt") return static_cast<long long>(m.nt());
            if(name == "nv") return static_cast<long long>(m.nv());
            if(name == "nbe") return static_cast<long long>(m.nbe());
            if(name == "area" || name == "measure") return m.total_area();
        }
        if(v.is<SpaceVal>())
        {
            const FeSpace& s = *v.as<SpaceVal>().s;
            if(name == "ndof") return static_cast<long long>(s.ndof());
            if(name == "nt") return static_cast<long long>(s.mesh().nt());
        }
        if(v.is<VertexRef>())
        {
            const VertexRef& r = v.as<VertexRef>();
            const Vertex& p = r.m->vertices()[r.v];
            if(name == "x") return p.x;
            if(name == "y") return p.y;
            if(name == "label") return static_cast<long long>(p.label);
        }
        if(v.is<TriangleRef>())
        {
            const TriangleRef& r = v.as<TriangleRef>();
            if(name == "area") return r.m->area(r.t);
            if(name == "region" || name == "label") return static_cast<long long>(r.m->triangles()[r.t].region);
        }
        if(v.is<RealArr>())
        {
            const auto& a = *v.as<RealArr>().v;
            if(name == "n") return static_cast<long long>(a.size());
            if(a.empty() && name != "sum")
                throw InvalidArgument("." + name + " of an empty array");
            if(name == "max") return *std::max_element(a.begin(), a.end());
            if(name == "min") return *std::min_element(a.begin(), a.end());
            double acc = 0.0;
            if(name == "sum")
            {
                for(double x : a)
                    acc += x;
                return acc;
            }
            if(name == "l1" || name == "l2" || name == "linfty")
            {
                for(double x : a)
                    acc = name == "l1" ? acc + std::abs(x) : name == "l2" ? acc + x * x : std::max(acc, std::abs(x));
                return name == "l2" ? std::sqrt(acc) : acc;
            }
        }
        if(v.is<CplxArr>() && name == "n")
            return static_cast<long long>(v.as<CplxArr>().v->size());
        if(v.is<RealMat>())
        {
            if(name == "n") return static_cast<long long>(v.as<RealMat>().m->rows());
            if(name == "m") return static_cast<long long>(v.as<RealMat>().m->cols());
        }
        if(v.is<SparseVal>())
        {
            const SparseMatrix& a = v.as<SparseVal>().s->a;
            if(name == "n") return static_cast<long long>(a.rows());
            if(name == "m") return static_cast<long long>(a.cols());
            if(name == "nnz" || name == "nbcoef") return static_cast<long long>(a.nnz());
        }
        if(v.is<Complex>())
        {
            if(name == "re") return v.as<Complex>().real();
            if(name == "im") return v.as<Complex>().imag();
        }
        throw InvalidArgument(std::string("a ") + type_name(v) + " has no member '" + name + "'");
    }

    Value array_literal(const Expr& e)
    {
        std::vector<Value> items;
        for(const auto& k : e.kids)
            items.push_back(eval(*k));
        bool numbers = true, any_complex = false, all_int = true, rows = !items.empty(), any_crow = false;
        for(const Value& v : items)
        {
            numbers = numbers && is_number(v);
            any_complex = any_complex || v.is<Complex>();
            all_int = all_int && v.is<long long>();
            rows = rows && (v.is<RealArr>() || v.is<CplxArr>());
            any_crow = any_crow || v.is<CplxArr>();
        }
        if(numbers && !any_complex)
        {
            std::vector<double> r;
            for(const Value& v : items)
                r.push_back(to_real(v, "array element"));
            return make_array(std::move(r), all_int && !items.empty());
        }
        if(numbers)
        {
            auto r = std::make_shared<std::vector<Complex>>();
            for(const Value& v : items)
                r->push_back(to_complex(v, "array element"));
            return CplxArr{r};
        }
        if(rows)
        {
            const std::size_t cols =
                items[0].is<RealArr>() ? items[0].as<RealArr>().v->size() : items[0].as<CplxArr>().v->size();
            const int m = static_cast<int>(items.size()), n = static_cast<int>(cols);
            if(any_crow)
            {
                auto mat = std::make_shared<ComplexMatrix>(m, n);
                for(int i = 0; i < m; ++i)
                {
                    const Value& row = items[i];
                    const std::size_t len = row.is<RealArr>() ? row.as<RealArr>().v->size() : row.as<CplxArr>().v->size();
                    if(len != cols)
                        throw InvalidArgument("matrix rows have different lengths");
                    for(int j = 0; j < n; ++j)
                        (*mat)(i, j) = row.is<RealArr>() ? Complex((*row.as<RealArr>().v)[j], 0.0)
                                                         : (*row.as<CplxArr>().v)[j];
                }
                return CplxMat{mat};
            }
            auto mat = std::make_shared<DenseMatrix>(m, n);
            for(int i = 0; i < m; ++i)
            {
                const auto& row = *items[i].as<RealArr>().v;
                if(row.size() != cols)
                    throw InvalidArgument("matrix rows have different lengths");
                for(int j = 0; j < n; ++j)
                    (*mat)(i, j) = row[j];
            }
            return RealMat{mat};
        }
        return TupleVal{std::make_shared<const std::vector<Value>>(std::move(items))};
    }

    // --- calls ----------------------------------------------------------

    static bool is_builtin(const std::string& n)
    {
        static const std::set<std::string> names = {
            "int2d", "int1d", "on", "dx", "dy", "square", "buildmesh", "movemesh", "savemesh", "trace", "det",
            "set", "plot", "exec", "exit", "clock", "savesol", "medit", "savevtk", "adaptmesh", "buildlayers",
            "int3d", "dz", "readmesh", "isoline", "convect"};
        return names.count(n) || is_math_function(n);
    }

    struct Args
    {
        std::vector<Value> pos;
        std::vector<std::pair<std::string, ExprPtr>> named;
    };

    Args positional(const std::vector<Arg>& args)
    {
        Args r;
        for(const Arg& a : args)
        {
            if(a.name.empty())
                r.pos.push_back(eval(*a.value));
            else
                r.named.emplace_back(a.name, a.value);
        }
        return r;
    }

    Value call(const Expr& e)
    {
        const Expr& callee = *e.kids[0];
        if(callee.kind == ExprKind::Ident && !scope->find(callee.text) && is_builtin(callee.text))
            return builtin(callee.text, e);
        const Value f = eval(callee);
        if(f.is<BuiltinVal>())
            return builtin(f.as<BuiltinVal>().name, e);
        Args a = positional(e.args);
        if(!a.named.empty() && !f.is<VarfVal>())
            warn("named arguments ignored in this call", e.pos);
        return apply(f, a, e);
    }

    Value apply(const Value& f, Args& a, const Expr& e)
    {
        if(f.is<FuncVal>())
            return call_function(f.as<FuncVal>(), a.pos, e);
        if(f.is<IntegralVal>())
        {
            if(a.pos.size() != 1)
                throw InvalidArgument("an integral takes one integrand");
            return integrate(f.as<IntegralVal>(), a.pos[0]);
        }
        if(f.is<VarfVal>())
            return call_varf(f.as<VarfVal>(), a.pos);
        if(f.is<BorderVal>())
        {
            if(a.pos.size() != 1)
                throw InvalidArgument("a border takes its number of points");
            BorderChain c;
            c.parts.emplace_back(f.as<BorderVal>().b, static_cast<int>(to_int(a.pos[0], "border points")));
            return c;
        }
        if(f.is<SpaceVal>())
        {
            if(a.pos.size() != 2)
                throw InvalidArgument("Vh(t, j) takes a triangle and a local index");
            const FeSpace& s = *f.as<SpaceVal>().s;
            const long long t = to_int(a.pos[0], "triangle"), j = to_int(a.pos[1], "local index");
            check_index(t, s.mesh().nt());
            check_index(j, s.dofs_per_triangle());
            return static_cast<long long>(s.dof(static_cast<int>(t), static_cast<int>(j)));
        }
        if(is_pointwise(f) || is_number(f))
        {
            if(a.pos.size() != 2)
                throw InvalidArgument("point evaluation takes (x, y)");
            EvalPoint p;
            p.x = to_real(a.pos[0], "x");
            p.y = to_real(a.pos[1], "y");
            if(is_number(f))
                return f;
            if(f.is<FeVal>())
                return fe_value(f.as<FeVal>(), p);
            return f.as<LazyVal>().f(p);
        }
        std::vector<long long> idx;
        for(const Value& v : a.pos)
            idx.push_back(to_int(v, "index"));
        return element(f, idx);
    }

    Value call_function(const FuncVal& f, std::vector<Value>& args, const Expr& e)
    {
        if(!f.def)
        {
            Value body;
            {
                ScopeGuard guard(*this, f.env);
                body = eval(*f.body);
            }
            Args a{args, {}};
            return apply(body, a, e);
        }
        const Stmt& def = *f.def;
        if(args.size() != def.params.size())
            throw InvalidArgument(def.name + " expects " + std::to_string(def.params.size()) + " arguments, got " +
                                  std::to_string(args.size()));
        Value result;
        {
            ScopeGuard guard(*this, f.env);
            for(std::size_t i = 0; i < args.size(); ++i)
            {
                const Param& p = def.params[i];
                if(p.type.dims > 0 || !is_scalar_type(p.type.base))
                {
                    // arrays and FE functions are passed by reference
                    if(p.type.dims > 0 && !(args[i].is<RealArr>() || args[i].is<CplxArr>() ||
                                            args[i].is<RealMat>() || args[i].is<CplxMat>()))
                        throw InvalidArgument("argument " + p.name + " of " + def.name + " must be an array");
                    scope->vars[p.name] = Slot{args[i], p.type};
                }
                else
                {
                    scope->vars[p.name] = Slot{Value{}, p.type};
                    assign_slot(scope->vars[p.name], args[i]);
                }
            }
            try
            {
                exec_all(def.body);
            }
            catch(ReturnSignal& r)
            {
                result = std::move(r.value);
            }
        }
        if(is_number(result))
        {
            if(def.type.base == "int" && def.type.dims == 0)
                return to_int(result, "return value");
            if(def.type.base == "real" && def.type.dims == 0)
                return to_real(result, "return value");
        }
        return result;
    }

    std::vector<int> labels_of(const std::vector<Value>& vals)
    {
        std::vector<int> labels;
        for(const Value& v : vals)
        {
            if(v.is<BorderVal>())
                labels.push_back(border_label(*v.as<BorderVal>().b));
            else if(v.is<RealArr>())
                for(double l : *v.as<RealArr>().v)
                    labels.push_back(static_cast<int>(l));
            else
                labels.push_back(static_cast<int>(to_int(v, "label")));
        }
        return labels;
    }

    Value builtin(const std::string& name, const Expr& e)
    {
        if(is_math_function(name))
        {
            Args a = positional(e.args);
            return math_call(name, a.pos);
        }
        if(name == "int2d" || name == "int1d")
        {
            Args a = positional(e.args);
            if(a.pos.empty() || !a.pos[0].is<MeshVal>() || !a.pos[0].as<MeshVal>().m)
                throw InvalidArgument(name + " expects a mesh");
            IntegralVal I{a.pos[0].as<MeshVal>().m, {}, false};
            I.where.kind = name == "int2d" ? Integral::Area : Integral::Boundary;
            if(name == "int2d" && a.pos.size() > 1)
                throw InvalidArgument("int2d takes a mesh and an optional qft");
            I.where.labels = labels_of(std::vector<Value>(a.pos.begin() + 1, a.pos.end()));
            for(const auto& [key, val] : a.named)
            {
                if(key == "qft" || key == "qfe")
                {
                    const Value q = eval(*val);
                    if(!q.is<std::string>())
                        throw InvalidArgument("qft expects a quadrature formula name");
                    I.where.quad = quad_from_name(q.as<std::string>());
                    I.quad_given = true;
                }
                else
                    warn(name + " option '" + key + "' ignored", e.pos);
            }
            return I;
        }
        if(name == "on")
        {
            Args a = positional(e.args);
            if(a.named.size() != 1)
                throw InvalidArgument("on(labels, u=g) needs exactly one u=g");
            auto piece = std::make_shared<FormPiece>();
            DirichletCondition d;
            d.labels = labels_of(a.pos);
            if(d.labels.empty())
                throw InvalidArgument("on() needs at least one label");
            const Value g = eval(*a.named[0].second);
            if(g.is<SymVal>() || g.is<Complex>())
                throw Unsupported("Dirichlet values must be real functions of x and y");
            d.value = to_field(g, "Dirichlet value");
            piece->form.dirichlet.push_back(std::move(d));
            piece->unknowns.push_back(a.named[0].first);
            return FormVal{piece};
        }
        if(name == "dx" || name == "dy")
        {
            Args a = positional(e.args);
            if(a.pos.size() != 1)
                throw InvalidArgument(name + " takes one argument");
            return derivative(a.pos[0], name == "dx" ? 0 : 1);
        }
        if(name == "square")
        {
            Args a = positional(e.args);
            if(a.pos.size() < 2 || a.pos.size() > 3)
                throw InvalidArgument("square(m, n[, [x, y]])");
            const int m = static_cast<int>(to_int(a.pos[0], "square m"));
            const int n = static_cast<int>(to_int(a.pos[1], "square n"));
            for(const auto& kv : a.named)
                warn("square option '" + kv.first + "' ignored", e.pos);
            auto mesh = a.pos.size() == 3 ? build_square(m, n, transform_of(a.pos[2])) : build_square(m, n);
            return MeshVal{std::make_shared<const Mesh>(std::move(mesh))};
        }
        if(name == "movemesh")
        {
            Args a = positional(e.args);
            if(a.pos.size() != 2 || !a.pos[0].is<MeshVal>() || !a.pos[0].as<MeshVal>().m)
                throw InvalidArgument("movemesh(Th, [fx, fy])");
            return MeshVal{std::make_shared<const Mesh>(move_mesh(*a.pos[0].as<MeshVal>().m, transform_of(a.pos[1])))};
        }
        if(name == "buildmesh")
        {
            Args a = positional(e.args);
            for(const auto& kv : a.named)
                warn("buildmesh option '" + kv.first + "' ignored", e.pos);
            if(a.pos.size() != 1 || !a.pos[0].is<BorderChain>())
                throw InvalidArgument("buildmesh expects borders such as C(50) + D(20)");
            return MeshVal{std::make_shared<const Mesh>(build_mesh(a.pos[0].as<BorderChain>()))};
        }
        if(name == "savemesh")
        {
            Args a = positional(e.args);
            if(a.pos.size() != 2 || !a.pos[0].is<MeshVal>() || !a.pos[1].is<std::string>())
                throw InvalidArgument("savemesh(Th, \"file.msh\")");
            save_msh(*a.pos[0].as<MeshVal>().m, resolve(a.pos[1].as<std::string>()));
            return 0LL;
        }
        if(name == "trace" || name == "det")
        {
            Args a = positional(e.args);
            if(a.pos.size() != 1 || !a.pos[0].is<RealMat>())
                throw InvalidArgument(name + " expects a real matrix");
            const DenseMatrix& m = *a.pos[0].as<RealMat>().m;
            return name == "trace" ? trace(m) : det(m);
        }
        if(name == "set")
        {
            Args a = positional(e.args);
            if(a.pos.size() != 1 || !a.pos[0].is<SparseVal>())
                throw InvalidArgument("set expects a matrix built from a varf");
            SparseState& st = *a.pos[0].as<SparseVal>().s;
            for(const auto& [key, val] : a.named)
            {
                if(key == "solver")
                {
                    const std::string s = solver_of(eval(*val), e.pos);
                    if(s != st.solver)
                        st.lu.reset();
                    st.solver = s;
                }
                else
                    warn("set option '" + key + "' ignored", e.pos);
            }
            return 0LL;
        }
        if(name == "plot")
            return plot(e);
        if(name == "exec")
        {
            Args a = positional(e.args);
            if(a.pos.size() != 1 || !a.pos[0].is<std::string>())
                throw InvalidArgument("exec expects a command string");
            if(!opt.allow_exec)
            {
                warn("exec skipped: shell commands need --allow-exec", e.pos);
                return 0LL;
            }
            out->flush();
            return static_cast<long long>(std::system(a.pos[0].as<std::string>().c_str()));
        }
        if(name == "exit")
        {
            Args a = positional(e.args);
            throw ExitSignal{a.pos.empty() ? 0 : static_cast<int>(to_int(a.pos[0], "exit code"))};
        }
        if(name == "clock")
            return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
        if(name == "int3d" || name == "dz" || name == "buildlayers")
            throw Unsupported(name + ": 3D is not supported");
        throw Unsupported(name + " is not available");
    }

    std::string solver_of(const Value& v, const SourcePos& pos)
    {
        if(!v.is<std::string>())
            throw InvalidArgument("solver expects a solver name");
        const std::string& s = v.as<std::string>();
        if(s != "LU" && s != "CG" && s != "sparsesolver" && s != "UMFPACK")
            warn("solver " + s + " is not available, using LU", pos);
        return solver_name(s);
    }

    Value derivative(const Value& v, int dir)
    {
        if(is_number(v))
            return 0.0;
        if(v.is<FeVal>())
        {
            const FeVal u = v.as<FeVal>();
            return LazyVal{Field(Field::Fn([u, dir](const EvalPoint& p) { return fe_derivative(u, p, dir); }))};
        }
        if(v.is<LazyVal>() && v.as<LazyVal>().f.is_constant())
            return 0.0;
        if(v.is<SymVal>())
        {
            std::vector<Monomial> terms;
            for(Monomial m : *v.as<SymVal>().terms)
            {
                if(!m.coef.is_constant())
                    throw Unsupported("derivative of a product with a variable coefficient");
                int& code = m.trial >= 0 ? m.trial : m.test;
                if(code != kTrialValue)
                    throw Unsupported("second derivatives are not supported");
                code = dir + 1;
                terms.push_back(std::move(m));
            }
            return SymVal{std::make_shared<const std::vector<Monomial>>(std::move(terms))};
        }
        throw Unsupported(std::string("derivative of a ") + type_name(v) +
                          "; interpolate it into a finite element space first");
    }

    Transform transform_of(const Value& v)
    {
        if(!v.is<TupleVal>() && !v.is<RealArr>())
            throw InvalidArgument("a mesh transformation is written [fx, fy]");
        std::vector<Value> items;
        if(v.is<TupleVal>())
            items = *v.as<TupleVal>().items;
        else
            for(double d : *v.as<RealArr>().v)
                items.emplace_back(d);
        if(items.size() != 2)
            throw InvalidArgument("a mesh transformation has two components");
        const Field fx = to_field(items[0], "x component"), fy = to_field(items[1], "y component");
        return [fx, fy](Vec2 p) {
            EvalPoint e;
            e.x = p.x;
            e.y = p.y;
            return Vec2{fx(e), fy(e)};
        };
    }

    // --- borders --------------------------------------------------------

    struct BorderSample
    {
        Vec2 point;
        int label = 0;
    };

    BorderSample sample_border(const BorderDef& b, double t)
    {
        ScopeGuard guard(*this, b.env);
        scope->vars[b.def->params[0].name] = Slot{t, {}};
        scope->vars["x"] = Slot{0.0, {}};
        scope->vars["y"] = Slot{0.0, {}};
        scope->vars["label"] = Slot{1LL, {}};
        const auto vars = scope;
        exec_all(b.def->body);
        BorderSample s;
        s.point = {to_real(vars->vars["x"].value, "border x"), to_real(vars->vars["y"].value, "border y")};
        s.label = static_cast<int>(to_int(vars->vars["label"].value, "border label"));
        return s;
    }

    int border_label(const BorderDef& b) { return sample_border(b, b.t0).label; }

    Mesh build_mesh(const BorderChain& chain)
    {
        std::vector<Border> borders;
        for(const auto& [def, n] : chain.parts)
        {
            Border b;
            b.name = def->def->name;
            b.t0 = def->t0;
            b.t1 = def->t1;
            b.count = n;
            b.label = border_label(*def);
            b.param = [this, def = def](double t) { return sample_border(*def, t).point; };
            borders.push_back(std::move(b));
        }
        return build_from_borders(borders);
    }

    // --- forms ----------------------------------------------------------

    Value integrate(const IntegralVal& I, const Value& g)
    {
        if(g.is<SymVal>())
        {
            auto piece = std::make_shared<FormPiece>();
            piece->mesh = I.mesh;
            for(const Monomial& m : *g.as<SymVal>().terms)
            {
                if(m.test < 0)
                    throw InvalidArgument("every form term needs the test function");
                if(m.trial >= 0)
                    piece->form.bilinear.push_back({I.where, op_of(m.trial), op_of(m.test), m.coef});
                else
                    piece->form.linear.push_back({I.where, op_of(m.test), m.coef});
            }
            return FormVal{piece};
        }
        if(g.is<FormVal>() || g.is<TupleVal>())
            throw InvalidArgument(std::string("cannot integrate a ") + type_name(g));
        const Field f = to_field(g, "integrand");
        if(I.where.kind == Integral::Area)
            return integrate_2d(*I.mesh, f, I.quad_given ? I.where.quad : QuadRule::Degree5);
        return integrate_1d(*I.mesh, I.where.labels, f);
    }

    std::shared_ptr<const FormPiece> eval_form(const Stmt& def, const std::shared_ptr<Scope>& env)
    {
        Value body;
        {
            ScopeGuard guard(*this, env);
            scope->vars[def.params[0].name] =
                Slot{SymVal{std::make_shared<const std::vector<Monomial>>(1, Monomial{Field(1.0), kTrialValue, -1})}, {}};
            scope->vars[def.params[1].name] =
                Slot{SymVal{std::make_shared<const std::vector<Monomial>>(1, Monomial{Field(1.0), -1, kTrialValue})}, {}};
            body = eval(*def.expr);
        }
        if(body.is<FormVal>())
            return body.as<FormVal>().p;
        if(body.is<SymVal>())
            throw InvalidArgument("form terms of " + def.name + " must be integrated with int2d or int1d");
        throw InvalidArgument(def.name + " does not define a variational form");
    }

    double tgv_of(const Stmt& def, const std::shared_ptr<Scope>& env)
    {
        for(const Arg& a : def.args)
            if(a.name == "tgv")
            {
                ScopeGuard guard(*this, env);
                return to_real(eval(*a.value), "tgv");
            }
        return kDefaultTgv;
    }

    void check_mesh(const FormPiece& p, const FeSpace& s, const std::string& name)
    {
        if(p.mesh && p.mesh.get() != &s.mesh())
            throw InvalidArgument(name + ": the integrals use a different mesh than the finite element space");
    }

    Value call_varf(const VarfVal& vf, const std::vector<Value>& args)
    {
        const Stmt& def = *vf.def;
        if(args.size() != 2 || !args[1].is<SpaceVal>())
            throw InvalidArgument(def.name + " is called as " + def.name + "(Vh, Vh) or " + def.name + "(0, Vh)");
        const auto piece = eval_form(def, vf.env);
        const FeSpace& test = *args[1].as<SpaceVal>().s;
        check_mesh(*piece, test, def.name);
        const double tgv = tgv_of(def, vf.env);
        for(const Arg& a : def.args)
            if(a.name != "tgv" && a.name != "solver" && a.name != "init")
                warn("varf option '" + a.name + "' ignored", def.pos);
        if(args[0].is<SpaceVal>())
        {
            const FeSpace& trial = *args[0].as<SpaceVal>().s;
            auto st = std::make_shared<SparseState>();
            st->a = assemble_bilinear(piece->form, trial, test, tgv);
            note(3, "matrix " + def.name + ": " + std::to_string(st->a.rows()) + " x " + std::to_string(st->a.cols()) +
                        ", " + std::to_string(st->a.nnz()) + " nonzeros");
            return SparseVal{st};
        }
        if(is_number(args[0]))
            return make_array(assemble_linear(piece->form, test, tgv));
        throw InvalidArgument(def.name + ": first argument must be a space or 0");
    }

    void invoke(ProblemState& st)
    {
        const Stmt& def = *st.def;
        const std::string& trial = def.params[0].name;
        Slot* s = st.env->find(trial);
        if(!s || !s->value.is<FeVal>())
            throw InvalidArgument("unknown '" + trial + "' of " + def.name + " must be a finite element function");
        const FeVal u = s->value.as<FeVal>();
        const FeSpace& space = *u.space;

        std::string solver = "LU";
        bool init = false;
        {
            ScopeGuard guard(*this, st.env);
            for(const Arg& a : def.args)
            {
                if(a.name == "solver")
                    solver = solver_of(eval(*a.value), def.pos);
                else if(a.name == "init")
                    init = truthy(eval(*a.value));
                else if(a.name != "tgv")
                    warn(def.name + " option '" + a.name + "' ignored", def.pos);
            }
        }
        const double tgv = tgv_of(def, st.env);
        const auto piece = eval_form(def, st.env);
        check_mesh(*piece, space, def.name);
        for(const auto& name : piece->unknowns)
            if(name != trial)
                throw InvalidArgument("on(..., " + name + "=...) in " + def.name + " does not name the unknown " + trial);

        // the system is a(u, v) + l(v) = 0, so the right-hand side is -l
        VarForm form = piece->form;
        for(LinearTerm& t : form.linear)
            t.coef = field_scale(t.coef, -1.0);
        const std::vector<double> b = assemble_linear(form, space, tgv);

        std::vector<double> x;
        if(solver == "CG")
        {
            const CgResult r = solve_cg(assemble_bilinear(form, space, space, tgv), b);
            if(!r.converged)
                throw SolverError(def.name + ": conjugate gradient did not converge");
            x = r.x;
        }
        else
        {
            const bool reuse = init && st.lu && st.lu_space.get() == &space;
            if(!reuse)
            {
                st.lu = std::make_shared<const LuFactorization>(assemble_bilinear(form, space, space, tgv));
                st.lu_space = u.space;
            }
            x = st.lu->solve(b);
        }
        *u.dofs = std::move(x);
        note(3, "solved " + def.name + " with " + solver + ", " + std::to_string(space.ndof()) + " unknowns");
    }

    // --- plot -----------------------------------------------------------

    Value plot(const Expr& e)
    {
        Args a = positional(e.args);
        std::string ps, caption;
        for(const auto& [key, val] : a.named)
        {
            if(!kPlotOptions.count(key))
            {
                warn("plot option '" + key + "' ignored", e.pos);
                continue;
            }
            if(key == "ps" || key == "cmm")
            {
                const Value v = eval(*val);
                (key == "ps" ? ps : caption) = to_display(v);
            }
        }
        if(ps.empty() || !opt.plot_files)
        {
            note(2, "plot: nothing to display");
            return 0LL;
        }
        if(a.pos.empty())
            throw InvalidArgument("plot needs a mesh or a function");
        const Value& what = a.pos[0];
        if(what.is<MeshVal>() && what.as<MeshVal>().m)
            write_eps(*what.as<MeshVal>().m, nullptr, resolve(ps), caption);
        else if(what.is<FeVal>())
        {
            const FeVal& u = what.as<FeVal>();
            const FeFunction f(u.space, *u.dofs);
            write_eps(u.space->mesh(), &f, resolve(ps), caption);
        }
        else
        {
            warn(std::string("plot of a ") + type_name(what) + " cannot be written to " + ps, e.pos);
            return 0LL;
        }
        note(2, "plot written to " + ps);
        return 0LL;
    }

    // --- entry points ---------------------------------------------------

    int run(const Program& program)
    {
        auto kept = std::make_shared<const Program>(program);
        programs.push_back(kept);
        try
        {
            exec_all(kept->statements);
        }
        catch(const ExitSignal& e)
        {
            out->flush();
            return e.code;
        }
        catch(const BreakSignal&)
        {
            throw ScriptError("break outside a loop", 0);
        }
        catch(const ContinueSignal&)
        {
            throw ScriptError("continue outside a loop", 0);
        }
        catch(const ReturnSignal&)
        {
            throw ScriptError("return outside a function", 0);
        }
        out->flush();
        return 0;
    }
};

Interpreter::Interpreter(RunOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Interpreter::~Interpreter() = default;

int Interpreter::run(const Program& program) { return impl_->run(program); }

int Interpreter::run_source(std::string_view source) { return impl_->run(parse_source(source)); }

int Interpreter::run_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if(!in)
        throw IoError("file not found: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    impl_->opt.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return run_source(text.str());
}

bool Interpreter::has(const std::string& name) const { return impl_->global->vars.count(name) > 0; }

std::optional<double> Interpreter::number(const std::string& name) const
{
    const auto it = impl_->global->vars.find(name);
    if(it == impl_->global->vars.end())
        return std::nullopt;
    const Value& v = it->second.value;
    if(v.is<long long>() || v.is<double>())
        return to_real(v, name.c_str());
    return std::nullopt;
}

std::optional<std::string> Interpreter::string(const std::string& name) const
{
    const auto it = impl_->global->vars.find(name);
    if(it == impl_->global->vars.end() || !it->second.value.is<std::string>())
        return std::nullopt;
    return it->second.value.as<std::string>();
}

std::optional<std::vector<double>> Interpreter::array(const std::string& name) const
{
    const auto it = impl_->global->vars.find(name);
    if(it == impl_->global->vars.end())
        return std::nullopt;
    const Value& v = it->second.value;
    if(v.is<RealArr>())
        return *v.as<RealArr>().v;
    if(v.is<FeVal>())
        return *v.as<FeVal>().dofs;
    return std::nullopt;
}

std::shared_ptr<const Mesh> Interpreter::mesh(const std::string& name) const
{
    const auto it = impl_->global->vars.find(name);
    if(it == impl_->global->vars.end() || !it->second.value.is<MeshVal>())
        return nullptr;
    return it->second.value.as<MeshVal>().m;
}

} // namespace femscript::dsl
