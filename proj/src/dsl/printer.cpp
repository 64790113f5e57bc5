#include "femscript/dsl/parser.hpp"

#include <sstream>

namespace femscript::dsl
{
namespace
{

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for(char c : s)
    {
        switch(c)
        {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        default: out += c; break;
        }
    }
    return out + "\"";
}

std::string type_text(const TypeSpec& t)
{
    std::string s = t.base;
    if(t.complex)
        s += "<complex>";
    if(t.dims == 1)
        s += "[int]";
    else if(t.dims == 2)
        s += "[int,int]";
    return s;
}

void print_expr(std::ostream& out, const Expr& e, bool top);

void print_args(std::ostream& out, const std::vector<Arg>& args)
{
    for(std::size_t k = 0; k < args.size(); ++k)
    {
        if(k)
            out << ", ";
        if(!args[k].name.empty())
            out << args[k].name << "=";
        print_expr(out, *args[k].value, false);
    }
}

void print_expr(std::ostream& out, const Expr& e, bool top)
{
    switch(e.kind)
    {
    case ExprKind::Int:
    case ExprKind::Real:
    case ExprKind::Ident: out << e.text; break;
    case ExprKind::Imaginary: out << e.text << 'i'; break;
    case ExprKind::String: out << quote(e.text); break;
    case ExprKind::Unary:
        out << '(' << e.text;
        print_expr(out, *e.kids[0], false);
        out << ')';
        break;
    case ExprKind::Binary:
        out << '(';
        print_expr(out, *e.kids[0], false);
        out << ' ' << e.text << ' ';
        print_expr(out, *e.kids[1], false);
        out << ')';
        break;
    case ExprKind::Assign:
        if(!top)
            out << '(';
        print_expr(out, *e.kids[0], false);
        out << ' ' << e.text << ' ';
        print_expr(out, *e.kids[1], true);
        if(!top)
            out << ')';
        break;
    case ExprKind::PostIncr:
        print_expr(out, *e.kids[0], false);
        out << e.text;
        break;
    case ExprKind::Transpose:
        print_expr(out, *e.kids[0], false);
        out << '\'';
        break;
    case ExprKind::Call:
        print_expr(out, *e.kids[0], false);
        out << '(';
        print_args(out, e.args);
        out << ')';
        break;
    case ExprKind::Index:
        print_expr(out, *e.kids[0], false);
        out << '[';
        if(e.kids.size() > 1)
            print_expr(out, *e.kids[1], true);
        out << ']';
        break;
    case ExprKind::Member:
        print_expr(out, *e.kids[0], false);
        out << '.' << e.text;
        break;
    case ExprKind::Array:
        out << '[';
        for(std::size_t k = 0; k < e.kids.size(); ++k)
        {
            if(k)
                out << ", ";
            print_expr(out, *e.kids[k], false);
        }
        out << ']';
        break;
    case ExprKind::Range:
        out << '(';
        for(std::size_t k = 0; k < e.kids.size(); ++k)
        {
            if(k)
                out << ':';
            print_expr(out, *e.kids[k], false);
        }
        out << ')';
        break;
    case ExprKind::Conditional:
        out << '(';
        print_expr(out, *e.kids[0], false);
        out << " ? ";
        print_expr(out, *e.kids[1], false);
        out << " : ";
        print_expr(out, *e.kids[2], false);
        out << ')';
        break;
    }
}

class StmtPrinter
{
public:
    explicit StmtPrinter(std::ostream& out) : out_(out) {}

    void statement(const Stmt& s, int depth)
    {
        indent(depth);
        inline_statement(s, depth);
        out_ << '\n';
    }

private:
    void indent(int depth)
    {
        for(int k = 0; k < depth; ++k)
            out_ << "    ";
    }

    void declaration(const Stmt& s)
    {
        out_ << type_text(s.type) << ' ';
        for(std::size_t k = 0; k < s.decls.size(); ++k)
        {
            const Declarator& d = s.decls[k];
            if(k)
                out_ << ", ";
            out_ << d.name;
            if(d.has_ctor)
            {
                out_ << '(';
                print_args(out_, d.ctor);
                out_ << ')';
            }
            if(d.init)
            {
                out_ << " = ";
                print_expr(out_, *d.init, true);
            }
        }
    }

    void inline_statement(const Stmt& s, int depth)
    {
        switch(s.kind)
        {
        case StmtKind::Expr:
            print_expr(out_, *s.expr, true);
            out_ << ';';
            break;
        case StmtKind::Decl:
            declaration(s);
            out_ << ';';
            break;
        case StmtKind::Fespace:
            out_ << "fespace " << s.name << '(';
            print_args(out_, s.args);
            out_ << ");";
            break;
        case StmtKind::Func:
            out_ << "func ";
            for(std::size_t k = 0; k < s.decls.size(); ++k)
            {
                if(k)
                    out_ << ", ";
                out_ << s.decls[k].name << " = ";
                print_expr(out_, *s.decls[k].init, true);
            }
            out_ << ';';
            break;
        case StmtKind::FuncDef:
            out_ << "func " << type_text(s.type) << ' ' << s.name << '(';
            for(std::size_t k = 0; k < s.params.size(); ++k)
                out_ << (k ? ", " : "") << type_text(s.params[k].type) << ' ' << s.params[k].name;
            out_ << ") ";
            inline_statement(*s.body[0], depth);
            break;
        case StmtKind::Border:
            out_ << "border " << s.name << '(' << s.params[0].name << " = ";
            print_expr(out_, *s.args[0].value, false);
            out_ << ", ";
            print_expr(out_, *s.args[1].value, false);
            out_ << ") ";
            inline_statement(*s.body[0], depth);
            break;
        case StmtKind::Varf:
        case StmtKind::Problem:
        case StmtKind::Solve:
            out_ << (s.kind == StmtKind::Varf ? "varf " : s.kind == StmtKind::Problem ? "problem " : "solve ")
                 << s.name << '(' << s.params[0].name << ", " << s.params[1].name;
            if(!s.args.empty())
            {
                out_ << ", ";
                print_args(out_, s.args);
            }
            out_ << ") = ";
            print_expr(out_, *s.expr, true);
            out_ << ';';
            break;
        case StmtKind::If:
            out_ << "if (";
            print_expr(out_, *s.expr, true);
            out_ << ") ";
            inline_statement(*s.body[0], depth);
            if(s.body.size() > 1)
            {
                out_ << '\n';
                indent(depth);
                out_ << "else ";
                inline_statement(*s.body[1], depth);
            }
            break;
        case StmtKind::For:
            out_ << "for (";
            if(s.init->kind == StmtKind::Decl)
                declaration(*s.init);
            else
                print_expr(out_, *s.init->expr, true);
            out_ << "; ";
            print_expr(out_, *s.expr, true);
            out_ << "; ";
            print_expr(out_, *s.step, true);
            out_ << ") ";
            inline_statement(*s.body[0], depth);
            break;
        case StmtKind::While:
            out_ << "while (";
            print_expr(out_, *s.expr, true);
            out_ << ") ";
            inline_statement(*s.body[0], depth);
            break;
        case StmtKind::Break: out_ << "break;"; break;
        case StmtKind::Continue: out_ << "continue;"; break;
        case StmtKind::Return:
            out_ << "return";
            if(s.expr)
            {
                out_ << ' ';
                print_expr(out_, *s.expr, true);
            }
            out_ << ';';
            break;
        case StmtKind::Block:
            out_ << "{\n";
            for(const auto& b : s.body)
                statement(*b, depth + 1);
            indent(depth);
            out_ << '}';
            break;
        case StmtKind::Macro:
            out_ << "macro " << s.name;
            if(s.macro_params)
            {
                out_ << '(';
                for(std::size_t k = 0; k < s.params.size(); ++k)
                    out_ << (k ? "," : "") << s.params[k].name;
                out_ << ')';
            }
            else
                out_ << ' ';
            out_ << s.text << "//";
            break;
        case StmtKind::Load: out_ << "load " << quote(s.name) << ';'; break;
        case StmtKind::Empty: out_ << ';'; break;
        }
    }

    std::ostream& out_;
};

bool equal_ptr(const ExprPtr& a, const ExprPtr& b)
{
    if(!a || !b)
        return !a && !b;
    return equal(*a, *b);
}

bool equal_ptr(const StmtPtr& a, const StmtPtr& b)
{
    if(!a || !b)
        return !a && !b;
    return equal(*a, *b);
}

bool equal_args(const std::vector<Arg>& a, const std::vector<Arg>& b)
{
    if(a.size() != b.size())
        return false;
    for(std::size_t k = 0; k < a.size(); ++k)
        if(a[k].name != b[k].name || !equal_ptr(a[k].value, b[k].value))
            return false;
    return true;
}

bool equal_type(const TypeSpec& a, const TypeSpec& b)
{
    return a.base == b.base && a.dims == b.dims && a.complex == b.complex;
}

} // namespace

std::string print(const Expr& expr)
{
    std::ostringstream out;
    print_expr(out, expr, true);
    return out.str();
}

std::string print(const Program& program)
{
    std::ostringstream out;
    StmtPrinter printer(out);
    for(const auto& s : program.statements)
        printer.statement(*s, 0);
    return out.str();
}

bool equal(const Expr& a, const Expr& b)
{
    if(a.kind != b.kind || a.text != b.text || a.kids.size() != b.kids.size() || !equal_args(a.args, b.args))
        return false;
    for(std::size_t k = 0; k < a.kids.size(); ++k)
        if(!equal_ptr(a.kids[k], b.kids[k]))
            return false;
    return true;
}

bool equal(const Stmt& a, const Stmt& b)
{
    if(a.kind != b.kind || !equal_type(a.type, b.type) || a.name != b.name || a.text != b.text ||
       a.macro_params != b.macro_params || a.decls.size() != b.decls.size() ||
       a.params.size() != b.params.size() || a.body.size() != b.body.size() || !equal_args(a.args, b.args) ||
       !equal_ptr(a.expr, b.expr) || !equal_ptr(a.step, b.step) || !equal_ptr(a.init, b.init))
        return false;
    for(std::size_t k = 0; k < a.decls.size(); ++k)
    {
        const Declarator& x = a.decls[k];
        const Declarator& y = b.decls[k];
        if(x.name != y.name || x.has_ctor != y.has_ctor || !equal_args(x.ctor, y.ctor) ||
           !equal_ptr(x.init, y.init))
            return false;
    }
    for(std::size_t k = 0; k < a.params.size(); ++k)
        if(a.params[k].name != b.params[k].name || !equal_type(a.params[k].type, b.params[k].type))
            return false;
    for(std::size_t k = 0; k < a.body.size(); ++k)
        if(!equal_ptr(a.body[k], b.body[k]))
            return false;
    return true;
}

bool equal(const Program& a, const Program& b)
{
    if(a.statements.size() != b.statements.size())
        return false;
    for(std::size_t k = 0; k < a.statements.size(); ++k)
        if(!equal(*a.statements[k], *b.statements[k]))
            return false;
    return true;
}

} // namespace femscript::dsl
