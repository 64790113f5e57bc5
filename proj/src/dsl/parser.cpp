#include "femscript/dsl/parser.hpp"

#include "femscript/error.hpp"

#include <set>

namespace femscript::dsl
{
namespace
{

bool is_type_keyword(std::string_view w)
{
    return w == "int" || w == "real" || w == "complex" || w == "string" || w == "bool" || w == "mesh" ||
           w == "mesh3" || w == "matrix" || w == "ofstream" || w == "ifstream";
}

bool is_assign_op(std::string_view op)
{
    return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=";
}

class Parser
{
public:
    Parser(const std::vector<Token>& tokens, const std::vector<Macro>& macros)
        : toks_(tokens), macros_(macros)
    {
        if(toks_.empty() || toks_.back().kind != TokenKind::End)
            throw ParseError("token stream must end with an end marker", 0);
    }

    Program program()
    {
        Program p;
        while(cur().kind != TokenKind::End)
            p.statements.push_back(statement());
        return p;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& ahead(std::size_t k) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
    const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
    bool at_op(std::string_view s) const { return cur().is_op(s); }
    bool at_kw(std::string_view s) const { return cur().is(TokenKind::Keyword, s); }

    bool accept(std::string_view s)
    {
        if(!at_op(s))
            return false;
        take();
        return true;
    }

    [[noreturn]] void fail(const std::string& expected) const
    {
        throw ParseError("expected " + expected + ", found '" + token_text(cur()) + "' at column " +
                             std::to_string(cur().pos.column),
                         cur().pos.line);
    }

    void expect(std::string_view s)
    {
        if(!accept(s))
            fail("'" + std::string(s) + "'");
    }

    std::string identifier(const char* what = "identifier")
    {
        if(cur().kind != TokenKind::Identifier)
            fail(what);
        return take().lexeme;
    }

    // --- statements ---------------------------------------------------

    bool at_type() const
    {
        const Token& t = cur();
        if(t.kind == TokenKind::Keyword && is_type_keyword(t.lexeme))
            return !ahead(1).is_op("(") || t.lexeme == "matrix";
        if(t.kind == TokenKind::Identifier && spaces_.count(t.lexeme))
            return ahead(1).kind == TokenKind::Identifier || ahead(1).is_op("<");
        return false;
    }

    StmtPtr statement()
    {
        const Token& t = cur();
        if(t.kind == TokenKind::MacroDef)
            return macro_stmt();
        if(at_type())
            return declaration(true);
        if(t.kind == TokenKind::Keyword)
        {
            const std::string& k = t.lexeme;
            if(k == "fespace")
                return fespace();
            if(k == "func")
                return func();
            if(k == "border")
                return border();
            if(k == "varf" || k == "problem" || k == "solve")
                return form_def();
            if(k == "if")
                return if_stmt();
            if(k == "for")
                return for_stmt();
            if(k == "while")
                return while_stmt();
            if(k == "break" || k == "continue")
            {
                auto s = make(k == "break" ? StmtKind::Break : StmtKind::Continue);
                take();
                end_statement();
                return s;
            }
            if(k == "return")
            {
                auto s = make(StmtKind::Return);
                take();
                if(!at_op(";") && !at_op("}"))
                    s->expr = expression();
                end_statement();
                return s;
            }
            if(k == "load")
            {
                auto s = make(StmtKind::Load);
                take();
                if(cur().kind != TokenKind::String)
                    fail("a quoted plugin name");
                s->name = take().lexeme;
                accept(";");
                return s;
            }
        }
        if(at_op("{"))
            return block();
        if(at_op(";"))
        {
            auto s = make(StmtKind::Empty);
            take();
            return s;
        }
        auto s = make(StmtKind::Expr);
        s->expr = expression();
        end_statement();
        return s;
    }

    std::shared_ptr<Stmt> make(StmtKind kind) const
    {
        auto s = std::make_shared<Stmt>();
        s->kind = kind;
        s->pos = cur().pos;
        return s;
    }

    // `;` ends a statement; it may be left out right before `}`.
    void end_statement()
    {
        if(accept(";") || at_op("}"))
            return;
        fail("';'");
    }

    StmtPtr macro_stmt()
    {
        const Token& t = take();
        const Macro& m = macros_.at(static_cast<std::size_t>(t.macro));
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::Macro;
        s->pos = t.pos;
        s->name = m.name;
        s->text = m.text;
        s->macro_params = m.has_params;
        for(const auto& p : m.params)
            s->params.push_back({{}, p});
        return s;
    }

    TypeSpec type_spec()
    {
        TypeSpec ts;
        ts.base = take().lexeme;
        if(accept("<"))
        {
            if(!cur().is(TokenKind::Keyword, "complex") && !cur().is(TokenKind::Keyword, "real"))
                fail("'complex' or 'real'");
            ts.complex = take().lexeme == "complex";
            expect(">");
        }
        if(accept("["))
        {
            for(;;)
            {
                if(!at_kw("int") && !at_kw("string") && !at_kw("real"))
                    fail("index type 'int'");
                take();
                ++ts.dims;
                if(!accept(","))
                    break;
            }
            expect("]");
        }
        return ts;
    }

    StmtPtr declaration(bool terminated)
    {
        auto s = make(StmtKind::Decl);
        s->type = type_spec();
        do
        {
            Declarator d;
            d.pos = cur().pos;
            d.name = identifier("variable name");
            if(accept("("))
            {
                d.has_ctor = true;
                d.ctor = arguments(")");
            }
            if(accept("="))
                d.init = assignment();
            s->decls.push_back(std::move(d));
        } while(accept(","));
        if(terminated)
            end_statement();
        return s;
    }

    StmtPtr fespace()
    {
        auto s = make(StmtKind::Fespace);
        take();
        s->name = identifier("fespace name");
        expect("(");
        s->args = arguments(")");
        spaces_.insert(s->name);
        end_statement();
        return s;
    }

    StmtPtr func()
    {
        take();
        if(at_type() || (cur().kind == TokenKind::Keyword && is_type_keyword(cur().lexeme)) ||
           (cur().kind == TokenKind::Identifier && ahead(1).kind == TokenKind::Identifier))
        {
            auto s = make(StmtKind::FuncDef);
            s->type = type_spec();
            s->name = identifier("function name");
            expect("(");
            if(!at_op(")"))
            {
                do
                {
                    if(!(cur().kind == TokenKind::Keyword && is_type_keyword(cur().lexeme)) &&
                       !(cur().kind == TokenKind::Identifier && spaces_.count(cur().lexeme)))
                        fail("parameter type");
                    Param p;
                    p.type = type_spec();
                    accept("&");
                    p.name = identifier("parameter name");
                    s->params.push_back(std::move(p));
                } while(accept(","));
            }
            expect(")");
            if(!at_op("{"))
                fail("'{'");
            s->body.push_back(block());
            return s;
        }
        auto s = make(StmtKind::Func);
        do
        {
            Declarator d;
            d.pos = cur().pos;
            d.name = identifier("function name");
            expect("=");
            d.init = assignment();
            s->decls.push_back(std::move(d));
        } while(accept(","));
        end_statement();
        return s;
    }

    StmtPtr border()
    {
        auto s = make(StmtKind::Border);
        take();
        s->name = identifier("border name");
        expect("(");
        s->params.push_back({{}, identifier("parameter name")});
        expect("=");
        s->args.push_back({"", conditional()});
        expect(",");
        s->args.push_back({"", conditional()});
        expect(")");
        if(!at_op("{"))
            fail("'{'");
        s->body.push_back(block());
        return s;
    }

    StmtPtr form_def()
    {
        const std::string k = cur().lexeme;
        auto s = make(k == "varf" ? StmtKind::Varf : k == "problem" ? StmtKind::Problem : StmtKind::Solve);
        take();
        s->name = identifier("form name");
        expect("(");
        for(Arg& a : arguments(")"))
        {
            if(!a.name.empty())
                s->args.push_back(std::move(a));
            else if(a.value->kind == ExprKind::Ident)
                s->params.push_back({{}, a.value->text});
            else
                throw ParseError("unknowns of " + s->name + " must be plain names", a.value->pos.line);
        }
        if(s->params.size() != 2)
            throw ParseError(k + " " + s->name + " needs exactly one unknown and one test function",
                             s->pos.line);
        expect("=");
        s->expr = expression();
        end_statement();
        return s;
    }

    StmtPtr if_stmt()
    {
        auto s = make(StmtKind::If);
        take();
        expect("(");
        s->expr = expression();
        expect(")");
        s->body.push_back(statement());
        if(at_kw("else"))
        {
            take();
            s->body.push_back(statement());
        }
        return s;
    }

    StmtPtr for_stmt()
    {
        auto s = make(StmtKind::For);
        take();
        expect("(");
        if(at_op(";"))
            fail("loop initialisation");
        if(at_type())
            s->init = declaration(false);
        else
        {
            auto e = make(StmtKind::Expr);
            e->expr = expression();
            s->init = e;
        }
        expect(";");
        if(at_op(";"))
            fail("loop condition");
        s->expr = expression();
        expect(";");
        if(at_op(")"))
            fail("loop increment");
        s->step = expression();
        expect(")");
        s->body.push_back(statement());
        return s;
    }

    StmtPtr while_stmt()
    {
        auto s = make(StmtKind::While);
        take();
        expect("(");
        s->expr = expression();
        expect(")");
        s->body.push_back(statement());
        return s;
    }

    StmtPtr block()
    {
        auto s = make(StmtKind::Block);
        expect("{");
        const auto saved = spaces_;
        while(!at_op("}"))
        {
            if(cur().kind == TokenKind::End)
                fail("'}'");
            s->body.push_back(statement());
        }
        take();
        spaces_ = saved;
        return s;
    }

    // --- expressions --------------------------------------------------

    std::shared_ptr<Expr> node(ExprKind kind, std::string text, SourcePos pos) const
    {
        auto e = std::make_shared<Expr>();
        e->kind = kind;
        e->text = std::move(text);
        e->pos = pos;
        return e;
    }

    ExprPtr binary(std::string op, ExprPtr l, ExprPtr r, SourcePos pos) const
    {
        auto e = node(ExprKind::Binary, std::move(op), pos);
        e->kids = {std::move(l), std::move(r)};
        return e;
    }

    std::vector<Arg> arguments(std::string_view close)
    {
        std::vector<Arg> args;
        if(accept(close))
            return args;
        do
        {
            Arg a;
            if(cur().kind == TokenKind::Identifier && ahead(1).is(TokenKind::Operator, "="))
            {
                a.name = take().lexeme;
                take();
            }
            a.value = conditional();
            args.push_back(std::move(a));
        } while(accept(","));
        expect(close);
        return args;
    }

    ExprPtr expression() { return assignment(); }

    ExprPtr assignment()
    {
        ExprPtr lhs = conditional();
        if(cur().kind == TokenKind::Operator && is_assign_op(cur().lexeme))
        {
            const Token& op = take();
            auto e = node(ExprKind::Assign, op.lexeme, op.pos);
            e->kids = {lhs, assignment()};
            return e;
        }
        return lhs;
    }

    ExprPtr conditional()
    {
        ExprPtr c = logical_or();
        if(at_op("?"))
        {
            const SourcePos pos = take().pos;
            auto e = node(ExprKind::Conditional, "?", pos);
            ExprPtr a = logical_or();
            expect(":");
            e->kids = {c, a, conditional()};
            return e;
        }
        if(at_op(":"))
        {
            const SourcePos pos = take().pos;
            auto e = node(ExprKind::Range, ":", pos);
            e->kids = {c, logical_or()};
            if(accept(":"))
                e->kids.push_back(logical_or());
            return e;
        }
        return c;
    }

    template <class Next>
    ExprPtr left_assoc(std::initializer_list<std::string_view> ops, Next next)
    {
        ExprPtr lhs = (this->*next)();
        for(;;)
        {
            bool matched = false;
            for(std::string_view op : ops)
            {
                if(cur().is(TokenKind::Operator, op))
                {
                    const Token& t = take();
                    lhs = binary(t.lexeme, lhs, (this->*next)(), t.pos);
                    matched = true;
                    break;
                }
            }
            if(!matched)
                return lhs;
        }
    }

    ExprPtr logical_or() { return left_assoc({"|", "||"}, &Parser::logical_and); }
    ExprPtr logical_and() { return left_assoc({"&", "&&"}, &Parser::equality); }
    ExprPtr equality() { return left_assoc({"==", "!="}, &Parser::relational); }
    ExprPtr relational() { return left_assoc({"<", ">", "<=", ">="}, &Parser::shift); }
    ExprPtr shift() { return left_assoc({"<<", ">>"}, &Parser::additive); }
    ExprPtr additive() { return left_assoc({"+", "-"}, &Parser::multiplicative); }
    ExprPtr multiplicative() { return left_assoc({"*", "/", "%", ".*", "./"}, &Parser::unary); }

    ExprPtr unary()
    {
        if(cur().kind == TokenKind::Operator &&
           (cur().lexeme == "-" || cur().lexeme == "+" || cur().lexeme == "!" || cur().lexeme == "++" ||
            cur().lexeme == "--"))
        {
            const Token& t = take();
            auto e = node(ExprKind::Unary, t.lexeme, t.pos);
            e->kids = {unary()};
            return e;
        }
        return power();
    }

    ExprPtr power()
    {
        ExprPtr base = postfix();
        if(cur().is(TokenKind::Operator, "^"))
        {
            const Token& t = take();
            return binary("^", base, unary(), t.pos);
        }
        return base;
    }

    ExprPtr postfix()
    {
        ExprPtr e = primary();
        for(;;)
        {
            const SourcePos pos = cur().pos;
            if(accept("("))
            {
                auto call = node(ExprKind::Call, "", pos);
                call->kids = {e};
                call->args = arguments(")");
                e = call;
            }
            else if(accept("["))
            {
                auto idx = node(ExprKind::Index, "", pos);
                idx->kids = {e};
                if(!accept("]"))
                {
                    idx->kids.push_back(expression());
                    expect("]");
                }
                e = idx;
            }
            else if(at_op(".") && ahead(1).kind == TokenKind::Identifier)
            {
                take();
                auto m = node(ExprKind::Member, take().lexeme, pos);
                m->kids = {e};
                e = m;
            }
            else if(cur().is(TokenKind::Operator, "'"))
            {
                take();
                auto t = node(ExprKind::Transpose, "'", pos);
                t->kids = {e};
                e = t;
            }
            else if(cur().is(TokenKind::Operator, "++") || cur().is(TokenKind::Operator, "--"))
            {
                auto p = node(ExprKind::PostIncr, take().lexeme, pos);
                p->kids = {e};
                e = p;
            }
            else
                return e;
        }
    }

    ExprPtr primary()
    {
        const Token& t = cur();
        switch(t.kind)
        {
        case TokenKind::Int: take(); return node(ExprKind::Int, t.lexeme, t.pos);
        case TokenKind::Real: take(); return node(ExprKind::Real, t.lexeme, t.pos);
        case TokenKind::Imaginary: take(); return node(ExprKind::Imaginary, t.lexeme, t.pos);
        case TokenKind::String: take(); return node(ExprKind::String, t.lexeme, t.pos);
        case TokenKind::Identifier: take(); return node(ExprKind::Ident, t.lexeme, t.pos);
        case TokenKind::Keyword:
            if(is_type_keyword(t.lexeme) && ahead(1).is_op("("))
            {
                take();
                return node(ExprKind::Ident, t.lexeme, t.pos);
            }
            break;
        default: break;
        }
        if(accept("("))
        {
            ExprPtr e = expression();
            expect(")");
            return e;
        }
        if(at_op("["))
        {
            auto arr = node(ExprKind::Array, "", take().pos);
            for(const Arg& a : arguments("]"))
            {
                if(!a.name.empty())
                    throw ParseError("named value inside an array literal", t.pos.line);
                arr->kids.push_back(a.value);
            }
            return arr;
        }
        fail("an expression");
    }

    const std::vector<Token>& toks_;
    const std::vector<Macro>& macros_;
    std::size_t i_ = 0;
    std::set<std::string> spaces_;
};

} // namespace

Program parse(const std::vector<Token>& tokens, const std::vector<Macro>& macros)
{
    return Parser(tokens, macros).program();
}

Program parse_source(std::string_view source)
{
    std::vector<Macro> macros;
    const auto tokens = expand_source(source, &macros);
    return parse(tokens, macros);
}

} // namespace femscript::dsl
