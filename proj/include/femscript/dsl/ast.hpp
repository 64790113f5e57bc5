#pragma once

#include "femscript/dsl/lexer.hpp"

#include <memory>
#include <string>
#include <vector>

namespace femscript::dsl
{

enum class ExprKind
{
    Int,
    Real,
    Imaginary,
    String,
    Ident,
    Unary,     ///< text: "-", "+", "!", "++", "--"
    Binary,    ///< text: operator
    Assign,    ///< text: "=", "+=", ...
    PostIncr,  ///< text: "++" or "--"
    Transpose,
    Call,      ///< kids[0] callee, args
    Index,     ///< kids[0] base, kids[1] index; `u[]` has no kids[1]
    Member,    ///< kids[0] object, text: member name
    Array,     ///< [a, b, ...]
    Range,     ///< kids: start, [step,] end
    Conditional,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Call argument; `name` is empty unless written as `name = value`.
struct Arg
{
    std::string name;
    ExprPtr value;
};

struct Expr
{
    ExprKind kind = ExprKind::Int;
    std::string text;
    std::vector<ExprPtr> kids;
    std::vector<Arg> args;
    SourcePos pos;
};

struct TypeSpec
{
    std::string base;     ///< keyword type or the name of an fespace
    int dims = 0;         ///< 1 for real[int], 2 for real[int,int]
    bool complex = false; ///< matrix<complex>, Vh<complex>

    bool empty() const { return base.empty(); }
};

struct Declarator
{
    std::string name;
    bool has_ctor = false; ///< written as name(args)
    std::vector<Arg> ctor;
    ExprPtr init;
    SourcePos pos;
};

struct Param
{
    TypeSpec type;
    std::string name;
};

enum class StmtKind
{
    Expr,
    Decl,
    Fespace,  ///< fespace name(args)
    Func,     ///< func name = expr
    FuncDef,  ///< func type name(params) { body }
    Border,   ///< border name(var = a, b) { body }
    Varf,
    Problem,
    Solve,
    If,
    For,
    While,
    Break,
    Continue,
    Return,
    Block,
    Macro,
    Load,
    Empty,
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt
{
    StmtKind kind = StmtKind::Empty;
    SourcePos pos;

    TypeSpec type;                 ///< Decl, FuncDef return type
    std::vector<Declarator> decls; ///< Decl, Func
    std::string name;              ///< Fespace, FuncDef, Border, Varf, Problem, Solve, Macro, Load
    std::vector<Param> params;     ///< FuncDef; Varf/Problem/Solve unknowns; Border variable
    std::vector<Arg> args;         ///< Fespace args; named options; Border range
    ExprPtr expr;                  ///< expression, condition, return value, form body
    ExprPtr step;                  ///< For
    StmtPtr init;                  ///< For
    std::vector<StmtPtr> body;     ///< Block, loops, FuncDef, Border; If: then [, else]
    std::string text;              ///< Macro: raw body; macro parameters live in params
    bool macro_params = false;     ///< Macro written with a parameter list
};

struct Program
{
    std::vector<StmtPtr> statements;
};

bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const Program& a, const Program& b);

} // namespace femscript::dsl
