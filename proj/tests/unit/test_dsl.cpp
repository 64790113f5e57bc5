#include <doctest.h>

#include "femscript/dsl/interpreter.hpp"
#include "femscript/dsl/parser.hpp"
#include "femscript/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <unistd.h>

using namespace femscript;
using namespace femscript::dsl;
namespace fs = std::filesystem;

namespace
{

const fs::path corpus = FEMSCRIPT_CORPUS_DIR;

std::string read_text(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Copy of the corpus in a scratch directory, so scripts may write files.
struct Sandbox
{
    fs::path dir = fs::temp_directory_path() / ("femscript_dsl_" + std::to_string(::getpid()));
    Sandbox()
    {
        fs::remove_all(dir);
        fs::create_directories(dir);
        for(const auto& e : fs::directory_iterator(corpus))
            fs::copy_file(e.path(), dir / e.path().filename());
    }
    ~Sandbox() { fs::remove_all(dir); }
};

struct Run
{
    std::ostringstream out, log;
    std::istringstream in;
    std::unique_ptr<Interpreter> interp;

    explicit Run(const std::string& input = {}, int verbosity = 0) : in(input)
    {
        RunOptions o;
        o.out = &out;
        o.log = &log;
        o.in = &in;
        o.verbosity = verbosity;
        interp = std::make_unique<Interpreter>(o);
    }
    Interpreter* operator->() { return interp.get(); }
};

std::vector<std::string> lexemes(std::string_view src)
{
    std::vector<std::string> out;
    for(const Token& t : tokenize(src).tokens)
        if(t.kind != TokenKind::End)
            out.push_back(t.lexeme);
    return out;
}

void visit(const Expr& e, const std::function<void(const Expr&)>& f)
{
    f(e);
    for(const auto& k : e.kids)
        if(k)
            visit(*k, f);
    for(const auto& a : e.args)
        if(a.value)
            visit(*a.value, f);
}

bool mentions(const Expr& e, const std::string& name)
{
    bool found = false;
    visit(e, [&](const Expr& x) { found = found || (x.kind == ExprKind::Ident && x.text == name); });
    return found;
}

} // namespace

TEST_CASE("tokenizer")
{
    CHECK(lexemes("int a=1;") == std::vector<std::string>{"int", "a", "=", "1", ";"});
    const auto t = tokenize("1.+3i").tokens;
    REQUIRE(t.size() == 4);
    CHECK(t[0].kind == TokenKind::Real);
    CHECK(t[2].kind == TokenKind::Imaginary);
    CHECK(t[2].lexeme == "3");
    CHECK(lexemes("a // comment\n/* block\n */ b") == std::vector<std::string>{"a", "b"});
    CHECK(lexemes("x<=y&&z") == std::vector<std::string>{"x", "<=", "y", "&&", "z"});
    CHECK(tokenize("\"a\\nb\"").tokens[0].lexeme == "a\nb");
    CHECK_THROWS_AS(tokenize("\"open"), ParseError);
    CHECK_THROWS_AS(tokenize("/* open"), ParseError);
    CHECK_THROWS_AS(tokenize("a @ b"), ParseError);
}

TEST_CASE("macro expansion")
{
    auto expanded = [](std::string_view src) {
        std::string s;
        for(const Token& t : expand_source(src))
            if(t.kind != TokenKind::End && t.kind != TokenKind::MacroDef)
                s += token_text(t) + " ";
        return s;
    };
    CHECK(expanded("macro Grad(u)[dx(u),dy(u)]//\nGrad(w)") == "[ dx ( w ) , dy ( w ) ] ");
    CHECK(expanded("macro F(t,u,v)[t*dx(u),t*dy(v)]//\nF(3,a,b)[0]") ==
          "[ 3 * dx ( a ) , 3 * dy ( b ) ] [ 0 ] ");
    CHECK(expanded("macro two 2 //\ntwo*two") == "2 * 2 ");
    CHECK(expanded("macro cat(a,b) a#b //\ncat(u,1)") == "u1 ");
    CHECK_THROWS_AS(expand_source("macro G(u)[dx(u)]//\nG(a,b)"), ParseError);
    CHECK_THROWS_AS(expand_source("macro G(u) u"), ParseError);
}

TEST_CASE("syntax errors carry the line")
{
    try
    {
        parse_source("int a;\nfor(;;) a++;");
        FAIL("expected a parse error");
    }
    catch(const ParseError& e)
    {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_source("real x = ;"), ParseError);
    CHECK_THROWS_AS(parse_source("{ int a;"), ParseError);
}

TEST_CASE("the Poisson solve statement has one bilinear, one linear and one Dirichlet part")
{
    const Program p = parse_source(read_text(corpus / "solve_poisson.edp"));
    const auto it = std::find_if(p.statements.begin(), p.statements.end(),
                                 [](const StmtPtr& s) { return s->kind == StmtKind::Solve; });
    REQUIRE(it != p.statements.end());
    const Stmt& s = **it;
    CHECK(s.name == "poisson");
    REQUIRE(s.params.size() == 2);
    int bilinear = 0, linear = 0, on = 0;
    visit(*s.expr, [&](const Expr& e) {
        if(e.kind != ExprKind::Call || e.kids.empty())
            return;
        const Expr& callee = *e.kids[0];
        if(callee.kind == ExprKind::Ident && callee.text == "on")
            ++on;
        if(callee.kind == ExprKind::Call && callee.kids[0]->text == "int2d")
        {
            const Expr& integrand = *e.args.at(0).value;
            if(mentions(integrand, s.params[0].name))
                ++bilinear;
            else
                ++linear;
        }
    });
    CHECK(bilinear == 1);
    CHECK(linear == 1);
    CHECK(on == 1);
}

TEST_CASE("printing and reparsing the corpus gives the same program")
{
    for(const auto& e : fs::directory_iterator(corpus))
    {
        if(e.path().extension() != ".edp")
            continue;
        CAPTURE(e.path().filename().string());
        const Program p = parse_source(read_text(e.path()));
        const std::string printed = print(p);
        const Program q = parse_source(printed);
        CHECK(equal(p, q));
        CHECK(print(q) == printed);
    }
}

TEST_CASE("every corpus script runs")
{
    Sandbox box;
    for(const auto& e : fs::directory_iterator(box.dir))
    {
        if(e.path().extension() != ".edp")
            continue;
        CAPTURE(e.path().filename().string());
        Run r("7\n");
        CHECK(r->run_file(e.path()) == 0);
    }
}

TEST_CASE("script values")
{
    Sandbox box;
    auto run = [&](const char* name, const std::string& input = {}) {
        auto r = std::make_unique<Run>(input);
        (*r)->run_file(box.dir / name);
        return r;
    };

    auto arrays = run("arrays.edp");
    CHECK((*arrays)->number("u1pu2") == 20.0);
    CHECK((*arrays)->number("trA") == 20.0);
    CHECK((*arrays)->number("detA") == 5.0);
    CHECK((*arrays)->array("u1du2") == std::vector<double>{0.5, 2.0 / 3.0, 0.75});
    CHECK((*arrays)->array("U") == std::vector<double>{1, 3, 5, 7, 9});
    CHECK((*arrays)->number("U2") == 5.0);
    CHECK((*arrays)->number("B12") == 4.0);

    CHECK((*run("loops.edp"))->number("sum") == 55.0);
    auto w = run("while_loop.edp");
    CHECK((*w)->number("sum") == 55.0);
    CHECK((*w)->number("i") == 11.0);

    auto types = run("types.edp");
    CHECK((*types)->string("test") == "toto");
    CHECK((*types)->number("sumV") == 2.5);

    auto fn = run("functions.edp");
    CHECK((*fn)->number("u0at") == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((*fn)->number("u1at") == 1.0);
    CHECK((*fn)->number("g12") == 3.0);
    CHECK((*fn)->number("fnu") == doctest::Approx(2.5).epsilon(1e-13));

    auto mac = run("macros.edp");
    CHECK((*mac)->number("first") == doctest::Approx(3.0).epsilon(1e-13));
    CHECK((*mac)->number("second") == doctest::Approx(3.0).epsilon(1e-13));
    CHECK((*mac)->number("divuv") == doctest::Approx(2.0).epsilon(1e-13));
    CHECK((*mac)->number("twice") == 4.0);
    // |grad(xy)|^2 = x^2 + y^2 integrates to 2/3, up to interpolation error
    CHECK((*mac)->number("gradw") == doctest::Approx(2.0 / 3.0).epsilon(0.05));

    auto fe = run("fespaces.edp");
    CHECK((*fe)->number("nv") == 25.0);
    CHECK((*fe)->number("nt") == 32.0);

    CHECK((*run("rectangle.edp"))->number("area") == doctest::Approx(20.0).epsilon(1e-12));
    auto sq = run("square.edp");
    CHECK((*sq)->number("area1") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK((*sq)->number("area2") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fs::exists(box.dir / "Name.msh"));

    auto hole = run("hole.edp");
    const double full = *(*hole)->number("full"), holed = *(*hole)->number("holed");
    CHECK(full == doctest::Approx(std::numbers::pi).epsilon(0.01));
    CHECK(full - holed == doctest::Approx(std::numbers::pi * 0.09).epsilon(0.03));
    CHECK(fs::exists(box.dir / "Thwithhole.eps"));

    auto streams = run("streams.edp", "42\n");
    CHECK((*streams)->number("i") == 42.0);
    CHECK(streams->out.str().find(" enter i= ? ") != std::string::npos);
    CHECK(fs::exists(box.dir / "toto.txt"));

    run("exports.edp");
    CHECK(read_text(box.dir / "plot.gnu") == "0 0\n1 1\n2 4\n3 9\n4 16\n");
    CHECK(read_text(box.dir / "solution.bb").rfind("2 1 1 25 2 \n", 0) == 0);
    CHECK(fs::exists(box.dir / "uhsol.1000.txt"));

    auto boundary = run("boundary.edp");
    CHECK(*(*boundary)->number("umax") > 0.0);
}

TEST_CASE("solve, problem and varf paths agree bit for bit")
{
    Sandbox box;
    Run s, p, v, raw;
    s->run_file(box.dir / "solve_poisson.edp");
    p->run_file(box.dir / "problem_poisson.edp");
    v->run_file(box.dir / "varf_poisson_on.edp");
    raw->run_file(box.dir / "varf_poisson.edp");
    const auto us = *s->array("uh"), up = *p->array("uh"), uv = *v->array("uh"), ur = *raw->array("uh");
    CHECK(us == up);
    CHECK(us == uv);

    // Without on() in the right-hand side the boundary values differ by
    // F_i / tgv; interior values are identical.
    const auto mesh = raw->mesh("Th");
    REQUIRE(mesh);
    double boundary_gap = 0.0;
    for(int i = 0; i < mesh->nv(); ++i)
    {
        if(mesh->vertices()[i].label == 0)
            CHECK(ur[i] == us[i]);
        else
            boundary_gap = std::max(boundary_gap, std::abs(ur[i] - us[i]));
    }
    CHECK(boundary_gap < 1e-30);

    const double umax = *std::max_element(ur.begin(), ur.end());
    CHECK(std::abs(umax - 0.0737) <= 0.002);
}

TEST_CASE("exec is skipped unless allowed")
{
    Run r({}, 1);
    CHECK(r->run_source("int rc = exec(\"echo hi\");") == 0);
    CHECK(r->number("rc") == 0.0);
    CHECK(r.out.str().empty());
    CHECK(r.log.str().find("exec skipped") != std::string::npos);
}

TEST_CASE("runtime errors name the line")
{
    Run r;
    try
    {
        r->run_source("int a = 1;\nreal[int] v(3);\nreal b = v[7];");
        FAIL("expected a script error");
    }
    catch(const ScriptError& e)
    {
        CHECK(e.line() == 3);
    }
    Run q;
    CHECK_THROWS_AS(q->run_source("real z = undefinedname + 1;"), ScriptError);
    Run m;
    CHECK_THROWS_AS(m->run_file("/nonexistent/missing.edp"), IoError);
}
