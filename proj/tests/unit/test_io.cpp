#include <doctest.h>

#include "femscript/error.hpp"
#include "femscript/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace femscript;
namespace fs = std::filesystem;

namespace
{

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for(std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

struct TempDir
{
    fs::path path = fs::temp_directory_path() / ("femscript_io_" + std::to_string(::getpid()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

FeFunction p1_function(Mesh mesh, Field f)
{
    auto space = std::make_shared<FeSpace>(std::make_shared<const Mesh>(std::move(mesh)), Element::P1);
    return interpolate(space, f);
}

} // namespace

TEST_CASE("gnuplot series")
{
    TempDir tmp;
    const std::vector<double> xs{0, 1}, ys{2, 3};
    export_gnu(xs, ys, tmp.path / "a.gnu");
    CHECK(slurp(tmp.path / "a.gnu") == "0 2\n1 3\n");

    export_gnu(std::vector<double>{}, std::vector<double>{}, tmp.path / "empty.gnu");
    CHECK(slurp(tmp.path / "empty.gnu").empty());

    std::vector<double> sx, sy;
    for(int i = 0; i <= 50; ++i)
    {
        sx.push_back(i * 0.1);
        sy.push_back(std::sin(i * 0.1));
    }
    export_gnu(sx, sy, tmp.path / "sin.gnu");
    std::ifstream in(tmp.path / "sin.gnu");
    for(std::size_t i = 0; i < sx.size(); ++i)
    {
        double x = 0, y = 0;
        in >> x >> y;
        CHECK(std::abs(x - sx[i]) <= 1e-12);
        CHECK(std::abs(y - sy[i]) <= 1e-12);
    }

    CHECK_THROWS_AS(export_gnu(xs, std::vector<double>{1.0}, tmp.path / "bad.gnu"), InvalidArgument);
    CHECK_THROWS_AS(export_gnu(xs, ys, tmp.path / "missing" / "dir" / "x.gnu"), IoError);
}

TEST_CASE("Matlab bb file")
{
    TempDir tmp;
    const auto u = p1_function(build_square(1, 1), 1.0);
    export_bb(u, tmp.path / "u.bb");
    const auto lines = lines_of(slurp(tmp.path / "u.bb"));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "2 1 1 4 2");
    for(std::size_t i = 1; i < lines.size(); ++i)
        CHECK(lines[i] == "1");

    const auto v = p1_function(build_square(5, 4), Field::xy([](double x, double y) { return x * x - y / 3; }));
    export_bb(v, tmp.path / "v.bb");
    std::ifstream in(tmp.path / "v.bb");
    int a, b, c, ndof, d;
    in >> a >> b >> c >> ndof >> d;
    CHECK(ndof == v.space().ndof());
    CHECK(read_dofs(in, ndof) == v.dofs());

    auto p0 = std::make_shared<FeSpace>(std::make_shared<const Mesh>(build_square(1, 1)), Element::P0);
    CHECK_THROWS_AS(export_bb(interpolate(p0, 1.0), tmp.path / "p0.bb"), Unsupported);
}

TEST_CASE("Mathematica text blocks")
{
    const auto u = p1_function(build_square(1, 1), Field::xy([](double x, double y) { return x + 10 * y; }));
    std::ostringstream out;
    write_mathematica_txt(out, u);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 10);
    for(int block = 0; block < 2; ++block)
    {
        CHECK(lines[block * 5] == lines[block * 5 + 3]);
        CHECK(lines[block * 5 + 4].empty());
        for(int k = 0; k < 4; ++k)
        {
            std::istringstream row(lines[block * 5 + k]);
            double x, y, v;
            row >> x >> y >> v;
            CHECK(v == doctest::Approx(x + 10 * y).epsilon(1e-15));
        }
    }
}

TEST_CASE("DOF files round trip exactly")
{
    TempDir tmp;
    const auto u = p1_function(build_square(4, 4), Field::xy([](double x, double y) { return std::exp(x) / (1 + y); }));
    export_dof_txt(u.dofs(), tmp.path / "u.txt");
    CHECK(import_dof_txt(tmp.path / "u.txt", u.dofs().size()) == u.dofs());
    CHECK_THROWS_AS(import_dof_txt(tmp.path / "nope.txt", 3), IoError);

    export_bb(u, tmp.path / "u.bb");
    std::ifstream in(tmp.path / "u.bb");
    std::string header;
    std::getline(in, header);
    CHECK(read_dofs(in, u.dofs().size()) == import_dof_txt(tmp.path / "u.txt", u.dofs().size()));
}

TEST_CASE("exporters are deterministic")
{
    const auto u = p1_function(build_square(3, 3), Field::xy([](double x, double y) { return std::sin(x + y); }));
    std::ostringstream a, b;
    write_mathematica_txt(a, u);
    write_mathematica_txt(b, u);
    CHECK(a.str() == b.str());

    TempDir tmp;
    write_eps(u.space().mesh(), &u, tmp.path / "u.eps", "caption");
    const std::string eps = slurp(tmp.path / "u.eps");
    CHECK(eps.rfind("%!PS-Adobe", 0) == 0);
}
