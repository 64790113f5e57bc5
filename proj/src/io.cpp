#include "femscript/io.hpp"

#include "femscript/error.hpp"
#include "femscript/numfmt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace femscript
{
namespace
{

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if(!out)
        throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if(!out)
        throw IoError("write to " + path.string() + " failed");
}

void require_p1(const FeFunction& u, const char* what)
{
    if(u.space().element() != Element::P1)
        throw Unsupported(std::string(what) + " export needs a P1 function");
}

// Blue (low) through green to red (high), quantised to 64 steps.
std::array<double, 3> colormap(double s)
{
    const int step = std::clamp(static_cast<int>(s * 64.0), 0, 63);
    const double t = step / 63.0;
    const double r = std::clamp(2.0 * t - 0.5, 0.0, 1.0);
    const double g = 1.0 - std::abs(2.0 * t - 1.0);
    const double b = std::clamp(1.5 - 2.0 * t, 0.0, 1.0);
    return {r, g, b};
}

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

void check_lengths(std::span<const double> xs, std::span<const double> ys)
{
    if(xs.size() != ys.size())
        throw InvalidArgument("gnu export: " + std::to_string(xs.size()) + " x values but " +
                              std::to_string(ys.size()) + " y values");
}

} // namespace

void write_gnu(std::ostream& out, std::span<const double> xs, std::span<const double> ys)
{
    check_lengths(xs, ys);
    for(std::size_t i = 0; i < xs.size(); ++i)
        out << format_real(xs[i]) << ' ' << format_real(ys[i]) << '\n';
}

void write_bb(std::ostream& out, const FeFunction& u)
{
    require_p1(u, "bb");
    out << "2 1 1 " << u.space().ndof() << " 2\n";
    for(double v : u.dofs())
        out << format_real(v) << '\n';
}

void write_mathematica_txt(std::ostream& out, const FeFunction& u)
{
    require_p1(u, "Mathematica");
    const FeSpace& space = u.space();
    const Mesh& mesh = space.mesh();
    for(int t = 0; t < mesh.nt(); ++t)
    {
        for(int j = 0; j < 4; ++j)
        {
            const int l = j % 3;
            const Vec2 p = mesh.corner(t, l);
            out << format_real(p.x) << ' ' << format_real(p.y) << ' ' << format_real(u.dofs()[space.dof(t, l)])
                << '\n';
        }
        out << '\n';
    }
}

void export_gnu(std::span<const double> xs, std::span<const double> ys, const std::filesystem::path& path)
{
    check_lengths(xs, ys);
    auto out = open_out(path);
    write_gnu(out, xs, ys);
    finish(out, path);
}

void export_bb(const FeFunction& u, const std::filesystem::path& path)
{
    require_p1(u, "bb");
    auto out = open_out(path);
    write_bb(out, u);
    finish(out, path);
}

void export_mathematica_txt(const FeFunction& u, const std::filesystem::path& path)
{
    require_p1(u, "Mathematica");
    auto out = open_out(path);
    write_mathematica_txt(out, u);
    finish(out, path);
}

void export_dof_txt(const std::vector<double>& dofs, const std::filesystem::path& path)
{
    auto out = open_out(path);
    write_dofs(out, dofs);
    finish(out, path);
}

std::vector<double> import_dof_txt(const std::filesystem::path& path, std::size_t expected)
{
    std::ifstream in(path);
    if(!in)
        throw IoError("cannot open " + path.string());
    return read_dofs(in, expected);
}

void write_eps(const Mesh& mesh, const FeFunction* u, const std::filesystem::path& path,
               const std::string& caption)
{
    if(mesh.nt() == 0)
        throw InvalidArgument("eps plot of an empty mesh");
    const auto box = mesh.bounding_box();
    const double w = std::max(box[2] - box[0], 1e-300);
    const double h = std::max(box[3] - box[1], 1e-300);
    const double scale = 500.0 / std::max(w, h);
    const auto px = [&](Vec2 p) { return fixed(50.0 + (p.x - box[0]) * scale) + ' ' + fixed(80.0 + (p.y - box[1]) * scale); };

    double lo = 0.0, hi = 0.0;
    if(u)
    {
        const auto [mn, mx] = std::minmax_element(u->dofs().begin(), u->dofs().end());
        lo = *mn;
        hi = *mx;
    }
    auto out = open_out(path);
    out << "%!PS-Adobe-3.0 EPSF-3.0\n"
        << "%%BoundingBox: 0 0 " << static_cast<int>(std::ceil(100.0 + w * scale)) << ' '
        << static_cast<int>(std::ceil(130.0 + h * scale)) << "\n"
        << "%%Creator: femscript\n%%EndComments\n"
        << "/T { newpath moveto lineto lineto closepath } def\n"
        << "0.2 setlinewidth\n";
    for(int t = 0; t < mesh.nt(); ++t)
    {
        const std::string tri = px(mesh.corner(t, 0)) + ' ' + px(mesh.corner(t, 1)) + ' ' + px(mesh.corner(t, 2));
        if(u)
        {
            double mean = 0.0;
            if(u->space().element() == Element::P1)
                for(int l = 0; l < 3; ++l)
                    mean += u->dofs()[u->space().dof(t, l)] / 3.0;
            else
                mean = u->dofs()[t];
            const auto c = colormap(hi > lo ? (mean - lo) / (hi - lo) : 0.5);
            out << "gsave " << fixed(c[0]) << ' ' << fixed(c[1]) << ' ' << fixed(c[2]) << " setrgbcolor " << tri
                << " T fill grestore\n";
        }
        out << "0 setgray " << tri << " T stroke\n";
    }
    if(!caption.empty())
    {
        std::string safe;
        for(char c : caption)
        {
            if(c == '(' || c == ')' || c == '\\')
                safe += '\\';
            safe += c;
        }
        out << "/Helvetica findfont 12 scalefont setfont 50 40 moveto (" << safe << ") show\n";
    }
    out << "showpage\n%%EOF\n";
    finish(out, path);
}

} // namespace femscript
