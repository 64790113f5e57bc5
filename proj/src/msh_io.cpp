#include "femscript/error.hpp"
#include "femscript/mesh.hpp"
#include "femscript/numfmt.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace femscript
{

namespace
{

struct Token
{
    std::string text;
    int line;
};

class TokenReader
{
public:
    explicit TokenReader(std::istream& in)
    {
        std::string line;
        int lineno = 0;
        while(std::getline(in, line))
        {
            ++lineno;
            std::istringstream ls(line);
            std::string word;
            while(ls >> word)
                tokens_.push_back({word, lineno});
        }
        last_line_ = lineno;
    }

    bool done() const { return pos_ >= tokens_.size(); }
    int line() const { return done() ? last_line_ : tokens_[pos_].line; }

    const Token& next(const char* what)
    {
        if(done())
            throw ParseError(std::string("unexpected end of file, expected ") + what, last_line_);
        return tokens_[pos_++];
    }

    int next_int(const char* what)
    {
        const auto& tok = next(what);
        int value = 0;
        const auto* end = tok.text.data() + tok.text.size();
        const auto res = std::from_chars(tok.text.data(), end, value);
        if(res.ec != std::errc{} || res.ptr != end)
            throw ParseError(std::string("expected integer ") + what + ", got '" + tok.text + "'",
                             tok.line);
        return value;
    }

    double next_real(const char* what)
    {
        const auto& tok = next(what);
        double value = 0.0;
        const auto* end = tok.text.data() + tok.text.size();
        const auto res = std::from_chars(tok.text.data(), end, value);
        if(res.ec != std::errc{} || res.ptr != end)
            throw ParseError(std::string("expected real ") + what + ", got '" + tok.text + "'",
                             tok.line);
        return value;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int last_line_ = 0;
};

} // namespace

void write_msh(std::ostream& out, const Mesh& mesh)
{
    out << mesh.nv() << ' ' << mesh.nt() << ' ' << mesh.nbe() << '\n';
    for(const auto& v : mesh.vertices())
        out << format_real(v.x) << ' ' << format_real(v.y) << ' ' << v.label << '\n';
    for(const auto& t : mesh.triangles())
        out << t.v[0] + 1 << ' ' << t.v[1] + 1 << ' ' << t.v[2] + 1 << ' ' << t.region << '\n';
    for(const auto& e : mesh.edges())
        out << e.v[0] + 1 << ' ' << e.v[1] + 1 << ' ' << e.label << '\n';
}

Mesh read_msh(std::istream& in)
{
    TokenReader rd(in);
    const int header_line = rd.line();
    const int nv = rd.next_int("vertex count");
    const int nt = rd.next_int("triangle count");
    const int ne = rd.next_int("edge count");
    if(nv < 0 || nt < 0 || ne < 0)
        throw ParseError("negative count in header", header_line);

    std::vector<Vertex> verts(static_cast<std::size_t>(nv));
    for(auto& v : verts)
    {
        v.x = rd.next_real("vertex x");
        v.y = rd.next_real("vertex y");
        v.label = rd.next_int("vertex label");
    }
    const auto index = [&](const char* what) {
        const int line = rd.line();
        const int i = rd.next_int(what);
        if(i < 1 || i > nv)
            throw ParseError("vertex index " + std::to_string(i) + " out of range 1.."
                                 + std::to_string(nv),
                             line);
        return i - 1;
    };
    std::vector<Triangle> tris(static_cast<std::size_t>(nt));
    for(auto& t : tris)
    {
        const int line = rd.line();
        for(auto& v : t.v)
            v = index("triangle vertex");
        t.region = rd.next_int("triangle region");
        const auto p = [&](int k) { return Vec2{verts[t.v[k]].x, verts[t.v[k]].y}; };
        const double o = orient2d(p(0), p(1), p(2));
        if(o == 0.0)
            throw ParseError("degenerate triangle", line);
        if(o < 0.0)
            std::swap(t.v[1], t.v[2]);
    }
    std::vector<BoundaryEdge> edges(static_cast<std::size_t>(ne));
    for(auto& e : edges)
    {
        e.v[0] = index("edge vertex");
        e.v[1] = index("edge vertex");
        e.label = rd.next_int("edge label");
    }
    if(!rd.done())
        throw ParseError("header counts disagree with body: unexpected trailing data", rd.line());
    try
    {
        return Mesh(std::move(verts), std::move(tris), std::move(edges));
    }
    catch(const ParseError&)
    {
        throw;
    }
    catch(const Error& e)
    {
        throw ParseError(std::string("invalid mesh: ") + e.what(), 0);
    }
}

void save_msh(const Mesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if(!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_msh(out, mesh);
    if(!out)
        throw IoError("failed writing '" + path.string() + "'");
}

Mesh load_msh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if(!in)
        throw IoError("file not found: '" + path.string() + "'");
    return read_msh(in);
}

} // namespace femscript
