#include "femscript/dsl/interpreter.hpp"
#include "femscript/error.hpp"
#include "femscript/mesh.hpp"
#include "femscript/studies.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

namespace py = pybind11;
using namespace femscript;

namespace
{

py::dict row_to_dict(const ConvergenceRow& r)
{
    py::dict d;
    d["N"] = r.N;
    d["h"] = r.h;
    d["dt"] = r.dt;
    d["error"] = r.error;
    d["rate_space"] = r.rate_space;
    d["rate_time"] = r.rate_time;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    return d;
}

py::list rows_to_list(const std::vector<ConvergenceRow>& rows)
{
    py::list out;
    for(const auto& r : rows)
        out.append(row_to_dict(r));
    return out;
}

/// Interpreter that keeps what the script prints.
class Session
{
public:
    explicit Session(int verbosity, const std::string& input) : in_(input)
    {
        dsl::RunOptions o;
        o.verbosity = verbosity;
        o.out = &out_;
        o.log = &log_;
        o.in = &in_;
        interp_ = std::make_unique<dsl::Interpreter>(o);
    }

    int run_source(const std::string& src)
    {
        py::gil_scoped_release release;
        return interp_->run_source(src);
    }
    int run_file(const std::filesystem::path& p)
    {
        py::gil_scoped_release release;
        return interp_->run_file(p);
    }
    std::optional<double> number(const std::string& n) const { return interp_->number(n); }
    std::optional<std::string> string(const std::string& n) const { return interp_->string(n); }
    std::optional<std::vector<double>> array(const std::string& n) const { return interp_->array(n); }
    std::shared_ptr<const Mesh> mesh(const std::string& n) const { return interp_->mesh(n); }
    std::string output() const { return out_.str(); }
    std::string log() const { return log_.str(); }

private:
    std::ostringstream out_, log_;
    std::istringstream in_;
    std::unique_ptr<dsl::Interpreter> interp_;
};

} // namespace

PYBIND11_MODULE(_femscript, m)
{
    m.doc() = "P1 finite elements on triangles with a FreeFem-style script interpreter";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<dsl::ScriptError>(m, "ScriptError", error.ptr());
    py::register_exception<OutOfDomain>(m, "OutOfDomain", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());

    py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
        .def_static("square", [](int mx, int ny) { return std::make_shared<Mesh>(build_square(mx, ny)); },
                    py::arg("m"), py::arg("n"))
        .def_static("load", [](const std::filesystem::path& p) { return std::make_shared<Mesh>(load_msh(p)); })
        .def("save", [](const Mesh& self, const std::filesystem::path& p) { save_msh(self, p); })
        .def_property_readonly("nv", &Mesh::nv)
        .def_property_readonly("nt", &Mesh::nt)
        .def_property_readonly("nbe", &Mesh::nbe)
        .def_property_readonly("area", &Mesh::total_area)
        .def_property_readonly("labels", &Mesh::labels)
        .def("vertices",
             [](const Mesh& self) {
                 std::vector<std::tuple<double, double, int>> out;
                 for(const auto& v : self.vertices())
                     out.emplace_back(v.x, v.y, v.label);
                 return out;
             })
        .def("triangles", [](const Mesh& self) {
            std::vector<std::array<int, 3>> out;
            for(const auto& t : self.triangles())
                out.push_back(t.v);
            return out;
        });

    m.def(
        "circle_mesh",
        [](int n, double r) {
            const Border b{"C", [r](double t) { return Vec2{r * std::cos(t), r * std::sin(t)}; }, 0.0,
                           2.0 * std::numbers::pi, n, 1};
            return std::make_shared<Mesh>(build_from_borders(std::span(&b, 1)));
        },
        py::arg("n"), py::arg("radius") = 1.0, "Disk mesh with n boundary points");

    py::class_<Session>(m, "Interpreter")
        .def(py::init<int, const std::string&>(), py::arg("verbosity") = 0, py::arg("stdin") = "")
        .def("run", &Session::run_source, py::arg("source"), "Run script text; returns the exit code")
        .def("run_file", &Session::run_file, py::arg("path"))
        .def("number", &Session::number)
        .def("string", &Session::string)
        .def("array", &Session::array)
        .def("mesh", [](const Session& s, const std::string& n) {
            auto p = s.mesh(n);
            return p ? std::make_shared<Mesh>(*p) : nullptr;
        })
        .def_property_readonly("output", &Session::output)
        .def_property_readonly("log", &Session::log);

    m.def("convergence_rates", [](const std::vector<double>& e, const std::vector<double>& s) {
        return convergence_rates(e, s);
    });
    m.def(
        "poisson_study", [](int nref) { return rows_to_list(run_poisson_study(nref)); }, py::arg("nref") = 4);
    m.def(
        "nonlinear_study",
        [](int nref, std::optional<double> dbc) {
            FixedPointConfig cfg;
            cfg.dbc = dbc.value_or(0.0);
            return rows_to_list(
                run_nonlinear_study(dbc ? NonlinearProblem::EllnlDbc : NonlinearProblem::Ellnl, nref, cfg));
        },
        py::arg("nref") = 4, py::arg("dbc") = py::none());
    m.def(
        "heat_study",
        [](double theta, int nref, double cfl, double T, double mu) {
            ThetaSchemeConfig cfg;
            cfg.theta = theta;
            cfg.cfl = cfl;
            cfg.T = T;
            cfg.mu = mu;
            return rows_to_list(run_heat_study(cfg, nref));
        },
        py::arg("theta") = 0.0, py::arg("nref") = 3, py::arg("cfl") = 1.0, py::arg("T") = 0.1, py::arg("mu") = 1.0);
}
