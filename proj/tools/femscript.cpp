// femscript command line: run scripts, reproduce the convergence studies,
// inspect meshes.

#include "femscript/dsl/interpreter.hpp"
#include "femscript/error.hpp"
#include "femscript/mesh.hpp"
#include "femscript/numfmt.hpp"
#include "femscript/studies.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace
{

using namespace femscript;

int default_verbosity()
{
    if(const char* env = std::getenv("FEMSCRIPT_VERBOSITY"))
    {
        try
        {
            return std::stoi(env);
        }
        catch(const std::exception&)
        {
            std::cerr << "warning: ignoring FEMSCRIPT_VERBOSITY=" << env << '\n';
        }
    }
    return 2;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_real(*v) : "-"; }

void print_rows(const std::vector<ConvergenceRow>& rows, bool csv, bool with_time)
{
    if(csv)
    {
        std::cout << "N,h,dt,error,rate_space,rate_time,iterations\n";
        for(const auto& r : rows)
            std::cout << r.N << ',' << format_real(r.h) << ',' << opt_text(r.dt) << ',' << format_real(r.error) << ','
                      << opt_text(r.rate_space) << ',' << opt_text(r.rate_time) << ',' << r.iterations << '\n';
        return;
    }
    std::cout << "N\terror\t\trate";
    if(with_time)
        std::cout << "\ttime rate";
    std::cout << "\titerations\n";
    for(const auto& r : rows)
    {
        std::cout << r.N << '\t' << format_real(r.error) << '\t' << opt_text(r.rate_space);
        if(with_time)
            std::cout << '\t' << opt_text(r.rate_time);
        std::cout << '\t' << r.iterations << (r.converged ? "" : " (not converged)") << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"FreeFem-style finite element scripting"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Execute a .edp script");
    std::string script;
    int verbosity = default_verbosity();
    bool no_plot_files = false;
    bool allow_exec = false;
    run->add_option("file", script, "Script file")->required();
    run->add_option("--verbosity", verbosity, "Initial value of the verbosity variable");
    run->add_flag("--no-plot-files", no_plot_files, "Do not write plot(..., ps=) files");
    run->add_flag("--allow-exec", allow_exec, "Let exec() run shell commands");

    auto* study = app.add_subcommand("study", "Reproduce a convergence study");
    std::string which;
    int nref = 4;
    std::optional<double> dbc;
    ThetaSchemeConfig heat;
    bool csv = false;
    study->add_option("problem", which, "poisson, ellnl or heat")
        ->required()
        ->check(CLI::IsMember({"poisson", "ellnl", "heat"}));
    study->add_option("--nref", nref, "Number of refinements")->check(CLI::Range(1, 12));
    study->add_option("--dbc", dbc, "ellnl: Dirichlet value of the shifted variant");
    study->add_option("--theta", heat.theta, "heat: scheme parameter")->check(CLI::Range(0.0, 1.0));
    study->add_option("--cfl", heat.cfl, "heat: CFL number");
    study->add_option("--T", heat.T, "heat: final time");
    study->add_option("--mu", heat.mu, "heat: diffusion coefficient");
    study->add_flag("--csv", csv, "Comma separated output");

    auto* info = app.add_subcommand("mesh-info", "Summarise a .msh file");
    std::string mesh_file;
    info->add_option("file", mesh_file, "Mesh file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch(const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch(const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch(const CLI::ParseError& e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        if(*run)
        {
            dsl::RunOptions options;
            options.verbosity = verbosity;
            options.plot_files = !no_plot_files;
            options.allow_exec = allow_exec;
            dsl::Interpreter interp(options);
            return interp.run_file(script);
        }
        if(*study)
        {
            if(which == "poisson")
                print_rows(run_poisson_study(nref), csv, false);
            else if(which == "ellnl")
            {
                FixedPointConfig cfg;
                cfg.dbc = dbc.value_or(0.0);
                print_rows(run_nonlinear_study(dbc ? NonlinearProblem::EllnlDbc : NonlinearProblem::Ellnl, nref, cfg),
                           csv, false);
            }
            else
                print_rows(run_heat_study(heat, nref), csv, true);
            return 0;
        }
        const Mesh mesh = load_msh(mesh_file);
        std::cout << "vertices: " << mesh.nv() << "\ntriangles: " << mesh.nt() << "\nboundary edges: " << mesh.nbe()
                  << "\narea: " << format_real(mesh.total_area()) << "\nlabels:";
        for(int l : mesh.labels())
            std::cout << ' ' << l;
        std::cout << '\n';
        return 0;
    }
    catch(const ParseError& e)
    {
        std::cout.flush();
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch(const std::exception& e)
    {
        std::cout.flush();
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
