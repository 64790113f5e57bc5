#pragma once

#include "femscript/fespace.hpp"
#include "femscript/field.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace femscript
{

struct ConvergenceRow
{
    int N = 0;
    double h = 0.0;
    std::optional<double> dt;
    double error = 0.0;
    std::optional<double> rate_space;
    std::optional<double> rate_time;
    int iterations = 0; ///< fixed-point iterations or time steps
    double final_residual = 0.0; ///< last fixed-point increment
    bool converged = true;
};

/// r_n = log(E_{n-1}/E_n) / log(s_{n-1}/s_n), one entry per row after the first.
std::vector<double> convergence_rates(std::span<const double> errors, std::span<const double> steps);

/// -Laplace(u) = f on square(N,N), N = 2^(n+4), exact solution sin(pi x) sin(pi y).
std::vector<ConvergenceRow> run_poisson_study(int nref);

/// One row of the Poisson study at resolution N; exposed for tests.
ConvergenceRow poisson_row(int N);

struct FixedPointConfig
{
    double tol = 1e-10;
    int max_iter = 1000;
    double dbc = 0.0;
};

enum class NonlinearProblem
{
    Ellnl,    ///< -Lap u + u^3 = f, u = 0 on the boundary, V = u^2
    EllnlDbc, ///< negated form with u = DBC on the boundary, V = u
};

/// Ingredients of a fixed-point study on the unit disk.
struct NonlinearSpec
{
    std::function<double(double, double)> rhs;
    std::function<double(double, double)> exact;
    double boundary_value = 0.0;
    bool negated = false;      ///< -grad.grad - uVv, as in the DBC variant
    bool square_update = true; ///< V = u^2 when true, V = u otherwise
    double initial = 0.0;      ///< u^0 and V(u^0) start from this constant
};

NonlinearSpec nonlinear_spec(NonlinearProblem problem, double dbc);

struct FixedPointResult
{
    FeFunction u;
    FeFunction exact; ///< P1 interpolant of the exact solution
    int iterations = 0;
    double final_err = 0.0;
    bool converged = false;
    std::vector<double> history; ///< err after each iteration
    double l2_error = 0.0;
};

/// Circle mesh with N border points, then the frozen-coefficient iteration.
FixedPointResult run_fixed_point(const NonlinearSpec& spec, int N, const FixedPointConfig& cfg);
FixedPointResult run_fixed_point(NonlinearProblem problem, int N, const FixedPointConfig& cfg);

std::vector<ConvergenceRow> run_nonlinear_study(NonlinearProblem problem, int nref,
                                                const FixedPointConfig& cfg);

struct ThetaSchemeConfig
{
    double theta = 0.0;
    double mu = 1.0;
    double cfl = 1.0;
    double T = 0.1;
};

/// Time step of the study: CFL-limited below theta = 1/2, h at 1/2, h^2 above.
double theta_time_step(const ThetaSchemeConfig& cfg, double h);

struct HeatRun
{
    FeFunction u;
    double error = 0.0;
    double dt = 0.0;
    double final_time = 0.0;
    int steps = 0;
    std::vector<double> max_norms; ///< sup norm after each step (only when requested)
};

/// Options for a single heat run, mainly for property tests.
struct HeatOptions
{
    bool zero_source = false; ///< f = 0 instead of the manufactured source
    bool record_max_norm = false;
    std::optional<double> dt;  ///< override the dt rule
    std::function<double(double, double)> initial; ///< override u^0
};

HeatRun run_heat(const ThetaSchemeConfig& cfg, int N, const HeatOptions& options = {});
std::vector<ConvergenceRow> run_heat_study(const ThetaSchemeConfig& cfg, int nref);

} // namespace femscript
