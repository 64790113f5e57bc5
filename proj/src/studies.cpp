#include "femscript/studies.hpp"

#include "femscript/error.hpp"
#include "femscript/forms.hpp"
#include "femscript/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace femscript
{

namespace
{

constexpr double pi = std::numbers::pi;

/// Reads a P1 function without taking ownership; the function must outlive the field.
Field view(const FeFunction& u)
{
    return Field(Field::Fn([&u](const EvalPoint& p) { return u.value(p); }));
}

double l2_distance(const FeFunction& a, const FeFunction& b)
{
    const Mesh& mesh = a.space().mesh();
    const Field diff(Field::Fn([&](const EvalPoint& p) {
        const double d = a.value(p) - b.value(p);
        return d * d;
    }));
    return std::sqrt(integrate_2d(mesh, diff));
}

std::shared_ptr<const FeSpace> p1_space(Mesh mesh)
{
    return std::make_shared<const FeSpace>(std::make_shared<const Mesh>(std::move(mesh)), Element::P1);
}

Field stiffness_coef(double s) { return Field(s); }

void append_stiffness(VarForm& form, const Field& coef, QuadRule quad = QuadRule::Default)
{
    form.bilinear.push_back({{Integral::Area, {}, quad}, Op::Dx, Op::Dx, coef});
    form.bilinear.push_back({{Integral::Area, {}, quad}, Op::Dy, Op::Dy, coef});
}

void fill_rates(std::vector<ConvergenceRow>& rows, bool with_time)
{
    std::vector<double> errors, hs, dts;
    for(const auto& r : rows)
    {
        errors.push_back(r.error);
        hs.push_back(r.h);
        if(r.dt)
            dts.push_back(*r.dt);
    }
    if(rows.size() < 2)
        return;
    const auto rs = convergence_rates(errors, hs);
    for(std::size_t i = 1; i < rows.size(); ++i)
        rows[i].rate_space = rs[i - 1];
    if(with_time)
    {
        const auto rt = convergence_rates(errors, dts);
        for(std::size_t i = 1; i < rows.size(); ++i)
            rows[i].rate_time = rt[i - 1];
    }
}

} // namespace

std::vector<double> convergence_rates(std::span<const double> errors, std::span<const double> steps)
{
    if(errors.size() != steps.size())
        throw InvalidArgument("convergence rates: errors and steps differ in length");
    if(errors.size() < 2)
        throw InvalidArgument("convergence rates: need at least two entries");
    std::vector<double> out;
    for(std::size_t n = 1; n < errors.size(); ++n)
    {
        if(!(errors[n - 1] > 0.0) || !(errors[n] > 0.0))
            throw NumericError("convergence rate undefined for a zero error");
        if(!(steps[n - 1] > 0.0) || !(steps[n] > 0.0) || steps[n - 1] == steps[n])
            throw NumericError("convergence rate undefined for these step sizes");
        out.push_back(std::log(errors[n - 1] / errors[n]) / std::log(steps[n - 1] / steps[n]));
    }
    return out;
}

ConvergenceRow poisson_row(int N)
{
    const auto space = p1_space(build_square(N, N));
    const FeFunction uex =
        interpolate(space, Field::xy([](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); }));
    const FeFunction f = interpolate(space, Field::xy([](double x, double y) {
        return 0.2e1 * std::sin(pi * x) * pi * pi * std::sin(pi * y);
    }));

    VarForm a;
    append_stiffness(a, stiffness_coef(1.0));
    a.dirichlet.push_back({{1, 2, 3, 4}, Field(0.0)});
    VarForm l;
    l.linear.push_back({{}, Op::Value, view(f)});

    const SparseMatrix A = assemble_bilinear(a, *space, *space);
    const auto F = assemble_linear(l, *space);
    const FeFunction uh(space, solve_lu(A, F));

    ConvergenceRow row;
    row.N = N;
    row.h = 1.0 / N;
    row.error = l2_distance(uh, uex);
    return row;
}

std::vector<ConvergenceRow> run_poisson_study(int nref)
{
    if(nref < 1)
        throw InvalidArgument("poisson study: nref must be at least 1");
    std::vector<ConvergenceRow> rows;
    for(int n = 0; n < nref; ++n)
        rows.push_back(poisson_row(1 << (n + 4)));
    fill_rates(rows, false);
    return rows;
}

NonlinearSpec nonlinear_spec(NonlinearProblem problem, double dbc)
{
    NonlinearSpec s;
    if(problem == NonlinearProblem::Ellnl)
    {
        s.exact = [](double x, double y) { return std::sin(x * x + y * y - 1); };
        s.rhs = [](double x, double y) {
            const double r = x * x + y * y - 1;
            return 0.4e1 * std::sin(r) * (x * x) - 0.4e1 * std::cos(r) + 0.4e1 * std::sin(r) * (y * y)
                   + std::sin(r) - std::sin(r) * std::pow(std::cos(r), 2);
        };
        s.boundary_value = 0.0;
        s.negated = false;
        s.square_update = true;
        s.initial = 0.0;
    }
    else
    {
        s.exact = [dbc](double x, double y) { return dbc + std::sin(x * x + y * y - 1); };
        s.rhs = [dbc](double x, double y) {
            const double r = x * x + y * y - 1;
            return -0.4e1 * std::sin(r) * (x * x) + 0.4e1 * std::cos(r) - 0.4e1 * std::sin(r) * (y * y)
                   - std::pow(dbc + std::sin(r), 2);
        };
        s.boundary_value = dbc;
        s.negated = true;
        s.square_update = false;
        s.initial = dbc;
    }
    return s;
}

FixedPointResult run_fixed_point(const NonlinearSpec& spec, int N, const FixedPointConfig& cfg)
{
    if(N < 3)
        throw InvalidArgument("fixed point: need at least 3 border points");
    if(!(cfg.tol > 0.0))
        throw InvalidArgument("fixed point: tolerance must be positive");
    const Border circle{"C", [](double t) { return Vec2{std::cos(t), std::sin(t)}; }, 0.0, 2.0 * pi, N, 1};
    const auto space = p1_space(build_from_borders(std::span<const Border>(&circle, 1)));

    const FeFunction f = interpolate(space, Field::xy(spec.rhs));
    FeFunction uex = interpolate(space, Field::xy(spec.exact));
    FeFunction prev = interpolate(space, Field(spec.initial));
    FeFunction V = interpolate(space, Field(spec.square_update ? spec.initial * spec.initial : spec.initial));
    FeFunction uh(space);

    const double sign = spec.negated ? -1.0 : 1.0;
    VarForm form;
    append_stiffness(form, stiffness_coef(sign));
    form.bilinear.push_back({{}, Op::Value, Op::Value,
                             Field(Field::Fn([&V, sign](const EvalPoint& p) { return sign * V.value(p); }))});
    form.linear.push_back({{}, Op::Value, view(f)});
    form.dirichlet.push_back({{1}, Field(spec.boundary_value)});

    FixedPointResult res{uh, uex, 0, 0.0, false, {}, 0.0};
    double err = 1.0;
    while(err >= cfg.tol)
    {
        if(res.iterations >= cfg.max_iter)
            break;
        const SparseMatrix A = assemble_bilinear(form, *space, *space);
        const auto b = assemble_linear(form, *space);
        uh.dofs() = solve_lu(A, b);
        err = l2_distance(uh, prev);
        res.history.push_back(err);
        ++res.iterations;
        for(int i = 0; i < space->ndof(); ++i)
        {
            const double u = uh.dofs()[i];
            V.dofs()[i] = spec.square_update ? u * u : u;
        }
        prev.dofs() = uh.dofs();
    }
    res.u = uh;
    res.final_err = err;
    res.converged = err < cfg.tol;
    res.l2_error = l2_distance(uh, uex);
    return res;
}

FixedPointResult run_fixed_point(NonlinearProblem problem, int N, const FixedPointConfig& cfg)
{
    return run_fixed_point(nonlinear_spec(problem, cfg.dbc), N, cfg);
}

std::vector<ConvergenceRow> run_nonlinear_study(NonlinearProblem problem, int nref,
                                                const FixedPointConfig& cfg)
{
    if(nref < 1)
        throw InvalidArgument("nonlinear study: nref must be at least 1");
    std::vector<ConvergenceRow> rows;
    for(int n = 0; n < nref; ++n)
    {
        const int N = 1 << (n + 4);
        const auto r = run_fixed_point(problem, N, cfg);
        ConvergenceRow row;
        row.N = N;
        row.h = 1.0 / N;
        row.error = r.l2_error;
        row.iterations = r.iterations;
        row.final_residual = r.final_err;
        row.converged = r.converged;
        rows.push_back(row);
    }
    fill_rates(rows, false);
    return rows;
}

double theta_time_step(const ThetaSchemeConfig& cfg, double h)
{
    if(cfg.theta < .5)
        return cfg.cfl * h * h / 4. / (1. - 2. * cfg.theta) / cfg.mu;
    if(cfg.theta == .5)
        return h;
    return h * h;
}

HeatRun run_heat(const ThetaSchemeConfig& cfg, int N, const HeatOptions& options)
{
    if(!(cfg.theta >= 0.0 && cfg.theta <= 1.0))
        throw InvalidArgument("heat: theta must lie in [0, 1]");
    if(!(cfg.mu > 0.0))
        throw InvalidArgument("heat: mu must be positive");
    if(!(cfg.T >= 0.0))
        throw InvalidArgument("heat: final time must be non-negative");
    if(N < 1)
        throw InvalidArgument("heat: N must be positive");

    const double theta = cfg.theta, mu = cfg.mu;
    const double h = 1.0 / N;
    const double dt = options.dt ? *options.dt : theta_time_step(cfg, h);
    if(!(dt > 0.0))
        throw InvalidArgument("heat: time step must be positive");

    const auto space = p1_space(build_square(N, N));
    const Mesh& mesh = space->mesh();
    const int n = space->ndof();

    // Lumped mass and stiffness, assembled once.
    VarForm mass;
    mass.bilinear.push_back({{Integral::Area, {}, QuadRule::Lumped}, Op::Value, Op::Value, Field(1.0)});
    VarForm stiff;
    append_stiffness(stiff, Field(1.0), QuadRule::Lumped);
    const std::vector<double> ml = assemble_bilinear(mass, *space, *space).diagonal();
    const SparseMatrix K = assemble_bilinear(stiff, *space, *space);

    VarForm a;
    a.bilinear.push_back({{Integral::Area, {}, QuadRule::Lumped}, Op::Value, Op::Value, Field(1.0 / dt)});
    append_stiffness(a, Field(theta * mu), QuadRule::Lumped);
    a.dirichlet.push_back({{1, 2, 3, 4}, Field(0.0)});
    const SparseMatrix A = assemble_bilinear(a, *space, *space);
    const auto boundary = dirichlet_dofs(*space, a.dirichlet);

    bool diagonal = true;
    for(int i = 0; i < n && diagonal; ++i)
        for(int k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
            if(A.col_indices()[k] != i && A.values()[k] != 0.0)
            {
                diagonal = false;
                break;
            }
    std::optional<LuFactorization> lu;
    if(!diagonal)
        lu.emplace(A);
    const std::vector<double> adiag = A.diagonal();

    std::vector<double> shape(n);
    for(int i = 0; i < n; ++i)
    {
        const double x = mesh.vertices()[i].x, y = mesh.vertices()[i].y;
        shape[i] = std::sin(pi * x) * std::sin(pi * y);
    }
    const auto source = [&](double t, int i) {
        if(options.zero_source)
            return 0.0;
        return shape[i] * std::exp(std::sin(t)) * (std::cos(t) + 0.2e1 * mu * pi * pi);
    };

    HeatRun run{FeFunction(space), 0.0, dt, 0.0, 0, {}};
    run.dt = dt;
    auto& u = run.u.dofs();
    for(int i = 0; i < n; ++i)
    {
        const double x = mesh.vertices()[i].x, y = mesh.vertices()[i].y;
        u[i] = options.initial ? options.initial(x, y) : shape[i] * std::exp(std::sin(0.0));
    }

    std::vector<double> B(n);
    double t = 0.0;
    for(t = 0; t <= cfg.T; t += dt)
    {
        const auto ku = K.multiply(u);
        for(int i = 0; i < n; ++i)
            B[i] = ml[i] * (u[i] / dt + source(t + dt, i) * theta + source(t, i) * (1. - theta))
                   - (1. - theta) * mu * ku[i];
        for(const auto& [i, g] : boundary)
            B[i] = g * kDefaultTgv;
        if(diagonal)
            for(int i = 0; i < n; ++i)
                u[i] = B[i] / adiag[i];
        else
            u = lu->solve(B);
        ++run.steps;
        if(options.record_max_norm)
        {
            double m = 0.0;
            for(double v : u)
                m = std::max(m, std::abs(v));
            run.max_norms.push_back(m);
        }
    }
    run.final_time = t;

    // The exact solution is not polynomial; the edge-midpoint rule would add
    // an O(h^2) quadrature error of the same size as the discretisation error.
    const double tf = t;
    const Field err2(Field::Fn([&](const EvalPoint& p) {
        const double ex = options.zero_source ? 0.0
                                              : std::sin(pi * p.x) * std::sin(pi * p.y) * std::exp(std::sin(tf));
        const double d = std::abs(run.u.value(p) - ex);
        return d * d;
    }));
    run.error = options.zero_source ? 0.0 : std::sqrt(integrate_2d(mesh, err2, QuadRule::Degree5));
    return run;
}

std::vector<ConvergenceRow> run_heat_study(const ThetaSchemeConfig& cfg, int nref)
{
    if(nref < 1)
        throw InvalidArgument("heat study: nref must be at least 1");
    std::vector<ConvergenceRow> rows;
    for(int n = 0; n < nref; ++n)
    {
        const int N = 1 << (n + 4);
        const auto r = run_heat(cfg, N);
        ConvergenceRow row;
        row.N = N;
        row.h = 1.0 / N;
        row.dt = r.dt;
        row.error = r.error;
        row.iterations = r.steps;
        rows.push_back(row);
    }
    fill_rates(rows, true);
    return rows;
}

} // namespace femscript
