#include <doctest.h>

#include "femscript/error.hpp"
#include "femscript/studies.hpp"

#include <algorithm>
#include <cmath>

using namespace femscript;

TEST_CASE("convergence rates")
{
    const double e = 1e-3, h = 0.1;
    const std::vector<double> errs{4 * e, e}, steps{2 * h, h};
    CHECK(convergence_rates(errs, steps)[0] == doctest::Approx(2.0).epsilon(1e-14));

    const std::vector<double> table{0.0047854, 0.00120952}, halved{1.0 / 16, 1.0 / 32};
    CHECK(std::abs(convergence_rates(table, halved)[0] - 1.9842) <= 5e-5);

    const std::vector<double> flat{e, e};
    CHECK(convergence_rates(flat, steps)[0] == 0.0);

    const std::vector<double> zero{e, 0.0};
    CHECK_THROWS_AS(convergence_rates(zero, steps), NumericError);
    CHECK_THROWS_AS(convergence_rates(errs, std::vector<double>{h}), InvalidArgument);
}

TEST_CASE("time step rule")
{
    const double h = 1.0 / 16;
    ThetaSchemeConfig c;
    c.theta = 0.0;
    CHECK(theta_time_step(c, h) == doctest::Approx(h * h / 4));
    c.theta = 0.25;
    c.cfl = 0.5;
    c.mu = 2.0;
    CHECK(theta_time_step(c, h) == doctest::Approx(0.5 * h * h / (4 * 2.0 * 0.5)));
    c.theta = 0.5;
    CHECK(theta_time_step(c, h) == h);
    c.theta = 1.0;
    CHECK(theta_time_step(c, h) == h * h);
}

TEST_CASE("coarse Poisson row")
{
    const auto row = poisson_row(16);
    CHECK(row.N == 16);
    CHECK(row.error == doctest::Approx(0.0047854).epsilon(0.05));
}

TEST_CASE("fixed point with a zero solution")
{
    NonlinearSpec spec;
    spec.rhs = [](double, double) { return 0.0; };
    spec.exact = [](double, double) { return 0.0; };
    const auto r = run_fixed_point(spec, 16, FixedPointConfig{});
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.l2_error == 0.0);
    for(double d : r.u.dofs())
        CHECK(d == 0.0);
}

TEST_CASE("fixed point increments decrease")
{
    const auto r = run_fixed_point(NonlinearProblem::Ellnl, 32, FixedPointConfig{});
    CHECK(r.converged);
    CHECK(r.final_err < 1e-10);
    for(std::size_t k = 4; k < r.history.size(); ++k)
        CHECK(r.history[k] <= r.history[k - 1]);
}

TEST_CASE("implicit Euler without source obeys the maximum principle")
{
    ThetaSchemeConfig c;
    c.theta = 1.0;
    HeatOptions o;
    o.zero_source = true;
    o.record_max_norm = true;
    o.initial = [](double x, double y) { return x * (1 - x) * y * (1 - y) * 16; };
    const auto r = run_heat(c, 8, o);
    REQUIRE(!r.max_norms.empty());
    double prev = 1.0;
    for(double m : r.max_norms)
    {
        CHECK(m <= prev + 1e-14);
        prev = m;
    }
}

TEST_CASE("heat step count and stability")
{
    ThetaSchemeConfig c;
    c.theta = 0.5;
    const auto r = run_heat(c, 8, {});
    // the loop runs while t <= T, so the last step ends past T
    CHECK(r.final_time > c.T);
    CHECK((r.steps - 1) * r.dt <= c.T + 1e-12);
    CHECK(r.final_time == doctest::Approx(r.steps * r.dt).epsilon(1e-12));

    c.theta = 1.0;
    c.mu = 1e4;
    const auto stiff = run_heat(c, 16, {});
    double m = 0.0;
    for(double d : stiff.u.dofs())
        m = std::max(m, std::abs(d));
    CHECK(std::isfinite(m));
    CHECK(m < 10.0);
}
