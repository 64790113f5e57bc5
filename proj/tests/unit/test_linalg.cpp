#include <doctest.h>

#include "femscript/error.hpp"
#include "femscript/forms.hpp"
#include "femscript/linalg.hpp"

#include <cmath>
#include <random>

using namespace femscript;

namespace
{

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double d = 0.0;
    for(std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_abs(const std::vector<double>& a)
{
    double m = 0.0;
    for(double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

SparseMatrix random_spd(int n, std::mt19937& rng)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Triplet> t;
    for(int i = 0; i < n; ++i)
    {
        for(int j = 0; j < i; ++j)
        {
            if(U(rng) < 0.6)
                continue;
            const double v = U(rng);
            t.push_back({i, j, v});
            t.push_back({j, i, v});
        }
        t.push_back({i, i, 1.0 + n});
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

} // namespace

TEST_CASE("triplets are summed and rows sorted")
{
    const auto a = SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 2, 0.5}, {1, 0, 4.0}});
    CHECK(a.nnz() == 3);
    CHECK(a.at(1, 2) == 1.5);
    CHECK(a.at(0, 0) == 0.0);
    CHECK(a.row_offsets() == std::vector<int>{0, 1, 3});
    CHECK(a.col_indices() == std::vector<int>{1, 0, 2});
    const auto at = a.transposed();
    CHECK(at.rows() == 3);
    CHECK(at.at(2, 1) == 1.5);
    CHECK(at.transposed().triplets().size() == a.triplets().size());
}

TEST_CASE("direct solves of small systems")
{
    const std::vector<double> b{1.0, -2.0, 3.0};
    CHECK(solve_lu(SparseMatrix::identity(3), b) == b);

    const auto a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 2}, {1, 0, -2}, {1, 1, 1}});
    const auto x = solve_lu(a, std::vector<double>{5.0, 0.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));

    const auto singular = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 4}});
    CHECK_THROWS_AS(LuFactorization{singular}, SingularMatrix);
}

TEST_CASE("tridiagonal system")
{
    const int n = 100;
    std::vector<Triplet> t;
    for(int i = 0; i < n; ++i)
    {
        t.push_back({i, i, 2.0});
        if(i > 0)
            t.push_back({i, i - 1, -1.0});
        if(i + 1 < n)
            t.push_back({i, i + 1, -1.0});
    }
    const auto a = SparseMatrix::from_triplets(n, n, std::move(t));
    std::vector<double> exact(n);
    for(int i = 0; i < n; ++i)
        exact[i] = std::sin(0.1 * i);
    const auto b = a.multiply(exact);
    CHECK(max_diff(solve_lu(a, b), exact) <= 1e-10);
    const auto cg = solve_cg(a, b, 1e-14);
    CHECK(cg.converged);
    CHECK(max_diff(cg.x, exact) <= 1e-8);
}

TEST_CASE("LU and CG agree on random SPD systems")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for(int rep = 0; rep < 5; ++rep)
    {
        const auto a = random_spd(50, rng);
        std::vector<double> b(50);
        for(double& v : b)
            v = U(rng);
        const auto lu = solve_lu(a, b);
        const auto cg = solve_cg(a, b, 1e-14);
        CHECK(cg.converged);
        CHECK(max_diff(lu, cg.x) <= 1e-8 * std::max(1.0, max_abs(lu)));

        // residual contract of the direct solver
        const auto r = a.multiply(lu);
        CHECK(max_diff(r, b) <= 1e-10 * a.norm_inf() * max_abs(lu) + 1e-12 * max_abs(b));
    }
}

TEST_CASE("LU and CG agree on the golden Poisson systems")
{
    for(int N : {16, 32, 64})
    {
        auto space = std::make_shared<FeSpace>(std::make_shared<const Mesh>(build_square(N, N)), Element::P1);
        VarForm f;
        f.bilinear.push_back({{}, Op::Dx, Op::Dx, 1.0});
        f.bilinear.push_back({{}, Op::Dy, Op::Dy, 1.0});
        f.linear.push_back({{}, Op::Value, Field::xy([](double x, double y) {
                                return 2 * M_PI * M_PI * std::sin(M_PI * x) * std::sin(M_PI * y);
                            })});
        f.dirichlet.push_back({{1, 2, 3, 4}, 0.0});
        const auto a = assemble_bilinear(f, *space, *space);
        const auto b = assemble_linear(f, *space);
        const auto lu = solve_lu(a, b);
        const auto cg = solve_cg(a, b, 1e-14, 20000);
        CHECK(cg.converged);
        CHECK(max_diff(lu, cg.x) <= 1e-8);
    }
}

TEST_CASE("CG with no iterations returns the initial guess")
{
    const auto a = SparseMatrix::identity(4);
    const auto r = solve_cg(a, std::vector<double>{1, 2, 3, 4}, 1e-12, 0);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.x == std::vector<double>(4, 0.0));
    CHECK(solve_cg(a, std::vector<double>(4, 0.0)).converged);
}

TEST_CASE("dense helpers")
{
    const std::vector<double> u{1, 2, 3, 4}, v{4, 3, 2, 1};
    CHECK(dot(u, v) == 20.0);
    const DenseMatrix o = outer(u, v);
    CHECK(trace(o) == 20.0);
    CHECK(transpose(transpose(o)) == o);
    CHECK(transpose(o)(0, 3) == o(3, 0));
    CHECK(elementwise_div(u, v) == std::vector<double>{0.25, 2.0 / 3.0, 1.5, 4.0});
    CHECK(elementwise_mul(u, v) == std::vector<double>{4, 6, 6, 4});
    CHECK(matvec(o, std::vector<double>{1, 0, 0, 0}) == std::vector<double>{4, 8, 12, 16});

    DenseMatrix m(2, 2);
    m(0, 0) = 3;
    m(0, 1) = 1;
    m(1, 0) = 2;
    m(1, 1) = 5;
    CHECK(det(m) == 13.0);
    CHECK(matmul(m, DenseMatrix(2, 2, 0.0)) == DenseMatrix(2, 2, 0.0));
    CHECK_THROWS_AS(det(DenseMatrix(3, 3, 1.0)), Unsupported);
    CHECK_THROWS_AS(dot(u, std::vector<double>{1.0}), InvalidArgument);
}
