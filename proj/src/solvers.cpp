#include "femscript/error.hpp"
#include "femscript/linalg.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace femscript
{

struct LuFactorization::Impl
{
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

LuFactorization::LuFactorization(const SparseMatrix& a)
    : impl_(std::make_unique<Impl>())
    , n_(a.rows())
{
    if(a.rows() != a.cols())
        throw InvalidArgument("LU: matrix must be square, got " + std::to_string(a.rows()) + "x"
                              + std::to_string(a.cols()));
    for(double v : a.values())
        if(!std::isfinite(v))
            throw NumericError("LU: matrix has a non-finite entry");
    Eigen::SparseMatrix<double> m(a.rows(), a.cols());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.nnz()));
    for(const auto& e : a.triplets())
        t.emplace_back(e.row, e.col, e.value);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    impl_->lu.analyzePattern(m);
    impl_->lu.factorize(m);
    if(impl_->lu.info() != Eigen::Success)
        throw SingularMatrix("LU: matrix is singular (" + impl_->lu.lastErrorMessage() + ")");
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

std::vector<double> LuFactorization::solve(std::span<const double> b) const
{
    if(static_cast<int>(b.size()) != n_)
        throw InvalidArgument("LU solve: right-hand side has length " + std::to_string(b.size())
                              + ", expected " + std::to_string(n_));
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n_);
    const Eigen::VectorXd x = impl_->lu.solve(rhs);
    std::vector<double> out(x.data(), x.data() + n_);
    for(double v : out)
        if(!std::isfinite(v))
            throw SingularMatrix("LU: solution is not finite (numerically singular matrix)");
    return out;
}

std::vector<double> solve_lu(const SparseMatrix& a, std::span<const double> b)
{
    return LuFactorization(a).solve(b);
}

CgResult solve_cg(const SparseMatrix& a, std::span<const double> b, double tol, int maxit)
{
    const int n = a.rows();
    if(a.cols() != n)
        throw InvalidArgument("CG: matrix must be square");
    if(static_cast<int>(b.size()) != n)
        throw InvalidArgument("CG: right-hand side length mismatch");
    if(maxit < 0)
        maxit = 10 * n;

    CgResult res;
    res.x.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<double> inv_diag = a.diagonal();
    for(double& d : inv_diag)
    {
        if(!(d > 0.0))
            throw SolverError("CG: matrix diagonal is not positive");
        d = 1.0 / d;
    }

    // Residuals are measured in the D^{-1}-scaled norm, which keeps the tgv
    // rows from dominating.
    const auto scaled_norm = [&](const std::vector<double>& r) {
        double s = 0.0;
        for(int i = 0; i < n; ++i)
            s += (r[i] * inv_diag[i]) * (r[i] * inv_diag[i]);
        return std::sqrt(s);
    };

    std::vector<double> r(b.begin(), b.end());
    const double norm_b = scaled_norm(r);
    if(norm_b == 0.0)
    {
        res.converged = maxit > 0 || n == 0;
        return res;
    }
    res.residual = 1.0;
    if(maxit == 0)
        return res;

    std::vector<double> z(n), p(n);
    for(int i = 0; i < n; ++i)
        z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for(int i = 0; i < n; ++i)
        rz += r[i] * z[i];

    for(int it = 1; it <= maxit; ++it)
    {
        const auto ap = a.multiply(p);
        double pap = 0.0;
        for(int i = 0; i < n; ++i)
            pap += p[i] * ap[i];
        if(!(pap > 0.0))
            throw SolverError("CG: breakdown, matrix is not positive definite (p'Ap = "
                              + std::to_string(pap) + ")");
        const double alpha = rz / pap;
        for(int i = 0; i < n; ++i)
        {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res.iterations = it;
        res.residual = scaled_norm(r) / norm_b;
        if(res.residual <= tol)
        {
            res.converged = true;
            return res;
        }
        double rz_new = 0.0;
        for(int i = 0; i < n; ++i)
        {
            z[i] = inv_diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for(int i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    return res;
}

} // namespace femscript
