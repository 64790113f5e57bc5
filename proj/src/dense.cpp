#include "femscript/error.hpp"
#include "femscript/linalg.hpp"

#include <string>

namespace femscript
{

namespace
{

void same_length(std::span<const double> u, std::span<const double> v, const char* op)
{
    if(u.size() != v.size())
        throw InvalidArgument(std::string(op) + ": length mismatch (" + std::to_string(u.size())
                              + " vs " + std::to_string(v.size()) + ")");
}

} // namespace

double dot(std::span<const double> u, std::span<const double> v)
{
    same_length(u, v, "dot");
    double s = 0.0;
    for(std::size_t i = 0; i < u.size(); ++i)
        s += u[i] * v[i];
    return s;
}

DenseMatrix outer(std::span<const double> u, std::span<const double> v)
{
    DenseMatrix m(static_cast<int>(u.size()), static_cast<int>(v.size()));
    for(int i = 0; i < m.rows(); ++i)
        for(int j = 0; j < m.cols(); ++j)
            m(i, j) = u[i] * v[j];
    return m;
}

double trace(const DenseMatrix& m)
{
    if(m.rows() != m.cols())
        throw InvalidArgument("trace: matrix is not square");
    double s = 0.0;
    for(int i = 0; i < m.rows(); ++i)
        s += m(i, i);
    return s;
}

DenseMatrix transpose(const DenseMatrix& m)
{
    DenseMatrix t(m.cols(), m.rows());
    for(int i = 0; i < m.rows(); ++i)
        for(int j = 0; j < m.cols(); ++j)
            t(j, i) = m(i, j);
    return t;
}

std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x)
{
    if(static_cast<int>(x.size()) != m.cols())
        throw InvalidArgument("matrix-vector product: shape mismatch");
    std::vector<double> y(static_cast<std::size_t>(m.rows()), 0.0);
    for(int i = 0; i < m.rows(); ++i)
        for(int j = 0; j < m.cols(); ++j)
            y[i] += m(i, j) * x[j];
    return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b)
{
    if(a.cols() != b.rows())
        throw InvalidArgument("matrix product: shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for(int i = 0; i < a.rows(); ++i)
        for(int k = 0; k < a.cols(); ++k)
            for(int j = 0; j < b.cols(); ++j)
                c(i, j) += a(i, k) * b(k, j);
    return c;
}

std::vector<double> elementwise_mul(std::span<const double> u, std::span<const double> v)
{
    same_length(u, v, ".*");
    std::vector<double> r(u.size());
    for(std::size_t i = 0; i < u.size(); ++i)
        r[i] = u[i] * v[i];
    return r;
}

std::vector<double> elementwise_div(std::span<const double> u, std::span<const double> v)
{
    same_length(u, v, "./");
    std::vector<double> r(u.size());
    for(std::size_t i = 0; i < u.size(); ++i)
        r[i] = u[i] / v[i];
    return r;
}

double det(const DenseMatrix& m)
{
    if(m.rows() != m.cols())
        throw InvalidArgument("det: matrix is not square");
    if(m.rows() == 1)
        return m(0, 0);
    if(m.rows() == 2)
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    throw Unsupported("det: only 1x1 and 2x2 matrices are supported");
}

} // namespace femscript
