#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace femscript
{

struct Triplet
{
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Real matrix in compressed sparse row form. Column indices are strictly
/// increasing inside each row.
class SparseMatrix
{
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    /// Duplicates are summed in input order, so equal input gives
    /// bit-identical output.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static SparseMatrix identity(int n);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int nnz() const noexcept { return static_cast<int>(values_.size()); }

    const std::vector<int>& row_offsets() const noexcept { return offsets_; }
    const std::vector<int>& col_indices() const noexcept { return cols_idx_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

    /// Stored value or 0.
    double at(int i, int j) const;
    /// Pointer to a stored entry, nullptr when structurally zero.
    double* find(int i, int j);

    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> diagonal() const;
    std::vector<double> row_sums() const;
    double norm_inf() const;
    double max_abs() const;

    SparseMatrix transposed() const;
    std::vector<Triplet> triplets() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> offsets_{0};
    std::vector<int> cols_idx_;
    std::vector<double> values_;
};

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix operator*(double s, const SparseMatrix& a);

/// Sparse LU with a fill-reducing column ordering and partial pivoting.
/// Immutable after construction; solve() may be called concurrently.
class LuFactorization
{
public:
    explicit LuFactorization(const SparseMatrix& a);
    ~LuFactorization();
    LuFactorization(LuFactorization&&) noexcept;
    LuFactorization& operator=(LuFactorization&&) noexcept;

    int size() const noexcept { return n_; }
    std::vector<double> solve(std::span<const double> b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int n_ = 0;
};

std::vector<double> solve_lu(const SparseMatrix& a, std::span<const double> b);

struct CgResult
{
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0; ///< final preconditioned relative residual
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// maxit < 0 selects 10 * n.
CgResult solve_cg(const SparseMatrix& a, std::span<const double> b, double tol = 1e-10,
                  int maxit = -1);

/// Row-major dense matrix.
template <class T>
class Dense
{
public:
    Dense() = default;
    Dense(int rows, int cols, T fill = T{})
        : rows_(rows)
        , cols_(cols)
        , data_(static_cast<std::size_t>(rows) * cols, fill)
    {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Dense&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using DenseMatrix = Dense<double>;
using ComplexMatrix = Dense<std::complex<double>>;

double dot(std::span<const double> u, std::span<const double> v);
DenseMatrix outer(std::span<const double> u, std::span<const double> v);
double trace(const DenseMatrix& m);
DenseMatrix transpose(const DenseMatrix& m);
std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> elementwise_mul(std::span<const double> u, std::span<const double> v);
std::vector<double> elementwise_div(std::span<const double> u, std::span<const double> v);
/// Determinant of a 1x1 or 2x2 matrix; larger sizes are Unsupported.
double det(const DenseMatrix& m);

} // namespace femscript
