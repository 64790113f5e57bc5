#include "femscript/error.hpp"
#include "femscript/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace femscript
{

SparseMatrix::SparseMatrix(int rows, int cols)
    : rows_(rows)
    , cols_(cols)
    , offsets_(static_cast<std::size_t>(rows) + 1, 0)
{
    if(rows < 0 || cols < 0)
        throw InvalidArgument("matrix dimensions must be non-negative");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets)
{
    SparseMatrix m(rows, cols);
    for(const auto& t : triplets)
        if(t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw InvalidArgument("matrix entry (" + std::to_string(t.row) + ", "
                                  + std::to_string(t.col) + ") out of range");

    // Stable bucket by row, then stable sort by column inside each row.
    std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
    for(const auto& t : triplets)
        ++count[t.row + 1];
    for(int i = 0; i < rows; ++i)
        count[i + 1] += count[i];
    std::vector<Triplet> sorted(triplets.size());
    {
        std::vector<int> pos(count.begin(), count.end() - 1);
        for(const auto& t : triplets)
            sorted[pos[t.row]++] = t;
    }
    m.cols_idx_.reserve(sorted.size());
    m.values_.reserve(sorted.size());
    for(int i = 0; i < rows; ++i)
    {
        auto first = sorted.begin() + count[i];
        auto last = sorted.begin() + count[i + 1];
        std::stable_sort(first, last, [](const Triplet& a, const Triplet& b) { return a.col < b.col; });
        for(auto it = first; it != last; ++it)
        {
            if(static_cast<int>(m.cols_idx_.size()) > m.offsets_[i] && m.cols_idx_.back() == it->col)
                m.values_.back() += it->value;
            else
            {
                m.cols_idx_.push_back(it->col);
                m.values_.push_back(it->value);
            }
        }
        m.offsets_[i + 1] = static_cast<int>(m.cols_idx_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(int n)
{
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for(int i = 0; i < n; ++i)
        t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
}

double SparseMatrix::at(int i, int j) const
{
    const auto first = cols_idx_.begin() + offsets_[i];
    const auto last = cols_idx_.begin() + offsets_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? values_[it - cols_idx_.begin()] : 0.0;
}

double* SparseMatrix::find(int i, int j)
{
    const auto first = cols_idx_.begin() + offsets_[i];
    const auto last = cols_idx_.begin() + offsets_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? &values_[it - cols_idx_.begin()] : nullptr;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const
{
    if(static_cast<int>(x.size()) != cols_)
        throw InvalidArgument("matrix-vector product: vector has length "
                              + std::to_string(x.size()) + ", matrix has "
                              + std::to_string(cols_) + " columns");
    std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
    for(int i = 0; i < rows_; ++i)
    {
        double s = 0.0;
        for(int k = offsets_[i]; k < offsets_[i + 1]; ++k)
            s += values_[k] * x[cols_idx_[k]];
        y[i] = s;
    }
    return y;
}

std::vector<double> SparseMatrix::diagonal() const
{
    std::vector<double> d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
    for(int i = 0; i < static_cast<int>(d.size()); ++i)
        d[i] = at(i, i);
    return d;
}

std::vector<double> SparseMatrix::row_sums() const
{
    std::vector<double> s(static_cast<std::size_t>(rows_), 0.0);
    for(int i = 0; i < rows_; ++i)
        for(int k = offsets_[i]; k < offsets_[i + 1]; ++k)
            s[i] += values_[k];
    return s;
}

double SparseMatrix::norm_inf() const
{
    double best = 0.0;
    for(int i = 0; i < rows_; ++i)
    {
        double s = 0.0;
        for(int k = offsets_[i]; k < offsets_[i + 1]; ++k)
            s += std::abs(values_[k]);
        best = std::max(best, s);
    }
    return best;
}

double SparseMatrix::max_abs() const
{
    double best = 0.0;
    for(double v : values_)
        best = std::max(best, std::abs(v));
    return best;
}

std::vector<Triplet> SparseMatrix::triplets() const
{
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for(int i = 0; i < rows_; ++i)
        for(int k = offsets_[i]; k < offsets_[i + 1]; ++k)
            out.push_back({i, cols_idx_[k], values_[k]});
    return out;
}

SparseMatrix SparseMatrix::transposed() const
{
    auto t = triplets();
    for(auto& e : t)
        std::swap(e.row, e.col);
    return from_triplets(cols_, rows_, std::move(t));
}

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b)
{
    if(a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidArgument("matrix sum: shape mismatch");
    auto t = a.triplets();
    auto tb = b.triplets();
    t.insert(t.end(), tb.begin(), tb.end());
    return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseMatrix operator*(double s, const SparseMatrix& a)
{
    SparseMatrix r = a;
    for(double& v : r.values())
        v *= s;
    return r;
}

} // namespace femscript
