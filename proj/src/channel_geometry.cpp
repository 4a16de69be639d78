// SPDX-License-Identifier: Apache-2.0
#include "antsel/channel_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "antsel/errors.hpp"
#include "antsel/rng.hpp"

namespace antsel
{

ChannelSample sample_channel(std::size_t n_r, std::size_t n_t, std::uint64_t seed, std::uint64_t draw_index)
{
    if (n_r == 0 || n_t == 0)
        throw DimensionError("channel dimensions must be positive");
    rng::CounterRng gen(seed, draw_index, rng::Stream::channel);
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(n_r), static_cast<Eigen::Index>(n_t));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = gen.complex_normal();
    return {ComplexMatrix(std::move(m)), seed, draw_index};
}

double projection_angle(double height_sq, double norm_sq) noexcept
{
    if (norm_sq <= 0.0)
        return 0.0;
    const double ratio = std::clamp(height_sq / norm_sq, 0.0, 1.0);
    return std::asin(std::sqrt(ratio));
}

ProjectionReport projection_height_sq(const ComplexMatrix& h, std::size_t k, std::span<const std::size_t> others)
{
    if (k >= h.cols())
        throw ArgumentError("column index " + std::to_string(k) + " out of range");
    std::vector<std::size_t> sorted(others.begin(), others.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ArgumentError("spanning set contains duplicate columns");
    for (std::size_t j : sorted)
    {
        if (j >= h.cols())
            throw ArgumentError("column index " + std::to_string(j) + " out of range");
        if (j == k)
            throw ArgumentError("column " + std::to_string(k) + " is part of its own spanning set");
    }
    if (others.size() >= h.rows())
        throw DimensionError("spanning set must have fewer columns than the matrix has rows");

    const Eigen::VectorXcd column = h.eigen().col(static_cast<Eigen::Index>(k));
    const double norm_sq = column.squaredNorm();
    if (others.empty())
        return {norm_sq, norm_sq, std::numbers::pi / 2};

    // Householder reflections of the spanning columns; the residual lives in the
    // trailing rows of Q^H h_k.
    const ComplexMatrix basis = h.select_columns(others);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(basis.rows(), basis.cols());
    qr.setThreshold(kRankTolerance);
    qr.compute(basis.eigen());
    const Eigen::Index rank = qr.rank();
    const Eigen::VectorXcd rotated = qr.householderQ().adjoint() * column;
    const double height_sq = rotated.tail(rotated.size() - rank).squaredNorm();
    return {height_sq, norm_sq, projection_angle(height_sq, norm_sq)};
}

void require_full_column_rank(const ComplexMatrix& hs)
{
    if (hs.cols() > hs.rows())
        throw SingularityError("matrix with " + std::to_string(hs.cols()) + " columns and " +
                               std::to_string(hs.rows()) + " rows cannot have full column rank");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hs.eigen());
    const auto& sv = svd.singularValues();
    const double largest = sv(0);
    const double smallest = sv(sv.size() - 1);
    if (!(largest > 0.0) || smallest < kRankTolerance * largest)
        throw SingularityError("matrix is rank deficient (singular value ratio " +
                               std::to_string(largest > 0.0 ? smallest / largest : 0.0) + ")");
}

std::vector<double> gram_inverse_diag(const ComplexMatrix& hs)
{
    require_full_column_rank(hs);
    const Eigen::MatrixXcd gram = hs.eigen().adjoint() * hs.eigen();
    const Eigen::MatrixXcd inverse = gram.llt().solve(Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()));
    std::vector<double> diag(hs.cols());
    for (std::size_t i = 0; i < diag.size(); ++i)
        diag[i] = inverse(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    return diag;
}

QrFactors qr_factorize(const ComplexMatrix& hs)
{
    require_full_column_rank(hs);
    const Eigen::Index rows = hs.eigen().rows();
    const Eigen::Index cols = hs.eigen().cols();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(hs.eigen());
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
    Eigen::MatrixXcd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < cols; ++i)
    {
        const Complex d = r(i, i);
        const double magnitude = std::abs(d);
        if (magnitude == 0.0)
            continue;
        const Complex phase = d / magnitude;
        r.row(i) *= std::conj(phase);
        q.col(i) *= phase;
        r(i, i) = magnitude;
    }
    return {ComplexMatrix(std::move(q)), ComplexMatrix(std::move(r))};
}

namespace
{

double line_residual_sq(const Complex* hk, const Complex* hj, Eigen::Index rows, double norm_j) noexcept
{
    if (norm_j <= 0.0)
    {
        double norm_k = 0.0;
        for (Eigen::Index r = 0; r < rows; ++r)
            norm_k += std::norm(hk[r]);
        return norm_k;
    }
    Complex inner = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r)
        inner += std::conj(hj[r]) * hk[r];
    const Complex coeff = inner / norm_j;
    double residual = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r)
        residual += std::norm(hk[r] - coeff * hj[r]);
    return residual;
}

} // namespace

double line_projection_height_sq(const ComplexMatrix& h, std::size_t k, std::size_t j)
{
    if (k >= h.cols() || j >= h.cols())
        throw ArgumentError("column index out of range");
    if (k == j)
        throw ArgumentError("column " + std::to_string(k) + " is part of its own spanning set");
    const Eigen::MatrixXcd& m = h.eigen();
    const auto col_k = m.col(static_cast<Eigen::Index>(k));
    const auto col_j = m.col(static_cast<Eigen::Index>(j));
    return line_residual_sq(col_k.data(), col_j.data(), m.rows(), col_j.squaredNorm());
}

PairwiseHeights::PairwiseHeights(const ComplexMatrix& h) : n_(h.cols()), values_(n_ * n_, 0.0)
{
    const Eigen::MatrixXcd& m = h.eigen();
    for (std::size_t k = 0; k < n_; ++k)
        values_[k * n_ + k] = m.col(static_cast<Eigen::Index>(k)).squaredNorm();

    for (std::size_t j = 0; j < n_; ++j)
    {
        const Complex* hj = m.col(static_cast<Eigen::Index>(j)).data();
        for (std::size_t k = 0; k < n_; ++k)
        {
            if (k == j)
                continue;
            const Complex* hk = m.col(static_cast<Eigen::Index>(k)).data();
            values_[k * n_ + j] = line_residual_sq(hk, hj, m.rows(), values_[j * n_ + j]);
        }
    }
}

} // namespace antsel
