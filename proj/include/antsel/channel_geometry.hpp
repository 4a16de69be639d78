// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "antsel/complex_matrix.hpp"

namespace antsel
{

// Smallest-to-largest singular value ratio below which a matrix counts as rank deficient.
inline constexpr double kRankTolerance = 1e-12;

struct ChannelSample
{
    ComplexMatrix matrix;
    std::uint64_t seed;
    std::uint64_t draw_index;
};

/*
 * Geometry of one column against the span of other columns.
 *
 * height_sq is the squared norm of the residual after orthogonal projection
 * (the post-ZF SNR of that stream up to the factor rho0/L), norm_sq the
 * squared column norm and angle the angle between the column and its
 * projection, so that height_sq = norm_sq * sin^2(angle).
 */
struct ProjectionReport
{
    double height_sq;
    double norm_sq;
    double angle;
};

// N_R x N_T i.i.d. CN(0,1) channel, deterministic in (seed, draw_index).
ChannelSample sample_channel(std::size_t n_r, std::size_t n_t, std::uint64_t seed, std::uint64_t draw_index);

ProjectionReport projection_height_sq(const ComplexMatrix& h, std::size_t k, std::span<const std::size_t> others);

// Squared distance from column k to the line spanned by column j (one Gram-Schmidt step).
double line_projection_height_sq(const ComplexMatrix& h, std::size_t k, std::size_t j);

// Angle in [0, pi/2] with sin^2(angle) = height_sq / norm_sq, ratio clamped to [0, 1].
double projection_angle(double height_sq, double norm_sq) noexcept;

// Diagonal of (H^H H)^{-1}; its reciprocals are the projection heights of each
// column against all the others.
std::vector<double> gram_inverse_diag(const ComplexMatrix& hs);

struct QrFactors
{
    ComplexMatrix q; // rows x cols, orthonormal columns
    ComplexMatrix r; // cols x cols, upper triangular, real non-negative diagonal
};

QrFactors qr_factorize(const ComplexMatrix& hs);

// Throws SingularityError when cols > rows or sigma_min < kRankTolerance * sigma_max.
void require_full_column_rank(const ComplexMatrix& hs);

/*
 * All single-column projection heights R_kj of a channel: the squared
 * distance from column k to the line spanned by column j. The diagonal
 * holds the squared column norms.
 */
class PairwiseHeights
{
  public:
    explicit PairwiseHeights(const ComplexMatrix& h);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t k, std::size_t j) const noexcept { return values_[k * n_ + j]; }
    double norm_sq(std::size_t k) const noexcept { return values_[k * n_ + k]; }

  private:
    std::size_t n_;
    std::vector<double> values_;
};

} // namespace antsel
