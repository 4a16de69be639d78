// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace antsel
{

using Complex = std::complex<double>;

/*
 * Immutable dense complex matrix with at least one row and one column and
 * only finite entries. Storage is Eigen; the public surface speaks in
 * row-major entry lists and column selections.
 */
class ComplexMatrix
{
  public:
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> row_major);
    explicit ComplexMatrix(Eigen::MatrixXcd data);

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols);
    static ComplexMatrix identity(std::size_t n);
    // Each inner list is one column; all columns must have equal length.
    static ComplexMatrix from_columns(std::initializer_list<std::initializer_list<Complex>> columns);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(data_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(data_.cols()); }

    Complex operator()(std::size_t row, std::size_t col) const { return data_(row, col); }
    const Eigen::MatrixXcd& eigen() const noexcept { return data_; }
    Eigen::VectorXcd column(std::size_t k) const;

    // Columns in the given order (duplicates allowed).
    ComplexMatrix select_columns(std::span<const std::size_t> indices) const;
    ComplexMatrix scaled(Complex factor) const;
    std::vector<Complex> row_major() const;

    double frobenius_norm() const { return data_.norm(); }

  private:
    Eigen::MatrixXcd data_;
};

} // namespace antsel
