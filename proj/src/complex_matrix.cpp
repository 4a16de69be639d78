// SPDX-License-Identifier: Apache-2.0
#include "antsel/complex_matrix.hpp"

#include <cmath>
#include <string>

#include "antsel/errors.hpp"

namespace antsel
{

namespace
{

void validate(const Eigen::MatrixXcd& m)
{
    if (m.rows() == 0 || m.cols() == 0)
        throw DimensionError("matrix must have at least one row and one column, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (!m.allFinite())
        throw ArgumentError("matrix entries must be finite");
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> row_major)
{
    if (rows == 0 || cols == 0)
        throw DimensionError("matrix must have at least one row and one column");
    if (row_major.size() != rows * cols)
        throw DimensionError("expected " + std::to_string(rows * cols) + " entries, got " +
                             std::to_string(row_major.size()));
    data_.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            data_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row_major[r * cols + c];
    validate(data_);
}

ComplexMatrix::ComplexMatrix(Eigen::MatrixXcd data) : data_(std::move(data))
{
    validate(data_);
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols)
{
    return ComplexMatrix(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
}

ComplexMatrix ComplexMatrix::identity(std::size_t n)
{
    const auto size = static_cast<Eigen::Index>(n);
    return ComplexMatrix(Eigen::MatrixXcd::Identity(size, size));
}

ComplexMatrix ComplexMatrix::from_columns(std::initializer_list<std::initializer_list<Complex>> columns)
{
    if (columns.size() == 0)
        throw DimensionError("at least one column required");
    const std::size_t rows = columns.begin()->size();
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns.size()));
    Eigen::Index c = 0;
    for (const auto& column : columns)
    {
        if (column.size() != rows)
            throw DimensionError("ragged column list");
        Eigen::Index r = 0;
        for (const Complex& v : column)
            m(r++, c) = v;
        ++c;
    }
    return ComplexMatrix(std::move(m));
}

Eigen::VectorXcd ComplexMatrix::column(std::size_t k) const
{
    if (k >= cols())
        throw ArgumentError("column index " + std::to_string(k) + " out of range");
    return data_.col(static_cast<Eigen::Index>(k));
}

ComplexMatrix ComplexMatrix::select_columns(std::span<const std::size_t> indices) const
{
    Eigen::MatrixXcd out(data_.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i)
    {
        if (indices[i] >= cols())
            throw ArgumentError("column index " + std::to_string(indices[i]) + " out of range");
        out.col(static_cast<Eigen::Index>(i)) = data_.col(static_cast<Eigen::Index>(indices[i]));
    }
    return ComplexMatrix(std::move(out));
}

ComplexMatrix ComplexMatrix::scaled(Complex factor) const
{
    return ComplexMatrix(Eigen::MatrixXcd(data_ * factor));
}

std::vector<Complex> ComplexMatrix::row_major() const
{
    std::vector<Complex> out;
    out.reserve(rows() * cols());
    for (Eigen::Index r = 0; r < data_.rows(); ++r)
        for (Eigen::Index c = 0; c < data_.cols(); ++c)
            out.push_back(data_(r, c));
    return out;
}

} // namespace antsel
