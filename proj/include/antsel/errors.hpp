// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace antsel
{

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Zero or inconsistent matrix/antenna dimensions.
class DimensionError : public Error
{
  public:
    using Error::Error;
};

// Invalid argument: out-of-range index, malformed permutation, unsupported rule, ...
class ArgumentError : public Error
{
  public:
    using Error::Error;
};

// Rank-deficient matrix where full column rank is required.
class SingularityError : public Error
{
  public:
    using Error::Error;
};

// Argument outside the domain of a density or special function.
class DomainError : public Error
{
  public:
    using Error::Error;
};

// Quadrature or iteration failed to converge.
class NumericError : public Error
{
  public:
    using Error::Error;
};

// Log-log slope fit could not be performed.
class FitError : public Error
{
  public:
    using Error::Error;
};

} // namespace antsel
