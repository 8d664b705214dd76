#pragma once

#include "expamoeba/rational.hpp"

#include <vector>

namespace expamoeba {

/// Reduced row echelon form in place; returns the pivot columns.
std::vector<int> rref(RationalMatrix& a);

int exact_rank(RationalMatrix a);
Rational exact_determinant(RationalMatrix a);
/// Throws Error when singular.
RationalMatrix exact_inverse(const RationalMatrix& a);
/// Basis of {x : a x = 0}, one column per free variable.
RationalMatrix exact_kernel(const RationalMatrix& a);

RationalMatrix to_rational(const Eigen::MatrixXd& a);
Eigen::MatrixXd to_double(const RationalMatrix& a);
Eigen::VectorXd to_double(const RationalVector& a);

/// Smallest integer multiple of v with coprime entries, first nonzero entry
/// positive.
std::vector<long long> primitive_integer_vector(const RationalVector& v);

}  // namespace expamoeba
