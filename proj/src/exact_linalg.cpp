#include "expamoeba/exact_linalg.hpp"

#include "expamoeba/errors.hpp"

namespace expamoeba {

std::vector<int> rref(RationalMatrix& a) {
  std::vector<int> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Eigen::Index p = row;
    while (p < a.rows() && a(p, col).is_zero()) ++p;
    if (p == a.rows()) continue;
    if (p != row) a.row(p).swap(a.row(row));
    Rational inv = Rational(1) / a(row, col);
    for (Eigen::Index j = col; j < a.cols(); ++j) a(row, j) *= inv;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col).is_zero()) continue;
      Rational f = a(i, col);
      for (Eigen::Index j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return pivots;
}

int exact_rank(RationalMatrix a) { return static_cast<int>(rref(a).size()); }

Rational exact_determinant(RationalMatrix a) {
  if (a.rows() != a.cols()) throw DimensionError("determinant of a non-square matrix");
  Rational det(1);
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index p = col;
    while (p < n && a(p, col).is_zero()) ++p;
    if (p == n) return Rational(0);
    if (p != col) {
      a.row(p).swap(a.row(col));
      det = -det;
    }
    det *= a(col, col);
    for (Eigen::Index i = col + 1; i < n; ++i) {
      if (a(i, col).is_zero()) continue;
      Rational f = a(i, col) / a(col, col);
      for (Eigen::Index j = col; j < n; ++j) a(i, j) -= f * a(col, j);
    }
  }
  return det;
}

RationalMatrix exact_inverse(const RationalMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("inverse of a non-square matrix");
  const Eigen::Index n = a.rows();
  RationalMatrix aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n) = RationalMatrix::Identity(n, n);
  std::vector<int> piv = rref(aug);
  if (static_cast<Eigen::Index>(piv.size()) < n || piv[n - 1] != n - 1)
    throw Error("matrix is singular");
  return aug.rightCols(n);
}

RationalMatrix exact_kernel(const RationalMatrix& a) {
  RationalMatrix r = a;
  std::vector<int> piv = rref(r);
  std::vector<bool> is_pivot(a.cols(), false);
  for (int p : piv) is_pivot[p] = true;
  std::vector<int> free_cols;
  for (int j = 0; j < a.cols(); ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  RationalMatrix k = RationalMatrix::Constant(a.cols(), static_cast<Eigen::Index>(free_cols.size()),
                                              Rational(0));
  for (std::size_t c = 0; c < free_cols.size(); ++c) {
    k(free_cols[c], c) = Rational(1);
    for (std::size_t i = 0; i < piv.size(); ++i) k(piv[i], c) = -r(i, free_cols[c]);
  }
  return k;
}

RationalMatrix to_rational(const Eigen::MatrixXd& a) {
  RationalMatrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = Rational::from_double(a(i, j));
  return out;
}

Eigen::MatrixXd to_double(const RationalMatrix& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).to_double();
  return out;
}

Eigen::VectorXd to_double(const RationalVector& a) {
  Eigen::VectorXd out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out(i) = a(i).to_double();
  return out;
}

std::vector<long long> primitive_integer_vector(const RationalVector& v) {
  long long l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) l = lcm_ll(l, v(i).den());
  std::vector<long long> q(v.size());
  long long g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Rational s = v(i) * Rational(l);
    q[i] = s.num();
    g = gcd_ll(g, q[i]);
  }
  if (g == 0) throw Error("zero vector has no primitive form");
  int sign = 0;
  for (long long x : q)
    if (x != 0) {
      sign = x > 0 ? 1 : -1;
      break;
    }
  for (long long& x : q) x = x / g * sign;
  return q;
}

}  // namespace expamoeba
