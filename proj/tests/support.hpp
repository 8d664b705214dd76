#pragma once

#include "expamoeba/core.hpp"
#include "expamoeba/io.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testing {

using namespace expamoeba;

inline constexpr double kPi = std::numbers::pi;
inline const double kSqrt2 = std::sqrt(2.0);

inline std::string data_path(const std::string& name) { return std::string(EXPAMOEBA_DATA_DIR) + "/" + name; }

inline ExpSystem load(const std::string& name) { return parse_system_file(data_path(name)).system; }

struct T {
  Complex c;
  std::vector<long long> k;
};

inline ExpSum make_sum(const std::vector<T>& terms, const std::string& name = "f") {
  ExpSum f;
  f.name = name;
  for (const T& t : terms) {
    IVector k(static_cast<Eigen::Index>(t.k.size()));
    for (std::size_t i = 0; i < t.k.size(); ++i) k(i) = t.k[i];
    f.terms.push_back({t.c, k});
  }
  return f;
}

inline GeneratorMatrix rational_identity(int n) {
  RationalMatrix w = RationalMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) w(i, i) = 1;
  return GeneratorMatrix(w);
}

inline GeneratorMatrix rational_rows(const std::vector<std::vector<Rational>>& rows) {
  RationalMatrix w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) w(i, j) = rows[i][j];
  return GeneratorMatrix(w);
}

// rows (1), (sqrt 2)
inline GeneratorMatrix one_sqrt2() {
  Eigen::MatrixXd w(2, 1);
  w << 1.0, kSqrt2;
  return GeneratorMatrix(w);
}

inline CVector cvec(std::initializer_list<Complex> v) {
  CVector z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (Complex c : v) z(i++) = c;
  return z;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

}  // namespace testing
