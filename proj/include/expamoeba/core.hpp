#pragma once

#include "expamoeba/errors.hpp"
#include "expamoeba/rational.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace expamoeba {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using IVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

enum class Mode { rational, real };

const char* to_string(Mode m);

/// Largest |Re<z, lambda>| accepted by the unnormalized evaluators.
inline constexpr double kExponentClamp = 700.0;

struct DeskLimits {
  int max_rows = 4;
  int max_dim = 3;
};

/// Rows omega_1..omega_r in R^n spanning the frequency group.
///
/// Construction checks shape and the desk limits only; Z-independence is a
/// lattice question (see validate_generators).
class GeneratorMatrix {
 public:
  GeneratorMatrix() = default;
  explicit GeneratorMatrix(const Eigen::MatrixXd& real_rows, DeskLimits limits = {});
  explicit GeneratorMatrix(const RationalMatrix& exact_rows, DeskLimits limits = {});

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index dim() const { return values_.cols(); }
  Mode mode() const { return mode_; }

  /// binary64 entries; exact entries rounded in rational mode
  const Eigen::MatrixXd& values() const { return values_; }
  /// exact entries; throws in real mode
  const RationalMatrix& exact() const;

  Eigen::VectorXd frequency(const IVector& k) const;
  RationalVector exact_frequency(const IVector& k) const;

  friend bool operator==(const GeneratorMatrix& a, const GeneratorMatrix& b);

 private:
  Mode mode_ = Mode::real;
  Eigen::MatrixXd values_;
  RationalMatrix exact_;
};

struct ExpTerm {
  Complex c;
  IVector k;
};

struct ExpSum {
  std::string name;
  std::vector<ExpTerm> terms;
};

/// A finite family of sums sharing one generator matrix.
class ExpSystem {
 public:
  ExpSystem() = default;
  /// Checks: at least one sum, every sum nonempty, nonzero coefficients,
  /// exponent vectors of length r and pairwise distinct within a sum.
  ExpSystem(GeneratorMatrix generators, std::vector<ExpSum> sums);

  const GeneratorMatrix& generators() const { return generators_; }
  const std::vector<ExpSum>& sums() const { return sums_; }
  Eigen::Index dim() const { return generators_.dim(); }
  Eigen::Index rank() const { return generators_.rows(); }
  std::size_t card() const { return sums_.size(); }
  Mode mode() const { return generators_.mode(); }

 private:
  GeneratorMatrix generators_;
  std::vector<ExpSum> sums_;
};

/// theta in [0, 2pi)^r; chi(k . Omega) = exp(i <k, theta>)
struct Character {
  Character() = default;
  explicit Character(const Eigen::VectorXd& angles);
  Eigen::VectorXd theta;
};

double reduce_angle(double a);

/// Frequencies k . Omega of every term, one column per term.
Eigen::MatrixXd frequencies(const ExpSum& f, const GeneratorMatrix& omega);

Complex eval_sum(const ExpSum& f, const GeneratorMatrix& omega, const CVector& z);
double support_k(const ExpSum& f, const GeneratorMatrix& omega, const CVector& z);
double K_functional(const ExpSystem& F, const CVector& z);

/// |f(z)| / k_f(z) computed without forming exp of large exponents.
double normalized_modulus(const ExpSum& f, const GeneratorMatrix& omega, const CVector& z);

ExpSystem perturb(const ExpSystem& F, const Character& chi);
Character translation_character(const GeneratorMatrix& omega, const Eigen::VectorXd& y);

/// Sum of |c| over the terms of f.
double coefficient_mass(const ExpSum& f);

}  // namespace expamoeba

namespace expamoeba {

/// Canonical one-line-per-item text of F (mode, generators, sorted terms).
std::string canonical_text(const ExpSystem& F);
/// FNV-1a 64 of canonical_text, as 16 hex digits.
std::string system_hash(const ExpSystem& F);

}  // namespace expamoeba
