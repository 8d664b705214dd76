#pragma once

#include "expamoeba/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace expamoeba {

/// Integer relation q with q . Omega = 0 (exactly, or within `residual`).
struct RelationCertificate {
  std::vector<long long> q;
  double residual = 0.0;
  bool exact = false;
};

struct GeneratorCheck {
  bool ok = true;
  /// real mode: "no relation within the search bounds", not a proof
  bool heuristic = false;
  std::optional<RelationCertificate> relation;
};

struct RelationSearch {
  double max_coefficient = 1e6;
  double residual_tol = 1e-9;
};

GeneratorCheck validate_generators(const GeneratorMatrix& omega, RelationSearch bounds = {});
/// Throws DependentGenerators carrying the certificate when a relation exists.
void require_independent(const GeneratorMatrix& omega, RelationSearch bounds = {});

/// phi = A^{-1} with A = [omega_1 .. omega_s | completion], det phi > 0.
struct TorusReduction {
  RationalMatrix A;
  RationalMatrix phi;
  int s = 0;
  int det_sign = 1;
  /// lcm of all generator denominators
  long long mu = 1;
  /// standard basis indices used to complete the generators
  std::vector<int> completion;
};

TorusReduction torus_reduction(const GeneratorMatrix& omega);

/// F o phi^T: generators become Omega phi^T, so each frequency maps to phi lambda.
ExpSystem pullback_system(const ExpSystem& F, const Eigen::MatrixXd& phi);
ExpSystem pullback_system(const ExpSystem& F, const RationalMatrix& phi);

struct LaurentMonomial {
  IVector exponent;
  Complex c;
};

struct LaurentPolynomial {
  std::string name;
  std::vector<LaurentMonomial> terms;
};

/// Requires every frequency to be an integer vector.
std::vector<LaurentPolynomial> to_laurent(const ExpSystem& F);

/// First `count` convergents of the exact continued fraction of x.
std::vector<Rational> continued_fraction_convergents(double x, int count);

struct ApproxSchedule {
  int level = 1;
  /// convergents[i][j] lists levels 1..level for entry (i, j)
  std::vector<std::vector<std::vector<Rational>>> convergents;
  RationalMatrix omega;
  /// max entrywise |Omega^[l] - Omega|
  double error = 0.0;
};

ApproxSchedule rational_approx(const GeneratorMatrix& omega, int level);
/// Same sums over the approximated generators (coincident frequencies allowed).
ExpSystem approximate_system(const ExpSystem& F, const ApproxSchedule& schedule);

/// max_j dist(<omega_j, t> - theta_j, 2 pi Z)
double congruence_residual(const GeneratorMatrix& omega, const Eigen::VectorXd& t,
                           const Eigen::VectorXd& theta);

struct KroneckerOptions {
  double max_box = 1e7;
  RelationSearch relation_bounds;
  /// candidate evaluations allowed in the enumeration fallback
  long long enumeration_budget = 50'000'000;
};

struct KroneckerResult {
  bool solved = false;
  Eigen::VectorXd t;
  /// congruence residual of t, re-verified after the search
  double residual = 0.0;
  /// "direct", "lattice" or "enumeration"
  std::string method;
  /// set on refusal
  std::optional<RelationCertificate> refusal;
  /// dist(<q, theta>, 2 pi Z) for the refusing relation
  double violation = 0.0;
};

/// Throws BudgetExceeded when neither search finds a verified t.
KroneckerResult kronecker_solve(const GeneratorMatrix& omega, const Eigen::VectorXd& theta, double tol,
                                const KroneckerOptions& opt = {});

std::vector<Eigen::VectorXd> translation_sequence(const ExpSystem& F, const Character& chi,
                                                  const std::vector<double>& tolerances,
                                                  const KroneckerOptions& opt = {});

/// LLL reduction (delta = 0.99) of the rows of `basis`; `transform` receives
/// the unimodular U with reduced = U * basis.
void lll_reduce(Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>& basis,
                Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>& transform);

}  // namespace expamoeba
