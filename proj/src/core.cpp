#include "expamoeba/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <set>

namespace expamoeba {

const char* to_string(Mode m) { return m == Mode::rational ? "rational" : "real"; }

namespace {

void check_limits(Eigen::Index r, Eigen::Index n, DeskLimits limits) {
  if (r < 1 || n < 1) throw DimensionError("generator matrix needs r >= 1 and n >= 1");
  if (r > limits.max_rows || n > limits.max_dim)
    throw DimensionError("generator matrix " + std::to_string(r) + "x" + std::to_string(n) +
                         " exceeds desk limits r <= " + std::to_string(limits.max_rows) +
                         ", n <= " + std::to_string(limits.max_dim));
}

void check_length(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) + ", expected " +
                         std::to_string(want));
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(const Eigen::MatrixXd& real_rows, DeskLimits limits)
    : mode_(Mode::real), values_(real_rows) {
  check_limits(real_rows.rows(), real_rows.cols(), limits);
  if (!real_rows.allFinite()) throw Error("generator entries must be finite");
}

GeneratorMatrix::GeneratorMatrix(const RationalMatrix& exact_rows, DeskLimits limits)
    : mode_(Mode::rational), exact_(exact_rows) {
  check_limits(exact_rows.rows(), exact_rows.cols(), limits);
  values_.resize(exact_rows.rows(), exact_rows.cols());
  for (Eigen::Index i = 0; i < exact_rows.rows(); ++i)
    for (Eigen::Index j = 0; j < exact_rows.cols(); ++j) values_(i, j) = exact_rows(i, j).to_double();
}

const RationalMatrix& GeneratorMatrix::exact() const {
  if (mode_ != Mode::rational) throw Error("exact generator entries requested in real mode");
  return exact_;
}

Eigen::VectorXd GeneratorMatrix::frequency(const IVector& k) const {
  check_length(k.size(), rows(), "exponent vector");
  return values_.transpose() * k.cast<double>();
}

RationalVector GeneratorMatrix::exact_frequency(const IVector& k) const {
  check_length(k.size(), rows(), "exponent vector");
  const RationalMatrix& e = exact();
  RationalVector out = RationalVector::Constant(dim(), Rational(0));
  for (Eigen::Index j = 0; j < rows(); ++j)
    if (k(j) != 0)
      for (Eigen::Index i = 0; i < dim(); ++i) out(i) += Rational(k(j)) * e(j, i);
  return out;
}

bool operator==(const GeneratorMatrix& a, const GeneratorMatrix& b) {
  if (a.mode_ != b.mode_ || a.rows() != b.rows() || a.dim() != b.dim()) return false;
  if (a.mode_ == Mode::rational) return a.exact_ == b.exact_;
  return a.values_ == b.values_;
}

ExpSystem::ExpSystem(GeneratorMatrix generators, std::vector<ExpSum> sums)
    : generators_(std::move(generators)), sums_(std::move(sums)) {
  if (sums_.empty()) throw Error("no sums");
  for (const ExpSum& f : sums_) {
    if (f.terms.empty()) throw Error("sum '" + f.name + "' has no terms");
    std::set<std::vector<long long>> seen;
    for (const ExpTerm& t : f.terms) {
      check_length(t.k.size(), generators_.rows(), "exponent vector");
      if (t.c == Complex(0.0, 0.0)) throw Error("sum '" + f.name + "' has a zero coefficient");
      if (!std::isfinite(t.c.real()) || !std::isfinite(t.c.imag()))
        throw Error("sum '" + f.name + "' has a non-finite coefficient");
      std::vector<long long> key(t.k.data(), t.k.data() + t.k.size());
      if (!seen.insert(key).second)
        throw Error("sum '" + f.name + "' repeats an exponent vector");
    }
  }
}

double reduce_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

Character::Character(const Eigen::VectorXd& angles) : theta(angles) {
  for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = reduce_angle(theta(j));
}

Eigen::MatrixXd frequencies(const ExpSum& f, const GeneratorMatrix& omega) {
  Eigen::MatrixXd out(omega.dim(), static_cast<Eigen::Index>(f.terms.size()));
  for (std::size_t t = 0; t < f.terms.size(); ++t) out.col(t) = omega.frequency(f.terms[t].k);
  return out;
}

namespace {

// Re<z,lambda> and Im<z,lambda> for each term, with the overflow clamp.
void exponents(const ExpSum& f, const GeneratorMatrix& omega, const CVector& z, bool clamp,
               std::vector<Complex>& out) {
  check_length(z.size(), omega.dim(), "point");
  Eigen::MatrixXd lam = frequencies(f, omega);
  if (clamp) {
    double lmax = 0.0;
    for (Eigen::Index t = 0; t < lam.cols(); ++t) lmax = std::max(lmax, lam.col(t).norm());
    if (z.real().norm() * lmax > kExponentClamp)
      throw OverflowError("evaluation exponent exceeds clamp " + std::to_string(kExponentClamp));
  }
  out.resize(f.terms.size());
  for (Eigen::Index t = 0; t < lam.cols(); ++t) {
    Complex s(0.0, 0.0);
    for (Eigen::Index i = 0; i < z.size(); ++i) s += z(i) * lam(i, t);
    out[t] = s;
  }
}

}  // namespace

Complex eval_sum(const ExpSum& f, const GeneratorMatrix& omega, const CVector& z) {
  std::vector<Complex> e;
  exponents(f, omega, z, true, e);
  Complex s(0.0, 0.0);
  for (std::size_t t = 0; t < e.size(); ++t) s += f.terms[t].c * std::exp(e[t]);
  return s;
}

double support_k(const ExpSum& f, const GeneratorMatrix& omega, const CVector& z) {
  std::vector<Complex> e;
  exponents(f, omega, z, true, e);
  double m = -std::numeric_limits<double>::infinity();
  for (const Complex& v : e) m = std::max(m, v.real());
  return std::exp(m);
}

double normalized_modulus(const ExpSum& f, const GeneratorMatrix& omega, const CVector& z) {
  std::vector<Complex> e;
  exponents(f, omega, z, false, e);
  double m = -std::numeric_limits<double>::infinity();
  for (const Complex& v : e) m = std::max(m, v.real());
  Complex s(0.0, 0.0);
  for (std::size_t t = 0; t < e.size(); ++t) s += f.terms[t].c * std::exp(e[t] - m);
  return std::abs(s);
}

double K_functional(const ExpSystem& F, const CVector& z) {
  double total = 0.0;
  for (const ExpSum& f : F.sums()) total += normalized_modulus(f, F.generators(), z);
  return total;
}

ExpSystem perturb(const ExpSystem& F, const Character& chi) {
  check_length(chi.theta.size(), F.rank(), "character");
  std::vector<ExpSum> sums = F.sums();
  for (ExpSum& f : sums)
    for (ExpTerm& t : f.terms) t.c *= std::polar(1.0, t.k.cast<double>().dot(chi.theta));
  return ExpSystem(F.generators(), std::move(sums));
}

Character translation_character(const GeneratorMatrix& omega, const Eigen::VectorXd& y) {
  check_length(y.size(), omega.dim(), "translation");
  return Character(omega.values() * y);
}

double coefficient_mass(const ExpSum& f) {
  double s = 0.0;
  for (const ExpTerm& t : f.terms) s += std::abs(t.c);
  return s;
}

}  // namespace expamoeba

namespace expamoeba {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string canonical_text(const ExpSystem& F) {
  std::string s = std::string("mode ") + to_string(F.mode()) + "\n";
  const GeneratorMatrix& g = F.generators();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    s += "gen";
    for (Eigen::Index j = 0; j < g.dim(); ++j)
      s += " " + (g.mode() == Mode::rational ? g.exact()(i, j).str() : fmt_double(g.values()(i, j)));
    s += "\n";
  }
  for (const ExpSum& f : F.sums()) {
    s += "sum " + f.name + "\n";
    std::vector<const ExpTerm*> terms;
    for (const ExpTerm& t : f.terms) terms.push_back(&t);
    std::sort(terms.begin(), terms.end(), [](const ExpTerm* a, const ExpTerm* b) {
      return std::lexicographical_compare(a->k.data(), a->k.data() + a->k.size(), b->k.data(),
                                          b->k.data() + b->k.size());
    });
    for (const ExpTerm* t : terms) {
      s += "term " + fmt_double(t->c.real()) + " " + fmt_double(t->c.imag());
      for (Eigen::Index j = 0; j < t->k.size(); ++j) s += " " + std::to_string(t->k(j));
      s += "\n";
    }
  }
  return s;
}

std::string system_hash(const ExpSystem& F) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_text(F)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace expamoeba
