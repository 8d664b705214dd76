#include "expamoeba/lattice.hpp"

#include "expamoeba/exact_linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace expamoeba {

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using LLMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void gram_schmidt(const LMatrix& b, LMatrix& bstar, LMatrix& mu, LVector& bb) {
  const Eigen::Index m = b.rows();
  bstar = b;
  mu = LMatrix::Zero(m, m);
  bb.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      mu(i, j) = bb(j) > 0 ? b.row(i).dot(bstar.row(j)) / bb(j) : 0.0L;
      bstar.row(i) -= mu(i, j) * bstar.row(j);
    }
    bb(i) = bstar.row(i).squaredNorm();
  }
}

long long round_ll(long double x) { return static_cast<long long>(std::llround(x)); }

// Babai nearest plane on an LLL-reduced basis; returns coefficients.
Eigen::Matrix<long long, Eigen::Dynamic, 1> babai(const LMatrix& b, const LVector& target) {
  LMatrix bstar, mu;
  LVector bb;
  gram_schmidt(b, bstar, mu, bb);
  LVector w = target;
  Eigen::Matrix<long long, Eigen::Dynamic, 1> c(b.rows());
  for (Eigen::Index i = b.rows() - 1; i >= 0; --i) {
    c(i) = bb(i) > 0 ? round_ll(w.dot(bstar.row(i).transpose()) / bb(i)) : 0;
    w -= static_cast<long double>(c(i)) * b.row(i).transpose();
  }
  return c;
}

double dist_2pi(double a) {
  double r = std::remainder(a, kTwoPi);
  return std::abs(r);
}

// Rows of omega, in order, that raise the numerical rank.
std::vector<int> independent_rows(const Eigen::MatrixXd& omega) {
  std::vector<int> chosen;
  for (Eigen::Index j = 0; j < omega.rows(); ++j) {
    Eigen::MatrixXd trial(static_cast<Eigen::Index>(chosen.size()) + 1, omega.cols());
    for (std::size_t i = 0; i < chosen.size(); ++i) trial.row(i) = omega.row(chosen[i]);
    trial.row(chosen.size()) = omega.row(j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(trial);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-10 * std::max(1.0, sv(0))) ++rank;
    if (rank == static_cast<int>(chosen.size()) + 1) chosen.push_back(static_cast<int>(j));
  }
  return chosen;
}

}  // namespace

void lll_reduce(LMatrix& b, LLMatrix& u) {
  const Eigen::Index m = b.rows();
  u = LLMatrix::Identity(m, m);
  if (m < 2) return;
  const long double delta = 0.99L;
  LMatrix bstar, mu;
  LVector bb;
  gram_schmidt(b, bstar, mu, bb);
  Eigen::Index k = 1;
  int guard = 0;
  while (k < m && guard++ < 100000) {
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      long long q = round_ll(mu(k, j));
      if (q == 0) continue;
      b.row(k) -= static_cast<long double>(q) * b.row(j);
      u.row(k) -= q * u.row(j);
      for (Eigen::Index i = 0; i < j; ++i) mu(k, i) -= static_cast<long double>(q) * mu(j, i);
      mu(k, j) -= static_cast<long double>(q);
    }
    if (bb(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bb(k - 1)) {
      ++k;
    } else {
      b.row(k).swap(b.row(k - 1));
      u.row(k).swap(u.row(k - 1));
      gram_schmidt(b, bstar, mu, bb);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
}

GeneratorCheck validate_generators(const GeneratorMatrix& omega, RelationSearch bounds) {
  GeneratorCheck out;
  const Eigen::Index r = omega.rows(), n = omega.dim();
  if (omega.mode() == Mode::rational) {
    RationalMatrix kernel = exact_kernel(RationalMatrix(omega.exact().transpose()));
    if (kernel.cols() > 0) {
      out.ok = false;
      out.relation = RelationCertificate{primitive_integer_vector(kernel.col(0)), 0.0, true};
    }
    return out;
  }
  out.heuristic = true;
  const long double N = 1e3L / static_cast<long double>(bounds.residual_tol);
  LMatrix b(r, r + n);
  b.setZero();
  for (Eigen::Index j = 0; j < r; ++j) {
    b(j, j) = 1.0L;
    for (Eigen::Index i = 0; i < n; ++i) b(j, r + i) = N * static_cast<long double>(omega.values()(j, i));
  }
  LLMatrix u;
  lll_reduce(b, u);
  for (Eigen::Index row = 0; row < r; ++row) {
    std::vector<long long> q(r);
    long long g = 0;
    bool small = true;
    for (Eigen::Index j = 0; j < r; ++j) {
      q[j] = u(row, j);
      g = gcd_ll(g, q[j]);
      if (std::abs(static_cast<double>(q[j])) > bounds.max_coefficient) small = false;
    }
    if (g == 0 || !small) continue;
    int sign = 0;
    for (long long x : q)
      if (x != 0) {
        sign = x > 0 ? 1 : -1;
        break;
      }
    for (long long& x : q) x = x / g * sign;
    long double res = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) {
      long double s = 0.0L;
      for (Eigen::Index j = 0; j < r; ++j) s += static_cast<long double>(q[j]) * omega.values()(j, i);
      res = std::max(res, std::abs(s));
    }
    if (res <= bounds.residual_tol) {
      out.ok = false;
      out.relation = RelationCertificate{q, static_cast<double>(res), false};
      return out;
    }
  }
  return out;
}

void require_independent(const GeneratorMatrix& omega, RelationSearch bounds) {
  GeneratorCheck c = validate_generators(omega, bounds);
  if (c.ok) return;
  std::string text = "dependent generators: relation q = (";
  for (std::size_t i = 0; i < c.relation->q.size(); ++i)
    text += (i ? ", " : "") + std::to_string(c.relation->q[i]);
  text += ")";
  throw DependentGenerators(text, c.relation->q);
}

TorusReduction torus_reduction(const GeneratorMatrix& omega) {
  if (omega.mode() != Mode::rational) throw Error("torus reduction needs rational generators");
  const RationalMatrix& w = omega.exact();
  const int s = static_cast<int>(w.rows()), n = static_cast<int>(w.cols());
  if (exact_rank(w) < s) {
    GeneratorCheck c = validate_generators(omega);
    throw DependentGenerators("torus reduction needs R-independent generator rows",
                              c.relation ? c.relation->q : std::vector<long long>{});
  }
  TorusReduction red;
  red.s = s;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < n; ++j) red.mu = lcm_ll(red.mu, w(i, j).den());

  // pick the completion by maximal |det|, first in lexicographic order on ties
  std::vector<int> best;
  Rational best_det(0);
  std::vector<int> cur;
  std::function<void(int)> choose = [&](int start) {
    if (static_cast<int>(cur.size()) == n - s) {
      RationalMatrix a(n, n);
      a.leftCols(s) = w.transpose();
      for (int c = 0; c < n - s; ++c) {
        a.col(s + c).setConstant(Rational(0));
        a(cur[c], s + c) = Rational(1);
      }
      Rational d = abs(exact_determinant(a));
      if (best_det < d) {
        best_det = d;
        best = cur;
      }
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      choose(i + 1);
      cur.pop_back();
    }
  };
  choose(0);
  if (best_det.is_zero()) throw Error("no completion to a basis found");

  RationalMatrix a(n, n);
  a.leftCols(s) = w.transpose();
  for (int c = 0; c < n - s; ++c) {
    a.col(s + c).setConstant(Rational(0));
    a(best[c], s + c) = Rational(1);
  }
  red.completion = best;
  if (exact_determinant(a).sign() < 0) {
    if (n - s >= 2) {
      a.col(s).swap(a.col(s + 1));
      std::swap(red.completion[0], red.completion[1]);
    } else if (n - s == 1) {
      a.col(s) = -a.col(s);
    } else if (s >= 2) {
      a.col(0).swap(a.col(1));
    } else {
      a.col(0) = -a.col(0);
    }
  }
  red.A = a;
  red.phi = exact_inverse(a);
  red.det_sign = exact_determinant(red.phi).sign();
  return red;
}

ExpSystem pullback_system(const ExpSystem& F, const Eigen::MatrixXd& phi) {
  if (phi.rows() != F.dim() || phi.cols() != F.dim()) throw DimensionError("pullback map has the wrong size");
  double scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
  if (std::abs(phi.determinant()) <= 1e-12 * std::pow(scale, static_cast<double>(phi.rows())))
    throw Error("pullback map is singular");
  GeneratorMatrix g(Eigen::MatrixXd(F.generators().values() * phi.transpose()));
  return ExpSystem(g, F.sums());
}

ExpSystem pullback_system(const ExpSystem& F, const RationalMatrix& phi) {
  if (phi.rows() != F.dim() || phi.cols() != F.dim()) throw DimensionError("pullback map has the wrong size");
  if (exact_determinant(phi).is_zero()) throw Error("pullback map is singular");
  if (F.mode() != Mode::rational) return pullback_system(F, to_double(phi));
  GeneratorMatrix g(RationalMatrix(F.generators().exact() * phi.transpose()));
  return ExpSystem(g, F.sums());
}

std::vector<LaurentPolynomial> to_laurent(const ExpSystem& F) {
  std::vector<LaurentPolynomial> out;
  for (const ExpSum& f : F.sums()) {
    LaurentPolynomial p{f.name, {}};
    for (const ExpTerm& t : f.terms) {
      IVector e(F.dim());
      if (F.mode() == Mode::rational) {
        RationalVector lam = F.generators().exact_frequency(t.k);
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
          if (!lam(i).is_integer()) throw Error("frequency of '" + f.name + "' is not integral");
          e(i) = lam(i).num();
        }
      } else {
        Eigen::VectorXd lam = F.generators().frequency(t.k);
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
          double rv = std::round(lam(i));
          if (std::abs(lam(i) - rv) > 1e-9) throw Error("frequency of '" + f.name + "' is not integral");
          e(i) = static_cast<long long>(rv);
        }
      }
      p.terms.push_back({e, t.c});
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Rational> continued_fraction_convergents(double x, int count) {
  std::vector<Rational> out;
  if (count <= 0) return out;
  try {
    Rational v = Rational::from_double(x);
    __int128 num = v.num(), den = v.den();
    __int128 h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    while (static_cast<int>(out.size()) < count && den != 0) {
      __int128 a = num / den;
      if (num % den != 0 && num < 0) --a;  // floor
      __int128 h = a * h1 + h2, k = a * k1 + k2;
      out.push_back(Rational(static_cast<long long>(h), static_cast<long long>(k)));
      h2 = h1;
      h1 = h;
      k2 = k1;
      k1 = k;
      __int128 rem = num - a * den;
      num = den;
      den = rem;
    }
  } catch (const OverflowError&) {
    out.clear();
    long double rem = x;
    long double h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    while (static_cast<int>(out.size()) < count) {
      long double a = std::floor(rem);
      long double h = a * h1 + h2, k = a * k1 + k2;
      if (std::abs(h) > 9e18L || k > 9e18L) break;
      out.push_back(Rational(static_cast<long long>(h), static_cast<long long>(k)));
      h2 = h1;
      h1 = h;
      k2 = k1;
      k1 = k;
      long double frac = rem - a;
      if (frac == 0.0L) break;
      rem = 1.0L / frac;
    }
    if (out.empty()) throw;
  }
  while (static_cast<int>(out.size()) < count) out.push_back(out.back());
  return out;
}

ApproxSchedule rational_approx(const GeneratorMatrix& omega, int level) {
  if (level < 1) throw Error("approximation level starts at 1");
  ApproxSchedule s;
  s.level = level;
  const Eigen::Index r = omega.rows(), n = omega.dim();
  s.omega.resize(r, n);
  s.convergents.assign(r, std::vector<std::vector<Rational>>(n));
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (omega.mode() == Mode::rational) {
        s.convergents[i][j].assign(level, omega.exact()(i, j));
      } else {
        s.convergents[i][j] = continued_fraction_convergents(omega.values()(i, j), level);
      }
      s.omega(i, j) = s.convergents[i][j].back();
      s.error = std::max(s.error, std::abs(s.omega(i, j).to_double() - omega.values()(i, j)));
    }
  return s;
}

ExpSystem approximate_system(const ExpSystem& F, const ApproxSchedule& schedule) {
  return ExpSystem(GeneratorMatrix(schedule.omega), F.sums());
}

double congruence_residual(const GeneratorMatrix& omega, const Eigen::VectorXd& t, const Eigen::VectorXd& theta) {
  if (t.size() != omega.dim() || theta.size() != omega.rows()) throw DimensionError("congruence sizes");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < omega.rows(); ++j) {
    long double s = 0.0L;
    for (Eigen::Index i = 0; i < omega.dim(); ++i)
      s += static_cast<long double>(omega.values()(j, i)) * static_cast<long double>(t(i));
    worst = std::max(worst, dist_2pi(static_cast<double>(std::remainder(s - theta(j), 2.0L * std::numbers::pi_v<long double>))));
  }
  return worst;
}

KroneckerResult kronecker_solve(const GeneratorMatrix& omega, const Eigen::VectorXd& theta, double tol,
                                const KroneckerOptions& opt) {
  if (!(tol > 0)) throw Error("tolerance must be positive");
  const Eigen::Index r = omega.rows(), n = omega.dim();
  if (theta.size() != r) throw DimensionError("target has the wrong length");
  KroneckerResult res;

  GeneratorCheck check = validate_generators(omega, opt.relation_bounds);
  if (!check.ok) {
    const auto& q = check.relation->q;
    double qt = 0.0, l1 = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) {
      qt += static_cast<double>(q[j]) * theta(j);
      l1 += std::abs(static_cast<double>(q[j]));
    }
    double v = dist_2pi(qt);
    if (v > l1 * tol) {
      res.refusal = check.relation;
      res.violation = v;
      return res;
    }
  }

  auto accept = [&](const Eigen::VectorXd& t, const char* method) {
    double e = congruence_residual(omega, t, theta);
    if (e > tol) return false;
    res.solved = true;
    res.t = t;
    res.residual = e;
    res.method = method;
    return true;
  };

  const Eigen::MatrixXd& w = omega.values();
  std::vector<int> brows = independent_rows(w);
  const Eigen::Index rho = static_cast<Eigen::Index>(brows.size());
  std::vector<int> crows;
  for (Eigen::Index j = 0; j < r; ++j)
    if (std::find(brows.begin(), brows.end(), j) == brows.end()) crows.push_back(static_cast<int>(j));
  Eigen::MatrixXd B(rho, n);
  Eigen::VectorXd thetaB(rho);
  for (Eigen::Index i = 0; i < rho; ++i) {
    B.row(i) = w.row(brows[i]);
    thetaB(i) = theta(brows[i]);
  }
  Eigen::MatrixXd Bpinv = B.completeOrthogonalDecomposition().pseudoInverse();
  auto t_of = [&](const Eigen::VectorXd& pB) -> Eigen::VectorXd {
    return Bpinv * (thetaB + kTwoPi * pB);
  };

  if (crows.empty()) {
    if (accept(t_of(Eigen::VectorXd::Zero(rho)), "direct")) return res;
    throw BudgetExceeded("direct solve failed verification");
  }

  const Eigen::Index m = static_cast<Eigen::Index>(crows.size());
  Eigen::MatrixXd C(m, n);
  Eigen::VectorXd thetaC(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    C.row(i) = w.row(crows[i]);
    thetaC(i) = theta(crows[i]);
  }
  Eigen::MatrixXd M = C * Bpinv;
  Eigen::VectorXd beta = (thetaC - M * thetaB) / kTwoPi;
  for (Eigen::Index i = 0; i < m; ++i) beta(i) -= std::floor(beta(i));

  // lattice of (eps p_B, N (M p_B - p_C)) against the target (0, N beta)
  const long double eta = static_cast<long double>(tol) / static_cast<long double>(kTwoPi);
  const long double N = 4.0L / eta;
  const long double eps0 = std::pow(eta, static_cast<long double>(m) / static_cast<long double>(rho));
  const Eigen::Index d = rho + m;
  struct Candidate {
    Eigen::VectorXd t;
    double norm;
  };
  std::optional<Candidate> found;
  for (long double eps_scale : {1.0L, 0.1L, 10.0L, 0.01L, 100.0L}) {
    const long double eps = eps0 * eps_scale * 4.0L;
    LMatrix basis = LMatrix::Zero(d, d);
    for (Eigen::Index b = 0; b < rho; ++b) {
      basis(b, b) = eps;
      for (Eigen::Index c = 0; c < m; ++c) basis(b, rho + c) = N * static_cast<long double>(M(c, b));
    }
    for (Eigen::Index c = 0; c < m; ++c) basis(rho + c, rho + c) = -N;
    LMatrix reduced = basis;
    LLMatrix u;
    lll_reduce(reduced, u);
    LVector target = LVector::Zero(d);
    for (Eigen::Index c = 0; c < m; ++c) target(rho + c) = N * static_cast<long double>(beta(c));
    Eigen::Matrix<long long, Eigen::Dynamic, 1> c0 = babai(reduced, target);
    // Babai point and its {-1,0,1} neighbours in the reduced basis
    const long long combos = static_cast<long long>(std::pow(3.0, static_cast<double>(d)));
    for (long long code = 0; code < combos; ++code) {
      Eigen::Matrix<long long, Eigen::Dynamic, 1> c = c0;
      long long rest = code;
      for (Eigen::Index i = 0; i < d; ++i) {
        c(i) += rest % 3 - 1;
        rest /= 3;
      }
      Eigen::Matrix<long long, Eigen::Dynamic, 1> coeff = u.transpose() * c;
      Eigen::VectorXd pB(rho);
      for (Eigen::Index b = 0; b < rho; ++b) pB(b) = static_cast<double>(coeff(b));
      Eigen::VectorXd t = t_of(pB);
      if (congruence_residual(omega, t, theta) > tol) continue;
      double nrm = t.lpNorm<Eigen::Infinity>();
      if (!found || nrm < found->norm) found = Candidate{t, nrm};
    }
    if (found) break;
  }
  if (found && found->norm <= opt.max_box && accept(found->t, "lattice")) return res;

  // enumeration of p_B over doubling boxes, lexicographic order
  long long evaluated = 0;
  Eigen::VectorXd rowscale(rho);
  for (Eigen::Index b = 0; b < rho; ++b) rowscale(b) = B.row(b).lpNorm<1>() / kTwoPi;
  for (double T = 1.0; T <= opt.max_box; T *= 2.0) {
    std::vector<long long> bound(rho);
    for (Eigen::Index b = 0; b < rho; ++b) bound[b] = static_cast<long long>(std::ceil(T * rowscale(b))) + 1;
    std::vector<long long> p(rho);
    for (Eigen::Index b = 0; b < rho; ++b) p[b] = -bound[b];
    while (true) {
      if (++evaluated > opt.enumeration_budget) throw BudgetExceeded("Kronecker enumeration budget exhausted");
      Eigen::VectorXd pB(rho);
      for (Eigen::Index b = 0; b < rho; ++b) pB(b) = static_cast<double>(p[b]);
      Eigen::VectorXd t = t_of(pB);
      if (t.lpNorm<Eigen::Infinity>() <= T && accept(t, "enumeration")) return res;
      Eigen::Index b = rho - 1;
      while (b >= 0 && p[b] == bound[b]) {
        p[b] = -bound[b];
        --b;
      }
      if (b < 0) break;
      ++p[b];
    }
  }
  throw BudgetExceeded("Kronecker search exhausted the box |t| <= " + std::to_string(opt.max_box));
}

std::vector<Eigen::VectorXd> translation_sequence(const ExpSystem& F, const Character& chi,
                                                  const std::vector<double>& tolerances,
                                                  const KroneckerOptions& opt) {
  std::vector<Eigen::VectorXd> out;
  for (double tol : tolerances) {
    KroneckerResult r = kronecker_solve(F.generators(), chi.theta, tol, opt);
    if (!r.solved) throw DependentGenerators("character is not reachable by translations", r.refusal->q);
    out.push_back(r.t);
  }
  return out;
}

}  // namespace expamoeba
