#include "expamoeba/amoeba.hpp"
#include "expamoeba/lattice.hpp"
#include "expamoeba/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace expamoeba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int default_grid(Eigen::Index r) {
  if (r <= 2) return 64;
  if (r == 3) return 32;
  return 16;
}

}  // namespace

DefectEvaluator::DefectEvaluator(const ExpSystem& F, DefectOptions opt, bool validate)
    : opt_(opt), n_(F.dim()), r_(F.rank()) {
  if (validate) require_independent(F.generators());
  grid_ = opt.grid > 0 ? opt.grid : default_grid(r_);
  opt_.grid = grid_;
  for (const ExpSum& f : F.sums()) {
    std::vector<Term> terms;
    double diam = 0.0;
    Eigen::MatrixXd lam = frequencies(f, F.generators());
    for (std::size_t t = 0; t < f.terms.size(); ++t) {
      Term term{f.terms[t].c, lam.col(t), {}};
      for (Eigen::Index j = 0; j < r_; ++j) term.k.push_back(static_cast<int>(f.terms[t].k(j)));
      terms.push_back(std::move(term));
      for (std::size_t s = 0; s < t; ++s) diam = std::max(diam, (lam.col(t) - lam.col(s)).norm());
    }
    lipschitz_ = std::max(lipschitz_, coefficient_mass(f) * diam);
    sums_.push_back(std::move(terms));
  }
  roots_.resize(grid_);
  for (int g = 0; g < grid_; ++g) roots_[g] = std::polar(1.0, kTwoPi * g / grid_);
}

void DefectEvaluator::weights(const Eigen::VectorXd& x, std::vector<Complex>& w) const {
  w.clear();
  for (const auto& terms : sums_) {
    double m = -std::numeric_limits<double>::infinity();
    for (const Term& t : terms) m = std::max(m, t.lambda.dot(x));
    for (const Term& t : terms) w.push_back(t.c * std::exp(t.lambda.dot(x) - m));
  }
}

double DefectEvaluator::objective(const Eigen::VectorXd& x, const Eigen::VectorXd& theta) const {
  double worst = 0.0;
  for (const auto& terms : sums_) {
    double m = -std::numeric_limits<double>::infinity();
    for (const Term& t : terms) m = std::max(m, t.lambda.dot(x));
    Complex acc(0.0, 0.0);
    for (const Term& t : terms) {
      double phase = 0.0;
      for (Eigen::Index j = 0; j < r_; ++j) phase += t.k[j] * theta(j);
      acc += t.c * std::exp(Complex(t.lambda.dot(x) - m, phase));
    }
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

DefectResult DefectEvaluator::at(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw DimensionError("defect point has the wrong length");
  std::vector<Complex> w;
  weights(x, w);
  const int G = grid_;
  const int r = static_cast<int>(r_);
  const std::size_t nt = w.size();

  // flattened term data; idx[t] = <k_t, g> mod G maintained by an odometer
  std::vector<int> inc(nt * r), wrap(nt * r), idx(nt, 0);
  std::vector<std::size_t> bounds{0};
  {
    std::size_t t = 0;
    for (const auto& terms : sums_) {
      for (const Term& term : terms) {
        for (int j = 0; j < r; ++j) {
          int kj = ((term.k[j] % G) + G) % G;
          inc[t * r + j] = kj;
          wrap[t * r + j] = ((G - (static_cast<long long>(G - 1) * kj) % G) % G);
        }
        ++t;
      }
      bounds.push_back(t);
    }
  }
  struct Cell {
    double v;
    long long code;
  };
  std::array<Cell, 3> best{{{std::numeric_limits<double>::infinity(), -1},
                            {std::numeric_limits<double>::infinity(), -1},
                            {std::numeric_limits<double>::infinity(), -1}}};
  const int keep = std::clamp(opt_.restarts, 1, 3);
  std::vector<int> g(r, 0);
  long long total = 1;
  for (int j = 0; j < r; ++j) total *= G;
  for (long long code = 0; code < total; ++code) {
    const double thr = best[keep - 1].v;
    double worst = 0.0;
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      Complex acc(0.0, 0.0);
      for (std::size_t t = bounds[s]; t < bounds[s + 1]; ++t) acc += w[t] * roots_[idx[t]];
      worst = std::max(worst, std::norm(acc));
      if (worst >= thr) break;
    }
    if (worst < thr) {
      int pos = keep - 1;
      while (pos > 0 && best[pos - 1].v > worst) {
        best[pos] = best[pos - 1];
        --pos;
      }
      best[pos] = {worst, code};
    }
    // advance the odometer (last coordinate fastest)
    for (int j = r - 1; j >= 0; --j) {
      if (g[j] + 1 < G) {
        ++g[j];
        for (std::size_t t = 0; t < nt; ++t) {
          idx[t] += inc[t * r + j];
          if (idx[t] >= G) idx[t] -= G;
        }
        break;
      }
      g[j] = 0;
      for (std::size_t t = 0; t < nt; ++t) {
        idx[t] += wrap[t * r + j];
        if (idx[t] >= G) idx[t] -= G;
      }
    }
  }

  auto theta_obj = [&](const Eigen::VectorXd& th) {
    double worst = 0.0;
    std::size_t t = 0;
    for (const auto& terms : sums_) {
      Complex acc(0.0, 0.0);
      for (const Term& term : terms) {
        double phase = 0.0;
        for (int j = 0; j < r; ++j) phase += term.k[j] * th(j);
        acc += w[t++] * std::polar(1.0, phase);
      }
      worst = std::max(worst, std::abs(acc));
    }
    return worst;
  };
  DefectResult res;
  res.value = std::numeric_limits<double>::infinity();
  res.x = x;
  const Eigen::VectorXd step = Eigen::VectorXd::Constant(r, kTwoPi / G);
  for (int b = 0; b < keep; ++b) {
    if (best[b].code < 0) continue;
    Eigen::VectorXd th0(r);
    long long c = best[b].code;
    for (int j = r - 1; j >= 0; --j) {
      th0(j) = kTwoPi * static_cast<double>(c % G) / G;
      c /= G;
    }
    double v0 = std::sqrt(best[b].v);
    SimplexResult sr = nelder_mead(theta_obj, th0, step, opt_.max_iter, 1e-15);
    Eigen::VectorXd th = sr.value < v0 ? sr.x : th0;
    double v = std::min(sr.value, v0);
    if (v < res.value) {
      res.value = v;
      res.theta = th;
      res.budget_exceeded = !sr.converged && sr.value < v0;
    }
  }
  for (Eigen::Index j = 0; j < res.theta.size(); ++j) res.theta(j) = reduce_angle(res.theta(j));
  return res;
}

DefectResult DefectEvaluator::box_minimum(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                          const DefectResult& seed) const {
  // x = mid + half * sin(u) keeps the simplex inside the box without clamping,
  // which would collapse it against a face and stall short of minima near the edge
  const Eigen::Index d = n_ + r_;
  const Eigen::VectorXd mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  auto to_x = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return mid + half.cwiseProduct(v.head(n_).array().sin().matrix());
  };
  auto obj = [&](const Eigen::VectorXd& v) { return objective(to_x(v), v.tail(r_)); };
  DefectResult best = seed;
  Eigen::VectorXd v0(d);
  for (Eigen::Index i = 0; i < n_; ++i)
    v0(i) = half(i) > 0 ? std::asin(std::clamp((seed.x(i) - mid(i)) / half(i), -1.0, 1.0)) : 0.0;
  v0.tail(r_) = seed.theta;
  Eigen::VectorXd step(d);
  step.head(n_).setConstant(0.5);
  step.tail(r_).setConstant(kTwoPi / grid_);
  for (int round = 0; round < 3; ++round) {
    SimplexResult sr = nelder_mead(obj, v0, step, opt_.max_iter, 1e-15);
    if (sr.value < best.value) {
      best.value = sr.value;
      best.x = to_x(sr.x);
      best.theta = sr.x.tail(r_);
      best.budget_exceeded = !sr.converged;
      v0 = sr.x;
    }
    step *= 0.25;
  }
  for (Eigen::Index j = 0; j < best.theta.size(); ++j) best.theta(j) = reduce_angle(best.theta(j));
  return best;
}

DefectResult membership_defect(const ExpSystem& F, const Eigen::VectorXd& x, const DefectOptions& opt) {
  return DefectEvaluator(F, opt).at(x);
}

}  // namespace expamoeba
