#include "expamoeba/amoeba.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace expamoeba {

namespace {

constexpr double kPi = std::numbers::pi;

struct NearZero {};
struct OutOfBudget {};

// One sum in one variable, evaluated with the factor exp(-max lambda x) removed.
struct Univariate {
  std::vector<Complex> c;
  std::vector<double> lambda;
  double lmax = 0.0, lmin = 0.0, mass = 0.0;

  Univariate(const ExpSum& f, const GeneratorMatrix& omega) {
    Eigen::MatrixXd lam = frequencies(f, omega);
    for (std::size_t t = 0; t < f.terms.size(); ++t) {
      c.push_back(f.terms[t].c);
      lambda.push_back(lam(0, t));
      mass += std::abs(f.terms[t].c);
    }
    lmax = *std::max_element(lambda.begin(), lambda.end());
    lmin = *std::min_element(lambda.begin(), lambda.end());
  }
  double width() const { return lmax - lmin; }
  double shift(double x) const { return x >= 0 ? lmax * x : lmin * x; }
  Complex g(Complex z) const {
    const double m = shift(z.real());
    Complex s(0.0, 0.0);
    for (std::size_t t = 0; t < c.size(); ++t) s += c[t] * std::exp(lambda[t] * z - m);
    return s;
  }
  Complex dg(Complex z) const {
    const double m = shift(z.real());
    Complex s(0.0, 0.0);
    for (std::size_t t = 0; t < c.size(); ++t) s += c[t] * lambda[t] * std::exp(lambda[t] * z - m);
    return s;
  }
  Complex raw(Complex z) const {
    Complex s(0.0, 0.0);
    for (std::size_t t = 0; t < c.size(); ++t) s += c[t] * std::exp(lambda[t] * z);
    return s;
  }
};

struct Contour {
  const Univariate& f;
  long long& evals;
  long long budget;
  double hmax;

  struct Sample {
    Complex z, v;  // v = g(z) * exp(shift(Re z))^-1
    double m;
  };

  Sample eval(Complex z) const {
    if (++evals > budget) throw OutOfBudget{};
    Sample s{z, f.g(z), f.shift(z.real())};
    if (std::abs(s.v) <= 1e-11 * f.mass) throw NearZero{};
    return s;
  }

  // |f'| on the segment, scaled by exp(-m)
  double lipschitz(double xa, double xb, double m) const {
    double L = 0.0;
    for (std::size_t t = 0; t < f.c.size(); ++t)
      L += std::abs(f.c[t]) * std::abs(f.lambda[t]) * std::exp(std::max(f.lambda[t] * xa, f.lambda[t] * xb) - m);
    return L;
  }

  // Accepted once the image of [a,b] provably stays in a disc around f(a)
  // that misses 0; then the argument change is the principal one.
  double segment(const Sample& a, const Sample& b, int depth) const {
    const double h = std::abs(b.z - a.z);
    if (lipschitz(a.z.real(), b.z.real(), a.m) * h < 0.9 * std::abs(a.v)) return std::arg(b.v / a.v);
    if (depth > 60) throw NearZero{};
    Sample mid = eval(0.5 * (a.z + b.z));
    return segment(a, mid, depth + 1) + segment(mid, b, depth + 1);
  }

  double edge(Complex a, Complex b) const {
    const double len = std::abs(b - a);
    const int steps = std::max(8, static_cast<int>(std::ceil(len / hmax)));
    Sample prev = eval(a);
    double total = 0.0;
    for (int i = 1; i <= steps; ++i) {
      Sample cur = eval(i == steps ? b : a + (b - a) * (static_cast<double>(i) / steps));
      total += segment(prev, cur, 0);
      prev = cur;
    }
    return total;
  }

  // zeros inside [x0,x1] x [y0,y1], counted along the CCW boundary
  int count(double x0, double x1, double y0, double y1) const {
    double total = edge({x0, y0}, {x1, y0}) + edge({x1, y0}, {x1, y1}) + edge({x1, y1}, {x0, y1}) +
                   edge({x0, y1}, {x0, y0});
    double w = total / (2 * kPi);
    long long k = std::llround(w);
    if (std::abs(w - static_cast<double>(k)) > 0.2 || k < 0) throw NearZero{};
    return static_cast<int>(k);
  }
};

struct Rect {
  double x0, x1, y0, y1;
  int count;
};

std::vector<Complex> isolate_univariate(const Univariate& f, Rect outer, long long& evals, long long budget,
                                        int retries, bool& partial, std::string& note) {
  std::vector<Complex> found;
  const double hmax = 0.2 / std::max({std::abs(f.lmax), std::abs(f.lmin), 1e-3});
  Contour ct{f, evals, budget, hmax};
  // the outer boundary is nudged outward if it passes through a zero
  bool ok = false;
  for (int a = 0; a <= retries && !ok; ++a) {
    try {
      outer.count = ct.count(outer.x0, outer.x1, outer.y0, outer.y1);
      ok = true;
    } catch (const NearZero&) {
      const double d = 1e-6 * (a + 1) * (1.0 + std::max(outer.x1 - outer.x0, outer.y1 - outer.y0));
      outer.x0 -= d * 0.7;
      outer.x1 += d * 1.1;
      outer.y0 -= d * 1.3;
      outer.y1 += d * 0.9;
    }
  }
  if (!ok) throw Error("contour-through-zero retries exhausted on the outer boundary");
  const double leaf = 0.5 / std::max({std::abs(f.lmax), std::abs(f.lmin), 1e-3});
  std::vector<Rect> stack{outer};
  static const double offsets[] = {0.0, 0.071, -0.113, 0.193, -0.231, 0.293, -0.317};
  while (!stack.empty()) {
    Rect R = stack.back();
    stack.pop_back();
    if (R.count == 0) continue;
    const double wx = R.x1 - R.x0, wy = R.y1 - R.y0;
    const double side = std::max(wx, wy);
    if (side <= leaf) {
      Complex z(0.5 * (R.x0 + R.x1), 0.5 * (R.y0 + R.y1));
      bool conv = false;
      for (int it = 0; it < 80; ++it) {
        Complex d = f.dg(z);
        if (d == Complex(0.0, 0.0)) break;
        Complex step = f.g(z) / d;
        z -= step;
        ++evals;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
          conv = true;
          break;
        }
      }
      const double slack = 1e-9 * (1.0 + side);
      bool inside = z.real() >= R.x0 - slack && z.real() <= R.x1 + slack && z.imag() >= R.y0 - slack &&
                    z.imag() <= R.y1 + slack;
      if ((conv || std::abs(f.g(z)) < 1e-13 * f.mass) && inside && (R.count == 1 || side < 1e-9)) {
        found.push_back(z);
        continue;
      }
      if (side < 1e-9) {
        partial = true;
        note = "unresolved zero cluster";
        continue;
      }
    }
    bool split_x = wx >= wy;
    bool done = false;
    for (double off : offsets) {
      double s = split_x ? R.x0 + wx * (0.5 + off) : R.y0 + wy * (0.5 + off);
      try {
        Rect a = R, b = R;
        if (split_x) {
          a.x1 = s;
          b.x0 = s;
        } else {
          a.y1 = s;
          b.y0 = s;
        }
        a.count = ct.count(a.x0, a.x1, a.y0, a.y1);
        b.count = ct.count(b.x0, b.x1, b.y0, b.y1);
        if (a.count + b.count != R.count) {
          partial = true;
          note = "inconsistent zero counts after subdivision";
        }
        stack.push_back(b);
        stack.push_back(a);
        done = true;
        break;
      } catch (const NearZero&) {
      }
    }
    if (!done) throw Error("contour-through-zero retries exhausted");
  }
  return found;
}

ZeroSample sample_univariate(const ExpSystem& F, const Box& re_box, const Box& im_window, const ZeroOptions& opt) {
  ZeroSample zs;
  std::vector<Univariate> sums;
  for (const ExpSum& f : F.sums()) sums.emplace_back(f, F.generators());
  std::size_t primary = 0;
  for (std::size_t s = 1; s < sums.size(); ++s)
    if (sums[s].width() < sums[primary].width()) primary = s;
  if (sums[primary].width() == 0.0) return zs;  // a monomial never vanishes
  Rect outer{re_box.lo(0), re_box.hi(0), im_window.lo(0), im_window.hi(0), 0};
  std::vector<Complex> cand;
  try {
    cand = isolate_univariate(sums[primary], outer, zs.evaluations, opt.budget, opt.retries, zs.partial, zs.note);
  } catch (const OutOfBudget&) {
    zs.partial = true;
    zs.note = "evaluation budget exhausted";
  }
  for (const Complex& z : cand) {
    if (z.real() < re_box.lo(0) || z.real() > re_box.hi(0) || z.imag() < im_window.lo(0) ||
        z.imag() > im_window.hi(0))
      continue;
    double res = 0.0;
    for (const Univariate& u : sums) res = std::max(res, std::abs(u.raw(z)));
    if (res > opt.residual) continue;
    bool dup = false;
    for (const CVector& w : zs.zeros)
      if (std::abs(w(0) - z) <= opt.dedupe) dup = true;
    if (dup) continue;
    CVector v(1);
    v(0) = z;
    zs.zeros.push_back(v);
    zs.residuals.push_back(res);
  }
  return zs;
}

ZeroSample sample_newton(const ExpSystem& F, const Box& re_box, const Box& im_window, const ZeroOptions& opt) {
  const Eigen::Index n = F.dim();
  if (static_cast<Eigen::Index>(F.card()) != n)
    throw Error("multistart Newton needs a square system (card F = n)");
  ZeroSample zs;
  std::vector<Eigen::MatrixXd> lam;
  for (const ExpSum& f : F.sums()) lam.push_back(frequencies(f, F.generators()));
  auto eval = [&](const CVector& z, CVector& val, Eigen::MatrixXcd& jac) {
    ++zs.evaluations;
    val.resize(n);
    jac.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const ExpSum& f = F.sums()[i];
      Complex s(0.0, 0.0);
      Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(n);
      for (std::size_t t = 0; t < f.terms.size(); ++t) {
        Complex e(0.0, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) e += z(j) * lam[i](j, t);
        if (std::abs(e.real()) > kExponentClamp) throw OverflowError("Newton iterate left the safe range");
        Complex term = f.terms[t].c * std::exp(e);
        s += term;
        for (Eigen::Index j = 0; j < n; ++j) grad(j) += term * lam[i](j, t);
      }
      val(i) = s;
      jac.row(i) = grad.transpose();
    }
  };
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < opt.starts; ++s) {
    if (zs.evaluations > opt.budget) {
      zs.partial = true;
      zs.note = "evaluation budget exhausted";
      break;
    }
    CVector z(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double re = re_box.lo(j) + unit(rng) * (re_box.hi(j) - re_box.lo(j));
      double im = im_window.lo(j) + unit(rng) * (im_window.hi(j) - im_window.lo(j));
      z(j) = Complex(re, im);
    }
    try {
      CVector val;
      Eigen::MatrixXcd jac;
      eval(z, val, jac);
      double res = val.cwiseAbs().maxCoeff();
      int polish = 0;
      for (int it = 0; it < 100 && polish < 3; ++it) {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jac);
        if (std::abs(lu.determinant()) == 0.0) break;
        CVector step = lu.solve(val);
        double alpha = 1.0;
        CVector nz, nval;
        Eigen::MatrixXcd njac;
        bool improved = false;
        while (alpha > 1e-4) {
          nz = z - alpha * step;
          eval(nz, nval, njac);
          if (nval.cwiseAbs().maxCoeff() < res || res <= opt.residual) {
            improved = true;
            break;
          }
          alpha *= 0.5;
        }
        if (!improved) break;
        z = nz;
        val = nval;
        jac = njac;
        res = val.cwiseAbs().maxCoeff();
        if (res <= opt.residual) ++polish;
      }
      if (res > opt.residual) continue;
      bool inside = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (z(j).real() < re_box.lo(j) || z(j).real() > re_box.hi(j)) inside = false;
        if (z(j).imag() < im_window.lo(j) || z(j).imag() > im_window.hi(j)) inside = false;
      }
      if (!inside) continue;
      bool dup = false;
      for (const CVector& w : zs.zeros)
        if ((w - z).norm() <= opt.dedupe) dup = true;
      if (dup) continue;
      zs.zeros.push_back(z);
      zs.residuals.push_back(res);
    } catch (const OverflowError&) {
      continue;
    }
  }
  return zs;
}

}  // namespace

ZeroSample zero_sample(const ExpSystem& F, const Box& re_box, const Box& im_window, const ZeroOptions& opt) {
  if (re_box.dim() != F.dim() || im_window.dim() != F.dim())
    throw DimensionError("zero search boxes must match the ambient dimension");
  if (F.dim() == 1) return sample_univariate(F, re_box, im_window, opt);
  if (F.dim() == 2) return sample_newton(F, re_box, im_window, opt);
  throw DimensionError("zero sampling supports n <= 2");
}

}  // namespace expamoeba
