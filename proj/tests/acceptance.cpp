// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "expamoeba/amoeba.hpp"
#include "expamoeba/cli.hpp"
#include "expamoeba/convexity.hpp"
#include "expamoeba/exact_linalg.hpp"
#include "expamoeba/io.hpp"
#include "expamoeba/lattice.hpp"
#include "expamoeba/polytope.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace expamoeba;

namespace {

constexpr double kPi = std::numbers::pi;

std::string data_path(const std::string& name) { return std::string(EXPAMOEBA_DATA_DIR) + "/" + name; }
ExpSystem load(const std::string& name) { return parse_system_file(data_path(name)).system; }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

double circular_gap(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 2 * kPi);
  return std::min(d, 2 * kPi - d);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "NOT ") + what;
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;  // 0 when no runtime bound applies
  std::function<Outcome()> body;
};

int cli_exit(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

// exists theta with 1 + e^{x+i t1} + e^{y+i t2} = 0 iff 1, e^x, e^y obey the triangle inequalities
bool triangle_oracle(double x, double y) {
  double a = 1.0, b = std::exp(x), c = std::exp(y);
  return a <= b + c && b <= a + c && c <= a + b;
}

// Log|.| image of points (u, -1-u) on the curve 1+u+v = 0, sampled around u = 0 and u = -1
std::vector<std::uint8_t> sampled_log_amoeba(const Raster& r, int m) {
  std::vector<std::uint8_t> hit(r.cell_count(), 0);
  auto mark = [&](std::complex<double> u) {
    std::complex<double> v = -1.0 - u;
    if (std::abs(u) == 0 || std::abs(v) == 0) return;
    if (auto idx = r.locate(vec({std::log(std::abs(u)), std::log(std::abs(v))}))) hit[*idx] = 1;
  };
  for (int i = 0; i < m; ++i) {
    const double s_far = -4.0 + 8.0 * (i + 0.5) / m, s_near = -4.0 + 5.0 * (i + 0.5) / m;
    for (int j = 0; j < m; ++j) {
      const double a = 2 * kPi * j / m;
      mark(std::polar(std::exp(s_far), a));
      mark(-1.0 + std::polar(std::exp(s_near), a));
    }
  }
  return hit;
}

Outcome criterion1() {
  Outcome o;
  ExpSystem F = load("ex31.json");
  DefectResult d = membership_defect(F, vec({0.0}));
  o.require(d.value <= 1e-6, "defect(0) = " + fmt(d.value) + " <= 1e-6");
  const double gap = std::max(circular_gap(d.theta(0), 0.0), circular_gap(d.theta(1), 3 * kPi / 2));
  o.require(gap <= 1e-2, "minimizer within " + fmt(gap) + " of (0, 3pi/2)");
  ZeroSample zs = zero_sample(F, make_box({-1e-3}, {1e-3}), make_box({-1e3}, {1e3}));
  std::string found = std::to_string(zs.zeros.size()) + " zeros with |Re z| <= 1e-3 in Im [-1e3, 1e3]";
  if (!zs.zeros.empty()) {
    Complex z = zs.zeros.front()(0);
    found += " (first at " + format_complex(z) + ", residual " + fmt(zs.residuals.front()) + ")";
  }
  o.require(zs.zeros.empty() && !zs.partial, found);
  return o;
}

Outcome criterion2() {
  Outcome o;
  ExpSystem F = load("ex32.json");
  Raster r = rasterize(F, make_box({-2}, {3}), {500});
  const double h = r.cell_size()(0);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < r.cell_count(); ++i) {
    const double c = r.centre(i)(0);
    const bool near = std::min(std::fabs(c), std::fabs(c - 1.0)) <= h;
    wrong += (r.mask[i] != 0) != near;
  }
  o.require(wrong == 0, std::to_string(r.true_count()) + " true cells, " + std::to_string(wrong) +
                            " differ from the 1-cell neighbourhood of {0, 1}");
  ZeroSample zs = zero_sample(F, make_box({-2}, {3}), make_box({-100}, {100}));
  double worst = 0.0;
  for (const CVector& z : zs.zeros) {
    const double x = z(0).real();
    worst = std::max(worst, std::min(std::fabs(x), std::fabs(x - 1.0)));
  }
  o.require(!zs.zeros.empty() && !zs.partial && worst <= 1e-6,
            std::to_string(zs.zeros.size()) + " zeros in Im [-100, 100], max dist(Re z, {0,1}) = " + fmt(worst));
  return o;
}

Outcome criterion3() {
  Outcome o;
  ExpSystem F = load("ex33.json");
  DefectResult d = membership_defect(F, vec({0.0}));
  Raster y = rasterize(F, make_box({-1}, {1}), {201});
  const bool centre_true = y.mask[*y.locate(vec({0.0}))] != 0;
  o.require(d.value <= 1e-6 && centre_true, "Y-raster true at 0, defect " + fmt(d.value));
  ZeroSample zs = zero_sample(F, make_box({-1}, {1}), make_box({-1e3}, {1e3}));
  Raster f = zero_raster(zs, y.box, y.resolution);
  o.require(f.true_count() == 0 && !zs.partial, "F-raster has " + std::to_string(f.true_count()) + " true cells");
  std::string out;
  int code = cli_exit({"compare", data_path("ex33.json"), "--box", "-1:1", "--res", "201", "--im-window", "-1000:1000"},
                      &out);
  o.require(code == kExitViolation && out.find("flag=") != std::string::npos &&
                out.find("mismatch") != std::string::npos,
            "compare exit " + std::to_string(code) + " with mismatch flag");
  return o;
}

Outcome criterion4() {
  Outcome o;
  ExpSystem F = load("linear2d.json");
  Raster r = rasterize(F, make_box({-3, -3}, {3, 3}), {200, 200});
  std::vector<std::uint8_t> tri(r.cell_count());
  for (std::size_t i = 0; i < r.cell_count(); ++i) {
    Eigen::VectorXd c = r.centre(i);
    tri[i] = triangle_oracle(c(0), c(1));
  }
  const double h1 = mask_hausdorff(r.mask, tri, r.resolution);
  o.require(h1 <= 1.0, "Hausdorff to the triangle region " + fmt(h1) + " <= 1");
  const double h2 = mask_hausdorff(r.mask, sampled_log_amoeba(r, 3000), r.resolution);
  o.require(h2 <= 2.0, "Hausdorff to the sampled Log-amoeba " + fmt(h2) + " <= 2");
  return o;
}

Outcome criterion5() {
  Outcome o;
  ExpSystem F = load("cosh3.json");
  Box box = make_box({-3}, {3});
  Raster y = rasterize(F, box, {400});
  ZeroSample zs = zero_sample(F, box, make_box({-30}, {30}));
  Raster f = zero_raster(zs, box, {400});
  MaskComparison cmp = compare_masks(y, f);
  o.require(y.true_count() > 0 && f.true_count() > 0 && cmp.hausdorff_cells <= 2.0,
            "Hausdorff(Y, F) = " + fmt(cmp.hausdorff_cells) + " cells from " + std::to_string(zs.zeros.size()) +
                " zeros");
  return o;
}

Outcome criterion6() {
  Outcome o;
  Eigen::MatrixXd phi(2, 2);
  phi << 2, 1, 1, 1;
  PullbackCheck p = pullback_raster_check(load("linear2d.json"), phi, make_box({-3, -3}, {3, 3}), {150, 150});
  o.require(p.pass && p.hausdorff_cells <= 2.0, "pullback Hausdorff " + fmt(p.hausdorff_cells) + " <= 2");
  return o;
}

Outcome criterion7() {
  Outcome o;
  ExpSystem F = load("half_third.json");
  const GeneratorMatrix& omega = F.generators();
  TorusReduction t = torus_reduction(omega);
  const RationalMatrix& phi = t.phi;
  o.require(exact_determinant(phi) > Rational(0), "det phi = " + exact_determinant(phi).str() + " > 0");

  bool integral = true;
  for (Eigen::Index j = 0; j < omega.rows(); ++j) {
    RationalVector img = phi * omega.exact().row(j).transpose();
    for (Eigen::Index i = 0; i < img.size(); ++i) integral = integral && img(i).is_integer();
  }
  o.require(integral, "phi omega_j integral");

  RationalMatrix id = RationalMatrix::Identity(phi.rows(), phi.cols());
  o.require(phi * exact_inverse(phi) == id && phi * t.A == id, "phi phi^-1 = I exactly");

  RationalMatrix d = RationalMatrix::Zero(2, 2);
  d(0, 0) = Rational(2);
  d(1, 1) = Rational(3);
  RationalMatrix u = exact_inverse(d) * phi;
  bool unimodular = true;
  for (Eigen::Index i = 0; i < u.size(); ++i) unimodular = unimodular && u(i).is_integer();
  const Rational du = exact_determinant(u);
  unimodular = unimodular && (du == Rational(1) || du == Rational(-1));
  o.require(unimodular, "diag(2,3)^-1 phi unimodular");
  return o;
}

Outcome criterion8() {
  Outcome o;
  Eigen::MatrixXd w(2, 1);
  w << 1.0, std::sqrt(2.0);
  GeneratorMatrix omega(w);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  int solved = 0, verified = 0;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double freq[2] = {1.0L, std::sqrt(2.0L)};
  for (int s = 0; s < 20; ++s) {
    Eigen::VectorXd theta = vec({angle(rng), angle(rng)});
    KroneckerResult k = kronecker_solve(omega, theta, 1e-3);
    if (!k.solved) continue;
    ++solved;
    bool ok = true;
    for (int j = 0; j < 2; ++j) {
      long double m = std::fmod(freq[j] * static_cast<long double>(k.t(0)) - theta(j), two_pi);
      if (m < 0) m += two_pi;
      ok = ok && std::min(m, two_pi - m) <= 1e-3L;
    }
    verified += ok;
  }
  o.require(solved == 20 && verified == 20,
            std::to_string(solved) + "/20 solved, " + std::to_string(verified) + "/20 re-verified");

  RationalMatrix d(2, 1);
  d(0, 0) = Rational(1);
  d(1, 0) = Rational(2);
  KroneckerResult ref = kronecker_solve(GeneratorMatrix(d), vec({0.0, kPi}), 1e-3);
  bool cert = !ref.solved && ref.refusal && ref.refusal->exact && ref.refusal->q.size() == 2;
  if (cert) {
    const auto& q = ref.refusal->q;
    cert = (q[0] == 2 && q[1] == -1) || (q[0] == -2 && q[1] == 1);
  }
  o.require(cert, "refusal for (1),(2) at (0, pi) with exact certificate (2, -1)");
  return o;
}

Outcome criterion9() {
  Outcome o;
  ExpSystem F = load("ex31.json");
  const double g = std::sqrt(2.0);
  // the twisted sum in closed form: cosh z + cosh(g z) - 2
  auto twisted = [&](Complex z) { return std::cosh(z) + std::cosh(g * z) - 2.0; };
  const std::vector<double> tols = {1e-1, 1e-2, 1e-3};
  std::vector<Eigen::VectorXd> ts = translation_sequence(F, Character(vec({0.0, 3 * kPi / 2})), tols);
  const std::vector<Complex> zs = {0.0, 0.5, -0.5, Complex(0, 1), Complex(0, -1)};
  std::vector<double> sup;
  for (const Eigen::VectorXd& t : ts) {
    double s = 0.0;
    for (Complex z : zs) {
      CVector w(1);
      w(0) = z + Complex(0, t(0));
      s = std::max(s, std::abs(eval_sum(F.sums()[0], F.generators(), w) - twisted(z)));
    }
    sup.push_back(s);
  }
  bool decreasing = sup.size() == 3;
  for (std::size_t i = 1; i < sup.size(); ++i) decreasing = decreasing && sup[i] < sup[i - 1];
  std::string list;
  for (double s : sup) list += (list.empty() ? "" : ", ") + fmt(s);
  o.require(decreasing, "sup deviations " + list + " decreasing");
  return o;
}

bool zero_violated(const Mask& X) { return zero_convexity_probe(X, 10000, 1).violated(); }
bool one_violated(const Mask& X) { return one_convexity_probe(X).violated(); }

Outcome criterion10() {
  Outcome o;
  FixtureParams three;
  three.count = 3;
  Mask pts = synthetic_fixture("removed_points", three);
  o.require(zero_violated(pts) && one_violated(pts), "removed_points: both probes violate");
  Mask lines = synthetic_fixture("removed_lines", three);
  ProbeReport l1 = one_convexity_probe(lines);
  o.require(zero_violated(lines) && !l1.violated() && l1.cycles > 0,
            "removed_lines: 0-probe violates, 1-probe clean over " + std::to_string(l1.cycles) + " cycles");
  Mask half = synthetic_fixture("halfspace");
  o.require(!zero_violated(half) && !one_violated(half), "halfspace: both clean");

  int fixtures = 0, broken = 0;
  for (int dims : {2, 3})
    for (const std::string& name : fixture_names()) {
      if (name == "tower" && dims == 3) continue;
      for (int count : {1, 3}) {
        FixtureParams p;
        p.dims = dims;
        p.res = dims == 2 ? 64 : 32;
        p.count = count;
        Mask X = synthetic_fixture(name, p);
        ++fixtures;
        if (!zero_violated(X) && one_violated(X)) ++broken;
      }
    }
  o.require(broken == 0, "monotone on " + std::to_string(fixtures - broken) + "/" + std::to_string(fixtures) +
                             " fixtures");

  const bool z0 = zero_violated(lines), o0 = l1.violated();
  int agree = 0;
  std::vector<Eigen::Matrix3i> rots = cube_rotations();
  for (const Eigen::Matrix3i& R : rots) {
    Mask Y = rotate_mask(lines, R);
    agree += zero_violated(Y) == z0 && one_violated(Y) == o0;
  }
  o.require(rots.size() == 24 && agree == 24, "verdicts invariant under " + std::to_string(agree) + "/24 rotations");
  return o;
}

Outcome criterion11() {
  Outcome o;
  ExpSystem F = load("two_sum_3d.json");
  Raster r = rasterize(F, make_box({-2, -2, -2}, {2, 2, 2}), {48, 48, 48});
  OneProbeOptions opt;
  opt.sections = 20;
  ProbeReport p = one_convexity_probe(complement_mask(r), opt);
  o.require(!p.violated(), std::to_string(p.one_violations.size()) + " violations over " + std::to_string(p.cycles) +
                               " cycles, " + std::to_string(p.inconclusive) + " inconclusive");
  return o;
}

Outcome criterion12() {
  Outcome o;
  int singles = 0, closed = 0;
  for (const auto& entry : std::filesystem::directory_iterator(EXPAMOEBA_DATA_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ExpSystem F;
    try {
      F = parse_system_file(entry.path().string()).system;
    } catch (const DependentGenerators&) {
      continue;
    }
    if (F.card() != 1) continue;
    ++singles;
    closed += closed_spectra_check(F).closed;
  }
  o.require(singles > 0 && closed == singles,
            std::to_string(closed) + "/" + std::to_string(singles) + " single-sum fixtures closed");
  SpectraVerdict v = closed_spectra_check(load("parallel_segments.json"));
  bool witness = !v.closed && v.witness && !v.witness->has_singleton_summand();
  if (witness)
    for (const Polytope<double>& f : v.witness->summand_faces) witness = witness && !f.is_point();
  o.require(witness, "parallel_segments open with all per-sum faces non-singleton");
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "irrational pair: defect at 0, no zeros near Re 0", 30, criterion1},
      {2, "product example raster and zeros", 60, criterion2},
      {3, "system with empty zero set but nonempty amoeba", 0, criterion3},
      {4, "linear2d raster against triangle and sampling oracles", 300, criterion4},
      {5, "cosh3 amoeba equals closure of real parts of zeros", 0, criterion5},
      {6, "pullback by [[2,1],[1,1]]", 0, criterion6},
      {7, "torus reduction of half_third", 0, criterion7},
      {8, "Kronecker targets and refusal", 60, criterion8},
      {9, "translation sequence convergence", 0, criterion9},
      {10, "convexity probe calibration", 0, criterion10},
      {11, "1-probe on the two-sum system at 48^3", 600, criterion11},
      {12, "closed spectra checks", 0, criterion12},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0) out.require(secs < c.budget_seconds, "runtime under " + fmt(c.budget_seconds) + " s");
    failed += !out.pass;
    std::printf("%s %2d %s [%.1f s]: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
