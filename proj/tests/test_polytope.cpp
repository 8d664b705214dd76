#include "support.hpp"

#include "expamoeba/polytope.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace testing;

namespace {

std::vector<Eigen::VectorXd> columns(const PointSet<double>& p) {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index j = 0; j < p.cols(); ++j) out.push_back(p.col(j));
  return out;
}

// frequencies of every term, by brute force
std::vector<Eigen::VectorXd> spectrum(const ExpSum& f, const GeneratorMatrix& omega) {
  std::vector<Eigen::VectorXd> out;
  for (const ExpTerm& t : f.terms) out.push_back(omega.frequency(t.k));
  return out;
}

double support(const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& u) {
  double best = -1e300;
  for (const auto& p : pts) best = std::max(best, u.dot(p));
  return best;
}

// every sum of one point per summand
std::vector<Eigen::VectorXd> brute_minkowski(const ExpSystem& F) {
  std::vector<Eigen::VectorXd> acc{Eigen::VectorXd::Zero(F.dim())};
  for (const ExpSum& f : F.sums()) {
    std::vector<Eigen::VectorXd> next;
    for (const auto& a : acc)
      for (const auto& b : spectrum(f, F.generators())) next.push_back(a + b);
    acc = next;
  }
  return acc;
}

// planar point: endpoints of the u-maximal face of the brute cloud along the perpendicular
std::pair<Eigen::Vector2d, Eigen::Vector2d> brute_face_2d(const std::vector<Eigen::VectorXd>& cloud,
                                                          const Eigen::Vector2d& u) {
  double m = support(cloud, u);
  Eigen::Vector2d t(-u(1), u(0));
  Eigen::Vector2d lo, hi;
  double tlo = 1e300, thi = -1e300;
  for (const auto& p : cloud) {
    if (u.dot(p) < m - 1e-9) continue;
    if (t.dot(p) < tlo) tlo = t.dot(p), lo = p;
    if (t.dot(p) > thi) thi = t.dot(p), hi = p;
  }
  return {lo, hi};
}

ExpSystem random_triangle_pair(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-1000, 1000);
  std::vector<ExpSum> sums;
  for (int s = 0; s < 2; ++s) {
    std::vector<T> terms;
    for (int t = 0; t < 3; ++t) terms.push_back({1.0 + t, {d(rng), d(rng)}});
    sums.push_back(make_sum(terms, "f" + std::to_string(s)));
  }
  return ExpSystem(rational_identity(2), sums);
}

// Hausdorff distance by dense sampling of both boundaries (planar convex polygons)
double sampled_hausdorff(const std::vector<Eigen::Vector2d>& P, const std::vector<Eigen::Vector2d>& Q) {
  auto dense = [](const std::vector<Eigen::Vector2d>& poly) {
    std::vector<Eigen::Vector2d> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector2d& a = poly[i];
      const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
      for (int s = 0; s < 4000; ++s) out.push_back(a + (b - a) * (s / 4000.0));
    }
    return out;
  };
  // inside test for a CCW convex polygon
  auto inside = [](const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& x) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      Eigen::Vector2d e = poly[(i + 1) % poly.size()] - poly[i], w = x - poly[i];
      if (e.x() * w.y() - e.y() * w.x() < -1e-12) return false;
    }
    return true;
  };
  auto directed = [&](const std::vector<Eigen::Vector2d>& A, const std::vector<Eigen::Vector2d>& B) {
    std::vector<Eigen::Vector2d> da = dense(A), db = dense(B);
    double worst = 0.0;
    for (const auto& a : da) {
      if (inside(B, a)) continue;
      double best = 1e300;
      for (const auto& b : db) best = std::min(best, (a - b).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(P, Q), directed(Q, P));
}

std::vector<Eigen::Vector2d> ccw_hull_of(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

TEST_CASE("newton_polytope of small sums") {
  GeneratorMatrix one = rational_identity(1);
  auto mono = newton_polytope<Rational>(make_sum({{2.0, {5}}}), one);
  CHECK(mono.is_point());
  CHECK(mono.dimension() == 0);
  CHECK(mono.vertices()(0, 0) == Rational(5));

  auto seg = newton_polytope<Rational>(make_sum({{1.0, {1}}, {1.0, {-1}}, {1.0, {0}}}), one);
  REQUIRE(seg.size() == 2);
  CHECK(seg.vertices()(0, 0) == Rational(-1));
  CHECK(seg.vertices()(0, 1) == Rational(1));
  CHECK(seg.dimension() == 1);

  ExpSystem ex31 = load("ex31.json");
  auto p = newton_polytope<double>(ex31.sums()[0], ex31.generators());
  std::vector<Eigen::VectorXd> sp = spectrum(ex31.sums()[0], ex31.generators());
  double lo = 1e300, hi = -1e300;
  for (const auto& s : sp) lo = std::min(lo, s(0)), hi = std::max(hi, s(0));
  REQUIRE(p.size() == 2);
  CHECK(p.vertices()(0, 0) == doctest::Approx(lo));
  CHECK(p.vertices()(0, 1) == doctest::Approx(hi));
  CHECK(hi == doctest::Approx(kSqrt2));
}

TEST_CASE("vertices are extreme points") {
  PointSet<Rational> pts(2, 6);
  pts << Rational(0), Rational(2), Rational(1), Rational(0), Rational(2), Rational(1),  //
      Rational(0), Rational(0), Rational(0), Rational(2), Rational(2), Rational(1);
  Polytope<Rational> sq(pts);
  CHECK(sq.size() == 4);
  CHECK(sq.dimension() == 2);
}

TEST_CASE("face_in_direction") {
  GeneratorMatrix one = rational_identity(1);
  ExpSum sym = make_sum({{1.0, {1}}, {1.0, {-1}}});
  ExpSystem F(one, {sym, sym});
  FaceDecomposition d = face_in_direction(F, vec({1.0}));
  REQUIRE(d.summand_faces.size() == 2);
  for (const auto& s : d.summand_faces) {
    CHECK(s.is_point());
    CHECK(s.vertices()(0, 0) == doctest::Approx(1.0));
  }
  CHECK(d.face.is_point());
  CHECK(d.face.vertices()(0, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(face_in_direction(F, vec({0.0})), Error);

  ExpSystem tri(rational_identity(2), {make_sum({{1.0, {0, 0}}, {1.0, {1, 0}}, {1.0, {0, 1}}})});
  FaceDecomposition g = face_in_direction(tri, vec({0.3, 0.7}));
  CHECK(g.face.is_point());
  CHECK(g.dimension == 0);
}

TEST_CASE("face_in_direction agrees with the brute Minkowski cloud") {
  GeneratorMatrix id = rational_identity(2);
  ExpSystem F(id, {make_sum({{1.0, {0, 0}}, {1.0, {2, 0}}, {1.0, {0, 1}}, {1.0, {1, 1}}}),
                   make_sum({{1.0, {0, 0}}, {1.0, {1, 2}}, {1.0, {-1, 1}}})});
  std::vector<Eigen::VectorXd> cloud = brute_minkowski(F);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-2, 2);
  int checked = 0, edges = 0;
  while (checked < 50) {
    Eigen::Vector2d u(d(rng), d(rng));
    if (u.isZero()) continue;
    ++checked;
    FaceDecomposition fd = face_in_direction(F, u);
    auto [lo, hi] = brute_face_2d(cloud, u);
    const PointSet<double>& v = fd.face.vertices();
    if ((lo - hi).norm() < 1e-12) {
      REQUIRE(v.cols() == 1);
      CHECK((v.col(0) - lo).norm() < 1e-9);
    } else {
      ++edges;
      REQUIRE(v.cols() == 2);
      bool direct = (v.col(0) - lo).norm() < 1e-9 && (v.col(1) - hi).norm() < 1e-9;
      bool swapped = (v.col(0) - hi).norm() < 1e-9 && (v.col(1) - lo).norm() < 1e-9;
      CHECK((direct || swapped));
    }
  }
  CHECK(edges > 0);
}

TEST_CASE("enumerate_low_faces") {
  GeneratorMatrix id = rational_identity(2);
  ExpSystem mono(id, {make_sum({{3.0, {1, 2}}})});
  CHECK(enumerate_low_faces(mono).size() == 1);

  ExpSystem tri(id, {make_sum({{1.0, {0, 0}}, {1.0, {1, 0}}, {1.0, {0, 1}}})});
  auto low = enumerate_low_faces(tri);
  CHECK(low.size() == 3);
  for (const auto& f : low) CHECK(f.dimension == 0);
  CHECK(enumerate_faces(tri).size() == 7);

  ExpSystem segs(id, {make_sum({{1.0, {0, 0}}, {1.0, {1, 0}}}), make_sum({{1.0, {0, 0}}, {1.0, {1, 2}}})});
  auto pl = enumerate_low_faces(segs);
  int vertices = 0, edges = 0;
  for (const auto& f : pl) (f.dimension == 0 ? vertices : edges) += 1;
  CHECK(vertices == 4);
  CHECK(edges == 4);
  CHECK(pl.size() == 8);

  // brute force over sampled directions reaches the same set of faces
  std::set<std::vector<std::vector<int>>> seen;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int s = 0; s < 4000; ++s) seen.insert(face_in_direction(segs, vec({g(rng), g(rng)})).term_indices);
  for (Eigen::Vector2d u : {Eigen::Vector2d(0, 1), Eigen::Vector2d(0, -1), Eigen::Vector2d(2, -1), Eigen::Vector2d(-2, 1)})
    seen.insert(face_in_direction(segs, u).term_indices);
  std::set<std::vector<std::vector<int>>> listed;
  for (const auto& f : pl) listed.insert(f.term_indices);
  CHECK(seen == listed);
}

TEST_CASE("face coherence: vertices of each face are sums of summand vertices") {
  ExpSystem F = load("two_sum_3d.json");
  for (const FaceDecomposition& fd : enumerate_faces(F)) {
    for (const auto& v : columns(fd.face.vertices())) {
      std::vector<Eigen::VectorXd> acc{Eigen::VectorXd::Zero(3)};
      for (const auto& s : fd.summand_faces) {
        std::vector<Eigen::VectorXd> next;
        for (const auto& a : acc)
          for (const auto& b : columns(s.vertices())) next.push_back(a + b);
        acc = next;
      }
      bool hit = false;
      for (const auto& a : acc) hit = hit || (a - v).norm() < 1e-9;
      CHECK(hit);
    }
  }
}

TEST_CASE("support-function identity") {
  ExpSystem F = load("two_sum_3d.json");
  auto total = system_polytope<double>(F);
  std::vector<std::vector<Eigen::VectorXd>> parts;
  for (const ExpSum& f : F.sums()) parts.push_back(columns(newton_polytope<double>(f, F.generators()).vertices()));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int s = 0; s < 200; ++s) {
    Eigen::VectorXd u = vec({g(rng), g(rng), g(rng)});
    double rhs = 0.0;
    for (const auto& p : parts) rhs += support(p, u);
    CHECK(support(columns(total.vertices()), u) == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("closed_spectra_check") {
  for (const char* name : {"ex31.json", "ex32.json", "linear2d.json", "cosh3.json", "laurent2d.json"}) {
    CAPTURE(name);
    CHECK(closed_spectra_check(load(name)).closed);
  }
  SpectraVerdict v = closed_spectra_check(load("parallel_segments.json"));
  CHECK_FALSE(v.closed);
  REQUIRE(v.witness.has_value());
  CHECK_FALSE(v.witness->has_singleton_summand());
  CHECK(v.witness->dimension < 2);

  std::mt19937_64 rng(99);
  for (int draw = 0; draw < 20; ++draw) CHECK(closed_spectra_check(random_triangle_pair(rng)).closed);
}

TEST_CASE("spectral checks read spectra only") {
  ExpSystem ps = load("parallel_segments.json");
  ExpSystem ex31 = load("ex31.json");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 6.3);
  for (int s = 0; s < 5; ++s) {
    Character c1(vec({u(rng)})), c2(vec({u(rng), u(rng)}));
    CHECK(closed_spectra_check(perturb(ps, c1)).closed == closed_spectra_check(ps).closed);
    auto a = newton_polytope<double>(ex31.sums()[0], ex31.generators());
    auto b = newton_polytope<double>(perturb(ex31, c2).sums()[0], ex31.generators());
    CHECK(a.vertices() == b.vertices());
  }
}

TEST_CASE("trace") {
  GeneratorMatrix id = rational_identity(2);
  ExpSystem tri(id, {make_sum({{1.0, {0, 0}}, {1.0, {1, 0}}, {1.0, {0, 1}}})});
  ExpSystem t = trace(tri, face_in_direction(tri, vec({1.0, 0.0})));
  REQUIRE(t.sums()[0].terms.size() == 1);
  CHECK(t.sums()[0].terms[0].k == tri.sums()[0].terms[1].k);

  ExpSystem g = trace(tri, face_in_direction(tri, vec({0.7, 0.2})));
  for (const ExpSum& f : g.sums()) CHECK(f.terms.size() == 1);

  ExpSystem F = load("two_sum_3d.json");
  for (const FaceDecomposition& fd : enumerate_faces(F)) {
    ExpSystem tr = trace(F, fd);
    for (std::size_t s = 0; s < F.card(); ++s) {
      // direct test: a term is kept iff its frequency reaches the support value
      std::vector<Eigen::VectorXd> sp = spectrum(F.sums()[s], F.generators());
      std::size_t expect = 0;
      if (fd.normal.isZero()) {
        expect = sp.size();
      } else {
        double m = support(sp, fd.normal);
        for (const auto& p : sp) expect += fd.normal.dot(p) >= m - 1e-9;
      }
      CHECK(tr.sums()[s].terms.size() == expect);
    }
  }
}

TEST_CASE("regularity_estimate") {
  CHECK(regularity_estimate(load("ex31.json")).kind == RegularityKind::certified_by_closure);
  GeneratorMatrix one = rational_identity(1);
  ExpSystem mono(one, {make_sum({{Complex(0.0, 2.5), {3}}})});
  CHECK(K_infimum_estimate(mono, 200, 5.0).value == doctest::Approx(2.5).epsilon(1e-12));

  ExpSum em1 = make_sum({{1.0, {1}}, {-1.0, {0}}});
  ExpSystem dup(one, {em1, em1});
  RegularityVerdict v = regularity_estimate(dup, 2000, 10.0);
  CHECK(v.kind == RegularityKind::suspected_fail);
  REQUIRE(v.epsilon.has_value());
  CHECK(*v.epsilon < 1e-6);
  REQUIRE(v.point.has_value());
  // near a common zero 2 pi i m
  Complex z = (*v.point)(0);
  CHECK(std::abs(z.real()) < 1e-3);
  CHECK(std::abs(std::remainder(z.imag(), 2 * kPi)) < 1e-3);
}

TEST_CASE("dim_gate") {
  GeneratorMatrix one = rational_identity(1);
  DimGate a = dim_gate(ExpSystem(one, {make_sum({{1.0, {1}}, {-1.0, {0}}})}));
  CHECK(a.dim_affine == 1);
  CHECK(a.zeros_expected);
  DimGate b = dim_gate(ExpSystem(one, {make_sum({{4.0, {1}}})}));
  CHECK(b.dim_affine == 0);
  CHECK_FALSE(b.zeros_expected);
  DimGate c = dim_gate(load("ex33.json"));
  CHECK(c.dim_affine == 1);
  CHECK(c.card == 2);
  CHECK_FALSE(c.zeros_expected);
}

TEST_CASE("hausdorff_distance") {
  PointSet<double> a(1, 2), b(1, 2);
  a << 0.0, 1.0;
  b << 0.0, 2.0;
  Polytope<double> P(a), Q(b);
  CHECK(hausdorff_distance(P, P) == 0.0);
  CHECK(hausdorff_distance(P, Q) == doctest::Approx(1.0));

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<Eigen::Vector2d> pa, qa;
    PointSet<double> pm(2, 6), qm(2, 6);
    for (int i = 0; i < 6; ++i) {
      pa.emplace_back(u(rng), u(rng));
      qa.emplace_back(u(rng) + 0.5, u(rng));
      pm.col(i) = pa.back();
      qm.col(i) = qa.back();
    }
    double got = hausdorff_distance(Polytope<double>(pm), Polytope<double>(qm));
    double oracle = sampled_hausdorff(ccw_hull_of(pa), ccw_hull_of(qa));
    CHECK(std::fabs(got - oracle) < 1e-3);
  }
}
