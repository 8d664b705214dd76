#include "expamoeba/polytope.hpp"

#include "expamoeba/exact_linalg.hpp"
#include "expamoeba/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace expamoeba {

namespace {

// Predicates parametrized by scalar: exact for Rational, toleranced for double.
template <typename S>
struct Geom;

template <>
struct Geom<double> {
  static bool zero(double x, double scale) { return std::abs(x) <= kGeomTol * std::max(1.0, scale); }
  static int sign(double x, double scale) { return zero(x, scale) ? 0 : (x > 0 ? 1 : -1); }
  static double mag(double x) { return std::abs(x); }
  static double to_d(double x) { return x; }
};

template <>
struct Geom<Rational> {
  static bool zero(const Rational& x, double) { return x.is_zero(); }
  static int sign(const Rational& x, double) { return x.sign(); }
  static double mag(const Rational& x) { return std::abs(x.to_double()); }
  static double to_d(const Rational& x) { return x.to_double(); }
};

template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
double cloud_scale(const PointSet<S>& pts) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < pts.cols(); ++j)
    for (Eigen::Index i = 0; i < pts.rows(); ++i) s = std::max(s, Geom<S>::mag(pts(i, j)));
  return s;
}

template <typename S>
bool lex_less(const PointSet<S>& pts, int a, int b) {
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    if (pts(i, a) < pts(i, b)) return true;
    if (pts(i, b) < pts(i, a)) return false;
  }
  return false;
}

template <typename S>
bool same_point(const PointSet<S>& pts, int a, int b, double scale) {
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    if (!Geom<S>::zero(pts(i, a) - pts(i, b), scale)) return false;
  return true;
}

// Representatives of distinct points, in lexicographic order.
template <typename S>
std::vector<int> distinct_points(const PointSet<S>& pts, double scale) {
  std::vector<int> idx(pts.cols());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return lex_less(pts, a, b); });
  std::vector<int> out;
  for (int i : idx) {
    bool dup = false;
    for (int j : out)
      if (same_point(pts, i, j, scale)) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(i);
  }
  return out;
}

// Affine rank of the selected points and coordinates on which the affine hull
// projects injectively.
template <typename S>
int affine_frame(const PointSet<S>& pts, const std::vector<int>& ids, std::vector<int>& coords);

template <>
int affine_frame<Rational>(const PointSet<Rational>& pts, const std::vector<int>& ids,
                           std::vector<int>& coords) {
  coords.clear();
  if (ids.size() <= 1) return 0;
  RationalMatrix d(static_cast<Eigen::Index>(ids.size()) - 1, pts.rows());
  for (std::size_t r = 1; r < ids.size(); ++r) d.row(r - 1) = (pts.col(ids[r]) - pts.col(ids[0])).transpose();
  coords = rref(d);
  return static_cast<int>(coords.size());
}

template <>
int affine_frame<double>(const PointSet<double>& pts, const std::vector<int>& ids,
                         std::vector<int>& coords) {
  coords.clear();
  if (ids.size() <= 1) return 0;
  Eigen::MatrixXd d(static_cast<Eigen::Index>(ids.size()) - 1, pts.rows());
  for (std::size_t r = 1; r < ids.size(); ++r) d.row(r - 1) = (pts.col(ids[r]) - pts.col(ids[0])).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= kGeomTol * std::max(1.0, cloud_scale(pts))) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * sv(0)) ++rank;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
  for (int i = 0; i < rank; ++i) coords.push_back(qr.colsPermutation().indices()(i));
  std::sort(coords.begin(), coords.end());
  return rank;
}

template <typename S>
S cross2(const Vec<S>& o, const Vec<S>& a, const Vec<S>& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

template <typename S>
Vec<S> cross3(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> c(3);
  c(0) = a(1) * b(2) - a(2) * b(1);
  c(1) = a(2) * b(0) - a(0) * b(2);
  c(2) = a(0) * b(1) - a(1) * b(0);
  return c;
}

template <typename S>
struct LocalFace {
  std::vector<int> verts;  // indices into the projected cloud
  Vec<S> normal;           // projected coordinates
  int dim;
};

template <typename S>
std::vector<LocalFace<S>> faces_1d(const std::vector<Vec<S>>& q) {
  int lo = 0, hi = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i) {
    if (q[i](0) < q[lo](0)) lo = i;
    if (q[hi](0) < q[i](0)) hi = i;
  }
  Vec<S> minus(1), plus(1);
  minus(0) = S(-1);
  plus(0) = S(1);
  return {{{lo}, minus, 0}, {{hi}, plus, 0}};
}

template <typename S>
std::vector<LocalFace<S>> faces_2d(const std::vector<Vec<S>>& q, double scale) {
  const int m = static_cast<int>(q.size());
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (q[a](0) < q[b](0)) return true;
    if (q[b](0) < q[a](0)) return false;
    return q[a](1) < q[b](1);
  });
  const double s2 = scale * scale;
  std::vector<int> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t start = hull.size();
    for (int t = 0; t < m; ++t) {
      int i = pass == 0 ? idx[t] : idx[m - 1 - t];
      while (hull.size() >= start + 2 &&
             Geom<S>::sign(cross2<S>(q[hull[hull.size() - 2]], q[hull.back()], q[i]), s2) <= 0)
        hull.pop_back();
      hull.push_back(i);
    }
    hull.pop_back();
  }
  const int k = static_cast<int>(hull.size());
  std::vector<Vec<S>> edge_normal(k);
  for (int e = 0; e < k; ++e) {
    const Vec<S>& a = q[hull[e]];
    const Vec<S>& b = q[hull[(e + 1) % k]];
    Vec<S> nrm(2);
    nrm(0) = b(1) - a(1);
    nrm(1) = a(0) - b(0);
    edge_normal[e] = nrm;
  }
  std::vector<LocalFace<S>> out;
  for (int v = 0; v < k; ++v) {
    Vec<S> nrm = edge_normal[(v + k - 1) % k] + edge_normal[v];
    out.push_back({{hull[v]}, nrm, 0});
  }
  for (int e = 0; e < k; ++e) out.push_back({{hull[e], hull[(e + 1) % k]}, edge_normal[e], 1});
  return out;
}

template <typename S>
std::vector<LocalFace<S>> faces_3d(const std::vector<Vec<S>>& q, double scale) {
  const int m = static_cast<int>(q.size());
  const double s3 = scale * scale * scale;
  struct Facet {
    std::vector<int> on;
    Vec<S> normal;
  };
  std::vector<Facet> facets;
  std::map<std::vector<int>, int> seen;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k) {
        Vec<S> nrm = cross3<S>(Vec<S>(q[j] - q[i]), Vec<S>(q[k] - q[i]));
        bool degenerate = true;
        for (int c = 0; c < 3; ++c)
          if (!Geom<S>::zero(nrm(c), scale * scale)) degenerate = false;
        if (degenerate) continue;
        int pos = 0, neg = 0;
        std::vector<int> on;
        for (int l = 0; l < m; ++l) {
          int sg = Geom<S>::sign(nrm.dot(Vec<S>(q[l] - q[i])), s3);
          if (sg > 0) ++pos;
          else if (sg < 0) ++neg;
          else on.push_back(l);
        }
        if (pos > 0 && neg > 0) continue;
        if (seen.count(on)) continue;
        seen[on] = static_cast<int>(facets.size());
        if (pos > 0) nrm = Vec<S>(-nrm);
        facets.push_back({on, nrm});
      }
  std::vector<std::vector<int>> incident(m);
  for (int f = 0; f < static_cast<int>(facets.size()); ++f)
    for (int p : facets[f].on) incident[p].push_back(f);
  std::vector<int> verts;
  for (int p = 0; p < m; ++p)
    if (incident[p].size() >= 3) verts.push_back(p);
  std::vector<bool> is_vertex(m, false);
  for (int v : verts) is_vertex[v] = true;

  std::vector<LocalFace<S>> out;
  for (int v : verts) {
    Vec<S> nrm = Vec<S>::Constant(3, S(0));
    for (int f : incident[v]) nrm += facets[f].normal;
    out.push_back({{v}, nrm, 0});
  }
  for (std::size_t a = 0; a < verts.size(); ++a)
    for (std::size_t b = a + 1; b < verts.size(); ++b) {
      std::vector<int> common;
      std::set_intersection(incident[verts[a]].begin(), incident[verts[a]].end(),
                            incident[verts[b]].begin(), incident[verts[b]].end(),
                            std::back_inserter(common));
      if (common.size() < 2) continue;
      Vec<S> nrm = Vec<S>::Constant(3, S(0));
      for (int f : common) nrm += facets[f].normal;
      out.push_back({{verts[a], verts[b]}, nrm, 1});
    }
  for (const Facet& f : facets) {
    std::vector<int> fv;
    for (int p : f.on)
      if (is_vertex[p]) fv.push_back(p);
    out.push_back({fv, f.normal, 2});
  }
  return out;
}

}  // namespace

template <typename Scalar>
std::vector<HullFace<Scalar>> hull_faces(const PointSet<Scalar>& points) {
  if (points.cols() == 0) throw Error("hull of an empty point set");
  if (points.rows() > 3) throw DimensionError("face enumeration supports n <= 3");
  const double scale = cloud_scale(points);
  std::vector<int> ids = distinct_points(points, scale);
  std::vector<int> coords;
  const int d = affine_frame(points, ids, coords);
  const Eigen::Index n = points.rows();

  std::vector<Vec<Scalar>> q(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    q[i].resize(d);
    for (int c = 0; c < d; ++c) q[i](c) = points(coords[c], ids[i]);
  }
  std::vector<LocalFace<Scalar>> local;
  if (d == 1) local = faces_1d(q);
  if (d == 2) local = faces_2d(q, scale);
  if (d == 3) local = faces_3d(q, scale);

  auto lift = [&](const Vec<Scalar>& u) {
    Vec<Scalar> full = Vec<Scalar>::Constant(n, Scalar(0));
    for (int c = 0; c < d; ++c) full(coords[c]) = u(c);
    return full;
  };
  auto to_input = [&](std::vector<int> v) {
    for (int& i : v) i = ids[i];
    std::sort(v.begin(), v.end(), [&](int a, int b) { return lex_less(points, a, b); });
    return v;
  };

  std::vector<HullFace<Scalar>> out;
  std::vector<int> extreme;
  if (d == 0) {
    extreme = {0};
  } else {
    for (const auto& f : local)
      if (f.dim == 0) extreme.push_back(f.verts[0]);
  }
  for (const auto& f : local) out.push_back({to_input(f.verts), lift(f.normal), f.dim});
  out.push_back({to_input(extreme), Vec<Scalar>::Constant(n, Scalar(0)), d});
  return out;
}

template <typename Scalar>
Polytope<Scalar>::Polytope(const PointSet<Scalar>& points) {
  std::vector<HullFace<Scalar>> faces = hull_faces(points);
  const HullFace<Scalar>& whole = faces.back();
  vertices_.resize(points.rows(), static_cast<Eigen::Index>(whole.vertices.size()));
  for (std::size_t j = 0; j < whole.vertices.size(); ++j) vertices_.col(j) = points.col(whole.vertices[j]);
  dimension_ = whole.dimension;
}

template <typename Scalar>
Polytope<double> Polytope<Scalar>::to_double() const {
  PointSet<double> v(vertices_.rows(), vertices_.cols());
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = Geom<Scalar>::to_d(vertices_(i, j));
  return Polytope<double>(v);
}

template <typename Scalar>
int affine_dimension(const PointSet<Scalar>& points) {
  if (points.cols() == 0) return -1;
  std::vector<int> ids = distinct_points(points, cloud_scale(points));
  std::vector<int> coords;
  return affine_frame(points, ids, coords);
}

template <typename Scalar>
PointSet<Scalar> minkowski_cloud(const PointSet<Scalar>& p, const PointSet<Scalar>& q) {
  if (p.rows() != q.rows()) throw DimensionError("Minkowski sum of different ambient dimensions");
  PointSet<Scalar> out(p.rows(), p.cols() * q.cols());
  for (Eigen::Index a = 0; a < p.cols(); ++a)
    for (Eigen::Index b = 0; b < q.cols(); ++b) out.col(a * q.cols() + b) = p.col(a) + q.col(b);
  return out;
}

namespace {

template <typename S>
PointSet<S> sum_frequencies(const ExpSum& f, const GeneratorMatrix& omega);

template <>
PointSet<double> sum_frequencies<double>(const ExpSum& f, const GeneratorMatrix& omega) {
  return frequencies(f, omega);
}

template <>
PointSet<Rational> sum_frequencies<Rational>(const ExpSum& f, const GeneratorMatrix& omega) {
  PointSet<Rational> out(omega.dim(), static_cast<Eigen::Index>(f.terms.size()));
  for (std::size_t t = 0; t < f.terms.size(); ++t) out.col(t) = omega.exact_frequency(f.terms[t].k);
  return out;
}

template <typename S>
FaceDecomposition face_from_normal(const ExpSystem& F, const Vec<S>& u) {
  FaceDecomposition fd;
  fd.normal.resize(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) fd.normal(i) = Geom<S>::to_d(u(i));
  fd.numeric = std::is_same_v<S, double>;
  PointSet<S> total;
  for (const ExpSum& f : F.sums()) {
    PointSet<S> lam = sum_frequencies<S>(f, F.generators());
    std::vector<S> val(lam.cols());
    for (Eigen::Index t = 0; t < lam.cols(); ++t) val[t] = u.dot(lam.col(t));
    S best = *std::max_element(val.begin(), val.end());
    double scale = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) scale += Geom<S>::mag(u(i));
    scale *= std::max(1.0, cloud_scale(lam));
    std::vector<int> keep;
    for (Eigen::Index t = 0; t < lam.cols(); ++t)
      if (Geom<S>::zero(best - val[t], scale)) keep.push_back(static_cast<int>(t));
    PointSet<S> pts(lam.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) pts.col(j) = lam.col(keep[j]);
    Polytope<S> face(pts);
    fd.term_indices.push_back(keep);
    fd.summand_faces.push_back(face.to_double());
    total = total.size() == 0 ? face.vertices() : Polytope<S>(minkowski_cloud<S>(total, face.vertices())).vertices();
  }
  Polytope<S> whole(total);
  fd.face = whole.to_double();
  fd.dimension = whole.dimension();
  return fd;
}

template <typename S>
std::vector<FaceDecomposition> faces_of(const ExpSystem& F) {
  Polytope<S> gamma = system_polytope<S>(F);
  std::vector<FaceDecomposition> out;
  for (const HullFace<S>& hf : hull_faces(gamma.vertices())) out.push_back(face_from_normal<S>(F, hf.normal));
  std::sort(out.begin(), out.end(), [](const FaceDecomposition& a, const FaceDecomposition& b) {
    return a.term_indices < b.term_indices;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const FaceDecomposition& a, const FaceDecomposition& b) {
                          return a.term_indices == b.term_indices;
                        }),
            out.end());
  return out;
}

}  // namespace

template <typename Scalar>
Polytope<Scalar> newton_polytope(const ExpSum& f, const GeneratorMatrix& omega) {
  return Polytope<Scalar>(sum_frequencies<Scalar>(f, omega));
}

template <typename Scalar>
Polytope<Scalar> system_polytope(const ExpSystem& F) {
  PointSet<Scalar> acc;
  for (const ExpSum& f : F.sums()) {
    Polytope<Scalar> p = newton_polytope<Scalar>(f, F.generators());
    acc = acc.size() == 0 ? p.vertices() : Polytope<Scalar>(minkowski_cloud<Scalar>(acc, p.vertices())).vertices();
  }
  return Polytope<Scalar>(acc);
}

bool FaceDecomposition::has_singleton_summand() const {
  for (const Polytope<double>& p : summand_faces)
    if (p.is_point()) return true;
  return false;
}

FaceDecomposition face_in_direction(const ExpSystem& F, const Eigen::VectorXd& u) {
  if (u.size() != F.dim()) throw DimensionError("direction has the wrong length");
  if (u.isZero(0.0)) throw Error("zero direction");
  if (F.mode() == Mode::rational) {
    try {
      RationalVector ue(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) ue(i) = Rational::from_double(u(i));
      return face_from_normal<Rational>(F, ue);
    } catch (const OverflowError&) {
      // fall through to toleranced arithmetic
    }
  }
  return face_from_normal<double>(F, u);
}

std::vector<FaceDecomposition> enumerate_faces(const ExpSystem& F) {
  if (F.dim() > 3) throw DimensionError("face enumeration supports n <= 3");
  if (F.mode() == Mode::rational) return faces_of<Rational>(F);
  return faces_of<double>(F);
}

std::vector<FaceDecomposition> enumerate_low_faces(const ExpSystem& F) {
  std::vector<FaceDecomposition> out;
  for (FaceDecomposition& fd : enumerate_faces(F))
    if (fd.dimension < static_cast<int>(F.card())) out.push_back(std::move(fd));
  return out;
}

SpectraVerdict closed_spectra_check(const ExpSystem& F) {
  SpectraVerdict v;
  for (FaceDecomposition& fd : enumerate_low_faces(F))
    if (!fd.has_singleton_summand()) {
      v.closed = false;
      v.witness = std::move(fd);
      break;
    }
  return v;
}

ExpSystem trace(const ExpSystem& F, const FaceDecomposition& face) {
  if (face.term_indices.size() != F.card()) throw Error("foreign face: sum count differs");
  for (std::size_t s = 0; s < F.card(); ++s)
    for (int t : face.term_indices[s])
      if (t < 0 || t >= static_cast<int>(F.sums()[s].terms.size()))
        throw Error("foreign face: term index out of range");
  FaceDecomposition expect;
  if (face.normal.size() != F.dim()) throw Error("foreign face: normal has the wrong length");
  if (face.normal.isZero(0.0)) {
    expect.term_indices.resize(F.card());
    for (std::size_t s = 0; s < F.card(); ++s) {
      expect.term_indices[s].resize(F.sums()[s].terms.size());
      std::iota(expect.term_indices[s].begin(), expect.term_indices[s].end(), 0);
    }
  } else {
    expect = face_in_direction(F, face.normal);
  }
  if (expect.term_indices != face.term_indices) throw Error("foreign face: terms do not match its normal");
  std::vector<ExpSum> sums;
  for (std::size_t s = 0; s < F.card(); ++s) {
    ExpSum g{F.sums()[s].name, {}};
    for (int t : face.term_indices[s]) g.terms.push_back(F.sums()[s].terms[t]);
    sums.push_back(std::move(g));
  }
  return ExpSystem(F.generators(), std::move(sums));
}

const char* to_string(RegularityKind k) {
  switch (k) {
    case RegularityKind::certified_by_closure: return "certified_by_closure";
    case RegularityKind::heuristic_positive: return "heuristic_positive";
    case RegularityKind::suspected_fail: return "suspected_fail";
  }
  return "?";
}

namespace {

double radical_inverse(unsigned long long i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

InfimumEstimate K_infimum_estimate(const ExpSystem& F, int samples, double radius) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13};
  const Eigen::Index n = F.dim();
  const Eigen::Index d = 2 * n;
  auto K_at = [&](const Eigen::VectorXd& x) {
    CVector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = Complex(x(i), x(n + i));
    return K_functional(F, z);
  };
  InfimumEstimate best;
  best.value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(d);
  int accepted = 0;
  for (unsigned long long i = 1; accepted < samples && i < 64ull * static_cast<unsigned>(samples) + 64; ++i) {
    Eigen::VectorXd x(d);
    for (Eigen::Index c = 0; c < d; ++c) x(c) = (2.0 * radical_inverse(i, primes[c]) - 1.0) * radius;
    if (x.norm() > radius) continue;
    ++accepted;
    double v = K_at(x);
    if (v < best.value) {
      best.value = v;
      best_x = x;
    }
  }
  double step = radius / std::pow(std::max(samples, 1), 1.0 / static_cast<double>(d));
  for (int round = 0; round < 4; ++round) {
    SimplexResult r = nelder_mead(K_at, best_x, Eigen::VectorXd::Constant(d, step), 500, 0.0);
    if (r.value < best.value) {
      best.value = r.value;
      best_x = r.x;
    }
    step *= 0.1;
  }
  best.point.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) best.point(i) = Complex(best_x(i), best_x(n + i));
  return best;
}

RegularityVerdict regularity_estimate(const ExpSystem& F, int samples, double radius) {
  RegularityVerdict v;
  if (closed_spectra_check(F).closed) return v;
  v.epsilon = std::numeric_limits<double>::infinity();
  for (const FaceDecomposition& fd : enumerate_low_faces(F)) {
    InfimumEstimate e = K_infimum_estimate(trace(F, fd), samples, radius);
    if (e.value < *v.epsilon) {
      v.epsilon = e.value;
      v.point = e.point;
      v.face = fd;
    }
  }
  v.kind = *v.epsilon < 1e-6 ? RegularityKind::suspected_fail : RegularityKind::heuristic_positive;
  return v;
}

DimGate dim_gate(const ExpSystem& F) {
  DimGate g;
  g.card = static_cast<int>(F.card());
  g.dim_affine = F.mode() == Mode::rational ? system_polytope<Rational>(F).dimension()
                                            : system_polytope<double>(F).dimension();
  g.zeros_expected = g.dim_affine >= g.card;
  return g;
}

namespace {

void for_each_subset(int m, int k, std::vector<int>& cur, int start,
                     const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(cur.size()) == k) {
    fn(cur);
    return;
  }
  for (int i = start; i < m; ++i) {
    cur.push_back(i);
    for_each_subset(m, k, cur, i + 1, fn);
    cur.pop_back();
  }
}

}  // namespace

double distance_to_hull(const Eigen::VectorXd& x, const PointSet<double>& v) {
  if (v.cols() == 0) throw Error("distance to an empty hull");
  const int m = static_cast<int>(v.cols());
  const int kmax = std::min<int>(m, static_cast<int>(v.rows()) + 1);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> cur;
  for (int k = 1; k <= kmax; ++k)
    for_each_subset(m, k, cur, 0, [&](const std::vector<int>& s) {
      const Eigen::VectorXd& v0 = v.col(s[0]);
      if (k == 1) {
        best = std::min(best, (x - v0).norm());
        return;
      }
      Eigen::MatrixXd a(v.rows(), k - 1);
      for (int j = 1; j < k; ++j) a.col(j - 1) = v.col(s[j]) - v0;
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
      qr.setThreshold(1e-12);
      if (qr.rank() < k - 1) return;
      Eigen::VectorXd y = qr.solve(x - v0);
      double first = 1.0 - y.sum();
      if (first < -1e-12 || (y.array() < -1e-12).any()) return;
      best = std::min(best, (v0 + a * y - x).norm());
    });
  return best;
}

double hausdorff_distance(const Polytope<double>& p, const Polytope<double>& q) {
  if (p.ambient_dim() != q.ambient_dim()) throw DimensionError("Hausdorff distance across dimensions");
  double h = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) h = std::max(h, distance_to_hull(p.vertices().col(j), q.vertices()));
  for (Eigen::Index j = 0; j < q.size(); ++j) h = std::max(h, distance_to_hull(q.vertices().col(j), p.vertices()));
  return h;
}

template class Polytope<double>;
template class Polytope<Rational>;
template int affine_dimension<double>(const PointSet<double>&);
template int affine_dimension<Rational>(const PointSet<Rational>&);
template PointSet<double> minkowski_cloud<double>(const PointSet<double>&, const PointSet<double>&);
template PointSet<Rational> minkowski_cloud<Rational>(const PointSet<Rational>&, const PointSet<Rational>&);
template std::vector<HullFace<double>> hull_faces<double>(const PointSet<double>&);
template std::vector<HullFace<Rational>> hull_faces<Rational>(const PointSet<Rational>&);
template Polytope<double> newton_polytope<double>(const ExpSum&, const GeneratorMatrix&);
template Polytope<Rational> newton_polytope<Rational>(const ExpSum&, const GeneratorMatrix&);
template Polytope<double> system_polytope<double>(const ExpSystem&);
template Polytope<Rational> system_polytope<Rational>(const ExpSystem&);

}  // namespace expamoeba
