#include "expamoeba/convexity.hpp"
#include "expamoeba/parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <random>

namespace expamoeba {

Mask::Mask(Box b, std::vector<int> res, bool fill) : box(std::move(b)), resolution(std::move(res)) {
  if (box.dim() != static_cast<Eigen::Index>(resolution.size())) throw DimensionError("mask box/resolution mismatch");
  std::size_t n = 1;
  for (int r : resolution) {
    if (r < 1) throw Error("mask resolution must be positive");
    n *= static_cast<std::size_t>(r);
  }
  data.assign(n, fill ? 1 : 0);
}

Eigen::VectorXd Mask::cell_size() const {
  Eigen::VectorXd h(dim());
  for (int i = 0; i < dim(); ++i) h(i) = (box.hi(i) - box.lo(i)) / resolution[i];
  return h;
}

std::vector<int> Mask::unravel(std::size_t index) const {
  std::vector<int> c(resolution.size());
  for (int i = dim() - 1; i >= 0; --i) {
    c[i] = static_cast<int>(index % resolution[i]);
    index /= resolution[i];
  }
  return c;
}

std::size_t Mask::ravel(const std::vector<int>& cell) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx = idx * resolution[i] + cell[i];
  return idx;
}

bool Mask::contains(const std::vector<int>& cell) const {
  for (int i = 0; i < dim(); ++i)
    if (cell[i] < 0 || cell[i] >= resolution[i]) return false;
  return true;
}

Eigen::VectorXd Mask::centre(const std::vector<int>& cell) const {
  Eigen::VectorXd h = cell_size(), c(dim());
  for (int i = 0; i < dim(); ++i) c(i) = box.lo(i) + (cell[i] + 0.5) * h(i);
  return c;
}

long long Mask::locate(const Eigen::VectorXd& y) const {
  long long idx = 0;
  for (int i = 0; i < dim(); ++i) {
    if (!(y(i) >= box.lo(i) && y(i) <= box.hi(i))) return -1;
    double h = (box.hi(i) - box.lo(i)) / resolution[i];
    int k = std::min(resolution[i] - 1, static_cast<int>(std::floor((y(i) - box.lo(i)) / h)));
    idx = idx * resolution[i] + k;
  }
  return idx;
}

std::size_t Mask::true_count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

Mask complement_mask(const Raster& r) {
  Mask X(r.box, r.resolution, false);
  for (std::size_t i = 0; i < X.data.size(); ++i) X.data[i] = r.mask[i] ? 0 : 1;
  return X;
}

Mask embed_line_mask(const Mask& line, double lo, double hi, int res) {
  if (line.dim() != 1) throw DimensionError("embed_line_mask needs a 1-D mask");
  Box b;
  b.lo = Eigen::Vector2d(line.box.lo(0), lo);
  b.hi = Eigen::Vector2d(line.box.hi(0), hi);
  Mask X(b, {line.resolution[0], res}, false);
  for (int i = 0; i < line.resolution[0]; ++i)
    for (int j = 0; j < res; ++j) X.data[static_cast<std::size_t>(i) * res + j] = line.data[i];
  return X;
}

namespace {

// neighbours of a cell along +-e_i
template <typename Fn>
void face_neighbours(const Mask& X, const std::vector<int>& c, Fn&& fn) {
  std::vector<int> q = c;
  for (int i = 0; i < X.dim(); ++i) {
    for (int s : {-1, 1}) {
      q[i] = c[i] + s;
      if (q[i] >= 0 && q[i] < X.resolution[i]) fn(X.ravel(q));
    }
    q[i] = c[i];
  }
}

}  // namespace

std::vector<int> label_components(const Mask& X, int& count) {
  std::vector<int> label(X.data.size(), -1);
  count = 0;
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < X.data.size(); ++s) {
    if (!X.data[s] || label[s] >= 0) continue;
    label[s] = count;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      face_neighbours(X, X.unravel(queue[head]), [&](std::size_t nb) {
        if (X.data[nb] && label[nb] < 0) {
          label[nb] = count;
          queue.push_back(nb);
        }
      });
    }
    ++count;
  }
  return label;
}

void check_section(const SectionSpec& s) {
  if (s.span.empty() || s.span.size() > 2) throw DimensionError("section dimension must be 1 or 2");
  for (std::size_t i = 0; i < s.span.size(); ++i) {
    if (s.span[i].size() != s.point.size()) throw DimensionError("section vectors must match the point");
    for (std::size_t j = 0; j <= i; ++j) {
      double d = s.span[i].dot(s.span[j]);
      if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-9) throw Error("section spanning vectors are not orthonormal");
    }
  }
  if (s.orientation != 1 && s.orientation != -1) throw Error("section orientation must be +1 or -1");
}

long long winding_number(const PointCycle& c, double x) {
  if (c.t.size() != c.weights.size()) throw Error("point cycle: weights and points differ in length");
  long long total = 0, after = 0;
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    if (std::abs(c.t[i] - x) <= 1e-9) throw Error("point lies on the cycle");
    total += c.weights[i];
    if (c.t[i] > x) after += c.weights[i];
  }
  if (total != 0) throw Error("point cycle weights must sum to zero");
  return after;
}

namespace {

double segment_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& x) {
  Eigen::Vector2d d = b - a;
  double len2 = d.squaredNorm();
  double t = len2 > 0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (a + t * d - x).norm();
}

double is_left(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& x) {
  return (b.x() - a.x()) * (x.y() - a.y()) - (x.x() - a.x()) * (b.y() - a.y());
}

}  // namespace

long long winding_number(const LoopCycle& c, const Eigen::Vector2d& x) {
  const auto& v = c.vertices;
  if (v.size() < 2 || v.front() != v.back()) throw Error("loop cycle must be closed (first == last)");
  long long wn = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (segment_distance(v[i], v[i + 1], x) <= 1e-9) throw Error("point lies on the cycle");
    // half-open crossing rule on the horizontal ray: a tilted ray in the limit
    if (v[i].y() <= x.y()) {
      if (v[i + 1].y() > x.y() && is_left(v[i], v[i + 1], x) > 0) ++wn;
    } else if (v[i + 1].y() <= x.y() && is_left(v[i], v[i + 1], x) < 0) {
      --wn;
    }
  }
  return wn;
}

bool nonneg_class_test(const LoopCycle& c, const Mask& section) {
  if (section.dim() != 2) throw DimensionError("section mask must be 2-D");
  for (std::size_t i = 0; i < section.data.size(); ++i) {
    if (section.data[i]) continue;
    Eigen::VectorXd p = section.centre(section.unravel(i));
    try {
      if (winding_number(c, Eigen::Vector2d(p(0), p(1))) < 0) return false;
    } catch (const Error&) {
      // a false centre on the support violates the precondition; not a class value
    }
  }
  return true;
}

namespace {

std::vector<std::vector<int>> primitive_directions(int dim) {
  std::vector<std::vector<int>> out;
  std::vector<int> d(dim, -2);
  while (true) {
    bool nonzero = false, canonical = false;
    int g = 0;
    for (int i = 0; i < dim; ++i) {
      g = std::gcd(g, std::abs(d[i]));
      if (d[i] != 0 && !nonzero) canonical = d[i] > 0;
      nonzero = nonzero || d[i] != 0;
    }
    if (nonzero && canonical && g == 1) out.push_back(d);
    int i = dim - 1;
    while (i >= 0 && d[i] == 2) d[i--] = -2;
    if (i < 0) break;
    ++d[i];
  }
  // short directions first
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    int na = 0, nb = 0;
    for (int x : a) na += x * x;
    for (int x : b) nb += x * x;
    return na < nb;
  });
  return out;
}

// first true cell along c + m d (m >= 1), its label or -1
int walk_label(const Mask& X, const std::vector<int>& labels, const std::vector<int>& c, const std::vector<int>& d,
               int sign) {
  std::vector<int> q = c;
  while (true) {
    for (int i = 0; i < X.dim(); ++i) q[i] += sign * d[i];
    if (!X.contains(q)) return -1;
    std::size_t idx = X.ravel(q);
    if (X.data[idx]) return labels[idx];
  }
}

}  // namespace

ProbeReport zero_convexity_probe(const Mask& X, long long trials, std::uint64_t seed, int threads) {
  ProbeReport rep;
  int ncomp = 0;
  std::vector<int> labels = label_components(X, ncomp);
  std::vector<std::vector<std::size_t>> members(ncomp);
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) {
      members[labels[i]].push_back(i);
      all.push_back(i);
    }
  if (all.empty()) {
    rep.notes.push_back("X is empty; nothing to probe");
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> pairs(static_cast<std::size_t>(std::max(0LL, trials)));
  for (auto& p : pairs) {
    std::size_t a = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
    const auto& m = members[labels[a]];
    std::size_t b = m[std::uniform_int_distribution<std::size_t>(0, m.size() - 1)(rng)];
    p = {a, b};
  }
  rep.trials = static_cast<long long>(pairs.size());
  const auto dirs = primitive_directions(X.dim());
  const double step = X.cell_size().minCoeff() / 4.0;
  // 0: inside, 1: certified, 2: uncertified exit
  std::vector<int> outcome(pairs.size(), 0);
  std::vector<ZeroViolation> found(pairs.size());
  parallel_for(pairs.size(), resolve_threads(threads), [&](std::size_t t) {
    auto [a, b] = pairs[t];
    if (a == b) return;
    std::vector<int> ca = X.unravel(a), cb = X.unravel(b);
    Eigen::VectorXd pa = X.centre(ca), pb = X.centre(cb);
    const int steps = std::max(1, static_cast<int>(std::ceil((pb - pa).norm() / step)));
    std::vector<std::size_t> exits;
    for (int i = 0; i <= steps && exits.size() < 32; ++i) {
      long long idx = X.locate(pa + (pb - pa) * (static_cast<double>(i) / steps));
      if (idx < 0 || X.data[idx]) continue;
      if (std::find(exits.begin(), exits.end(), static_cast<std::size_t>(idx)) == exits.end())
        exits.push_back(static_cast<std::size_t>(idx));
    }
    if (exits.empty()) return;
    outcome[t] = 2;
    const int comp = labels[a];
    for (std::size_t e : exits) {
      std::vector<int> c = X.unravel(e);
      for (const auto& d : dirs) {
        if (walk_label(X, labels, c, d, 1) == comp && walk_label(X, labels, c, d, -1) == comp) {
          outcome[t] = 1;
          found[t] = {comp, ca, cb, c};
          return;
        }
      }
    }
  });
  long long uncertified = 0;
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (outcome[t] == 1) rep.zero_violations.push_back(found[t]);
    if (outcome[t] == 2) ++uncertified;
  }
  if (uncertified > 0) {
    rep.inconclusive = uncertified;
    rep.notes.push_back(std::to_string(uncertified) + " segment exits without a grid-line certificate");
  }
  return rep;
}

namespace {

struct Pixel {
  int i, j;
};

// Outer boundary of `region` (nu x nv, row index j * nu + i), traced CCW
// through 8-connected pixel centres.
std::vector<Pixel> trace_boundary(const std::vector<std::uint8_t>& region, int nu, int nv) {
  static const int di[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static const int dj[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  auto in = [&](int i, int j) { return i >= 0 && j >= 0 && i < nu && j < nv && region[j * nu + i]; };
  auto dir_of = [&](int a, int b) {
    for (int k = 0; k < 8; ++k)
      if (di[k] == a && dj[k] == b) return k;
    return -1;
  };
  Pixel s{-1, -1};
  for (int j = 0; j < nv && s.i < 0; ++j)
    for (int i = 0; i < nu; ++i)
      if (in(i, j)) {
        s = {i, j};
        break;
      }
  std::vector<Pixel> out;
  if (s.i < 0) return out;
  out.push_back(s);
  Pixel c = s;
  int back = 6;  // south of the lowest pixel is outside
  int first_move = -1;
  for (std::size_t guard = 0; guard < static_cast<std::size_t>(8) * nu * nv + 16; ++guard) {
    int found = -1;
    for (int r = 1; r <= 8; ++r) {
      int k = (back + r) % 8;
      if (in(c.i + di[k], c.j + dj[k])) {
        found = k;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    if (c.i == s.i && c.j == s.j) {
      if (first_move < 0)
        first_move = found;
      else if (found == first_move)
        break;
    }
    int prev = (found + 7) % 8;
    Pixel n{c.i + di[found], c.j + dj[found]};
    back = dir_of(c.i + di[prev] - n.i, c.j + dj[prev] - n.j);
    c = n;
    out.push_back(c);
  }
  if (out.size() > 1 && (out.back().i != s.i || out.back().j != s.j)) out.push_back(s);
  if (out.size() > 1) out.pop_back();  // drop the closing repeat; re-added by the caller
  return out;
}

struct SectionOutcome {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  long long cycles = 0;
  long long inconclusive = 0;
};

const std::vector<Eigen::Vector3d>& section_normals() {
  static const std::vector<Eigen::Vector3d> normals = [] {
    std::vector<Eigen::Vector3d> v = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 0},
                                      {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1}};
    for (auto& x : v) x.normalize();
    return v;
  }();
  return normals;
}

std::string fmt_vec(const Eigen::Vector3d& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.4g, %.4g, %.4g)", v(0), v(1), v(2));
  return buf;
}

SectionOutcome probe_section(const Mask& X, const std::vector<std::size_t>& false_cells, int section,
                             const OneProbeOptions& opt) {
  SectionOutcome out;
  std::seed_seq sq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                   static_cast<std::uint32_t>(section)};
  std::mt19937_64 rng(sq);
  const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, false_cells.size() - 1)(rng);
  const Eigen::Vector3d nu = section_normals()[std::uniform_int_distribution<int>(0, 8)(rng)];
  const std::vector<int> seed_cell = X.unravel(false_cells[pick]);
  const Eigen::Vector3d p = X.centre(seed_cell);

  // right-handed (e1, e2, nu)
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(nu(i)) < std::abs(nu(least))) least = i;
  Eigen::Vector3d e1 = nu.cross(Eigen::Vector3d::Unit(least)).normalized();
  Eigen::Vector3d e2 = nu.cross(e1);
  if (std::abs(nu(least)) < 1e-12) {
    // axis or diagonal normals: keep the basis on the grid axes where possible
    for (int i = 0; i < 3; ++i)
      if (std::abs(nu.dot(Eigen::Vector3d::Unit(i))) < 1e-12) {
        e1 = Eigen::Vector3d::Unit(i);
        break;
      }
    e2 = nu.cross(e1);
  }

  const Eigen::Vector3d lo = X.box.lo, hi = X.box.hi;
  double u0 = 1e300, u1 = -1e300, v0 = 1e300, v1 = -1e300;
  for (int corner = 0; corner < 8; ++corner) {
    Eigen::Vector3d q;
    for (int i = 0; i < 3; ++i) q(i) = (corner >> i & 1) ? hi(i) : lo(i);
    u0 = std::min(u0, (q - p).dot(e1));
    u1 = std::max(u1, (q - p).dot(e1));
    v0 = std::min(v0, (q - p).dot(e2));
    v1 = std::max(v1, (q - p).dot(e2));
  }
  const double delta = X.cell_size().minCoeff() / opt.supersample;
  const int nu_px = std::max(1, static_cast<int>(std::ceil((u1 - u0) / delta)));
  const int nv_px = std::max(1, static_cast<int>(std::ceil((v1 - v0) / delta)));
  auto point_of = [&](double u, double v) -> Eigen::Vector3d { return p + u * e1 + v * e2; };
  auto pixel_uv = [&](int i, int j) { return Eigen::Vector2d(u0 + (i + 0.5) * delta, v0 + (j + 0.5) * delta); };

  // 0 outside the box, 1 in X, 2 not in X
  std::vector<std::uint8_t> state(static_cast<std::size_t>(nu_px) * nv_px);
  for (int j = 0; j < nv_px; ++j)
    for (int i = 0; i < nu_px; ++i) {
      Eigen::Vector2d uv = pixel_uv(i, j);
      long long idx = X.locate(point_of(uv(0), uv(1)));
      state[static_cast<std::size_t>(j) * nu_px + i] = idx < 0 ? 0 : (X.data[idx] ? 1 : 2);
    }
  auto at = [&](int i, int j) -> std::uint8_t {
    if (i < 0 || j < 0 || i >= nu_px || j >= nv_px) return 0;
    return state[static_cast<std::size_t>(j) * nu_px + i];
  };

  // bounded 8-connected islands of false pixels
  std::vector<int> island(state.size(), -1);
  std::vector<std::vector<std::size_t>> islands;
  std::vector<std::uint8_t> bounded;
  for (std::size_t s = 0; s < state.size(); ++s) {
    if (state[s] != 2 || island[s] >= 0) continue;
    const int id = static_cast<int>(islands.size());
    std::vector<std::size_t> members{s};
    island[s] = id;
    bool ok = true;
    for (std::size_t h = 0; h < members.size(); ++h) {
      int i = static_cast<int>(members[h] % nu_px), j = static_cast<int>(members[h] / nu_px);
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          if (a == 0 && b == 0) continue;
          std::uint8_t st = at(i + a, j + b);
          if (st == 0) ok = false;
          if (st == 2) {
            std::size_t q = static_cast<std::size_t>(j + b) * nu_px + (i + a);
            if (island[q] < 0) {
              island[q] = id;
              members.push_back(q);
            }
          }
        }
    }
    islands.push_back(std::move(members));
    bounded.push_back(ok);
  }
  std::vector<int> order;
  for (std::size_t k = 0; k < islands.size(); ++k)
    if (bounded[k]) order.push_back(static_cast<int>(k));
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return islands[a].size() > islands[b].size(); });
  if (static_cast<int>(order.size()) > opt.max_islands) order.resize(opt.max_islands);

  Mask section_mask;
  {
    Box b;
    b.lo = Eigen::Vector2d(u0, v0);
    b.hi = Eigen::Vector2d(u0 + nu_px * delta, v0 + nv_px * delta);
    // axis 0 = u is the slow axis of a Mask; state is stored v-major
    section_mask = Mask(b, {nu_px, nv_px}, true);
    for (int i = 0; i < nu_px; ++i)
      for (int j = 0; j < nv_px; ++j)
        section_mask.data[static_cast<std::size_t>(i) * nv_px + j] = at(i, j) == 2 ? 0 : 1;
  }

  const int budget = opt.step_budget > 0
                         ? opt.step_budget
                         : 2 * opt.supersample * *std::max_element(X.resolution.begin(), X.resolution.end());
  for (int id : order) {
    ++out.cycles;
    // fill: pixels not 4-reachable from the frame without crossing the island
    std::vector<std::uint8_t> outer(state.size(), 0);
    std::deque<std::size_t> q;
    for (int i = 0; i < nu_px; ++i)
      for (int j : {0, nv_px - 1}) {
        std::size_t s = static_cast<std::size_t>(j) * nu_px + i;
        if (island[s] != id && !outer[s]) {
          outer[s] = 1;
          q.push_back(s);
        }
      }
    for (int j = 0; j < nv_px; ++j)
      for (int i : {0, nu_px - 1}) {
        std::size_t s = static_cast<std::size_t>(j) * nu_px + i;
        if (island[s] != id && !outer[s]) {
          outer[s] = 1;
          q.push_back(s);
        }
      }
    while (!q.empty()) {
      std::size_t s = q.front();
      q.pop_front();
      int i = static_cast<int>(s % nu_px), j = static_cast<int>(s / nu_px);
      const int ni[4] = {i + 1, i - 1, i, i}, nj[4] = {j, j, j + 1, j - 1};
      for (int k = 0; k < 4; ++k) {
        if (ni[k] < 0 || nj[k] < 0 || ni[k] >= nu_px || nj[k] >= nv_px) continue;
        std::size_t t = static_cast<std::size_t>(nj[k]) * nu_px + ni[k];
        if (!outer[t] && island[t] != id) {
          outer[t] = 1;
          q.push_back(t);
        }
      }
    }
    std::vector<std::uint8_t> filled(state.size(), 0), region(state.size(), 0);
    for (std::size_t s = 0; s < state.size(); ++s) filled[s] = !outer[s];
    bool ring_ok = true;
    for (std::size_t s = 0; s < state.size(); ++s) {
      if (!filled[s]) continue;
      int i = static_cast<int>(s % nu_px), j = static_cast<int>(s / nu_px);
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          int ii = i + a, jj = j + b;
          if (ii < 0 || jj < 0 || ii >= nu_px || jj >= nv_px) {
            ring_ok = false;
            continue;
          }
          std::size_t t = static_cast<std::size_t>(jj) * nu_px + ii;
          region[t] = 1;
          if (!filled[t] && state[t] != 1) ring_ok = false;
        }
    }
    if (!ring_ok) {
      out.notes.push_back("section " + std::to_string(section) + ": island ring leaves X; skipped");
      continue;
    }
    std::vector<Pixel> boundary = trace_boundary(region, nu_px, nv_px);
    LoopCycle cyc;
    for (const Pixel& px : boundary) cyc.vertices.push_back(pixel_uv(px.i, px.j));
    cyc.vertices.push_back(cyc.vertices.front());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < cyc.vertices.size(); ++k)
      area += cyc.vertices[k].x() * cyc.vertices[k + 1].y() - cyc.vertices[k + 1].x() * cyc.vertices[k].y();
    if (area < 0) std::reverse(cyc.vertices.begin(), cyc.vertices.end());
    if (!nonneg_class_test(cyc, section_mask)) {
      out.notes.push_back("section " + std::to_string(section) + ": boundary cycle failed the nonnegativity test");
      continue;
    }
    const std::size_t probe_px = islands[id].front();
    long long wind = 0;
    try {
      wind = winding_number(cyc, pixel_uv(static_cast<int>(probe_px % nu_px), static_cast<int>(probe_px / nu_px)));
    } catch (const Error&) {
    }
    if (wind == 0) {
      out.notes.push_back("section " + std::to_string(section) + ": cycle is zero in the section; skipped");
      continue;
    }

    // support samples of the cycle and of the filled chain, in plane coordinates
    std::vector<Eigen::Vector2d> support;
    for (std::size_t k = 0; k + 1 < cyc.vertices.size(); ++k)
      for (double f : {0.0, 0.25, 0.5, 0.75}) support.push_back(cyc.vertices[k] + f * (cyc.vertices[k + 1] - cyc.vertices[k]));
    std::vector<Eigen::Vector2d> cap;
    for (std::size_t s = 0; s < state.size(); ++s)
      if (region[s]) cap.push_back(pixel_uv(static_cast<int>(s % nu_px), static_cast<int>(s / nu_px)));

    // 0 blocked / box exit, 1 capped, 2 budget exhausted
    auto push = [&](int sign, double& reached) {
      for (int k = 1; k <= budget; ++k) {
        const Eigen::Vector3d shift = (sign * k * delta) * nu;
        for (const auto& uv : support) {
          long long idx = X.locate(point_of(uv(0), uv(1)) + shift);
          if (idx < 0 || !X.data[idx]) return 0;
        }
        bool all_in = true;
        for (const auto& uv : cap) {
          long long idx = X.locate(point_of(uv(0), uv(1)) + shift);
          if (idx < 0 || !X.data[idx]) {
            all_in = false;
            break;
          }
        }
        if (all_in) {
          reached = sign * k * delta;
          return 1;
        }
      }
      return 2;
    };
    double reached = 0.0;
    int up = push(1, reached);
    int down = up == 1 ? 0 : push(-1, reached);
    if (up == 1 || down == 1) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "section %d normal %s through cell (%d, %d, %d): island of %zu pixels bounds in X after "
                    "translation %.6g",
                    section, fmt_vec(nu).c_str(), seed_cell[0], seed_cell[1], seed_cell[2], islands[id].size(),
                    reached);
      out.violations.push_back(buf);
    } else if (up == 2 || down == 2) {
      ++out.inconclusive;
      out.notes.push_back("section " + std::to_string(section) + ": contraction budget exhausted");
    }
  }
  return out;
}

}  // namespace

ProbeReport one_convexity_probe(const Mask& X, const OneProbeOptions& opt) {
  ProbeReport rep;
  if (X.dim() != 3) {
    rep.notes.push_back("1-probe needs a 3-D mask; planar sets are 1-convex");
    return rep;
  }
  std::vector<std::size_t> false_cells;
  for (std::size_t i = 0; i < X.data.size(); ++i)
    if (!X.data[i]) false_cells.push_back(i);
  if (false_cells.empty()) {
    rep.notes.push_back("X has no false cells; every section is free of islands");
    return rep;
  }
  std::vector<SectionOutcome> outcomes(std::max(0, opt.sections));
  parallel_for(outcomes.size(), resolve_threads(opt.threads),
               [&](std::size_t s) { outcomes[s] = probe_section(X, false_cells, static_cast<int>(s), opt); });
  for (const auto& o : outcomes) {
    rep.one_violations.insert(rep.one_violations.end(), o.violations.begin(), o.violations.end());
    rep.notes.insert(rep.notes.end(), o.notes.begin(), o.notes.end());
    rep.cycles += o.cycles;
    rep.inconclusive += o.inconclusive;
  }
  rep.trials = static_cast<long long>(outcomes.size());
  return rep;
}

std::vector<Eigen::Matrix3i> cube_rotations() {
  std::vector<Eigen::Matrix3i> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int s = 0; s < 8; ++s) {
      Eigen::Matrix3i R = Eigen::Matrix3i::Zero();
      for (int i = 0; i < 3; ++i) R(i, perm[i]) = (s >> i & 1) ? -1 : 1;
      if (R.cast<double>().determinant() > 0) out.push_back(R);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

Mask rotate_mask(const Mask& X, const Eigen::Matrix3i& R) {
  if (X.dim() != 3) throw DimensionError("rotate_mask needs a 3-D mask");
  std::vector<int> res(3);
  Box b;
  b.lo.resize(3);
  b.hi.resize(3);
  const Eigen::Vector3d mid = 0.5 * (X.box.lo + X.box.hi), half = 0.5 * (X.box.hi - X.box.lo);
  const Eigen::Vector3d new_mid = R.cast<double>() * mid;
  for (int k = 0; k < 3; ++k) {
    int p = 0;
    while (R(k, p) == 0) ++p;
    res[k] = X.resolution[p];
    b.lo(k) = new_mid(k) - half(p);
    b.hi(k) = new_mid(k) + half(p);
  }
  Mask Y(b, res, false);
  for (std::size_t i = 0; i < X.data.size(); ++i) {
    std::vector<int> c = X.unravel(i);
    Eigen::Vector3i centred(2 * c[0] - (X.resolution[0] - 1), 2 * c[1] - (X.resolution[1] - 1),
                            2 * c[2] - (X.resolution[2] - 1));
    Eigen::Vector3i n = R * centred;
    std::vector<int> d(3);
    for (int k = 0; k < 3; ++k) d[k] = (n(k) + res[k] - 1) / 2;
    Y.data[Y.ravel(d)] = X.data[i];
  }
  return Y;
}

}  // namespace expamoeba
