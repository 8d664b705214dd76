#include "expamoeba/amoeba.hpp"
#include "expamoeba/lattice.hpp"
#include "expamoeba/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace expamoeba {

Box make_box(const std::vector<double>& lo, const std::vector<double>& hi) {
  if (lo.size() != hi.size() || lo.empty()) throw DimensionError("box bounds differ in length");
  Box b;
  b.lo = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  b.hi = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw Error("box needs lo < hi on every axis");
  return b;
}

std::size_t Raster::cell_count() const {
  std::size_t c = 1;
  for (int r : resolution) c *= static_cast<std::size_t>(r);
  return c;
}

Eigen::VectorXd Raster::cell_size() const {
  Eigen::VectorXd h(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) h(i) = (box.hi(i) - box.lo(i)) / resolution[i];
  return h;
}

// Axis 0 varies slowest.
std::vector<int> Raster::unravel(std::size_t index) const {
  std::vector<int> c(resolution.size());
  for (int i = static_cast<int>(resolution.size()) - 1; i >= 0; --i) {
    c[i] = static_cast<int>(index % resolution[i]);
    index /= resolution[i];
  }
  return c;
}

std::size_t Raster::ravel(const std::vector<int>& cell) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < resolution.size(); ++i) idx = idx * resolution[i] + cell[i];
  return idx;
}

Eigen::VectorXd Raster::centre(std::size_t index) const {
  std::vector<int> c = unravel(index);
  Eigen::VectorXd h = cell_size();
  Eigen::VectorXd x(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) x(i) = box.lo(i) + (c[i] + 0.5) * h(i);
  return x;
}

std::optional<std::size_t> Raster::locate(const Eigen::VectorXd& y) const {
  Eigen::VectorXd h = cell_size();
  std::vector<int> c(resolution.size());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (y(i) < box.lo(i) || y(i) > box.hi(i)) return std::nullopt;
    int k = static_cast<int>(std::floor((y(i) - box.lo(i)) / h(i)));
    c[i] = std::clamp(k, 0, resolution[i] - 1);
  }
  return ravel(c);
}

std::size_t Raster::true_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

namespace {

void check_grid(const Box& box, const std::vector<int>& res, Eigen::Index n) {
  if (box.dim() != n || static_cast<Eigen::Index>(res.size()) != n)
    throw DimensionError("box and resolution must match the ambient dimension");
  std::size_t cells = 1;
  for (int r : res) {
    if (r < 1) throw Error("resolution must be positive");
    cells *= static_cast<std::size_t>(r);
  }
  if (n <= 2 && cells > kMaxPlanarCells)
    throw Error("raster exceeds " + std::to_string(kMaxPlanarCells) + " cells");
  if (n == 3)
    for (int r : res)
      if (r > kMaxSolidAxis) throw Error("3-D rasters are limited to " + std::to_string(kMaxSolidAxis) + " cells per axis");
  if (n > 3) throw DimensionError("rasters support n <= 3");
}

}  // namespace

Raster rasterize(const ExpSystem& F, const Box& box, const std::vector<int>& resolution, const RasterOptions& opt) {
  check_grid(box, resolution, F.dim());
  DefectEvaluator ev(F, opt.defect);
  Raster R;
  R.box = box;
  R.resolution = resolution;
  R.tau = opt.tau;
  R.system_hash = system_hash(F);
  R.lipschitz = ev.lipschitz();
  R.settings = ev.options();
  R.cell_minimum = opt.cell_minimum;
  const std::size_t cells = R.cell_count();
  R.values.assign(cells, 0.0);
  R.centre_values.assign(cells, 0.0);
  R.mask.assign(cells, 0);
  std::vector<std::uint8_t> flags(cells, 0);
  const Eigen::VectorXd h = R.cell_size();
  const double half_diag = 0.5 * h.norm();
  parallel_for(cells, resolve_threads(opt.threads), [&](std::size_t i) {
    Eigen::VectorXd c = R.centre(i);
    if (opt.select && !opt.select(c)) {
      R.values[i] = R.centre_values[i] = std::numeric_limits<double>::infinity();
      return;
    }
    DefectResult d = ev.at(c);
    R.centre_values[i] = d.value;
    double v = d.value;
    bool flag = d.budget_exceeded;
    // the cell minimum can only reach tau if the Lipschitz bound allows it
    if (opt.cell_minimum && v > opt.tau && v - ev.lipschitz() * half_diag <= opt.tau) {
      DefectResult m = ev.box_minimum(c - 0.5 * h, c + 0.5 * h, d);
      v = std::min(v, m.value);
      flag = flag || m.budget_exceeded;
    }
    R.values[i] = v;
    R.mask[i] = v <= opt.tau ? 1 : 0;
    flags[i] = flag ? 1 : 0;
  });
  R.budget_flags = std::count(flags.begin(), flags.end(), 1);
  return R;
}

Raster zero_raster(const ZeroSample& zs, const Box& box, const std::vector<int>& resolution, int dilate) {
  Raster R;
  R.box = box;
  R.resolution = resolution;
  R.tau = 0.5;
  R.kind = "zeros";
  R.cell_minimum = false;
  const std::size_t cells = R.cell_count();
  R.mask.assign(cells, 0);
  std::vector<std::uint8_t> hit(cells, 0);
  for (const CVector& z : zs.zeros) {
    if (z.size() != box.dim()) throw DimensionError("zero has the wrong dimension");
    auto c = R.locate(z.real());
    if (c) hit[*c] = 1;
  }
  const int n = static_cast<int>(box.dim());
  for (std::size_t i = 0; i < cells; ++i) {
    if (!hit[i]) continue;
    std::vector<int> base = R.unravel(i);
    std::vector<int> off(n, -dilate);
    while (true) {
      std::vector<int> c(n);
      bool inside = true;
      for (int a = 0; a < n; ++a) {
        c[a] = base[a] + off[a];
        if (c[a] < 0 || c[a] >= resolution[a]) inside = false;
      }
      if (inside) R.mask[R.ravel(c)] = 1;
      int a = n - 1;
      while (a >= 0 && off[a] == dilate) {
        off[a] = -dilate;
        --a;
      }
      if (a < 0) break;
      ++off[a];
    }
  }
  R.values.resize(cells);
  R.centre_values.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) R.values[i] = R.centre_values[i] = R.mask[i] ? 0.0 : 1.0;
  return R;
}

namespace {

constexpr double kFar = 1e30;

// 1-D squared distance transform (lower envelope of parabolas).
void edt_line(std::vector<double>& f, std::vector<double>& out, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  out.resize(n);
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    out[q] = double(q - v[k]) * double(q - v[k]) + f[v[k]];
  }
}

std::vector<double> squared_edt(const std::vector<std::uint8_t>& mask, const std::vector<int>& shape) {
  std::size_t total = 1;
  for (int s : shape) total *= s;
  std::vector<double> d(total);
  for (std::size_t i = 0; i < total; ++i) d[i] = mask[i] ? 0.0 : kFar;
  const int nd = static_cast<int>(shape.size());
  std::vector<std::size_t> stride(nd, 1);
  for (int a = nd - 2; a >= 0; --a) stride[a] = stride[a + 1] * shape[a + 1];
  std::vector<double> line, out, z;
  std::vector<int> v;
  for (int a = 0; a < nd; ++a) {
    const int len = shape[a];
    line.resize(len);
    for (std::size_t start = 0; start < total; ++start) {
      if ((start / stride[a]) % len != 0) continue;
      for (int q = 0; q < len; ++q) line[q] = d[start + q * stride[a]];
      edt_line(line, out, v, z);
      for (int q = 0; q < len; ++q) d[start + q * stride[a]] = out[q];
    }
  }
  return d;
}

}  // namespace

double mask_hausdorff(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b, const std::vector<int>& shape) {
  bool any_a = std::find(a.begin(), a.end(), 1) != a.end();
  bool any_b = std::find(b.begin(), b.end(), 1) != b.end();
  if (!any_a && !any_b) return 0.0;
  if (any_a != any_b) return std::numeric_limits<double>::infinity();
  std::vector<double> da = squared_edt(a, shape), db = squared_edt(b, shape);
  double h = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]) h = std::max(h, db[i]);
    if (b[i]) h = std::max(h, da[i]);
  }
  return std::sqrt(h);
}

MaskComparison compare_masks(const Raster& a, const Raster& b) {
  if (a.resolution != b.resolution || a.box.lo != b.box.lo || a.box.hi != b.box.hi)
    throw Error("grid mismatch: rasters differ in box or resolution");
  MaskComparison c;
  c.hausdorff_cells = mask_hausdorff(a.mask, b.mask, a.resolution);
  for (std::size_t i = 0; i < a.mask.size(); ++i) c.symmetric_diff_cells += a.mask[i] != b.mask[i];
  return c;
}

PullbackCheck pullback_raster_check(const ExpSystem& F, const Eigen::MatrixXd& phi, const Box& box,
                                    const std::vector<int>& resolution, const RasterOptions& opt) {
  const Eigen::Index n = F.dim();
  if (phi.rows() != n || phi.cols() != n) throw DimensionError("map has the wrong size");
  ExpSystem G = pullback_system(F, phi);
  const Eigen::MatrixXd P = phi.transpose();
  const Eigen::MatrixXd Pinv = P.inverse();

  Raster RF = rasterize(F, box, resolution, opt);
  const Eigen::VectorXd hF = RF.cell_size();

  // bounding box of the preimage of the box under P
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (int corner = 0; corner < (1 << n); ++corner) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = (corner >> i) & 1 ? box.hi(i) : box.lo(i);
    Eigen::VectorXd x = Pinv * y;
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  // pulled cells small enough that their images are at most one F-cell apart
  std::vector<int> resG(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double hmax = hF.minCoeff() / P.col(i).norm();
    resG[i] = static_cast<int>(std::ceil((hi(i) - lo(i)) / hmax));
  }
  Box boxG{lo, hi};
  RasterOptions optG = opt;
  const Eigen::VectorXd margin = 2.0 * hF;
  optG.select = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd y = P * c;
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) < box.lo(i) - margin(i) || y(i) > box.hi(i) + margin(i)) return false;
    return true;
  };
  Raster RG = rasterize(G, boxG, resG, optG);

  std::vector<std::uint8_t> image(RF.cell_count(), 0);
  std::size_t evaluated = 0;
  for (std::size_t i = 0; i < RG.cell_count(); ++i) {
    if (std::isfinite(RG.values[i])) ++evaluated;
    if (!RG.mask[i]) continue;
    auto c = RF.locate(P * RG.centre(i));
    if (c) image[*c] = 1;
  }
  PullbackCheck out;
  out.hausdorff_cells = mask_hausdorff(RF.mask, image, RF.resolution);
  out.pass = out.hausdorff_cells <= 2.0;
  out.pulled_resolution = resG;
  out.pulled_cells_evaluated = evaluated;
  return out;
}

}  // namespace expamoeba
