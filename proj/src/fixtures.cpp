#include "expamoeba/convexity.hpp"

#include <algorithm>
#include <cmath>

namespace expamoeba {

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"removed_points", "removed_lines", "tower", "halfspace",
                                                 "removed_disc"};
  return names;
}

namespace {

Mask unit_mask(int dims, int res) {
  if (dims != 2 && dims != 3) throw DimensionError("fixtures live in R^2 or R^3");
  if (res < 4) throw Error("fixture resolution must be at least 4");
  Box b;
  b.lo = Eigen::VectorXd::Constant(dims, -1.0);
  b.hi = Eigen::VectorXd::Constant(dims, 1.0);
  return Mask(b, std::vector<int>(dims, res), true);
}

// clears every cell within Chebyshev distance `radius` of `centre`
void clear_block(Mask& X, const std::vector<int>& centre, int radius) {
  std::vector<int> c(X.dim());
  for (std::size_t i = 0; i < X.data.size(); ++i) {
    c = X.unravel(i);
    bool near = true;
    for (int a = 0; a < X.dim(); ++a)
      if (std::abs(c[a] - centre[a]) > radius) near = false;
    if (near) X.data[i] = 0;
  }
}

}  // namespace

Mask synthetic_fixture(const std::string& name, const FixtureParams& p) {
  const int res = p.res;
  if (name == "removed_points") {
    Mask X = unit_mask(p.dims, res);
    const int radius = p.radius >= 0 ? p.radius : 1;
    for (int i = 0; i < p.count; ++i) {
      // points on the main diagonal, evenly spaced
      int at = static_cast<int>((static_cast<long long>(i + 1) * res) / (p.count + 1));
      clear_block(X, std::vector<int>(p.dims, at), radius);
    }
    return X;
  }
  if (name == "removed_lines") {
    Mask X = unit_mask(p.dims, res);
    const int radius = p.radius >= 0 ? p.radius : 0;
    const int spacing = std::max(2 * radius + 2, res / 8);
    for (int i = 0; i < p.count; ++i) {
      const int axis = (p.axis + i) % p.dims;
      // distinct offsets keep axis lines pairwise disjoint
      const int off = std::clamp(res / 2 + i * spacing, 0, res - 1);
      for (std::size_t k = 0; k < X.data.size(); ++k) {
        std::vector<int> c = X.unravel(k);
        bool near = true;
        for (int a = 0; a < p.dims; ++a)
          if (a != axis && std::abs(c[a] - off) > radius) near = false;
        if (near) X.data[k] = 0;
      }
    }
    return X;
  }
  if (name == "tower") {
    if (p.dims != 2) throw DimensionError("tower is a planar fixture");
    Mask X = unit_mask(2, res);
    const int half = p.radius >= 0 ? p.radius : 1;
    const int top = (3 * res) / 5;
    for (std::size_t k = 0; k < X.data.size(); ++k) {
      std::vector<int> c = X.unravel(k);  // c[0] = x, c[1] = height
      bool stem = std::abs(c[0] - res / 2) <= half && c[1] <= top;
      bool bar = c[1] <= top && c[1] >= top - 2 * half && c[0] >= res / 4 && c[0] <= (3 * res) / 4;
      if (stem || bar) X.data[k] = 0;
    }
    return X;
  }
  if (name == "halfspace") {
    Mask X = unit_mask(p.dims, res);
    for (std::size_t k = 0; k < X.data.size(); ++k)
      if (X.unravel(k)[0] >= res / 2) X.data[k] = 0;
    return X;
  }
  if (name == "removed_disc") {
    Mask X = unit_mask(p.dims, res);
    const double radius = (p.radius >= 0 ? p.radius : res / 4) * X.cell_size()(0);
    for (std::size_t k = 0; k < X.data.size(); ++k)
      if (X.centre(X.unravel(k)).norm() <= radius) X.data[k] = 0;
    return X;
  }
  throw Error("unknown fixture '" + name + "'");
}

}  // namespace expamoeba
