#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <vector>

namespace expamoeba {

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead on R^d with standard coefficients (1, 2, 0.5, 0.5).
///
/// `project` is applied to every trial point (identity for unconstrained
/// problems). Stops when the spread of simplex values falls below `ftol`
/// or after `max_iter` iterations.
template <typename Objective, typename Projection>
SimplexResult nelder_mead(Objective&& f, Eigen::VectorXd x0, const Eigen::VectorXd& step,
                          Projection&& project, int max_iter, double ftol = 1e-14) {
  const Eigen::Index d = x0.size();
  std::vector<Eigen::VectorXd> pts(d + 1, x0);
  std::vector<double> val(d + 1);
  project(pts[0]);
  for (Eigen::Index i = 0; i < d; ++i) {
    pts[i + 1](i) += step(i);
    project(pts[i + 1]);
  }
  for (Eigen::Index i = 0; i <= d; ++i) val[i] = f(pts[i]);
  std::vector<int> order(d + 1);
  SimplexResult res;
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int best = order[0], worst = order[d], second = order[d - 1];
    if (val[worst] - val[best] <= ftol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(d);
    Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    project(xr);
    double fr = f(xr);
    if (fr < val[best]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      project(xe);
      double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                 : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    project(xc);
    double fc = f(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= d; ++i) {
      if (static_cast<int>(i) == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      project(pts[i]);
      val[i] = f(pts[i]);
    }
  }
  int b = static_cast<int>(std::min_element(val.begin(), val.end()) - val.begin());
  res.x = pts[b];
  res.value = val[b];
  res.iterations = it;
  return res;
}

template <typename Objective>
SimplexResult nelder_mead(Objective&& f, Eigen::VectorXd x0, const Eigen::VectorXd& step,
                          int max_iter, double ftol = 1e-14) {
  return nelder_mead(std::forward<Objective>(f), std::move(x0), step, [](Eigen::VectorXd&) {},
                     max_iter, ftol);
}

}  // namespace expamoeba
