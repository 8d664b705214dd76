#pragma once

#include "expamoeba/core.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace expamoeba {

struct DefectOptions {
  /// torus grid points per angle; 0 picks 64 (r <= 2), 32 (r = 3), 16 (r = 4)
  int grid = 0;
  int restarts = 3;
  int max_iter = 500;
};

struct DefectResult {
  double value = 0.0;
  Eigen::VectorXd theta;
  /// point where the value was attained (differs from the query inside cells)
  Eigen::VectorXd x;
  bool budget_exceeded = false;
};

/// Evaluates min over theta of max_f |f_theta(x)| / k_f(x).
///
/// The constructor validates the generators (Z-independence) once; the
/// evaluation methods are const and thread-safe.
class DefectEvaluator {
 public:
  explicit DefectEvaluator(const ExpSystem& F, DefectOptions opt = {}, bool validate = true);

  DefectResult at(const Eigen::VectorXd& x) const;
  /// max_f |f_theta(x)| / k_f(x)
  double objective(const Eigen::VectorXd& x, const Eigen::VectorXd& theta) const;
  /// Minimum of the defect over the box [lo, hi], searched jointly in (x, theta)
  /// starting from `seed` (typically the defect at the centre).
  DefectResult box_minimum(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const DefectResult& seed) const;

  /// Lipschitz bound of the defect in x: max_f sum|c| * diam(spectrum of f).
  double lipschitz() const { return lipschitz_; }
  int grid() const { return grid_; }
  const DefectOptions& options() const { return opt_; }
  Eigen::Index dim() const { return n_; }

 private:
  struct Term {
    Complex c;
    Eigen::VectorXd lambda;
    std::vector<int> k;
  };
  void weights(const Eigen::VectorXd& x, std::vector<Complex>& w) const;

  DefectOptions opt_;
  Eigen::Index n_ = 0, r_ = 0;
  int grid_ = 64;
  double lipschitz_ = 0.0;
  std::vector<std::vector<Term>> sums_;
  std::vector<Complex> roots_;
};

DefectResult membership_defect(const ExpSystem& F, const Eigen::VectorXd& x, const DefectOptions& opt = {});

struct Box {
  Eigen::VectorXd lo, hi;
  Eigen::Index dim() const { return lo.size(); }
};

Box make_box(const std::vector<double>& lo, const std::vector<double>& hi);

struct RasterOptions {
  double tau = 1e-3;
  DefectOptions defect;
  /// refine each cell to the minimum over the closed cell
  bool cell_minimum = true;
  /// 0 reads EXPAMOEBA_THREADS, then the hardware concurrency
  int threads = 0;
  /// cells for which this returns false are skipped (value +inf)
  std::function<bool(const Eigen::VectorXd& centre)> select;
};

/// Regular grid over a box with one value per cell and a thresholded mask.
struct Raster {
  Box box;
  std::vector<int> resolution;
  double tau = 0.0;
  /// defect of the cell (see RasterOptions::cell_minimum); +inf when skipped
  std::vector<double> values;
  /// defect at the cell centre
  std::vector<double> centre_values;
  std::vector<std::uint8_t> mask;

  std::string kind = "defect";
  std::string system_hash;
  double lipschitz = 0.0;
  DefectOptions settings;
  bool cell_minimum = true;
  long long budget_flags = 0;

  Eigen::Index dim() const { return box.dim(); }
  std::size_t cell_count() const;
  Eigen::VectorXd cell_size() const;
  std::vector<int> unravel(std::size_t index) const;
  std::size_t ravel(const std::vector<int>& cell) const;
  Eigen::VectorXd centre(std::size_t index) const;
  /// cell containing y, or nullopt outside the box
  std::optional<std::size_t> locate(const Eigen::VectorXd& y) const;
  std::size_t true_count() const;
};

inline constexpr std::size_t kMaxPlanarCells = 4'000'000;
inline constexpr int kMaxSolidAxis = 64;

Raster rasterize(const ExpSystem& F, const Box& box, const std::vector<int>& resolution,
                 const RasterOptions& opt = {});

struct ZeroOptions {
  double residual = 1e-8;
  /// function evaluations before the sample is returned as partial
  long long budget = 20'000'000;
  int retries = 6;
  /// multistart Newton (n = 2)
  int starts = 4000;
  std::uint64_t seed = 1;
  double dedupe = 1e-6;
};

struct ZeroSample {
  std::vector<CVector> zeros;
  std::vector<double> residuals;
  bool partial = false;
  long long evaluations = 0;
  std::string note;
};

/// Zeros of F with Re z in `re_box` and Im z in `im_window`.
ZeroSample zero_sample(const ExpSystem& F, const Box& re_box, const Box& im_window, const ZeroOptions& opt = {});

/// Mask of cells containing Re z of some zero, dilated by `dilate` cells.
Raster zero_raster(const ZeroSample& zs, const Box& box, const std::vector<int>& resolution, int dilate = 1);

struct MaskComparison {
  double hausdorff_cells = 0.0;
  std::size_t symmetric_diff_cells = 0;
};

MaskComparison compare_masks(const Raster& a, const Raster& b);

/// Hausdorff distance (cell units) between the true cells of two boolean
/// grids of identical shape; +inf when exactly one is empty.
double mask_hausdorff(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                      const std::vector<int>& shape);

struct PullbackCheck {
  bool pass = false;
  double hausdorff_cells = 0.0;
  std::vector<int> pulled_resolution;
  std::size_t pulled_cells_evaluated = 0;
};

/// Compares the raster of F with the image under phi^T of the raster of
/// F o phi^T (nearest-cell mapping of cell centres).
PullbackCheck pullback_raster_check(const ExpSystem& F, const Eigen::MatrixXd& phi, const Box& box,
                                    const std::vector<int>& resolution, const RasterOptions& opt = {});

}  // namespace expamoeba
