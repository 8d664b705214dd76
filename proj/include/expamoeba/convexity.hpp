#pragma once

#include "expamoeba/amoeba.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace expamoeba {

/// Boolean grid over a box in R^2 or R^3; true means "in X".
///
/// Cells are stored with axis 0 slowest, as in Raster. Components of X use
/// face adjacency (4 in 2-D, 6 in 3-D), so false regions are 8/26-connected.
struct Mask {
  Box box;
  std::vector<int> resolution;
  std::vector<std::uint8_t> data;

  Mask() = default;
  Mask(Box b, std::vector<int> res, bool fill = true);

  int dim() const { return static_cast<int>(resolution.size()); }
  std::size_t cell_count() const { return data.size(); }
  Eigen::VectorXd cell_size() const;
  std::vector<int> unravel(std::size_t index) const;
  std::size_t ravel(const std::vector<int>& cell) const;
  bool contains(const std::vector<int>& cell) const;
  Eigen::VectorXd centre(const std::vector<int>& cell) const;
  /// nearest cell to y, or -1 outside the box
  long long locate(const Eigen::VectorXd& y) const;
  bool at(const std::vector<int>& cell) const { return data[ravel(cell)] != 0; }
  std::size_t true_count() const;
};

/// X = cells outside the amoeba raster.
Mask complement_mask(const Raster& r);
/// A 1-D mask extended constantly over [lo, hi] in a second axis.
Mask embed_line_mask(const Mask& line, double lo, double hi, int res);

/// Face-adjacent components of the true cells: label per cell (-1 for false).
std::vector<int> label_components(const Mask& X, int& count);

/// Reduced 0-cycle on an oriented line: points origin + t_i * direction with
/// integer weights summing to 0.
struct PointCycle {
  std::vector<double> t;
  std::vector<long long> weights;
};

/// Closed polyline in an oriented plane (vertices in plane coordinates,
/// first == last).
struct LoopCycle {
  std::vector<Eigen::Vector2d> vertices;
};

/// Affine subspace: point plus orthonormal spanning vectors (1 or 2 of them).
struct SectionSpec {
  Eigen::VectorXd point;
  std::vector<Eigen::VectorXd> span;
  int orientation = 1;
};

void check_section(const SectionSpec& s);

/// Image of c in the reduced 0-homology of the line minus x.
long long winding_number(const PointCycle& c, double x);
/// Winding of the polyline around x; throws when x lies on it.
long long winding_number(const LoopCycle& c, const Eigen::Vector2d& x);

/// `section` is a 2-D mask whose box is in plane coordinates.
/// True iff winding(c, x) >= 0 at every false cell centre of the section.
bool nonneg_class_test(const LoopCycle& c, const Mask& section);

struct ZeroViolation {
  int component = -1;
  std::vector<int> a, b;
  std::vector<int> exit_cell;
};

struct ProbeReport {
  std::vector<ZeroViolation> zero_violations;
  /// 1-probe: description per violating cycle
  std::vector<std::string> one_violations;
  std::vector<std::string> notes;
  long long trials = 0;
  long long cycles = 0;
  long long inconclusive = 0;

  bool violated() const { return !zero_violations.empty() || !one_violations.empty(); }
};

/// Random same-component pairs of true cells whose joining segment leaves X.
///
/// An exit counts as a violation only when it is certified: some false cell
/// on the segment has true cells of the same component on both sides along an
/// integer grid line. Uncertified exits are counted in the notes.
ProbeReport zero_convexity_probe(const Mask& X, long long trials, std::uint64_t seed, int threads = 0);

struct OneProbeOptions {
  int sections = 20;
  std::uint64_t seed = 1;
  int supersample = 2;
  /// translation steps per direction (pixel widths); 0 picks 2 * supersample * max resolution
  int step_budget = 0;
  int max_islands = 16;
  int threads = 0;
};

/// Plane sections, island boundary cycles and translation contraction search.
/// 2-D masks are trivially 1-convex and return an empty report with a note.
ProbeReport one_convexity_probe(const Mask& X, const OneProbeOptions& opt = {});

struct FixtureParams {
  int dims = 3;
  int res = 32;
  /// removed_points / removed_lines count
  int count = 1;
  /// first line axis for removed_lines
  int axis = 2;
  /// radius in cells (Chebyshev for points and lines, Euclidean for the disc); -1 picks the default
  int radius = -1;
};

/// removed_points, removed_lines, tower (2-D), halfspace, removed_disc over [-1, 1]^dims.
Mask synthetic_fixture(const std::string& name, const FixtureParams& p = {});
const std::vector<std::string>& fixture_names();

/// The 24 signed permutation matrices with determinant +1.
std::vector<Eigen::Matrix3i> cube_rotations();
/// X moved by a grid symmetry about the box centre.
Mask rotate_mask(const Mask& X, const Eigen::Matrix3i& R);

}  // namespace expamoeba
