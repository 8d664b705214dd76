#pragma once

#include "expamoeba/core.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace expamoeba {

/// Points in R^n stored as columns.
template <typename Scalar>
using PointSet = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Tolerance for geometric predicates on binary64 data.
inline constexpr double kGeomTol = 1e-9;
/// Relative singular-value cutoff for affine rank of binary64 data.
inline constexpr double kRankTol = 1e-8;

/**
 * Convex polytope given by its extreme points.
 *
 * Vertices are stored as columns in lexicographic order, so two polytopes
 * with the same vertex set compare equal entry by entry.
 */
template <typename Scalar>
class Polytope {
 public:
  Polytope() = default;
  /// Convex hull of the columns of `points` (duplicates allowed).
  explicit Polytope(const PointSet<Scalar>& points);

  const PointSet<Scalar>& vertices() const { return vertices_; }
  Eigen::Index ambient_dim() const { return vertices_.rows(); }
  Eigen::Index size() const { return vertices_.cols(); }
  int dimension() const { return dimension_; }
  bool is_point() const { return vertices_.cols() == 1; }

  Polytope<double> to_double() const;

 private:
  PointSet<Scalar> vertices_;
  int dimension_ = -1;
};

/// Affine dimension of a point cloud (exact for Rational).
template <typename Scalar>
int affine_dimension(const PointSet<Scalar>& points);

/// Every point sum a + b for a in P, b in Q.
template <typename Scalar>
PointSet<Scalar> minkowski_cloud(const PointSet<Scalar>& p, const PointSet<Scalar>& q);

/// One face of a hull: indices into the input columns of its vertices and a
/// normal in the relative interior of its normal cone (zero for the polytope
/// itself).
template <typename Scalar>
struct HullFace {
  std::vector<int> vertices;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> normal;
  int dimension = 0;
};

/// All faces of conv(points), improper face included; n <= 3.
template <typename Scalar>
std::vector<HullFace<Scalar>> hull_faces(const PointSet<Scalar>& points);

template <typename Scalar>
Polytope<Scalar> newton_polytope(const ExpSum& f, const GeneratorMatrix& omega);

/// Minkowski sum of the Newton polytopes of all sums.
template <typename Scalar>
Polytope<Scalar> system_polytope(const ExpSystem& F);

struct FaceDecomposition {
  /// maximizing direction; zero for the improper face
  Eigen::VectorXd normal;
  /// per sum: indices of the terms whose frequency lies in the face
  std::vector<std::vector<int>> term_indices;
  std::vector<Polytope<double>> summand_faces;
  Polytope<double> face;
  int dimension = 0;
  /// ties decided with binary64 tolerance
  bool numeric = false;

  bool has_singleton_summand() const;
};

FaceDecomposition face_in_direction(const ExpSystem& F, const Eigen::VectorXd& u);
/// Every face of the Minkowski polytope, in canonical order.
std::vector<FaceDecomposition> enumerate_faces(const ExpSystem& F);
/// Faces whose affine dimension is below card F.
std::vector<FaceDecomposition> enumerate_low_faces(const ExpSystem& F);

struct SpectraVerdict {
  bool closed = true;
  std::optional<FaceDecomposition> witness;
};

SpectraVerdict closed_spectra_check(const ExpSystem& F);

/// Keeps, in every sum, the terms lying on the face.
ExpSystem trace(const ExpSystem& F, const FaceDecomposition& face);

enum class RegularityKind { certified_by_closure, heuristic_positive, suspected_fail };

const char* to_string(RegularityKind k);

struct RegularityVerdict {
  RegularityKind kind = RegularityKind::certified_by_closure;
  /// smallest sampled K value; unset when certified
  std::optional<double> epsilon;
  /// where the smallest value was found
  std::optional<CVector> point;
  std::optional<FaceDecomposition> face;
};

struct InfimumEstimate {
  double value = 0.0;
  CVector point;
};

/// Quasi-random sampling of K[F] on a ball of C^n plus a local simplex search.
InfimumEstimate K_infimum_estimate(const ExpSystem& F, int samples, double radius);

RegularityVerdict regularity_estimate(const ExpSystem& F, int samples = 2000, double radius = 10.0);

struct DimGate {
  int dim_affine = 0;
  int card = 0;
  bool zeros_expected = false;
};

DimGate dim_gate(const ExpSystem& F);

double hausdorff_distance(const Polytope<double>& p, const Polytope<double>& q);
/// Euclidean distance from x to conv(vertices).
double distance_to_hull(const Eigen::VectorXd& x, const PointSet<double>& vertices);

}  // namespace expamoeba
