#ifndef QCDIFF_WINDOW_HPP
#define QCDIFF_WINDOW_HPP

#include <Eigen/Dense>
#include <vector>

#include "json.hpp"
#include "qcdiff/common.hpp"

namespace qcdiff {

/// Acceptance region in internal space: a closed interval when e=1, a convex
/// polygon (counterclockwise vertex list) when e=2.  Both are regular closed
/// sets with boundary of measure zero, so the model-set machinery applies
/// without case analysis.
class Window {
 public:
  static Window interval(double lo, double hi);
  static Window polygon(std::vector<Eigen::Vector2d> vertices);

  int dim() const { return dim_; }
  double volume() const { return volume_; }
  double perimeter() const { return perimeter_; }
  Eigen::VectorXd bbox_lo() const;
  Eigen::VectorXd bbox_hi() const;

  /// Closed containment.
  bool contains(const Eigen::VectorXd& t) const;
  /// Distance from t to the boundary set (nonnegative on both sides).
  double boundary_distance(const Eigen::VectorXd& t) const;

  /// Fourier transform of the indicator, hat1_W(y) = int_W e^{-2 pi i y.v} dv.
  /// Interval: exponential difference in sinc form.  Polygon: divergence
  /// theorem reduces the area integral to closed-form edge integrals.
  Complex fourier(const Eigen::VectorXd& y) const;

  /// Decay envelope: |fourier(y)| <= envelope(|y|), with
  /// envelope(r) = min(volume, C/r) for an explicit constant C.
  double fourier_envelope(double r) const;
  /// Smallest S with envelope(S) <= threshold (0 if already below at 0).
  double envelope_inverse(double threshold) const;

  nlohmann::json to_json() const;
  static Window from_json(const nlohmann::json& j);

  double interval_lo() const;
  double interval_hi() const;
  bool is_interval() const { return dim_ == 1; }
  const std::vector<Eigen::Vector2d>& vertices() const { return verts_; }

 private:
  Window() = default;

  int dim_ = 0;
  double lo_ = 0.0, hi_ = 0.0;          // interval case
  std::vector<Eigen::Vector2d> verts_;  // polygon case, CCW
  double volume_ = 0.0;
  double perimeter_ = 0.0;
};

}  // namespace qcdiff

#endif  // QCDIFF_WINDOW_HPP
