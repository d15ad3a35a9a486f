#ifndef QCDIFF_LATTICE_ENUM_HPP
#define QCDIFF_LATTICE_ENUM_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qcdiff/common.hpp"

namespace qcdiff {

/// Enumerates the integer vectors z with lo <= (A z)_i <= hi componentwise,
/// A invertible.  Bounds per coordinate come from Fourier-Motzkin elimination
/// of the 2n half-space constraints, slightly widened, so no integer point of
/// the box is missed; callers re-check exact membership of whatever they
/// accept.  Visits points in lexicographic order of z.
class LatticeBoxEnumerator {
 public:
  LatticeBoxEnumerator(const Eigen::MatrixXd& A, const Eigen::VectorXd& lo,
                       const Eigen::VectorXd& hi);

  void for_each(const std::function<void(const IntVec&)>& visit) const;

  /// Volume of the box divided by |det A|: the expected number of lattice
  /// points, used for resource caps.
  double count_estimate() const { return count_estimate_; }

 private:
  struct Ineq {
    Eigen::VectorXd c;  // c . z <= b, coefficients for z[0..k]
    double b;
  };

  int n_;
  // systems_[k]: inequalities involving only z[0..k]; systems_[n-1] is the
  // original box, lower levels come from eliminating the last variable.
  std::vector<std::vector<Ineq>> systems_;
  double count_estimate_;
};

}  // namespace qcdiff

#endif  // QCDIFF_LATTICE_ENUM_HPP
