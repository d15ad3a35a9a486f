#ifndef QCDIFF_CORRELATIONS_HPP
#define QCDIFF_CORRELATIONS_HPP

#include <span>
#include <vector>

#include "qcdiff/modelset.hpp"
#include "qcdiff/testfunc.hpp"

namespace qcdiff {

/// Birkhoff averaging domain: translates on a regular grid kept `margin`
/// away from the cube boundary.  margin must dominate the probe supports
/// (>= 6 max sigma).
struct TranslateGrid {
  double spacing = 0.1;
  double margin = 3.0;
};

struct TestSumResult {
  Complex value;
  double tail_bound;  // Gaussian mass outside C_R, scaled by point density
};

/// N_h at one translate: sum over patch points of h(x - origin_shift).
TestSumResult eval_test_sum(const PointPatch& patch,
                            const GaussianTestFunction& h,
                            const Eigen::VectorXd& origin_shift);

/// Finite-R n-point correlation estimate for a separable product of probes:
///   (1/vol C_R) sum_{x in patch} prod_i [ sum_y g_i(y - x) ],
/// inner sums windowed to |y - x - c_i| <= window_sigmas * sigma_i per axis.
Complex npoint_correlation(const PointPatch& patch,
                           std::span<const GaussianTestFunction> funcs,
                           double window_sigmas = 6.0);

struct MomentEstimate {
  Complex value;
  double std_error;        // batch-means standard error over the grid
  std::size_t grid_points;
};

/// Grid-translate average of prod_i N_{h_i}(-t + Lambda): the Birkhoff
/// estimator of the n-th moment.
MomentEstimate birkhoff_moment(const PointPatch& patch,
                               std::span<const GaussianTestFunction> funcs,
                               const TranslateGrid& grid);

struct ReducedMomentReport {
  Complex lhs;              // mu_n(G) via the translate-product construction
  double lhs_std_error;
  Complex rhs;              // (int g) * n-point correlation estimate
  double rel_discrepancy;
};

/// Checks mu_n(g (T_x h_1) ... (T_x h_{n-1})) = (int g) gamma^{(n)}(h_1,...).
ReducedMomentReport verify_reduced_moment_identity(
    const PointPatch& patch, const GaussianTestFunction& g,
    std::span<const GaussianTestFunction> h_list, const TranslateGrid& grid);

}  // namespace qcdiff

#endif  // QCDIFF_CORRELATIONS_HPP
