#ifndef QCDIFF_MODELSET_HPP
#define QCDIFF_MODELSET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcdiff/scheme.hpp"
#include "qcdiff/window.hpp"

namespace qcdiff {

/// A sampled element of the hull, parametrized by the torus: physical
/// translate u and internal translate v.  singular_margin records the
/// smallest |star(m)+v - boundary| seen while checking, as a diagnostic.
struct HullPoint {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double singular_margin = std::numeric_limits<double>::infinity();
};

struct PatchPoint {
  IntVec coords;      // integer coordinates of the module point
  Eigen::VectorXd x;  // physical position phys(m) + u
};

/// A finite sample Lambda(W) intersected with the open cube C_R, with full
/// provenance.  Immutable after construction.
class PointPatch {
 public:
  PointPatch(CutProjectScheme scheme, Window window, HullPoint hull, double R,
             std::int64_t seed, std::vector<PatchPoint> points);

  const CutProjectScheme& scheme() const { return scheme_; }
  const Window& window() const { return window_; }
  const HullPoint& hull() const { return hull_; }
  double cube_side() const { return R_; }
  std::int64_t seed() const { return seed_; }
  const std::vector<PatchPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double cube_volume() const;

  /// Phase-sensitive consumers must not mix amplitude estimates across
  /// patches; this hash identifies the generating data.
  std::uint64_t identity_hash() const;

 private:
  CutProjectScheme scheme_;
  Window window_;
  HullPoint hull_;
  double R_;
  std::int64_t seed_;
  std::vector<PatchPoint> points_;
};

struct PatchOptions {
  double point_cap = 1e7;       // enumeration abort threshold
  double singular_tol = 1e-9;   // reject hulls with star points this close to dW
};

/// All module points m with phys(m)+u in the open cube C_R and star(m)+v in
/// W.  Integer bounds come from mapping C_R x bbox(W) through the inverse
/// basis, so the enumeration is complete.  Throws NumericError if any
/// candidate star coordinate falls within singular_tol of the window
/// boundary (singular hull for this range).
PointPatch generate_patch(const CutProjectScheme& scheme, const Window& window,
                          const HullPoint& hull, double R,
                          const PatchOptions& opts = {});

struct HullSampleOptions {
  int max_retries = 64;
  double probe_R = 256.0;  // nonsingularity is pre-checked on this range
  PatchOptions patch;
};

/// Uniform draw from the fundamental domain basis*[0,1)^{d+e}, seeded through
/// SplitMix64; resamples while the probe-range singularity check fails.
HullPoint sample_hull(const CutProjectScheme& scheme, const Window& window,
                      std::uint64_t seed, const HullSampleOptions& opts = {});

/// Points per unit volume of C_R.
double density(const PointPatch& patch);

/// Smallest pairwise distance between patch points (uniform discreteness
/// diagnostic).  Patch must have >= 2 points.
double min_gap(const PointPatch& patch);

// Patch file format: '# key=value' header lines, then one point per line as
// "<integer coords> <TAB> <physical coords>" with 17 significant digits.
void write_patch(const PointPatch& patch, std::ostream& os,
                 const std::string& config_hash = {});
std::string patch_to_string(const PointPatch& patch,
                            const std::string& config_hash = {});
PointPatch read_patch(std::istream& is);

}  // namespace qcdiff

#endif  // QCDIFF_MODELSET_HPP
