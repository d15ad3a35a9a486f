#ifndef QCDIFF_SCHEME_HPP
#define QCDIFF_SCHEME_HPP

#include <Eigen/Dense>
#include <string>

#include "json.hpp"
#include "qcdiff/common.hpp"

namespace qcdiff {

/// Which module a vector's integer coordinates refer to: the physical module
/// L (coordinates w.r.t. the scheme basis) or the Fourier module (coordinates
/// w.r.t. the dual basis).
enum class ModuleSide { kPhysical, kFourier };

/// A point of the physical or Fourier module, stored as exact integer
/// coordinates.  Module points are compared with exact integer equality;
/// both modules are dense in real space, so floating-point identity would be
/// meaningless.
struct ModuleVector {
  IntVec coords;
  ModuleSide side = ModuleSide::kPhysical;

  bool operator==(const ModuleVector& o) const {
    return side == o.side && coords == o.coords;
  }
};

inline ModuleVector physical_vector(IntVec c) {
  return ModuleVector{std::move(c), ModuleSide::kPhysical};
}
inline ModuleVector fourier_vector(IntVec c) {
  return ModuleVector{std::move(c), ModuleSide::kFourier};
}

/// A cut-and-project scheme: an invertible (d+e)x(d+e) basis whose columns
/// generate the embedded lattice.  The first d rows are physical
/// coordinates, the last e rows internal coordinates.  The dual basis
/// (inverse transpose) carries the Fourier module.
class CutProjectScheme {
 public:
  CutProjectScheme(int d, int e, Eigen::MatrixXd basis, std::string label,
                   std::string note = {});

  /// Named schemes: "z-fixture", "fibonacci", "silver-mean",
  /// "ammann-beenker".  Bit-exact across runs.
  static CutProjectScheme preset(const std::string& name);

  int physical_dim() const { return d_; }
  int internal_dim() const { return e_; }
  int total_dim() const { return d_ + e_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& dual_basis() const { return dual_basis_; }
  double covolume() const { return covolume_; }
  const std::string& label() const { return label_; }
  const std::string& note() const { return note_; }

  /// Embedded point in R^{d+e}: basis * coords for physical-side vectors,
  /// dual basis * coords for Fourier-side ones.
  Eigen::VectorXd embed(const ModuleVector& m) const;
  /// First d coordinates of embed(m).
  Eigen::VectorXd phys_coords(const ModuleVector& m) const;
  /// Last e coordinates of embed(m) (the star map).
  Eigen::VectorXd star_coords(const ModuleVector& m) const;

  /// The dual scheme: basis replaced by its inverse transpose.  Involution
  /// up to floating-point roundoff.
  CutProjectScheme dual() const;

  nlohmann::json to_json() const;
  static CutProjectScheme from_json(const nlohmann::json& j);

 private:
  int d_;
  int e_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd dual_basis_;
  double covolume_;
  std::string label_;
  std::string note_;
};

}  // namespace qcdiff

#endif  // QCDIFF_SCHEME_HPP
