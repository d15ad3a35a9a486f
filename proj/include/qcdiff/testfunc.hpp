#ifndef QCDIFF_TESTFUNC_HPP
#define QCDIFF_TESTFUNC_HPP

#include <Eigen/Dense>

#include "json.hpp"
#include "qcdiff/common.hpp"

namespace qcdiff {

/// The Schwartz-class probes used everywhere: complex Gaussians
///   h(x) = A exp(-|x-c|^2 / (2 sigma^2)) exp(2 pi i f.x)
/// with closed-form transform under hhat(k) = int h(x) e^{-2 pi i k.x} dx:
///   hhat(k) = A (2 pi sigma^2)^{d/2} e^{-2 pi^2 sigma^2 |k-f|^2}
///             e^{-2 pi i (k-f).c}.
/// The modulation f makes narrow spectral bumps expressible; it defaults to
/// zero.
struct GaussianTestFunction {
  Eigen::VectorXd center;
  double sigma = 1.0;
  Complex amplitude{1.0, 0.0};
  Eigen::VectorXd freq;  // empty means zero modulation

  GaussianTestFunction() = default;
  GaussianTestFunction(Eigen::VectorXd c, double s, Complex a = {1.0, 0.0},
                       Eigen::VectorXd f = {});

  int dim() const { return static_cast<int>(center.size()); }

  Complex eval(const Eigen::VectorXd& x) const;
  Complex fourier(const Eigen::VectorXd& k) const;
  /// int h(x) dx  (= fourier at k = 0).
  Complex integral() const;
  /// int_{|x-c| > r} |h(x)| dx, closed form for d = 1, 2.
  double tail_mass(double r) const;
  /// sup_k |fourier(k)| at distance r from the modulation frequency.
  double fourier_envelope(double r) const;

  /// Conjugate reflection x -> conj(h(-x)); its transform is conj(hhat(k)).
  GaussianTestFunction conjugate_reflection() const;

  nlohmann::json to_json() const;
  static GaussianTestFunction from_json(const nlohmann::json& j);
};

/// Convenience ctor for 1-d probes.
GaussianTestFunction gaussian1d(double center, double sigma,
                                Complex amplitude = {1.0, 0.0},
                                double freq = 0.0);

}  // namespace qcdiff

#endif  // QCDIFF_TESTFUNC_HPP
