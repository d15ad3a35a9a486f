#include "qcdiff/correlations.hpp"

#include <algorithm>
#include <cmath>

#include "qcdiff/numeric.hpp"

namespace qcdiff {

GaussianTestFunction::GaussianTestFunction(Eigen::VectorXd c, double s,
                                           Complex a, Eigen::VectorXd f)
    : center(std::move(c)), sigma(s), amplitude(a), freq(std::move(f)) {
  if (!(sigma >= 1e-6)) throw NumericError("gaussian sigma must be >= 1e-6");
  if (freq.size() == 0) freq = Eigen::VectorXd::Zero(center.size());
  if (freq.size() != center.size())
    throw NumericError("gaussian freq/center dimension mismatch");
}

Complex GaussianTestFunction::eval(const Eigen::VectorXd& x) const {
  if (x.size() != center.size())
    throw NumericError("gaussian eval: dimension mismatch");
  const double r2 = (x - center).squaredNorm();
  Complex out = amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
  const double fx = freq.dot(x);
  if (fx != 0.0) out *= unit_phase(kTwoPi * fx);
  return out;
}

Complex GaussianTestFunction::fourier(const Eigen::VectorXd& k) const {
  if (k.size() != center.size())
    throw NumericError("gaussian fourier: dimension mismatch");
  const int d = dim();
  const Eigen::VectorXd q = k - freq;
  const double norm = std::pow(kTwoPi * sigma * sigma, d / 2.0);
  const double decay = std::exp(-2.0 * kPi * kPi * sigma * sigma * q.squaredNorm());
  return amplitude * norm * decay * unit_phase(-kTwoPi * q.dot(center));
}

Complex GaussianTestFunction::integral() const {
  return fourier(Eigen::VectorXd::Zero(dim()));
}

double GaussianTestFunction::tail_mass(double r) const {
  const double a = std::abs(amplitude);
  if (r <= 0.0)
    return a * std::pow(kTwoPi * sigma * sigma, dim() / 2.0);
  if (dim() == 1)
    return a * sigma * std::sqrt(kTwoPi) * std::erfc(r / (sigma * std::sqrt(2.0)));
  // d = 2 radial integral: 2 pi sigma^2 e^{-r^2/2sigma^2}
  return a * kTwoPi * sigma * sigma * std::exp(-r * r / (2.0 * sigma * sigma));
}

double GaussianTestFunction::fourier_envelope(double r) const {
  const double norm =
      std::abs(amplitude) * std::pow(kTwoPi * sigma * sigma, dim() / 2.0);
  if (r <= 0.0) return norm;
  return norm * std::exp(-2.0 * kPi * kPi * sigma * sigma * r * r);
}

GaussianTestFunction GaussianTestFunction::conjugate_reflection() const {
  return GaussianTestFunction(-center, sigma, std::conj(amplitude), freq);
}

nlohmann::json GaussianTestFunction::to_json() const {
  nlohmann::json j;
  j["center"] = std::vector<double>(center.data(), center.data() + center.size());
  j["sigma"] = sigma;
  j["amp"] = {amplitude.real(), amplitude.imag()};
  j["freq"] = std::vector<double>(freq.data(), freq.data() + freq.size());
  return j;
}

GaussianTestFunction GaussianTestFunction::from_json(const nlohmann::json& j) {
  try {
    const auto c = j.at("center").get<std::vector<double>>();
    Eigen::VectorXd center = Eigen::Map<const Eigen::VectorXd>(
        c.data(), static_cast<Eigen::Index>(c.size()));
    const double sigma = j.at("sigma").get<double>();
    Complex amp{1.0, 0.0};
    if (j.contains("amp")) {
      const auto a = j.at("amp").get<std::vector<double>>();
      amp = Complex(a.at(0), a.size() > 1 ? a[1] : 0.0);
    }
    Eigen::VectorXd freq;
    if (j.contains("freq")) {
      const auto f = j.at("freq").get<std::vector<double>>();
      freq = Eigen::Map<const Eigen::VectorXd>(f.data(),
                                               static_cast<Eigen::Index>(f.size()));
    }
    return GaussianTestFunction(std::move(center), sigma, amp, std::move(freq));
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad gaussian JSON: ") + ex.what());
  }
}

GaussianTestFunction gaussian1d(double center, double sigma, Complex amplitude,
                                double freq) {
  Eigen::VectorXd c(1), f(1);
  c[0] = center;
  f[0] = freq;
  return GaussianTestFunction(std::move(c), sigma, amplitude, std::move(f));
}

// ---------------------------------------------------------------------------

namespace {

/// Contiguous index range of patch points whose first coordinate lies in
/// [lo, hi] (points are sorted by first coordinate).
std::pair<std::size_t, std::size_t> first_coord_range(
    const std::vector<PatchPoint>& pts, double lo, double hi) {
  auto cmp_lo = [](const PatchPoint& p, double v) { return p.x[0] < v; };
  auto cmp_hi = [](double v, const PatchPoint& p) { return v < p.x[0]; };
  const auto b = std::lower_bound(pts.begin(), pts.end(), lo, cmp_lo);
  const auto e = std::upper_bound(pts.begin(), pts.end(), hi, cmp_hi);
  return {static_cast<std::size_t>(b - pts.begin()),
          static_cast<std::size_t>(e - pts.begin())};
}

/// sum over patch points y near `around` of h(y - shift); the window is
/// |y - (around)|_axis <= cut per axis with cut = window_sigmas*sigma around
/// the probe center.
Complex local_test_sum(const std::vector<PatchPoint>& pts,
                       const GaussianTestFunction& h,
                       const Eigen::VectorXd& shift, double window_sigmas) {
  const double cut = window_sigmas * h.sigma;
  const Eigen::VectorXd lo =
      shift + h.center - Eigen::VectorXd::Constant(h.dim(), cut);
  const Eigen::VectorXd hi =
      shift + h.center + Eigen::VectorXd::Constant(h.dim(), cut);
  auto [b, e] = first_coord_range(pts, lo[0], hi[0]);
  Complex acc{0.0, 0.0};
  for (std::size_t i = b; i < e; ++i) {
    bool inside = true;
    for (Eigen::Index ax = 1; ax < lo.size(); ++ax)
      if (pts[i].x[ax] < lo[ax] || pts[i].x[ax] > hi[ax]) {
        inside = false;
        break;
      }
    if (inside) acc += h.eval(pts[i].x - shift);
  }
  return acc;
}

void require_probe_fits(const PointPatch& patch,
                        std::span<const GaussianTestFunction> funcs,
                        double window_sigmas) {
  for (const auto& h : funcs) {
    if (h.dim() != patch.scheme().physical_dim())
      throw NumericError("probe dimension does not match patch");
    const double reach = h.center.lpNorm<Eigen::Infinity>() +
                         window_sigmas * h.sigma;
    if (reach >= patch.cube_side() / 2.0)
      throw NumericError("margin violation: probe support does not fit in C_R");
  }
}

}  // namespace

TestSumResult eval_test_sum(const PointPatch& patch,
                            const GaussianTestFunction& h,
                            const Eigen::VectorXd& origin_shift) {
  if (h.dim() != patch.scheme().physical_dim())
    throw NumericError("probe dimension does not match patch");
  const auto& pts = patch.points();
  std::vector<Complex> terms(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    terms[i] = h.eval(pts[i].x - origin_shift);
  });
  // Gaussian mass beyond the cube, at the patch's own density
  const double reach = (origin_shift + h.center).lpNorm<Eigen::Infinity>();
  const double room = std::max(patch.cube_side() / 2.0 - reach, 0.0);
  const double dens = pts.empty() ? 1.0 : density(patch);
  return {pairwise_sum(terms), dens * h.tail_mass(room)};
}

Complex npoint_correlation(const PointPatch& patch,
                           std::span<const GaussianTestFunction> funcs,
                           double window_sigmas) {
  if (funcs.empty()) throw NumericError("npoint_correlation: need n >= 1");
  require_probe_fits(patch, funcs, window_sigmas);
  const auto& pts = patch.points();
  std::vector<Complex> terms(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    Complex prod{1.0, 0.0};
    for (const auto& h : funcs)
      prod *= local_test_sum(pts, h, pts[i].x, window_sigmas);
    terms[i] = prod;
  });
  return pairwise_sum(terms) / patch.cube_volume();
}

namespace {

std::vector<Eigen::VectorXd> grid_translates(const PointPatch& patch,
                                             const TranslateGrid& grid) {
  if (!(grid.spacing > 0.0)) throw NumericError("grid spacing must be > 0");
  if (grid.margin < 0.0) throw NumericError("grid margin must be >= 0");
  const int d = patch.scheme().physical_dim();
  const double half = patch.cube_side() / 2.0 - grid.margin;
  if (!(half > 0.0)) throw NumericError("grid margin leaves no translates");
  const auto per_axis = static_cast<std::int64_t>(std::floor(2.0 * half / grid.spacing)) + 1;
  std::vector<Eigen::VectorXd> out;
  if (d == 1) {
    out.reserve(static_cast<std::size_t>(per_axis));
    for (std::int64_t j = 0; j < per_axis; ++j) {
      Eigen::VectorXd t(1);
      t[0] = -half + grid.spacing * static_cast<double>(j);
      out.push_back(t);
    }
  } else {
    // product grid in lexicographic order
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      Eigen::VectorXd t(d);
      for (int ax = 0; ax < d; ++ax)
        t[ax] = -half + grid.spacing * static_cast<double>(idx[static_cast<std::size_t>(ax)]);
      out.push_back(t);
      int ax = d - 1;
      while (ax >= 0 && ++idx[static_cast<std::size_t>(ax)] == per_axis) {
        idx[static_cast<std::size_t>(ax)] = 0;
        --ax;
      }
      if (ax < 0) break;
    }
  }
  if (out.empty()) throw NumericError("empty translate grid");
  return out;
}

double batch_means_stderr(const std::vector<Complex>& vals, Complex mean) {
  const std::size_t nb = std::min<std::size_t>(16, vals.size());
  if (nb < 2) return 0.0;
  std::vector<Complex> bm;
  const std::size_t per = vals.size() / nb;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t begin = b * per;
    const std::size_t end = (b + 1 == nb) ? vals.size() : begin + per;
    Complex acc{0.0, 0.0};
    for (std::size_t i = begin; i < end; ++i) acc += vals[i];
    bm.push_back(acc / static_cast<double>(end - begin));
  }
  double var = 0.0;
  for (const auto& m : bm) var += std::norm(m - mean);
  var /= static_cast<double>(nb - 1);
  return std::sqrt(var / static_cast<double>(nb));
}

}  // namespace

MomentEstimate birkhoff_moment(const PointPatch& patch,
                               std::span<const GaussianTestFunction> funcs,
                               const TranslateGrid& grid) {
  if (funcs.empty()) throw NumericError("birkhoff_moment: need n >= 1");
  double max_sigma = 0.0;
  for (const auto& h : funcs) max_sigma = std::max(max_sigma, h.sigma);
  if (grid.margin < 6.0 * max_sigma)
    throw NumericError("margin violation: grid margin < 6 max sigma");
  require_probe_fits(patch, funcs, 6.0);
  const auto ts = grid_translates(patch, grid);
  const auto& pts = patch.points();
  std::vector<Complex> vals(ts.size());
  parallel_for(ts.size(), [&](std::size_t j) {
    Complex prod{1.0, 0.0};
    for (const auto& h : funcs) prod *= local_test_sum(pts, h, ts[j], 6.0);
    vals[j] = prod;
  });
  const Complex mean = pairwise_sum(vals) / static_cast<double>(vals.size());
  return {mean, batch_means_stderr(vals, mean), vals.size()};
}

ReducedMomentReport verify_reduced_moment_identity(
    const PointPatch& patch, const GaussianTestFunction& g,
    std::span<const GaussianTestFunction> h_list, const TranslateGrid& grid) {
  if (h_list.empty())
    throw NumericError("verify_reduced_moment_identity: need n >= 2");
  double max_sigma = g.sigma;
  for (const auto& h : h_list) max_sigma = std::max(max_sigma, h.sigma);
  if (grid.margin < 6.0 * max_sigma)
    throw NumericError("margin violation: grid margin < 6 max sigma");
  require_probe_fits(patch, h_list, 6.0);

  const auto& pts = patch.points();
  // S(x) = prod_i sum_y h_i(y - x), cached per patch point
  std::vector<Complex> inner(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    Complex prod{1.0, 0.0};
    for (const auto& h : h_list) prod *= local_test_sum(pts, h, pts[i].x, 6.0);
    inner[i] = prod;
  });

  const auto ts = grid_translates(patch, grid);
  std::vector<Complex> vals(ts.size());
  const double cut = 6.0 * g.sigma;
  parallel_for(ts.size(), [&](std::size_t j) {
    const Eigen::VectorXd lo = ts[j] + g.center -
                               Eigen::VectorXd::Constant(g.dim(), cut);
    const Eigen::VectorXd hi = ts[j] + g.center +
                               Eigen::VectorXd::Constant(g.dim(), cut);
    auto [b, e] = first_coord_range(pts, lo[0], hi[0]);
    Complex acc{0.0, 0.0};
    for (std::size_t i = b; i < e; ++i) {
      bool inside = true;
      for (Eigen::Index ax = 1; ax < lo.size(); ++ax)
        if (pts[i].x[ax] < lo[ax] || pts[i].x[ax] > hi[ax]) {
          inside = false;
          break;
        }
      if (inside) acc += g.eval(pts[i].x - ts[j]) * inner[i];
    }
    vals[j] = acc;
  });
  const Complex lhs = pairwise_sum(vals) / static_cast<double>(vals.size());
  const double lhs_se = batch_means_stderr(vals, lhs);

  const Complex corr = npoint_correlation(patch, h_list);
  const Complex rhs = g.integral() * corr;
  const double scale = std::max(std::abs(rhs), 1e-300);
  return {lhs, lhs_se, rhs, std::abs(lhs - rhs) / scale};
}

}  // namespace qcdiff
