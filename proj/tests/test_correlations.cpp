#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "qcdiff/correlations.hpp"
#include "qcdiff/numeric.hpp"

using namespace qcdiff;

namespace {

const double kTau = (1.0 + std::sqrt(5.0)) / 2.0;

HullPoint hull1d(double u, double v) {
  HullPoint h;
  h.u = Eigen::VectorXd::Constant(1, u);
  h.v = Eigen::VectorXd::Constant(1, v);
  return h;
}

PointPatch z_patch(double R) {
  return generate_patch(CutProjectScheme::preset("z-fixture"),
                        Window::interval(-0.5, 0.5), hull1d(0.0, 0.0), R);
}

PointPatch fib_patch(double R) {
  return generate_patch(CutProjectScheme::preset("fibonacci"),
                        Window::interval(0.0, kTau), hull1d(0.0, 1e-3), R);
}

// Simpson quadrature oracle for the Gaussian transform
Complex quad_fourier(const GaussianTestFunction& h, double k) {
  const double lo = h.center[0] - 12.0 * h.sigma;
  const double hi = h.center[0] + 12.0 * h.sigma;
  const int steps = 20000;
  const double dx = (hi - lo) / steps;
  Complex acc{0.0, 0.0};
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * dx;
    const double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    Eigen::VectorXd xv(1);
    xv[0] = x;
    acc += wgt * h.eval(xv) * unit_phase(-kTwoPi * k * x);
  }
  return acc * (dx / 3.0);
}

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("closed-form transform matches quadrature at five frequencies") {
  const auto h = gaussian1d(0.3, 0.5, Complex(0.8, -0.4), 0.7);
  for (double k : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
    const Complex cf = h.fourier(vec1(k));
    const Complex q = quad_fourier(h, k);
    CHECK(std::abs(cf - q) < 1e-8);
  }
}

TEST_CASE("eval_test_sum matches direct summation over |m| <= 20") {
  const auto patch = z_patch(1000.0);
  const auto h = gaussian1d(0.0, 1.0);
  const auto result = eval_test_sum(patch, h, Eigen::VectorXd::Zero(1));
  Complex direct{0.0, 0.0};
  for (int m = -20; m <= 20; ++m) direct += h.eval(vec1(m));
  CHECK(std::abs(result.value - direct) < 1e-10);
  CHECK(result.tail_bound >= 0.0);
}

TEST_CASE("eval_test_sum zero amplitude gives exactly zero") {
  const auto patch = z_patch(50.0);
  const auto zero_amp = gaussian1d(0.0, 1.0, Complex(0.0, 0.0));
  CHECK(std::abs(eval_test_sum(patch, zero_amp, Eigen::VectorXd::Zero(1)).value) == 0.0);
}

TEST_CASE("npoint n=1 diagonal: probe at a lattice difference") {
  const auto patch = z_patch(1000.0);
  const auto g = gaussian1d(1.0, 0.1);
  const Complex val = npoint_correlation(patch, std::vector{g});
  // oracle: direct double-sum over the same finite patch
  Complex direct{0.0, 0.0};
  for (const auto& x : patch.points())
    for (const auto& y : patch.points())
      direct += g.eval(y.x - x.x);
  direct /= patch.cube_volume();
  CHECK(std::abs(val - direct) < 1e-8);
  // and the limit value: one contributing difference per interior point
  CHECK(std::abs(val - g.eval(vec1(1.0))) < 0.01);
}

TEST_CASE("npoint n=1 off-support: probe between lattice differences") {
  const auto patch = z_patch(1000.0);
  const auto g = gaussian1d(0.5, 0.05);  // support window misses every integer
  CHECK(std::abs(npoint_correlation(patch, std::vector{g})) <= 1e-20);
}

TEST_CASE("npoint fibonacci pair count oracle") {
  const auto patch = fib_patch(1e4);
  const auto g = gaussian1d(1.0, 0.05);
  const Complex val = npoint_correlation(patch, std::vector{g});
  // brute-force difference-vector count: y - x = 1 occurs once per short
  // tile; each such pair contributes g(1) = amplitude
  std::size_t pairs = 0;
  const auto& pts = patch.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (std::abs(pts[i + 1].x[0] - pts[i].x[0] - 1.0) < 1e-9) ++pairs;
  const double expect = static_cast<double>(pairs) / patch.cube_volume();
  CHECK(std::abs(val.real() - expect) < 1e-6);
}

TEST_CASE("margin violation rejected") {
  const auto patch = z_patch(20.0);
  const auto g = gaussian1d(15.0, 1.0);
  CHECK_THROWS_AS(npoint_correlation(patch, std::vector{g}), NumericError);
}

TEST_CASE("birkhoff n=1 equals density times integral") {
  const auto patch = z_patch(1000.0);
  const auto h = gaussian1d(0.2, 0.4);
  const auto est = birkhoff_moment(patch, std::vector{h}, TranslateGrid{0.1, 3.0});
  const Complex expect = h.integral() * density(patch);
  CHECK(std::abs(est.value - expect) / std::abs(expect) < 0.01);
}

TEST_CASE("birkhoff zero amplitude gives zero") {
  const auto patch = z_patch(200.0);
  const auto h = gaussian1d(0.0, 0.3, Complex(0.0, 0.0));
  const auto est = birkhoff_moment(patch, std::vector{h, h}, TranslateGrid{0.1, 2.0});
  CHECK(std::abs(est.value) == 0.0);
}

TEST_CASE("birkhoff n=2 matches the same-grid brute-force oracle to 1e-6") {
  const auto patch = z_patch(400.0);
  const std::vector<GaussianTestFunction> hs{gaussian1d(0.0, 0.35),
                                             gaussian1d(0.3, 0.4)};
  const TranslateGrid grid{0.25 * 0.35, 6.0 * 0.4};
  const auto est = birkhoff_moment(patch, hs, grid);

  // oracle: same grid, but N_h evaluated by unwindowed direct summation
  const double half = patch.cube_side() / 2.0 - grid.margin;
  std::vector<Complex> vals;
  for (std::size_t j = 0; j < est.grid_points; ++j) {
    const double t = -half + grid.spacing * static_cast<double>(j);
    Complex prod{1.0, 0.0};
    for (const auto& h : hs) {
      Complex acc{0.0, 0.0};
      for (const auto& p : patch.points()) acc += h.eval(p.x - vec1(t));
      prod *= acc;
    }
    vals.push_back(prod);
  }
  const Complex oracle = pairwise_sum(vals) / static_cast<double>(vals.size());
  CHECK(std::abs(est.value - oracle) < 1e-6 * std::max(1.0, std::abs(oracle)));
}

TEST_CASE("birkhoff margin rule enforced") {
  const auto patch = z_patch(200.0);
  const auto h = gaussian1d(0.0, 1.0);
  CHECK_THROWS_AS(birkhoff_moment(patch, std::vector{h}, TranslateGrid{0.1, 2.0}),
                  NumericError);
}

TEST_CASE("estimators are linear in each probe") {
  const auto patch = fib_patch(2000.0);
  const auto g1 = gaussian1d(0.0, 0.3);
  auto g2 = g1;
  g2.amplitude = Complex(-1.7, 0.9);
  const auto h = gaussian1d(1.0, 0.25);
  const Complex v1 = npoint_correlation(patch, std::vector{g1, h});
  const Complex v2 = npoint_correlation(patch, std::vector{g2, h});
  CHECK(std::abs(v2 - g2.amplitude * v1) <= 1e-12 * std::abs(v1));
}

TEST_CASE("reduced moment identity on the integer lattice, n=2,3") {
  const auto patch = z_patch(1000.0);
  const auto g = gaussian1d(0.0, 0.3);
  const TranslateGrid grid{0.075, 3.0};
  {
    const std::vector<GaussianTestFunction> hs{gaussian1d(1.0, 0.25)};
    const auto rep = verify_reduced_moment_identity(patch, g, hs, grid);
    CHECK(rep.rel_discrepancy <= 0.02);
  }
  {
    const std::vector<GaussianTestFunction> hs{gaussian1d(1.0, 0.25),
                                               gaussian1d(-1.0, 0.25)};
    const auto rep = verify_reduced_moment_identity(patch, g, hs, grid);
    CHECK(rep.rel_discrepancy <= 0.02);
  }
}

TEST_CASE("reduced moment identity with zero-amplitude g vanishes both sides") {
  const auto patch = z_patch(300.0);
  const auto g = gaussian1d(0.0, 0.3, Complex(0.0, 0.0));
  const std::vector<GaussianTestFunction> hs{gaussian1d(1.0, 0.25)};
  const auto rep =
      verify_reduced_moment_identity(patch, g, hs, TranslateGrid{0.1, 2.0});
  CHECK(std::abs(rep.lhs) == 0.0);
  CHECK(std::abs(rep.rhs) == 0.0);
}

TEST_CASE("reduced moment identity on fibonacci, n=2") {
  const auto patch = fib_patch(1e4);
  const auto g = gaussian1d(0.0, 0.3);
  const std::vector<GaussianTestFunction> hs{gaussian1d(1.0, 0.25)};
  const auto rep =
      verify_reduced_moment_identity(patch, g, hs, TranslateGrid{0.075, 3.0});
  CHECK(rep.rel_discrepancy <= 0.05);
}

TEST_CASE("translation invariance of the correlation estimator") {
  const auto base = fib_patch(2000.0);
  const auto moved = generate_patch(CutProjectScheme::preset("fibonacci"),
                                    Window::interval(0.0, kTau),
                                    hull1d(1.0, 1e-3), 2000.0);
  const std::vector<GaussianTestFunction> gs{gaussian1d(1.0, 0.1)};
  const Complex a = npoint_correlation(base, gs);
  const Complex b = npoint_correlation(moved, gs);
  CHECK(std::abs(a - b) <= 5.0 / 2000.0 * std::max(std::abs(a), 1.0));
}

TEST_CASE("convergence: doubling R moves the estimate within error bars") {
  const auto p1 = fib_patch(4000.0);
  const auto p2 = fib_patch(8000.0);
  const std::vector<GaussianTestFunction> hs{gaussian1d(0.0, 0.3),
                                             gaussian1d(0.3, 0.35)};
  const TranslateGrid grid{0.075, 2.5};
  const auto e1 = birkhoff_moment(p1, hs, grid);
  const auto e2 = birkhoff_moment(p2, hs, grid);
  CHECK(std::abs(e1.value - e2.value) <=
        3.0 * (e1.std_error + e2.std_error) + 0.01 * std::abs(e1.value));
}
