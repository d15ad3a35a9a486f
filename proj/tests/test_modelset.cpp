#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qcdiff/modelset.hpp"

using namespace qcdiff;

namespace {

const double kTau = (1.0 + std::sqrt(5.0)) / 2.0;

HullPoint hull1d(double u, double v) {
  HullPoint h;
  h.u = Eigen::VectorXd::Constant(1, u);
  h.v = Eigen::VectorXd::Constant(1, v);
  return h;
}

PointPatch fib_patch(double R, double v = 1e-3) {
  return generate_patch(CutProjectScheme::preset("fibonacci"),
                        Window::interval(0.0, kTau), hull1d(0.0, v), R);
}

// Independent oracle: the golden chain as a substitution word.  a |-> ab,
// b |-> a, with tile lengths tau (a) and 1 (b).
std::string fib_word(std::size_t min_len) {
  std::string w = "a";
  while (w.size() < min_len) {
    std::string next;
    for (char c : w) next += (c == 'a') ? "ab" : "a";
    w = std::move(next);
  }
  return w;
}

}  // namespace

TEST_CASE("z-fixture patch R=10 holds exactly the nine points -4..4") {
  const auto patch =
      generate_patch(CutProjectScheme::preset("z-fixture"),
                     Window::interval(-0.5, 0.5), hull1d(0.0, 0.0), 10.0);
  REQUIRE(patch.size() == 9);
  for (std::size_t i = 0; i < 9; ++i)
    CHECK(patch.points()[i].x[0] ==
          doctest::Approx(-4.0 + static_cast<double>(i)));
  CHECK(density(patch) == doctest::Approx(0.9));
}

TEST_CASE("fibonacci density matches vol(W)/covolume") {
  const auto patch = fib_patch(1e4);
  CHECK(std::abs(static_cast<double>(patch.size()) / 1e4 -
                 kTau / std::sqrt(5.0)) <= 1e-3);
}

TEST_CASE("fibonacci nearest-neighbour gaps take exactly two values 1, tau") {
  const auto patch = fib_patch(1e4);
  std::set<double> gaps;
  const auto& pts = patch.points();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double g = pts[i].x[0] - pts[i - 1].x[0];
    bool known = false;
    for (double v : gaps)
      if (std::abs(v - g) < 1e-9) known = true;
    if (!known) gaps.insert(g);
  }
  REQUIRE(gaps.size() == 2);
  CHECK(std::abs(*gaps.begin() - 1.0) < 1e-9);
  CHECK(std::abs(*gaps.rbegin() - kTau) < 1e-9);
}

TEST_CASE("fibonacci gap word letters appear as substitution-word factors") {
  const auto patch = fib_patch(2e3);
  const auto& pts = patch.points();
  std::string gap_word;
  for (std::size_t i = 1; i < pts.size(); ++i)
    gap_word += (pts[i].x[0] - pts[i - 1].x[0] > 1.3) ? 'a' : 'b';
  const std::string oracle = fib_word(4096);
  // golden chains are uniformly recurrent: every bounded factor of the patch
  // word must occur in the substitution word
  for (std::size_t start = 0; start + 12 <= gap_word.size(); start += 7)
    CHECK(oracle.find(gap_word.substr(start, 12)) != std::string::npos);
  // letter frequencies approach the golden ratio
  const auto na = static_cast<double>(std::count(gap_word.begin(), gap_word.end(), 'a'));
  const auto nb = static_cast<double>(gap_word.size()) - na;
  CHECK(std::abs(na / nb - kTau) < 0.05);
}

TEST_CASE("singular hull rejected: fibonacci window boundary hit at v=0") {
  CHECK_THROWS_AS(fib_patch(100.0, 0.0), NumericError);
}

TEST_CASE("monotonicity: patch at R equals larger patch cut to C_R") {
  const auto small = fib_patch(500.0);
  const auto large = fib_patch(1500.0);
  std::vector<IntVec> cut;
  for (const auto& p : large.points())
    if (std::abs(p.x[0]) < 250.0) cut.push_back(p.coords);
  REQUIRE(cut.size() == small.size());
  for (std::size_t i = 0; i < cut.size(); ++i)
    CHECK(cut[i] == small.points()[i].coords);
}

TEST_CASE("translation consistency on the overlap") {
  const double R = 400.0;
  const double u = 7.25;
  const auto base = generate_patch(CutProjectScheme::preset("fibonacci"),
                                   Window::interval(0.0, kTau),
                                   hull1d(0.0, 1e-3), R);
  const auto moved = generate_patch(CutProjectScheme::preset("fibonacci"),
                                    Window::interval(0.0, kTau),
                                    hull1d(u, 1e-3), R);
  // moved = base + u restricted to C_R; compare on the overlap interval
  std::vector<double> overlap_base, overlap_moved;
  for (const auto& p : base.points()) {
    const double y = p.x[0] + u;
    if (std::abs(y) < R / 2.0 - 1e-9) overlap_base.push_back(y);
  }
  for (const auto& p : moved.points())
    if (std::abs(p.x[0] - u) < R / 2.0 - 1e-9) overlap_moved.push_back(p.x[0]);
  REQUIRE(overlap_base.size() == overlap_moved.size());
  for (std::size_t i = 0; i < overlap_base.size(); ++i)
    CHECK(std::abs(overlap_base[i] - overlap_moved[i]) < 1e-9);
}

TEST_CASE("uniform discreteness: min gap stable as R grows") {
  const double g1 = min_gap(fib_patch(500.0));
  const double g2 = min_gap(fib_patch(4000.0));
  CHECK(g1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sample_hull: determinism and uniformity") {
  const auto scheme = CutProjectScheme::preset("z-fixture");
  const auto window = Window::interval(-0.5, 0.5);
  const auto h1 = sample_hull(scheme, window, 42);
  const auto h2 = sample_hull(scheme, window, 42);
  CHECK(h1.u[0] == h2.u[0]);
  CHECK(h1.v[0] == h2.v[0]);

  double mean_u = 0.0;
  const int samples = 1000;
  for (int s = 0; s < samples; ++s)
    mean_u += sample_hull(scheme, window, static_cast<std::uint64_t>(s)).u[0];
  mean_u /= samples;
  CHECK(std::abs(mean_u - 0.5) < 0.05);
}

TEST_CASE("degenerate window rejected") {
  CHECK_THROWS_AS(Window::interval(0.0, 1e-12), NumericError);
}

TEST_CASE("patch file round trip") {
  const auto patch = fib_patch(200.0);
  std::ostringstream os;
  write_patch(patch, os, "deadbeef");
  std::istringstream is(os.str());
  const auto back = read_patch(is);
  REQUIRE(back.size() == patch.size());
  CHECK(back.cube_side() == patch.cube_side());
  CHECK(back.scheme().label() == patch.scheme().label());
  for (std::size_t i = 0; i < patch.size(); ++i) {
    CHECK(back.points()[i].coords == patch.points()[i].coords);
    CHECK(back.points()[i].x[0] == patch.points()[i].x[0]);
  }
  CHECK(back.hull().v[0] == patch.hull().v[0]);
}

TEST_CASE("ammann-beenker octagon patch: 4d enumeration works") {
  const auto scheme = CutProjectScheme::preset("ammann-beenker");
  // regular octagon window, circumradius 1
  std::vector<Eigen::Vector2d> verts;
  for (int i = 0; i < 8; ++i) {
    const double th = (2.0 * i + 1.0) * M_PI / 8.0;
    verts.emplace_back(std::cos(th), std::sin(th));
  }
  const auto window = Window::polygon(verts);
  HullPoint h;
  h.u = Eigen::VectorXd::Zero(2);
  h.v = Eigen::VectorXd::Constant(2, 1e-3);
  const auto patch = generate_patch(scheme, window, h, 30.0);
  CHECK(patch.size() > 100);
  // density = vol(W)/covolume
  CHECK(std::abs(density(patch) - window.volume() / scheme.covolume()) < 0.02);
  CHECK(min_gap(patch) > 0.2);
}
