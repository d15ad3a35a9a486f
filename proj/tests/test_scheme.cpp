#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qcdiff/rng.hpp"
#include "qcdiff/scheme.hpp"

using namespace qcdiff;

namespace {
const double kTau = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("z-fixture preset is the identity scheme") {
  const auto s = CutProjectScheme::preset("z-fixture");
  CHECK(s.physical_dim() == 1);
  CHECK(s.internal_dim() == 1);
  CHECK(s.basis().isIdentity(1e-15));
  CHECK(s.covolume() == doctest::Approx(1.0));
  CHECK(s.phys_coords(physical_vector({3, 0}))[0] == doctest::Approx(3.0));
  CHECK(s.star_coords(physical_vector({0, 2}))[0] == doctest::Approx(2.0));
  // self-dual
  CHECK(s.dual().basis().isIdentity(1e-12));
}

TEST_CASE("fibonacci preset columns and covolume") {
  const auto s = CutProjectScheme::preset("fibonacci");
  CHECK(s.phys_coords(physical_vector({1, 0}))[0] == doctest::Approx(1.0));
  CHECK(s.phys_coords(physical_vector({0, 1}))[0] ==
        doctest::Approx(kTau).epsilon(1e-12));
  CHECK(s.star_coords(physical_vector({1, 0}))[0] == doctest::Approx(1.0));
  CHECK(s.star_coords(physical_vector({0, 1}))[0] ==
        doctest::Approx(1.0 - kTau).epsilon(1e-12));
  CHECK(s.covolume() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("unknown preset rejected") {
  CHECK_THROWS_AS(CutProjectScheme::preset("nosuch"), ConfigError);
}

TEST_CASE("dual basis is the inverse transpose; dual of dual restores") {
  for (const char* name : {"fibonacci", "silver-mean", "ammann-beenker"}) {
    const auto s = CutProjectScheme::preset(name);
    const Eigen::MatrixXd expect = s.basis().inverse().transpose();
    CHECK((s.dual().basis() - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.dual().dual().basis() - s.basis()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("singular basis rejected") {
  Eigen::Matrix2d b;
  b << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(CutProjectScheme(1, 1, b, "bad"), NumericError);
}

TEST_CASE("embedding is linear over exact integer addition") {
  const auto s = CutProjectScheme::preset("fibonacci");
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    IntVec a{static_cast<std::int64_t>(rng.next_below(2001)) - 1000,
             static_cast<std::int64_t>(rng.next_below(2001)) - 1000};
    IntVec b{static_cast<std::int64_t>(rng.next_below(2001)) - 1000,
             static_cast<std::int64_t>(rng.next_below(2001)) - 1000};
    const Eigen::VectorXd lhs = s.phys_coords(physical_vector(a + b));
    const Eigen::VectorXd rhs =
        s.phys_coords(physical_vector(a)) + s.phys_coords(physical_vector(b));
    CHECK(std::abs(lhs[0] - rhs[0]) < 1e-10 * (1.0 + std::abs(rhs[0])));
  }
}

TEST_CASE("dual pairing lands on integers") {
  for (const char* name : {"fibonacci", "silver-mean", "ammann-beenker"}) {
    const auto s = CutProjectScheme::preset(name);
    const int dim = s.total_dim();
    SplitMix64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
      IntVec m(static_cast<std::size_t>(dim)), k(static_cast<std::size_t>(dim));
      for (auto& c : m) c = static_cast<std::int64_t>(rng.next_below(41)) - 20;
      for (auto& c : k) c = static_cast<std::int64_t>(rng.next_below(41)) - 20;
      const auto x = s.embed(physical_vector(m));
      const auto y = s.embed(fourier_vector(k));
      const double pairing = x.dot(y);
      CHECK(std::abs(pairing - std::round(pairing)) < 1e-9);
    }
  }
}

TEST_CASE("json round trip") {
  const auto s = CutProjectScheme::preset("fibonacci");
  const auto back = CutProjectScheme::from_json(s.to_json());
  CHECK(back.label() == s.label());
  CHECK((back.basis() - s.basis()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("module vector dimension mismatch is an error") {
  const auto s = CutProjectScheme::preset("fibonacci");
  CHECK_THROWS_AS(s.phys_coords(physical_vector({1, 2, 3})), NumericError);
}
