#include "qcdiff/scheme.hpp"

#include <cmath>

namespace qcdiff {

namespace {

constexpr double kDetFloor = 1e-12;
constexpr double kRankTol = 1e-10;

Eigen::VectorXd to_real(const IntVec& coords) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(coords.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = static_cast<double>(coords[static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

CutProjectScheme::CutProjectScheme(int d, int e, Eigen::MatrixXd basis,
                                   std::string label, std::string note)
    : d_(d), e_(e), basis_(std::move(basis)), label_(std::move(label)),
      note_(std::move(note)) {
  if (d_ < 1 || e_ < 1)
    throw NumericError("scheme dimensions must satisfy d >= 1, e >= 1");
  const int n = d_ + e_;
  if (basis_.rows() != n || basis_.cols() != n)
    throw NumericError("scheme basis must be (d+e)x(d+e)");
  const double det = basis_.determinant();
  if (!std::isfinite(det) || std::abs(det) <= kDetFloor)
    throw NumericError("scheme basis is singular (|det| <= 1e-12)");
  covolume_ = std::abs(det);
  dual_basis_ = basis_.inverse().transpose();

  // Rank of the physical and internal row blocks: surrogate for the
  // projections being usable.
  auto block_rank_ok = [&](int row0, int rows) {
    Eigen::MatrixXd blk = basis_.block(row0, 0, rows, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(blk);
    return svd.singularValues().minCoeff() > kRankTol;
  };
  if (!block_rank_ok(0, d_))
    throw NumericError("physical block of basis has rank < d");
  if (!block_rank_ok(d_, e_))
    throw NumericError("internal block of basis has rank < e");
}

Eigen::VectorXd CutProjectScheme::embed(const ModuleVector& m) const {
  if (static_cast<int>(m.coords.size()) != d_ + e_)
    throw NumericError("module vector has wrong dimension for scheme '" +
                       label_ + "'");
  const Eigen::MatrixXd& B =
      (m.side == ModuleSide::kPhysical) ? basis_ : dual_basis_;
  return B * to_real(m.coords);
}

Eigen::VectorXd CutProjectScheme::phys_coords(const ModuleVector& m) const {
  return embed(m).head(d_);
}

Eigen::VectorXd CutProjectScheme::star_coords(const ModuleVector& m) const {
  return embed(m).tail(e_);
}

CutProjectScheme CutProjectScheme::dual() const {
  return CutProjectScheme(d_, e_, dual_basis_, label_ + "^*",
                          "dual of " + label_);
}

CutProjectScheme CutProjectScheme::preset(const std::string& name) {
  if (name == "z-fixture") {
    Eigen::Matrix2d b = Eigen::Matrix2d::Identity();
    return CutProjectScheme(1, 1, b, "z-fixture",
                            "integer lattice reference fixture");
  }
  if (name == "fibonacci") {
    const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
    Eigen::Matrix2d b;
    b << 1.0, tau,
         1.0, 1.0 - tau;
    return CutProjectScheme(1, 1, b, "fibonacci",
                            "golden-mean chain; generators (1,1), (tau,1-tau)");
  }
  if (name == "silver-mean") {
    const double s2 = std::sqrt(2.0);
    Eigen::Matrix2d b;
    b << 1.0, s2,
         1.0, -s2;
    return CutProjectScheme(1, 1, b, "silver-mean",
                            "Z[sqrt(2)] chain; star maps sqrt(2) -> -sqrt(2)");
  }
  if (name == "ammann-beenker") {
    // Columns are the 8th roots of unity e^{i pi j/4}, j=0..3, paired with
    // their Galois conjugates e^{3 i pi j/4}.
    Eigen::Matrix4d b;
    const double pi = 3.14159265358979323846;
    for (int j = 0; j < 4; ++j) {
      b(0, j) = std::cos(pi * j / 4.0);
      b(1, j) = std::sin(pi * j / 4.0);
      b(2, j) = std::cos(3.0 * pi * j / 4.0);
      b(3, j) = std::sin(3.0 * pi * j / 4.0);
    }
    return CutProjectScheme(2, 2, b, "ammann-beenker",
                            "eightfold planar scheme on Z^4");
  }
  throw ConfigError("unknown scheme preset '" + name + "'");
}

nlohmann::json CutProjectScheme::to_json() const {
  nlohmann::json j;
  j["label"] = label_;
  j["d"] = d_;
  j["e"] = e_;
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(basis_.size()));
  for (Eigen::Index r = 0; r < basis_.rows(); ++r)
    for (Eigen::Index c = 0; c < basis_.cols(); ++c)
      rows.push_back(basis_(r, c));
  j["basis"] = rows;  // row-major
  j["note"] = note_;
  return j;
}

CutProjectScheme CutProjectScheme::from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int e = j.at("e").get<int>();
    const auto rows = j.at("basis").get<std::vector<double>>();
    const int n = d + e;
    if (static_cast<int>(rows.size()) != n * n)
      throw ConfigError("scheme basis must have (d+e)^2 entries");
    Eigen::MatrixXd b(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) b(r, c) = rows[static_cast<std::size_t>(r * n + c)];
    return CutProjectScheme(d, e, b, j.at("label").get<std::string>(),
                            j.value("note", std::string{}));
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad scheme JSON: ") + ex.what());
  }
}

}  // namespace qcdiff
