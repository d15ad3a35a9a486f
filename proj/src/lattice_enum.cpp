#include "qcdiff/lattice_enum.hpp"

#include <cmath>

namespace qcdiff {

namespace {
constexpr double kCoefTol = 1e-12;

// widening applied to every derived bound so roundoff can only add candidates
double slack(double b) { return 1e-9 * (1.0 + std::fabs(b)); }
}  // namespace

LatticeBoxEnumerator::LatticeBoxEnumerator(const Eigen::MatrixXd& A,
                                           const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi)
    : n_(static_cast<int>(A.rows())) {
  if (A.rows() != A.cols() || lo.size() != n_ || hi.size() != n_)
    throw NumericError("lattice enumerator: dimension mismatch");
  double vol = 1.0;
  for (int i = 0; i < n_; ++i) {
    if (hi[i] < lo[i])
      throw NumericError("lattice enumerator: empty box (hi < lo)");
    vol *= hi[i] - lo[i];
  }
  const double det = std::fabs(A.determinant());
  if (det < 1e-12) throw NumericError("lattice enumerator: singular matrix");
  count_estimate_ = vol / det;

  systems_.assign(n_, {});
  auto& full = systems_[n_ - 1];
  for (int i = 0; i < n_; ++i) {
    full.push_back({A.row(i).transpose(), hi[i]});
    full.push_back({-A.row(i).transpose(), -lo[i]});
  }
  // eliminate z[k] from systems_[k] to obtain systems_[k-1]
  for (int k = n_ - 1; k >= 1; --k) {
    std::vector<Ineq> up, down, flat;
    for (const auto& q : systems_[k]) {
      const double c = q.c[k];
      if (c > kCoefTol)
        up.push_back(q);
      else if (c < -kCoefTol)
        down.push_back(q);
      else
        flat.push_back(q);
    }
    auto& out = systems_[k - 1];
    for (auto& q : flat) {
      Ineq r{q.c.head(k), q.b};
      out.push_back(std::move(r));
    }
    for (const auto& u : up) {
      for (const auto& d : down) {
        // u: c_u.z' + a z_k <= b_u (a>0); d: c_d.z' - a' z_k <= b_d (a'>0)
        const double a = u.c[k];
        const double ap = -d.c[k];
        Eigen::VectorXd c = u.c.head(k) / a + d.c.head(k) / ap;
        const double b = u.b / a + d.b / ap;
        out.push_back({std::move(c), b + slack(b)});
      }
    }
  }
}

void LatticeBoxEnumerator::for_each(
    const std::function<void(const IntVec&)>& visit) const {
  IntVec z(static_cast<std::size_t>(n_), 0);
  // iterative recursion over levels 0..n-1
  std::function<void(int)> descend = [&](int k) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& q : systems_[static_cast<std::size_t>(k)]) {
      double rest = q.b;
      for (int j = 0; j < k; ++j)
        rest -= q.c[j] * static_cast<double>(z[static_cast<std::size_t>(j)]);
      const double c = q.c[k];
      if (c > kCoefTol)
        hi = std::min(hi, rest / c);
      else if (c < -kCoefTol)
        lo = std::max(lo, rest / c);
      else if (rest < -slack(q.b))
        return;  // prefix infeasible
    }
    if (!(lo <= hi + 1e-9)) return;
    const auto zlo = static_cast<std::int64_t>(std::ceil(lo - 1e-9));
    const auto zhi = static_cast<std::int64_t>(std::floor(hi + 1e-9));
    for (std::int64_t v = zlo; v <= zhi; ++v) {
      z[static_cast<std::size_t>(k)] = v;
      if (k + 1 == n_)
        visit(z);
      else
        descend(k + 1);
    }
  };
  descend(0);
}

}  // namespace qcdiff
