#include "qcdiff/window.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "qcdiff/numeric.hpp"

namespace qcdiff {

namespace {
constexpr double kMinInterior = 1e-9;
}

Window Window::interval(double lo, double hi) {
  if (!(hi - lo >= kMinInterior))
    throw NumericError("window interval has empty interior (hi - lo < 1e-9)");
  Window w;
  w.dim_ = 1;
  w.lo_ = lo;
  w.hi_ = hi;
  w.volume_ = hi - lo;
  w.perimeter_ = 2.0;  // two endpoints; unused for the interval envelope
  return w;
}

Window Window::polygon(std::vector<Eigen::Vector2d> vertices) {
  if (vertices.size() < 3) throw NumericError("polygon needs >= 3 vertices");
  const std::size_t n = vertices.size();
  double area2 = 0.0, perim = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    area2 += a.x() * b.y() - b.x() * a.y();
    perim += (b - a).norm();
  }
  if (!(area2 / 2.0 >= kMinInterior))
    throw NumericError("polygon is not counterclockwise or has area < 1e-9");
  // convexity: every corner turns left (or is straight)
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % n];
    const auto& c = vertices[(i + 2) % n];
    const Eigen::Vector2d u = b - a, v = c - b;
    if (u.x() * v.y() - u.y() * v.x() < -1e-12 * (u.norm() * v.norm()))
      throw NumericError("polygon window must be convex");
  }
  Window w;
  w.dim_ = 2;
  w.verts_ = std::move(vertices);
  w.volume_ = area2 / 2.0;
  w.perimeter_ = perim;
  return w;
}

Eigen::VectorXd Window::bbox_lo() const {
  Eigen::VectorXd v(dim_);
  if (dim_ == 1) {
    v[0] = lo_;
  } else {
    v[0] = v[1] = std::numeric_limits<double>::infinity();
    for (const auto& p : verts_) {
      v[0] = std::min(v[0], p.x());
      v[1] = std::min(v[1], p.y());
    }
  }
  return v;
}

Eigen::VectorXd Window::bbox_hi() const {
  Eigen::VectorXd v(dim_);
  if (dim_ == 1) {
    v[0] = hi_;
  } else {
    v[0] = v[1] = -std::numeric_limits<double>::infinity();
    for (const auto& p : verts_) {
      v[0] = std::max(v[0], p.x());
      v[1] = std::max(v[1], p.y());
    }
  }
  return v;
}

bool Window::contains(const Eigen::VectorXd& t) const {
  if (t.size() != dim_) throw NumericError("window/point dimension mismatch");
  if (dim_ == 1) return t[0] >= lo_ && t[0] <= hi_;
  const Eigen::Vector2d p(t[0], t[1]);
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d e = verts_[(i + 1) % n] - verts_[i];
    const Eigen::Vector2d d = p - verts_[i];
    if (e.x() * d.y() - e.y() * d.x() < 0.0) return false;
  }
  return true;
}

double Window::boundary_distance(const Eigen::VectorXd& t) const {
  if (t.size() != dim_) throw NumericError("window/point dimension mismatch");
  if (dim_ == 1) return std::min(std::fabs(t[0] - lo_), std::fabs(t[0] - hi_));
  const Eigen::Vector2d p(t[0], t[1]);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = verts_[i];
    const Eigen::Vector2d b = verts_[(i + 1) % n];
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, (p - (a + s * ab)).norm());
  }
  return best;
}

Complex Window::fourier(const Eigen::VectorXd& y) const {
  if (y.size() != dim_) throw NumericError("window/frequency dimension mismatch");
  if (dim_ == 1) {
    const double len = hi_ - lo_;
    // int_lo^hi e^{-2 pi i y v} dv = len e^{-i pi y (lo+hi)} sinc(pi y len)
    return len * unit_phase(-kPi * y[0] * (lo_ + hi_)) * sinc(kPi * y[0] * len);
  }
  const Eigen::Vector2d k(y[0], y[1]);
  const double k2 = k.squaredNorm();
  if (k2 < 1e-24) return Complex(volume_, 0.0);
  // div theorem with F = e^{-2 pi i k.v} k / (-2 pi i |k|^2):
  //   hat1_W(k) = sum_edges (k.n_e) |e| e^{-2 pi i k.a} E(-2 pi i k.(b-a))
  //               / (-2 pi i |k|^2),  E(z) = (e^z - 1)/z.
  Complex acc(0.0, 0.0);
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = verts_[i];
    const Eigen::Vector2d b = verts_[(i + 1) % n];
    const Eigen::Vector2d e = b - a;
    const double elen = e.norm();
    if (elen == 0.0) continue;
    const Eigen::Vector2d nrm(e.y() / elen, -e.x() / elen);  // outward for CCW
    const double kn = k.dot(nrm);
    if (kn == 0.0) continue;
    const Complex phase_a = unit_phase(-kTwoPi * k.dot(a));
    const Complex ez = expm1_over(Complex(0.0, -kTwoPi * k.dot(e)));
    acc += kn * elen * phase_a * ez;
  }
  return acc / Complex(0.0, -kTwoPi * k2);
}

double Window::fourier_envelope(double r) const {
  if (r <= 0.0) return volume_;
  if (dim_ == 1) return std::min(volume_, 1.0 / (kPi * r));
  return std::min(volume_, perimeter_ / (kTwoPi * r));
}

double Window::envelope_inverse(double threshold) const {
  if (threshold <= 0.0)
    throw NumericError("envelope_inverse needs a positive threshold");
  if (threshold >= volume_) return 0.0;
  if (dim_ == 1) return 1.0 / (kPi * threshold);
  return perimeter_ / (kTwoPi * threshold);
}

double Window::interval_lo() const {
  if (dim_ != 1) throw NumericError("not an interval window");
  return lo_;
}

double Window::interval_hi() const {
  if (dim_ != 1) throw NumericError("not an interval window");
  return hi_;
}

nlohmann::json Window::to_json() const {
  nlohmann::json j;
  if (dim_ == 1) {
    j["interval"] = {lo_, hi_};
  } else {
    auto arr = nlohmann::json::array();
    for (const auto& p : verts_) arr.push_back({p.x(), p.y()});
    j["polygon"] = arr;
  }
  return j;
}

Window Window::from_json(const nlohmann::json& j) {
  try {
    if (j.contains("interval")) {
      const auto iv = j.at("interval").get<std::vector<double>>();
      if (iv.size() != 2) throw ConfigError("interval window needs [lo, hi]");
      return Window::interval(iv[0], iv[1]);
    }
    if (j.contains("polygon")) {
      std::vector<Eigen::Vector2d> vs;
      for (const auto& p : j.at("polygon")) {
        const auto xy = p.get<std::vector<double>>();
        if (xy.size() != 2) throw ConfigError("polygon vertices need [x, y]");
        vs.emplace_back(xy[0], xy[1]);
      }
      return Window::polygon(std::move(vs));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad window JSON: ") + ex.what());
  }
  throw ConfigError("window JSON needs 'interval' or 'polygon'");
}

}  // namespace qcdiff
