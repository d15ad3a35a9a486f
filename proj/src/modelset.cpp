#include "qcdiff/modelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "qcdiff/io.hpp"
#include "qcdiff/lattice_enum.hpp"
#include "qcdiff/rng.hpp"

namespace qcdiff {

PointPatch::PointPatch(CutProjectScheme scheme, Window window, HullPoint hull,
                       double R, std::int64_t seed,
                       std::vector<PatchPoint> points)
    : scheme_(std::move(scheme)), window_(std::move(window)),
      hull_(std::move(hull)), R_(R), seed_(seed), points_(std::move(points)) {
  if (!(R_ > 0.0)) throw NumericError("patch cube side must be positive");
  if (window_.dim() != scheme_.internal_dim())
    throw NumericError("window dimension does not match internal dimension");
}

double PointPatch::cube_volume() const {
  return std::pow(R_, scheme_.physical_dim());
}

std::uint64_t PointPatch::identity_hash() const {
  std::string blob = scheme_.label();
  auto push_double = [&blob](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g|", x);
    blob += buf;
  };
  push_double(R_);
  for (Eigen::Index i = 0; i < hull_.u.size(); ++i) push_double(hull_.u[i]);
  for (Eigen::Index i = 0; i < hull_.v.size(); ++i) push_double(hull_.v[i]);
  blob += std::to_string(seed_) + "#" + std::to_string(points_.size());
  return fnv1a64(blob);
}

namespace {

bool phys_in_cube(const Eigen::VectorXd& x, double R) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x[i] > -R / 2.0 && x[i] < R / 2.0)) return false;
  return true;
}

struct LexPointLess {
  bool operator()(const PatchPoint& a, const PatchPoint& b) const {
    for (Eigen::Index i = 0; i < a.x.size(); ++i) {
      if (a.x[i] < b.x[i]) return true;
      if (a.x[i] > b.x[i]) return false;
    }
    return lex_less(a.coords, b.coords);
  }
};

}  // namespace

PointPatch generate_patch(const CutProjectScheme& scheme, const Window& window,
                          const HullPoint& hull, double R,
                          const PatchOptions& opts) {
  const int d = scheme.physical_dim();
  const int e = scheme.internal_dim();
  if (!(R > 0.0)) throw NumericError("generate_patch: R must be positive");
  if (window.dim() != e)
    throw NumericError("generate_patch: window/internal dimension mismatch");
  if (hull.u.size() != d || hull.v.size() != e)
    throw NumericError("generate_patch: hull point has wrong dimensions");

  Eigen::VectorXd lo(d + e), hi(d + e);
  for (int i = 0; i < d; ++i) {
    lo[i] = -R / 2.0 - hull.u[i];
    hi[i] = R / 2.0 - hull.u[i];
  }
  const Eigen::VectorXd wlo = window.bbox_lo(), whi = window.bbox_hi();
  for (int j = 0; j < e; ++j) {
    lo[d + j] = wlo[j] - hull.v[j] - opts.singular_tol;
    hi[d + j] = whi[j] - hull.v[j] + opts.singular_tol;
  }

  LatticeBoxEnumerator enumerator(scheme.basis(), lo, hi);
  if (enumerator.count_estimate() > opts.point_cap)
    throw NumericError("generate_patch: estimated point count " +
                       std::to_string(enumerator.count_estimate()) +
                       " exceeds cap");

  std::vector<PatchPoint> pts;
  double margin = std::numeric_limits<double>::infinity();
  Eigen::VectorXd real_coords(d + e);
  enumerator.for_each([&](const IntVec& z) {
    for (int i = 0; i < d + e; ++i)
      real_coords[i] = static_cast<double>(z[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd emb = scheme.basis() * real_coords;
    const Eigen::VectorXd x = emb.head(d) + hull.u;
    if (!phys_in_cube(x, R)) return;
    const Eigen::VectorXd t = emb.tail(e) + hull.v;
    const double bd = window.boundary_distance(t);
    if (bd < opts.singular_tol) {
      std::ostringstream msg;
      msg << "generate_patch: singular hull point, star coordinate within "
          << opts.singular_tol << " of the window boundary (distance " << bd
          << ")";
      throw NumericError(msg.str());
    }
    margin = std::min(margin, bd);
    if (window.contains(t)) pts.push_back({z, x});
  });

  std::sort(pts.begin(), pts.end(), LexPointLess{});
  HullPoint h = hull;
  h.singular_margin = margin;
  return PointPatch(scheme, window, h, R, /*seed=*/-1, std::move(pts));
}

HullPoint sample_hull(const CutProjectScheme& scheme, const Window& window,
                      std::uint64_t seed, const HullSampleOptions& opts) {
  const int d = scheme.physical_dim();
  const int e = scheme.internal_dim();
  if (window.dim() != e)
    throw NumericError("sample_hull: window/internal dimension mismatch");
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    Eigen::VectorXd t(d + e);
    for (int i = 0; i < d + e; ++i) t[i] = rng.next_double();
    const Eigen::VectorXd w = scheme.basis() * t;
    HullPoint h;
    h.u = w.head(d);
    h.v = w.tail(e);
    try {
      PointPatch probe = generate_patch(scheme, window, h, opts.probe_R, opts.patch);
      h.singular_margin = probe.hull().singular_margin;
      return h;
    } catch (const NumericError&) {
      continue;  // singular draw; take the next one from the stream
    }
  }
  throw NumericError("sample_hull: retries exhausted (window too thin?)");
}

double density(const PointPatch& patch) {
  if (patch.size() == 0) throw NumericError("density: empty patch");
  return static_cast<double>(patch.size()) / patch.cube_volume();
}

double min_gap(const PointPatch& patch) {
  const auto& pts = patch.points();
  if (pts.size() < 2) throw NumericError("min_gap: need >= 2 points");
  const int d = patch.scheme().physical_dim();
  double best = std::numeric_limits<double>::infinity();
  if (d == 1) {
    for (std::size_t i = 1; i < pts.size(); ++i)
      best = std::min(best, pts[i].x[0] - pts[i - 1].x[0]);
    return best;
  }
  // points are sorted by first coordinate; sweep with that as a cutoff
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = pts[j].x[0] - pts[i].x[0];
      if (dx * dx >= best * best && dx > 0.0) break;
      best = std::min(best, (pts[j].x - pts[i].x).norm());
    }
  }
  return best;
}

void write_patch(const PointPatch& patch, std::ostream& os,
                 const std::string& config_hash) {
  os << "# version=" << kVersion << "\n";
  if (!config_hash.empty()) os << "# config=" << config_hash << "\n";
  os << "# scheme=" << patch.scheme().to_json().dump() << "\n";
  os << "# R=" << fmt17(patch.cube_side()) << "\n";
  os << "# window=" << patch.window().to_json().dump() << "\n";
  os << "# hull=(" << fmt17_list(patch.hull().u) << ","
     << fmt17_list(patch.hull().v) << ")\n";
  os << "# seed=" << patch.seed() << "\n";
  for (const auto& p : patch.points()) {
    bool first = true;
    for (auto c : p.coords) {
      if (!first) os << ' ';
      os << c;
      first = false;
    }
    os << '\t';
    for (Eigen::Index i = 0; i < p.x.size(); ++i) {
      if (i) os << ' ';
      os << fmt17(p.x[i]);
    }
    os << '\n';
  }
}

std::string patch_to_string(const PointPatch& patch,
                            const std::string& config_hash) {
  std::ostringstream os;
  write_patch(patch, os, config_hash);
  return os.str();
}

PointPatch read_patch(std::istream& is) {
  std::string line;
  std::string scheme_json, window_json, hull_line;
  double R = -1.0;
  std::int64_t seed = -1;
  std::vector<PatchPoint> pts;
  std::optional<CutProjectScheme> scheme;
  std::optional<Window> window;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "scheme")
        scheme = CutProjectScheme::from_json(nlohmann::json::parse(val));
      else if (key == "R")
        R = std::stod(val);
      else if (key == "window")
        window = Window::from_json(nlohmann::json::parse(val));
      else if (key == "hull")
        hull_line = val;
      else if (key == "seed")
        seed = std::stoll(val);
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ConfigError("patch file: point line without tab separator");
    PatchPoint p;
    {
      std::istringstream ci(line.substr(0, tab));
      std::int64_t c;
      while (ci >> c) p.coords.push_back(c);
    }
    {
      std::istringstream xi(line.substr(tab + 1));
      std::vector<double> xs;
      double x;
      while (xi >> x) xs.push_back(x);
      p.x = Eigen::Map<Eigen::VectorXd>(xs.data(),
                                        static_cast<Eigen::Index>(xs.size()));
    }
    pts.push_back(std::move(p));
  }
  if (!scheme || !window || R <= 0.0)
    throw ConfigError("patch file: missing scheme/window/R headers");
  HullPoint hull;
  {
    // "( [u...] , [v...] )" written as two comma-separated bracket lists
    const auto mid = hull_line.find("],[");
    if (hull_line.size() < 5 || mid == std::string::npos)
      throw ConfigError("patch file: bad hull header");
    auto parse_list = [](const std::string& s) {
      std::vector<double> out;
      std::string cur;
      for (char ch : s) {
        if (ch == '[' || ch == ']' || ch == '(' || ch == ')') continue;
        if (ch == ',') {
          if (!cur.empty()) out.push_back(std::stod(cur));
          cur.clear();
        } else {
          cur += ch;
        }
      }
      if (!cur.empty()) out.push_back(std::stod(cur));
      return out;
    };
    const auto us = parse_list(hull_line.substr(0, mid + 1));
    const auto vs = parse_list(hull_line.substr(mid + 2));
    hull.u = Eigen::Map<const Eigen::VectorXd>(us.data(),
                                               static_cast<Eigen::Index>(us.size()));
    hull.v = Eigen::Map<const Eigen::VectorXd>(vs.data(),
                                               static_cast<Eigen::Index>(vs.size()));
  }
  return PointPatch(*scheme, *window, hull, R, seed, std::move(pts));
}

}  // namespace qcdiff
