#include "qcdiff/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "qcdiff/io.hpp"
#include "qcdiff/lattice_enum.hpp"
#include "qcdiff/numeric.hpp"

namespace qcdiff {

const char* to_string(PeakClass c) {
  switch (c) {
    case PeakClass::kBragg: return "bragg";
    case PeakClass::kExtinction: return "extinction";
    case PeakClass::kBelowThreshold: return "below-threshold";
  }
  return "?";
}

SpectrumTable::SpectrumTable(CutProjectScheme scheme, Window window,
                             double k_max, double eps_bragg, double eps_ext,
                             double star_cut, std::vector<PeakRecord> records)
    : scheme_(std::move(scheme)), window_(std::move(window)), k_max_(k_max),
      eps_bragg_(eps_bragg), eps_ext_(eps_ext), star_cut_(star_cut),
      records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const PeakRecord& a, const PeakRecord& b) {
              return lex_less(a.coords, b.coords);
            });
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i)
    index_.emplace(records_[i].coords, i);

  const IntVec zero(static_cast<std::size_t>(scheme_.total_dim()), 0);
  const PeakRecord* origin = find(zero);
  if (origin == nullptr)
    throw NumericError("spectrum table must contain k = 0");
  if (origin->cls != PeakClass::kBragg)
    throw NumericError(
        "k = 0 must classify as bragg (eps_bragg exceeds gammahat(0)?)");
}

const PeakRecord* SpectrumTable::find(const IntVec& coords) const {
  const auto it = index_.find(coords);
  return it == index_.end() ? nullptr : &records_[it->second];
}

PeakRecord* SpectrumTable::find(const IntVec& coords) {
  const auto it = index_.find(coords);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<const PeakRecord*> SpectrumTable::bragg_by_intensity() const {
  std::vector<const PeakRecord*> out;
  for (const auto& r : records_)
    if (r.cls == PeakClass::kBragg) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const PeakRecord* a, const PeakRecord* b) {
    if (a->intensity_theory != b->intensity_theory)
      return a->intensity_theory > b->intensity_theory;
    return lex_less(a->coords, b->coords);
  });
  return out;
}

std::size_t SpectrumTable::bragg_count() const {
  std::size_t n = 0;
  for (const auto& r : records_)
    if (r.cls == PeakClass::kBragg) ++n;
  return n;
}

std::size_t SpectrumTable::extinction_count() const {
  std::size_t n = 0;
  for (const auto& r : records_)
    if (r.cls == PeakClass::kExtinction) ++n;
  return n;
}

Complex bombieri_taylor(const PointPatch& patch, const Eigen::VectorXd& k_phys) {
  if (k_phys.size() != patch.scheme().physical_dim())
    throw NumericError("bombieri_taylor: k dimension mismatch");
  const auto& pts = patch.points();
  std::vector<Complex> terms(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    terms[i] = unit_phase(kTwoPi * k_phys.dot(pts[i].x));
  });
  return pairwise_sum(terms) / patch.cube_volume();
}

double theoretical_intensity(const CutProjectScheme& scheme,
                             const Window& window, const ModuleVector& k) {
  if (k.side != ModuleSide::kFourier)
    throw NumericError("theoretical_intensity: k must be Fourier-side");
  Eigen::VectorXd y = -scheme.star_coords(k);
  // evaluate at a sign-canonical argument: |hat1_W| is even for real W, and
  // this keeps intensities of k and -k bit-identical
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0) break;
    if (y[i] < 0.0) {
      y = -y;
      break;
    }
  }
  const double mod = std::abs(window.fourier(y));
  const double cv = scheme.covolume();
  return (mod * mod) / (cv * cv);
}

SpectrumTable enumerate_spectrum(const CutProjectScheme& scheme,
                                 const Window& window, double k_max,
                                 double eps_bragg, double eps_ext,
                                 const SpectrumOptions& opts) {
  if (!(k_max > 0.0)) throw NumericError("enumerate_spectrum: k_max must be > 0");
  if (!(eps_ext > 0.0 && eps_ext <= eps_bragg))
    throw NumericError("enumerate_spectrum: need 0 < eps_ext <= eps_bragg");
  const int d = scheme.physical_dim();
  const int e = scheme.internal_dim();

  // |hat1_W(y)| < covol sqrt(eps) beyond the envelope inverse, so every peak
  // with intensity >= eps_bragg has |k_star| below this cut: the table is
  // complete at eps_bragg.
  const double star_cut = opts.star_cut.value_or(
      window.envelope_inverse(scheme.covolume() * std::sqrt(eps_bragg)));

  Eigen::VectorXd lo(d + e), hi(d + e);
  for (int i = 0; i < d; ++i) {
    lo[i] = -k_max;
    hi[i] = k_max;
  }
  for (int j = 0; j < e; ++j) {
    lo[d + j] = -star_cut;
    hi[d + j] = star_cut;
  }
  LatticeBoxEnumerator enumerator(scheme.dual_basis(), lo, hi);
  if (enumerator.count_estimate() > opts.record_cap)
    throw NumericError("enumerate_spectrum: estimated record count " +
                       std::to_string(enumerator.count_estimate()) +
                       " exceeds cap");

  std::vector<PeakRecord> records;
  Eigen::VectorXd real_coords(d + e);
  enumerator.for_each([&](const IntVec& z) {
    for (int i = 0; i < d + e; ++i)
      real_coords[i] = static_cast<double>(z[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd emb = scheme.dual_basis() * real_coords;
    const Eigen::VectorXd kp = emb.head(d);
    const Eigen::VectorXd ks = emb.tail(e);
    if (kp.norm() > k_max + 1e-12 || ks.norm() > star_cut + 1e-12) return;
    PeakRecord r;
    r.coords = z;
    r.k_phys = kp;
    r.k_star = ks;
    r.intensity_theory =
        theoretical_intensity(scheme, window, fourier_vector(z));
    if (r.intensity_theory >= eps_bragg)
      r.cls = PeakClass::kBragg;
    else if (r.intensity_theory < eps_ext)
      r.cls = PeakClass::kExtinction;
    else
      r.cls = PeakClass::kBelowThreshold;
    records.push_back(std::move(r));
  });

  return SpectrumTable(scheme, window, k_max, eps_bragg, eps_ext, star_cut,
                       std::move(records));
}

void measure_amplitudes(SpectrumTable& table, const PointPatch& patch,
                        std::optional<PeakClass> cls_filter) {
  auto& records = table.records();
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!cls_filter || records[i].cls == *cls_filter) todo.push_back(i);
  const auto& pts = patch.points();
  const double vol = patch.cube_volume();
  parallel_for(todo.size(), [&](std::size_t j) {
    PeakRecord& r = records[todo[j]];
    std::vector<Complex> terms(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      terms[i] = unit_phase(kTwoPi * r.k_phys.dot(pts[i].x));
    r.amplitude = pairwise_sum(terms) / vol;
    r.has_amplitude = true;
  });
}

BraggConsistencyReport verify_bragg_consistency(const PointPatch& patch,
                                                const SpectrumTable& table,
                                                double tol,
                                                std::size_t max_peaks) {
  BraggConsistencyReport report;
  report.tol = tol;
  auto bragg = table.bragg_by_intensity();
  if (max_peaks > 0 && bragg.size() > max_peaks) bragg.resize(max_peaks);
  report.rows.resize(bragg.size());
  parallel_for(bragg.size(), [&](std::size_t i) {
    const PeakRecord& r = *bragg[i];
    const Complex f = r.has_amplitude ? r.amplitude
                                      : bombieri_taylor(patch, r.k_phys);
    BraggConsistencyRow row;
    row.coords = r.coords;
    row.intensity_theory = r.intensity_theory;
    row.amplitude_sq = std::norm(f);
    row.rel_error =
        std::abs(row.amplitude_sq - r.intensity_theory) / r.intensity_theory;
    report.rows[i] = std::move(row);
  });
  for (const auto& row : report.rows)
    if (row.rel_error > tol) report.failures.push_back(row);
  return report;
}

ExtinctionWitnessReport verify_extinction_sum_decomposition(
    const SpectrumTable& table) {
  ExtinctionWitnessReport report;
  std::vector<const PeakRecord*> bragg;
  for (const auto& r : table.records())
    if (r.cls == PeakClass::kBragg) bragg.push_back(&r);
  for (const auto& r : table.records()) {
    if (r.cls != PeakClass::kExtinction) continue;
    ExtinctionWitnessRow row;
    row.extinction = r.coords;
    for (const auto* s1 : bragg) {
      const IntVec rest = r.coords - s1->coords;
      const PeakRecord* s2 = table.find(rest);
      if (s2 != nullptr && s2->cls == PeakClass::kBragg) {
        row.resolved = true;
        row.s1 = s1->coords;
        row.s2 = rest;
        break;
      }
    }
    if (!row.resolved) ++report.unresolved;
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string coords_str(const IntVec& v, char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::string spectrum_to_csv(const SpectrumTable& table,
                            const std::string& config_hash) {
  std::ostringstream os;
  os << "# version=" << kVersion << "\n";
  if (!config_hash.empty()) os << "# config=" << config_hash << "\n";
  os << "# scheme=" << table.scheme().label() << " k_max="
     << fmt17(table.k_max()) << " eps_bragg=" << fmt17(table.eps_bragg())
     << " eps_ext=" << fmt17(table.eps_ext()) << " star_cut="
     << fmt17(table.star_cut()) << "\n";
  os << "coords,k_phys,k_star,re_f,im_f,f_sq,intensity_theory,class\n";
  for (const auto& r : table.records()) {
    os << coords_str(r.coords) << ',';
    for (Eigen::Index i = 0; i < r.k_phys.size(); ++i)
      os << (i ? " " : "") << fmt17(r.k_phys[i]);
    os << ',';
    for (Eigen::Index i = 0; i < r.k_star.size(); ++i)
      os << (i ? " " : "") << fmt17(r.k_star[i]);
    os << ',' << fmt17(r.amplitude.real()) << ',' << fmt17(r.amplitude.imag())
       << ',' << fmt17(std::norm(r.amplitude)) << ','
       << fmt17(r.intensity_theory) << ',' << to_string(r.cls) << '\n';
  }
  return os.str();
}

std::string spectrum_to_json(const SpectrumTable& table,
                             const std::string& config_hash) {
  nlohmann::json j;
  j["version"] = kVersion;
  if (!config_hash.empty()) j["config"] = config_hash;
  j["scheme"] = table.scheme().to_json();
  j["window"] = table.window().to_json();
  j["k_max"] = table.k_max();
  j["eps_bragg"] = table.eps_bragg();
  j["eps_ext"] = table.eps_ext();
  j["star_cut"] = table.star_cut();
  auto arr = nlohmann::json::array();
  for (const auto& r : table.records()) {
    nlohmann::json rec;
    rec["coords"] = r.coords;
    rec["k_phys"] = std::vector<double>(r.k_phys.data(),
                                        r.k_phys.data() + r.k_phys.size());
    rec["k_star"] = std::vector<double>(r.k_star.data(),
                                        r.k_star.data() + r.k_star.size());
    rec["intensity_theory"] = r.intensity_theory;
    rec["class"] = to_string(r.cls);
    if (r.has_amplitude) rec["amplitude"] = {r.amplitude.real(), r.amplitude.imag()};
    arr.push_back(std::move(rec));
  }
  j["records"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace qcdiff
