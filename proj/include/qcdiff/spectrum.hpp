#ifndef QCDIFF_SPECTRUM_HPP
#define QCDIFF_SPECTRUM_HPP

#include <optional>
#include <unordered_map>
#include <vector>

#include "qcdiff/modelset.hpp"

namespace qcdiff {

enum class PeakClass { kBragg, kExtinction, kBelowThreshold };

const char* to_string(PeakClass c);

/// One Fourier-module point: exact integer coordinates, projections, the
/// closed-form intensity, classification, and (optionally) the measured
/// volume-averaged exponential sum from one patch.
struct PeakRecord {
  IntVec coords;
  Eigen::VectorXd k_phys;
  Eigen::VectorXd k_star;
  double intensity_theory = 0.0;
  PeakClass cls = PeakClass::kBelowThreshold;
  Complex amplitude{0.0, 0.0};
  bool has_amplitude = false;
};

/// The enumerated slice of the Fourier module, keyed by exact integer
/// coordinates, closed under negation by construction.
class SpectrumTable {
 public:
  SpectrumTable(CutProjectScheme scheme, Window window, double k_max,
                double eps_bragg, double eps_ext, double star_cut,
                std::vector<PeakRecord> records);

  const CutProjectScheme& scheme() const { return scheme_; }
  const Window& window() const { return window_; }
  double k_max() const { return k_max_; }
  double eps_bragg() const { return eps_bragg_; }
  double eps_ext() const { return eps_ext_; }
  double star_cut() const { return star_cut_; }

  const std::vector<PeakRecord>& records() const { return records_; }
  std::vector<PeakRecord>& records() { return records_; }
  const PeakRecord* find(const IntVec& coords) const;
  PeakRecord* find(const IntVec& coords);

  /// Bragg records sorted by descending theoretical intensity (ties broken
  /// lexicographically on coordinates).
  std::vector<const PeakRecord*> bragg_by_intensity() const;
  std::size_t bragg_count() const;
  std::size_t extinction_count() const;

 private:
  CutProjectScheme scheme_;
  Window window_;
  double k_max_, eps_bragg_, eps_ext_, star_cut_;
  std::vector<PeakRecord> records_;  // sorted lexicographically on coords
  std::unordered_map<IntVec, std::size_t, IntVecHash> index_;
};

/// Volume-averaged exponential sum (1/vol C_R) sum_x e^{2 pi i k.x} over the
/// patch; fixed tree-summation order, Hermitian in k by construction.
Complex bombieri_taylor(const PointPatch& patch, const Eigen::VectorXd& k_phys);

/// gammahat(k) = |hat1_W(-k_star)|^2 / covolume^2.  Dividing by covolume^2
/// expresses the unit-mass torus normalization in Lebesgue coordinates, so
/// the k = 0 intensity equals the squared point density.
double theoretical_intensity(const CutProjectScheme& scheme,
                             const Window& window, const ModuleVector& k);

struct SpectrumOptions {
  double record_cap = 2e6;
  /// Optional override for the |k_star| enumeration range; when unset the
  /// range is derived from the window-transform decay at eps_bragg, which is
  /// what makes the table complete at that threshold.
  std::optional<double> star_cut;
};

SpectrumTable enumerate_spectrum(const CutProjectScheme& scheme,
                                 const Window& window, double k_max,
                                 double eps_bragg, double eps_ext,
                                 const SpectrumOptions& opts = {});

/// Fills record.amplitude with bombieri_taylor estimates from one patch.
/// Only records passing `cls_filter` are measured (default: all).
void measure_amplitudes(SpectrumTable& table, const PointPatch& patch,
                        std::optional<PeakClass> cls_filter = {});

struct BraggConsistencyRow {
  IntVec coords;
  double intensity_theory;
  double amplitude_sq;
  double rel_error;
};

struct BraggConsistencyReport {
  std::vector<BraggConsistencyRow> rows;       // every record checked
  std::vector<BraggConsistencyRow> failures;   // rel_error > tol
  double tol = 0.0;
};

/// Compares | |f_k|^2 - gammahat(k) | / gammahat(k) for bragg records; checks
/// the strongest `max_peaks` records (0 = all).
BraggConsistencyReport verify_bragg_consistency(const PointPatch& patch,
                                                const SpectrumTable& table,
                                                double tol,
                                                std::size_t max_peaks = 0);

struct ExtinctionWitnessRow {
  IntVec extinction;
  bool resolved = false;
  IntVec s1, s2;  // bragg pair with s1 + s2 = extinction, when resolved
};

struct ExtinctionWitnessReport {
  std::vector<ExtinctionWitnessRow> rows;
  std::size_t unresolved = 0;
};

/// For every extinction record, searches for a bragg pair summing to it in
/// exact integer coordinates.  Unresolved rows may only reflect the finite
/// enumeration range.
ExtinctionWitnessReport verify_extinction_sum_decomposition(
    const SpectrumTable& table);

// diffract output (CSV columns: integer coords; k_phys; k_star; Re/Im f_k;
// |f_k|^2; theory intensity; class)
std::string spectrum_to_csv(const SpectrumTable& table,
                            const std::string& config_hash = {});
std::string spectrum_to_json(const SpectrumTable& table,
                             const std::string& config_hash = {});

}  // namespace qcdiff

#endif  // QCDIFF_SPECTRUM_HPP
