#ifndef QCDIFF_CYCLEFUNC_HPP
#define QCDIFF_CYCLEFUNC_HPP

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcdiff/correlations.hpp"
#include "qcdiff/cycles.hpp"
#include "qcdiff/spectrum.hpp"

namespace qcdiff {

/// An estimated value of the cycle function a on one cycle.
struct CycleFunctionEstimate {
  Cycle cycle;         // entries in the order they were combined
  Complex value;       // normalized to the unit circle
  double raw_modulus;  // |product| before normalization; should approach 1
  double patch_R;
  double phase_error;  // heuristic error estimate, never hidden
};

/// Bombieri-Taylor amplitudes f_k from exactly one patch, memoized per
/// Fourier-module point.  Phases are hull-dependent, so consumers must not
/// mix amplitudes across patches; the patch hash is recorded for that check.
class AmplitudeMap {
 public:
  AmplitudeMap(const PointPatch& patch, const SpectrumTable& table);

  /// f_k estimate for a bragg record (throws NumericError for extinctions /
  /// below-threshold records: there the division by gammahat^{1/2} that the
  /// cycle function needs is undefined).
  Complex amplitude(const IntVec& coords);
  double sqrt_intensity(const IntVec& coords) const;
  const PeakRecord& record(const IntVec& coords) const;

  /// Bulk-estimates amplitudes in parallel (amplitude() itself is not
  /// thread-safe).
  void prefetch(std::span<const IntVec> coords);
  void prefetch_bragg(std::size_t top_count = 0);  // 0 = all bragg records

  const SpectrumTable& table() const { return *table_; }
  const PointPatch& patch() const { return *patch_; }
  std::uint64_t patch_hash() const { return patch_hash_; }

 private:
  const PointPatch* patch_;
  const SpectrumTable* table_;
  std::uint64_t patch_hash_;
  std::unordered_map<IntVec, Complex, IntVecHash> amps_;
};

/// a(cycle) = normalize( prod_i f_{k_i} / gammahat(k_i)^{1/2} ).  Factors are
/// combined in a negation-stable order and {k,-k} entry pairs are folded into
/// exactly-real |f_k|^2/gammahat(k) factors first, so permutations leave the
/// value bit-identical, a(0)=1 and a(k,-k)=1 hold exactly, and
/// a(-c) = conj(a(c)) exactly on canonical cycles.
CycleFunctionEstimate estimate_a(AmplitudeMap& amps, const Cycle& cycle);
CycleFunctionEstimate estimate_a(const PointPatch& patch, const Cycle& cycle,
                                 const SpectrumTable& table);

struct PropertyCheckRow {
  std::string what;
  double residual;
};

struct PropertyCheckReport {
  std::vector<PropertyCheckRow> rows;
  double max_homomorphism = 0.0;
  double max_permutation = 0.0;
  double max_insertion = 0.0;
  double max_conjugation = 0.0;
};

/// Samples homomorphism / permutation / pair-insertion / conjugation
/// residuals of the estimated a over the given cycles.
PropertyCheckReport check_properties(AmplitudeMap& amps,
                                     std::span<const Cycle> cycles,
                                     std::uint64_t seed = 7);

struct AValue {
  Complex value;
  double phase_error = 0.0;
};

/// Where moment reconstruction gets its a-values: a plain map, or the
/// estimator with homomorphism extension.
class CycleFunctionSource {
 public:
  virtual ~CycleFunctionSource() = default;
  /// `canonical` must be a reduced cycle; the empty cycle always maps to 1.
  virtual std::optional<AValue> value(const Cycle& canonical) const = 0;
};

class MapCycleFunctionSource final : public CycleFunctionSource {
 public:
  void set(const Cycle& cycle, Complex value, double phase_error = 0.0);
  std::optional<AValue> value(const Cycle& canonical) const override;

 private:
  std::unordered_map<std::string, AValue> values_;
};

/// Direct products for reduced length <= 2n+1; longer cycles go through
/// decompose() with the injected oracle and the homomorphism property.
/// Throws OracleError when a decomposition target cannot be written as a
/// bragg sum.
class EstimatorCycleFunctionSource final : public CycleFunctionSource {
 public:
  EstimatorCycleFunctionSource(AmplitudeMap& amps, int n, BraggSumOracle oracle);
  std::optional<AValue> value(const Cycle& canonical) const override;
  int max_direct_length() const { return 2 * n_ + 1; }

 private:
  AmplitudeMap* amps_;
  int n_;
  BraggSumOracle oracle_;
  mutable std::unordered_map<std::string, AValue> memo_;
};

struct MomentOptions {
  std::size_t max_peaks = 200;  // retained bragg records (importance-ranked)
  int max_n = 5;
  double tail_budget = std::numeric_limits<double>::infinity();
  std::size_t tuple_cap = 50000000;  // enumeration guard
};

struct SpectralMomentResult {
  Complex value;
  double tail_bound;       // truncation bound (dropped + extended region)
  double a_error_bound;    // propagated |a| phase errors, weighted
  std::size_t tuple_count; // ordered zero-sum tuples accumulated
  std::size_t peaks_used;
};

/// mu_n(h_1..h_n) as the spectral sum over zero-sum bragg tuples of
/// prod_i hhat_i(k_i) * a(k_1..k_n) * prod_i gammahat(k_i)^{1/2}.
/// Zero-sum tests are exact integer arithmetic; tuples are accumulated in a
/// negation-paired order so replacing every h_i by its complex conjugate
/// conjugates the result bit-exactly.
SpectralMomentResult moment_from_cyclefunction(
    const SpectrumTable& table, const CycleFunctionSource& a_values,
    std::span<const GaussianTestFunction> h_list, const MomentOptions& opts = {});

struct BumpMomentOptions {
  double leak_tol = 0.05;
  double spacing_factor = 0.25;  // grid spacing = factor * bump sigma_x
  double margin_sigmas = 6.0;
};

/// Extracts a(cycle) from moments alone: realizes narrow spectral bumps at
/// the cycle entries as modulated Gaussians, takes their Birkhoff moment and
/// divides by prod gammahat^{1/2}.  Declares an error when spectral leakage
/// onto neighbouring peaks exceeds leak_tol.
CycleFunctionEstimate cyclefunction_from_moments(const PointPatch& patch,
                                                 const SpectrumTable& table,
                                                 const Cycle& cycle,
                                                 double sigma_k,
                                                 const BumpMomentOptions& opts = {});

struct MomentComparisonRow {
  int n = 0;
  Complex spectral;
  double tail_bound = 0.0;
  double a_error_bound = 0.0;
  Complex birkhoff;
  double birkhoff_se = 0.0;
  double rel_residual = 0.0;
};

struct ExtensionConsistencyRow {
  std::string cycle_key;
  Complex direct;
  Complex extended;
  double residual = 0.0;
};

struct ReconstructReport {
  std::vector<MomentComparisonRow> moments;
  std::vector<ExtensionConsistencyRow> extensions;
  std::size_t direct_cycles_estimated = 0;
  std::size_t bragg_peaks = 0;
  std::size_t extinctions = 0;
  int n = 0;
};

struct ReconstructOptions {
  MomentOptions moment;
  TranslateGrid grid;           // spacing <= 0 derives defaults from probes
  std::size_t extension_samples = 6;
  std::size_t extension_alphabet = 12;  // strongest peaks used for samples
  std::uint64_t seed = 1;
};

/// End-to-end reconstruction check: estimate a on short cycles, extend by
/// decomposition, rebuild the requested moments spectrally, and compare each
/// against its direct Birkhoff estimate.
ReconstructReport reconstruct_pipeline(
    const SpectrumTable& table, const PointPatch& patch, int n,
    std::span<const std::vector<GaussianTestFunction>> test_moments,
    const ReconstructOptions& opts = {});

}  // namespace qcdiff

#endif  // QCDIFF_CYCLEFUNC_HPP
