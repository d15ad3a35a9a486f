#ifndef QCDIFF_CYCLES_HPP
#define QCDIFF_CYCLES_HPP

#include <functional>
#include <optional>
#include <vector>

#include "qcdiff/common.hpp"
#include "qcdiff/spectrum.hpp"

namespace qcdiff {

/// A tuple of Fourier-module points with zero exact integer sum.  Entries are
/// an ordered list; the canonical representative of the equivalence class
/// (permutations, insertion/removal of {k,-k} pairs and zeros) is the sorted
/// multiset with zeros dropped and all opposite pairs cancelled.
class Cycle {
 public:
  Cycle() = default;
  explicit Cycle(std::vector<IntVec> entries);
  static Cycle empty_cycle() { return Cycle(); }

  const std::vector<IntVec>& entries() const { return entries_; }
  std::size_t length() const { return entries_.size(); }
  int dim() const;  // -1 when empty
  IntVec entry_sum() const;
  bool is_zero_sum() const;

  bool operator==(const Cycle& o) const { return entries_ == o.entries_; }

  /// Stable string key of the entry list (used for hashing canonical forms).
  std::string key() const;

 private:
  std::vector<IntVec> entries_;
};

/// Canonical form: zeros removed, {k,-k} pairs cancelled, entries sorted
/// lexicographically.  Idempotent; throws NumericError if the entry sum is
/// not exactly zero.
Cycle reduce(const Cycle& c);

/// Entry-list concatenation (the group operation before reduction).
Cycle concat(const Cycle& a, const Cycle& b);

/// Entrywise negation (the group inverse).
Cycle inverse(const Cycle& c);

/// Size of the canonical multiset.
std::size_t reduced_length(const Cycle& c);

bool equivalent(const Cycle& a, const Cycle& b);

/// Returns n Fourier-module vectors that are bragg records of `table` and
/// sum exactly to `target`, or nullopt.  Meet-in-the-middle over sorted
/// combinations; deterministic.  Failure means the in-range search space is
/// exhausted, not that no decomposition exists.
std::optional<std::vector<IntVec>> sum_as_bragg(const SpectrumTable& table,
                                                const IntVec& target, int n,
                                                std::size_t combo_cap = 20000000);

/// target -> n summands, or nullopt.  Kept as an injected dependency so the
/// algebra has no spectral coupling.
using BraggSumOracle =
    std::function<std::optional<std::vector<IntVec>>(const IntVec& target)>;

/// sum_as_bragg with the per-table search state built once and shared across
/// calls; what reconstruct feeds to decompose.
BraggSumOracle make_bragg_sum_oracle(const SpectrumTable& table, int n,
                                     std::size_t combo_cap = 20000000);

/// Constructive factorization: splits a canonical cycle of reduced length
/// > 2n+1 into factors of reduced length <= 2n+1 whose concatenation reduces
/// back to the input.  Each step takes the first n+1 canonical entries j,
/// asks the oracle for l with sum(l) = sum(j), emits j(-l), and recurses on
/// l(rest).  Throws OracleError (carrying the offending target) on failure.
std::vector<Cycle> decompose(const Cycle& c, int n, const BraggSumOracle& oracle);

}  // namespace qcdiff

#endif  // QCDIFF_CYCLES_HPP
