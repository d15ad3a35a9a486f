#ifndef QCDIFF_COMMON_HPP
#define QCDIFF_COMMON_HPP

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qcdiff {

inline constexpr const char* kVersion = "qcdiff 0.1.0";

using Complex = std::complex<double>;

/// Configuration / usage errors (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violations of numeric contracts: dimension mismatch, singular hull,
/// margin too small, resource caps (CLI exit code 2).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Honest search failure of an injected oracle (CLI exit code 3).
class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what, std::string target = {})
      : std::runtime_error(what), target_(std::move(target)) {}
  const std::string& target() const { return target_; }

 private:
  std::string target_;
};

// ---------------------------------------------------------------------------
// Exact integer coordinate vectors (module points live here; equality and
// zero-sum tests must never touch floating point).

using IntVec = std::vector<std::int64_t>;

inline IntVec operator+(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) throw NumericError("IntVec size mismatch in +");
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline IntVec operator-(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) throw NumericError("IntVec size mismatch in -");
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline IntVec operator-(const IntVec& a) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline bool is_zero(const IntVec& a) {
  for (auto c : a)
    if (c != 0) return false;
  return true;
}

/// Lexicographic order on integer coordinates; the tie-break rule everywhere.
inline bool lex_less(const IntVec& a, const IntVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct IntVecHash {
  std::size_t operator()(const IntVec& v) const {
    // FNV-1a over the raw coordinate words.
    std::uint64_t h = 1469598103934665603ull;
    for (auto c : v) {
      auto u = static_cast<std::uint64_t>(c);
      for (int i = 0; i < 8; ++i) {
        h ^= (u >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

// ---------------------------------------------------------------------------
// FNV-1a 64-bit over bytes; used for config and patch identity hashes.

inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                             std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

// ---------------------------------------------------------------------------
// Deterministic reductions.  All estimator accumulations go through
// pairwise_sum so that results are independent of how the fill loop was
// chunked across threads.

template <typename T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.empty()) return T{};
  if (xs.size() <= 8) {
    T acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc += xs[i];
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& xs) {
  return pairwise_sum(std::span<const T>(xs));
}

// ---------------------------------------------------------------------------
// Thread budget.  --threads affects wall time only: parallel loops fill
// per-index slots and the reduction order is fixed.

inline std::atomic<int>& max_threads_slot() {
  static std::atomic<int> n{1};
  return n;
}

inline void set_max_threads(int n) { max_threads_slot().store(n < 1 ? 1 : n); }
inline int max_threads() { return max_threads_slot().load(); }

inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}

/// Runs fn(i) for i in [0, n); fn must only write state owned by index i.
/// Nested calls degrade to sequential loops.
template <typename F>
void parallel_for(std::size_t n, F&& fn) {
  const int nt = std::min<std::size_t>(max_threads(), n ? n : 1);
  if (nt <= 1 || n < 2 || in_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::atomic<std::size_t> next{0};
  constexpr std::size_t chunk = 64;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      in_parallel_region() = true;
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        const std::size_t end = std::min(begin + chunk, n);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace qcdiff

#endif  // QCDIFF_COMMON_HPP
