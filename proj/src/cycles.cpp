#include "qcdiff/cycles.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

namespace qcdiff {

Cycle::Cycle(std::vector<IntVec> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_)
    if (e.size() != entries_.front().size())
      throw NumericError("cycle entries have mixed dimensions");
}

int Cycle::dim() const {
  return entries_.empty() ? -1 : static_cast<int>(entries_.front().size());
}

IntVec Cycle::entry_sum() const {
  if (entries_.empty()) return {};
  IntVec s(entries_.front().size(), 0);
  for (const auto& e : entries_) s = s + e;
  return s;
}

bool Cycle::is_zero_sum() const { return entries_.empty() || is_zero(entry_sum()); }

std::string Cycle::key() const {
  std::ostringstream os;
  for (const auto& e : entries_) {
    os << '(';
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i) os << ',';
      os << e[i];
    }
    os << ')';
  }
  return os.str();
}

Cycle reduce(const Cycle& c) {
  if (!c.is_zero_sum())
    throw NumericError("reduce: cycle entries do not sum to zero");
  // multiset with multiplicities, ordered for determinism
  std::map<IntVec, std::int64_t> mult;
  for (const auto& e : c.entries()) {
    if (is_zero(e)) continue;
    ++mult[e];
  }
  for (auto& [v, count] : mult) {
    if (count == 0) continue;
    const IntVec neg = -v;
    if (!lex_less(v, neg)) continue;  // handle each {v,-v} pair once
    auto it = mult.find(neg);
    if (it == mult.end()) continue;
    const std::int64_t cancel = std::min(count, it->second);
    count -= cancel;
    it->second -= cancel;
  }
  std::vector<IntVec> out;
  for (const auto& [v, count] : mult)
    for (std::int64_t i = 0; i < count; ++i) out.push_back(v);
  return Cycle(std::move(out));
}

Cycle concat(const Cycle& a, const Cycle& b) {
  std::vector<IntVec> es = a.entries();
  es.insert(es.end(), b.entries().begin(), b.entries().end());
  return Cycle(std::move(es));
}

Cycle inverse(const Cycle& c) {
  std::vector<IntVec> es;
  es.reserve(c.length());
  for (const auto& e : c.entries()) es.push_back(-e);
  return Cycle(std::move(es));
}

std::size_t reduced_length(const Cycle& c) { return reduce(c).length(); }

bool equivalent(const Cycle& a, const Cycle& b) {
  return reduce(a).entries() == reduce(b).entries();
}

namespace {

// nondecreasing index tuples over [0, n): the multiset combinations
bool next_combo(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t m = idx.size();
  for (std::size_t pos = m; pos-- > 0;) {
    if (idx[pos] + 1 < n) {
      const std::size_t v = idx[pos] + 1;
      for (std::size_t j = pos; j < m; ++j) idx[j] = v;
      return true;
    }
  }
  return false;
}

}  // namespace

namespace {

struct SumSearchState {
  std::vector<IntVec> bragg;  // lex order
  std::unordered_map<IntVec, std::vector<std::size_t>, IntVecHash> left;
  int left_n = 0;
  int right_n = 0;
  std::size_t combo_cap = 0;
  bool left_built = false;
  bool left_overflow = false;

  explicit SumSearchState(const SpectrumTable& table, int n, std::size_t cap)
      : left_n(n / 2), right_n(n - n / 2), combo_cap(cap) {
    for (const auto& r : table.records())
      if (r.cls == PeakClass::kBragg) bragg.push_back(r.coords);
  }

  void build_left() {
    if (left_built) return;
    left_built = true;
    if (bragg.empty()) return;
    std::size_t budget = combo_cap;
    std::vector<std::size_t> idx(static_cast<std::size_t>(left_n), 0);
    do {
      if (budget-- == 0) {
        left_overflow = true;
        return;
      }
      IntVec s(bragg.front().size(), 0);
      for (auto i : idx) s = s + bragg[i];
      left.emplace(std::move(s), idx);  // keeps the lex-least combination
    } while (next_combo(idx, bragg.size()));
  }

  std::optional<std::vector<IntVec>> find(const IntVec& target,
                                          const SpectrumTable& table, int n) {
    if (n == 1) {
      const PeakRecord* direct = table.find(target);
      if (direct != nullptr && direct->cls == PeakClass::kBragg)
        return std::vector<IntVec>{target};
      return std::nullopt;
    }
    if (bragg.empty()) return std::nullopt;
    build_left();
    if (left_overflow) return std::nullopt;  // budget exhausted: honest failure
    std::size_t budget = combo_cap;
    std::vector<std::size_t> idx(static_cast<std::size_t>(right_n), 0);
    do {
      if (budget-- == 0) return std::nullopt;
      IntVec s = target;
      for (auto i : idx) s = s - bragg[i];
      const auto it = left.find(s);
      if (it != left.end()) {
        std::vector<IntVec> out;
        for (auto i : it->second) out.push_back(bragg[i]);
        for (auto i : idx) out.push_back(bragg[i]);
        return out;
      }
    } while (next_combo(idx, bragg.size()));
    return std::nullopt;
  }
};

}  // namespace

std::optional<std::vector<IntVec>> sum_as_bragg(const SpectrumTable& table,
                                                const IntVec& target, int n,
                                                std::size_t combo_cap) {
  if (n < 1) throw NumericError("sum_as_bragg: n must be >= 1");
  SumSearchState state(table, n, combo_cap);
  return state.find(target, table, n);
}

BraggSumOracle make_bragg_sum_oracle(const SpectrumTable& table, int n,
                                     std::size_t combo_cap) {
  if (n < 1) throw NumericError("make_bragg_sum_oracle: n must be >= 1");
  auto state = std::make_shared<SumSearchState>(table, n, combo_cap);
  const SpectrumTable* tbl = &table;
  return [state, tbl, n](const IntVec& target) {
    return state->find(target, *tbl, n);
  };
}

std::vector<Cycle> decompose(const Cycle& c, int n, const BraggSumOracle& oracle) {
  if (n < 1) throw NumericError("decompose: n must be >= 1");
  Cycle cur = reduce(c);
  const std::size_t limit = static_cast<std::size_t>(2 * n + 1);
  std::vector<Cycle> factors;
  while (cur.length() > limit) {
    const auto& es = cur.entries();
    // j = first n+1 canonical entries; the oracle rewrites their sum as a
    // sum of n bragg vectors l, giving the short factor j(-l)
    std::vector<IntVec> j(es.begin(), es.begin() + (n + 1));
    IntVec target(j.front().size(), 0);
    for (const auto& v : j) target = target + v;
    auto l = oracle(target);
    if (!l) {
      std::string t = "(";
      for (std::size_t i = 0; i < target.size(); ++i)
        t += (i ? "," : "") + std::to_string(target[i]);
      t += ")";
      throw OracleError("decompose: sum oracle failed for target " + t, t);
    }
    if (l->size() != static_cast<std::size_t>(n))
      throw OracleError("decompose: oracle returned wrong arity");
    IntVec lsum(target.size(), 0);
    for (const auto& v : *l) lsum = lsum + v;
    if (lsum != target)
      throw OracleError("decompose: oracle result does not sum to target");

    std::vector<IntVec> factor = j;
    for (const auto& v : *l) factor.push_back(-v);
    factors.emplace_back(std::move(factor));

    std::vector<IntVec> rest(*l);
    rest.insert(rest.end(), es.begin() + (n + 1), es.end());
    cur = reduce(Cycle(std::move(rest)));
  }
  factors.push_back(cur);
  return factors;
}

}  // namespace qcdiff
