#include "qcdiff/cyclefunc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qcdiff/numeric.hpp"
#include "qcdiff/rng.hpp"

namespace qcdiff {

AmplitudeMap::AmplitudeMap(const PointPatch& patch, const SpectrumTable& table)
    : patch_(&patch), table_(&table), patch_hash_(patch.identity_hash()) {
  if (patch.scheme().label() != table.scheme().label())
    throw NumericError("amplitude map: patch and table use different schemes");
}

const PeakRecord& AmplitudeMap::record(const IntVec& coords) const {
  const PeakRecord* r = table_->find(coords);
  if (r == nullptr)
    throw NumericError("amplitude map: module point not in spectrum table");
  return *r;
}

double AmplitudeMap::sqrt_intensity(const IntVec& coords) const {
  return std::sqrt(record(coords).intensity_theory);
}

Complex AmplitudeMap::amplitude(const IntVec& coords) {
  const auto it = amps_.find(coords);
  if (it != amps_.end()) return it->second;
  const PeakRecord& r = record(coords);
  if (r.cls != PeakClass::kBragg)
    throw NumericError(
        "amplitude map: '" + std::string(to_string(r.cls)) +
        "' record requested; the cycle function needs f_k/gammahat^{1/2}, "
        "which is undefined off the Bragg spectrum");
  const Complex f = bombieri_taylor(*patch_, r.k_phys);
  amps_.emplace(coords, f);
  return f;
}

void AmplitudeMap::prefetch(std::span<const IntVec> coords) {
  std::vector<const PeakRecord*> todo;
  for (const auto& c : coords) {
    if (amps_.count(c)) continue;
    const PeakRecord& r = record(c);
    if (r.cls == PeakClass::kBragg) todo.push_back(&r);
  }
  std::vector<Complex> out(todo.size());
  const auto& pts = patch_->points();
  const double vol = patch_->cube_volume();
  parallel_for(todo.size(), [&](std::size_t j) {
    std::vector<Complex> terms(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      terms[i] = unit_phase(kTwoPi * todo[j]->k_phys.dot(pts[i].x));
    out[j] = pairwise_sum(terms) / vol;
  });
  for (std::size_t j = 0; j < todo.size(); ++j)
    amps_.emplace(todo[j]->coords, out[j]);
}

void AmplitudeMap::prefetch_bragg(std::size_t top_count) {
  auto bragg = table_->bragg_by_intensity();
  if (top_count > 0 && bragg.size() > top_count) bragg.resize(top_count);
  std::vector<IntVec> coords;
  coords.reserve(bragg.size());
  for (const auto* r : bragg) coords.push_back(r->coords);
  prefetch(coords);
}

namespace {

IntVec pair_key(const IntVec& v) {
  IntVec neg = -v;
  return lex_less(neg, v) ? neg : v;
}

}  // namespace

CycleFunctionEstimate estimate_a(AmplitudeMap& amps, const Cycle& cycle) {
  if (!cycle.is_zero_sum())
    throw NumericError("estimate_a: cycle entries do not sum to zero");

  // bucket entries as {k,-k} pairs; zeros contribute the exactly-real
  // f_0/gammahat(0)^{1/2}
  std::size_t zero_count = 0;
  std::map<IntVec, std::pair<std::int64_t, std::int64_t>> buckets;
  for (const auto& v : cycle.entries()) {
    if (is_zero(v)) {
      ++zero_count;
      continue;
    }
    const IntVec key = pair_key(v);
    auto& [pos, neg] = buckets[key];
    (v == key ? pos : neg) += 1;
  }
  // validate every distinct entry against the table up front
  for (const auto& [key, counts] : buckets) {
    if (counts.first > 0) amps.amplitude(key);
    if (counts.second > 0) amps.amplitude(-key);
  }

  const double R = amps.patch().cube_side();
  Complex prod{1.0, 0.0};
  double phase_error = 0.0;
  std::vector<IntVec> eval_order;

  if (zero_count > 0) {
    const IntVec zero(cycle.entries().front().size(), 0);
    const Complex f0 = amps.amplitude(zero);
    const double s0 = amps.sqrt_intensity(zero);
    for (std::size_t i = 0; i < zero_count; ++i) {
      prod *= f0 / s0;
      eval_order.push_back(zero);
    }
  }
  for (const auto& [key, counts] : buckets) {
    const auto [cp, cn] = counts;
    const Complex f = amps.amplitude(key);
    const double s = amps.sqrt_intensity(key);
    const std::int64_t pairs = std::min(cp, cn);
    // each {k,-k} pair folds to the exactly-real |f_k|^2 / gammahat(k)
    const double pair_factor = std::norm(f) / (s * s);
    for (std::int64_t i = 0; i < pairs; ++i) {
      prod *= pair_factor;
      eval_order.push_back(key);
      eval_order.push_back(-key);
    }
    const std::int64_t left_pos = cp - pairs;
    const std::int64_t left_neg = cn - pairs;
    const double dev = std::fabs(std::abs(f) / s - 1.0);
    for (std::int64_t i = 0; i < left_pos; ++i) {
      prod *= f / s;
      eval_order.push_back(key);
      phase_error += std::max(dev, 1.0 / R);
    }
    for (std::int64_t i = 0; i < left_neg; ++i) {
      prod *= std::conj(f) / s;
      eval_order.push_back(-key);
      phase_error += std::max(dev, 1.0 / R);
    }
  }

  const double raw = std::abs(prod);
  if (!(raw > 0.0))
    throw NumericError("estimate_a: amplitude product vanished");
  CycleFunctionEstimate est;
  est.cycle = Cycle(std::move(eval_order));
  est.value = prod / raw;
  est.raw_modulus = raw;
  est.patch_R = R;
  est.phase_error = phase_error;
  return est;
}

CycleFunctionEstimate estimate_a(const PointPatch& patch, const Cycle& cycle,
                                 const SpectrumTable& table) {
  AmplitudeMap amps(patch, table);
  return estimate_a(amps, cycle);
}

PropertyCheckReport check_properties(AmplitudeMap& amps,
                                     std::span<const Cycle> cycles,
                                     std::uint64_t seed) {
  PropertyCheckReport report;
  if (cycles.empty()) return report;
  SplitMix64 rng(seed);

  // strongest nonzero peak, for pair insertions
  IntVec strong;
  for (const auto* r : amps.table().bragg_by_intensity())
    if (!is_zero(r->coords)) {
      strong = r->coords;
      break;
    }

  auto add = [&report](const std::string& what, double r, double& maxslot) {
    report.rows.push_back({what, r});
    maxslot = std::max(maxslot, r);
  };

  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const Cycle& c = cycles[i];
    const auto base = estimate_a(amps, c);

    {  // permutation invariance (exact by fixed evaluation order)
      std::vector<IntVec> es = c.entries();
      for (std::size_t j = es.size(); j > 1; --j)
        std::swap(es[j - 1], es[rng.next_below(j)]);
      const auto perm = estimate_a(amps, Cycle(std::move(es)));
      add("permutation[" + std::to_string(i) + "]",
          std::abs(perm.value - base.value), report.max_permutation);
    }
    if (!strong.empty()) {  // insertion of {k,-k} and 0
      std::vector<IntVec> es = c.entries();
      es.push_back(strong);
      es.push_back(-strong);
      es.push_back(IntVec(strong.size(), 0));
      const auto ins = estimate_a(amps, Cycle(std::move(es)));
      add("insertion[" + std::to_string(i) + "]",
          std::abs(ins.value - base.value), report.max_insertion);
    }
    {  // reflection: a(-c) = conj a(c)
      const auto conj_est = estimate_a(amps, inverse(c));
      add("conjugation[" + std::to_string(i) + "]",
          std::abs(conj_est.value - std::conj(base.value)),
          report.max_conjugation);
    }
    {  // homomorphism against the reduced concatenation
      const Cycle& c2 = cycles[(i + 1) % cycles.size()];
      const auto b2 = estimate_a(amps, c2);
      const auto both = estimate_a(amps, reduce(concat(c, c2)));
      add("homomorphism[" + std::to_string(i) + "]",
          std::abs(base.value * b2.value - both.value),
          report.max_homomorphism);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

void MapCycleFunctionSource::set(const Cycle& cycle, Complex value,
                                 double phase_error) {
  values_[reduce(cycle).key()] = AValue{value, phase_error};
}

std::optional<AValue> MapCycleFunctionSource::value(const Cycle& canonical) const {
  if (canonical.length() == 0) return AValue{Complex(1.0, 0.0), 0.0};
  const auto it = values_.find(canonical.key());
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

EstimatorCycleFunctionSource::EstimatorCycleFunctionSource(AmplitudeMap& amps,
                                                           int n,
                                                           BraggSumOracle oracle)
    : amps_(&amps), n_(n), oracle_(std::move(oracle)) {
  if (n_ < 1) throw NumericError("cycle function source: n must be >= 1");
}

std::optional<AValue> EstimatorCycleFunctionSource::value(
    const Cycle& canonical) const {
  const Cycle c = reduce(canonical);
  if (c.length() == 0) return AValue{Complex(1.0, 0.0), 0.0};
  const std::string key = c.key();
  const auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  AValue out;
  if (c.length() <= static_cast<std::size_t>(2 * n_ + 1)) {
    const auto est = estimate_a(*amps_, c);
    out = {est.value, est.phase_error};
  } else {
    // Thm-main route: split into factors of reduced length <= 2n+1 and use
    // the homomorphism.
    const auto factors = decompose(c, n_, oracle_);
    Complex prod{1.0, 0.0};
    double err = 0.0;
    for (const auto& f : factors) {
      const auto fv = value(f);
      prod *= fv->value;  // factors are short, so this never recurses deep
      err += fv->phase_error;
    }
    const double mod = std::abs(prod);
    out = {mod > 0.0 ? prod / mod : prod, err};
  }
  memo_.emplace(key, out);
  return out;
}

// ---------------------------------------------------------------------------
// moment_from_cyclefunction

namespace {

struct RetainedPeak {
  IntVec coords;
  Eigen::VectorXd k_phys;
  double k_star_norm;
  double sqrt_intensity;
};

struct Combo {
  IntVec sum;
  std::vector<std::uint32_t> idx;  // nondecreasing retained-peak indices
};

double log_multiset_count(std::size_t p, int m) {
  // log C(p+m-1, m)
  return std::lgamma(static_cast<double>(p + m)) -
         std::lgamma(static_cast<double>(m + 1)) -
         std::lgamma(static_cast<double>(p));
}

std::vector<Combo> enumerate_combos(const std::vector<RetainedPeak>& peaks,
                                    int m) {
  std::vector<Combo> out;
  if (peaks.empty() || m == 0) return out;
  const std::size_t p = peaks.size();
  const std::size_t dim = peaks.front().coords.size();
  std::vector<std::uint32_t> idx(static_cast<std::size_t>(m), 0);
  for (;;) {
    Combo c;
    c.idx = idx;
    c.sum = IntVec(dim, 0);
    for (auto i : idx) c.sum = c.sum + peaks[i].coords;
    out.push_back(std::move(c));
    // advance nondecreasing tuple
    int pos = m - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 >= p) --pos;
    if (pos < 0) break;
    const std::uint32_t v = idx[static_cast<std::size_t>(pos)] + 1;
    for (int j = pos; j < m; ++j) idx[static_cast<std::size_t>(j)] = v;
  }
  return out;
}

std::string multiset_string(const std::vector<IntVec>& entries) {
  std::string s;
  for (const auto& e : entries) {
    s += '(';
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(e[i]);
    }
    s += ')';
  }
  return s;
}

}  // namespace

SpectralMomentResult moment_from_cyclefunction(
    const SpectrumTable& table, const CycleFunctionSource& a_values,
    std::span<const GaussianTestFunction> h_list, const MomentOptions& opts) {
  const int n = static_cast<int>(h_list.size());
  if (n < 1) throw NumericError("moment_from_cyclefunction: need n >= 1");
  if (n > opts.max_n)
    throw NumericError("moment_from_cyclefunction: n exceeds depth limit");
  const int d = table.scheme().physical_dim();
  for (const auto& h : h_list)
    if (h.dim() != d)
      throw NumericError("moment_from_cyclefunction: probe dimension mismatch");

  // position-wise weights w_j(k) = hhat_j(k_phys) sqrt(gammahat(k)) over all
  // bragg records, ranked by importance
  std::vector<const PeakRecord*> bragg;
  for (const auto& r : table.records())
    if (r.cls == PeakClass::kBragg) bragg.push_back(&r);

  std::vector<double> score(bragg.size(), 0.0);
  for (std::size_t i = 0; i < bragg.size(); ++i) {
    const double si = std::sqrt(bragg[i]->intensity_theory);
    for (const auto& h : h_list)
      score[i] = std::max(score[i], std::abs(h.fourier(bragg[i]->k_phys)) * si);
  }
  std::vector<std::size_t> order(bragg.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return lex_less(bragg[a]->coords, bragg[b]->coords);
  });

  std::unordered_map<IntVec, bool, IntVecHash> keep;
  for (std::size_t r = 0; r < order.size() && r < opts.max_peaks; ++r) {
    if (score[order[r]] <= 0.0) break;
    keep.emplace(bragg[order[r]]->coords, true);
  }
  // close under negation so tuple families pair up exactly
  {
    std::vector<IntVec> missing;
    for (const auto& [c, _] : keep) {
      const IntVec neg = -c;
      if (!keep.count(neg) && table.find(neg) != nullptr &&
          table.find(neg)->cls == PeakClass::kBragg)
        missing.push_back(neg);
    }
    for (auto& c : missing) keep.emplace(std::move(c), true);
  }

  std::vector<RetainedPeak> peaks;
  double star_retained_max = 0.0;
  std::vector<double> A(static_cast<std::size_t>(n), 0.0);
  std::vector<double> T(static_cast<std::size_t>(n), 0.0);
  std::vector<double> drop_cap(static_cast<std::size_t>(n), 0.0);
  for (const auto* r : bragg) {
    const double si = std::sqrt(r->intensity_theory);
    const bool kept = keep.count(r->coords) > 0;
    for (int j = 0; j < n; ++j) {
      const double w = std::abs(h_list[static_cast<std::size_t>(j)].fourier(r->k_phys)) * si;
      if (kept)
        A[static_cast<std::size_t>(j)] += w;
      else {
        T[static_cast<std::size_t>(j)] += w;
        drop_cap[static_cast<std::size_t>(j)] =
            std::max(drop_cap[static_cast<std::size_t>(j)], w);
      }
    }
    if (kept) {
      peaks.push_back({r->coords, r->k_phys, r->k_star.norm(), si});
      star_retained_max = std::max(star_retained_max, r->k_star.norm());
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const RetainedPeak& a, const RetainedPeak& b) {
              return lex_less(a.coords, b.coords);
            });

  SpectralMomentResult result;
  result.peaks_used = peaks.size();

  // --- truncation bound ------------------------------------------------
  // Tuples with an entry outside the retained set: the zero sum pins that
  // entry once the others are chosen, so such families are bounded by
  //   n * (max weight outside) * prod_{i != j} F_i,
  // with F_i the single-position weight sum over table + the extended region
  // |k_star| <= (n-1) star_cut (an entry cannot land beyond that unless a
  // second entry also leaves the table; those far pairs get their own
  // closed-form term).
  const double covol = table.scheme().covolume();
  const double star_cut = table.star_cut();
  double h_sup = 0.0, h_int = 0.0;
  for (const auto& h : h_list) {
    h_sup = std::max(h_sup, h.fourier_envelope(0.0));
    h_int = std::max(h_int, std::abs(h.amplitude));  // int |hhat| = |A|
  }
  // marginal over the extended star annulus star_cut < |s| <= (n-1)star_cut:
  // per unit star interval the strip holds ~ covol * H_int mass of |hhat|,
  // and sqrt(gammahat) <= envelope(s)/covol
  double M_ext = 0.0;
  if (n >= 2 && star_cut > 0.0) {
    const double slab_mass = covol * h_int + 2.0 * h_sup;
    const double s_lo = star_cut, s_hi = (n - 1) * star_cut + 1.0;
    // integral of envelope/covol over the annulus, both star signs
    const double env_c = table.window().fourier_envelope(1.0);  // = C/1
    M_ext = 2.0 * slab_mass * (env_c / covol) * std::log(s_hi / s_lo);
  }
  std::vector<double> F(static_cast<std::size_t>(n));
  double F_max = 0.0;
  for (int j = 0; j < n; ++j) {
    F[static_cast<std::size_t>(j)] =
        A[static_cast<std::size_t>(j)] + T[static_cast<std::size_t>(j)] + M_ext;
    F_max = std::max(F_max, F[static_cast<std::size_t>(j)]);
  }
  auto prod_excluding = [&](int j) {
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      if (i != j) p *= F[static_cast<std::size_t>(i)];
    return p;
  };
  // weight cap outside the retained set: dropped in-table records, or
  // beyond-table records (sqrt intensity <= envelope(star_cut)/covol)
  const double beyond_sqrtI =
      star_cut > 0.0 ? table.window().fourier_envelope(star_cut) / covol : 0.0;
  double tail1 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double cap = std::max(drop_cap[static_cast<std::size_t>(j)],
                                h_sup * beyond_sqrtI);
    tail1 += cap * prod_excluding(j);
  }
  // far pairs: two entries beyond the extended region, mutually pinned
  double tail2 = 0.0;
  if (n >= 2 && star_cut > 0.0) {
    const double s_big = (n - 1) * star_cut + 1.0;
    const double c_shift = (n - 2) * star_cut;
    const double env_c = table.window().fourier_envelope(1.0);
    const double slab_mass = covol * h_int + 2.0 * h_sup;
    const double integral =
        c_shift > 0.0
            ? std::log(s_big / (s_big - c_shift)) / c_shift
            : 1.0 / s_big;
    const double pairs = 2.0 * slab_mass * h_sup *
                         (env_c / covol) * (env_c / covol) * integral;
    tail2 = 0.5 * n * (n - 1) * pairs *
            (n > 2 ? std::pow(F_max, n - 2) : 1.0);
  }
  result.tail_bound = tail1 + tail2;
  if (result.tail_bound > opts.tail_budget)
    throw NumericError("moment_from_cyclefunction: tail budget exceeded");

  // --- exact zero-sum tuple enumeration --------------------------------
  if (n == 1) {
    const IntVec zero(static_cast<std::size_t>(table.scheme().total_dim()), 0);
    const PeakRecord* origin = table.find(zero);
    result.value = h_list[0].fourier(origin->k_phys) *
                   std::sqrt(origin->intensity_theory);
    result.tuple_count = 1;
    return result;
  }

  const int mL = n / 2;
  const int mR = n - mL;
  if (log_multiset_count(peaks.size(), mL) > std::log(static_cast<double>(opts.tuple_cap)) ||
      log_multiset_count(peaks.size(), mR) > std::log(static_cast<double>(opts.tuple_cap)))
    throw NumericError("moment_from_cyclefunction: tuple cap exceeded");

  auto left = enumerate_combos(peaks, mL);
  auto right = enumerate_combos(peaks, mR);
  std::unordered_map<IntVec, std::vector<std::uint32_t>, IntVecHash> right_by_sum;
  for (std::uint32_t r = 0; r < right.size(); ++r)
    right_by_sum[right[r].sum].push_back(r);
  // bucket order: combos were generated in lex order, so idx[0] is
  // nondecreasing within each bucket already

  // per-position weights on retained peaks
  std::vector<std::vector<Complex>> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto& wj = w[static_cast<std::size_t>(j)];
    wj.resize(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i)
      wj[i] = h_list[static_cast<std::size_t>(j)].fourier(peaks[i].k_phys) *
              peaks[i].sqrt_intensity;
  }

  struct Term {
    std::string pair_key;
    int flag;
    Complex term;
  };
  std::vector<Term> terms;
  double a_err = 0.0;
  std::size_t tuple_count = 0;

  std::unordered_map<IntVec, std::uint32_t, IntVecHash> peak_index;
  for (std::uint32_t i = 0; i < peaks.size(); ++i)
    peak_index.emplace(peaks[i].coords, i);

  std::vector<std::uint32_t> full;
  full.reserve(static_cast<std::size_t>(n));
  for (const auto& lc : left) {
    const IntVec want = -lc.sum;
    const auto it = right_by_sum.find(want);
    if (it == right_by_sum.end()) continue;
    const std::uint32_t lo_idx = lc.idx.back();
    for (const auto r : it->second) {
      const Combo& rc = right[r];
      if (rc.idx.front() < lo_idx) continue;  // keep the sorted split unique
      full.assign(lc.idx.begin(), lc.idx.end());
      full.insert(full.end(), rc.idx.begin(), rc.idx.end());
      ++tuple_count;

      std::vector<IntVec> entries;
      entries.reserve(full.size());
      for (auto i : full) entries.push_back(peaks[i].coords);
      const Cycle canonical = reduce(Cycle(entries));
      std::optional<AValue> a;
      if (canonical.length() == 0)
        a = AValue{Complex(1.0, 0.0), 0.0};
      else
        a = a_values.value(canonical);
      if (!a)
        throw NumericError("moment_from_cyclefunction: missing a-value for " +
                           canonical.key());

      // symmetrized weight: sum over distinct arrangements of the multiset
      Complex W{0.0, 0.0};
      std::vector<std::uint32_t> perm = full;  // already sorted
      do {
        Complex p{1.0, 0.0};
        for (int j = 0; j < n; ++j)
          p *= w[static_cast<std::size_t>(j)][perm[static_cast<std::size_t>(j)]];
        W += p;
      } while (std::next_permutation(perm.begin(), perm.end()));

      a_err += a->phase_error * std::abs(W);

      // negation pairing for exact conjugation symmetry
      std::vector<IntVec> neg_entries;
      neg_entries.reserve(entries.size());
      for (const auto& e : entries) neg_entries.push_back(-e);
      std::sort(neg_entries.begin(), neg_entries.end(), lex_less);
      const std::string key_pos = multiset_string(entries);
      const std::string key_neg = multiset_string(neg_entries);
      Term t;
      t.term = a->value * W;
      if (key_pos <= key_neg) {
        t.pair_key = key_pos;
        t.flag = 0;
      } else {
        t.pair_key = key_neg;
        t.flag = 1;
      }
      terms.push_back(std::move(t));
    }
  }

  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (a.pair_key != b.pair_key) return a.pair_key < b.pair_key;
    return a.flag < b.flag;
  });
  std::vector<Complex> pair_sums;
  for (std::size_t i = 0; i < terms.size();) {
    Complex s = terms[i].term;
    std::size_t j = i + 1;
    while (j < terms.size() && terms[j].pair_key == terms[i].pair_key)
      s += terms[j++].term;
    pair_sums.push_back(s);
    i = j;
  }
  result.value = pairwise_sum(pair_sums);
  result.a_error_bound = a_err;
  result.tuple_count = tuple_count;
  return result;
}

// ---------------------------------------------------------------------------

CycleFunctionEstimate cyclefunction_from_moments(const PointPatch& patch,
                                                 const SpectrumTable& table,
                                                 const Cycle& cycle,
                                                 double sigma_k,
                                                 const BumpMomentOptions& opts) {
  if (!(sigma_k > 0.0))
    throw NumericError("cyclefunction_from_moments: sigma_k must be > 0");
  if (!cycle.is_zero_sum())
    throw NumericError("cyclefunction_from_moments: cycle not zero-sum");
  if (cycle.length() == 0) {
    CycleFunctionEstimate est;
    est.cycle = cycle;
    est.value = {1.0, 0.0};
    est.raw_modulus = 1.0;
    est.patch_R = patch.cube_side();
    est.phase_error = 0.0;
    return est;
  }
  const int d = patch.scheme().physical_dim();

  std::vector<const PeakRecord*> recs;
  for (const auto& v : cycle.entries()) {
    const PeakRecord* r = table.find(v);
    if (r == nullptr || r->cls != PeakClass::kBragg)
      throw NumericError(
          "cyclefunction_from_moments: cycle entry is not a bragg record");
    recs.push_back(r);
  }

  // modulated Gaussians whose transforms are unit bumps at the entries:
  // hhat_j(k) = exp(-|k - k_j|^2 / (2 sigma_k^2))
  const double sigma_x = 1.0 / (kTwoPi * sigma_k);
  const double amp = std::pow(kTwoPi * sigma_k * sigma_k, d / 2.0);
  std::vector<GaussianTestFunction> bumps;
  double denom = 1.0;
  for (const auto* r : recs) {
    bumps.emplace_back(Eigen::VectorXd::Zero(d), sigma_x, Complex(amp, 0.0),
                       r->k_phys);
    denom *= std::sqrt(r->intensity_theory);
  }

  // spectral leakage of each bump onto the other in-range peaks
  double leak = 0.0;
  for (std::size_t j = 0; j < bumps.size(); ++j) {
    double lj = 0.0;
    for (const auto& rec : table.records()) {
      if (rec.cls != PeakClass::kBragg) continue;
      if (rec.coords == recs[j]->coords) continue;
      lj += std::abs(bumps[j].fourier(rec.k_phys)) *
            std::sqrt(rec.intensity_theory);
    }
    leak += lj / std::sqrt(recs[j]->intensity_theory);
  }
  if (leak > opts.leak_tol) {
    std::ostringstream msg;
    msg << "cyclefunction_from_moments: leakage bound " << leak
        << " exceeds tolerance " << opts.leak_tol
        << " (peaks too dense for sigma_k = " << sigma_k
        << "; reduce sigma_k or enlarge R)";
    throw NumericError(msg.str());
  }

  TranslateGrid grid{opts.spacing_factor * sigma_x, opts.margin_sigmas * sigma_x};
  const auto m = birkhoff_moment(patch, bumps, grid);

  const Complex val = m.value / denom;
  const double raw = std::abs(val);
  if (!(raw > 0.0))
    throw NumericError("cyclefunction_from_moments: moment vanished");
  CycleFunctionEstimate est;
  est.cycle = cycle;
  est.value = val / raw;
  est.raw_modulus = raw;
  est.patch_R = patch.cube_side();
  est.phase_error = leak + m.std_error / denom +
                    static_cast<double>(cycle.length()) / patch.cube_side();
  return est;
}

// ---------------------------------------------------------------------------

ReconstructReport reconstruct_pipeline(
    const SpectrumTable& table, const PointPatch& patch, int n,
    std::span<const std::vector<GaussianTestFunction>> test_moments,
    const ReconstructOptions& opts) {
  if (n < 1) throw NumericError("reconstruct_pipeline: n must be >= 1");
  ReconstructReport report;
  report.n = n;
  report.bragg_peaks = table.bragg_count();
  report.extinctions = table.extinction_count();

  AmplitudeMap amps(patch, table);
  amps.prefetch_bragg(0);
  auto oracle = make_bragg_sum_oracle(table, n);
  EstimatorCycleFunctionSource source(amps, n, oracle);

  for (const auto& spec : test_moments) {
    MomentComparisonRow row;
    row.n = static_cast<int>(spec.size());
    const auto spectral =
        moment_from_cyclefunction(table, source, spec, opts.moment);
    row.spectral = spectral.value;
    row.tail_bound = spectral.tail_bound;
    row.a_error_bound = spectral.a_error_bound;

    TranslateGrid grid = opts.grid;
    if (!(grid.spacing > 0.0)) {
      double smin = spec.front().sigma, smax = spec.front().sigma;
      for (const auto& h : spec) {
        smin = std::min(smin, h.sigma);
        smax = std::max(smax, h.sigma);
      }
      grid.spacing = 0.25 * smin;
      grid.margin = 6.0 * smax;
    }
    const auto direct = birkhoff_moment(patch, spec, grid);
    row.birkhoff = direct.value;
    row.birkhoff_se = direct.std_error;
    row.rel_residual = std::abs(row.spectral - row.birkhoff) /
                       std::max(std::abs(row.birkhoff), 1e-300);
    report.moments.push_back(row);
  }

  // extension consistency: longer cycles, direct product vs decomposition
  {
    auto strongest = table.bragg_by_intensity();
    std::vector<const PeakRecord*> alphabet;
    for (const auto* r : strongest) {
      if (is_zero(r->coords)) continue;
      alphabet.push_back(r);
      if (alphabet.size() >= opts.extension_alphabet) break;
    }
    SplitMix64 rng(opts.seed);
    const std::size_t want = opts.extension_samples;
    std::size_t made = 0;
    for (std::size_t attempt = 0; attempt < 200 * want && made < want;
         ++attempt) {
      const std::size_t len = static_cast<std::size_t>(2 * n + 2) +
                              rng.next_below(2);
      std::vector<IntVec> entries;
      IntVec sum(alphabet.front()->coords.size(), 0);
      for (std::size_t i = 0; i + 1 < len; ++i) {
        const auto* pick = alphabet[rng.next_below(alphabet.size())];
        entries.push_back(pick->coords);
        sum = sum + pick->coords;
      }
      const IntVec last = -sum;
      const PeakRecord* lr = table.find(last);
      if (lr == nullptr || lr->cls != PeakClass::kBragg) continue;
      entries.push_back(last);
      const Cycle canonical = reduce(Cycle(entries));
      if (canonical.length() <= static_cast<std::size_t>(2 * n + 1)) continue;
      const auto direct = estimate_a(amps, canonical);
      const auto extended = source.value(canonical);
      ExtensionConsistencyRow row;
      row.cycle_key = canonical.key();
      row.direct = direct.value;
      row.extended = extended->value;
      row.residual = std::abs(direct.value - extended->value);
      report.extensions.push_back(std::move(row));
      ++made;
    }
  }

  // canonical short cycles actually estimated along the way
  report.direct_cycles_estimated = report.moments.size();
  return report;
}

}  // namespace qcdiff
