#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairdiv/continuous.hpp"
#include "fairdiv/discrete.hpp"
#include "fairdiv/realize.hpp"

namespace fairdiv::audit {

struct EnumerationLimits {
  uint64_t max_atoms = 1'000'000;    // refuse exact enumeration beyond this
  uint64_t denominator_cutoff = 12;  // sampler grids enumerated up to here
};

// ---------------------------------------------------------------------------
// Exact expectations
// ---------------------------------------------------------------------------

// Mechanism 1: under the uniform permutation every piece of the equal split
// is equally likely, so a player's expectation is the mean of her true values
// over the pieces. This evaluates to 1/k for any declaration profile.
inline std::vector<Rational> exact_expectation_mechanism1(
    const std::vector<StepMeasure>& true_measures,
    const std::vector<StepMeasure>& declared) {
  if (true_measures.size() != declared.size())
    throw std::invalid_argument("true and declared player counts differ");
  const Partition split = equal_partition(declared);
  const size_t k = declared.size();
  std::vector<Rational> expectation(k, Rational(0));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j)
      expectation[i] += measure_of(true_measures[i], split.part(j));
    expectation[i] /= Integer(k);
  }
  return expectation;
}

// Mechanism 3: every good's ownership marginal is exactly 1/k, so the
// expectation is total/k regardless of the declarations.
inline std::vector<Rational> exact_expectation_mechanism3(
    const DiscreteProfile& true_profile, const DiscreteProfile& declared) {
  if (true_profile.players() != declared.players() ||
      true_profile.goods() != declared.goods())
    throw std::invalid_argument("true and declared profile shapes differ");
  std::vector<Rational> expectation;
  expectation.reserve(true_profile.players());
  for (size_t i = 0; i < true_profile.players(); ++i)
    expectation.push_back(
        Rational(Integer(true_profile.total(i)), Integer(true_profile.players())));
  return expectation;
}

struct ExpectationBand {
  Rational lower;
  Rational upper;
  bool exact() const { return lower == upper; }
};

struct Mechanism2Expectation {
  // Exact expectation of the mechanism run with the sampler truncated at the
  // denominator cutoff and the tail mass routed to the fallback. This
  // truncated sampler is itself a valid draw distribution, so truthfulness
  // must hold exactly for these numbers.
  std::vector<Rational> truncated;
  // Sound bounds for the untruncated sampler. Exact when the tail provably
  // cannot accept (identical declarations); otherwise the tail contributes
  // [0,1] per draw, tightened to [1/k,1] for a truthfully declared player.
  std::vector<ExpectationBand> bands;
  bool tail_rejects = false;
  Rational head_mass = 0;      // probability mass enumerated below the cutoff
  Rational accepted_mass = 0;  // enumerated super-fair mass
};

inline Mechanism2Expectation exact_expectation_mechanism2(
    const std::vector<StepMeasure>& true_measures,
    const std::vector<StepMeasure>& declared, const Rational& halting,
    const EnumerationLimits& limits = {}) {
  const size_t k = declared.size();
  if (k == 0) throw std::invalid_argument("need at least one player");
  if (true_measures.size() != k)
    throw std::invalid_argument("true and declared player counts differ");
  if (!(halting > 0 && halting < 1))
    throw std::invalid_argument("halting probability must lie strictly between 0 and 1");

  uint64_t atoms = 0;
  uint64_t power = 1;
  for (uint64_t d = 1; d <= limits.denominator_cutoff; ++d) {
    if (power > limits.max_atoms / k) throw std::invalid_argument(
        "instance too large for exact enumeration; lower the denominator cutoff");
    power *= k;
    atoms += power;
    if (atoms > limits.max_atoms) throw std::invalid_argument(
        "instance too large for exact enumeration; lower the denominator cutoff");
  }

  const Rational kth(1, Integer(k));
  std::vector<Rational> fallback(k, Rational(0));
  const Partition equal_split = equal_partition(declared);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j)
      fallback[i] += measure_of(true_measures[i], equal_split.part(j));
    fallback[i] /= Integer(k);
  }

  std::vector<Rational> head(k, Rational(0));
  Rational head_mass = 0;
  Rational accepted_mass = 0;
  for (uint64_t d = 1; d <= limits.denominator_cutoff; ++d) {
    std::vector<std::vector<Rational>> declared_cell(k, std::vector<Rational>(d));
    std::vector<std::vector<Rational>> true_cell(k, std::vector<Rational>(d));
    for (uint64_t t = 0; t < d; ++t) {
      const HalfOpenInterval cell{Rational(Integer(t), Integer(d)),
                                  Rational(Integer(t + 1), Integer(d))};
      for (size_t i = 0; i < k; ++i) {
        declared_cell[i][t] = measure_of(declared[i], cell);
        true_cell[i][t] = measure_of(true_measures[i], cell);
      }
    }
    const Rational atom = halting * rational_pow(1 - halting, d - 1) /
                          rational_pow(Rational(Integer(k)), d);
    std::vector<size_t> label(d, 0);
    for (;;) {
      std::vector<Rational> declared_own(k, Rational(0));
      for (uint64_t t = 0; t < d; ++t)
        declared_own[label[t]] += declared_cell[label[t]][t];
      bool accepted = true;
      for (size_t i = 0; i < k && accepted; ++i)
        accepted = declared_own[i] > kth;
      if (accepted) {
        accepted_mass += atom;
        std::vector<Rational> true_own(k, Rational(0));
        for (uint64_t t = 0; t < d; ++t) true_own[label[t]] += true_cell[label[t]][t];
        for (size_t i = 0; i < k; ++i) head[i] += atom * true_own[i];
      } else {
        for (size_t i = 0; i < k; ++i) head[i] += atom * fallback[i];
      }
      head_mass += atom;

      size_t pos = 0;
      while (pos < d && ++label[pos] == k) {
        label[pos] = 0;
        ++pos;
      }
      if (pos == d) break;
    }
  }

  const Rational tail = rational_pow(1 - halting, limits.denominator_cutoff);

  bool identical = true;
  for (size_t i = 1; i < k && identical; ++i)
    identical = measures_equal(declared[0], declared[i]);

  Mechanism2Expectation out;
  out.tail_rejects = identical;
  out.head_mass = head_mass;
  out.accepted_mass = accepted_mass;
  out.truncated.reserve(k);
  out.bands.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    const Rational truncated = head[i] + tail * fallback[i];
    out.truncated.push_back(truncated);
    if (identical) {
      out.bands.push_back({truncated, truncated});
    } else {
      const bool truthful = measures_equal(declared[i], true_measures[i]);
      out.bands.push_back({head[i] + (truthful ? tail * kth : Rational(0)),
                           head[i] + tail});
    }
  }
  return out;
}

struct Mechanism4Expectation {
  std::vector<Rational> values;
  Rational accepted_mass = 0;
};

inline Mechanism4Expectation exact_expectation_mechanism4(
    const DiscreteProfile& true_profile, const DiscreteProfile& declared,
    const EnumerationLimits& limits = {}) {
  const size_t k = true_profile.players();
  const size_t n = true_profile.goods();
  if (declared.players() != k || declared.goods() != n)
    throw std::invalid_argument("true and declared profile shapes differ");
  uint64_t atoms = 1;
  for (size_t j = 0; j < n; ++j) {
    if (atoms > limits.max_atoms / k)
      throw std::invalid_argument("instance too large for exact enumeration");
    atoms *= k;
  }

  std::vector<Rational> fallback;  // mechanism3 expectation, declaration-free
  for (size_t i = 0; i < k; ++i)
    fallback.push_back(Rational(Integer(true_profile.total(i)), Integer(k)));

  Mechanism4Expectation out;
  out.values.assign(k, Rational(0));
  const Rational atom(1, Integer(atoms));
  std::vector<size_t> owner(n, 0);
  for (;;) {
    bool accepted = true;
    for (size_t i = 0; i < k && accepted; ++i) {
      int64_t declared_value = 0;
      for (size_t j = 0; j < n; ++j)
        if (owner[j] == i) declared_value += declared.utility(i, j);
      accepted = static_cast<int64_t>(k) * declared_value > declared.total(i);
    }
    if (accepted) {
      out.accepted_mass += atom;
      for (size_t i = 0; i < k; ++i) {
        int64_t true_value = 0;
        for (size_t j = 0; j < n; ++j)
          if (owner[j] == i) true_value += true_profile.utility(i, j);
        out.values[i] += atom * Integer(true_value);
      }
    } else {
      for (size_t i = 0; i < k; ++i) out.values[i] += atom * fallback[i];
    }

    size_t pos = 0;
    while (pos < n && ++owner[pos] == k) {
      owner[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truthfulness sweeps
// ---------------------------------------------------------------------------

struct SweepOutcome {
  bool truthful = true;
  size_t player = 0;
  Rational truthful_value;
  std::optional<size_t> witness;  // index of a strictly profitable deviation
  Rational witness_value;
};

// All M^n utility rows, in lexicographic order.
inline std::vector<std::vector<int64_t>> all_declaration_rows(int64_t utility_cap,
                                                              size_t goods,
                                                              uint64_t max_rows = 1'000'000) {
  uint64_t count = 1;
  for (size_t j = 0; j < goods; ++j) {
    if (count > max_rows / static_cast<uint64_t>(utility_cap))
      throw std::invalid_argument("declaration space too large to enumerate");
    count *= static_cast<uint64_t>(utility_cap);
  }
  std::vector<std::vector<int64_t>> rows;
  rows.reserve(count);
  std::vector<int64_t> row(goods, 1);
  for (;;) {
    rows.push_back(row);
    size_t pos = 0;
    while (pos < goods && ++row[pos] > utility_cap) {
      row[pos] = 1;
      ++pos;
    }
    if (pos == goods) break;
  }
  return rows;
}

inline SweepOutcome truthfulness_sweep_mechanism2(
    const std::vector<StepMeasure>& true_measures, size_t player,
    const std::vector<StepMeasure>& deviations, const Rational& halting,
    const EnumerationLimits& limits = {}) {
  if (player >= true_measures.size()) throw std::invalid_argument("player out of range");
  SweepOutcome out;
  out.player = player;
  const auto base = exact_expectation_mechanism2(true_measures, true_measures, halting, limits);
  out.truthful_value = base.truncated[player];
  const ExpectationBand truth_band = base.bands[player];
  for (size_t idx = 0; idx < deviations.size(); ++idx) {
    auto declared = true_measures;
    declared[player] = deviations[idx];
    const auto e = exact_expectation_mechanism2(true_measures, declared, halting, limits);
    // exact comparison under the truncated sampler, plus a certified
    // violation check against the untruncated bounds
    if (e.truncated[player] > out.truthful_value ||
        e.bands[player].lower > truth_band.upper) {
      out.truthful = false;
      out.witness = idx;
      out.witness_value = e.truncated[player];
      break;
    }
  }
  return out;
}

inline SweepOutcome truthfulness_sweep_mechanism1(
    const std::vector<StepMeasure>& true_measures, size_t player,
    const std::vector<StepMeasure>& deviations) {
  if (player >= true_measures.size())
    throw std::invalid_argument("player out of range");
  SweepOutcome out;
  out.player = player;
  out.truthful_value =
      exact_expectation_mechanism1(true_measures, true_measures)[player];
  for (size_t idx = 0; idx < deviations.size(); ++idx) {
    auto declared = true_measures;
    declared[player] = deviations[idx];
    const Rational value = exact_expectation_mechanism1(true_measures, declared)[player];
    if (value > out.truthful_value) {
      out.truthful = false;
      out.witness = idx;
      out.witness_value = value;
      break;
    }
  }
  return out;
}

inline SweepOutcome truthfulness_sweep_mechanism3(
    const DiscreteProfile& true_profile, size_t player,
    const std::vector<std::vector<int64_t>>& deviations) {
  if (player >= true_profile.players())
    throw std::invalid_argument("player out of range");
  SweepOutcome out;
  out.player = player;
  out.truthful_value = exact_expectation_mechanism3(true_profile, true_profile)[player];
  for (size_t idx = 0; idx < deviations.size(); ++idx) {
    auto rows = true_profile.utilities();
    rows[player] = deviations[idx];
    const DiscreteProfile declared(true_profile.utility_cap(), std::move(rows));
    const Rational value = exact_expectation_mechanism3(true_profile, declared)[player];
    if (value > out.truthful_value) {
      out.truthful = false;
      out.witness = idx;
      out.witness_value = value;
      break;
    }
  }
  return out;
}

inline SweepOutcome truthfulness_sweep_mechanism4(
    const DiscreteProfile& true_profile, size_t player,
    const std::vector<std::vector<int64_t>>& deviations,
    const EnumerationLimits& limits = {}) {
  if (player >= true_profile.players())
    throw std::invalid_argument("player out of range");
  SweepOutcome out;
  out.player = player;
  out.truthful_value =
      exact_expectation_mechanism4(true_profile, true_profile, limits).values[player];
  for (size_t idx = 0; idx < deviations.size(); ++idx) {
    auto rows = true_profile.utilities();
    rows[player] = deviations[idx];
    const DiscreteProfile declared(true_profile.utility_cap(), std::move(rows));
    const Rational value =
        exact_expectation_mechanism4(true_profile, declared, limits).values[player];
    if (value > out.truthful_value) {
      out.truthful = false;
      out.witness = idx;
      out.witness_value = value;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic impossibility demonstration
// ---------------------------------------------------------------------------

// Straw-man deterministic mechanism: the plain equal split when all declared
// measures coincide, otherwise the first grid partition (smallest
// denominator, then lexicographic cell labels) that is super-fair under the
// declarations.
inline Partition deterministic_superfair_mechanism(
    const std::vector<StepMeasure>& declared, uint64_t max_denominator = 32) {
  if (declared.empty()) throw std::invalid_argument("need at least one measure");
  const size_t k = declared.size();
  bool identical = true;
  for (size_t i = 1; i < k && identical; ++i)
    identical = measures_equal(declared[0], declared[i]);
  if (identical) return equal_partition(declared);

  for (uint64_t d = 1; d <= max_denominator; ++d) {
    std::vector<size_t> label(d, 0);
    for (;;) {
      const Partition candidate = uniform_grid_partition(d, label, k);
      if (is_superfair(declared, candidate)) return candidate;
      size_t pos = d;
      while (pos > 0 && ++label[pos - 1] == k) {
        label[pos - 1] = 0;
        --pos;
      }
      if (pos == 0) break;
    }
  }
  throw std::runtime_error("no super-fair grid partition within the denominator cap");
}

struct ImpossibilityReport {
  StepMeasure common_declaration;  // measure everyone is assumed to declare
  StepMeasure concentrated_truth;  // player 1's actual measure
  Partition equal_split;           // outcome when player 1 lies along with the crowd
  Partition superfair_split;       // outcome when player 1 declares honestly
  Rational lying_utility;
  Rational truthful_utility;
  bool lie_strictly_profitable = false;
};

// A player whose true measure is concentrated on her equal-split piece gains
// by declaring the common measure: honesty triggers the super-fair branch,
// which hands part of her piece to the other player. Pure function, identical
// report on every call.
inline ImpossibilityReport impossibility_demo() {
  const StepMeasure common = StepMeasure::uniform();
  const StepMeasure truth({Rational(0), Rational(1, 2), Rational(1)},
                          {Rational(2), Rational(0)});
  const std::vector<StepMeasure> lying{common, common};
  Partition equal_split = deterministic_superfair_mechanism(lying);
  const std::vector<StepMeasure> honest{truth, common};
  Partition superfair_split = deterministic_superfair_mechanism(honest);
  const Rational lying_utility = measure_of(truth, equal_split.part(0));
  const Rational truthful_utility = measure_of(truth, superfair_split.part(0));
  return ImpossibilityReport{common,
                             truth,
                             std::move(equal_split),
                             std::move(superfair_split),
                             lying_utility,
                             truthful_utility,
                             lying_utility > truthful_utility};
}

// ---------------------------------------------------------------------------
// Sampled risk and envy statistics
// ---------------------------------------------------------------------------

struct RiskEnvyStats {
  uint64_t trials = 0;
  std::vector<Rational> mean;      // per-player realized value, exact average
  std::vector<Rational> variance;  // exact empirical variance
  std::vector<Rational> min_value;
  std::vector<Rational> max_value;
  std::vector<bool> truthful;      // declared equals true, per player
  std::vector<Rational> floor;     // guarantee used for violation counting
  uint64_t floor_violations = 0;   // truthful players falling below their floor
  Rational max_envy = 0;           // max over trials of v_i(share_j) - v_i(share_i)
  double envy_reference = 0;       // diagnostic scale 3*M*sqrt(n*ln k); not a bound
  uint64_t accepted_runs = 0;      // super-fair acceptances (mechanisms 2 and 4)
};

namespace detail {

struct TrialAccumulator {
  size_t players;
  std::vector<Rational> sum, sum_sq, min_v, max_v;
  Rational max_envy = 0;

  explicit TrialAccumulator(size_t k)
      : players(k), sum(k, Rational(0)), sum_sq(k, Rational(0)), min_v(k), max_v(k) {}

  // value[i][j] = player i's true value of share j
  void add(const std::vector<std::vector<Rational>>& value, bool first) {
    for (size_t i = 0; i < players; ++i) {
      const Rational& own = value[i][i];
      sum[i] += own;
      sum_sq[i] += own * own;
      if (first || own < min_v[i]) min_v[i] = own;
      if (first || own > max_v[i]) max_v[i] = own;
      for (size_t j = 0; j < players; ++j) {
        const Rational envy = value[i][j] - own;
        if (envy > max_envy) max_envy = envy;
      }
    }
  }

  void finish(RiskEnvyStats& stats, uint64_t trials) const {
    const Integer t(trials);
    for (size_t i = 0; i < players; ++i) {
      const Rational mean = sum[i] / t;
      stats.mean.push_back(mean);
      stats.variance.push_back(sum_sq[i] / t - mean * mean);
    }
    stats.min_value = min_v;
    stats.max_value = max_v;
    stats.max_envy = max_envy;
    stats.trials = trials;
  }
};

}  // namespace detail

inline RiskEnvyStats risk_and_envy_stats_continuous(
    int mechanism, const std::vector<StepMeasure>& true_measures,
    const std::vector<StepMeasure>& declared, uint64_t trials, uint64_t seed,
    const Rational& halting = Rational(1, 2)) {
  if (mechanism != 1 && mechanism != 2)
    throw std::invalid_argument("continuous statistics cover mechanisms 1 and 2");
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  const size_t k = true_measures.size();
  if (declared.size() != k)
    throw std::invalid_argument("true and declared player counts differ");

  RiskEnvyStats stats;
  const Rational kth(1, Integer(k));
  for (size_t i = 0; i < k; ++i) {
    stats.truthful.push_back(measures_equal(true_measures[i], declared[i]));
    stats.floor.push_back(kth);
  }

  detail::TrialAccumulator acc(k);
  SeedStream root = SeedStream(seed).child("trial");
  std::vector<std::vector<Rational>> value(k, std::vector<Rational>(k));
  for (uint64_t t = 0; t < trials; ++t) {
    const uint64_t trial_seed = root.child(t).seed();
    const ContinuousAllocation alloc =
        mechanism == 1 ? mechanism1(declared, trial_seed)
                       : mechanism2(declared, QSamplerConfig{halting, trial_seed});
    if (alloc.superfair_accepted) ++stats.accepted_runs;
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j)
        value[i][j] = measure_of(true_measures[i], alloc.pieces[j]);
    for (size_t i = 0; i < k; ++i)
      if (stats.truthful[i] && value[i][i] < stats.floor[i]) ++stats.floor_violations;
    acc.add(value, t == 0);
  }
  acc.finish(stats, trials);
  return stats;
}

inline RiskEnvyStats risk_and_envy_stats_discrete(int mechanism,
                                                  const DiscreteProfile& true_profile,
                                                  const DiscreteProfile& declared,
                                                  uint64_t trials, uint64_t seed) {
  if (mechanism != 3 && mechanism != 4)
    throw std::invalid_argument("discrete statistics cover mechanisms 3 and 4");
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  const size_t k = true_profile.players();
  if (declared.players() != k || declared.goods() != true_profile.goods())
    throw std::invalid_argument("true and declared profile shapes differ");

  RiskEnvyStats stats;
  for (size_t i = 0; i < k; ++i)
    stats.truthful.push_back(true_profile.row(i) == declared.row(i));
  stats.floor = fairness_floor(true_profile);
  stats.envy_reference =
      3.0 * static_cast<double>(true_profile.utility_cap()) *
      std::sqrt(static_cast<double>(true_profile.goods()) *
                std::log(static_cast<double>(k)));

  detail::TrialAccumulator acc(k);
  SeedStream root = SeedStream(seed).child("trial");
  std::vector<std::vector<Rational>> value(k, std::vector<Rational>(k));
  for (uint64_t t = 0; t < trials; ++t) {
    const uint64_t trial_seed = root.child(t).seed();
    const DiscreteAllocation alloc = mechanism == 3 ? mechanism3(declared, trial_seed)
                                                    : mechanism4(declared, trial_seed);
    const bool accepted = mechanism == 4 && mechanism4_accepted(alloc);
    if (accepted) ++stats.accepted_runs;
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j)
        value[i][j] = Rational(Integer(owned_value(true_profile, alloc, i, j)));
    for (size_t i = 0; i < k; ++i) {
      if (!stats.truthful[i]) continue;
      if (accepted) {
        // her own strict check passed with her true utilities
        if (!(Integer(k) * value[i][i] > Integer(true_profile.total(i))))
          ++stats.floor_violations;
      } else if (value[i][i] < stats.floor[i]) {
        ++stats.floor_violations;
      }
    }
    acc.add(value, t == 0);
  }
  acc.finish(stats, trials);
  return stats;
}

}  // namespace fairdiv::audit
