// fairdiv command line: run the mechanisms, realize fractional targets, and
// audit truthfulness, risk and fairness floors. All randomness flows from one
// explicit seed through named sub-streams, so identical invocations produce
// byte-identical output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fairdiv/fairdiv.hpp"
#include "fairdiv/json_io.hpp"

namespace {

using fairdiv::json;
using namespace fairdiv;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

Rational parse_rational_arg(const std::string& text, const std::string& flag) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(flag + ": " + e.what());
  }
}

void emit(const json& out) { std::cout << out.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// continuous run
// ---------------------------------------------------------------------------

struct ContinuousRunArgs {
  int mechanism = 1;
  std::string declared_path;
  std::string true_path;
  uint64_t seed = 0;
  std::string halting = "1/2";
};

void run_continuous(const ContinuousRunArgs& args) {
  const auto declared = measures_from_json(load_json(args.declared_path), "declared");
  auto true_measures = declared;
  if (!args.true_path.empty()) {
    true_measures = measures_from_json(load_json(args.true_path), "true");
    if (true_measures.size() != declared.size())
      throw std::invalid_argument("true and declared measure counts differ");
  }
  const Rational halting = parse_rational_arg(args.halting, "--halting");

  const ContinuousAllocation alloc =
      args.mechanism == 1 ? mechanism1(declared, args.seed)
                          : mechanism2(declared, QSamplerConfig{halting, args.seed});

  json players = json::array();
  for (size_t i = 0; i < declared.size(); ++i) {
    players.push_back(json{
        {"player", i + 1},
        {"piece", to_json(alloc.pieces[i])},
        {"declared_value", to_json(measure_of(declared[i], alloc.pieces[i]))},
        {"true_value", to_json(measure_of(true_measures[i], alloc.pieces[i]))}});
  }
  json out{{"command", "continuous run"},
           {"mechanism", args.mechanism},
           {"seed", args.seed},
           {"superfair_accepted", alloc.superfair_accepted},
           {"allocation", std::move(players)}};
  if (args.mechanism == 2) out["denominator_halting"] = format_rational(halting);
  if (alloc.permutation_used) {
    json perm = json::array();
    for (size_t p : *alloc.permutation_used) perm.push_back(p + 1);
    out["permutation"] = std::move(perm);
  } else {
    out["permutation"] = nullptr;
  }
  emit(out);
}

// ---------------------------------------------------------------------------
// discrete run
// ---------------------------------------------------------------------------

struct DiscreteRunArgs {
  int mechanism = 3;
  std::string declared_path;
  std::string true_path;
  uint64_t seed = 0;
  uint64_t trials = 1;
};

void run_discrete(const DiscreteRunArgs& args) {
  if (args.trials == 0) throw std::invalid_argument("--trials must be at least 1");
  const DiscreteProfile declared = profile_from_json(load_json(args.declared_path), "declared");
  DiscreteProfile true_profile = declared;
  if (!args.true_path.empty()) {
    true_profile = profile_from_json(load_json(args.true_path), "true");
    if (true_profile.players() != declared.players() ||
        true_profile.goods() != declared.goods() ||
        true_profile.utility_cap() != declared.utility_cap())
      throw std::invalid_argument("true and declared profiles must share M and shape");
  }

  const size_t k = declared.players();
  const auto floors = fairness_floor(true_profile);
  std::vector<bool> truthful;
  for (size_t i = 0; i < k; ++i)
    truthful.push_back(true_profile.row(i) == declared.row(i));

  std::vector<Rational> sum(k, Rational(0));
  std::vector<int64_t> min_value(k, 0);
  std::vector<bool> floor_ok(k, true);
  uint64_t violations = 0;

  SeedStream trial_root = SeedStream(args.seed).child("trial");
  json runs = json::array();
  for (uint64_t t = 0; t < args.trials; ++t) {
    const uint64_t trial_seed = trial_root.child(t).seed();
    const DiscreteAllocation alloc = args.mechanism == 3
                                         ? mechanism3(declared, trial_seed)
                                         : mechanism4(declared, trial_seed);
    json declared_values = json::array();
    json true_values = json::array();
    for (size_t i = 0; i < k; ++i) {
      const int64_t dv = owned_value(declared, alloc, i, i);
      const int64_t tv = owned_value(true_profile, alloc, i, i);
      declared_values.push_back(dv);
      true_values.push_back(tv);
      sum[i] += Integer(tv);
      if (t == 0 || tv < min_value[i]) min_value[i] = tv;
      if (truthful[i] && Rational(Integer(tv)) < floors[i]) {
        floor_ok[i] = false;
        ++violations;
      }
    }
    json run{{"trial", t + 1},
             {"allocation", to_json(alloc)},
             {"declared_values", std::move(declared_values)},
             {"true_values", std::move(true_values)}};
    if (args.mechanism == 4) run["superfair_accepted"] = mechanism4_accepted(alloc);
    runs.push_back(std::move(run));
  }

  json aggregate{{"floor_violations", violations}};
  json mean = json::array(), minv = json::array(), floor_list = json::array(),
       truthful_list = json::array(), ok_list = json::array();
  for (size_t i = 0; i < k; ++i) {
    mean.push_back(format_rational(sum[i] / Integer(args.trials)));
    minv.push_back(min_value[i]);
    floor_list.push_back(format_rational(floors[i]));
    truthful_list.push_back(static_cast<bool>(truthful[i]));
    if (truthful[i])
      ok_list.push_back(floor_ok[i]);
    else
      ok_list.push_back(nullptr);
  }
  aggregate["mean_true_value"] = std::move(mean);
  aggregate["min_true_value"] = std::move(minv);
  aggregate["floor"] = std::move(floor_list);
  aggregate["truthful"] = std::move(truthful_list);
  aggregate["floor_ok"] = std::move(ok_list);

  emit(json{{"command", "discrete run"},
            {"mechanism", args.mechanism},
            {"seed", args.seed},
            {"trials", args.trials},
            {"epsilon_scale", format_rational(regime_epsilon(true_profile))},
            {"runs", std::move(runs)},
            {"aggregate", std::move(aggregate)}});
}

// ---------------------------------------------------------------------------
// realize
// ---------------------------------------------------------------------------

struct RealizeArgs {
  std::string profile_path;
  std::string fractions_path;
  std::string scheme = "random";
  uint64_t seed = 0;
};

void run_realize(const RealizeArgs& args) {
  const DiscreteProfile profile = profile_from_json(load_json(args.profile_path), "profile");
  const FractionMatrix fractions =
      fractions_from_json(load_json(args.fractions_path), "fractions");

  const DiscreteAllocation alloc = args.scheme == "random"
                                       ? random_scheme(profile, fractions, args.seed)
                                       : binned_scheme(profile, fractions, args.seed);

  json realized = json::array();
  for (size_t i = 0; i < profile.players(); ++i) {
    json row = json::array();
    for (size_t p = 0; p < fractions.parts(); ++p)
      row.push_back(owned_value(profile, alloc, i, p));
    realized.push_back(std::move(row));
  }

  emit(json{{"command", "realize"},
            {"scheme", args.scheme},
            {"seed", args.seed},
            {"epsilon_scale", format_rational(regime_epsilon(profile))},
            {"allocation", to_json(alloc)},
            {"realized_values", std::move(realized)},
            {"target_values", to_json(extension_value(profile, fractions))}});
}

// ---------------------------------------------------------------------------
// bins
// ---------------------------------------------------------------------------

void run_bins(const std::string& declared_path) {
  const DiscreteProfile declared = profile_from_json(load_json(declared_path), "declared");
  json bins = json::array();
  for (const auto& bin : bin_goods(declared)) {
    json goods = json::array();
    for (size_t j : bin.members) goods.push_back(j + 1);
    bins.push_back(json{{"signature", bin.signature}, {"goods", std::move(goods)}});
  }
  emit(json{{"command", "bins"}, {"bins", std::move(bins)}});
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

struct AuditArgs {
  std::string mechanism;
  std::string instance_path;
  std::string deviations_path;
  uint64_t trials = 1000;
  uint64_t seed = 0;
  std::string format = "json";
  std::string halting = "1/2";
  uint64_t cutoff = 12;
  uint64_t max_atoms = 1'000'000;
};

json stats_to_json(const audit::RiskEnvyStats& stats) {
  json mean = json::array(), variance = json::array(), minv = json::array(),
       maxv = json::array(), floor = json::array(), truthful = json::array();
  for (size_t i = 0; i < stats.mean.size(); ++i) {
    mean.push_back(format_rational(stats.mean[i]));
    variance.push_back(format_rational(stats.variance[i]));
    minv.push_back(format_rational(stats.min_value[i]));
    maxv.push_back(format_rational(stats.max_value[i]));
    floor.push_back(format_rational(stats.floor[i]));
    truthful.push_back(static_cast<bool>(stats.truthful[i]));
  }
  json out{{"label", "sampled"},
           {"trials", stats.trials},
           {"mean", std::move(mean)},
           {"variance", std::move(variance)},
           {"min", std::move(minv)},
           {"max", std::move(maxv)},
           {"truthful", std::move(truthful)},
           {"floor", std::move(floor)},
           {"floor_violations", stats.floor_violations},
           {"max_envy", format_rational(stats.max_envy)},
           {"accepted_runs", stats.accepted_runs}};
  if (stats.envy_reference > 0) out["envy_reference"] = stats.envy_reference;
  return out;
}

json sweep_to_json(const audit::SweepOutcome& sweep) {
  json out{{"status", sweep.truthful ? "truthful" : "violated"},
           {"player", sweep.player + 1},
           {"truthful_value", format_rational(sweep.truthful_value)}};
  if (sweep.witness) {
    out["witness"] = *sweep.witness + 1;
    out["witness_value"] = format_rational(sweep.witness_value);
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json rational_list(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(format_rational(v));
  return out;
}

void print_table(const json& out, std::ostream& os, const std::string& prefix = "") {
  if (out.is_object()) {
    for (const auto& [key, value] : out.items()) {
      if (value.is_object() || value.is_array())
        print_table(value, os, prefix.empty() ? key : prefix + "." + key);
      else
        os << (prefix.empty() ? key : prefix + "." + key) << ": " << value.dump() << "\n";
    }
  } else if (out.is_array()) {
    for (size_t i = 0; i < out.size(); ++i)
      print_table(out[i], os, prefix + "[" + std::to_string(i) + "]");
  } else {
    os << prefix << ": " << out.dump() << "\n";
  }
}

void run_audit(const AuditArgs& args) {
  json out{{"command", "audit"}, {"seed", args.seed}};

  if (args.mechanism == "demo") {
    const auto report = audit::impossibility_demo();
    out["mechanism"] = "demo";
    out["report"] = json{
        {"common_declaration", to_json(report.common_declaration)},
        {"concentrated_truth", to_json(report.concentrated_truth)},
        {"equal_split", to_json(report.equal_split)},
        {"superfair_split", to_json(report.superfair_split)},
        {"lying_utility", format_rational(report.lying_utility)},
        {"truthful_utility", format_rational(report.truthful_utility)},
        {"lie_strictly_profitable", report.lie_strictly_profitable}};
    if (args.format == "table")
      print_table(out, std::cout);
    else
      emit(out);
    return;
  }

  const int mechanism = std::stoi(args.mechanism);
  out["mechanism"] = mechanism;
  out["trials"] = args.trials;
  if (args.instance_path.empty())
    throw std::invalid_argument("--instance is required for mechanisms 1-4");
  const json instance = load_json(args.instance_path);
  const audit::EnumerationLimits limits{args.max_atoms, args.cutoff};
  const Rational halting = parse_rational_arg(args.halting, "--halting");

  if (mechanism == 1 || mechanism == 2) {
    if (!instance.is_object() || !instance.contains("true"))
      throw std::invalid_argument("instance: expected {\"true\": [measures], \"declared\": [measures]?}");
    const auto true_measures = measures_from_json(instance["true"], "instance.true");
    auto declared = true_measures;
    if (instance.contains("declared"))
      declared = measures_from_json(instance["declared"], "instance.declared");
    if (declared.size() != true_measures.size())
      throw std::invalid_argument("instance: true and declared measure counts differ");

    if (mechanism == 1) {
      out["expectations"] = json{
          {"label", "exact"},
          {"values", rational_list(audit::exact_expectation_mechanism1(true_measures, declared))}};
    } else {
      const auto bands =
          audit::exact_expectation_mechanism2(true_measures, declared, halting, limits);
      json lower = json::array(), upper = json::array();
      for (const auto& band : bands.bands) {
        lower.push_back(format_rational(band.lower));
        upper.push_back(format_rational(band.upper));
      }
      out["expectations"] = json{{"label", bands.tail_rejects ? "exact" : "bracket"},
                                 {"truncated", rational_list(bands.truncated)},
                                 {"lower", std::move(lower)},
                                 {"upper", std::move(upper)},
                                 {"tail_rejects", bands.tail_rejects},
                                 {"accepted_mass", format_rational(bands.accepted_mass)},
                                 {"denominator_cutoff", args.cutoff}};
    }
    out["statistics"] = stats_to_json(audit::risk_and_envy_stats_continuous(
        mechanism, true_measures, declared, args.trials, args.seed, halting));

    if (!args.deviations_path.empty()) {
      const json dev = load_json(args.deviations_path);
      if (!dev.is_object() || !dev.contains("player") || !dev.contains("measures"))
        throw std::invalid_argument(
            "deviations: expected {\"player\": int, \"measures\": [...]}");
      const size_t player = dev["player"].get<size_t>() - 1;
      const auto grid = measures_from_json(dev["measures"], "deviations.measures");
      if (mechanism == 2) {
        out["truthfulness"] = sweep_to_json(audit::truthfulness_sweep_mechanism2(
            true_measures, player, grid, halting, limits));
      } else {
        out["truthfulness"] = sweep_to_json(
            audit::truthfulness_sweep_mechanism1(true_measures, player, grid));
      }
    }
  } else if (mechanism == 3 || mechanism == 4) {
    if (!instance.is_object() || !instance.contains("M") || !instance.contains("true"))
      throw std::invalid_argument(
          "instance: expected {\"M\": int, \"true\": [[...]], \"declared\": [[...]]?}");
    const DiscreteProfile true_profile = profile_from_json(
        json{{"M", instance["M"]}, {"utilities", instance["true"]}}, "instance.true");
    DiscreteProfile declared = true_profile;
    if (instance.contains("declared"))
      declared = profile_from_json(
          json{{"M", instance["M"]}, {"utilities", instance["declared"]}},
          "instance.declared");
    if (declared.players() != true_profile.players() ||
        declared.goods() != true_profile.goods())
      throw std::invalid_argument("instance: true and declared shapes differ");

    if (mechanism == 3) {
      out["expectations"] = json{
          {"label", "exact"},
          {"values", rational_list(audit::exact_expectation_mechanism3(true_profile, declared))}};
    } else {
      try {
        const auto exact = audit::exact_expectation_mechanism4(true_profile, declared, limits);
        out["expectations"] = json{{"label", "exact"},
                                   {"values", rational_list(exact.values)},
                                   {"accepted_mass", format_rational(exact.accepted_mass)}};
      } catch (const std::invalid_argument& e) {
        out["expectations"] = json{{"label", "skipped"}, {"reason", e.what()}};
      }
    }
    out["statistics"] = stats_to_json(audit::risk_and_envy_stats_discrete(
        mechanism, true_profile, declared, args.trials, args.seed));

    if (!args.deviations_path.empty()) {
      const json dev = load_json(args.deviations_path);
      if (!dev.is_object() || !dev.contains("player"))
        throw std::invalid_argument("deviations: expected {\"player\": int, ...}");
      const size_t player = dev["player"].get<size_t>() - 1;
      std::vector<std::vector<int64_t>> rows;
      if (dev.value("exhaustive", false)) {
        rows = audit::all_declaration_rows(true_profile.utility_cap(), true_profile.goods(),
                                           args.max_atoms);
      } else if (dev.contains("declarations")) {
        rows = dev["declarations"].get<std::vector<std::vector<int64_t>>>();
      } else {
        throw std::invalid_argument(
            "deviations: expected \"declarations\" rows or \"exhaustive\": true");
      }
      out["truthfulness"] = sweep_to_json(
          mechanism == 3
              ? audit::truthfulness_sweep_mechanism3(true_profile, player, rows)
              : audit::truthfulness_sweep_mechanism4(true_profile, player, rows, limits));
    }
  } else {
    throw std::invalid_argument("--mechanism must be 1, 2, 3, 4 or demo");
  }

  if (args.format == "table")
    print_table(out, std::cout);
  else
    emit(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truthful fair division: mechanisms, realization schemes, audits"};
  app.require_subcommand(1);

  // continuous run
  auto* continuous = app.add_subcommand("continuous", "continuous cake mechanisms");
  continuous->require_subcommand(1);
  ContinuousRunArgs cont_args;
  auto* cont_run = continuous->add_subcommand("run", "run mechanism 1 or 2");
  cont_run->add_option("--mechanism", cont_args.mechanism, "1 or 2")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  cont_run->add_option("--declared", cont_args.declared_path, "declared measures JSON")
      ->required();
  cont_run->add_option("--true", cont_args.true_path, "true measures JSON");
  cont_run->add_option("--seed", cont_args.seed, "master RNG seed")
      ->envname("FAIRDIV_SEED");
  cont_run->add_option("--halting", cont_args.halting,
                       "sampler halting probability (mechanism 2)");

  // discrete run
  auto* discrete = app.add_subcommand("discrete", "indivisible-goods mechanisms");
  discrete->require_subcommand(1);
  DiscreteRunArgs disc_args;
  auto* disc_run = discrete->add_subcommand("run", "run mechanism 3 or 4");
  disc_run->add_option("--mechanism", disc_args.mechanism, "3 or 4")
      ->required()
      ->check(CLI::IsMember({3, 4}));
  disc_run->add_option("--declared", disc_args.declared_path, "declared profile JSON")
      ->required();
  disc_run->add_option("--true", disc_args.true_path, "true profile JSON");
  disc_run->add_option("--seed", disc_args.seed, "master RNG seed")
      ->envname("FAIRDIV_SEED");
  disc_run->add_option("--trials", disc_args.trials, "number of seeded trials");

  // realize
  RealizeArgs realize_args;
  auto* realize_cmd =
      app.add_subcommand("realize", "turn a fractional ownership matrix into goods");
  realize_cmd->add_option("--profile", realize_args.profile_path, "profile JSON")
      ->required();
  realize_cmd->add_option("--fractions", realize_args.fractions_path, "fraction matrix JSON")
      ->required();
  realize_cmd->add_option("--scheme", realize_args.scheme, "random or binned")
      ->required()
      ->check(CLI::IsMember({"random", "binned"}));
  realize_cmd->add_option("--seed", realize_args.seed, "master RNG seed")
      ->envname("FAIRDIV_SEED");

  // audit
  AuditArgs audit_args;
  auto* audit_cmd = app.add_subcommand("audit", "expectations, risk, truthfulness");
  audit_cmd->add_option("--mechanism", audit_args.mechanism, "1, 2, 3, 4 or demo")
      ->required()
      ->check(CLI::IsMember({"1", "2", "3", "4", "demo"}));
  audit_cmd->add_option("--instance", audit_args.instance_path, "instance JSON");
  audit_cmd->add_option("--deviations", audit_args.deviations_path, "deviation space JSON");
  audit_cmd->add_option("--trials", audit_args.trials, "sampled trials");
  audit_cmd->add_option("--seed", audit_args.seed, "master RNG seed")
      ->envname("FAIRDIV_SEED");
  audit_cmd->add_option("--format", audit_args.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  audit_cmd->add_option("--halting", audit_args.halting, "sampler halting probability");
  audit_cmd->add_option("--cutoff", audit_args.cutoff, "sampler denominator cutoff");
  audit_cmd->add_option("--max-atoms", audit_args.max_atoms,
                        "largest outcome space enumerated exactly");

  // bins
  std::string bins_declared;
  auto* bins_cmd = app.add_subcommand("bins", "print the declared-utility binning");
  bins_cmd->add_option("--declared", bins_declared, "declared profile JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (cont_run->parsed()) run_continuous(cont_args);
    if (disc_run->parsed()) run_discrete(disc_args);
    if (realize_cmd->parsed()) run_realize(realize_args);
    if (audit_cmd->parsed()) run_audit(audit_args);
    if (bins_cmd->parsed()) run_bins(bins_declared);
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
