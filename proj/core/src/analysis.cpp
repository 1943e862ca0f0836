#include "covtree/analysis.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "rng.hpp"

namespace covtree {

namespace {

using ordered_json = nlohmann::ordered_json;

// Replays the per-pass DNF snapshots: current formula per location after each
// log record.
std::vector<std::map<std::string, Interaction>> replay_log(const ConfigSpace& space,
                                                           const EngineResult& result) {
  std::vector<std::map<std::string, Interaction>> states;
  std::map<std::string, Interaction> current;
  for (const IterationRecord& rec : result.log) {
    for (const auto& [location, info] : rec.rebuilt) {
      current.insert_or_assign(location, parse_formula(info.formula_dnf, space));
    }
    states.push_back(current);
  }
  return states;
}

std::size_t count_exact(const std::map<std::string, Interaction>& inferred,
                        const GroundTruth& truth, const ConfigSpace& space) {
  std::size_t exact = 0;
  for (const auto& [location, formula] : truth.interactions) {
    auto it = inferred.find(location);
    if (it != inferred.end() && equivalent(it->second, formula, space)) ++exact;
  }
  return exact;
}

ordered_json space_json(const ConfigSpace& space) {
  ordered_json options = ordered_json::array();
  for (const OptionDef& opt : space.options()) {
    options.push_back({{"name", opt.name}, {"values", opt.values}});
  }
  return ordered_json{{"fingerprint", space.fingerprint()}, {"options", std::move(options)}};
}

ordered_json interaction_json(const ConfigSpace& space, const Interaction& formula) {
  return ordered_json{{"formula", render_formula(formula, space)},
                      {"form", std::string(to_string(classify_form(formula)))},
                      {"length", length(formula)}};
}

}  // namespace

GroundTruth ground_truth(const ConfigSpace& space, const Runner& runner, std::uint64_t cap) {
  const auto size = space.exact_size();
  if (!size || *size > cap) {
    throw std::invalid_argument("configuration space exceeds the enumeration cap (" +
                                std::to_string(cap) + ")");
  }
  GroundTruth truth;
  truth.space_size = *size;

  CoverageCache cache;
  ConfigEnumerator it(space);
  std::vector<Configuration> batch;
  const std::size_t batch_size = 4096;
  std::size_t failures = 0;
  auto flush = [&]() {
    if (batch.empty()) return;
    failures += run_configs(runner, space, cache, batch).errors.size();
    batch.clear();
  };
  while (auto c = it.next()) {
    batch.push_back(std::move(*c));
    if (batch.size() >= batch_size) flush();
  }
  flush();
  if (failures) {
    throw RunnerError(std::to_string(failures) + " configurations failed during exhaustive run");
  }

  for (const auto& [config, cov] : cache.entries()) {
    const std::uint64_t rank = config_rank(space, config);
    for (const std::string& location : cov) {
      auto [entry, inserted] = truth.covering.try_emplace(location);
      if (inserted) entry->second.assign(truth.space_size, false);
      entry->second[rank] = true;
    }
  }
  for (const auto& [location, table] : truth.covering) {
    truth.interactions.emplace(location, exact_characterization(space, table));
  }
  return truth;
}

CompareResult compare(const std::map<std::string, Interaction>& inferred,
                      const GroundTruth& truth, const ConfigSpace& space) {
  return compare_maps(inferred, truth.interactions, space);
}

CompareResult compare_maps(const std::map<std::string, Interaction>& inferred,
                           const std::map<std::string, Interaction>& truth,
                           const ConfigSpace& space) {
  CompareResult out;
  out.total = truth.size();
  out.delta_cov = static_cast<long long>(inferred.size()) - static_cast<long long>(truth.size());
  for (const auto& [location, formula] : truth) {
    auto it = inferred.find(location);
    if (it != inferred.end() && equivalent(it->second, formula, space)) {
      ++out.exact;
    } else {
      out.inexact.push_back(location);
    }
  }
  return out;
}

std::map<std::string, Interaction> random_baseline(const ConfigSpace& space, const Runner& runner,
                                                   std::size_t n_configs, std::uint64_t seed) {
  if (n_configs < 1) throw std::invalid_argument("random_baseline needs n_configs >= 1");
  const auto size = space.exact_size();

  std::vector<Configuration> sample;
  if (size && n_configs >= *size) {
    enumerate_all(space, [&](const Configuration& c) { sample.push_back(c); });
  } else {
    detail::Rng rng(seed);
    std::unordered_set<Configuration, ConfigurationHash> chosen;
    while (chosen.size() < n_configs) {
      std::vector<ValueIndex> values(space.option_count());
      for (std::size_t o = 0; o < space.option_count(); ++o) {
        values[o] = static_cast<ValueIndex>(rng.below(space.domain_size(o)));
      }
      Configuration c(std::move(values));
      if (chosen.insert(c).second) sample.push_back(std::move(c));
    }
  }

  CoverageCache cache;
  run_configs(runner, space, cache, sample);

  std::map<std::string, Interaction> out;
  std::vector<Configuration> hits, misses;
  for (const std::string& location : cache.covered_locations()) {
    cache.partition(location, hits, misses);
    out.emplace(location,
                canonicalize(from_tree(build_tree(hits, misses, space)), space).formula);
  }
  return out;
}

MinCoverResult min_covering_configs(const std::map<std::string, Interaction>& interactions,
                                    const ConfigSpace& space) {
  struct Group {
    Interaction formula;
    std::vector<std::string> locations;
  };
  std::map<std::string, Group> by_key;
  MinCoverResult out;
  for (const auto& [location, formula] : interactions) {
    const Interaction canon = canonicalize(formula, space).formula;
    if (canon.is_false()) {
      out.unsatisfiable.push_back(location);
      continue;
    }
    auto [it, inserted] = by_key.try_emplace(render_formula(canon, space));
    if (inserted) it->second.formula = canon;
    it->second.locations.push_back(location);
  }

  std::vector<const Group*> order;
  order.reserve(by_key.size());
  for (const auto& [key, group] : by_key) order.push_back(&group);
  std::stable_sort(order.begin(), order.end(), [](const Group* a, const Group* b) {
    if (a->locations.size() != b->locations.size()) {
      return a->locations.size() > b->locations.size();
    }
    return a->locations.front() < b->locations.front();
  });

  std::vector<bool> covered(order.size(), false);
  std::size_t remaining = order.size();
  while (remaining) {
    std::vector<Interaction> conjuncts;
    for (std::size_t g = 0; g < order.size(); ++g) {
      if (covered[g]) continue;
      std::vector<Interaction> candidate = conjuncts;
      candidate.push_back(order[g]->formula);
      if (satisfiable(Interaction::conj(std::move(candidate)), space)) {
        conjuncts.push_back(order[g]->formula);
      }
    }
    const Configuration config =
        find_satisfying(Interaction::conj(std::move(conjuncts)), space).value();
    for (std::size_t g = 0; g < order.size(); ++g) {
      if (!covered[g] && order[g]->formula.evaluate(config)) {
        covered[g] = true;
        --remaining;
      }
    }
    out.configs.push_back(config);
  }
  return out;
}

RunReport make_report(const ConfigSpace& space, const EngineResult& result,
                      const GroundTruth* truth) {
  RunReport report;
  report.configs = result.executions;
  report.locations = result.interactions.size();

  std::map<std::string, const Interaction*> distinct;
  for (const auto& [location, formula] : result.interactions) {
    distinct.emplace(render_formula(formula, space), &formula);
  }
  report.interactions_total = distinct.size();
  std::vector<std::size_t> lengths;
  for (const auto& [key, formula] : distinct) {
    switch (classify_form(*formula)) {
      case FormClass::Single: ++report.single; break;
      case FormClass::Conj: ++report.conj; break;
      case FormClass::Disj: ++report.disj; break;
      case FormClass::Mixed: ++report.mixed; break;
    }
    lengths.push_back(length(*formula));
  }
  if (!lengths.empty()) {
    std::sort(lengths.begin(), lengths.end());
    report.max_length = lengths.back();
    const std::size_t n = lengths.size();
    report.median_length = n % 2 ? static_cast<double>(lengths[n / 2])
                                 : (static_cast<double>(lengths[n / 2 - 1]) +
                                    static_cast<double>(lengths[n / 2])) /
                                       2.0;
  }

  if (truth) {
    report.has_truth = true;
    const CompareResult cmp = compare(result.interactions, *truth, space);
    report.exact = cmp.exact;
    report.truth_total = cmp.total;
    report.delta_cov = cmp.delta_cov;
    const auto states = replay_log(space, result);
    for (std::size_t i = 0; i < states.size(); ++i) {
      report.convergence.emplace_back(result.log[i].executions_after,
                                      count_exact(states[i], *truth, space));
    }
  }
  return report;
}

std::map<std::string, LocationStats> discovery_stats(const ConfigSpace& space,
                                                     const EngineResult& result) {
  std::map<std::string, LocationStats> out;
  for (const auto& [location, final_formula] : result.interactions) {
    LocationStats stats;
    bool settled = false;
    for (const IterationRecord& rec : result.log) {
      auto it = rec.rebuilt.find(location);
      if (it == rec.rebuilt.end()) continue;
      const bool eq = equivalent(parse_formula(it->second.formula_dnf, space), final_formula, space);
      if (eq && !settled) {
        stats.iteration_found = rec.pass;
        stats.configs_at_found = it->second.executions;
        settled = true;
      } else if (!eq) {
        settled = false;
      }
    }
    out.emplace(location, stats);
  }
  return out;
}

std::string result_json(const ConfigSpace& space, const std::string& runner_desc,
                        const EngineParams& params, const EngineResult& result,
                        const RunReport& report, std::uint64_t wall_ms) {
  ordered_json doc;
  doc["schema"] = "covtree-result-v1";
  doc["space"] = space_json(space);
  doc["runner"] = runner_desc;
  doc["params"] = ordered_json{{"seed", params.seed},
                               {"max_explore_iters", params.max_explore_iters},
                               {"min_new_configs", params.min_new_configs},
                               {"budget", params.config_budget ? ordered_json(*params.config_budget)
                                                               : ordered_json(nullptr)},
                               {"initial_configs", params.initial_configs.size()}};

  const auto stats = discovery_stats(space, result);
  ordered_json interactions = ordered_json::object();
  for (const auto& [location, formula] : result.interactions) {
    ordered_json entry = interaction_json(space, formula);
    const auto it = stats.find(location);
    entry["iteration_found"] = it == stats.end() ? 0 : it->second.iteration_found;
    entry["configs_at_found"] = it == stats.end() ? 0 : it->second.configs_at_found;
    entry["tree"] = result.trees.at(location).dump(space);
    interactions[location] = std::move(entry);
  }
  doc["interactions"] = std::move(interactions);

  doc["totals"] = ordered_json{{"configs", result.executions},
                               {"iterations", result.log.size()},
                               {"locations", result.interactions.size()},
                               {"budget_exhausted", result.budget_exhausted}};
  ordered_json rep{{"interactions_total", report.interactions_total},
                   {"single", report.single},
                   {"conj", report.conj},
                   {"disj", report.disj},
                   {"mixed", report.mixed},
                   {"max_length", report.max_length},
                   {"median_length", report.median_length}};
  if (report.has_truth) {
    rep["exact"] = report.exact;
    rep["truth_total"] = report.truth_total;
    rep["delta_cov"] = report.delta_cov;
  }
  doc["report"] = std::move(rep);
  doc["wall_ms"] = wall_ms;
  return doc.dump(2) + "\n";
}

std::string truth_json(const ConfigSpace& space, const std::string& runner_desc,
                       const GroundTruth& truth, std::uint64_t wall_ms) {
  ordered_json doc;
  doc["schema"] = "covtree-result-v1";
  doc["space"] = space_json(space);
  doc["runner"] = runner_desc;
  doc["params"] = ordered_json{{"mode", "exhaustive"}};
  ordered_json interactions = ordered_json::object();
  for (const auto& [location, formula] : truth.interactions) {
    interactions[location] = interaction_json(space, formula);
  }
  doc["interactions"] = std::move(interactions);
  doc["totals"] = ordered_json{{"configs", truth.space_size},
                               {"locations", truth.interactions.size()}};
  doc["wall_ms"] = wall_ms;
  return doc.dump(2) + "\n";
}

LoadedResult load_result_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid result JSON: ") + e.what());
  }
  try {
    std::vector<OptionDef> options;
    for (const auto& opt : doc.at("space").at("options")) {
      options.push_back(OptionDef{opt.at("name").get<std::string>(),
                                  opt.at("values").get<std::vector<std::string>>()});
    }
    ConfigSpace space(std::move(options));
    std::map<std::string, Interaction> interactions;
    for (const auto& [location, entry] : doc.at("interactions").items()) {
      interactions.emplace(location,
                           parse_formula(entry.at("formula").get<std::string>(), space));
    }
    std::string fingerprint = doc.at("space").at("fingerprint").get<std::string>();
    return LoadedResult{std::move(space), std::move(fingerprint), std::move(interactions)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("result JSON missing fields: ") + e.what());
  }
}

std::string report_table(const RunReport& report) {
  std::ostringstream out;
  auto row = [&](std::string_view name, const std::string& value) {
    out << "  ";
    out << name;
    for (std::size_t i = name.size(); i < 20; ++i) out << ' ';
    out << value << '\n';
  };
  out << "run report\n";
  row("configs", std::to_string(report.configs));
  row("cov", std::to_string(report.locations));
  row("single", std::to_string(report.single));
  row("conj", std::to_string(report.conj));
  row("disj", std::to_string(report.disj));
  row("mix", std::to_string(report.mixed));
  row("total", std::to_string(report.interactions_total));
  row("len max", std::to_string(report.max_length));
  {
    std::ostringstream med;
    med << report.median_length;
    row("len median", med.str());
  }
  if (report.has_truth) {
    row("exact", std::to_string(report.exact) + " / " + std::to_string(report.truth_total));
    row("delta cov", std::to_string(report.delta_cov));
  }
  return out.str();
}

std::string iteration_csv(const ConfigSpace& space, const EngineResult& result,
                          const GroundTruth* truth) {
  std::ostringstream out;
  out << "iteration,explore,configs,rebuilt";
  if (truth) out << ",exact,total";
  out << '\n';
  const auto states = truth ? replay_log(space, result)
                            : std::vector<std::map<std::string, Interaction>>();
  for (std::size_t i = 0; i < result.log.size(); ++i) {
    const IterationRecord& rec = result.log[i];
    out << rec.pass << ',' << (rec.explore ? 1 : 0) << ',' << rec.executions_after << ','
        << rec.rebuilt.size();
    if (truth) {
      out << ',' << count_exact(states[i], *truth, space) << ',' << truth->interactions.size();
    }
    out << '\n';
  }
  return out.str();
}

std::string convergence_csv(const RunReport& report) {
  std::ostringstream out;
  out << "configs,exact,total\n";
  for (const auto& [configs, exact] : report.convergence) {
    out << configs << ',' << exact << ',' << report.truth_total << '\n';
  }
  return out.str();
}

}  // namespace covtree
