#ifndef ALGOEVO_TRACE_JSON_HPP
#define ALGOEVO_TRACE_JSON_HPP

#include <string>

#include <json.hpp>

#include "algoevo/evolve.hpp"

namespace algoevo {

// Key order is fixed (ordered_json) so identical runs serialize to
// identical bytes.
using json = nlohmann::ordered_json;

inline json config_to_json(const EvolutionConfig& cfg) {
  json j;
  j["strategy"] = strategy_name(cfg.strategy.kind);
  j["epsilon"] = cfg.strategy.epsilon;
  j["block_size"] = cfg.strategy.block_size;
  j["bdm_block_size"] = cfg.strategy.bdm_block_size;
  j["shifts"] = cfg.shifts;
  j["replacement"] = cfg.replacement;
  j["extinction_threshold"] = cfg.extinction_threshold;
  j["convergence_alpha"] = cfg.convergence_alpha;
  j["seed"] = cfg.seed;
  return j;
}

inline EvolutionConfig config_from_json(const json& j) {
  EvolutionConfig cfg;
  cfg.strategy.kind = parse_strategy_kind(j.at("strategy").get<std::string>());
  cfg.strategy.epsilon = j.at("epsilon").get<double>();
  cfg.strategy.block_size = j.at("block_size").get<int>();
  cfg.strategy.bdm_block_size = j.at("bdm_block_size").get<int>();
  cfg.shifts = j.at("shifts").get<int>();
  cfg.replacement = j.at("replacement").get<bool>();
  cfg.extinction_threshold = j.at("extinction_threshold").get<std::int64_t>();
  cfg.convergence_alpha = j.at("convergence_alpha").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

inline json trace_to_json(const EvolutionTrace& trace,
                          const EvolutionConfig& cfg) {
  json j;
  j["config"] = config_to_json(cfg);
  j["initial"] = trace.initial.to_bitstring();
  j["target"] = trace.target.to_bitstring();
  j["size"] = trace.initial.size();
  json instances = json::array();
  for (const auto& inst : trace.instances) {
    json row;
    row["steps"] = inst.steps;
    row["fitness_after"] = inst.fitness_after;
    instances.push_back(std::move(row));
  }
  j["instances"] = std::move(instances);
  j["terminal"] =
      trace.terminal == RunTerminal::converged ? "converged" : "extinct";
  j["total_steps"] = trace.total_steps;
  j["final"] = trace.final_matrix.to_bitstring();
  return j;
}

}  // namespace algoevo

#endif  // ALGOEVO_TRACE_JSON_HPP
