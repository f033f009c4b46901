#include <algorithm>
#include <cctype>

#include "yieldopt/errors.hpp"
#include "yieldopt/optimize.hpp"

namespace yieldopt {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::v1_dfo_ref: return "V1dfo-ref";
    case Strategy::v2_mix_na: return "V2mix-na";
    case Strategy::v3_mix_a: return "V3mix-a";
    case Strategy::v4_mix_ha: return "V4mix-ha";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& text) {
  std::string lower;
  for (char c : text) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "v1" || lower == "v1dfo-ref") return Strategy::v1_dfo_ref;
  if (lower == "v2" || lower == "v2mix-na") return Strategy::v2_mix_na;
  if (lower == "v3" || lower == "v3mix-a") return Strategy::v3_mix_a;
  if (lower == "v4" || lower == "v4mix-ha") return Strategy::v4_mix_ha;
  throw ConfigurationError("unknown strategy '" + text + "' (expected v1, v2, v3 or v4)");
}

std::vector<RunRecord> compare_strategies(const YieldProblem& problem,
                                          const OptimizerConfig& config,
                                          const std::vector<Strategy>& strategies) {
  std::vector<RunRecord> records;
  for (Strategy s : strategies) {
    const auto index = static_cast<std::uint32_t>(s) + 1;
    try {
      if (s == Strategy::v1_dfo_ref) {
        records.push_back(nelder_mead_reference(problem, config, index));
      } else {
        NewtonOptions options;
        options.adaptive = s != Strategy::v2_mix_na;
        options.hybrid = s == Strategy::v4_mix_ha;
        options.strategy_index = index;
        options.name = strategy_name(s);
        records.push_back(newton_mixed(problem, config, options));
      }
    } catch (const std::exception& e) {
      RunRecord failed;
      failed.strategy = strategy_name(s);
      failed.status = RunStatus::failed;
      failed.message = e.what();
      failed.optimum = problem.initial_point();
      records.push_back(std::move(failed));
    }
  }
  return records;
}

}  // namespace yieldopt
