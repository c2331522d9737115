#ifndef PAN_REPORT_JSON_HPP
#define PAN_REPORT_JSON_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "pan/estimators.hpp"
#include "pan/evaluation.hpp"
#include "pan/simulation.hpp"
#include "pan/theory.hpp"
#include "pan/tuning.hpp"

namespace pan {

using Json = nlohmann::ordered_json;

// Every emitted document carries a provenance block: tool version, the seed in
// effect, and a hash of the resolved configuration, so a run can be replayed.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_digest;
};

std::string fnv1a_digest(const std::string& text);
Json provenance_json(const Provenance& prov);

Json fit_report_json(const PanFit& fit, const std::vector<std::string>& names,
                     double prediction, const Provenance& prov);
Json tuning_report_json(const TuningResult& result, const Provenance& prov);
Json evaluation_report_json(const EvaluationReport& report,
                            const std::vector<std::string>& names, const Provenance& prov);
Json simulation_report_json(const SimulationReport& report);
Json simulation_report_json(const SimulationReport& report, const Provenance& prov);
Json theory_report_json(const std::vector<McMsePoint>& curve, const Provenance& prov);

std::string version_string();

}  // namespace pan

#endif
