#include "pan/report_json.hpp"

#include <cstdio>

namespace pan {

std::string version_string() { return "panreg 0.1.0"; }

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json provenance_json(const Provenance& prov) {
  Json j;
  j["tool"] = version_string();
  j["command"] = prov.command;
  j["seed"] = prov.seed;
  j["config_digest"] = prov.config_digest;
  return j;
}

Json fit_report_json(const PanFit& fit, const std::vector<std::string>& names,
                     double prediction, const Provenance& prov) {
  Json j;
  j["provenance"] = provenance_json(prov);
  j["method"] = method_name(fit.method);
  j["lambda1"] = fit.lambda1;
  j["lambda2"] = fit.lambda2;
  Json coef = Json::object();
  for (std::size_t k = 0; k < fit.beta_hat.beta.size(); ++k) {
    const std::string key = k < names.size() ? names[k] : "x" + std::to_string(k + 1);
    coef[key] = fit.beta_hat.beta[k];
  }
  j["coefficients"] = coef;
  j["prediction"] = prediction;
  j["diagnostics"] = {{"cosine_similarity", fit.cos_sim},
                      {"shrinkage_factor", fit.shrinkage_factor},
                      {"c_value", fit.c_value},
                      {"reference_prediction", fit.reference_prediction}};
  return j;
}

Json tuning_report_json(const TuningResult& result, const Provenance& prov) {
  Json j;
  j["provenance"] = provenance_json(prov);
  j["selected"] = {{"lambda1", result.lambda1}, {"lambda2", result.lambda2}};
  j["sigma_hat"] = result.sigma_hat;
  j["bootstrap_samples"] = result.bootstrap_samples;
  j["fit_failures"] = result.fit_failures;
  j["lambda1_axis"] = result.lambda1_axis;
  j["lambda2_axis"] = result.lambda2_axis;
  Json surf = Json::array();
  for (std::size_t a = 0; a < result.lambda1_axis.size(); ++a) {
    Json row = Json::array();
    for (std::size_t b = 0; b < result.lambda2_axis.size(); ++b)
      row.push_back(result.mse_surface(a, b));
    surf.push_back(row);
  }
  j["mse_surface"] = surf;
  return j;
}

Json evaluation_report_json(const EvaluationReport& report,
                            const std::vector<std::string>& names, const Provenance& prov) {
  Json j;
  j["provenance"] = provenance_json(prov);
  j["method"] = method_name(report.method);
  j["lambda1"] = report.lambda1;
  j["lambda2"] = report.lambda2;
  j["metric"] = report.metric_name;
  j["value"] = report.value;
  if (!report.per_observation.empty()) {
    Json rows = Json::array();
    for (const ObservationRow& r : report.per_observation) {
      Json row;
      row["observation"] = r.index;
      row["cosine_similarity"] = r.cos_sim;
      row["ols_prediction"] = r.ols_prediction;
      row["pan_prediction"] = r.pan_prediction;
      Json coef = Json::object();
      for (std::size_t k = 0; k < r.coefficients.size(); ++k) {
        const std::string key = k < names.size() ? names[k] : "x" + std::to_string(k + 1);
        coef[key] = r.coefficients[k];
      }
      row["coefficients"] = coef;
      rows.push_back(row);
    }
    j["per_observation"] = rows;
  }
  return j;
}

Json simulation_report_json(const SimulationReport& report) {
  return simulation_report_json(report, Provenance{"simulate", report.config.seed, ""});
}

Json simulation_report_json(const SimulationReport& report, const Provenance& prov) {
  Json j;
  j["provenance"] = provenance_json(prov);
  const SimulationConfig& c = report.config;
  j["config"] = {{"n", c.n},
                 {"p", c.p},
                 {"sigma", c.sigma},
                 {"beta_values", c.beta_values},
                 {"replications", c.replications},
                 {"test_size", c.test_size},
                 {"bootstrap_samples", c.bootstrap_samples},
                 {"seed", c.seed}};
  Json methods = Json::array();
  for (std::size_t m = 0; m < c.methods.size(); ++m) {
    Json jm;
    jm["method"] = sim_method_name(c.methods[m]);
    Json cols = Json::array();
    for (std::size_t b = 0; b < c.beta_values.size(); ++b) {
      const SimulationCell& cell = report.cells[m][b];
      cols.push_back({{"beta", c.beta_values[b]},
                      {"mse", cell.mse},
                      {"std_error", cell.std_error},
                      {"failures", cell.failures}});
    }
    jm["cells"] = cols;
    methods.push_back(jm);
  }
  j["methods"] = methods;
  j["wall_seconds"] = report.wall_seconds;
  return j;
}

Json theory_report_json(const std::vector<McMsePoint>& curve, const Provenance& prov) {
  Json j;
  j["provenance"] = provenance_json(prov);
  Json pts = Json::array();
  for (const McMsePoint& pt : curve) {
    pts.push_back({{"lambda2", pt.lambda2},
                   {"mse", pt.mse},
                   {"std_error", pt.std_error},
                   {"diff_vs_first", pt.diff_vs_first},
                   {"diff_std_error", pt.diff_std_error}});
  }
  j["curve"] = pts;
  return j;
}

}  // namespace pan
