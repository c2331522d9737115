#include "pan/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "pan/config.hpp"
#include "pan/csv.hpp"
#include "pan/errors.hpp"
#include "pan/evaluation.hpp"
#include "pan/report_json.hpp"
#include "pan/simulation.hpp"
#include "pan/theory.hpp"
#include "pan/tuning.hpp"

namespace pan::cli {

namespace {

Vec parse_list(const std::string& text, const std::string& what) {
  Vec out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct LoadedData {
  Dataset data;           // preprocessed, ready to fit
  Vec column_sds;         // unit when not standardized
  Dataset raw;            // as ingested
};

LoadedData load_data(const std::string& path, const std::string& outcome,
                     const std::string& covariates, bool do_standardize, bool do_center) {
  LoadedData ld;
  ld.raw = ingest_csv(path, outcome, split_names(covariates));
  ld.column_sds.assign(ld.raw.p(), 1.0);
  if (do_standardize) {
    Dataset centered = center(ld.raw);
    ld.data = standardize(ld.raw);
    for (std::size_t j = 0; j < ld.raw.p(); ++j) {
      double ss = 0.0;
      for (std::size_t i = 0; i < ld.raw.n(); ++i)
        ss += centered.x(i, j) * centered.x(i, j);
      ld.column_sds[j] = std::sqrt(ss / static_cast<double>(ld.raw.n() - 1));
    }
  } else if (do_center) {
    ld.data = center(ld.raw);
  } else {
    ld.data = ld.raw;
  }
  return ld;
}

void write_document(const std::string& text, const std::string& output_path,
                    std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(output_path);
  if (!f) throw DataError("cannot write '" + output_path + "'");
  f << text;
}

std::uint64_t ensure_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

Vec resolve_x0(const LoadedData& ld, std::optional<long> row, const std::string& x0_file,
               bool standardized, bool centered) {
  if (row) {
    if (*row < 1 || static_cast<std::size_t>(*row) > ld.data.n())
      throw UsageError("--x0-row out of range 1.." + std::to_string(ld.data.n()));
    return ld.data.x.row(static_cast<std::size_t>(*row - 1));
  }
  if (x0_file.empty()) throw UsageError("need --x0-row or --x0-file");
  std::ifstream f(x0_file);
  if (!f) throw DataError("cannot open '" + x0_file + "'");
  Vec v;
  double value = 0.0;
  while (f >> value) {
    v.push_back(value);
    f.ignore(1, ',');
  }
  if (v.size() != ld.data.p())
    throw DataError("x0 file has " + std::to_string(v.size()) + " values, expected " +
                    std::to_string(ld.data.p()));
  if (standardized || centered)
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] = (v[j] - ld.data.column_means[j]) / ld.column_sds[j];
  return v;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const Error& e) {
    Json doc;
    doc["error"] = {{"message", e.what()}, {"exit_code", e.exit_code}};
    err << doc.dump(2) << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    Json doc;
    doc["error"] = {{"message", e.what()}, {"exit_code", 5}};
    err << doc.dump(2) << "\n";
    return 5;
  }
}

namespace {

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Personalized-angle regression toolkit"};
  app.require_subcommand(1);

  std::string output_path;
  int threads = 0;
  app.add_option("--output", output_path, "write the report to a file instead of stdout");
  app.add_option("--threads", threads,
                 "worker count for parallel loops (never changes numeric output)");

  // common data flags, reused by several subcommands
  struct DataArgs {
    std::string path, outcome = "lpsa", covariates;
    bool standardize = false, center_only = false;
  };
  auto add_data_flags = [](CLI::App* cmd, DataArgs& d) {
    cmd->add_option("--data", d.path, "input CSV")->required();
    cmd->add_option("--outcome", d.outcome, "outcome column name");
    cmd->add_option("--covariates", d.covariates, "comma-separated covariate columns");
    cmd->add_flag("--standardize", d.standardize,
                  "standardize covariates and outcome (sample sd)");
    cmd->add_flag("--center", d.center_only, "center covariates and outcome");
  };

  // ---- fit / predict ----
  DataArgs fit_data;
  std::string fit_method = "pan";
  double fit_l1 = 0.0, fit_l2 = 0.0;
  std::optional<long> fit_row;
  std::string fit_x0_file;
  int fit_extremes = 0;
  auto* fit_cmd = app.add_subcommand("fit", "fit a method for one target and report it");
  add_data_flags(fit_cmd, fit_data);
  fit_cmd->add_option("--method", fit_method, "ols|ridge|pan|pan_ridge");
  fit_cmd->add_option("--lambda1", fit_l1, "ridge penalty level");
  fit_cmd->add_option("--lambda2", fit_l2, "angle penalty level (may be negative)");
  fit_cmd->add_option("--x0-row", fit_row, "1-based dataset row to personalize for");
  fit_cmd->add_option("--x0-file", fit_x0_file, "file with a raw covariate vector");
  fit_cmd->add_option("--extremes", fit_extremes,
                      "instead report the k most/least aligned observations");

  DataArgs pred_data;
  std::string pred_method = "pan";
  double pred_l1 = 0.0, pred_l2 = 0.0;
  std::optional<long> pred_row;
  std::string pred_x0_file;
  auto* pred_cmd = app.add_subcommand("predict", "emit just the personalized prediction");
  add_data_flags(pred_cmd, pred_data);
  pred_cmd->add_option("--method", pred_method, "ols|ridge|pan|pan_ridge");
  pred_cmd->add_option("--lambda1", pred_l1, "ridge penalty level");
  pred_cmd->add_option("--lambda2", pred_l2, "angle penalty level");
  pred_cmd->add_option("--x0-row", pred_row, "1-based dataset row");
  pred_cmd->add_option("--x0-file", pred_x0_file, "file with a raw covariate vector");

  // ---- tune ----
  DataArgs tune_data;
  std::string tune_method = "pan_ridge";
  double tune_l1_fixed = 0.0;
  std::string tune_l1_grid, tune_l2_grid;
  int tune_b = 2000;
  std::optional<std::uint64_t> tune_seed;
  auto* tune_cmd = app.add_subcommand("tune", "parametric-bootstrap tuning surface");
  add_data_flags(tune_cmd, tune_data);
  tune_cmd->add_option("--method", tune_method,
                       "ridge_only|pan_only|pan_ridge|pan_given_lambda1");
  tune_cmd->add_option("--lambda1-fixed", tune_l1_fixed, "fixed level for pan_given_lambda1");
  tune_cmd->add_option("--lambda1-grid", tune_l1_grid, "comma-separated grid");
  tune_cmd->add_option("--lambda2-grid", tune_l2_grid, "comma-separated grid");
  tune_cmd->add_option("--bootstrap", tune_b, "bootstrap sample count B");
  tune_cmd->add_option("--seed", tune_seed, "RNG seed (generated and echoed when absent)");

  // ---- cv ----
  DataArgs cv_data;
  std::string cv_method = "ols";
  double cv_l1 = 0.0, cv_l2 = 0.0;
  bool cv_recenter = false;
  auto* cv_cmd = app.add_subcommand("cv", "leave-one-out cross-validation error");
  add_data_flags(cv_cmd, cv_data);
  cv_cmd->add_option("--method", cv_method, "ols|ridge|pan|pan_ridge");
  cv_cmd->add_option("--lambda1", cv_l1, "ridge penalty level");
  cv_cmd->add_option("--lambda2", cv_l2, "angle penalty level");
  cv_cmd->add_flag("--fold-recenter", cv_recenter, "re-center every training fold");

  // ---- simulate ----
  std::string sim_config_path, sim_methods, sim_beta_values, sim_l1_grid, sim_l2_grid;
  std::string sim_format = "json";
  std::optional<long> sim_n, sim_p, sim_reps, sim_test;
  std::optional<double> sim_sigma;
  std::optional<int> sim_b;
  std::optional<std::uint64_t> sim_seed;
  auto* sim_cmd = app.add_subcommand("simulate", "run the prediction-error study");
  sim_cmd->add_option("--config", sim_config_path, "config file ([simulate] section)");
  sim_cmd->add_option("--n", sim_n, "training rows");
  sim_cmd->add_option("--p", sim_p, "covariate count");
  sim_cmd->add_option("--sigma", sim_sigma, "noise standard deviation");
  sim_cmd->add_option("--beta-values", sim_beta_values, "comma list of coefficient levels");
  sim_cmd->add_option("--replications", sim_reps, "simulated data sets");
  sim_cmd->add_option("--test-size", sim_test, "test rows per replication");
  sim_cmd->add_option("--bootstrap", sim_b, "bootstrap sample count B");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--methods", sim_methods, "comma list of methods");
  sim_cmd->add_option("--lambda1-grid", sim_l1_grid, "tuning grid");
  sim_cmd->add_option("--lambda2-grid", sim_l2_grid, "tuning grid");
  sim_cmd->add_option("--format", sim_format, "json|text|csv");

  // ---- theory ----
  std::optional<double> th_prop, th_density_z;
  std::optional<int> th_p;
  std::string th_x0, th_beta, th_l2_grid;
  std::optional<double> th_sigma;
  std::optional<long> th_n, th_reps;
  double th_l1 = 0.0;
  std::optional<std::uint64_t> th_seed;
  bool th_derivative = false, th_l1star = false, th_oracle = false, th_mc = false;
  auto* th_cmd = app.add_subcommand("theory", "closed-form quantities and their checks");
  th_cmd->add_option("--proportion", th_prop, "P(|Z| < t) for the inner-product law");
  th_cmd->add_option("--density", th_density_z, "density value at z");
  th_cmd->add_option("--p", th_p, "dimension for the inner-product law");
  th_cmd->add_flag("--derivative", th_derivative, "MSE derivative at lambda2 = 0");
  th_cmd->add_flag("--lambda1-star", th_l1star, "ridge crossover level");
  th_cmd->add_flag("--oracle-lambda", th_oracle, "prediction-risk-optimal ridge level");
  th_cmd->add_flag("--mc-curve", th_mc, "Monte-Carlo MSE over a lambda2 grid");
  th_cmd->add_option("--x0", th_x0, "comma-separated target vector");
  th_cmd->add_option("--beta", th_beta, "comma-separated coefficient vector");
  th_cmd->add_option("--sigma", th_sigma, "noise standard deviation");
  th_cmd->add_option("--n", th_n, "sample size of the asymptotic design");
  th_cmd->add_option("--lambda1", th_l1, "ridge level");
  th_cmd->add_option("--lambda2-grid", th_l2_grid, "grid for --mc-curve");
  th_cmd->add_option("--replications", th_reps, "Monte-Carlo replications");
  th_cmd->add_option("--seed", th_seed, "RNG seed");

  // ---- shrink-curve ----
  std::string sc_pairs = "0:1,0:2.5,0:-1,2:3,4:0";
  double sc_beta_norm = 1.0;
  int sc_points = 201;
  auto* sc_cmd = app.add_subcommand("shrink-curve",
                                    "shrinkage factor vs cosine similarity as CSV");
  sc_cmd->add_option("--pairs", sc_pairs, "lambda1:lambda2 pairs, comma separated");
  sc_cmd->add_option("--beta-norm", sc_beta_norm, "norm of the reference estimate");
  sc_cmd->add_option("--points", sc_points, "rows in the curve");

  std::vector<std::string> rest(args.rbegin(), args.rend());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  auto make_prov = [&](const std::string& cmd, std::uint64_t seed,
                       const std::string& cfg_text) {
    Provenance prov;
    prov.command = cmd;
    prov.seed = seed;
    prov.config_digest = fnv1a_digest(cfg_text);
    return prov;
  };

  if (fit_cmd->parsed() || pred_cmd->parsed()) {
    const bool predicting = pred_cmd->parsed();
    DataArgs& da = predicting ? pred_data : fit_data;
    const std::string method_str = predicting ? pred_method : fit_method;
    const double l1 = predicting ? pred_l1 : fit_l1;
    const double l2 = predicting ? pred_l2 : fit_l2;
    LoadedData ld = load_data(da.path, da.outcome, da.covariates, da.standardize,
                              da.center_only);
    const std::string digest = da.path + "|" + method_str + "|" + std::to_string(l1) + "|" +
                               std::to_string(l2);

    if (!predicting && fit_extremes > 0) {
      EvaluationReport rep = per_observation_report(ld.data, l2, fit_extremes);
      Json doc = evaluation_report_json(rep, ld.data.column_names,
                                        make_prov("fit", 0, digest));
      write_document(doc.dump(2) + "\n", output_path, out);
      return 0;
    }

    const Method method = method_from_name(method_str);
    const std::optional<long> row = predicting ? pred_row : fit_row;
    const std::string x0_file = predicting ? pred_x0_file : fit_x0_file;
    Vec x0;
    const bool have_x0 = row.has_value() || !x0_file.empty();
    if (have_x0)
      x0 = resolve_x0(ld, row, x0_file, da.standardize, da.center_only);
    else if (predicting || method == Method::pan || method == Method::pan_ridge)
      throw UsageError("this command needs --x0-row or --x0-file");

    PanFit fit;
    switch (method) {
      case Method::ols: {
        fit.beta_hat = ols_fit(ld.data);
        fit.method = Method::ols;
        break;
      }
      case Method::ridge: {
        fit.beta_hat = ridge_fit(ld.data, l1);
        fit.lambda1 = l1;
        fit.method = Method::ridge;
        break;
      }
      default:
        if (is_orthonormal(ld.data.x))
          fit = pan_ridge_fit_orthonormal(ols_fit(ld.data), x0, l1, l2);
        else
          fit = fit_general(ld.data, x0, l1, l2);
        break;
    }
    if (have_x0 && fit.x0.empty()) {
      fit.x0 = x0;
      const Vec ref = ols_fit(ld.data).beta;
      fit.reference_prediction = dot(x0, ref);
      fit.cos_sim = norm(ref) > 0.0 ? cosine_similarity(x0, ref) : 0.0;
    }
    const double prediction = have_x0 ? dot(x0, fit.beta_hat.beta) : 0.0;
    if (predicting) {
      Json doc;
      doc["provenance"] = provenance_json(make_prov("predict", 0, digest));
      doc["method"] = method_name(method);
      doc["prediction"] = prediction;
      write_document(doc.dump(2) + "\n", output_path, out);
    } else {
      Json doc = fit_report_json(fit, ld.data.column_names, prediction,
                                 make_prov("fit", 0, digest));
      write_document(doc.dump(2) + "\n", output_path, out);
    }
    return 0;
  }

  if (tune_cmd->parsed()) {
    LoadedData ld = load_data(tune_data.path, tune_data.outcome, tune_data.covariates,
                              tune_data.standardize, tune_data.center_only);
    TuningGrid grid;
    if (!tune_l1_grid.empty()) grid.lambda1_values = parse_list(tune_l1_grid, "--lambda1-grid");
    if (!tune_l2_grid.empty()) grid.lambda2_values = parse_list(tune_l2_grid, "--lambda2-grid");
    grid.bootstrap_samples = tune_b;
    grid.seed = ensure_seed(tune_seed);
    TuneMethod method;
    if (tune_method == "ridge_only") method = TuneMethod::ridge_only;
    else if (tune_method == "pan_only") method = TuneMethod::pan_only;
    else if (tune_method == "pan_ridge") method = TuneMethod::pan_ridge;
    else if (tune_method == "pan_given_lambda1") method = TuneMethod::pan_given_lambda1;
    else throw UsageError("unknown tuning method '" + tune_method + "'");
    TuningResult res = bootstrap_tune(ld.data, grid, method, tune_l1_fixed, threads);
    Json doc = tuning_report_json(
        res, make_prov("tune", grid.seed, tune_data.path + "|" + tune_method));
    write_document(doc.dump(2) + "\n", output_path, out);
    return 0;
  }

  if (cv_cmd->parsed()) {
    LoadedData ld = load_data(cv_data.path, cv_data.outcome, cv_data.covariates,
                              cv_data.standardize, cv_data.center_only);
    EvaluationOptions opts;
    opts.fold_recenter = cv_recenter;
    EvaluationReport rep = loocv(ld.data, method_from_name(cv_method), cv_l1, cv_l2, opts);
    Json doc = evaluation_report_json(
        rep, ld.data.column_names,
        make_prov("cv", 0, cv_data.path + "|" + cv_method + "|" + std::to_string(cv_l1) +
                              "|" + std::to_string(cv_l2)));
    write_document(doc.dump(2) + "\n", output_path, out);
    return 0;
  }

  if (sim_cmd->parsed()) {
    Config cfg;
    if (!sim_config_path.empty()) cfg = Config::from_file(sim_config_path);
    SimulationConfig sc;
    sc.n = sim_n.value_or(cfg.get_long("simulate.n", sc.n));
    sc.p = sim_p.value_or(cfg.get_long("simulate.p", sc.p));
    sc.sigma = sim_sigma.value_or(cfg.get_double("simulate.sigma", sc.sigma));
    sc.replications =
        sim_reps.value_or(cfg.get_long("simulate.replications", sc.replications));
    sc.test_size = sim_test.value_or(cfg.get_long("simulate.test_size", sc.test_size));
    sc.bootstrap_samples =
        sim_b.value_or(static_cast<int>(cfg.get_long("simulate.bootstrap_samples",
                                                     sc.bootstrap_samples)));
    sc.seed = sim_seed ? *sim_seed
                       : (cfg.has("simulate.seed") ? cfg.get_u64("simulate.seed", 1)
                                                   : ensure_seed(std::nullopt));
    sc.beta_values = sim_beta_values.empty()
                         ? cfg.get_list("simulate.beta_values", sc.beta_values)
                         : parse_list(sim_beta_values, "--beta-values");
    sc.lambda1_grid = sim_l1_grid.empty()
                          ? cfg.get_list("simulate.lambda1_grid", sc.lambda1_grid)
                          : parse_list(sim_l1_grid, "--lambda1-grid");
    sc.lambda2_grid = sim_l2_grid.empty()
                          ? cfg.get_list("simulate.lambda2_grid", sc.lambda2_grid)
                          : parse_list(sim_l2_grid, "--lambda2-grid");
    const std::string methods_text =
        !sim_methods.empty() ? sim_methods : cfg.get("simulate.methods", "");
    if (!methods_text.empty()) {
      sc.methods.clear();
      for (const std::string& name : split_names(methods_text))
        sc.methods.push_back(sim_method_from_name(name));
    }
    sc.threads = threads;
    SimulationReport rep = run_study(sc);
    TableFormat fmt;
    if (sim_format == "json") fmt = TableFormat::json;
    else if (sim_format == "text") fmt = TableFormat::text;
    else if (sim_format == "csv") fmt = TableFormat::csv;
    else throw UsageError("unknown format '" + sim_format + "'");
    write_document(emit_table(rep, fmt), output_path, out);
    return 0;
  }

  if (th_cmd->parsed()) {
    Json doc;
    std::uint64_t seed = 0;
    if (th_mc) seed = ensure_seed(th_seed);
    doc["provenance"] = provenance_json(make_prov("theory", seed, "theory"));
    if (th_prop) {
      if (!th_p) throw UsageError("--proportion needs --p");
      doc["proportion_within"] = {{"t", *th_prop},
                                  {"p", *th_p},
                                  {"value", proportion_within(*th_prop, *th_p)}};
    }
    if (th_density_z) {
      if (!th_p) throw UsageError("--density needs --p");
      doc["density"] = {{"z", *th_density_z},
                        {"p", *th_p},
                        {"value", inner_product_density(*th_density_z, *th_p)}};
    }
    if (th_derivative || th_l1star || th_oracle || th_mc) {
      if (th_x0.empty() || th_beta.empty())
        throw UsageError("instance quantities need --x0 and --beta");
      TheoryInstance inst;
      inst.x0 = parse_list(th_x0, "--x0");
      inst.beta_true = parse_list(th_beta, "--beta");
      inst.sigma = th_sigma.value_or(1.0);
      inst.n = th_n.value_or(100);
      inst.lambda1 = th_l1;
      if (th_derivative) doc["mse_derivative_at_zero"] = mse_derivative_at_zero(inst);
      if (th_l1star)
        doc["lambda1_star"] = lambda1_star(inst.x0, inst.beta_true, inst.sigma);
      if (th_oracle)
        doc["oracle_ridge_lambda"] =
            oracle_fridge_lambda(inst.x0, inst.beta_true, inst.sigma);
      if (th_mc) {
        if (th_l2_grid.empty()) throw UsageError("--mc-curve needs --lambda2-grid");
        const Vec grid = parse_list(th_l2_grid, "--lambda2-grid");
        const long long reps = th_reps.value_or(100000);
        doc["mc_curve"] =
            theory_report_json(mc_mse_curve(inst, grid, reps, seed, threads),
                               make_prov("theory", seed, "mc"))["curve"];
      }
    }
    write_document(doc.dump(2) + "\n", output_path, out);
    return 0;
  }

  if (sc_cmd->parsed()) {
    if (sc_points < 2) throw UsageError("--points must be at least 2");
    std::vector<std::pair<double, double>> pairs;
    for (const std::string& item : split_names(sc_pairs)) {
      const std::size_t colon = item.find(':');
      if (colon == std::string::npos)
        throw UsageError("--pairs expects lambda1:lambda2 entries");
      pairs.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    std::ostringstream csv;
    csv << "cos_sim";
    for (auto& [l1, l2] : pairs) csv << ",factor_l1_" << l1 << "_l2_" << l2;
    csv << "\n";
    for (int i = 0; i < sc_points; ++i) {
      const double cs = -1.0 + 2.0 * i / (sc_points - 1);
      csv << cs;
      for (auto& [l1, l2] : pairs) csv << "," << shrinkage_factor(cs, sc_beta_norm, l1, l2);
      csv << "\n";
    }
    write_document(csv.str(), output_path, out);
    return 0;
  }

  throw UsageError("no subcommand given");
}

}  // namespace

}  // namespace pan::cli
