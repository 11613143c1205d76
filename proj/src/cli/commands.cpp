#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "limlsel/cli/cli.hpp"
#include "limlsel/effects/effects.hpp"
#include "limlsel/model/dataset.hpp"
#include "limlsel/stats/copula.hpp"

namespace limlsel::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Thrown by a command to leave with a given exit code after printing message.
struct Exit {
  int code;
  std::string message;
};

mc::Estimand parse_estimand(const std::string& name) {
  if (name == "coefficient") return mc::Estimand::coefficient;
  if (name == "p_y1") return mc::Estimand::p_y1;
  if (name == "ate") return mc::Estimand::ate;
  throw ConfigError("--estimand", "expected coefficient, p_y1 or ate, got '" + name + "'");
}

template <class F>
auto flag(const std::string& name, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name, e.what());
  }
}

std::string read_first_line(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("input", "cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Scenario and study flags shared by simulate and study.
struct ScenarioFlags {
  std::string config;
  std::string scenario, treatment_kind, copula, margin, xi_mode;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int t_df = 0;
  std::size_t reps = 0;
  unsigned parallelism = 0;
  std::vector<std::string> methods;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool study) {
    opts["--config"] = app->add_option("--config", config, "JSON config file");
    opts["--scenario"] = app->add_option("--scenario", scenario, "s1, s2, s3 or s4");
    opts["--treatment-kind"] =
        app->add_option("--treatment-kind", treatment_kind, "continuous or dichotomous");
    opts["--copula"] = app->add_option("--copula", copula, "gaussian, student_t or clayton");
    opts["--margin"] = app->add_option("--margin", margin, "normal or logistic");
    opts["--t-df"] = app->add_option("--t-df", t_df, "degrees of freedom of the t copula");
    opts["--n"] = app->add_option("--n", n, "sample size");
    opts["--seed"] = app->add_option("--seed", seed, "master seed");
    if (study) {
      opts["--reps"] = app->add_option("--reps", reps, "replications");
      opts["--parallelism"] =
          app->add_option("--parallelism", parallelism, "worker threads (default LIMLSEL_PARALLELISM or 1)");
      opts["--method"] = app->add_option("--method", methods, "methods to run (repeatable)")
                             ->delimiter(',');
      opts["--xi-mode"] = app->add_option("--xi-mode", xi_mode, "estimated or fixed");
    }
  }

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  StudyFile resolve() const {
    StudyFile f = config.empty() ? parse_study_config("{}") : load_study_config(config);
    dgp::ScenarioConfig& s = f.study.scenario;
    if (given("--scenario")) s.scenario = flag("--scenario", [&] { return dgp::parse_scenario(scenario); });
    if (given("--treatment-kind")) {
      s.treatment_kind =
          flag("--treatment-kind", [&] { return model::parse_treatment_kind(treatment_kind); });
    }
    if (given("--copula")) s.copula = flag("--copula", [&] { return stats::parse_copula_family(copula); });
    if (given("--margin")) s.margin = flag("--margin", [&] { return stats::parse_margin(margin); });
    if (given("--t-df")) s.t_df = t_df;
    if (given("--n")) {
      if (n == 0) throw ConfigError("--n", "must be positive");
      s.n = n;
    }
    if (given("--seed")) s.seed = seed;
    if (given("--reps")) {
      if (reps == 0) throw ConfigError("--reps", "must be positive");
      f.study.reps = reps;
    }
    if (given("--parallelism")) {
      if (parallelism == 0) throw ConfigError("--parallelism", "must be positive");
      f.study.parallelism = parallelism;
    }
    if (given("--xi-mode")) f.study.xi_mode = flag("--xi-mode", [&] { return est::parse_xi_mode(xi_mode); });
    if (given("--method")) {
      f.study.methods.clear();
      for (const std::string& m : methods) {
        f.study.methods.push_back(flag("--method", [&] { return mc::parse_method(m); }));
      }
    }
    flag("<options>", [&] {
      f.study.validate();
      return 0;
    });
    return f;
  }
};

int cmd_simulate(const ScenarioFlags& flags, const std::string& out_path, std::size_t rep,
                 bool latents, std::ostream& out) {
  const StudyFile f = flags.resolve();
  stats::RngStream rng(f.study.scenario.seed, rep);
  const model::Dataset data = dgp::generate(f.study.scenario, rng);
  if (out_path.empty() || out_path == "-") {
    model::write_csv(out, data, latents);
  } else {
    if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
    model::write_csv_file(out_path, data, latents);
  }
  return kOk;
}

struct SelectFlags {
  std::string data, method = "liml", criterion, treatment_kind, xi_mode = "estimated";
  std::vector<std::string> treatment_models, outcome_models;
  unsigned parallelism = 0;
  bool json = false;
};

int cmd_select(const SelectFlags& a, std::ostream& out) {
  std::optional<model::TreatmentKind> kind;
  if (!a.treatment_kind.empty()) {
    kind = flag("--treatment-kind", [&] { return model::parse_treatment_kind(a.treatment_kind); });
  }
  model::Dataset data;
  try {
    data = model::read_csv_file(a.data, kind);
  } catch (const model::DataError& e) {
    throw ConfigError("--data", e.what());
  }
  const mc::Catalogs all = mc::study_catalogs(data.kind);
  model::CandidateCatalog cat_t = all.treatment, cat_o = all.outcome;
  if (!a.treatment_models.empty()) {
    cat_t = flag("--treatment-models", [&] { return all.treatment.restricted(a.treatment_models); });
  }
  if (!a.outcome_models.empty()) {
    cat_o = flag("--outcome-models", [&] { return all.outcome.restricted(a.outcome_models); });
  }

  select::SelectionResult r;
  if (a.method == "liml") {
    const select::Criterion c =
        a.criterion.empty() ? select::Criterion::lbic
                            : flag("--criterion", [&] { return select::parse_criterion(a.criterion); });
    select::SelectOptions opts;
    opts.xi_mode = flag("--xi-mode", [&] { return est::parse_xi_mode(a.xi_mode); });
    opts.parallelism = a.parallelism ? a.parallelism : default_parallelism();
    r = select::select_liml(data, cat_t, cat_o, c, opts);
  } else if (a.method == "2sri") {
    if (!a.criterion.empty() && a.criterion != "aic") {
      throw ConfigError("--criterion", "two-step selection uses aic at both stages");
    }
    r = select::select_2sri(data, cat_t, cat_o);
  } else {
    throw ConfigError("--method", "expected liml or 2sri, got '" + a.method + "'");
  }

  std::optional<effects::EffectEstimate> effect;
  try {
    effect = effects::plug_in_effect(r.fit, data);
  } catch (const std::invalid_argument&) {
  }

  if (a.json) {
    ordered_json j;
    j["method"] = a.method;
    j["criterion"] = select::to_string(r.criterion);
    j["n_obs"] = r.n_obs;
    j["treatment_kind"] = model::to_string(data.kind);
    j["chosen_treatment"] = r.chosen_treatment;
    j["chosen_outcome"] = r.chosen_outcome;
    j["excluded"] = r.excluded;
    ordered_json rows = ordered_json::array();
    for (const select::CandidateRow& c : r.table) {
      ordered_json row;
      row["treatment"] = c.treatment_label;
      row["outcome"] = c.outcome_label;
      row["loglik"] = std::isfinite(c.loglik) ? ordered_json(c.loglik) : ordered_json(nullptr);
      row["n_params"] = c.n_params;
      row["value"] = std::isfinite(c.value) ? ordered_json(c.value) : ordered_json(nullptr);
      row["converged"] = c.converged;
      if (!c.note.empty()) row["note"] = c.note;
      rows.push_back(row);
    }
    j["table"] = rows;
    ordered_json fit;
    fit["converged"] = r.fit.converged;
    fit["loglik"] = r.fit.loglik;
    fit["alpha"] = vector_json(r.fit.theta.alpha);
    fit["beta"] = vector_json(r.fit.theta.beta);
    if (r.fit.method == est::Method::liml) {
      fit["sigma_v"] = r.fit.theta.sigma_v;
      fit["rho"] = r.fit.theta.rho;
    } else {
      fit["residual_coef"] = r.fit.residual_coef;
    }
    j["fit"] = fit;
    if (effect) {
      j["effect"] = {{"p_y1", effect->p_y1}, {"p_y0", effect->p_y0}, {"ate", effect->ate}};
    }
    out << j.dump(2) << '\n';
    return kOk;
  }

  out << "method " << a.method << ", criterion " << select::to_string(r.criterion) << ", n "
      << r.n_obs << "\n\n";
  out << std::left << std::setw(10) << "treatment" << std::setw(9) << "outcome" << std::right
      << std::setw(14) << "loglik" << std::setw(4) << "k" << std::setw(14) << "criterion"
      << "  converged\n";
  for (const select::CandidateRow& c : r.table) {
    out << std::left << std::setw(10) << c.treatment_label << std::setw(9)
        << (c.outcome_label.empty() ? "-" : c.outcome_label) << std::right << std::fixed
        << std::setprecision(4) << std::setw(14) << c.loglik << std::setw(4) << c.n_params
        << std::setw(14) << c.value << "  " << (c.converged ? "yes" : "no") << '\n';
  }
  out << "\nchosen: " << r.chosen_treatment << ", " << r.chosen_outcome << '\n';
  if (effect) {
    out << std::setprecision(6) << "p_y1 " << effect->p_y1 << "  p_y0 " << effect->p_y0
        << "  ate " << effect->ate << '\n';
  }
  return kOk;
}

int cmd_study(const ScenarioFlags& flags, std::string out_dir, std::ostream& out) {
  const StudyFile f = flags.resolve();
  if (out_dir.empty()) out_dir = f.out_dir;
  if (out_dir.empty()) throw ConfigError("--out", "an output directory is required");
  const mc::StudyResult result = mc::run_study(f.study);
  mc::write_study(result, out_dir);

  std::ostringstream csv;
  mc::write_summary_csv(csv, result.summaries.front());
  std::istringstream in(csv.str());
  out << mc::markdown_report(mc::read_summary_csv(in), f.study.scenario.describe());

  const bool any = std::any_of(result.records.begin(), result.records.end(),
                               [](const mc::ReplicationRecord& r) { return r.converged; });
  if (!any) throw Exit{kDegenerate, "no replication converged for any method"};
  return kOk;
}

struct ReportFlags {
  std::string input, truth_path, estimand, treatment_kind, title, out;
  double truth = std::nan("");
  bool converged_only = false;
};

int cmd_report(const ReportFlags& a, std::ostream& out) {
  const std::string header = read_first_line(a.input);
  std::vector<mc::SummaryRow> rows;
  std::string title = a.title;

  if (header == mc::kSummaryHeader) {
    std::ifstream in(a.input);
    try {
      rows = mc::read_summary_csv(in);
    } catch (const model::DataError& e) {
      throw ConfigError("input", e.what());
    }
  } else if (header == mc::kRecordsHeader) {
    std::ifstream in(a.input);
    std::vector<mc::ReplicationRecord> records;
    try {
      records = mc::read_records_csv(in);
    } catch (const model::DataError& e) {
      throw ConfigError("input", e.what());
    }
    if (records.empty()) throw Exit{kDegenerate, "records file holds no replications"};

    // Truth, estimand and treatment kind come from flags or the study.json
    // written next to the records.
    std::optional<nlohmann::json> meta;
    std::string meta_path = a.truth_path;
    if (meta_path.empty()) {
      const fs::path sibling = fs::path(a.input).parent_path() / "study.json";
      if (fs::exists(sibling)) meta_path = sibling.string();
    }
    if (!meta_path.empty()) {
      std::ifstream m(meta_path);
      if (!m) throw ConfigError("--study", "cannot open '" + meta_path + "'");
      try {
        meta = nlohmann::json::parse(m);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("--study", e.what());
      }
    }
    model::TreatmentKind kind = model::TreatmentKind::continuous;
    if (!a.treatment_kind.empty()) {
      kind = flag("--treatment-kind", [&] { return model::parse_treatment_kind(a.treatment_kind); });
    } else if (meta && meta->contains("treatment_kind")) {
      kind = flag("treatment_kind", [&] {
        return model::parse_treatment_kind(meta->at("treatment_kind").get<std::string>());
      });
    }
    mc::Estimand estimand = mc::study_estimands(kind).front();
    if (!a.estimand.empty()) estimand = parse_estimand(a.estimand);
    double truth = a.truth;
    if (std::isnan(truth)) {
      if (!meta || !meta->contains("truth") || !meta->at("truth").contains(mc::to_string(estimand))) {
        throw ConfigError("--truth", "no truth value given and none found in study.json");
      }
      truth = meta->at("truth").at(mc::to_string(estimand)).get<double>();
    }
    if (title.empty() && meta && meta->contains("description")) {
      title = meta->at("description").get<std::string>();
    }
    const mc::StudySummary s =
        mc::summarize(records, estimand, truth, mc::study_catalogs(kind));
    std::ostringstream csv;
    mc::write_summary_csv(csv, s, a.converged_only);
    std::istringstream in2(csv.str());
    rows = mc::read_summary_csv(in2);
  } else {
    throw ConfigError("input", "'" + a.input + "' is neither a records nor a summary CSV");
  }

  if (rows.empty()) throw Exit{kDegenerate, "nothing to report"};
  const std::string md = mc::markdown_report(rows, title);
  if (a.out.empty() || a.out == "-") {
    out << md;
  } else {
    std::ofstream f(a.out);
    if (!f) throw ConfigError("--out", "cannot write '" + a.out + "'");
    f << md;
  }
  return kOk;
}

struct CalibrateFlags {
  std::string family, margin = "logistic";
  double target = 0.0;
  int df = stats::kDefaultStudentTDf;
  std::size_t pairs = stats::CalibrationOptions{}.pairs;
  bool json = false;
};

int cmd_calibrate(const CalibrateFlags& a, std::ostream& out) {
  const stats::CopulaFamily family =
      flag("--family", [&] { return stats::parse_copula_family(a.family); });
  const stats::Margin margin = flag("--margin", [&] { return stats::parse_margin(a.margin); });
  stats::CalibrationOptions opts;
  opts.df = a.df;
  opts.pairs = a.pairs;
  stats::Calibration c;
  try {
    c = stats::calibrate_copula_param(family, a.target, margin, opts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--target", e.what());
  }
  if (a.json) {
    ordered_json j;
    j["family"] = stats::to_string(family);
    j["margin"] = stats::to_string(margin);
    j["target"] = a.target;
    j["param"] = c.spec.param;
    if (family == stats::CopulaFamily::student_t) j["df"] = c.spec.df;
    j["achieved_correlation"] = c.achieved_correlation;
    out << j.dump(2) << '\n';
  } else {
    out << std::setprecision(10) << "param " << c.spec.param << "\nachieved_correlation "
        << c.achieved_correlation << '\n';
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LIML estimation and model selection for binary-outcome IV models"};
  app.name("limlsel");
  app.require_subcommand(1);

  ScenarioFlags sim_flags;
  std::string sim_out;
  std::size_t sim_rep = 0;
  bool sim_latents = false;
  CLI::App* sim = app.add_subcommand("simulate", "generate one dataset as CSV");
  sim_flags.add(sim, false);
  sim->add_option("--out", sim_out, "output CSV (default stdout)");
  sim->add_option("--rep", sim_rep, "replication stream index");
  sim->add_flag("--debug-latents", sim_latents, "also write the latent errors v,u");

  SelectFlags sel_flags;
  CLI::App* sel = app.add_subcommand("select", "select and fit a model pair on a dataset");
  sel->add_option("--data", sel_flags.data, "input CSV")->required();
  sel->add_option("--method", sel_flags.method, "liml or 2sri");
  sel->add_option("--criterion", sel_flags.criterion, "laic or lbic for liml, aic for 2sri");
  sel->add_option("--treatment-kind", sel_flags.treatment_kind, "override the inferred kind");
  sel->add_option("--treatment-models", sel_flags.treatment_models, "restrict treatment candidates")
      ->delimiter(',');
  sel->add_option("--outcome-models", sel_flags.outcome_models, "restrict outcome candidates")
      ->delimiter(',');
  sel->add_option("--xi-mode", sel_flags.xi_mode, "estimated or fixed");
  sel->add_option("--parallelism", sel_flags.parallelism, "worker threads");
  sel->add_flag("--json", sel_flags.json, "print JSON");

  ScenarioFlags study_flags;
  std::string study_out;
  CLI::App* study = app.add_subcommand("study", "run a Monte Carlo study");
  study_flags.add(study, true);
  study->add_option("--out", study_out, "output directory");

  ReportFlags rep_flags;
  CLI::App* report = app.add_subcommand("report", "render a summary table as markdown");
  report->add_option("input", rep_flags.input, "records.csv or summary CSV")->required();
  report->add_option("--study", rep_flags.truth_path, "study.json with the truth");
  report->add_option("--truth", rep_flags.truth, "true value of the estimand");
  report->add_option("--estimand", rep_flags.estimand, "coefficient, p_y1 or ate");
  report->add_option("--treatment-kind", rep_flags.treatment_kind, "continuous or dichotomous");
  report->add_option("--title", rep_flags.title, "table title");
  report->add_option("--out", rep_flags.out, "output file (default stdout)");
  report->add_flag("--converged-only", rep_flags.converged_only, "drop nonconverged replications");

  CalibrateFlags cal_flags;
  CLI::App* cal = app.add_subcommand("calibrate-copula", "find the copula parameter for a target correlation");
  cal->add_option("--family", cal_flags.family, "gaussian, student_t or clayton")->required();
  cal->add_option("--target", cal_flags.target, "target latent correlation")->required();
  cal->add_option("--margin", cal_flags.margin, "normal or logistic");
  cal->add_option("--df", cal_flags.df, "degrees of freedom of the t copula");
  cal->add_option("--pairs", cal_flags.pairs, "Monte Carlo pairs");
  cal->add_flag("--json", cal_flags.json, "print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) return cmd_simulate(sim_flags, sim_out, sim_rep, sim_latents, out);
    if (*sel) return cmd_select(sel_flags, out);
    if (*study) return cmd_study(study_flags, study_out, out);
    if (*report) return cmd_report(rep_flags, out);
    if (*cal) return cmd_calibrate(cal_flags, out);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const select::SelectionError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const stats::CalibrationError& e) {
    err << "error: " << e.what() << '\n';
    return kCalibrationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

}  // namespace limlsel::cli
