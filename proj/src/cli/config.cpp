#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "limlsel/cli/cli.hpp"

namespace limlsel::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {
    "treatment_kind", "scenario", "copula",      "margin",           "t_df",
    "n",              "seed",     "reps",        "methods",          "criteria",
    "xi_mode",        "sls_second_stage",        "parallelism",      "oracle_draws",
    "out_dir"};

std::string get_string(const json& j, const std::string& key) {
  if (!j.at(key).is_string()) throw ConfigError(key, "expected a string");
  return j.at(key).get<std::string>();
}

std::uint64_t get_count(const json& j, const std::string& key, bool allow_zero = false) {
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError(key, "expected a non-negative integer");
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
    throw ConfigError(key, "expected a non-negative integer");
  }
  const std::uint64_t x = v.get<std::uint64_t>();
  if (!allow_zero && x == 0) throw ConfigError(key, "must be positive");
  return x;
}

std::vector<std::string> get_strings(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) throw ConfigError(key, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Runs parse on the field value, turning parse errors into ConfigError.
template <class F>
auto field(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

StudyFile parse_study_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError(key, "unknown key");
  }

  StudyFile f;
  f.study.parallelism = default_parallelism();
  dgp::ScenarioConfig& s = f.study.scenario;
  if (j.contains("treatment_kind")) {
    s.treatment_kind = field("treatment_kind", [&] {
      return model::parse_treatment_kind(get_string(j, "treatment_kind"));
    });
  }
  if (j.contains("scenario")) {
    s.scenario = field("scenario", [&] { return dgp::parse_scenario(get_string(j, "scenario")); });
  }
  if (j.contains("copula")) {
    s.copula = field("copula", [&] { return stats::parse_copula_family(get_string(j, "copula")); });
  }
  if (j.contains("margin")) {
    s.margin = field("margin", [&] { return stats::parse_margin(get_string(j, "margin")); });
  }
  if (j.contains("t_df")) s.t_df = static_cast<int>(get_count(j, "t_df"));
  if (j.contains("n")) s.n = get_count(j, "n");
  if (j.contains("seed")) s.seed = get_count(j, "seed", true);
  if (j.contains("reps")) f.study.reps = get_count(j, "reps");
  if (j.contains("parallelism")) {
    f.study.parallelism = static_cast<unsigned>(get_count(j, "parallelism"));
  }
  if (j.contains("oracle_draws")) f.study.oracle_draws = get_count(j, "oracle_draws");
  if (j.contains("xi_mode")) {
    f.study.xi_mode = field("xi_mode", [&] { return est::parse_xi_mode(get_string(j, "xi_mode")); });
  }
  if (j.contains("sls_second_stage")) {
    const std::string v = get_string(j, "sls_second_stage");
    if (v == "probit") {
      f.study.sls_second_stage = est::SecondStage::probit;
    } else if (v == "least_squares") {
      f.study.sls_second_stage = est::SecondStage::least_squares;
    } else {
      throw ConfigError("sls_second_stage", "expected probit or least_squares, got '" + v + "'");
    }
  }
  if (j.contains("methods")) {
    f.study.methods.clear();
    for (const std::string& m : get_strings(j, "methods")) {
      f.study.methods.push_back(field("methods", [&] { return mc::parse_method(m); }));
    }
    if (f.study.methods.empty()) throw ConfigError("methods", "must not be empty");
  }
  if (j.contains("criteria")) {
    // Keeps only the LIML selection methods whose criterion is listed.
    std::set<mc::MethodId> keep;
    for (const std::string& c : get_strings(j, "criteria")) {
      const select::Criterion crit = field("criteria", [&] { return select::parse_criterion(c); });
      if (crit == select::Criterion::laic) keep.insert(mc::MethodId::liml_laic);
      if (crit == select::Criterion::lbic) keep.insert(mc::MethodId::liml_lbic);
    }
    std::vector<mc::MethodId> methods = f.study.resolved_methods();
    std::erase_if(methods, [&](mc::MethodId m) {
      return (m == mc::MethodId::liml_laic || m == mc::MethodId::liml_lbic) && !keep.count(m);
    });
    if (methods.empty()) throw ConfigError("criteria", "leaves no methods to run");
    f.study.methods = methods;
  }
  if (j.contains("out_dir")) f.out_dir = get_string(j, "out_dir");
  field("<document>", [&] {
    f.study.validate();
    return 0;
  });
  return f;
}

StudyFile load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str());
}

unsigned default_parallelism() {
  if (const char* v = std::getenv("LIMLSEL_PARALLELISM")) {
    try {
      const long n = std::stol(v);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw ConfigError("LIMLSEL_PARALLELISM", "expected a positive integer, got '" +
                                                 std::string(v) + "'");
  }
  return 1;
}

}  // namespace limlsel::cli
