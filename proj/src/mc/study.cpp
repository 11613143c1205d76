#include "limlsel/mc/study.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "limlsel/model/dataset.hpp"

namespace limlsel::mc {

using model::TreatmentKind;
using select::Classification;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string format_optional(double x) { return std::isfinite(x) ? model::format_double(x) : ""; }

double parse_optional(const std::string& s, std::size_t line) {
  if (s.empty()) return kNaN;
  double x = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw model::DataError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return x;
}

std::string percent(int count, std::size_t reps) {
  return model::format_double(100.0 * count / static_cast<double>(reps));
}

// Full candidate: the one nesting every other candidate, or the last one.
std::string full_label(const model::CandidateCatalog& cat) {
  for (const model::ModelFormula& f : cat.candidates) {
    const bool all = std::all_of(cat.candidates.begin(), cat.candidates.end(),
                                 [&](const model::ModelFormula& g) { return model::nests(f, g); });
    if (all) return f.label();
  }
  return cat.candidates.back().label();
}

Eigen::Index treatment_position(const model::ModelFormula& f) {
  const auto& terms = f.terms();
  const model::Term w = model::Term::main(model::Variable::w);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == w) return static_cast<Eigen::Index>(i);
  }
  return -1;
}

ReplicationRecord record_from_fit(std::size_t rep, MethodId method, const est::FitResult& fit,
                                  const model::Dataset& data, const Catalogs& cats) {
  ReplicationRecord r;
  r.rep = rep;
  r.method = method;
  r.chosen_t = fit.treatment_label;
  r.chosen_o = fit.outcome_label;
  r.converged = fit.converged;
  r.note = fit.note;
  r.classification = select::classify(r.chosen_t, r.chosen_o, cats.treatment, cats.outcome);
  const Eigen::Index pos = fit.outcome_formula ? treatment_position(*fit.outcome_formula) : -1;
  const bool finite = fit.theta.beta.allFinite();
  if (finite) {
    const effects::EffectEstimate e = effects::plug_in_effect(fit, data);
    r.p_y1 = e.p_y1;
    r.ate = e.ate;
  } else {
    r.p_y1 = r.ate = kNaN;
  }
  r.estimate = data.kind == TreatmentKind::continuous ? (pos >= 0 ? fit.theta.beta(pos) : kNaN)
                                                      : r.ate;
  return r;
}

ReplicationRecord failed_record(std::size_t rep, MethodId method, const std::string& why) {
  ReplicationRecord r;
  r.rep = rep;
  r.method = method;
  r.converged = false;
  r.estimate = r.p_y1 = r.ate = kNaN;
  r.note = why;
  return r;
}

template <class F>
void run_indexed(std::size_t count, unsigned parallelism, F&& task) {
  const unsigned workers =
      std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::two_sls: return "2sls";
    case MethodId::two_sri: return "2sri";
    case MethodId::liml_laic: return "liml_laic";
    case MethodId::liml_lbic: return "liml_lbic";
    case MethodId::two_sri_full: return "2sri_full";
    case MethodId::liml_full: return "liml_full";
  }
  return "?";
}

MethodId parse_method(const std::string& name) {
  for (MethodId m : {MethodId::two_sls, MethodId::two_sri, MethodId::liml_laic,
                     MethodId::liml_lbic, MethodId::two_sri_full, MethodId::liml_full}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected 2sls, 2sri, liml_laic, liml_lbic, 2sri_full or "
                              "liml_full)");
}

std::vector<MethodId> default_methods(TreatmentKind kind) {
  std::vector<MethodId> m = {MethodId::two_sri, MethodId::liml_laic, MethodId::liml_lbic,
                             MethodId::two_sri_full, MethodId::liml_full};
  if (kind == TreatmentKind::continuous) m.insert(m.begin(), MethodId::two_sls);
  return m;
}

bool is_selection_method(MethodId m) {
  return m == MethodId::two_sri || m == MethodId::liml_laic || m == MethodId::liml_lbic;
}

std::string to_string(Estimand e) {
  switch (e) {
    case Estimand::coefficient: return "coefficient";
    case Estimand::p_y1: return "p_y1";
    case Estimand::ate: return "ate";
  }
  return "?";
}

std::vector<Estimand> study_estimands(TreatmentKind kind) {
  if (kind == TreatmentKind::continuous) return {Estimand::coefficient};
  return {Estimand::ate, Estimand::p_y1};
}

std::vector<MethodId> StudyConfig::resolved_methods() const {
  return methods.empty() ? default_methods(scenario.treatment_kind) : methods;
}

void StudyConfig::validate() const {
  scenario.validate();
  if (reps == 0) throw std::invalid_argument("reps must be positive");
  if (oracle_draws == 0) throw std::invalid_argument("oracle_draws must be positive");
  const std::vector<MethodId> m = resolved_methods();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (m[i] == m[j]) throw std::invalid_argument("method " + to_string(m[i]) + " listed twice");
    }
  }
}

Catalogs study_catalogs(TreatmentKind kind) {
  Catalogs c;
  if (kind == TreatmentKind::continuous) {
    auto [t, o] = model::catalog_continuous();
    c.treatment = std::move(t);
    c.outcome = std::move(o);
  } else {
    c.treatment = model::catalog_dichotomous_treatment();
    c.outcome = model::catalog_dichotomous();
  }
  c.full_treatment = full_label(c.treatment);
  c.full_outcome = full_label(c.outcome);
  return c;
}

double ReplicationRecord::value(Estimand e) const {
  switch (e) {
    case Estimand::coefficient: return estimate;
    case Estimand::p_y1: return p_y1;
    case Estimand::ate: return ate;
  }
  return kNaN;
}

double Truth::value(Estimand e) const {
  switch (e) {
    case Estimand::coefficient: return coefficient;
    case Estimand::p_y1: return effect.p_y1;
    case Estimand::ate: return effect.ate;
  }
  return kNaN;
}

std::vector<ReplicationRecord> run_replication(const StudyConfig& cfg, std::size_t rep) {
  stats::RngStream rng(cfg.scenario.seed, rep);
  const model::Dataset data = dgp::generate(cfg.scenario, rng);
  const Catalogs cats = study_catalogs(cfg.scenario.treatment_kind);
  const model::ModelFormula& full_t = cats.treatment.at(cats.full_treatment);
  const model::ModelFormula& full_o = cats.outcome.at(cats.full_outcome);

  select::SelectOptions sel;
  sel.xi_mode = cfg.xi_mode;
  std::optional<select::LimlCandidates> candidates;
  auto liml_fits = [&]() -> const select::LimlCandidates& {
    if (!candidates) candidates = select::fit_liml_candidates(data, cats.treatment, cats.outcome, sel);
    return *candidates;
  };

  std::vector<ReplicationRecord> out;
  for (MethodId m : cfg.resolved_methods()) {
    try {
      switch (m) {
        case MethodId::two_sls:
          out.push_back(record_from_fit(
              rep, m, est::fit_2sls(data, full_t, full_o, cfg.sls_second_stage), data, cats));
          break;
        case MethodId::two_sri:
          out.push_back(
              record_from_fit(rep, m, select::select_2sri(data, cats.treatment, cats.outcome).fit,
                              data, cats));
          break;
        case MethodId::liml_laic:
        case MethodId::liml_lbic: {
          const select::Criterion c =
              m == MethodId::liml_laic ? select::Criterion::laic : select::Criterion::lbic;
          out.push_back(record_from_fit(
              rep, m, select::choose_liml(liml_fits(), cats.treatment, cats.outcome, c).fit, data,
              cats));
          break;
        }
        case MethodId::two_sri_full:
          out.push_back(record_from_fit(rep, m, est::fit_2sri(data, full_t, full_o), data, cats));
          break;
        case MethodId::liml_full: {
          const select::LimlCandidates& f = liml_fits();
          const est::FitResult& fit = f.fit(cats.full_treatment, cats.full_outcome);
          if (!fit.outcome_formula) {
            out.push_back(failed_record(rep, m, "full LIML fit failed"));
          } else {
            out.push_back(record_from_fit(rep, m, fit, data, cats));
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      out.push_back(failed_record(rep, m, e.what()));
    }
  }
  return out;
}

Truth study_truth(const StudyConfig& cfg) {
  using Key = std::tuple<int, int, int, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, Truth> cache;
  const dgp::ScenarioConfig& s = cfg.scenario;
  const Key key{static_cast<int>(s.treatment_kind), static_cast<int>(s.scenario),
                static_cast<int>(s.margin), cfg.oracle_draws};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Truth t;
  t.coefficient = dgp::true_treatment_coefficient(s);
  t.effect = effects::true_effect_oracle(s, cfg.oracle_draws);
  std::lock_guard lock(mutex);
  cache.emplace(key, t);
  return t;
}

EstimateStats estimate_stats(std::vector<double> values, double truth) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double x) { return !std::isfinite(x); }),
               values.end());
  if (values.empty()) throw std::invalid_argument("no finite estimates to summarize");
  EstimateStats s;
  const double n = static_cast<double>(values.size());
  s.count = values.size();
  double sum = 0.0, sq_err = 0.0;
  for (double x : values) {
    sum += x;
    sq_err += (x - truth) * (x - truth);
  }
  s.mean = sum / n;
  double ss = 0.0;
  for (double x : values) ss += (x - s.mean) * (x - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  s.median = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
  s.min = values.front();
  s.max = values.back();
  s.bias = s.mean - truth;
  s.rmse = std::sqrt(sq_err / n);
  return s;
}

StudySummary summarize(const std::vector<ReplicationRecord>& records, Estimand estimand,
                       double truth, const Catalogs& catalogs) {
  StudySummary out;
  out.estimand = estimand;
  out.truth = truth;
  std::vector<MethodId> order;
  for (const ReplicationRecord& r : records) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  for (MethodId m : order) {
    MethodSummary ms;
    ms.method = m;
    std::vector<double> all, conv;
    int true_n = 0, incl_n = 0, both_n = 0;
    for (const ReplicationRecord& r : records) {
      if (r.method != m) continue;
      ++ms.reps;
      all.push_back(r.value(estimand));
      if (r.converged) {
        conv.push_back(r.value(estimand));
      } else {
        ++ms.nonconverged;
      }
      if (r.chosen_t.empty() || r.chosen_o.empty()) continue;
      const Classification c =
          select::classify(r.chosen_t, r.chosen_o, catalogs.treatment, catalogs.outcome);
      true_n += c == Classification::true_model ? 1 : 0;
      incl_n += c != Classification::misspecified ? 1 : 0;
      const bool t_ok = select::classify_stage(r.chosen_t, catalogs.treatment) !=
                        Classification::misspecified;
      const bool o_ok = select::classify_stage(r.chosen_o, catalogs.outcome) !=
                        Classification::misspecified;
      both_n += t_ok && o_ok ? 1 : 0;
    }
    try {
      ms.all = estimate_stats(all, truth);
    } catch (const std::invalid_argument&) {
      ms.all = EstimateStats{0, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    }
    try {
      ms.converged_only = estimate_stats(conv, truth);
    } catch (const std::invalid_argument&) {
      ms.converged_only.reset();
    }
    if (is_selection_method(m)) {
      ms.true_n = true_n;
      ms.including_n = incl_n;
      if (m == MethodId::two_sri) ms.both_n = both_n;
    }
    out.methods.push_back(ms);
  }
  return out;
}

std::vector<SelectionCounts> selection_counts(const std::vector<ReplicationRecord>& records,
                                              const Catalogs& catalogs) {
  std::vector<MethodId> order;
  for (const ReplicationRecord& r : records) {
    if (is_selection_method(r.method) &&
        std::find(order.begin(), order.end(), r.method) == order.end()) {
      order.push_back(r.method);
    }
  }
  std::vector<SelectionCounts> out;
  for (MethodId m : order) {
    SelectionCounts pair{m, "pair", 0, 0, 0, std::nullopt};
    SelectionCounts first{m, "1st", 0, 0, 0, std::nullopt};
    SelectionCounts second{m, "2nd", 0, 0, 0, std::nullopt};
    int both = 0;
    for (const ReplicationRecord& r : records) {
      if (r.method != m) continue;
      ++pair.reps;
      ++first.reps;
      ++second.reps;
      if (r.chosen_t.empty() || r.chosen_o.empty()) continue;
      const Classification t = select::classify_stage(r.chosen_t, catalogs.treatment);
      const Classification o = select::classify_stage(r.chosen_o, catalogs.outcome);
      const Classification p =
          select::classify(r.chosen_t, r.chosen_o, catalogs.treatment, catalogs.outcome);
      pair.true_n += p == Classification::true_model;
      pair.including_n += p != Classification::misspecified;
      first.true_n += t == Classification::true_model;
      first.including_n += t != Classification::misspecified;
      second.true_n += o == Classification::true_model;
      second.including_n += o != Classification::misspecified;
      both += t != Classification::misspecified && o != Classification::misspecified;
    }
    if (m == MethodId::two_sri) {
      first.both_n = both;
      out.push_back(first);
      out.push_back(second);
    }
    out.push_back(pair);
  }
  return out;
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyResult result;
  result.config = cfg;
  result.truth = study_truth(cfg);
  // Warm the copula calibration cache before the workers start.
  dgp::confounder_copula(cfg.scenario);

  std::vector<std::vector<ReplicationRecord>> per_rep(cfg.reps);
  run_indexed(cfg.reps, cfg.parallelism,
              [&](std::size_t rep) { per_rep[rep] = run_replication(cfg, rep); });
  for (auto& recs : per_rep) {
    for (auto& r : recs) result.records.push_back(std::move(r));
  }

  const Catalogs cats = study_catalogs(cfg.scenario.treatment_kind);
  for (Estimand e : study_estimands(cfg.scenario.treatment_kind)) {
    result.summaries.push_back(summarize(result.records, e, result.truth.value(e), cats));
  }
  result.selection = selection_counts(result.records, cats);
  return result;
}

void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const ReplicationRecord& r : records) {
    out << r.rep << ',' << to_string(r.method) << ',' << r.chosen_t << ',' << r.chosen_o << ','
        << (r.converged ? "true" : "false") << ',' << format_optional(r.estimate) << ','
        << format_optional(r.p_y1) << ',' << format_optional(r.ate) << ','
        << (r.classification ? select::to_string(*r.classification) : "") << '\n';
  }
}

std::vector<ReplicationRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kRecordsHeader) {
    throw model::DataError("records file must start with the header '" +
                           std::string(kRecordsHeader) + "'");
  }
  std::vector<ReplicationRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 9) {
      throw model::DataError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                             std::to_string(f.size()));
    }
    ReplicationRecord r;
    try {
      r.rep = std::stoul(f[0]);
      r.method = parse_method(f[1]);
    } catch (const std::exception& e) {
      throw model::DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    r.chosen_t = f[2];
    r.chosen_o = f[3];
    if (f[4] != "true" && f[4] != "false") {
      throw model::DataError("line " + std::to_string(line_no) + ": converged must be true/false");
    }
    r.converged = f[4] == "true";
    r.estimate = parse_optional(f[5], line_no);
    r.p_y1 = parse_optional(f[6], line_no);
    r.ate = parse_optional(f[7], line_no);
    if (f[8] == "true_model") {
      r.classification = Classification::true_model;
    } else if (f[8] == "including_true") {
      r.classification = Classification::including_true;
    } else if (f[8] == "misspecified") {
      r.classification = Classification::misspecified;
    } else if (!f[8].empty()) {
      throw model::DataError("line " + std::to_string(line_no) + ": unknown classification '" +
                             f[8] + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const StudySummary& summary, bool converged_only) {
  out << kSummaryHeader << '\n';
  auto count = [](const std::optional<int>& c) {
    return c ? std::to_string(*c) : std::string();
  };
  auto pct = [](const std::optional<int>& c, std::size_t reps) {
    return c ? percent(*c, reps) : std::string();
  };
  for (const MethodSummary& m : summary.methods) {
    const EstimateStats s =
        converged_only ? m.converged_only.value_or(EstimateStats{0, kNaN, kNaN, kNaN, kNaN, kNaN,
                                                                 kNaN, kNaN})
                       : m.all;
    out << to_string(m.method) << ',' << format_optional(s.mean) << ',' << format_optional(s.sd)
        << ',' << format_optional(s.median) << ',' << format_optional(s.min) << ','
        << format_optional(s.max) << ',' << format_optional(s.bias) << ','
        << format_optional(s.rmse) << ',' << count(m.true_n) << ',' << pct(m.true_n, m.reps)
        << ',' << count(m.including_n) << ',' << pct(m.including_n, m.reps) << ','
        << count(m.both_n) << ',' << pct(m.both_n, m.reps) << ',' << m.nonconverged << '\n';
  }
}

void write_selection_csv(std::ostream& out, const std::vector<SelectionCounts>& counts) {
  out << "method,step,reps,true_n,true_pct,incl_n,incl_pct,both_n,both_pct\n";
  for (const SelectionCounts& c : counts) {
    out << to_string(c.method) << ',' << c.step << ',' << c.reps << ',' << c.true_n << ','
        << percent(c.true_n, c.reps) << ',' << c.including_n << ','
        << percent(c.including_n, c.reps) << ',' << (c.both_n ? std::to_string(*c.both_n) : "")
        << ',' << (c.both_n ? percent(*c.both_n, c.reps) : "") << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kSummaryHeader) {
    throw model::DataError("summary file must start with the header '" +
                           std::string(kSummaryHeader) + "'");
  }
  std::vector<SummaryRow> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 15) {
      throw model::DataError("line " + std::to_string(line_no) + ": expected 15 fields, got " +
                             std::to_string(f.size()));
    }
    SummaryRow row;
    row.method = f[0];
    row.fields.assign(f.begin() + 1, f.end());
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string display_name(const std::string& method) {
  if (method == "2sls") return "2SLS";
  if (method == "2sri") return "2SRI";
  if (method == "liml_laic") return "LIMLE: LAIC";
  if (method == "liml_lbic") return "LIMLE: LBIC";
  if (method == "2sri_full") return "2SRI: Full model";
  if (method == "liml_full") return "LIMLE: Full model";
  return method;
}

std::string fixed(const std::string& field, int digits) {
  if (field.empty()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, std::stod(field));
  return buf;
}

std::string count_cell(const std::string& n, const std::string& pct) {
  if (n.empty()) return "-";
  return n + " (" + fixed(pct, 1) + ")";
}

}  // namespace

std::string markdown_report(const std::vector<SummaryRow>& rows, const std::string& title) {
  std::ostringstream out;
  if (!title.empty()) out << "### " << title << "\n\n";
  out << "| Method | Mean (SD) | Median (Range) | Bias | RMSE | True model n (%) | "
         "Including true model n (%) | Both true model n (%) | Nonconverged |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const SummaryRow& r : rows) {
    const auto& f = r.fields;
    out << "| " << display_name(r.method) << " | " << fixed(f[0], 3) << " (" << fixed(f[1], 3)
        << ") | " << fixed(f[2], 3) << " (" << fixed(f[3], 2) << ", " << fixed(f[4], 2) << ") | "
        << fixed(f[5], 3) << " | " << fixed(f[6], 3) << " | " << count_cell(f[7], f[8]) << " | "
        << count_cell(f[9], f[10]) << " | " << count_cell(f[11], f[12]) << " | " << f[13]
        << " |\n";
  }
  return out.str();
}

void write_study(const StudyResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(out_dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, result.records);
  }
  for (std::size_t i = 0; i < result.summaries.size(); ++i) {
    const StudySummary& s = result.summaries[i];
    const std::string stem = "summary_" + to_string(s.estimand);
    if (i == 0) {
      auto f = open("summary.csv");
      write_summary_csv(f, s);
      auto g = open("summary_converged.csv");
      write_summary_csv(g, s, true);
    }
    auto f = open(stem + ".csv");
    write_summary_csv(f, s);
    auto g = open(stem + "_converged.csv");
    write_summary_csv(g, s, true);
  }
  {
    auto f = open("selection.csv");
    write_selection_csv(f, result.selection);
  }

  const StudyConfig& c = result.config;
  nlohmann::ordered_json j;
  j["treatment_kind"] = model::to_string(c.scenario.treatment_kind);
  j["scenario"] = dgp::to_string(c.scenario.scenario);
  j["copula"] = stats::to_string(c.scenario.copula);
  j["margin"] = stats::to_string(c.scenario.margin);
  j["t_df"] = c.scenario.t_df;
  j["n"] = c.scenario.n;
  j["seed"] = c.scenario.seed;
  j["reps"] = c.reps;
  std::vector<std::string> methods;
  for (MethodId m : c.resolved_methods()) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["xi_mode"] = est::to_string(c.xi_mode);
  j["sls_second_stage"] = est::to_string(c.sls_second_stage);
  j["oracle_draws"] = c.oracle_draws;
  j["description"] = c.scenario.describe();
  nlohmann::ordered_json truth;
  truth["coefficient"] = result.truth.coefficient;
  truth["p_y1"] = result.truth.effect.p_y1;
  truth["p_y0"] = result.truth.effect.p_y0;
  truth["ate"] = result.truth.effect.ate;
  j["truth"] = truth;
  std::vector<std::string> estimands;
  for (const StudySummary& s : result.summaries) estimands.push_back(to_string(s.estimand));
  j["estimands"] = estimands;
  auto f = open("study.json");
  f << j.dump(2) << '\n';
}

}  // namespace limlsel::mc
