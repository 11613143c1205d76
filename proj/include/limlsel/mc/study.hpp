#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "limlsel/dgp/scenario.hpp"
#include "limlsel/effects/effects.hpp"
#include "limlsel/est/fit.hpp"
#include "limlsel/select/selection.hpp"

namespace limlsel::mc {

enum class MethodId { two_sls, two_sri, liml_laic, liml_lbic, two_sri_full, liml_full };

std::string to_string(MethodId m);
MethodId parse_method(const std::string& name);
// Continuous studies run all six methods; dichotomous studies drop 2SLS.
std::vector<MethodId> default_methods(model::TreatmentKind kind);
bool is_selection_method(MethodId m);

// Reported quantity: the W coefficient for continuous studies, the plug-in
// p_y1 and ate for dichotomous ones.
enum class Estimand { coefficient, p_y1, ate };

std::string to_string(Estimand e);
std::vector<Estimand> study_estimands(model::TreatmentKind kind);

struct StudyConfig {
  dgp::ScenarioConfig scenario;
  // Empty means default_methods(scenario.treatment_kind).
  std::vector<MethodId> methods;
  std::size_t reps = 200;
  unsigned parallelism = 1;
  est::XiMode xi_mode = est::XiMode::estimated;
  est::SecondStage sls_second_stage = est::SecondStage::probit;
  std::size_t oracle_draws = effects::kOracleDraws;

  std::vector<MethodId> resolved_methods() const;
  // Throws std::invalid_argument on reps == 0 or a bad scenario.
  void validate() const;
};

struct Catalogs {
  model::CandidateCatalog treatment;
  model::CandidateCatalog outcome;
  // Candidate in each catalog that nests every other candidate.
  std::string full_treatment;
  std::string full_outcome;
};

Catalogs study_catalogs(model::TreatmentKind kind);

struct ReplicationRecord {
  std::size_t rep = 0;
  MethodId method = MethodId::liml_lbic;
  std::string chosen_t;
  std::string chosen_o;
  bool converged = false;
  // NaN when the quantity is unavailable for this record.
  double estimate = 0.0;
  double p_y1 = 0.0;
  double ate = 0.0;
  // Empty when no pair could be chosen.
  std::optional<select::Classification> classification;
  std::string note;

  double value(Estimand e) const;
};

// All methods on one replication's dataset. Never throws on estimation
// failures; they come back as nonconverged records with a note.
std::vector<ReplicationRecord> run_replication(const StudyConfig& cfg, std::size_t rep);

struct Truth {
  double coefficient = 0.0;
  effects::EffectEstimate effect;

  double value(Estimand e) const;
};

// Population values for the scenario, cached per scenario and draw count.
Truth study_truth(const StudyConfig& cfg);

struct EstimateStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator, 0 for a single value
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
};

// Statistics of the finite values; throws std::invalid_argument when there
// are none.
EstimateStats estimate_stats(std::vector<double> values, double truth);

struct MethodSummary {
  MethodId method = MethodId::liml_lbic;
  std::size_t reps = 0;
  EstimateStats all;
  std::optional<EstimateStats> converged_only;
  int nonconverged = 0;
  // Selection counts; only set for methods that select a model.
  std::optional<int> true_n;
  std::optional<int> including_n;
  // Two-step selections only: both stages chose a model nesting the truth.
  std::optional<int> both_n;
};

struct StudySummary {
  Estimand estimand = Estimand::coefficient;
  double truth = 0.0;
  std::vector<MethodSummary> methods;
};

// Groups records by method in first-appearance order. Selection counts are
// recomputed from the chosen labels against the catalogs.
StudySummary summarize(const std::vector<ReplicationRecord>& records, Estimand estimand,
                       double truth, const Catalogs& catalogs);

// Per-step selection counts mirroring the selection table: one "pair" row
// per selecting method, plus "1st" and "2nd" rows for two-step selection.
struct SelectionCounts {
  MethodId method = MethodId::liml_lbic;
  std::string step;
  std::size_t reps = 0;
  int true_n = 0;
  int including_n = 0;
  std::optional<int> both_n;
};

std::vector<SelectionCounts> selection_counts(const std::vector<ReplicationRecord>& records,
                                              const Catalogs& catalogs);

struct StudyResult {
  StudyConfig config;
  Truth truth;
  std::vector<ReplicationRecord> records;
  std::vector<StudySummary> summaries;  // one per estimand
  std::vector<SelectionCounts> selection;
};

// Records are ordered by (rep, method) regardless of parallelism.
StudyResult run_study(const StudyConfig& cfg);

// CSV formats.
inline constexpr const char* kRecordsHeader =
    "rep,method,chosen_t,chosen_o,converged,estimate,p_y1,ate,classification";
inline constexpr const char* kSummaryHeader =
    "method,mean,sd,median,min,max,bias,rmse,true_n,true_pct,incl_n,incl_pct,both_n,both_pct,"
    "nonconv";

void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);
// Throws model::DataError on malformed input.
std::vector<ReplicationRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const StudySummary& summary, bool converged_only = false);
void write_selection_csv(std::ostream& out, const std::vector<SelectionCounts>& counts);

struct SummaryRow {
  std::string method;
  std::vector<std::string> fields;  // in kSummaryHeader order after method
};

std::vector<SummaryRow> read_summary_csv(std::istream& in);

// Markdown table with the column names of the published summaries.
std::string markdown_report(const std::vector<SummaryRow>& rows, const std::string& title);

// Writes records.csv, summary.csv (primary estimand), summary_<estimand>.csv
// for every estimand, *_converged.csv blocks, selection.csv and study.json.
void write_study(const StudyResult& result, const std::string& out_dir);

}  // namespace limlsel::mc
