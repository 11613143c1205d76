#include "limlsel/select/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>
#include <tuple>

#include "limlsel/est/linalg.hpp"

namespace limlsel::select {

using model::CandidateCatalog;
using model::Dataset;

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::laic: return "laic";
    case Criterion::lbic: return "lbic";
    case Criterion::aic: return "aic";
  }
  return "?";
}

Criterion parse_criterion(const std::string& name) {
  if (name == "laic") return Criterion::laic;
  if (name == "lbic") return Criterion::lbic;
  if (name == "aic") return Criterion::aic;
  throw std::invalid_argument("unknown criterion '" + name + "' (expected laic, lbic or aic)");
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::true_model: return "true_model";
    case Classification::including_true: return "including_true";
    case Classification::misspecified: return "misspecified";
  }
  return "?";
}

double criterion_value(Criterion c, double loglik, int n_params, std::size_t n_obs) {
  if (!std::isfinite(loglik)) throw std::invalid_argument("criterion needs a finite loglik");
  if (n_obs == 0) throw std::invalid_argument("criterion needs n_obs > 0");
  const double penalty = c == Criterion::lbic ? std::log(static_cast<double>(n_obs)) : 2.0;
  return -2.0 * loglik + penalty * n_params;
}

CriterionValue criterion(const est::FitResult& fit, Criterion c, std::size_t n_obs) {
  return {c, criterion_value(c, fit.loglik, fit.n_params, n_obs), fit.n_params, n_obs};
}

Classification classify_stage(const std::string& label, const CandidateCatalog& cat) {
  if (label == cat.true_label) return Classification::true_model;
  return model::nests(cat.at(label), cat.true_formula()) ? Classification::including_true
                                                         : Classification::misspecified;
}

Classification classify(const std::string& treatment_label, const std::string& outcome_label,
                        const CandidateCatalog& cat_t, const CandidateCatalog& cat_o) {
  const Classification t = classify_stage(treatment_label, cat_t);
  const Classification o = classify_stage(outcome_label, cat_o);
  if (t == Classification::true_model && o == Classification::true_model) {
    return Classification::true_model;
  }
  if (t != Classification::misspecified && o != Classification::misspecified) {
    return Classification::including_true;
  }
  return Classification::misspecified;
}

namespace {

void check_nonempty(const CandidateCatalog& cat_t, const CandidateCatalog& cat_o) {
  if (cat_t.candidates.empty() || cat_o.candidates.empty()) {
    throw std::invalid_argument("candidate catalogs must be nonempty");
  }
}

// Index of the best converged row in [first, last), or nullopt.
std::optional<std::size_t> argmin(const std::vector<CandidateRow>& rows, std::size_t first,
                                  std::size_t last) {
  std::optional<std::size_t> best;
  auto key = [&](std::size_t i) {
    const CandidateRow& r = rows[i];
    return std::tie(r.value, r.n_params, r.treatment_label, r.outcome_label);
  };
  for (std::size_t i = first; i < last; ++i) {
    if (!rows[i].converged) continue;
    if (!best || key(i) < key(*best)) best = i;
  }
  return best;
}

template <class F>
void run_indexed(std::size_t count, unsigned parallelism, F&& task) {
  const unsigned workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(count)));
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

const est::FitResult& LimlCandidates::fit(const std::string& treatment_label,
                                          const std::string& outcome_label) const {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].treatment_label == treatment_label && rows[k].outcome_label == outcome_label) {
      return fits[k];
    }
  }
  throw std::invalid_argument("no candidate fit for (" + treatment_label + ", " + outcome_label +
                              ")");
}

LimlCandidates fit_liml_candidates(const Dataset& data, const CandidateCatalog& cat_t,
                                   const CandidateCatalog& cat_o, const SelectOptions& opts) {
  check_nonempty(cat_t, cat_o);
  const std::size_t nt = cat_t.candidates.size();
  const std::size_t no = cat_o.candidates.size();
  LimlCandidates out;
  out.n_obs = data.size();
  out.fits.resize(nt * no);
  out.rows.resize(nt * no);

  run_indexed(nt * no, opts.parallelism, [&](std::size_t k) {
    const model::ModelFormula& ft = cat_t.candidates[k / no];
    const model::ModelFormula& fo = cat_o.candidates[k % no];
    CandidateRow& row = out.rows[k];
    row.treatment_label = ft.label();
    row.outcome_label = fo.label();
    try {
      out.fits[k] = est::fit_liml(data, ft, fo, opts.xi_mode, opts.liml);
      row.loglik = out.fits[k].loglik;
      row.n_params = out.fits[k].n_params;
      row.converged = out.fits[k].converged && std::isfinite(out.fits[k].loglik);
      row.note = out.fits[k].note;
    } catch (const est::RankDeficientError& e) {
      row.note = e.what();
    }
    row.value = std::numeric_limits<double>::quiet_NaN();
  });
  return out;
}

SelectionResult choose_liml(const LimlCandidates& fits, const CandidateCatalog& cat_t,
                            const CandidateCatalog& cat_o, Criterion c) {
  SelectionResult out;
  out.method = est::Method::liml;
  out.criterion = c;
  out.n_obs = fits.n_obs;
  out.table = fits.rows;
  for (CandidateRow& r : out.table) {
    if (r.converged) r.value = criterion_value(c, r.loglik, r.n_params, fits.n_obs);
    out.excluded += r.converged ? 0 : 1;
  }
  const std::optional<std::size_t> best = argmin(out.table, 0, out.table.size());
  if (!best) throw SelectionError("no candidate LIML fit converged");
  out.chosen_treatment = out.table[*best].treatment_label;
  out.chosen_outcome = out.table[*best].outcome_label;
  out.fit = fits.fits[*best];
  out.treatment_class = classify_stage(out.chosen_treatment, cat_t);
  out.outcome_class = classify_stage(out.chosen_outcome, cat_o);
  out.classification = classify(out.chosen_treatment, out.chosen_outcome, cat_t, cat_o);
  return out;
}

SelectionResult select_liml(const Dataset& data, const CandidateCatalog& cat_t,
                            const CandidateCatalog& cat_o, Criterion c,
                            const SelectOptions& opts) {
  return choose_liml(fit_liml_candidates(data, cat_t, cat_o, opts), cat_t, cat_o, c);
}

SelectionResult select_2sri(const Dataset& data, const CandidateCatalog& cat_t,
                            const CandidateCatalog& cat_o) {
  check_nonempty(cat_t, cat_o);
  SelectionResult out;
  out.method = est::Method::two_sri;
  out.criterion = Criterion::aic;
  out.n_obs = data.size();

  std::vector<est::Stage1Fit> stage1;
  for (const model::ModelFormula& ft : cat_t.candidates) {
    CandidateRow row;
    row.treatment_label = ft.label();
    est::Stage1Fit s;
    try {
      s = est::fit_stage1(data, ft);
      row.loglik = s.loglik;
      row.n_params = s.n_params;
      row.converged = s.converged && std::isfinite(s.loglik);
      if (!s.converged) row.note = "first-stage fit did not converge";
    } catch (const est::RankDeficientError& e) {
      row.note = e.what();
    }
    row.value = row.converged ? criterion_value(Criterion::aic, row.loglik, row.n_params, data.size())
                              : std::numeric_limits<double>::quiet_NaN();
    out.table.push_back(row);
    stage1.push_back(std::move(s));
  }
  const std::optional<std::size_t> b1 = argmin(out.table, 0, out.table.size());
  if (!b1) throw SelectionError("no first-stage treatment fit converged");
  const model::ModelFormula& ft = cat_t.candidates[*b1];

  const std::size_t offset = out.table.size();
  std::vector<est::FitResult> fits;
  for (const model::ModelFormula& fo : cat_o.candidates) {
    CandidateRow row;
    row.treatment_label = ft.label();
    row.outcome_label = fo.label();
    est::FitResult f;
    try {
      f = est::fit_2sri(data, stage1[*b1], ft, fo);
      row.loglik = f.loglik;
      row.n_params = f.n_params;
      row.converged = f.converged && std::isfinite(f.loglik);
      row.note = f.note;
    } catch (const est::RankDeficientError& e) {
      row.note = e.what();
    }
    row.value = row.converged ? criterion_value(Criterion::aic, row.loglik, row.n_params, data.size())
                              : std::numeric_limits<double>::quiet_NaN();
    out.table.push_back(row);
    fits.push_back(std::move(f));
  }
  for (const CandidateRow& r : out.table) out.excluded += r.converged ? 0 : 1;
  const std::optional<std::size_t> b2 = argmin(out.table, offset, out.table.size());
  if (!b2) throw SelectionError("no second-stage outcome fit converged");
  out.chosen_treatment = ft.label();
  out.chosen_outcome = out.table[*b2].outcome_label;
  out.fit = std::move(fits[*b2 - offset]);
  out.treatment_class = classify_stage(out.chosen_treatment, cat_t);
  out.outcome_class = classify_stage(out.chosen_outcome, cat_o);
  out.classification = classify(out.chosen_treatment, out.chosen_outcome, cat_t, cat_o);
  return out;
}

}  // namespace limlsel::select
