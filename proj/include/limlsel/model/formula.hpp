#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "limlsel/model/dataset.hpp"

namespace limlsel::model {

enum class Side { treatment, outcome };

std::string to_string(Side side);

struct Term {
  enum class Kind { intercept, main, interaction };

  Kind kind = Kind::intercept;
  Variable a = Variable::z;
  Variable b = Variable::z;

  static Term intercept() { return {}; }
  static Term main(Variable v) { return {Kind::main, v, v}; }
  // Operands are stored in enum order so that x1*x2 and x2*x1 compare equal.
  static Term interaction(Variable p, Variable q);

  bool uses(Variable v) const { return kind != Kind::intercept && (a == v || b == v); }
  std::string label() const;

  friend auto operator<=>(const Term&, const Term&) = default;
};

class ModelFormula {
 public:
  // Throws std::invalid_argument when the intercept is missing or not first,
  // a term repeats, an interaction squares a variable, or a variable is used
  // on the wrong side (w in a treatment model, z in an outcome model).
  ModelFormula(Side side, std::string label, std::vector<Term> terms);

  Side side() const { return side_; }
  const std::string& label() const { return label_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool contains(const Term& t) const;
  bool uses(Variable v) const;
  std::string describe() const;

 private:
  Side side_;
  std::string label_;
  std::vector<Term> terms_;
};

// Value of a term for row i. When w_override is set it replaces the observed
// treatment in every term that involves w.
double term_value(const Term& term, const Dataset& data, std::size_t i,
                  std::optional<double> w_override = std::nullopt);

// Throws std::out_of_range when i >= n.
Eigen::VectorXd design_row(const ModelFormula& f, const Dataset& data, std::size_t i);
Eigen::MatrixXd design_matrix(const ModelFormula& f, const Dataset& data,
                              std::optional<double> w_override = std::nullopt);

// True iff inner's terms are a subset of outer's. Throws std::invalid_argument
// when the sides differ.
bool nests(const ModelFormula& outer, const ModelFormula& inner);

struct CandidateCatalog {
  Side side = Side::treatment;
  std::vector<ModelFormula> candidates;
  std::string true_label;
  // Copy of the true formula when it is not among the candidates.
  std::optional<ModelFormula> truth;

  // Throws std::invalid_argument on an unknown label.
  const ModelFormula& at(const std::string& label) const;
  const ModelFormula& true_formula() const;
  bool contains(const std::string& label) const;
  std::size_t index_of(const std::string& label) const;

  // Restricts to the named candidates, in the given order. The true label is
  // kept as-is even when it is filtered out of the candidate list.
  CandidateCatalog restricted(const std::vector<std::string>& labels) const;
};

// Treatment a1..a7 (a4 true) and outcome b1..b5 (b2 true).
std::pair<CandidateCatalog, CandidateCatalog> catalog_continuous();
// Outcome b1..b7 (b5 true).
CandidateCatalog catalog_dichotomous();
// Singleton treatment catalog {a4} used by dichotomous studies.
CandidateCatalog catalog_dichotomous_treatment();

}  // namespace limlsel::model
