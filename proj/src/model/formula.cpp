#include "limlsel/model/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace limlsel::model {

std::string to_string(Side side) { return side == Side::treatment ? "treatment" : "outcome"; }

Term Term::interaction(Variable p, Variable q) {
  if (p == q) throw std::invalid_argument("interaction operands must differ");
  if (q < p) std::swap(p, q);
  return {Kind::interaction, p, q};
}

std::string Term::label() const {
  switch (kind) {
    case Kind::intercept: return "1";
    case Kind::main: return to_string(a);
    case Kind::interaction: return to_string(a) + "*" + to_string(b);
  }
  return "?";
}

ModelFormula::ModelFormula(Side side, std::string label, std::vector<Term> terms)
    : side_(side), label_(std::move(label)), terms_(std::move(terms)) {
  if (terms_.empty() || terms_.front().kind != Term::Kind::intercept) {
    throw std::invalid_argument("formula " + label_ + ": intercept must be the first term");
  }
  const Variable forbidden = side_ == Side::treatment ? Variable::w : Variable::z;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    if (i > 0 && t.kind == Term::Kind::intercept) {
      throw std::invalid_argument("formula " + label_ + ": repeated intercept");
    }
    if (t.kind == Term::Kind::interaction && t.a == t.b) {
      throw std::invalid_argument("formula " + label_ + ": interaction operands must differ");
    }
    if (t.uses(forbidden)) {
      throw std::invalid_argument("formula " + label_ + ": variable " + to_string(forbidden) +
                                  " is not allowed in a " + to_string(side_) + " model");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (terms_[j] == t) {
        throw std::invalid_argument("formula " + label_ + ": duplicate term " + t.label());
      }
    }
  }
}

bool ModelFormula::contains(const Term& t) const {
  return std::find(terms_.begin(), terms_.end(), t) != terms_.end();
}

bool ModelFormula::uses(Variable v) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.uses(v); });
}

std::string ModelFormula::describe() const {
  std::string s;
  for (const Term& t : terms_) {
    if (!s.empty()) s += " + ";
    s += t.label();
  }
  return s;
}

double term_value(const Term& term, const Dataset& data, std::size_t i,
                  std::optional<double> w_override) {
  auto value = [&](Variable v) {
    if (v == Variable::w && w_override) return *w_override;
    return data.column(v)[i];
  };
  switch (term.kind) {
    case Term::Kind::intercept: return 1.0;
    case Term::Kind::main: return value(term.a);
    case Term::Kind::interaction: return value(term.a) * value(term.b);
  }
  return 0.0;
}

Eigen::VectorXd design_row(const ModelFormula& f, const Dataset& data, std::size_t i) {
  if (i >= data.size()) {
    throw std::out_of_range("row " + std::to_string(i) + " out of range for " +
                            std::to_string(data.size()) + " observations");
  }
  Eigen::VectorXd row(static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j) {
    row(static_cast<Eigen::Index>(j)) = term_value(f.terms()[j], data, i);
  }
  return row;
}

Eigen::MatrixXd design_matrix(const ModelFormula& f, const Dataset& data,
                              std::optional<double> w_override) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j) {
    const Term& t = f.terms()[j];
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i, static_cast<Eigen::Index>(j)) =
          term_value(t, data, static_cast<std::size_t>(i), w_override);
    }
  }
  return x;
}

bool nests(const ModelFormula& outer, const ModelFormula& inner) {
  if (outer.side() != inner.side()) {
    throw std::invalid_argument("cannot compare " + to_string(outer.side()) + " formula " +
                                outer.label() + " with " + to_string(inner.side()) +
                                " formula " + inner.label());
  }
  return std::all_of(inner.terms().begin(), inner.terms().end(),
                     [&](const Term& t) { return outer.contains(t); });
}

const ModelFormula& CandidateCatalog::at(const std::string& label) const {
  return candidates[index_of(label)];
}

bool CandidateCatalog::contains(const std::string& label) const {
  return std::any_of(candidates.begin(), candidates.end(),
                     [&](const ModelFormula& f) { return f.label() == label; });
}

std::size_t CandidateCatalog::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].label() == label) return i;
  }
  throw std::invalid_argument("unknown " + to_string(side) + " model '" + label + "'");
}

const ModelFormula& CandidateCatalog::true_formula() const {
  if (contains(true_label)) return at(true_label);
  if (truth && truth->label() == true_label) return *truth;
  throw std::invalid_argument("true " + to_string(side) + " model '" + true_label +
                              "' is not in the catalog");
}

CandidateCatalog CandidateCatalog::restricted(const std::vector<std::string>& labels) const {
  CandidateCatalog out{side, {}, true_label, std::nullopt};
  for (const std::string& l : labels) out.candidates.push_back(at(l));
  if (!out.contains(true_label)) out.truth = true_formula();
  return out;
}

namespace {

using V = Variable;

Term m(V v) { return Term::main(v); }
Term x(V a, V b) { return Term::interaction(a, b); }
const Term one = Term::intercept();

}  // namespace

std::pair<CandidateCatalog, CandidateCatalog> catalog_continuous() {
  const Side t = Side::treatment;
  CandidateCatalog treat{t,
                         {
                             ModelFormula(t, "a1", {one, m(V::z)}),
                             ModelFormula(t, "a2", {one, m(V::z), m(V::x2)}),
                             ModelFormula(t, "a3", {one, m(V::z), m(V::x3)}),
                             ModelFormula(t, "a4", {one, m(V::z), m(V::x2), m(V::x3)}),
                             ModelFormula(t, "a5", {one, m(V::z), m(V::x2), x(V::z, V::x2)}),
                             ModelFormula(t, "a6", {one, m(V::z), m(V::x3), x(V::z, V::x3)}),
                             ModelFormula(t, "a7",
                                          {one, m(V::z), m(V::x2), m(V::x3), x(V::z, V::x2),
                                           x(V::z, V::x3), x(V::x2, V::x3)}),
                         },
                         "a4", std::nullopt};
  const Side o = Side::outcome;
  CandidateCatalog outcome{
      o,
      {
          ModelFormula(o, "b1", {one, m(V::w)}),
          ModelFormula(o, "b2", {one, m(V::w), m(V::x1), m(V::x2)}),
          ModelFormula(o, "b3", {one, m(V::w), m(V::x1), m(V::x2), m(V::x3)}),
          ModelFormula(o, "b4", {one, m(V::w), m(V::x1), m(V::x2), x(V::x1, V::x2)}),
          ModelFormula(o, "b5",
                       {one, m(V::w), m(V::x1), m(V::x2), m(V::x3), x(V::x1, V::x2),
                        x(V::x1, V::x3), x(V::x2, V::x3)}),
      },
      "b2", std::nullopt};
  return {std::move(treat), std::move(outcome)};
}

CandidateCatalog catalog_dichotomous() {
  const Side o = Side::outcome;
  const std::vector<Term> b3 = {one, m(V::w), m(V::x1), m(V::x2), m(V::x3)};
  auto with = [](std::vector<Term> base, std::initializer_list<Term> extra) {
    base.insert(base.end(), extra);
    return base;
  };
  return {o,
          {
              ModelFormula(o, "b1", {one, m(V::w)}),
              ModelFormula(o, "b2", {one, m(V::w), m(V::x1), m(V::x2)}),
              ModelFormula(o, "b3", b3),
              ModelFormula(o, "b4",
                           with(b3, {x(V::x1, V::x2), x(V::x1, V::x3), x(V::x2, V::x3)})),
              ModelFormula(o, "b5", {one, m(V::w), m(V::x1), m(V::x2), x(V::w, V::x1)}),
              ModelFormula(o, "b6", with(b3, {x(V::w, V::x1)})),
              ModelFormula(o, "b7", with(b3, {x(V::w, V::x1), x(V::x1, V::x2), x(V::x1, V::x3),
                                              x(V::x2, V::x3)})),
          },
          "b5", std::nullopt};
}

CandidateCatalog catalog_dichotomous_treatment() {
  return catalog_continuous().first.restricted({"a4"});
}

}  // namespace limlsel::model
