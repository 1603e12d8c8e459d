#include "seqlab/poly/forms.hpp"

#include <algorithm>
#include <map>

#include "seqlab/errors.hpp"

namespace seqlab::poly {

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (auto e : exponents) d += e;
  return d;
}

std::uint32_t LinearForm::max_var() const {
  std::uint32_t m = 0;
  for (const auto& term : terms) m = std::max(m, term.var);
  return m;
}

std::uint32_t LinearForm::min_var() const {
  std::uint32_t m = UINT32_MAX;
  for (const auto& term : terms) m = std::min(m, term.var);
  return m;
}

std::uint64_t LinearForm::l1_norm() const {
  std::uint64_t s = constant < 0 ? -static_cast<std::uint64_t>(constant) : constant;
  for (const auto& term : terms) s += term.coeff < 0 ? -static_cast<std::uint64_t>(term.coeff) : term.coeff;
  return s;
}

std::string LinearForm::to_string(char prefix) const {
  std::string out;
  for (const auto& term : terms) {
    const bool neg = term.coeff < 0;
    const auto mag = neg ? -term.coeff : term.coeff;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    if (mag != 1) out += std::to_string(mag) + "*";
    out += prefix + std::to_string(term.var + 1);
  }
  if (constant != 0 || out.empty()) {
    if (out.empty()) return std::to_string(constant);
    out += constant < 0 ? " - " : " + ";
    out += std::to_string(constant < 0 ? -constant : constant);
  }
  return out;
}

void FormProduct::add_factor(LinearForm form, FactorKind kind) {
  std::map<std::uint32_t, std::int64_t> merged;
  for (const auto& term : form.terms) {
    if (term.var >= variable_count_) throw PreconditionError("linear form references an undeclared variable");
    merged[term.var] += term.coeff;
  }
  LinearForm clean;
  clean.constant = form.constant;
  for (const auto& [var, coeff] : merged)
    if (coeff != 0) clean.terms.push_back({var, coeff});
  if (clean.terms.empty() && clean.constant == 0) throw PreconditionError("linear form is identically zero");
  factors_.push_back(std::move(clean));
  kinds_.push_back(kind);
}

bool FormProduct::homogeneous() const {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const LinearForm& f) { return f.constant == 0 && !f.terms.empty(); });
}

std::size_t FormProduct::count(FactorKind kind) const {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), kind));
}

mpz_class FormProduct::coefficient_bound() const {
  mpz_class bound = 1;
  for (const auto& f : factors_) {
    mpz_class l1;
    mpz_set_ui(l1.get_mpz_t(), f.l1_norm());
    bound *= l1;
  }
  return bound;
}

std::string to_string(Family family) {
  switch (family) {
    case Family::q:
      return "q";
    case Family::h_top:
      return "h-top";
    case Family::r:
      return "r";
    default:
      return "generic";
  }
}

}  // namespace seqlab::poly
