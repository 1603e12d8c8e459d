#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace seqlab::poly {

struct Monomial {
  std::vector<std::uint32_t> exponents;

  std::uint32_t degree() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

struct Term {
  std::uint32_t var = 0;
  std::int64_t coeff = 0;
};

// c_1 v_1 + ... + c_n v_n + constant, with distinct variables and nonzero
// coefficients.
struct LinearForm {
  std::vector<Term> terms;
  std::int64_t constant = 0;

  std::uint32_t max_var() const;
  std::uint32_t min_var() const;
  // Sum of absolute values of all coefficients including the constant.
  std::uint64_t l1_norm() const;
  std::string to_string(char prefix) const;
};

enum class FactorKind { vandermonde, window, mixed, generic };

enum class Family { generic, q, h_top, r };

struct FamilyParams {
  int k = 0;
  int ell = 0;
  int t = 0;
  std::int64_t u = 1;
};

// A polynomial kept as an unexpanded product of linear forms.
class FormProduct {
 public:
  explicit FormProduct(std::uint32_t variable_count, char prefix = 'x')
      : variable_count_(variable_count), prefix_(prefix) {}

  // Merges repeated variables, drops zero coefficients; rejects identically
  // zero forms and out-of-range variables.
  void add_factor(LinearForm form, FactorKind kind = FactorKind::generic);

  std::uint32_t variable_count() const { return variable_count_; }
  char prefix() const { return prefix_; }
  const std::vector<LinearForm>& factors() const { return factors_; }
  const std::vector<FactorKind>& kinds() const { return kinds_; }
  std::size_t total_degree() const { return factors_.size(); }
  bool homogeneous() const;
  std::size_t count(FactorKind kind) const;

  Family family() const { return family_; }
  const FamilyParams& params() const { return params_; }
  void set_family(Family family, FamilyParams params) {
    family_ = family;
    params_ = params;
  }

  // Variable classes whose complete pairwise-difference products
  // (x_j - x_i, i before j) appear among the factors tagged vandermonde.
  const std::vector<std::vector<std::uint32_t>>& vandermonde_classes() const { return classes_; }
  void set_vandermonde_classes(std::vector<std::vector<std::uint32_t>> classes) { classes_ = std::move(classes); }

  // Upper bound on the absolute value of every coefficient: product of the
  // factors' l1 norms.
  mpz_class coefficient_bound() const;

 private:
  std::uint32_t variable_count_;
  char prefix_;
  std::vector<LinearForm> factors_;
  std::vector<FactorKind> kinds_;
  Family family_ = Family::generic;
  FamilyParams params_;
  std::vector<std::vector<std::uint32_t>> classes_;
};

std::string to_string(Family family);

}  // namespace seqlab::poly
