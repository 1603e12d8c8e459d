#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "seqlab/poly/forms.hpp"
#include "seqlab/poly/modular.hpp"

namespace seqlab::poly {

// prune: multiply factors one at a time, keeping only monomials that divide
//        the target and can still be completed by the remaining factors.
// mitm:  expand two halves of the factor list separately, then pair
//        complementary monomials.
// naive: full expansion without pruning (at most 15 factors).
// sweep: expand only the non-Vandermonde factors, contracting each variable
//        against the Vandermonde determinant as soon as no further factor
//        touches it. Needs recorded Vandermonde classes. Smaller frontiers
//        per factor but more factors' worth of bookkeeping; prune is usually
//        faster on the table families.
// automatic: prune.
enum class Strategy { automatic, prune, mitm, naive, sweep };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

enum class FactorOrder { given, by_max_variable };

inline constexpr std::size_t kDefaultFrontierCap = 200'000'000;

// SEQLAB_FRONTIER_CAP if set, otherwise kDefaultFrontierCap.
std::size_t frontier_cap_from_env();

struct ExtractOptions {
  Strategy strategy = Strategy::automatic;
  FactorOrder order = FactorOrder::by_max_variable;
  // Empty: exact value via enough primes to exceed twice the coefficient
  // bound. Non-empty: residues for exactly these primes.
  std::vector<std::uint64_t> mod_primes;
  // With explicit mod_primes, also reconstruct a value by CRT.
  bool reconstruct = false;
  // Compute directly over arbitrary-precision integers instead of residues.
  bool bigint = false;
  std::size_t frontier_cap = kDefaultFrontierCap;
  unsigned jobs = 1;
};

struct Coefficient {
  // Set when the value was computed exactly or reconstructed.
  std::optional<mpz_class> value;
  // True when value is certified equal to the integer coefficient.
  bool exact = false;
  std::vector<Residue> residues;
};

struct ExtractResult {
  Coefficient coefficient;
  Strategy strategy = Strategy::automatic;  // the one actually run
  std::size_t frontier_peak = 0;
  double elapsed_ms = 0;
};

// Coefficient of `target` in the expansion of `product`. Throws
// PreconditionError on shape mismatch (and on degree mismatch for h-top
// products), ResourceCapExceeded when a frontier outgrows the cap.
ExtractResult coefficient(const FormProduct& product, const Monomial& target, const ExtractOptions& options = {});

// Single channel modulo p; exposed for tests and for the table driver.
std::uint64_t coefficient_mod(const FormProduct& product, const Monomial& target, std::uint64_t prime,
                              Strategy strategy, const ExtractOptions& options, std::size_t* frontier_peak = nullptr);

}  // namespace seqlab::poly
