#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace seqlab::poly {

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

// The first `count` primes below 2^62, in decreasing order.
std::vector<std::uint64_t> default_primes(std::size_t count);

// Number of default primes whose product exceeds 2 * bound.
std::size_t primes_needed(const mpz_class& bound);

struct Residue {
  std::uint64_t prime = 0;
  std::uint64_t value = 0;
};

// Chinese remaindering into the symmetric range (-M/2, M/2].
mpz_class crt_symmetric(std::span<const Residue> residues);

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline std::uint64_t reduce_signed(std::int64_t c, std::uint64_t p) {
  if (c >= 0) return static_cast<std::uint64_t>(c) % p;
  const std::uint64_t r = (static_cast<std::uint64_t>(-(c + 1)) + 1) % p;
  return r == 0 ? 0 : p - r;
}

std::uint64_t mpz_mod_u64(const mpz_class& value, std::uint64_t p);

}  // namespace seqlab::poly
