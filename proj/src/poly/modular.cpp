#include "seqlab/poly/modular.hpp"

#include "seqlab/errors.hpp"

namespace seqlab::poly {

namespace {

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, mod);
    base = mulmod(base, base, mod);
    exp >>= 1;
  }
  return result;
}

mpz_class from_u64(std::uint64_t v) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return z;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> default_primes(std::size_t count) {
  static const std::vector<std::uint64_t> cache = [] {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t n = (1ULL << 62) - 1; primes.size() < 64; n -= 2)
      if (is_prime_u64(n)) primes.push_back(n);
    return primes;
  }();
  if (count > cache.size()) throw PreconditionError("too many primes requested");
  return {cache.begin(), cache.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::size_t primes_needed(const mpz_class& bound) {
  const mpz_class target = 2 * bound;
  mpz_class product = 1;
  std::size_t count = 0;
  for (auto p : default_primes(64)) {
    if (product > target) break;
    product *= from_u64(p);
    ++count;
  }
  if (product <= target) throw PreconditionError("coefficient bound exceeds the multimodular range");
  return count;
}

mpz_class crt_symmetric(std::span<const Residue> residues) {
  mpz_class value = 0;
  mpz_class modulus = 1;
  for (const auto& r : residues) {
    const mpz_class p = from_u64(r.prime);
    // value + modulus * k = r (mod p)
    mpz_class diff = from_u64(r.value) - value;
    mpz_class inv;
    mpz_class mod_p = modulus % p;
    if (mpz_invert(inv.get_mpz_t(), mod_p.get_mpz_t(), p.get_mpz_t()) == 0)
      throw PreconditionError("CRT moduli are not coprime");
    mpz_class k = (diff * inv) % p;
    if (k < 0) k += p;
    value += modulus * k;
    modulus *= p;
  }
  if (2 * value > modulus) value -= modulus;
  return value;
}

std::uint64_t mpz_mod_u64(const mpz_class& value, std::uint64_t p) {
  mpz_class r = value % from_u64(p);
  if (r < 0) r += from_u64(p);
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, r.get_mpz_t());
  return out;
}

}  // namespace seqlab::poly
