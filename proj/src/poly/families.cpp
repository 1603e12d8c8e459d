#include "seqlab/poly/families.hpp"

#include "seqlab/errors.hpp"

namespace seqlab::poly {

namespace {

int a_sequence(std::int64_t m) { return static_cast<int>(((m - 1) % 2 + 2) % 2); }

// Window forms and same-parity differences of x_1..x_k, restricted to the
// variables x_{h+1}..x_k (renumbered from 0). Windows that start inside the
// fixed prefix keep only their restricted part and are tagged mixed.
FormProduct build_restricted(int k, int h, int t, std::int64_t u) {
  const int ell = k - h;
  FormProduct product(static_cast<std::uint32_t>(ell), h == 0 ? 'x' : 'z');
  auto var = [h](int m) { return static_cast<std::uint32_t>(m - h - 1); };

  std::vector<std::vector<std::uint32_t>> classes(2);
  for (int m = h + 1; m <= k; ++m) classes[static_cast<std::size_t>(m % 2)].push_back(var(m));
  if (classes[0].empty() || (!classes[1].empty() && classes[1].front() < classes[0].front()))
    std::swap(classes[0], classes[1]);
  for (const auto& cls : classes)
    for (std::size_t j = 1; j < cls.size(); ++j)
      for (std::size_t i = 0; i < j; ++i)
        product.add_factor({{{cls[j], 1}, {cls[i], -1}}, 0}, FactorKind::vandermonde);

  for (int i = 0; i < k; ++i) {
    for (int j = i + 2; j <= k && j - i <= t; ++j) {
      if (j <= h || b_sequence(i) != b_sequence(j)) continue;
      LinearForm form;
      int exponent = 0;  // a_{i+1} + ... + a_{m-1}
      for (int m = i + 1; m <= j; ++m) {
        if (m > i + 1) exponent += a_sequence(m - 1);
        if (m > h) form.terms.push_back({var(m), exponent % 2 == 0 ? 1 : u});
      }
      product.add_factor(std::move(form), i >= h ? FactorKind::window : FactorKind::mixed);
    }
  }
  std::erase_if(classes, [](const auto& c) { return c.empty(); });
  product.set_vandermonde_classes(std::move(classes));
  return product;
}

}  // namespace

int b_sequence(std::int64_t m) {
  if (m < 0) throw PreconditionError("b-sequence index must be nonnegative");
  const auto r = m % 4;
  return (r == 0 || r == 1) ? 0 : 1;
}

FormProduct build_q(int k, int t, std::int64_t u) {
  if (k < 1 || k % 2 != 0) throw PreconditionError("build_q needs an even k >= 2");
  if (t < 1 || t >= k) throw PreconditionError("build_q needs 1 <= t < k");
  if (u == 0) throw PreconditionError("u must be a unit");
  auto product = build_restricted(k, 0, t, u);
  product.set_family(Family::q, {k, k, t, u});
  return product;
}

FormProduct build_h_top(int k, int ell, int t, std::int64_t u) {
  if (k < 2 || k % 2 != 0) throw PreconditionError("build_h_top needs an even k");
  if (t < 1) throw PreconditionError("build_h_top needs t >= 1");
  if (ell < t + 1 || ell > k) throw PreconditionError("build_h_top needs t + 1 <= ell <= k");
  if (u == 0) throw PreconditionError("u must be a unit");
  auto product = build_restricted(k, k - ell, t, u);
  product.set_family(Family::h_top, {k, ell, t, u});
  return product;
}

FormProduct build_r(int t, int ell, std::int64_t u, int anchor_k) {
  if (t < 1 || ell < t + 1) throw PreconditionError("build_r needs t >= 1 and ell >= t + 1");
  if (anchor_k < ell + t - 1) throw PreconditionError("build_r needs an anchor k >= ell + t - 1");
  if (u == 0) throw PreconditionError("u must be a unit");
  // With k - ell >= t - 1 every boundary window starts at index >= 0, so the
  // result depends only on the parity of k - ell.
  auto product = build_restricted(anchor_k, anchor_k - ell, t, u);
  product.set_family(Family::r, {anchor_k, ell, t, u});
  return product;
}

FormProduct build_r(int t, int ell, std::int64_t u) { return build_r(t, ell, u, ell + t - 1); }

Monomial bounding_monomial(std::uint32_t count, std::uint32_t half) {
  if (half < 1) throw PreconditionError("bounding monomial needs half >= 1");
  return {std::vector<std::uint32_t>(count, half - 1)};
}

Monomial bounding_monomial(const FormProduct& product) {
  Monomial m{std::vector<std::uint32_t>(product.variable_count(), 0)};
  for (const auto& cls : product.vandermonde_classes())
    for (auto v : cls) m.exponents[v] = static_cast<std::uint32_t>(cls.size() - 1);
  return m;
}

bool divides(const Monomial& a, const Monomial& b) {
  if (a.exponents.size() != b.exponents.size()) return false;
  for (std::size_t i = 0; i < a.exponents.size(); ++i)
    if (a.exponents[i] > b.exponents[i]) return false;
  return true;
}

}  // namespace seqlab::poly
