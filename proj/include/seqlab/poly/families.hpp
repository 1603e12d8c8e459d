#pragma once

#include <cstdint>

#include "seqlab/poly/forms.hpp"

namespace seqlab::poly {

// Parity of the m-th partial sum of the alternating sequence 0,1,0,1,...:
// 0 when m = 0,1 (mod 4), else 1.
int b_sequence(std::int64_t m);

// The alternating-parity sequencing polynomial over x_1..x_k: same-parity
// differences (x_j - x_i) times, for every window 0 <= i < j <= k with
// 2 <= j - i <= t and b_i = b_j, the segment form
//   x_{i+1} + u^{a_{i+1}} x_{i+2} + ... + u^{a_{i+1}+...+a_{j-1}} x_j
// where a_m = (m - 1) mod 2. u = 1 gives Z_p x Z2, u = -1 the dihedral group.
FormProduct build_q(int k, int t, std::int64_t u);

// Full-degree part in z_1..z_ell (z_r = x_{k-ell+r}) of the quotient left after
// fixing the first k - ell elements: the z-restricted sequencing polynomial
// times the z-parts of every window that straddles the boundary.
FormProduct build_h_top(int k, int ell, int t, std::int64_t u);

// The reduced polynomial built at an anchor k >= ell + t - 1. Anchors with
// the same parity of k - ell give identical products.
FormProduct build_r(int t, int ell, std::int64_t u, int anchor_k);
// Anchor k = ell + t - 1, the one the published ell = 16 and 17 values use.
FormProduct build_r(int t, int ell, std::int64_t u);

// All exponents half - 1.
Monomial bounding_monomial(std::uint32_t count, std::uint32_t half);

// Per-variable cap |class| - 1 from the product's parity classes.
Monomial bounding_monomial(const FormProduct& product);

bool divides(const Monomial& a, const Monomial& b);

}  // namespace seqlab::poly
