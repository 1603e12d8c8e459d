#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seqlab {

// An element (x, a) of N x| Z2, or a plain index (parity 0) in a group
// without parity structure. Ordered by (parity, npart).
struct Element {
  std::uint32_t npart = 0;
  std::uint8_t parity = 0;

  friend bool operator==(const Element&, const Element&) = default;
  friend std::strong_ordering operator<=>(const Element& a, const Element& b) {
    if (auto c = a.parity <=> b.parity; c != 0) return c;
    return a.npart <=> b.npart;
  }
};

std::string to_string(const Element& e, bool with_parity);

enum class GroupKind { cyclic, semidirect_cyclic, table, semidirect_table };

// How the automorphism (or a Cayley table's associativity) was validated.
enum class ValidationMode { exhaustive, sampled };

// Immutable finite group. Copies share the underlying tables.
//
// Elements are addressed either as Element or as a dense id in
// [0, size()); id = parity * inner_order() + npart, which coincides with the
// canonical (parity, npart) order.
class Group {
 public:
  static Group cyclic(std::uint32_t n);
  // Z_p x|_u Z2 where the odd coset acts by x -> u*x. Requires u^2 = 1 mod p.
  static Group semidirect_cyclic(std::uint32_t p, std::int64_t u);
  // Plain group from a Cayley table (row i, column j holds i*j; identity 0).
  static Group from_table(std::vector<std::vector<std::uint32_t>> table);
  // N x|_phi Z2 over a Cayley-table group N; phi is an involutive automorphism.
  static Group semidirect_table(std::vector<std::vector<std::uint32_t>> table,
                                std::vector<std::uint32_t> phi);

  GroupKind kind() const { return impl_->kind; }
  bool has_parity() const {
    return impl_->kind == GroupKind::semidirect_cyclic ||
           impl_->kind == GroupKind::semidirect_table;
  }
  std::uint32_t inner_order() const { return impl_->n; }
  std::uint32_t size() const { return has_parity() ? 2 * impl_->n : impl_->n; }
  // Multiplier u for semidirect_cyclic (1 for a direct product).
  std::int64_t multiplier() const { return impl_->u; }
  ValidationMode validation() const { return impl_->validation; }
  // Canonical spec string, e.g. "semidirect:cyclic:5:u=4".
  const std::string& description() const { return impl_->description; }

  Element identity() const { return {}; }
  bool contains(const Element& e) const;
  Element op(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  // Second coordinate; throws PreconditionError without parity structure.
  std::uint8_t parity(const Element& a) const;

  std::uint32_t id(const Element& e) const {
    return static_cast<std::uint32_t>(e.parity) * impl_->n + e.npart;
  }
  Element element(std::uint32_t id) const {
    return {id % impl_->n, static_cast<std::uint8_t>(id / impl_->n)};
  }
  // Fast path on dense ids; uses the cached Cayley table when available.
  std::uint32_t op_id(std::uint32_t a, std::uint32_t b) const {
    if (!impl_->cayley.empty()) return impl_->cayley[static_cast<std::size_t>(a) * size() + b];
    return id(op(element(a), element(b)));
  }

  // All elements in canonical order.
  std::vector<Element> elements() const;

 private:
  struct Impl {
    GroupKind kind = GroupKind::cyclic;
    std::uint32_t n = 1;
    std::int64_t u = 1;
    std::vector<std::uint32_t> inner;      // n*n inner table (table kinds)
    std::vector<std::uint32_t> inner_inv;  // inner inverses (table kinds)
    std::vector<std::uint32_t> phi;        // automorphism (semidirect_table)
    std::vector<std::uint32_t> cayley;     // full table over ids, small groups
    ValidationMode validation = ValidationMode::exhaustive;
    std::string description;
  };

  explicit Group(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  static Group finish(Impl impl);

  std::uint32_t inner_op(std::uint32_t x, std::uint32_t y) const;
  std::uint32_t inner_inverse(std::uint32_t x) const;
  std::uint32_t apply_phi(std::uint8_t a, std::uint32_t x) const;

  std::shared_ptr<const Impl> impl_;
};

// Parses the group grammar:
//   cyclic:<n> | zpxz2:<p> | dihedral:<2p> | semidirect:cyclic:<p>:u=<u>
//   | table:<path>[:phi=<comma-separated permutation>]
Group parse_group_spec(std::string_view text);

// Reads a Cayley table file: first line n, then n rows of n indices.
std::vector<std::vector<std::uint32_t>> read_cayley_table(const std::string& path);

}  // namespace seqlab
