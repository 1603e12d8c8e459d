#include "seqlab/groups.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "seqlab/errors.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

namespace {

constexpr std::uint32_t kCayleyCacheLimit = 2048;
constexpr std::uint32_t kExhaustiveAssociativity = 64;
constexpr std::uint32_t kExhaustiveAutomorphism = 4096;
constexpr int kRandomChecks = 100000;
constexpr std::uint64_t kValidationSeed = 0x5e91abULL;

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::uint64_t parse_uint(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw PreconditionError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw PreconditionError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

std::uint32_t parse_order(std::string_view s) {
  const std::uint64_t n = parse_uint(s, "group order");
  if (n < 1 || n > (1u << 30)) throw PreconditionError("group order out of range: " + std::string(s));
  return static_cast<std::uint32_t>(n);
}

// Validates a Cayley table with identity 0 and returns it flattened.
std::vector<std::uint32_t> validate_table(const std::vector<std::vector<std::uint32_t>>& table,
                                          ValidationMode& mode) {
  const std::size_t n = table.size();
  if (n == 0) throw PreconditionError("invalid table: empty");
  std::vector<std::uint32_t> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i].size() != n) throw PreconditionError("invalid table: row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      if (table[i][j] >= n) throw PreconditionError("invalid table: entry out of range");
      flat[i * n + j] = table[i][j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> row(n), col(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[flat[i * n + j]] || col[flat[j * n + i]])
        throw PreconditionError("invalid table: not a Latin square");
      row[flat[i * n + j]] = col[flat[j * n + i]] = true;
    }
    if (flat[i] != i || flat[i * n] != i) throw PreconditionError("invalid table: index 0 is not the identity");
  }
  auto assoc = [&](std::size_t a, std::size_t b, std::size_t c) {
    return flat[flat[a * n + b] * n + c] == flat[a * n + flat[b * n + c]];
  };
  if (n <= kExhaustiveAssociativity) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (!assoc(a, b, c)) throw PreconditionError("invalid table: not associative");
  } else {
    mode = ValidationMode::sampled;
    Rng rng(kValidationSeed);
    for (int r = 0; r < kRandomChecks; ++r)
      if (!assoc(rng.below(n), rng.below(n), rng.below(n)))
        throw PreconditionError("invalid table: not associative");
  }
  return flat;
}

void validate_phi(const std::vector<std::uint32_t>& flat, std::uint32_t n,
                  const std::vector<std::uint32_t>& phi, ValidationMode& mode) {
  if (phi.size() != n) throw PreconditionError("phi must have one entry per element of N");
  std::vector<bool> seen(n);
  for (auto v : phi) {
    if (v >= n || seen[v]) throw PreconditionError("phi is not a permutation");
    seen[v] = true;
  }
  for (std::uint32_t x = 0; x < n; ++x)
    if (phi[phi[x]] != x) throw PreconditionError("phi is not an involution");
  auto hom = [&](std::uint32_t a, std::uint32_t b) {
    return phi[flat[a * n + b]] == flat[phi[a] * n + phi[b]];
  };
  if (n <= kExhaustiveAutomorphism) {
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        if (!hom(a, b)) throw PreconditionError("phi is not a homomorphism");
  } else {
    mode = ValidationMode::sampled;
    Rng rng(kValidationSeed + 1);
    for (int r = 0; r < kRandomChecks; ++r)
      if (!hom(static_cast<std::uint32_t>(rng.below(n)), static_cast<std::uint32_t>(rng.below(n))))
        throw PreconditionError("phi is not a homomorphism");
  }
}

}  // namespace

std::string to_string(const Element& e, bool with_parity) {
  if (!with_parity) return std::to_string(e.npart);
  return "[" + std::to_string(e.npart) + "," + std::to_string(e.parity) + "]";
}

Group Group::finish(Impl impl) {
  Group g(std::make_shared<const Impl>(impl));
  const std::uint32_t size = g.size();
  if (size <= kCayleyCacheLimit) {
    std::vector<std::uint32_t> cayley(static_cast<std::size_t>(size) * size);
    for (std::uint32_t a = 0; a < size; ++a)
      for (std::uint32_t b = 0; b < size; ++b)
        cayley[static_cast<std::size_t>(a) * size + b] = g.id(g.op(g.element(a), g.element(b)));
    impl.cayley = std::move(cayley);
    g = Group(std::make_shared<const Impl>(std::move(impl)));
  }
  return g;
}

Group Group::cyclic(std::uint32_t n) {
  if (n < 1) throw PreconditionError("cyclic group needs n >= 1");
  Impl impl;
  impl.kind = GroupKind::cyclic;
  impl.n = n;
  impl.description = "cyclic:" + std::to_string(n);
  return finish(std::move(impl));
}

Group Group::semidirect_cyclic(std::uint32_t p, std::int64_t u) {
  if (p < 1) throw PreconditionError("semidirect product needs p >= 1");
  const std::int64_t um = mod(u, p);
  if (static_cast<std::int64_t>((static_cast<unsigned __int128>(um) * um) % p) != mod(1, p))
    throw PreconditionError("u=" + std::to_string(u) + " is not an involution mod " + std::to_string(p) +
                            " (u^2 != 1)");
  Impl impl;
  impl.kind = GroupKind::semidirect_cyclic;
  impl.n = p;
  impl.u = um;
  impl.description = "semidirect:cyclic:" + std::to_string(p) + ":u=" + std::to_string(um);
  return finish(std::move(impl));
}

Group Group::from_table(std::vector<std::vector<std::uint32_t>> table) {
  Impl impl;
  impl.kind = GroupKind::table;
  impl.n = static_cast<std::uint32_t>(table.size());
  impl.inner = validate_table(table, impl.validation);
  impl.inner_inv.resize(impl.n);
  for (std::uint32_t x = 0; x < impl.n; ++x)
    for (std::uint32_t y = 0; y < impl.n; ++y)
      if (impl.inner[static_cast<std::size_t>(x) * impl.n + y] == 0) impl.inner_inv[x] = y;
  impl.description = "table(" + std::to_string(impl.n) + ")";
  return finish(std::move(impl));
}

Group Group::semidirect_table(std::vector<std::vector<std::uint32_t>> table, std::vector<std::uint32_t> phi) {
  Impl impl;
  impl.kind = GroupKind::semidirect_table;
  impl.n = static_cast<std::uint32_t>(table.size());
  impl.inner = validate_table(table, impl.validation);
  validate_phi(impl.inner, impl.n, phi, impl.validation);
  impl.phi = std::move(phi);
  impl.inner_inv.resize(impl.n);
  for (std::uint32_t x = 0; x < impl.n; ++x)
    for (std::uint32_t y = 0; y < impl.n; ++y)
      if (impl.inner[static_cast<std::size_t>(x) * impl.n + y] == 0) impl.inner_inv[x] = y;
  impl.description = "semidirect:table(" + std::to_string(impl.n) + ")";
  return finish(std::move(impl));
}

std::uint32_t Group::inner_op(std::uint32_t x, std::uint32_t y) const {
  switch (impl_->kind) {
    case GroupKind::cyclic:
    case GroupKind::semidirect_cyclic:
      return static_cast<std::uint32_t>((static_cast<std::uint64_t>(x) + y) % impl_->n);
    default:
      return impl_->inner[static_cast<std::size_t>(x) * impl_->n + y];
  }
}

std::uint32_t Group::inner_inverse(std::uint32_t x) const {
  switch (impl_->kind) {
    case GroupKind::cyclic:
    case GroupKind::semidirect_cyclic:
      return x == 0 ? 0 : impl_->n - x;
    default:
      return impl_->inner_inv[x];
  }
}

std::uint32_t Group::apply_phi(std::uint8_t a, std::uint32_t x) const {
  if (a == 0) return x;
  switch (impl_->kind) {
    case GroupKind::semidirect_cyclic:
      return static_cast<std::uint32_t>((static_cast<std::uint64_t>(impl_->u) * x) % impl_->n);
    case GroupKind::semidirect_table:
      return impl_->phi[x];
    default:
      return x;
  }
}

bool Group::contains(const Element& e) const {
  return e.npart < impl_->n && (e.parity == 0 || (e.parity == 1 && has_parity()));
}

Element Group::op(const Element& a, const Element& b) const {
  if (!contains(a) || !contains(b))
    throw PreconditionError("element out of range for " + impl_->description);
  return {inner_op(a.npart, apply_phi(a.parity, b.npart)), static_cast<std::uint8_t>(a.parity ^ b.parity)};
}

Element Group::inverse(const Element& a) const {
  if (!contains(a)) throw PreconditionError("element out of range for " + impl_->description);
  return {apply_phi(a.parity, inner_inverse(a.npart)), a.parity};
}

std::uint8_t Group::parity(const Element& a) const {
  if (!has_parity()) throw PreconditionError(impl_->description + " has no parity structure");
  if (!contains(a)) throw PreconditionError("element out of range for " + impl_->description);
  return a.parity;
}

std::vector<Element> Group::elements() const {
  std::vector<Element> out;
  out.reserve(size());
  for (std::uint32_t i = 0; i < size(); ++i) out.push_back(element(i));
  return out;
}

std::vector<std::vector<std::uint32_t>> read_cayley_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open table file: " + path);
  std::size_t n = 0;
  if (!(in >> n) || n == 0) throw PreconditionError("invalid table: missing order");
  std::vector<std::vector<std::uint32_t>> table(n, std::vector<std::uint32_t>(n));
  for (auto& row : table)
    for (auto& v : row)
      if (!(in >> v)) throw PreconditionError("invalid table: truncated");
  return table;
}

Group parse_group_spec(std::string_view text) {
  auto starts = [&](std::string_view prefix) { return text.substr(0, prefix.size()) == prefix; };
  if (starts("cyclic:")) return Group::cyclic(parse_order(text.substr(7)));
  if (starts("zpxz2:")) return Group::semidirect_cyclic(parse_order(text.substr(6)), 1);
  if (starts("dihedral:")) {
    const std::uint32_t n = parse_order(text.substr(9));
    if (n % 2 != 0) throw PreconditionError("dihedral:<2p> needs an even order");
    const std::uint32_t p = n / 2;
    return Group::semidirect_cyclic(p, static_cast<std::int64_t>(p) - 1);
  }
  if (starts("semidirect:cyclic:")) {
    const auto rest = text.substr(18);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos || rest.substr(colon + 1, 2) != "u=")
      throw PreconditionError("expected semidirect:cyclic:<p>:u=<u>");
    return Group::semidirect_cyclic(parse_order(rest.substr(0, colon)),
                                    parse_int(rest.substr(colon + 3), "multiplier"));
  }
  if (starts("table:")) {
    auto rest = text.substr(6);
    const auto phi_pos = rest.rfind(":phi=");
    if (phi_pos == std::string_view::npos) return Group::from_table(read_cayley_table(std::string(rest)));
    std::vector<std::uint32_t> phi;
    std::string list(rest.substr(phi_pos + 5));
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
      phi.push_back(static_cast<std::uint32_t>(parse_uint(item, "phi entry")));
    return Group::semidirect_table(read_cayley_table(std::string(rest.substr(0, phi_pos))), std::move(phi));
  }
  throw PreconditionError("malformed group spec: '" + std::string(text) + "'");
}

}  // namespace seqlab
