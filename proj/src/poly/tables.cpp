#include "seqlab/poly/tables.hpp"

#include <sstream>

#include "seqlab/errors.hpp"
#include "seqlab/poly/families.hpp"

namespace seqlab::poly {

namespace detail {
extern const char* const kTablesCsv;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("bad " + what + " '" + s + "' in table data");
  }
}

}  // namespace

mpz_class parse_factored(const std::string& text) {
  std::string s = text;
  std::erase_if(s, [](char c) { return c == ' '; });
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.erase(0, 1);
  }
  if (s.empty()) throw PreconditionError("empty factored coefficient");
  mpz_class value = 1;
  for (const auto& factor : split(s, '*')) {
    const auto caret = factor.find('^');
    const std::string base = factor.substr(0, caret);
    if (base.empty() || base.find_first_not_of("0123456789") != std::string::npos)
      throw PreconditionError("bad factor '" + factor + "' in '" + text + "'");
    mpz_class b(base);
    unsigned long e = 1;
    if (caret != std::string::npos) e = static_cast<unsigned long>(to_int(factor.substr(caret + 1), "exponent"));
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), b.get_mpz_t(), e);
    value *= p;
  }
  return negative ? mpz_class(-value) : value;
}

std::vector<TableRow> parse_tables_csv(const std::string& text) {
  std::vector<TableRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "table,k_or_ell,t,u,exponents,coefficient") throw PreconditionError("unexpected table header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) throw PreconditionError("table line needs 6 fields: " + line);
    TableRow row;
    row.table = to_int(f[0], "table");
    row.k_or_ell = to_int(f[1], "k");
    row.t = to_int(f[2], "t");
    row.u = to_int(f[3], "u");
    for (const auto& e : split(f[4], ' '))
      if (!e.empty()) row.monomial.exponents.push_back(static_cast<std::uint32_t>(to_int(e, "exponent")));
    row.factored = f[5];
    row.value = parse_factored(f[5]);
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::vector<TableRow>& embedded_tables() {
  static const std::vector<TableRow> rows = parse_tables_csv(detail::kTablesCsv);
  return rows;
}

std::vector<TableRow> find_rows(int table, std::optional<int> k_or_ell) {
  std::vector<TableRow> out;
  for (const auto& row : embedded_tables())
    if (row.table == table && (!k_or_ell || row.k_or_ell == *k_or_ell)) out.push_back(row);
  if (out.empty())
    throw PreconditionError("no row for table " + std::to_string(table) +
                            (k_or_ell ? " and k/ell " + std::to_string(*k_or_ell) : std::string()));
  return out;
}

FormProduct product_for(const TableRow& row) {
  switch (row.table) {
    case 1:
    case 2:
      return build_q(row.k_or_ell, row.t, row.u);
    case 3:
    case 4:
      return build_h_top(row.k_or_ell, kHTopEll, row.t, row.u);
    case 5:
    case 6:
      return build_r(row.t, row.k_or_ell, row.u);
    default:
      throw PreconditionError("unknown table " + std::to_string(row.table));
  }
}

RowReport verify_table_row(const TableRow& row, const ExtractOptions& options) {
  RowReport report;
  report.row = row;
  const auto product = product_for(row);
  report.degree_ok = row.monomial.exponents.size() == product.variable_count() &&
                     row.monomial.degree() == product.total_degree();
  report.divides_bounding = divides(row.monomial, bounding_monomial(product));
  report.result = coefficient(product, row.monomial, options);
  const auto& c = report.result.coefficient;
  if (c.value) {
    report.matches = *c.value == row.value;
  } else {
    report.matches = true;
    for (const auto& r : c.residues) report.matches = report.matches && mpz_mod_u64(row.value, r.prime) == r.value;
  }
  return report;
}

}  // namespace seqlab::poly
