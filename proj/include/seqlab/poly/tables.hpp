#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "seqlab/poly/coefficient.hpp"
#include "seqlab/poly/forms.hpp"

namespace seqlab::poly {

inline constexpr int kTablesVersion = 1;
// The h-top tables all use this number of free variables.
inline constexpr int kHTopEll = 16;

struct TableRow {
  int table = 0;      // 1..6
  int k_or_ell = 0;   // k for tables 1-4, ell for 5-6
  int t = 0;
  std::int64_t u = 1;
  Monomial monomial;
  std::string factored;  // as printed, e.g. "-2^2*3*13"
  mpz_class value;
};

// Rows of the embedded CSV, in file order.
const std::vector<TableRow>& embedded_tables();
std::vector<TableRow> parse_tables_csv(const std::string& text);

// Rows of one table, optionally restricted to one k (or ell). Throws
// PreconditionError when nothing matches.
std::vector<TableRow> find_rows(int table, std::optional<int> k_or_ell = std::nullopt);

// "-2^10*5137080631*34602352027" -> integer.
mpz_class parse_factored(const std::string& text);

FormProduct product_for(const TableRow& row);

struct RowReport {
  TableRow row;
  ExtractResult result;
  bool matches = false;          // recomputed value equals the table value
  bool divides_bounding = false;  // monomial divides the bounding monomial
  bool degree_ok = false;        // monomial degree equals the product degree
  bool passed() const { return matches && divides_bounding && degree_ok; }
};

RowReport verify_table_row(const TableRow& row, const ExtractOptions& options = {});

}  // namespace seqlab::poly
