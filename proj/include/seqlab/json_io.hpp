#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"
#include "seqlab/groups.hpp"
#include "seqlab/search.hpp"
#include "seqlab/sequencing.hpp"

namespace seqlab::io {

using nlohmann::json;

// [x, a] in groups with parity, a bare integer otherwise.
json to_json(const Group& group, const Element& e);
json to_json(const Group& group, std::span<const Element> items);
Element element_from_json(const Group& group, const json& j);
std::vector<Element> elements_from_json(const Group& group, const json& j);

std::string to_decimal(const mpz_class& v);

// {valid, t, conflicts, alternating}; alternating is null for groups without
// parity. valid also requires alternation when `need_alternating`.
json verification_json(const Ordering& ord, std::size_t t, bool need_alternating);

json to_json(const SearchReport& report, const Group& group);
json to_json(const EstimateResult& r);

// Removes every "elapsed_ms" member, recursively. Timing is the only part of
// a report outside the determinism contract.
void strip_timing(json& j);

}  // namespace seqlab::io
