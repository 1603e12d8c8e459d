#include "seqlab/json_io.hpp"

#include "seqlab/errors.hpp"

namespace seqlab::io {

json to_json(const Group& group, const Element& e) {
  if (group.has_parity()) return json::array({e.npart, e.parity});
  return e.npart;
}

json to_json(const Group& group, std::span<const Element> items) {
  json out = json::array();
  for (const auto& e : items) out.push_back(to_json(group, e));
  return out;
}

Element element_from_json(const Group& group, const json& j) {
  Element e;
  auto number = [](const json& v) -> std::uint32_t {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw PreconditionError("element entries must be nonnegative integers");
    return v.get<std::uint32_t>();
  };
  if (group.has_parity()) {
    if (!j.is_array() || j.size() != 2) throw PreconditionError("elements of " + group.description() + " are [x, a] pairs");
    e.npart = number(j[0]);
    const auto a = number(j[1]);
    if (a > 1) throw PreconditionError("parity must be 0 or 1");
    e.parity = static_cast<std::uint8_t>(a);
  } else {
    if (!j.is_number_integer()) throw PreconditionError("elements of " + group.description() + " are integers");
    e.npart = number(j);
  }
  if (!group.contains(e)) throw PreconditionError("element " + j.dump() + " is not in " + group.description());
  return e;
}

std::vector<Element> elements_from_json(const Group& group, const json& j) {
  if (!j.is_array()) throw PreconditionError("expected a JSON array of elements");
  std::vector<Element> out;
  for (const auto& v : j) out.push_back(element_from_json(group, v));
  return out;
}

std::string to_decimal(const mpz_class& v) { return v.get_str(); }

json verification_json(const Ordering& ord, std::size_t t, bool need_alternating) {
  json out;
  const auto conflicts = check_t_weak(ord, t);
  json c = json::array();
  for (const auto& w : conflicts) c.push_back({w.i, w.j});
  out["t"] = t;
  out["conflicts"] = c;
  bool valid = conflicts.empty();
  if (ord.group().has_parity()) {
    const bool alt = is_alternating(ord).alternating;
    out["alternating"] = alt;
    if (need_alternating) valid = valid && alt;
  } else {
    out["alternating"] = nullptr;
  }
  out["valid"] = valid;
  return out;
}

json to_json(const SearchReport& r, const Group& group) {
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back(to_json(group, f));
  return {{"group", r.group},
          {"k", r.k},
          {"t", r.t},
          {"ordering_class", to_string(r.cls)},
          {"method", r.method},
          {"subsets_total", to_decimal(r.subsets_total)},
          {"subsets_checked", r.subsets_checked},
          {"sampled", r.sampled},
          {"seed", r.seed},
          {"jobs", r.jobs},
          {"failures", failures},
          {"elapsed_ms", static_cast<std::int64_t>(r.elapsed_ms)}};
}

json to_json(const EstimateResult& r) {
  return {{"samples", r.samples},
          {"seed", r.seed},
          {"mean", r.mean},
          {"stddev", r.stddev},
          {"std_error", r.std_error},
          {"ci95", {r.ci95_low, r.ci95_high}},
          {"max_collisions", r.max_collisions},
          {"zero_collision_samples", r.zero_collision_samples}};
}

void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("elapsed_ms");
    for (auto& [key, value] : j.items()) strip_timing(value);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

}  // namespace seqlab::io
