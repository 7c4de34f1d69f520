#pragma once

// JSON forms of sets and level instances.
//   intervals: {"type": "intervals", "parts": [[lo, hi], ...]}
//   periodic:  {"type": "periodic", "pattern": [[lo, hi], ...], "period": p, "index_lo": a, "index_hi": b}
//   blocks:    {"type": "blocks", "blocks": [<periodic>, ...]}
// Doubles are written in shortest round-trip form, so re-runs are byte-identical.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "annpair/counterexample.hpp"
#include "annpair/interval_set.hpp"

namespace annpair {

using json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[nodiscard]] inline json parts_to_json(const IntervalSet& s) {
  json parts = json::array();
  for (const auto& p : s.parts()) parts.push_back(json::array({p.lo(), p.hi()}));
  return parts;
}

[[nodiscard]] inline IntervalSet parts_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("interval parts must be an array");
  IntervalSet out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw FormatError("interval must be [lo, hi]");
    out.append_sorted(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

[[nodiscard]] inline json to_json(const IntervalSet& s) {
  return json{{"type", "intervals"}, {"parts", parts_to_json(s)}};
}

[[nodiscard]] inline json to_json(const PeriodicIntervalSet& s) {
  return json{{"type", "periodic"},
              {"pattern", parts_to_json(s.pattern())},
              {"period", s.period()},
              {"index_lo", s.index_lo()},
              {"index_hi", s.index_hi()}};
}

[[nodiscard]] inline json to_json(const BlockUnion& s) {
  json blocks = json::array();
  for (const auto& b : s.blocks()) blocks.push_back(to_json(b));
  return json{{"type", "blocks"}, {"blocks", blocks}};
}

[[nodiscard]] inline json to_json(const AnySet& s) {
  return std::visit([](const auto& v) { return to_json(v); }, s.storage());
}

[[nodiscard]] inline PeriodicIntervalSet periodic_from_json(const json& j) {
  if (j.value("type", "") != "periodic") throw FormatError("expected a periodic set");
  return PeriodicIntervalSet(parts_from_json(j.at("pattern")), j.at("period").get<double>(),
                             j.at("index_lo").get<std::int64_t>(), j.at("index_hi").get<std::int64_t>());
}

[[nodiscard]] inline AnySet set_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "intervals") return AnySet(parts_from_json(j.at("parts")));
    if (type == "periodic") return AnySet(periodic_from_json(j));
    if (type == "blocks") {
      std::vector<PeriodicIntervalSet> blocks;
      for (const auto& b : j.at("blocks")) blocks.push_back(periodic_from_json(b));
      return AnySet(BlockUnion(std::move(blocks)));
    }
    throw FormatError("unknown set type '" + type + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed set JSON: ") + e.what());
  }
}

[[nodiscard]] inline json to_json(const CounterexampleParams& p) {
  return json{{"n", p.n}, {"m", p.m}, {"d", p.d}, {"N", p.N}, {"L", p.L}};
}

[[nodiscard]] inline CounterexampleParams params_from_json(const json& j) {
  CounterexampleParams p;
  p.n = j.at("n").get<int>();
  p.m = j.at("m").get<int>();
  p.d = j.at("d").get<int>();
  p.N = j.at("N").get<std::int64_t>();
  p.L = j.at("L").get<std::int64_t>();
  p.validate();
  return p;
}

[[nodiscard]] inline json bump_summary(const Bump& b) {
  return json{{"kind", b.kind()},
              {"table_digest", hex64(b.table_digest())},
              {"table_step", b.table_step()},
              {"table_limit", b.table_limit()},
              {"decay_constant", b.decay_constant()},
              {"interpolation_error", b.interpolation_error()}};
}

[[nodiscard]] inline json to_json(const CounterexampleInstance& inst) {
  return json{{"params", to_json(inst.params)},
              {"offset", inst.offset},
              {"S_n", to_json(inst.S_n)},
              {"Q_n", to_json(inst.Q_n)},
              {"f", {{"poly", "shifted_fejer"}, {"order", inst.params.m}, {"scale", inst.params.N},
                     {"compression", inst.params.L}, {"bump", bump_summary(inst.f.bump())}}}};
}

/// Rebuilds an instance from its params; the stored sets and bump digest must
/// match what the current code produces.
[[nodiscard]] inline CounterexampleInstance instance_from_json(const json& j, std::shared_ptr<const Bump> bump) {
  try {
    const auto p = params_from_json(j.at("params"));
    const std::string digest = j.at("f").at("bump").at("table_digest").get<std::string>();
    if (digest != hex64(bump->table_digest())) {
      throw FormatError("instance bump digest " + digest + " does not match " + hex64(bump->table_digest()));
    }
    auto inst = build_instance(p, std::move(bump));
    if (!(periodic_from_json(j.at("S_n")) == inst.S_n) || !(periodic_from_json(j.at("Q_n")) == inst.Q_n)) {
      throw FormatError("stored S_n/Q_n differ from the rebuilt level n = " + std::to_string(p.n));
    }
    return inst;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed instance JSON: ") + e.what());
  }
}

[[nodiscard]] inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace annpair
