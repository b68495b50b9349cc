#pragma once

// JSON views of reports. Needs nlohmann/json (vendor/json.hpp) on the include path.

#include <string>

#include "json.hpp"
#include "mrx/expansion.hpp"
#include "mrx/spectral.hpp"
#include "mrx/structure.hpp"

namespace mrx {

using nlohmann::ordered_json;

inline ordered_json to_json(const SpectralReport& r, bool timing = true) {
  ordered_json j;
  j["family"] = r.family;
  j["q"] = r.q;
  j["n"] = r.n;
  j["d"] = r.degree;
  j["lambda2"] = r.lambda2;
  j["method"] = to_string(r.method);
  j["tolerance"] = r.tolerance;
  j["claimed_bound"] = r.claimed_bound ? ordered_json(*r.claimed_bound) : ordered_json(nullptr);
  j["ratio"] = r.ratio ? ordered_json(*r.ratio) : ordered_json(nullptr);
  j["runtime_ms"] = timing ? r.runtime_ms : 0.0;
  j["normality"] = to_string(r.normality);
  return j;
}

inline ordered_json to_json(const VerificationReport& r, bool timing = true) {
  ordered_json j;
  j["target"] = r.target;
  j["q"] = r.q;
  j["mode"] = to_string(r.mode);
  j["pairs_checked"] = r.pairs_checked;
  j["mismatches"] = r.mismatch_count;
  j["elapsed_ms"] = timing ? r.elapsed_ms : 0.0;
  j["verdict"] = r.verdict();
  ordered_json ex = ordered_json::array();
  for (const auto& m : r.mismatches)
    ex.push_back({{"first", m.first}, {"second", m.second}, {"label", m.label}, {"expected", m.expected},
                  {"observed", m.observed}});
  j["examples"] = ex;
  j["label_counts"] = r.label_counts;
  j["label_mismatches"] = r.label_mismatches;
  j["notes"] = r.notes;
  return j;
}

inline ordered_json to_json(const SweepCell& c) {
  return {{"q", c.q},
          {"e", c.e},
          {"sizes", c.sizes},
          {"mean_ratio", c.mean_ratio},
          {"min_ratio", c.min_ratio},
          {"mean_bound_ratio", c.mean_bound_ratio},
          {"min_bound_ratio", c.min_bound_ratio},
          {"trials", c.trials}};
}

inline ordered_json sweep_summary_json(const SweepResult& r, const SweepConfig& cfg) {
  ordered_json j;
  j["theorem"] = to_string(r.theorem);
  const auto setup = theorem_setup(r.theorem);
  j["polynomial"] = to_string(setup.polynomial);
  j["domains"] = detail::join_domains(setup.domains);
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["eps"] = cfg.eps;
  j["monotone"] = r.monotone();
  ordered_json cells = ordered_json::array();
  for (const auto& c : r.cells) cells.push_back(to_json(c));
  j["cells"] = cells;
  return j;
}

/// Fixed formatting so identical inputs give identical bytes.
inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace mrx
