#pragma once

// Run configuration: one JSON document, command-line flags override its
// fields. Every output file carries the effective configuration (echo()).
//
//   {
//     "potential": {"family": "Vt", "t": 1} | {"L": 1, "coeffs": {...}} | "path.json",
//     "L": 1, "M": 2, "N": 500, "K": 4, "r": 1, "alpha": 1,
//     "convention": "strictly_below" | "up_to",
//     "strategy": "index" | "target", "index": 1, "target": -11.5, "lambda0": -11,
//     "tol": 1e-12, "max_iter": 50, "N_e": 1000, "norm_cutoff": 2000, "s": 1, "reference": true,
//     "seed": 1, "out": "result.json",
//     "sweep": {"axis": "K", "grid": [0, 1, 2], "M_values": [1, 2, 4], "jobs": 1},
//     "audit": {"fsmap_trials": 100, "perturbation_trials": 200, "perturbation_dim": 20,
//               "M_values": [2, 4], "max_order": 8, "rhs_factor": 1}
//   }

#include "fsm/analysis.hpp"
#include "fsm/eigensolver.hpp"
#include "fsm/fs_operator.hpp"
#include "fsm/planewave.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsm {

struct AuditSettings {
  int fsmap_trials = 100;
  int perturbation_trials = 200;
  int perturbation_dim = 20;
  std::vector<int> m_values{2, 4};
  int max_order = 8;
  double rhs_factor = 1.0;
};

struct SweepSettings {
  std::optional<SweepAxis> axis;
  std::vector<int> grid;
  std::vector<int> m_values;  // outer loop over M for K or N sweeps; empty: params.M
  int jobs = 1;
};

struct RunConfig {
  std::string potential_text = R"({"family":"Vt","t":1})";  // inline JSON, or a path
  bool potential_is_path = false;
  std::string base_dir;  // paths are resolved against it
  double L = 1.0;
  FsParams params{2, 500, 4, 1.0, 1.0, CutoffConvention::StrictlyBelow};
  bool alpha_given = false;
  Strategy strategy = Strategy::by_index(1);
  std::optional<double> lambda0;
  double tol = 1e-12;
  int max_iter = 50;
  int n_exact = 1000;
  std::optional<int> norm_cutoff;  // ||V||_r truncation, default 2 N_e
  double s = 1.0;
  bool reference = true;
  std::uint64_t seed = 1;
  std::string out;
  SweepSettings sweep;
  AuditSettings audit;

  FourierPotential potential() const;
  FixedPointOptions options() const;
  int regularity_cutoff() const { return norm_cutoff.value_or(2 * n_exact); }
  // NaN unless the potential is a power-law family.
  double family_t() const;
  // Throws ConfigError naming the offending field.
  void validate() const;
  // Canonical compact JSON of the effective configuration.
  std::string echo() const;
};

// Throws ConfigError naming the offending field on malformed input.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);

// "a:b:step" (inclusive) or "a,b,c".
std::vector<int> parse_grid(const std::string& spec);

}  // namespace fsm
