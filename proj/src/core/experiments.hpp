// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "family_io.hpp"
#include "geodesics.hpp"

namespace crmod {

struct ExperimentConfig {
  double sigma = 0.0;
  double tau = 0.25;
  double K = 4.0;

  std::vector<double> a_values{0.5, 1.0, 2.0};
  std::vector<int> grids{32};
  int start_m = 1;
  int start_n = 16;
  double tol = 1e-6;
  std::int64_t max_iter = 100000;
  double margin = 1e-6;
  double max_gap = 1e-3;
  double max_rel_error = 0.10;

  bool oracle = false;
  OracleBudget budget;

  HeisPoint p{0.0, 0.0, 0.0};
  HeisPoint q{0.0, 0.0, 1.0};
  int geodesic_samples = 33;

  std::string map = "f0";
  std::vector<double> affine;  // 12 coefficients when map == "affine"
  double map_shift = 0.5;      // t-translation / flow-x parameter
  double map_factor = 2.0;     // dilation factor
  int dilatation_samples = 100;
  double sample_box = 1.0;
  double fd_tol = 1e-4;

  double competitor_shift = 0.5;

  std::string family_path;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

// Missing keys keep their defaults; unknown keys, wrong types and out-of-range
// values throw Parse naming the field.
ExperimentConfig config_from_json(const ordered_json& j);
ordered_json config_to_json(const ExperimentConfig& c);

// FNV-1a 64 of the normalised config, hex.
std::string config_hash(const ExperimentConfig& c);

// Transverse start-point count actually used on a grid: the requested n
// rounded up to a multiple of the grid resolution, so every cell row of the
// flow-invariant coordinates carries the same number of lines.
int effective_start_count(int n, int resolution);

// Record layout: {command, config_hash, tolerances, rows[], summary{},
// checks[{name, ok, detail}], ok}. ok is the conjunction of all checks.
ordered_json run_experiment(const std::string& command, const ExperimentConfig& c);

const std::vector<std::string>& experiment_commands();

}  // namespace crmod
