// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "lattice.hpp"
#include "modulus.hpp"

namespace crmod {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kFamilyFormat = "crmod-curve-family";
inline constexpr int kFamilyVersion = 1;

struct FamilyDocument {
  Lattice lattice;
  CurveFamily family;
};

// {"format", "version", "lattice": {"sigma", "tau"}, "curves": [{"samples": [[param, x, y, t], ...]}]}
ordered_json family_to_json(const Lattice& lat, const CurveFamily& fam);
// Curves are re-lifted to canonical representatives. Throws Parse with the
// offending field path.
FamilyDocument family_from_json(const ordered_json& doc);

void save_family(const std::string& path, const Lattice& lat, const CurveFamily& fam);
FamilyDocument load_family(const std::string& path);

ordered_json result_to_json(const ModulusResult& r, bool with_density = false);

// Reads a whole file into a JSON document; Io on open failure, Parse with
// line/column on malformed input.
ordered_json read_json_file(const std::string& path);

}  // namespace crmod
