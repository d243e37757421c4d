// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "family_io.hpp"

#include <fstream>
#include <sstream>

namespace crmod {

ordered_json family_to_json(const Lattice& lat, const CurveFamily& fam) {
  ordered_json doc;
  doc["format"] = kFamilyFormat;
  doc["version"] = kFamilyVersion;
  doc["lattice"] = {{"sigma", lat.sigma()}, {"tau", lat.tau()}};
  ordered_json curves = ordered_json::array();
  for (const auto& c : fam.curves) {
    ordered_json samples = ordered_json::array();
    for (const auto& s : c.samples())
      samples.push_back({s.param, s.point.x, s.point.y, s.point.t});
    curves.push_back({{"samples", std::move(samples)}});
  }
  doc["curves"] = std::move(curves);
  return doc;
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(ErrorCode::Parse, "family file: field '" + field + "': " + what);
}

double number_at(const ordered_json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "not finite");
  return v;
}

}  // namespace

FamilyDocument family_from_json(const ordered_json& doc) {
  if (!doc.is_object()) bad("<root>", "expected an object");
  if (!doc.contains("format") || doc["format"] != kFamilyFormat)
    bad("format", std::string("expected \"") + kFamilyFormat + "\"");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kFamilyVersion)
    bad("version", "unsupported version");
  if (!doc.contains("lattice") || !doc["lattice"].is_object()) bad("lattice", "missing");
  const auto& lj = doc["lattice"];
  const double sigma = lj.contains("sigma") ? number_at(lj["sigma"], "lattice.sigma") : 0.0;
  if (!lj.contains("tau")) bad("lattice.tau", "missing");
  const double tau = number_at(lj["tau"], "lattice.tau");
  Lattice lat = [&] {
    try {
      return Lattice(sigma, tau);
    } catch (const Error& e) {
      bad("lattice.tau", e.what());
    }
  }();

  if (!doc.contains("curves") || !doc["curves"].is_array()) bad("curves", "expected an array");
  FamilyDocument out{lat, {}};
  const auto& cj = doc["curves"];
  out.family.curves.reserve(cj.size());
  for (std::size_t i = 0; i < cj.size(); ++i) {
    const std::string at = "curves[" + std::to_string(i) + "]";
    if (!cj[i].is_object() || !cj[i].contains("samples") || !cj[i]["samples"].is_array())
      bad(at + ".samples", "expected an array");
    const auto& sj = cj[i]["samples"];
    std::vector<CurveSample> samples;
    samples.reserve(sj.size());
    for (std::size_t k = 0; k < sj.size(); ++k) {
      const std::string sat = at + ".samples[" + std::to_string(k) + "]";
      if (!sj[k].is_array() || sj[k].size() != 4) bad(sat, "expected [param, x, y, t]");
      samples.push_back({number_at(sj[k][0], sat + "[0]"),
                         {number_at(sj[k][1], sat + "[1]"), number_at(sj[k][2], sat + "[2]"),
                          number_at(sj[k][3], sat + "[3]")}});
    }
    try {
      out.family.curves.push_back(canonical_lift(lat, LegendrianPolyline(std::move(samples))));
    } catch (const Error& e) {
      bad(at, e.what());
    }
  }
  return out;
}

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ordered_json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Parse, "'" + path + "': " + e.what());
  }
}

void save_family(const std::string& path, const Lattice& lat, const CurveFamily& fam) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << family_to_json(lat, fam).dump() << '\n';
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

FamilyDocument load_family(const std::string& path) {
  return family_from_json(read_json_file(path));
}

ordered_json result_to_json(const ModulusResult& r, bool with_density) {
  ordered_json j;
  j["value"] = r.value;
  j["dual_bound"] = r.dual_bound;
  j["gap"] = r.gap;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["non_rectifiable_members"] = r.non_rectifiable_members;
  j["warnings"] = r.warnings;
  if (with_density) j["density"] = r.density;
  return j;
}

}  // namespace crmod
