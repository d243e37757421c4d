// Copyright 2026 The crmod Authors
// SPDX-License-Identifier: Apache-2.0

// crmod-cli: experiment driver over the C API. Every subcommand builds a JSON
// config (file from --config, then flag overrides), runs it, writes
// <out>/<command>.csv plus <out>/<command>_summary.json and exits 0 iff all
// asserted checks hold.

#include <crmod/crmod.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitError = 2;

struct Overrides {
  std::optional<double> sigma, tau, K, tol, margin, shift, factor, box;
  std::optional<long long> max_iter, samples;
  std::optional<std::uint64_t> seed;
  std::vector<double> a_values, grid, start_points, affine, points;
  std::optional<std::string> map, family;
  bool oracle = false;
  std::vector<std::string> sets;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  }
}

// "section.key=value" with value parsed as JSON, falling back to a string.
void apply_set(json& cfg, const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw std::runtime_error("--set expects key=value, got '" + s + "'");
  const std::string key = s.substr(0, eq), raw = s.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &cfg;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw std::runtime_error("--set: empty key segment in '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void apply(json& cfg, const std::string& command, const Overrides& o) {
  if (o.sigma) cfg["lattice"]["sigma"] = *o.sigma;
  if (o.tau) cfg["lattice"]["tau"] = *o.tau;
  if (o.K) cfg["metric"]["K"] = *o.K;
  if (o.tol) cfg["modulus"]["tol"] = *o.tol;
  if (o.margin) cfg["modulus"]["margin"] = *o.margin;
  if (o.max_iter) cfg["modulus"]["max_iter"] = *o.max_iter;
  if (!o.a_values.empty()) cfg["modulus"]["a_values"] = o.a_values;
  if (!o.grid.empty()) cfg["modulus"]["grid"] = o.grid;
  if (!o.start_points.empty()) cfg["modulus"]["start_points"] = o.start_points;
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.map) cfg["dilatation"]["map"] = *o.map;
  if (!o.affine.empty()) cfg["dilatation"]["affine"] = o.affine;
  if (o.factor) cfg["dilatation"]["factor"] = *o.factor;
  if (o.box) cfg["dilatation"]["box"] = *o.box;
  if (o.family) cfg["family"]["path"] = *o.family;
  if (o.oracle) cfg["oracle"]["enabled"] = true;
  if (o.shift) {
    if (command == "extremal-verify") cfg["extremal"]["shift"] = *o.shift;
    else cfg["dilatation"]["shift"] = *o.shift;
  }
  if (o.samples) {
    if (command == "geodesic") cfg["geodesic"]["samples"] = *o.samples;
    else cfg["dilatation"]["samples"] = *o.samples;
  }
  if (!o.points.empty()) {
    if (o.points.size() != 6) throw std::runtime_error("expected 6 coordinates: px py pt qx qy qt");
    cfg["distance"]["p"] = {o.points[0], o.points[1], o.points[2]};
    cfg["distance"]["q"] = {o.points[3], o.points[4], o.points[5]};
  }
  for (const auto& s : o.sets) apply_set(cfg, s);
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

void write_csv(const fs::path& path, const json& rows) {
  std::vector<std::string> cols;
  for (const auto& r : rows)
    for (auto it = r.begin(); it != r.end(); ++it)
      if (std::find(cols.begin(), cols.end(), it.key()) == cols.end()) cols.push_back(it.key());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      out << (i ? "," : "") << (r.contains(cols[i]) ? csv_cell(r[cols[i]]) : "");
    out << '\n';
  }
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const Overrides& o, bool quiet) {
  json cfg = load_config(config_path);
  if (!cfg.is_object()) throw std::runtime_error("config root must be an object");
  apply(cfg, command, o);
  if (!out_dir.empty()) cfg["output"]["dir"] = out_dir;

  char* raw = nullptr;
  const crmod_status st = crmod_experiment_run(command.c_str(), cfg.dump().c_str(), &raw);
  if (st != CRMOD_OK) {
    std::cerr << "crmod-cli " << command << ": " << crmod_status_string(st) << ": "
              << crmod_last_error() << '\n';
    return kExitError;
  }
  json record = json::parse(raw);
  crmod_string_free(raw);

  const fs::path dir = record["config"]["output"]["dir"].get<std::string>();
  fs::create_directories(dir);
  write_csv(dir / (command + ".csv"), record["rows"]);
  json summary = record;
  summary.erase("rows");
  {
    std::ofstream s(dir / (command + "_summary.json"));
    if (!s) throw std::runtime_error("cannot write summary into '" + dir.string() + "'");
    s << summary.dump(2) << '\n';
  }

  if (!quiet) {
    std::cout << command << " config_hash=" << record["config_hash"].get<std::string>() << '\n';
    for (auto it = record["summary"].begin(); it != record["summary"].end(); ++it)
      if (it->is_primitive()) std::cout << "  " << it.key() << " = " << it->dump() << '\n';
    if (command == "distance" || command == "modulus-fibration" || command == "extremal-verify" ||
        command == "modulus-file" || command == "lattice-info")
      for (const auto& r : record["rows"]) std::cout << "  row " << r.dump() << '\n';
  }
  for (const auto& c : record["checks"])
    std::cout << (c["ok"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
              << c["detail"].get<std::string>() << '\n';
  std::cout << (record["ok"].get<bool>() ? "ok" : "checks failed") << '\n';
  return record["ok"].get<bool>() ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crmod-cli: Heisenberg geometry and curve-family modulus experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("-q,--quiet", quiet, "print checks only");
  app.set_version_flag("--version", crmod_version());

  Overrides o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--set", o.sets, "override any config field: section.key=json");
    sub->add_option("--seed", o.seed, "sampling seed");
  };
  auto lattice = [&](CLI::App* sub) {
    sub->add_option("--sigma", o.sigma, "lattice shear sigma");
    sub->add_option("--tau", o.tau, "lattice height tau (4 tau must be an integer)");
  };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid, "grid resolution(s) per axis");
    sub->add_option("--tol", o.tol, "relative duality-gap tolerance");
    sub->add_option("--max-iter", o.max_iter, "maximum solver sweeps");
  };

  auto* distance = app.add_subcommand("distance", "CC distance between two points");
  distance->add_option("coords", o.points, "px py pt qx qy qt")->expected(6);
  distance->add_option("--scaled", o.K, "also report the distance in the K-metric");
  distance->add_flag("--oracle", o.oracle, "cross-check with the brute-force oracle");
  common(distance);

  auto* geo = app.add_subcommand("geodesic", "minimizing geodesic between two points");
  geo->add_option("coords", o.points, "px py pt qx qy qt")->expected(6);
  geo->add_option("--samples", o.samples, "number of path samples");
  common(geo);

  auto* fib = app.add_subcommand("modulus-fibration", "discrete modulus of the X-line fibration");
  fib->add_option("--a", o.a_values, "half lengths a");
  fib->add_option("--start-points", o.start_points, "n or m n");
  solver(fib);
  lattice(fib);
  common(fib);

  auto* file = app.add_subcommand("modulus-file", "modulus of a curve family file");
  file->add_option("--family", o.family, "curve family JSON")->check(CLI::ExistingFile);
  solver(file);
  common(file);

  auto* dil = app.add_subcommand("dilatation", "dilatation report of a contact map");
  dil->add_option("--map", o.map,
                  "identity, f0, t-translation, competitor, flow-x, dilation, stretch-t, affine");
  dil->add_option("--K", o.K, "target structure parameter K");
  dil->add_option("--samples", o.samples, "number of random sample points");
  dil->add_option("--shift", o.shift, "shift for t-translation / flow-x / competitor");
  dil->add_option("--factor", o.factor, "dilation factor");
  dil->add_option("--box", o.box, "samples drawn from [-box, box]^3");
  dil->add_option("--affine", o.affine, "12 coefficients: 3x3 row-major matrix then offset")
      ->expected(12);
  common(dil);

  auto* ext = app.add_subcommand("extremal-verify", "modulus bounds on the dilatation of f0");
  ext->add_option("--K", o.K, "stretch parameter K");
  ext->add_option("--a", o.a_values, "half lengths a");
  ext->add_option("--start-points", o.start_points, "n or m n");
  ext->add_option("--shift", o.shift, "t-translation of the competitor");
  ext->add_option("--margin", o.margin, "relative discretization margin");
  solver(ext);
  lattice(ext);
  common(ext);

  auto* lat = app.add_subcommand("lattice-info", "generators and invariants of the lattice");
  lattice(lat);
  common(lat);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, config_path, out_dir, o, quiet);
  } catch (const std::exception& e) {
    std::cerr << "crmod-cli " << command << ": " << e.what() << '\n';
    return kExitError;
  }
}
