// Command-line front end. Links the C API only; everything numeric happens
// behind isoradial.h. Exit codes: 0 pass/converging, 1 usage or config
// error, 2 invariant failure or inconclusive verdict, 3 certificate failure.
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isoradial.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitCertificate = 3;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

[[noreturn]] void fail_status(isr_status status, const std::string& context) {
  int code = kExitInvariant;
  if (status == ISR_ERR_INVALID_ARGUMENT || status == ISR_ERR_CONFIG)
    code = kExitConfig;
  else if (status == ISR_ERR_WINDOW_TOO_SMALL)
    code = kExitCertificate;
  fail(code, context + ": " + isr_last_error());
}

void check(isr_status status, const std::string& context) {
  if (status != ISR_OK) fail_status(status, context);
}

// Owning wrappers so error paths cannot leak handles.
struct GraphDeleter {
  void operator()(isr_graph* g) const { isr_graph_free(g); }
};
struct GeneratorDeleter {
  void operator()(isr_generator* q) const { isr_generator_free(q); }
};
struct RowDeleter {
  void operator()(isr_kernel_row* r) const { isr_kernel_row_free(r); }
};
struct TrajectoryDeleter {
  void operator()(isr_trajectory* t) const { isr_trajectory_free(t); }
};
struct SweepDeleter {
  void operator()(isr_sweep* s) const { isr_sweep_free(s); }
};
using GraphPtr = std::unique_ptr<isr_graph, GraphDeleter>;
using GeneratorPtr = std::unique_ptr<isr_generator, GeneratorDeleter>;
using RowPtr = std::unique_ptr<isr_kernel_row, RowDeleter>;
using TrajectoryPtr = std::unique_ptr<isr_trajectory, TrajectoryDeleter>;
using SweepPtr = std::unique_ptr<isr_sweep, SweepDeleter>;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ConfigFile {
  json doc;
  std::string digest; // FNV-1a of the raw bytes
};

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitConfig, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  ConfigFile cfg;
  cfg.digest = fnv1a_hex(bytes);
  try {
    cfg.doc = json::parse(bytes);
  } catch (const json::exception& e) {
    fail(kExitConfig, path + ": " + e.what());
  }
  return cfg;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(kExitConfig, where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      fail(kExitConfig, where + ": unknown key \"" + item.key() + "\"");
  }
}

void require_schema(const json& doc, const std::string& mode,
                    const std::string& path) {
  if (!doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != 1)
    fail(kExitConfig, path + ": schema_version must be the integer 1");
  if (!doc.contains("mode") || doc["mode"].get<std::string>() != mode)
    fail(kExitConfig,
         path + ": mode must be \"" + mode + "\" for this subcommand");
}

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  return doc.contains(key) ? doc[key].get<T>() : fallback;
}

void parse_point(const json& doc, const char* key, double fallback_x,
                 double fallback_y, double out[2], const std::string& where) {
  out[0] = fallback_x;
  out[1] = fallback_y;
  if (!doc.contains(key)) return;
  const json& p = doc[key];
  if (!p.is_array() || p.size() != 2)
    fail(kExitConfig, where + ": " + key + " must be an [x, y] pair");
  out[0] = p[0].get<double>();
  out[1] = p[1].get<double>();
}

struct ManifestEntry {
  std::string operation;
  double bound;
};

void write_manifest(const std::filesystem::path& out_dir,
                    const std::string& command, const std::string& digest,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& outputs,
                    const std::vector<ManifestEntry>& error_bounds,
                    std::int64_t wall_ms) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "run_manifest";
  doc["tool_version"] = isr_version();
  doc["command"] = command;
  doc["config_digest"] = digest;
  doc["seeds"] = seeds;
  // The two fields below are the only run-to-run nondeterminism in any
  // output of this tool.
  doc["timestamp_utc"] = utc_timestamp();
  doc["wall_ms"] = wall_ms;
  doc["outputs"] = outputs;
  ordered_json bounds = ordered_json::array();
  for (const ManifestEntry& e : error_bounds)
    bounds.push_back({{"operation", e.operation}, {"bound", e.bound}});
  doc["error_bounds"] = std::move(bounds);
  const std::filesystem::path path = out_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitInvariant, "cannot write " + path.string());
  out << doc.dump(1) << "\n";
}

GraphPtr generate_graph(const json& doc, const std::string& where) {
  const std::string family = doc.at("family").get<std::string>();
  const double h = doc.at("h").get<double>();
  const int extent = doc.at("extent").get<int>();
  const bool spacing = get_or(doc, "spacing_convention", false);
  std::vector<double> col_angles, row_angles;
  if (doc.contains("col_angles"))
    col_angles = doc["col_angles"].get<std::vector<double>>();
  if (doc.contains("row_angles"))
    row_angles = doc["row_angles"].get<std::vector<double>>();
  const double margin = get_or(doc, "track_margin", 0.0);
  isr_graph* raw = nullptr;
  check(isr_graph_generate(family.c_str(), h, extent, spacing ? 1 : 0,
                           col_angles.empty() ? nullptr : col_angles.data(),
                           static_cast<int>(col_angles.size()),
                           row_angles.empty() ? nullptr : row_angles.data(),
                           static_cast<int>(row_angles.size()), margin, &raw),
        where + ": generate");
  return GraphPtr(raw);
}

int project_point(const isr_graph* g, const double p[2],
                  const std::string& what) {
  int vertex = -1;
  check(isr_graph_project(g, p[0], p[1], &vertex), what);
  return vertex;
}

// ------------------------------------------------------------------ generate

int cmd_generate(const std::string& config_path, const std::string& out_dir_s,
                 std::optional<double> tol_override,
                 std::optional<std::uint64_t> seed_override) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConfigFile cfg = load_config(config_path);
  const json& doc = cfg.doc;
  check_keys(doc,
             {"schema_version", "mode", "family", "h", "extent",
              "spacing_convention", "col_angles", "row_angles", "track_margin",
              "validation_tol", "kernel_row", "trajectory"},
             config_path);
  require_schema(doc, "generate", config_path);
  for (const char* req : {"family", "h", "extent"})
    if (!doc.contains(req))
      fail(kExitConfig, config_path + ": missing required key \"" +
                            std::string(req) + "\"");

  const std::filesystem::path out_dir(out_dir_s);
  std::filesystem::create_directories(out_dir);

  GraphPtr graph = generate_graph(doc, config_path);
  const double tol =
      tol_override.value_or(get_or(doc, "validation_tol", 1e-9));

  std::vector<std::string> outputs;
  std::vector<ManifestEntry> bounds;
  std::vector<std::uint64_t> seeds;

  const std::string graph_path = (out_dir / "graph.json").string();
  check(isr_graph_write_json(graph.get(), graph_path.c_str()), "write graph");
  outputs.push_back("graph.json");
  std::printf("wrote graph.json (%d vertices, %d edges, %d interior)\n",
              isr_graph_vertex_count(graph.get()),
              isr_graph_edge_count(graph.get()),
              isr_graph_interior_count(graph.get()));

  isr_validation report{};
  check(isr_graph_validate(graph.get(), tol, &report), "validate");
  isr_assumptions assumptions{};
  check(isr_graph_assumptions(graph.get(), 2500, &assumptions), "assumptions");
  const std::string validation_path = (out_dir / "validation.csv").string();
  check(isr_graph_write_validation_csv(graph.get(), tol, 2500,
                                       validation_path.c_str()),
        "write validation");
  outputs.push_back("validation.csv");
  std::printf("wrote validation.csv\n");

  if (doc.contains("kernel_row")) {
    const json& kr = doc["kernel_row"];
    check_keys(kr, {"source", "t", "variant", "tol"},
               config_path + ": kernel_row");
    double source[2];
    parse_point(kr, "source", 0.0, 0.0, source, config_path);
    const double t = kr.at("t").get<double>();
    const std::string variant =
        get_or<std::string>(kr, "variant", "variable_speed");
    const double row_tol = get_or(kr, "tol", 1e-10);
    isr_generator* qraw = nullptr;
    check(isr_generator_assemble(graph.get(), variant.c_str(), "absorbing",
                                 &qraw),
          "assemble generator");
    GeneratorPtr q(qraw);
    const int u = project_point(graph.get(), source, "project kernel source");
    isr_kernel_row* rraw = nullptr;
    check(isr_kernel_row_new(q.get(), u, t, row_tol, &rraw), "kernel row");
    RowPtr row(rraw);
    const std::string row_path = (out_dir / "kernel_row.csv").string();
    check(isr_kernel_row_write_csv(row.get(), graph.get(), row_path.c_str()),
          "write kernel row");
    outputs.push_back("kernel_row.csv");
    bounds.push_back({"kernel_row leaked mass",
                      isr_kernel_row_leaked_mass_bound(row.get())});
    std::printf("wrote kernel_row.csv (%d vertices, mass %.12g)\n",
                isr_kernel_row_size(row.get()),
                isr_kernel_row_mass(row.get()));
  }

  if (doc.contains("trajectory")) {
    const json& tj = doc["trajectory"];
    check_keys(tj, {"start", "horizon", "seed"}, config_path + ": trajectory");
    double start[2];
    parse_point(tj, "start", 0.0, 0.0, start, config_path);
    const double horizon = tj.at("horizon").get<double>();
    const std::uint64_t seed =
        seed_override.value_or(get_or<std::uint64_t>(tj, "seed", 1));
    seeds.push_back(seed);
    const int u0 = project_point(graph.get(), start, "project walk start");
    isr_trajectory* traw = nullptr;
    check(isr_walk_sample(graph.get(), u0, horizon, seed, &traw), "sample walk");
    TrajectoryPtr traj(traw);
    const std::string traj_path = (out_dir / "trajectory.csv").string();
    check(isr_trajectory_write_csv(traj.get(), graph.get(), traj_path.c_str()),
          "write trajectory");
    outputs.push_back("trajectory.csv");
    std::printf("wrote trajectory.csv (%d jumps)\n",
                isr_trajectory_jumps(traj.get()));
  }

  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  write_manifest(out_dir, "generate", cfg.digest, seeds, outputs, bounds,
                 wall_ms);
  std::printf("wrote manifest.json\n");

  if (!report.ok) {
    std::printf("validation: FAILED (%s)\n", report.detail);
    return kExitInvariant;
  }
  std::printf(
      "validation: ok (c_p=%.12g, c_d=%.12g, max_degree=%d, kappa=%.12g)\n",
      assumptions.c_p, assumptions.c_d, assumptions.max_degree,
      assumptions.kappa_empirical);
  return kExitOk;
}

// --------------------------------------------------------------------- sweep

int cmd_sweep(const std::string& config_path, const std::string& out_dir_s,
              std::optional<double> tol_override,
              std::optional<int> threads_override) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConfigFile cfg = load_config(config_path);
  const json& doc = cfg.doc;
  check_keys(doc,
             {"schema_version", "mode", "regime", "family", "square_spacing",
              "x", "y", "t", "beta", "h_sequence", "tol", "gap_threshold",
              "threads", "extent_override", "region", "horizon"},
             config_path);
  require_schema(doc, "sweep", config_path);
  for (const char* req : {"regime", "family", "beta", "h_sequence"})
    if (!doc.contains(req))
      fail(kExitConfig, config_path + ": missing required key \"" +
                            std::string(req) + "\"");

  const std::string regime = doc["regime"].get<std::string>();
  if (regime != "euclidean" && regime != "graph" && regime != "ldp")
    fail(kExitConfig, config_path +
                          ": regime must be \"euclidean\", \"graph\", or "
                          "\"ldp\", got \"" +
                          regime + "\"");
  const double beta = doc["beta"].get<double>();
  if (beta == 1.0)
    fail(kExitConfig,
         config_path +
             ": beta = 1 is the excluded critical case; the scaling limits "
             "are stated for beta < 1 (euclidean, ldp) and beta > 1 (graph)");

  const std::string family = doc["family"].get<std::string>();
  const std::vector<double> h_sequence =
      doc["h_sequence"].get<std::vector<double>>();
  double x[2], y[2];
  parse_point(doc, "x", 0.0, 0.0, x, config_path);
  parse_point(doc, "y", 1.0, 0.0, y, config_path);

  isr_sweep_config sc{};
  sc.family = family.c_str();
  sc.square_spacing = get_or(doc, "square_spacing", true) ? 1 : 0;
  sc.x[0] = x[0];
  sc.x[1] = x[1];
  sc.y[0] = y[0];
  sc.y[1] = y[1];
  sc.t = get_or(doc, "t", 1.0);
  sc.beta = beta;
  sc.h_values = h_sequence.data();
  sc.h_count = static_cast<int>(h_sequence.size());
  sc.tol = tol_override.value_or(get_or(doc, "tol", 1e-6));
  sc.gap_threshold = get_or(doc, "gap_threshold", 0.1);
  sc.threads = threads_override.value_or(get_or(doc, "threads", 0));
  sc.extent_override = get_or(doc, "extent_override", 0);

  isr_sweep* sraw = nullptr;
  if (regime == "ldp") {
    if (!doc.contains("region") || !doc.contains("horizon"))
      fail(kExitConfig,
           config_path + ": ldp sweeps need \"region\" and \"horizon\"");
    const json& region = doc["region"];
    check_keys(region, {"center", "radius"}, config_path + ": region");
    double center[2];
    parse_point(region, "center", 0.0, 0.0, center, config_path);
    const double radius = region.at("radius").get<double>();
    const double horizon = doc["horizon"].get<double>();
    check(isr_sweep_ldp(&sc, center[0], center[1], radius, horizon, &sraw),
          "ldp sweep");
  } else if (regime == "euclidean") {
    check(isr_sweep_euclidean(&sc, &sraw), "euclidean sweep");
  } else {
    check(isr_sweep_graph(&sc, &sraw), "graph sweep");
  }
  SweepPtr sweep(sraw);

  const std::filesystem::path out_dir(out_dir_s);
  std::filesystem::create_directories(out_dir);

  bool all_certified = true;
  bool all_accepted = true;
  std::vector<ManifestEntry> bounds;
  for (int i = 0; i < isr_sweep_row_count(sweep.get()); ++i) {
    isr_sweep_row row{};
    check(isr_sweep_get_row(sweep.get(), i, &row), "read sweep row");
    std::printf(
        "h=%-8g scaled=%- .10g target=%- .10g gap=%- .3e err=%.3e "
        "certified=%d accepted=%d extent=%d steps=%d\n",
        row.h, row.scaled, row.target, row.gap, row.error_bound, row.certified,
        row.accepted, row.window_extent, row.steps_used);
    all_certified = all_certified && row.certified != 0;
    all_accepted = all_accepted && row.accepted != 0;
    char op[64];
    std::snprintf(op, sizeof op, "log kernel entry h=%g", row.h);
    bounds.push_back({op, row.error_bound});
  }

  const std::string csv_path = (out_dir / "sweep.csv").string();
  const std::string json_path = (out_dir / "sweep.json").string();
  const std::string plot_path = (out_dir / "plot.csv").string();
  check(isr_sweep_write_csv(sweep.get(), csv_path.c_str()), "write sweep csv");
  check(isr_sweep_write_json(sweep.get(), json_path.c_str()),
        "write sweep json");
  check(isr_sweep_write_plot(sweep.get(), plot_path.c_str()), "write plot");

  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  write_manifest(out_dir, "sweep", cfg.digest, {},
                 {"sweep.csv", "sweep.json", "plot.csv"}, bounds, wall_ms);

  const std::string verdict = isr_sweep_verdict(sweep.get());
  std::printf("verdict: %s (gap threshold %g)\n", verdict.c_str(),
              isr_sweep_gap_threshold(sweep.get()));
  std::printf("wrote sweep.csv sweep.json plot.csv manifest.json\n");

  if (!all_certified || !all_accepted) return kExitCertificate;
  return verdict == "converging" ? kExitOk : kExitInvariant;
}

// --------------------------------------------------------------------- check

struct CheckTally {
  int passed = 0;
  int total = 0;

  void report(bool ok, const std::string& name, const std::string& detail) {
    ++total;
    if (ok) ++passed;
    std::printf("%s %s %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
  }
};

int cmd_check(const std::string& graph_path, std::optional<double> tol_opt) {
  const double tol = tol_opt.value_or(1e-9);
  CheckTally tally;

  isr_graph* graw = nullptr;
  const isr_status read_status = isr_graph_read_json(graph_path.c_str(), &graw);
  if (read_status != ISR_OK) {
    tally.report(false, "structure", std::string(isr_last_error()));
    std::printf("check: FAIL (%d/%d)\n", tally.passed, tally.total);
    return kExitInvariant;
  }
  GraphPtr graph(graw);
  const int n = isr_graph_vertex_count(graph.get());
  const int m = isr_graph_edge_count(graph.get());
  const int interior = isr_graph_interior_count(graph.get());
  {
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "vertices=%d edges=%d interior=%d family=%s h=%.12g", n, m,
                  interior, isr_graph_family(graph.get()),
                  isr_graph_h(graph.get()));
    tally.report(true, "structure", detail);
  }

  isr_validation report{};
  check(isr_graph_validate(graph.get(), tol, &report), "validate");
  {
    char detail[512];
    std::snprintf(detail, sizeof detail,
                  "max_radius_deviation=%.3e min_center_margin=%.3e "
                  "max_dual_orthogonality=%.3e%s%s",
                  report.max_radius_deviation, report.min_center_margin,
                  report.max_dual_orthogonality, report.ok ? "" : " ",
                  report.ok ? "" : report.detail);
    tally.report(report.ok != 0, "isoradial", detail);
  }

  isr_assumptions assumptions{};
  check(isr_graph_assumptions(graph.get(), 2500, &assumptions), "assumptions");
  {
    const bool ok = assumptions.c_p > 0.0 && assumptions.c_d > 0.0 &&
                    assumptions.kappa_empirical <= 1.998;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "c_p=%.12g c_d=%.12g max_degree=%d kappa=%.12g (limit 1.998)",
                  assumptions.c_p, assumptions.c_d, assumptions.max_degree,
                  assumptions.kappa_empirical);
    tally.report(ok, "bounded_angles", detail);
  }

  // Stored edge lengths against the embedding they claim to describe.
  if (isr_graph_has_stored_lengths(graph.get())) {
    double max_primal_dev = 0.0, max_dual_dev = 0.0;
    for (int e = 0; e < m; ++e) {
      double ep = 0.0, ed = 0.0, sp = 0.0, sd = 0.0;
      check(isr_graph_edge(graph.get(), e, nullptr, nullptr, &ep, &ed),
            "edge lengths");
      check(isr_graph_stored_lengths(graph.get(), e, &sp, &sd),
            "stored lengths");
      max_primal_dev = std::max(max_primal_dev, std::fabs(sp - ep) / ep);
      if (ed > 0.0)
        max_dual_dev = std::max(max_dual_dev, std::fabs(sd - ed) / ed);
    }
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "max_primal_rel_dev=%.3e max_dual_rel_dev=%.3e (tol %.3e)",
                  max_primal_dev, max_dual_dev, tol);
    tally.report(max_primal_dev <= tol && max_dual_dev <= tol,
                 "stored_lengths", detail);
  }

  // Weight bounds c_d <= omega <= 1/c_p, evaluated on the stored lengths so
  // tampered files cannot hide behind the recomputed embedding.
  {
    isr_weight_constants wc{};
    check(isr_graph_weight_constants(graph.get(), &wc), "weight constants");
    const bool stored = isr_graph_has_stored_lengths(graph.get()) != 0;
    double omega_min = 0.0, omega_max = 0.0;
    bool any = false;
    for (int e = 0; e < m; ++e) {
      double ep = 0.0, ed = 0.0;
      check(isr_graph_edge(graph.get(), e, nullptr, nullptr, &ep, &ed),
            "edge lengths");
      if (ed <= 0.0) continue; // boundary edge without a full dual edge
      double omega = ed / ep;
      if (stored) {
        double sp = 0.0, sd = 0.0;
        check(isr_graph_stored_lengths(graph.get(), e, &sp, &sd),
              "stored lengths");
        omega = sd / sp;
      }
      omega_min = any ? std::min(omega_min, omega) : omega;
      omega_max = any ? std::max(omega_max, omega) : omega;
      any = true;
    }
    const double lo = wc.c_d, hi = 1.0 / wc.c_p;
    const double slack = 1e-12;
    const bool ok = !any || (omega_min >= lo - slack && omega_max <= hi + slack);
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "omega_min=%.12g omega_max=%.12g allowed=[%.12g, %.12g]%s",
                  omega_min, omega_max, lo, hi,
                  stored ? " (from stored lengths)" : "");
    tally.report(ok, "weight_bounds", detail);
  }

  // The geometric Laplacian maps a x^2 + b xy + c y^2 to the constant
  // 2 (a + c); spot check on a deterministic sample of interior vertices.
  {
    const double a = 0.7, b = -0.3, c = 1.2;
    const double expected = 2.0 * (a + c);
    std::vector<double> f(n);
    for (int u = 0; u < n; ++u) {
      double px = 0.0, py = 0.0;
      check(isr_graph_vertex(graph.get(), u, &px, &py, nullptr), "vertex");
      f[u] = a * px * px + b * px * py + c * py * py;
    }
    double max_rel = 0.0;
    int checked = 0;
    const int stride = interior > 20 ? interior / 20 : 1;
    for (int u = 0, seen = 0; u < n && checked < 20; ++u) {
      int is_int = 0;
      check(isr_graph_vertex(graph.get(), u, nullptr, nullptr, &is_int),
            "vertex");
      if (!is_int) continue;
      if (seen++ % stride != 0) continue;
      double value = 0.0;
      check(isr_graph_apply_laplacian(graph.get(), f.data(), u, &value),
            "apply laplacian");
      max_rel = std::max(max_rel, std::fabs(value - expected) /
                                      std::fabs(expected));
      ++checked;
    }
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "max_rel_err=%.3e over %d interior vertices (tol %.3e)",
                  max_rel, checked, std::max(tol, 1e-9));
    tally.report(checked == 0 || max_rel <= std::max(tol, 1e-9),
                 "quadratic_identity", detail);
  }

  const bool all = tally.passed == tally.total;
  std::printf("check: %s (%d/%d)\n", all ? "PASS" : "FAIL", tally.passed,
              tally.total);
  return all ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isoradial graphs, heat kernels, and scaling-regime sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string graph_path;
  double tol_value = 0.0;
  int threads_value = 0;
  std::uint64_t seed_value = 0;

  CLI::App* generate = app.add_subcommand(
      "generate", "build a graph window from a config, validate it, and "
                  "write graph/report files");
  generate->add_option("--config", config_path, "config file (JSON)")
      ->required();
  generate->add_option("--out-dir", out_dir, "output directory (default .)");
  CLI::Option* gen_tol =
      generate->add_option("--tol", tol_value, "validation tolerance override");
  CLI::Option* gen_seed = generate->add_option(
      "--seed-override", seed_value, "replace every config-declared seed");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "run a scaling-regime sweep from a config and write "
               "CSV/JSON/plot outputs plus a run manifest");
  sweep->add_option("--config", config_path, "config file (JSON)")->required();
  sweep->add_option("--out-dir", out_dir, "output directory (default .)");
  CLI::Option* sweep_tol = sweep->add_option(
      "--tol", tol_value, "kernel relative tolerance override");
  CLI::Option* sweep_threads =
      sweep->add_option("--threads", threads_value, "worker thread override");

  CLI::App* check_cmd = app.add_subcommand(
      "check", "run the invariant suite against a stored graph file");
  check_cmd->add_option("graph", graph_path, "graph file (JSON)")->required();
  CLI::Option* check_tol =
      check_cmd->add_option("--tol", tol_value, "invariant tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) {
      return cmd_generate(config_path, out_dir,
                          gen_tol->count() ? std::optional<double>(tol_value)
                                           : std::nullopt,
                          gen_seed->count()
                              ? std::optional<std::uint64_t>(seed_value)
                              : std::nullopt);
    }
    if (sweep->parsed()) {
      return cmd_sweep(config_path, out_dir,
                       sweep_tol->count() ? std::optional<double>(tol_value)
                                          : std::nullopt,
                       sweep_threads->count() ? std::optional<int>(threads_value)
                                              : std::nullopt);
    }
    if (check_cmd->parsed()) {
      return cmd_check(graph_path, check_tol->count()
                                       ? std::optional<double>(tol_value)
                                       : std::nullopt);
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvariant;
  }
  return kExitConfig;
}
