#include "isoradial/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "isoradial/errors.hpp"
#include "internal.hpp"
#include "util.hpp"

namespace isoradial::io {
namespace {

using nlohmann::ordered_json;

std::string family_name(Family f) {
  switch (f) {
    case Family::square: return "square";
    case Family::triangular: return "triangular";
    case Family::rhombic_tracks: return "rhombic_tracks";
  }
  throw Error(ErrorCode::internal, "unnamed family");
}

Family family_from(const std::string& s, const std::string& where) {
  if (s == "square") return Family::square;
  if (s == "triangular") return Family::triangular;
  if (s == "rhombic_tracks") return Family::rhombic_tracks;
  throw Error(ErrorCode::io, where + ": unknown family \"" + s + "\"");
}

void check_keys(const ordered_json& obj,
                std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object())
    throw Error(ErrorCode::io, where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw Error(ErrorCode::io, where + ": unknown key \"" + item.key() + "\"");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out.good()) throw Error(ErrorCode::io, "write to " + path + " failed");
}

void dump_json(const ordered_json& doc, const std::string& path) {
  std::ofstream out = open_out(path);
  out << doc.dump(1) << "\n";
  finish_out(out, path);
}

ordered_json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path + " for reading");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io, path + ": " + e.what());
  }
}

// CSV field quoting for free-form text (metric names and details).
std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_graph_json(const IsoradialGraph& g, const std::string& path,
                      const GeneratorSpec* spec) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "isoradial_graph";
  doc["family"] = family_name(g.family);
  doc["h"] = g.h;
  if (spec) {
    ordered_json s;
    s["family"] = family_name(spec->family);
    s["h"] = spec->h;
    s["extent"] = spec->extent;
    s["spacing_convention"] = spec->spacing_convention;
    if (!spec->col_angles.empty()) s["col_angles"] = spec->col_angles;
    if (!spec->row_angles.empty()) s["row_angles"] = spec->row_angles;
    if (spec->track_margin != 0.0) s["track_margin"] = spec->track_margin;
    doc["spec"] = std::move(s);
  }

  ordered_json vertices = ordered_json::array();
  for (int u = 0; u < g.n(); ++u) {
    ordered_json v;
    v["x"] = g.position[u].x;
    v["y"] = g.position[u].y;
    v["interior"] = g.is_interior(u);
    vertices.push_back(std::move(v));
  }
  doc["vertices"] = std::move(vertices);

  ordered_json edges = ordered_json::array();
  for (int e = 0; e < g.m(); ++e) {
    ordered_json row;
    row["u"] = g.edge_u[e];
    row["v"] = g.edge_v[e];
    row["primal_length"] = g.primal_length(e);
    row["dual_length"] = g.dual_length(e);
    edges.push_back(std::move(row));
  }
  doc["edges"] = std::move(edges);

  ordered_json faces = ordered_json::array();
  for (const Face& f : g.faces) {
    ordered_json row;
    row["vertices"] = f.vertices;
    row["cx"] = f.circumcenter.x;
    row["cy"] = f.circumcenter.y;
    faces.push_back(std::move(row));
  }
  doc["faces"] = std::move(faces);

  dump_json(doc, path);
}

IsoradialGraph read_graph_json(const std::string& path,
                               std::optional<GeneratorSpec>* spec_out,
                               StoredEdgeData* stored_out) {
  const ordered_json doc = load_json(path);
  try {
    check_keys(doc, {"schema_version", "kind", "family", "h", "spec",
                     "vertices", "edges", "faces"}, path);
    if (!doc.contains("schema_version") ||
        doc.at("schema_version").get<std::int64_t>() != 1)
      throw Error(ErrorCode::io, path + ": unsupported schema_version");
    if (doc.at("kind").get<std::string>() != "isoradial_graph")
      throw Error(ErrorCode::io, path + ": not an isoradial graph file");

    detail::RawGraph raw;
    raw.family = family_from(doc.at("family").get<std::string>(), path);
    raw.h = doc.at("h").get<double>();
    if (!(raw.h > 0.0) || !std::isfinite(raw.h))
      throw Error(ErrorCode::io, path + ": h must be positive");

    const ordered_json& jverts = doc.at("vertices");
    if (!jverts.is_array() || jverts.empty())
      throw Error(ErrorCode::io, path + ": vertices must be a nonempty array");
    const int n = static_cast<int>(jverts.size());
    std::vector<char> stored_interior(n, 0);
    raw.position.reserve(n);
    for (int u = 0; u < n; ++u) {
      const ordered_json& jv = jverts[u];
      check_keys(jv, {"x", "y", "interior"}, path + ": vertex");
      raw.position.push_back({jv.at("x").get<double>(), jv.at("y").get<double>()});
      stored_interior[u] = jv.at("interior").get<bool>() ? 1 : 0;
    }

    const ordered_json& jedges = doc.at("edges");
    if (!jedges.is_array())
      throw Error(ErrorCode::io, path + ": edges must be an array");
    StoredEdgeData stored;
    std::pair<int, int> prev{-1, -1};
    for (const ordered_json& je : jedges) {
      check_keys(je, {"u", "v", "primal_length", "dual_length"}, path + ": edge");
      const int u = je.at("u").get<int>();
      const int v = je.at("v").get<int>();
      if (u < 0 || v < 0 || u >= n || v >= n || u >= v)
        throw Error(ErrorCode::io, path + ": edge endpoints must satisfy 0 <= u < v < n");
      if (std::pair<int, int>{u, v} <= prev)
        throw Error(ErrorCode::io,
                    path + ": edges must be unique and sorted by (u, v)");
      prev = {u, v};
      raw.edges.emplace_back(u, v);
      stored.primal_len.push_back(je.at("primal_length").get<double>());
      stored.dual_len.push_back(je.at("dual_length").get<double>());
    }

    const ordered_json& jfaces = doc.at("faces");
    if (!jfaces.is_array())
      throw Error(ErrorCode::io, path + ": faces must be an array");
    std::vector<Point> stored_centers;
    for (const ordered_json& jf : jfaces) {
      check_keys(jf, {"vertices", "cx", "cy"}, path + ": face");
      std::vector<int> cyc = jf.at("vertices").get<std::vector<int>>();
      if (cyc.size() < 3)
        throw Error(ErrorCode::io, path + ": face cycles need >= 3 vertices");
      for (int vid : cyc)
        if (vid < 0 || vid >= n)
          throw Error(ErrorCode::io, path + ": face cycle vertex out of range");
      raw.face_cycles.push_back(std::move(cyc));
      stored_centers.push_back({jf.at("cx").get<double>(), jf.at("cy").get<double>()});
    }

    GeneratorSpec spec;
    bool have_spec = false;
    if (doc.contains("spec")) {
      const ordered_json& js = doc.at("spec");
      check_keys(js, {"family", "h", "extent", "spacing_convention",
                      "col_angles", "row_angles", "track_margin"}, path + ": spec");
      spec.family = family_from(js.at("family").get<std::string>(), path);
      spec.h = js.at("h").get<double>();
      spec.extent = js.at("extent").get<int>();
      spec.spacing_convention = js.at("spacing_convention").get<bool>();
      if (js.contains("col_angles"))
        spec.col_angles = js.at("col_angles").get<std::vector<double>>();
      if (js.contains("row_angles"))
        spec.row_angles = js.at("row_angles").get<std::vector<double>>();
      if (js.contains("track_margin"))
        spec.track_margin = js.at("track_margin").get<double>();
      have_spec = true;
    }

    IsoradialGraph g = detail::finalize_graph(std::move(raw));

    // Derived data stored in the file must agree with what the positions and
    // cycles imply; silent divergence here would poison every later check.
    for (int u = 0; u < n; ++u)
      if ((g.is_interior(u) ? 1 : 0) != stored_interior[u])
        throw Error(ErrorCode::io,
                    path + ": stored interior flag of vertex " +
                        std::to_string(u) + " contradicts the face data");
    const double center_tol = 1e-9 * std::max(1.0, g.h);
    for (std::size_t f = 0; f < g.faces.size(); ++f)
      if (norm(g.faces[f].circumcenter - stored_centers[f]) > center_tol)
        throw Error(ErrorCode::io,
                    path + ": stored circumcenter of face " + std::to_string(f) +
                        " contradicts the vertex positions");

    if (spec_out)
      *spec_out = have_spec ? std::optional<GeneratorSpec>(spec) : std::nullopt;
    if (stored_out) *stored_out = std::move(stored);
    return g;
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io, path + ": " + e.what());
  }
}

WeightSet weights_from_lengths(const IsoradialGraph& g,
                               const std::vector<double>& primal_len,
                               const std::vector<double>& dual_len) {
  if (static_cast<int>(primal_len.size()) != g.m() ||
      static_cast<int>(dual_len.size()) != g.m())
    throw Error(ErrorCode::invalid_argument,
                "weights_from_lengths: need one length pair per edge");
  for (int e = 0; e < g.m(); ++e)
    if (!(primal_len[e] > 0.0) || !(dual_len[e] >= 0.0))
      throw Error(ErrorCode::invalid_argument,
                  "weights_from_lengths: primal lengths must be positive and "
                  "dual lengths nonnegative");
  WeightSet w = detail::weights_from_edge_lengths(g, primal_len, dual_len);
  // Constants describe the embedding, not the stored lengths, so bound
  // violations in tampered files stay visible against them.
  w.constants = compute_weights(g).constants;
  return w;
}

void write_validation_csv(const ValidationReport& r, const AssumptionReport& a,
                          const std::string& path) {
  std::ofstream out = open_out(path);
  out << "metric,value\n";
  out << "ok," << (r.ok ? 1 : 0) << "\n";
  out << "max_radius_deviation," << format_double(r.max_radius_deviation) << "\n";
  out << "min_center_margin," << format_double(r.min_center_margin) << "\n";
  out << "max_dual_orthogonality," << format_double(r.max_dual_orthogonality) << "\n";
  out << "c_p," << format_double(a.c_p) << "\n";
  out << "c_d," << format_double(a.c_d) << "\n";
  out << "max_degree," << a.max_degree << "\n";
  out << "kappa_empirical," << format_double(a.kappa_empirical) << "\n";
  out << "detail," << csv_quote(r.detail) << "\n";
  finish_out(out, path);
}

void write_generator_triplets(const SparseGenerator& q, const std::string& path) {
  std::ofstream out = open_out(path);
  for (const Triplet& t : generator_triplets(q))
    out << t.row << " " << t.col << " " << format_double(t.value) << "\n";
  finish_out(out, path);
}

void write_kernel_row_csv(const KernelRow& row, const IsoradialGraph& g,
                          const std::string& path) {
  std::ofstream out = open_out(path);
  out << "vertex,x,y,value,log_value\n";
  for (std::size_t i = 0; i < row.vertices.size(); ++i) {
    const int v = row.vertices[i];
    const double log_value = std::log(row.scaled_value[i]) + row.log_scale;
    out << v << "," << format_double(g.position[v].x) << ","
        << format_double(g.position[v].y) << ","
        << format_double(row.value(static_cast<int>(i))) << ","
        << format_double(log_value) << "\n";
  }
  finish_out(out, path);
}

void write_trajectory_csv(const WalkTrajectory& traj, const IsoradialGraph& g,
                          const std::string& path) {
  std::ofstream out = open_out(path);
  out << "jump,time,vertex,x,y\n";
  for (std::size_t k = 0; k < traj.vertex.size(); ++k) {
    const int v = traj.vertex[k];
    const double t = k == 0 ? 0.0 : traj.jump_time[k - 1];
    out << k << "," << format_double(t) << "," << v << ","
        << format_double(g.position[v].x) << ","
        << format_double(g.position[v].y) << "\n";
  }
  finish_out(out, path);
}

void write_moments_json(const EmpiricalMoments& m, const std::string& path) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "walk_moments";
  doc["samples"] = m.samples;
  doc["mean"] = {{"x", m.mean.x}, {"y", m.mean.y}};
  doc["mean_se"] = {{"x", m.mean_se.x}, {"y", m.mean_se.y}};
  doc["var_re"] = m.var_re;
  doc["var_im"] = m.var_im;
  doc["var_re_se"] = m.var_re_se;
  doc["var_im_se"] = m.var_im_se;
  doc["cov"] = m.cov;
  doc["cov_se"] = m.cov_se;
  doc["fourth_ratio_re"] = m.fourth_ratio_re;
  doc["fourth_ratio_im"] = m.fourth_ratio_im;
  dump_json(doc, path);
}

void write_bounds_csv(const std::vector<BoundRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "x,y,t,log_lower,log_exact,log_upper,margin\n";
  for (const BoundRow& r : rows)
    out << r.x << "," << r.y << "," << format_double(r.t) << ","
        << format_double(r.log_lower) << "," << format_double(r.log_exact) << ","
        << format_double(r.log_upper) << "," << format_double(r.margin) << "\n";
  finish_out(out, path);
}

namespace {

void sweep_row_csv(std::ofstream& out, const SweepRow& r) {
  out << format_double(r.h) << "," << r.dc << "," << format_double(r.h_dc) << ","
      << format_double(r.log_value) << "," << format_double(r.scaled) << ","
      << format_double(r.target) << "," << format_double(r.gap) << ","
      << format_double(r.error_bound) << "," << (r.certified ? 1 : 0) << ","
      << (r.accepted ? 1 : 0) << "," << r.window_extent << "," << r.steps_used
      << "\n";
}

}  // namespace

void write_sweep_csv(const SweepResult& r, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "h,dc,h_dc,log_value,scaled,target,gap,error_bound,certified,"
         "accepted,window_extent,steps_used\n";
  for (const SweepRow& row : r.rows) sweep_row_csv(out, row);
  finish_out(out, path);
}

void write_sweep_json(const SweepResult& r, const std::string& path) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "sweep";
  doc["verdict"] = r.verdict == Verdict::converging ? "converging" : "inconclusive";
  doc["gap_threshold"] = r.gap_threshold;
  ordered_json rows = ordered_json::array();
  for (const SweepRow& row : r.rows) {
    ordered_json j;
    j["h"] = row.h;
    j["dc"] = row.dc;
    j["h_dc"] = row.h_dc;
    j["log_value"] = row.log_value;
    j["scaled"] = row.scaled;
    j["target"] = row.target;
    j["gap"] = row.gap;
    j["error_bound"] = row.error_bound;
    j["certified"] = row.certified;
    j["accepted"] = row.accepted;
    j["window_extent"] = row.window_extent;
    j["steps_used"] = row.steps_used;
    rows.push_back(std::move(j));
  }
  doc["rows"] = std::move(rows);
  dump_json(doc, path);
}

void write_plot_data(const SweepResult& r, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "h,value,target\n";
  for (const SweepRow& row : r.rows)
    out << format_double(row.h) << "," << format_double(row.scaled) << ","
        << format_double(row.target) << "\n";
  finish_out(out, path);
}

}  // namespace isoradial::io
