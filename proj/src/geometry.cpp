#include "isoradial/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "isoradial/errors.hpp"
#include "internal.hpp"
#include "util.hpp"

namespace isoradial {

// Builds CSR adjacency, face records, edge-face incidence, interior flags and
// dual areas from positions + edges + face cycles. Shared by the generators
// and the graph-file reader.
IsoradialGraph detail::finalize_graph(detail::RawGraph&& raw) {
  IsoradialGraph g;
  g.h = raw.h;
  g.family = raw.family;
  g.position = std::move(raw.position);
  const int n = g.n();

  // normalized undirected edges, deduplicated, id by (u, v) order
  std::map<std::pair<int, int>, int> edge_index;
  for (auto [u, v] : raw.edges) {
    if (u == v || u < 0 || v < 0 || u >= n || v >= n)
      throw Error(ErrorCode::internal, "generator emitted a bad edge");
    if (u > v) std::swap(u, v);
    edge_index.try_emplace({u, v}, 0);
  }
  int m = 0;
  for (auto& [key, id] : edge_index) id = m++;
  g.edge_u.resize(m);
  g.edge_v.resize(m);
  for (const auto& [key, id] : edge_index) {
    g.edge_u[id] = key.first;
    g.edge_v[id] = key.second;
  }

  g.neighbor_off.assign(n + 1, 0);
  for (int e = 0; e < m; ++e) {
    ++g.neighbor_off[g.edge_u[e] + 1];
    ++g.neighbor_off[g.edge_v[e] + 1];
  }
  for (int u = 0; u < n; ++u) g.neighbor_off[u + 1] += g.neighbor_off[u];
  g.neighbor_ids.resize(2 * m);
  g.edge_ids.resize(2 * m);
  {
    std::vector<int> cursor(g.neighbor_off.begin(), g.neighbor_off.end() - 1);
    // edges are visited in (u, v)-sorted order, so each row comes out sorted
    for (int e = 0; e < m; ++e) {
      int u = g.edge_u[e], v = g.edge_v[e];
      g.neighbor_ids[cursor[u]] = v;
      g.edge_ids[cursor[u]++] = e;
    }
    for (int e = 0; e < m; ++e) {
      int u = g.edge_u[e], v = g.edge_v[e];
      g.neighbor_ids[cursor[v]] = u;
      g.edge_ids[cursor[v]++] = e;
    }
    for (int u = 0; u < n; ++u) {
      int lo = g.neighbor_off[u], hi = g.neighbor_off[u + 1];
      std::vector<std::pair<int, int>> row;
      row.reserve(hi - lo);
      for (int k = lo; k < hi; ++k) row.emplace_back(g.neighbor_ids[k], g.edge_ids[k]);
      std::sort(row.begin(), row.end());
      for (int k = lo; k < hi; ++k) {
        g.neighbor_ids[k] = row[k - lo].first;
        g.edge_ids[k] = row[k - lo].second;
      }
    }
  }

  // faces: circumcenter from the first three cycle vertices, ccw orientation
  g.faces.reserve(raw.face_cycles.size());
  for (auto& cyc : raw.face_cycles) {
    if (cyc.size() < 3) throw Error(ErrorCode::internal, "face cycle too short");
    Face f;
    f.vertices = std::move(cyc);
    std::vector<Point> poly;
    poly.reserve(f.vertices.size());
    for (int v : f.vertices) poly.push_back(g.position[v]);
    if (util::polygon_area(poly) < 0.0) {
      std::reverse(f.vertices.begin(), f.vertices.end());
      std::reverse(poly.begin(), poly.end());
    }
    f.circumcenter = util::circumcenter3(poly[0], poly[1], poly[2]);
    f.circumradius = norm(poly[0] - f.circumcenter);
    f.area = util::polygon_area(poly);
    g.faces.push_back(std::move(f));
  }

  // edge -> face incidence via cycle traversal; the face lies left of u -> v
  g.edge_face_left.assign(m, -1);
  g.edge_face_right.assign(m, -1);
  for (int fi = 0; fi < static_cast<int>(g.faces.size()); ++fi) {
    const auto& cyc = g.faces[fi].vertices;
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
      auto it = edge_index.find({std::min(a, b), std::max(a, b)});
      if (it == edge_index.end())
        throw Error(ErrorCode::internal, "face cycle uses a missing edge");
      int e = it->second;
      int& slot = (a < b) ? g.edge_face_left[e] : g.edge_face_right[e];
      if (slot != -1) throw Error(ErrorCode::internal, "edge bordered by three faces");
      slot = fi;
    }
  }

  // interior vertex: every incident edge carries two faces and the distinct
  // incident faces close a ring of size deg(u); its dual cell is the polygon
  // of their circumcenters (all at distance h/2 from u, hence convex)
  g.interior.assign(n, 0);
  g.dual_area.assign(n, 0.0);
  for (int u = 0; u < n; ++u) {
    auto edges = g.incident_edges(u);
    if (edges.empty()) continue;
    std::vector<int> ring;
    ring.reserve(2 * edges.size());
    bool complete = true;
    for (int e : edges) {
      if (g.edge_face_left[e] < 0 || g.edge_face_right[e] < 0) {
        complete = false;
        break;
      }
      ring.push_back(g.edge_face_left[e]);
      ring.push_back(g.edge_face_right[e]);
    }
    if (!complete) continue;
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    if (static_cast<int>(ring.size()) != static_cast<int>(edges.size())) continue;

    std::vector<Point> cell;
    cell.reserve(ring.size());
    for (int fi : ring) cell.push_back(g.faces[fi].circumcenter);
    Point c = g.position[u];
    std::sort(cell.begin(), cell.end(), [c](Point a, Point b) {
      return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
    });
    double area = util::polygon_area(cell);
    if (area <= 0.0) throw Error(ErrorCode::internal, "degenerate dual cell");
    g.interior[u] = 1;
    g.dual_area[u] = area;
  }

  return g;
}

namespace {

using detail::RawGraph;

RawGraph make_square(const GeneratorSpec& spec) {
  double s = spec.spacing_convention ? spec.h : spec.h / std::numbers::sqrt2;
  int E = spec.extent;
  int w = 2 * E + 1;
  RawGraph raw;
  raw.h = s * std::numbers::sqrt2;
  raw.family = Family::square;
  auto id = [w](int i, int j) { return i * w + j; };
  raw.position.reserve(static_cast<std::size_t>(w) * w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      raw.position.push_back({(i - E) * s, (j - E) * s});
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) {
      if (i + 1 < w) raw.edges.emplace_back(id(i, j), id(i + 1, j));
      if (j + 1 < w) raw.edges.emplace_back(id(i, j), id(i, j + 1));
    }
  for (int i = 0; i + 1 < w; ++i)
    for (int j = 0; j + 1 < w; ++j)
      raw.face_cycles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return raw;
}

RawGraph make_triangular(const GeneratorSpec& spec) {
  double a = spec.spacing_convention ? spec.h : spec.h * std::numbers::sqrt3 / 2.0;
  int E = spec.extent;
  int w = 2 * E + 1;
  RawGraph raw;
  raw.h = 2.0 * a / std::numbers::sqrt3;
  raw.family = Family::triangular;
  auto id = [w](int i, int j) { return i * w + j; };
  raw.position.reserve(static_cast<std::size_t>(w) * w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      raw.position.push_back({(i - E) * a + (j - E) * a * 0.5,
                              (j - E) * a * std::numbers::sqrt3 / 2.0});
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) {
      if (i + 1 < w) raw.edges.emplace_back(id(i, j), id(i + 1, j));
      if (j + 1 < w) raw.edges.emplace_back(id(i, j), id(i, j + 1));
      if (i + 1 < w && j + 1 < w) raw.edges.emplace_back(id(i + 1, j), id(i, j + 1));
    }
  for (int i = 0; i + 1 < w; ++i)
    for (int j = 0; j + 1 < w; ++j) {
      raw.face_cycles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      raw.face_cycles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return raw;
}

double normalize_angle_diff(double d) {
  while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
  while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
  return d;
}

RawGraph make_rhombic_tracks(const GeneratorSpec& spec) {
  if (spec.spacing_convention)
    throw Error(ErrorCode::invalid_argument,
                "rhombic-tracks fixes its side length to h/2; the spacing "
                "convention does not apply");
  std::vector<double> alpha = spec.col_angles.empty()
                                  ? std::vector<double>{0.0}
                                  : spec.col_angles;
  std::vector<double> beta = spec.row_angles.empty()
                                 ? std::vector<double>{std::numbers::pi / 2.0}
                                 : spec.row_angles;
  int N = 2 * spec.extent;  // tiling steps per direction; indices 0..N
  std::vector<double> as(N), bs(N);
  for (int i = 0; i < N; ++i) as[i] = alpha[i % alpha.size()];
  for (int j = 0; j < N; ++j) bs[j] = beta[j % beta.size()];

  double margin = std::max(spec.track_margin, 0.0);
  for (double av : alpha)
    for (double bv : beta) {
      double d = normalize_angle_diff(bv - av);
      if (!(d >= margin && d <= std::numbers::pi - margin) || d <= 0.0 ||
          d >= std::numbers::pi) {
        std::ostringstream msg;
        msg << "bounded-angle violation: track angle difference " << d
            << " outside [" << margin << ", " << std::numbers::pi - margin << "]";
        throw Error(ErrorCode::geometry, msg.str());
      }
    }

  // tiling vertex (i, j) at (h/2) (sum of col steps + sum of row steps)
  double r = spec.h / 2.0;
  int w = N + 1;
  std::vector<Point> tiling(static_cast<std::size_t>(w) * w);
  std::vector<Point> ca(w), cb(w);
  ca[0] = cb[0] = {0.0, 0.0};
  for (int i = 0; i < N; ++i)
    ca[i + 1] = ca[i] + Point{r * std::cos(as[i]), r * std::sin(as[i])};
  for (int j = 0; j < N; ++j)
    cb[j + 1] = cb[j] + Point{r * std::cos(bs[j]), r * std::sin(bs[j])};
  Point center = ca[spec.extent] + cb[spec.extent];  // even-parity recentering
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      tiling[static_cast<std::size_t>(i) * w + j] = ca[i] + cb[j] - center;

  // primal = even index parity
  std::vector<int> primal_id(static_cast<std::size_t>(w) * w, -1);
  RawGraph raw;
  raw.h = spec.h;
  raw.family = Family::rhombic_tracks;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j)
      if ((i + j) % 2 == 0) {
        primal_id[static_cast<std::size_t>(i) * w + j] =
            static_cast<int>(raw.position.size());
        raw.position.push_back(tiling[static_cast<std::size_t>(i) * w + j]);
      }
  auto pid = [&](int i, int j) { return primal_id[static_cast<std::size_t>(i) * w + j]; };

  // each rhombus contributes the diagonal between its even-parity corners
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if ((i + j) % 2 == 0)
        raw.edges.emplace_back(pid(i, j), pid(i + 1, j + 1));
      else
        raw.edges.emplace_back(pid(i + 1, j), pid(i, j + 1));
    }

  // faces ring the odd tiling vertices; neighbors listed ccw (every
  // difference beta - alpha lies in (0, pi), which fixes the rotation order)
  for (int i = 1; i < N; ++i)
    for (int j = 1; j < N; ++j)
      if ((i + j) % 2 == 1)
        raw.face_cycles.push_back(
            {pid(i + 1, j), pid(i, j + 1), pid(i - 1, j), pid(i, j - 1)});
  return raw;
}

} // namespace

IsoradialGraph generate(const GeneratorSpec& spec) {
  if (!(spec.h > 0.0) || !std::isfinite(spec.h))
    throw Error(ErrorCode::invalid_argument, "mesh size h must be positive");
  if (spec.extent < 1)
    throw Error(ErrorCode::invalid_argument, "extent must be at least 1");
  switch (spec.family) {
    case Family::square: return detail::finalize_graph(make_square(spec));
    case Family::triangular: return detail::finalize_graph(make_triangular(spec));
    case Family::rhombic_tracks:
      return detail::finalize_graph(make_rhombic_tracks(spec));
  }
  throw Error(ErrorCode::invalid_argument, "unknown family");
}

ValidationReport validate_isoradial(const IsoradialGraph& g, double tol) {
  ValidationReport rep;
  rep.min_center_margin = std::numeric_limits<double>::infinity();
  std::ostringstream detail;
  bool ok = true;

  for (std::size_t fi = 0; fi < g.faces.size(); ++fi) {
    const Face& f = g.faces[fi];
    std::vector<Point> poly;
    poly.reserve(f.vertices.size());
    for (int v : f.vertices) poly.push_back(g.position[v]);
    Point c = util::circumcenter3(poly[0], poly[1], poly[2]);
    double dev = 0.0;
    for (const Point& p : poly)
      dev = std::max(dev, std::abs(norm(p - c) - g.h / 2.0));
    rep.max_radius_deviation = std::max(rep.max_radius_deviation, dev);
    if (dev > tol && ok) {
      detail << "face " << fi << ": radius deviation " << dev << " exceeds " << tol;
      ok = false;
    }
    double margin = util::convex_margin(c, poly);
    rep.min_center_margin = std::min(rep.min_center_margin, margin);
    if (margin <= 0.0 && ok) {
      detail << "face " << fi << ": circumcenter not strictly inside";
      ok = false;
    }
  }

  for (int e = 0; e < g.m(); ++e) {
    if (g.edge_face_left[e] < 0 || g.edge_face_right[e] < 0) continue;
    Point pe = g.position[g.edge_v[e]] - g.position[g.edge_u[e]];
    Point de = g.faces[g.edge_face_left[e]].circumcenter -
               g.faces[g.edge_face_right[e]].circumcenter;
    double lp = norm(pe), ld = norm(de);
    if (ld == 0.0) {
      if (ok) detail << "edge " << e << ": zero-length dual edge";
      ok = false;
      continue;
    }
    double cosang = std::abs(pe.x * de.x + pe.y * de.y) / (lp * ld);
    rep.max_dual_orthogonality = std::max(rep.max_dual_orthogonality, cosang);
    if (cosang > 1e-9 && ok) {
      detail << "edge " << e << ": dual edge not orthogonal (cos = " << cosang << ")";
      ok = false;
    }
  }

  if (g.faces.empty()) rep.min_center_margin = 0.0;
  rep.ok = ok;
  rep.detail = detail.str();
  return rep;
}

namespace {

// Dijkstra from src; fills dist with weighted distances (-1 for unreachable).
void dijkstra(const IsoradialGraph& g, int src, std::vector<double>& dist) {
  dist.assign(g.n(), -1.0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, src});
  std::vector<char> done(g.n(), 0);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    dist[u] = d;
    auto nbrs = g.neighbors(u);
    auto edges = g.incident_edges(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      int v = nbrs[k];
      if (done[v]) continue;
      heap.push({d + g.primal_length(edges[k]), v});
    }
  }
}

} // namespace

AssumptionReport check_assumptions(const IsoradialGraph& g, int exhaustive_limit) {
  if (g.m() == 0) throw Error(ErrorCode::invalid_argument, "graph has no edges");
  AssumptionReport rep;
  rep.c_p = std::numeric_limits<double>::infinity();
  rep.c_d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < g.m(); ++e) {
    rep.c_p = std::min(rep.c_p, g.primal_length(e) / g.h);
    if (g.edge_face_left[e] >= 0 && g.edge_face_right[e] >= 0)
      rep.c_d = std::min(rep.c_d, g.dual_length(e) / g.h);
  }
  for (int u = 0; u < g.n(); ++u) rep.max_degree = std::max(rep.max_degree, g.degree(u));

  std::vector<int> interior;
  for (int u = 0; u < g.n(); ++u)
    if (g.is_interior(u)) interior.push_back(u);
  if (interior.size() < 2) return rep;

  std::vector<int> sources;
  if (g.n() <= exhaustive_limit) {
    sources = interior;
  } else {
    std::size_t stride = std::max<std::size_t>(1, interior.size() / 64);
    for (std::size_t k = 0; k < interior.size(); k += stride)
      sources.push_back(interior[k]);
  }
  std::vector<double> dist;
  for (int u : sources) {
    dijkstra(g, u, dist);
    for (int v : interior) {
      if (v == u || dist[v] < 0.0) continue;
      double euclid = norm(g.position[v] - g.position[u]);
      if (euclid > 0.0)
        rep.kappa_empirical = std::max(rep.kappa_empirical, dist[v] / euclid);
    }
  }
  return rep;
}

int project(const IsoradialGraph& g, Point p) {
  if (g.n() == 0) throw Error(ErrorCode::invalid_argument, "empty graph");
  int best = 0;
  double best_d = norm2(g.position[0] - p);
  for (int v = 1; v < g.n(); ++v) {
    double d = norm2(g.position[v] - p);
    if (d < best_d) {
      best = v;
      best_d = d;
    } else if (d == best_d) {
      Point a = g.position[v], b = g.position[best];
      if (a.x < b.x || (a.x == b.x && a.y < b.y)) best = v;
    }
  }
  return best;
}

double weighted_distance(const IsoradialGraph& g, int u, int v) {
  if (u == v) return 0.0;
  std::vector<double> dist;
  dijkstra(g, u, dist);
  if (dist[v] < 0.0)
    throw Error(ErrorCode::disconnected, "vertices are not connected");
  return dist[v];
}

int combinatorial_distance(const IsoradialGraph& g, int u, int v) {
  if (u == v) return 0;
  std::vector<int> dist(g.n(), -1);
  std::queue<int> q;
  dist[u] = 0;
  q.push(u);
  while (!q.empty()) {
    int w = q.front();
    q.pop();
    if (w == v) return dist[v];
    for (int z : g.neighbors(w))
      if (dist[z] < 0) {
        dist[z] = dist[w] + 1;
        q.push(z);
      }
  }
  throw Error(ErrorCode::disconnected, "vertices are not connected");
}

std::vector<int> combinatorial_ball(const IsoradialGraph& g, int u, int r) {
  if (r < 0) throw Error(ErrorCode::invalid_argument, "negative ball radius");
  std::vector<int> dist(g.n(), -1);
  std::vector<int> ball;
  std::queue<int> q;
  dist[u] = 0;
  q.push(u);
  ball.push_back(u);
  while (!q.empty()) {
    int w = q.front();
    q.pop();
    if (dist[w] == r) continue;
    for (int z : g.neighbors(w))
      if (dist[z] < 0) {
        dist[z] = dist[w] + 1;
        ball.push_back(z);
        q.push(z);
      }
  }
  for (int v : ball)
    if (!g.is_interior(v)) {
      std::ostringstream msg;
      msg << "ball of radius " << r << " around vertex " << u
          << " is clipped by the window boundary";
      throw Error(ErrorCode::boundary, msg.str());
    }
  return ball;
}

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::geometry: return "geometry";
    case ErrorCode::window_too_small: return "window_too_small";
    case ErrorCode::disconnected: return "disconnected";
    case ErrorCode::boundary: return "boundary";
    case ErrorCode::io: return "io";
    case ErrorCode::config: return "config";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

} // namespace isoradial
