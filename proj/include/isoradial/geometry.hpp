#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace isoradial {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline double norm2(Point p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }

enum class Family {
  square,
  triangular,
  rhombic_tracks
};

// Construction request for a finite window of an isoradial graph.
//
// `h` is the common circumcircle diameter unless `spacing_convention` is set,
// in which case `h` is reinterpreted as the lattice spacing (square: cell
// side, circumdiameter h*sqrt(2); triangular: side length, circumdiameter
// 2h/sqrt(3)). Scaling sweeps read more cleanly against the spacing, and
// h * d^c(x, y) is then exact. rhombic-tracks pins its side length to h/2 and
// rejects the flag.
//
// rhombic-tracks: the plane is tiled by rhombi of side h/2 spanned by unit
// vectors exp(i col_angles[i]), exp(i row_angles[j]); tiling vertices of even
// index parity are the primal vertices, even diagonals the primal edges, odd
// vertices the face circumcenters. Angle lists are cycled to the window size;
// empty lists default to {0} and {pi/2}. Every difference row - col must lie
// in [track_margin, pi - track_margin] after normalization to (-pi, pi].
struct GeneratorSpec {
  Family family = Family::square;
  double h = 1.0;
  int extent = 4;                  // window half-width in lattice steps, >= 1
  bool spacing_convention = false;
  std::vector<double> col_angles;  // rhombic-tracks only
  std::vector<double> row_angles;
  double track_margin = 0.0;
};

struct Face {
  std::vector<int> vertices;  // ccw cycle
  Point circumcenter;
  double circumradius = 0.0;
  double area = 0.0;
};

// Finite planar window with its circle pattern data.
//
// Adjacency is CSR: neighbors of u are neighbor_ids[neighbor_off[u] ..
// neighbor_off[u+1]), sorted by vertex id, with edge_ids aligned. Each
// undirected edge stores its one or two incident faces (-1 when the face
// falls outside the window). h is always the circumcircle diameter.
struct IsoradialGraph {
  double h = 0.0;
  Family family = Family::square;
  std::vector<Point> position;

  std::vector<int> neighbor_off;   // size n+1
  std::vector<int> neighbor_ids;
  std::vector<int> edge_ids;

  std::vector<int> edge_u, edge_v; // endpoints, edge_u < edge_v
  std::vector<int> edge_face_left, edge_face_right;

  std::vector<Face> faces;

  std::vector<char> interior;      // 1 iff the full ring of incident faces exists
  std::vector<double> dual_area;   // A_u for interior u, else 0

  int n() const { return static_cast<int>(position.size()); }
  int m() const { return static_cast<int>(edge_u.size()); }
  int degree(int u) const { return neighbor_off[u + 1] - neighbor_off[u]; }
  std::span<const int> neighbors(int u) const {
    return {neighbor_ids.data() + neighbor_off[u],
            neighbor_ids.data() + neighbor_off[u + 1]};
  }
  std::span<const int> incident_edges(int u) const {
    return {edge_ids.data() + neighbor_off[u],
            edge_ids.data() + neighbor_off[u + 1]};
  }
  bool is_interior(int u) const { return interior[u] != 0; }

  double primal_length(int e) const {
    return norm(position[edge_v[e]] - position[edge_u[e]]);
  }
  // |e*| = distance between the two incident circumcenters; 0 if one is
  // missing (possible only along the window boundary).
  double dual_length(int e) const {
    if (edge_face_left[e] < 0 || edge_face_right[e] < 0) return 0.0;
    return norm(faces[edge_face_left[e]].circumcenter -
                faces[edge_face_right[e]].circumcenter);
  }
};

IsoradialGraph generate(const GeneratorSpec& spec);

struct ValidationReport {
  bool ok = false;
  double max_radius_deviation = 0.0;     // max over faces and cycle vertices of ||v-c| - h/2|
  double min_center_margin = 0.0;        // min distance of a circumcenter to its face boundary
  double max_dual_orthogonality = 0.0;   // max |cos(angle between e and e*)|
  std::string detail;                    // empty when ok
};

// Passes iff every face is inscribed in a circle of diameter h within tol,
// every circumcenter lies strictly inside its face, and every interior dual
// edge is orthogonal to its primal edge.
ValidationReport validate_isoradial(const IsoradialGraph& g, double tol = 1e-9);

struct AssumptionReport {
  double c_p = 0.0;              // min |e| / h
  double c_d = 0.0;              // min |e*| / h over edges with both faces
  int max_degree = 0;            // M
  double kappa_empirical = 0.0;  // max d_h(u,v) / |u - v| over probed interior pairs
};

// kappa is exhaustive over interior pairs when the window has at most
// exhaustive_limit vertices, else taken over a deterministic stride sample
// of source vertices.
AssumptionReport check_assumptions(const IsoradialGraph& g,
                                   int exhaustive_limit = 2500);

// Nearest vertex to p; ties broken by smallest position (x, then y, then id).
int project(const IsoradialGraph& g, Point p);

// Shortest-path distance with Euclidean edge lengths.
double weighted_distance(const IsoradialGraph& g, int u, int v);

// Hop distance.
int combinatorial_distance(const IsoradialGraph& g, int u, int v);

// Vertices within hop distance r of u, BFS order. Errors with
// ErrorCode::boundary if any ball vertex is non-interior: the ball would be
// clipped by the window and its content meaningless.
std::vector<int> combinatorial_ball(const IsoradialGraph& g, int u, int r);

} // namespace isoradial
