#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isoradial/bounds.hpp"
#include "isoradial/geometry.hpp"
#include "isoradial/kernel.hpp"
#include "isoradial/operators.hpp"
#include "isoradial/regimes.hpp"
#include "isoradial/walk.hpp"

// Serialization. CSV writers format floating point with %.17g; JSON writers
// use the shortest encoding that round-trips exactly. Both are byte-stable
// across runs. All readers reject unknown keys.
namespace isoradial::io {

std::string format_double(double v);

// Graph files: JSON with schema_version 1, vertex positions, interior flags,
// edges carrying |e| and |e*|, faces with circumcenters, h, and the
// generating spec when known.
void write_graph_json(const IsoradialGraph& g, const std::string& path,
                      const GeneratorSpec* spec = nullptr);

// Edge lengths as stored in a graph file; kept separate from the embedding
// so consistency between the two is checkable.
struct StoredEdgeData {
  std::vector<double> primal_len;
  std::vector<double> dual_len;
};

IsoradialGraph read_graph_json(const std::string& path,
                               std::optional<GeneratorSpec>* spec_out = nullptr,
                               StoredEdgeData* stored_out = nullptr);

// Weights built from externally supplied edge lengths instead of the
// embedding (constants and areas still come from the embedding).
WeightSet weights_from_lengths(const IsoradialGraph& g,
                               const std::vector<double>& primal_len,
                               const std::vector<double>& dual_len);

void write_validation_csv(const ValidationReport& r, const AssumptionReport& a,
                          const std::string& path);

// One "row col value" triplet per line, diagonal included, row-major.
void write_generator_triplets(const SparseGenerator& q, const std::string& path);

// Columns: vertex, x, y, value, log_value.
void write_kernel_row_csv(const KernelRow& row, const IsoradialGraph& g,
                          const std::string& path);

// Columns: jump index, time, vertex, x, y.
void write_trajectory_csv(const WalkTrajectory& traj, const IsoradialGraph& g,
                          const std::string& path);

void write_moments_json(const EmpiricalMoments& m, const std::string& path);

struct BoundRow {
  int x = 0, y = 0;
  double t = 0.0;
  double log_lower = 0.0;
  double log_exact = 0.0;
  double log_upper = 0.0;
  double margin = 0.0;   // min(log_exact - log_lower, log_upper - log_exact)
};

void write_bounds_csv(const std::vector<BoundRow>& rows, const std::string& path);

void write_sweep_csv(const SweepResult& r, const std::string& path);
void write_sweep_json(const SweepResult& r, const std::string& path);

// Columns: h, value, target — points for external plotting.
void write_plot_data(const SweepResult& r, const std::string& path);

} // namespace isoradial::io
