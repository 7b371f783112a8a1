#pragma once

#include <cstdint>
#include <vector>

#include "isoradial/geometry.hpp"
#include "isoradial/operators.hpp"

namespace isoradial {

// One trajectory of a continuous-time walk: holds at vertex[k] on
// [jump_time[k-1], jump_time[k]), jump times strictly increasing in
// [0, horizon], consecutive vertices adjacent.
struct WalkTrajectory {
  std::vector<int> vertex;        // visited states, vertex[0] = start
  std::vector<double> jump_time;  // size vertex.size() - 1
  double horizon = 0.0;
  std::uint64_t seed = 0;

  int state_at(double t) const;   // right-continuous
  int jumps() const { return static_cast<int>(jump_time.size()); }
};

// Variable-speed walk: holds at u for Exp(lambda(u)), jumps to v with
// probability omega_uv / m_u. Deterministic given the seed. Throws
// ErrorCode::boundary (reporting the hop radius that would be needed) if the
// walk leaves the interior before the horizon; silent reflection or
// absorption would corrupt the statistics this feeds.
WalkTrajectory sample_trajectory(const IsoradialGraph& g, const WeightSet& w,
                                 int u0, double horizon, std::uint64_t seed);

// Reclocks a variable-speed trajectory to the constant-speed clock: the walk
// spends ds = m_u/(2 A_u) dt of new time per dt of old time at u, making the
// jump rate identically 1. Vertex sequence is unchanged. time_change_inverse
// undoes it exactly.
WalkTrajectory time_change(const WalkTrajectory& traj, const WeightSet& w);
WalkTrajectory time_change_inverse(const WalkTrajectory& traj, const WeightSet& w);

struct EmpiricalMoments {
  std::int64_t samples = 0;
  Point mean{0.0, 0.0};
  Point mean_se{0.0, 0.0};
  double var_re = 0.0;        // sample variance of Re(X_T - X_0)
  double var_im = 0.0;
  double var_re_se = 0.0;
  double var_im_se = 0.0;
  double cov = 0.0;
  double cov_se = 0.0;
  double fourth_ratio_re = 0.0;  // E[Re^4] / (3 E[Re^2]^2)
  double fourth_ratio_im = 0.0;
};

// Monte Carlo displacement moments of the variable-speed walk at the horizon.
// Trajectory i draws from an RNG stream derived from (seed, i) and the
// reduction runs in index order, so results are identical for any thread
// count. threads = 0 uses the hardware count.
EmpiricalMoments empirical_moments(const IsoradialGraph& g, const WeightSet& w,
                                   int u0, double horizon, std::int64_t samples,
                                   std::uint64_t seed, int threads = 0);

} // namespace isoradial
