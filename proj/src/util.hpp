#pragma once

// Shared numeric and plumbing helpers. Internal to the library; nothing here
// is part of the public surface.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "isoradial/errors.hpp"
#include "isoradial/geometry.hpp"

namespace isoradial::util {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), safe for either being -inf.
inline double logsumexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = a > b ? a : b;
  return m + std::log1p(std::exp((a > b ? b : a) - m));
}

struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// --- deterministic RNG streams ---------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded from (seed, stream): stream i of a fixed seed is fully
// determined by the pair, so parallel consumers stay reproducible under any
// scheduling.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t st = seed ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    for (auto& w : s_) w = splitmix64(st);
  }

  std::uint64_t next() {
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // strictly positive uniform, for log transforms
  double uniform_pos() {
    double u;
    do { u = uniform(); } while (u <= 0.0);
    return u;
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

// --- Poisson machinery -------------------------------------------------------

inline double log_poisson_pmf(std::int64_t k, double lambda) {
  if (lambda == 0.0) return k == 0 ? 0.0 : kNegInf;
  return static_cast<double>(k) * std::log(lambda) - lambda -
         std::lgamma(static_cast<double>(k) + 1.0);
}

// Upper bound on log sum_{j > K} pmf(j): geometric domination with ratio
// lambda/(K+2), valid once K+2 > lambda.
inline double log_poisson_tail_bound(std::int64_t K, double lambda) {
  double r = lambda / static_cast<double>(K + 2);
  if (r >= 1.0) return 0.0;  // bound vacuous; caller must grow K
  return log_poisson_pmf(K + 1, lambda) - std::log1p(-r);
}

// Smallest K with the tail bound <= tol.
inline std::int64_t poisson_truncation(double lambda, double tol) {
  if (lambda == 0.0) return 0;
  double log_tol = std::log(tol);
  std::int64_t k = static_cast<std::int64_t>(lambda) + 1;
  while (log_poisson_tail_bound(k, lambda) > log_tol) ++k;
  return k;
}

// Upper bound on log sum_{j > K} pmf(j) * j^p: each extra step multiplies the
// pmf by at most lambda/(K+2) and the polynomial by ((j+1)/j)^p <= ((K+2)/(K+1))^p.
inline double log_poisson_moment_tail_bound(std::int64_t K, double lambda, int p) {
  double ratio = lambda / static_cast<double>(K + 2);
  for (int i = 0; i < p; ++i)
    ratio *= static_cast<double>(K + 2) / static_cast<double>(K + 1);
  if (ratio >= 1.0) return 1.0;  // vacuous marker, caller grows K
  return log_poisson_pmf(K + 1, lambda) +
         static_cast<double>(p) * std::log(static_cast<double>(K + 1)) -
         std::log1p(-ratio);
}

// --- small geometry ----------------------------------------------------------

inline Point circumcenter3(Point a, Point b, Point c) {
  double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (std::abs(d) < 1e-300)
    throw Error(ErrorCode::geometry, "degenerate face: collinear vertices");
  double a2 = norm2(a), b2 = norm2(b), c2 = norm2(c);
  return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
          (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

// Signed area (positive for ccw).
inline double polygon_area(const std::vector<Point>& poly) {
  double s = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
    s += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
  return 0.5 * s;
}

// Distance of p to the boundary of a convex ccw polygon, positive inside.
inline double convex_margin(Point p, const std::vector<Point>& poly) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    Point a = poly[j], b = poly[i];
    double len = norm(b - a);
    double d = ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / len;
    margin = std::min(margin, d);
  }
  return margin;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

inline LineFit least_squares(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i)
    f.max_residual = std::max(f.max_residual,
                              std::abs(ys[i] - f.slope * xs[i] - f.intercept));
  return f;
}

// --- deterministic parallelism ----------------------------------------------

inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(block, lo, hi) over fixed-size blocks of [0, n). Blocks are handed
// to workers through an atomic counter, so any thread count yields the same
// block boundaries; callers make the merge deterministic by indexing on the
// block id.
template <typename Fn>
void parallel_blocks(std::int64_t n, std::int64_t block_size, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  std::int64_t n_blocks = (n + block_size - 1) / block_size;
  if (threads == 1 || n_blocks <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b)
      fn(b, b * block_size, std::min(n, (b + 1) * block_size));
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::int64_t b = next.fetch_add(1);
      if (b >= n_blocks || failed.load()) return;
      try {
        fn(b, b * block_size, std::min(n, (b + 1) * block_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!failed.exchange(true)) first_error = std::current_exception();
        return;
      }
    }
  };
  pool.reserve(threads);
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace isoradial::util
