#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace marginflow {

// Self-contained 64-bit generator (splitmix64). We avoid <random>
// distributions so that streams are bit-reproducible across standard
// libraries and can be re-seeded per sample index (counter mode).
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; one value per call, no cached spare
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  int sign() { return (next_u64() >> 63) ? 1 : -1; }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  // uniform point on the unit sphere of R^n
  Eigen::VectorXd sphere(int n) {
    Eigen::VectorXd v = gaussian_vector(n);
    double nrm = v.norm();
    while (nrm < 1e-12) {
      v = gaussian_vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }
};

// Derives an independent substream key from (seed, stream, counter).
// Two mixing rounds decorrelate nearby counters.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0) {
  Rng r(seed ^ (0x2545f4914f6cdd1dULL * (stream + 1)));
  r.state += r.next_u64() + 0x632be59bd9b4e019ULL * (counter + 1);
  r.next_u64();
  return r.state;
}

// Nested quasi-uniform direction sequence on the unit sphere of R^p.
// Kronecker (R_d) lattice in the unit cube mapped through Box-Muller and
// normalized: the first M points of the sequence for a given seed are a
// prefix of the first M' >= M points, so direction grids are nested.
class SphereSequence {
public:
  SphereSequence(int p, std::uint64_t seed) : p_(p), alpha_(cube_dim()), offset_(cube_dim()) {
    double phi = 2.0;
    // unique positive root of x^{s+1} = x + 1
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (cube_dim() + 1));
    for (int i = 0; i < cube_dim(); ++i) alpha_[i] = std::fmod(std::pow(1.0 / phi, i + 1), 1.0);
    Rng r(substream(seed, 0xd15c0));
    for (int i = 0; i < cube_dim(); ++i) offset_[i] = r.uniform();
  }

  Eigen::VectorXd point(std::int64_t k) const {
    Eigen::VectorXd g(cube_dim());
    for (int i = 0; i < cube_dim(); i += 2) {
      double u1 = std::fmod(offset_[i] + (k + 1) * alpha_[i], 1.0);
      double u2 = std::fmod(offset_[i + 1] + (k + 1) * alpha_[i + 1], 1.0);
      u1 = std::max(u1, 1e-16);
      double rad = std::sqrt(-2.0 * std::log(u1));
      double ang = 6.283185307179586476925286766559 * u2;
      g[i] = rad * std::cos(ang);
      g[i + 1] = rad * std::sin(ang);
    }
    Eigen::VectorXd v = g.head(p_);
    double nrm = v.norm();
    if (nrm < 1e-12) {
      v.setZero();
      v[0] = 1.0;
      return v;
    }
    return v / nrm;
  }

private:
  int cube_dim() const { return p_ + (p_ % 2); }

  int p_;
  std::vector<double> alpha_;
  std::vector<double> offset_;
};

}  // namespace marginflow
