#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gpb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Bad user input: malformed config, parameter outside a documented range.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown that survived all fallbacks (e.g. factorization failure
// after the jitter ladder).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_config(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

// splitmix64 finalizer; used to derive independent per-replicate streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Documented stream-splitting rule: (master seed, member, replicate) -> stream seed.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t member,
                                 std::uint64_t replicate) {
  std::uint64_t s = mix64(master ^ 0xD1B54A32D192ED03ULL);
  s = mix64(s + 0x9E3779B97F4A7C15ULL * (member + 1));
  s = mix64(s + 0x8CB92BA72F3D8DD7ULL * (replicate + 1));
  return s;
}

// Deterministic random stream. Uses an explicit Box-Muller transform instead of
// std::normal_distribution so that draws are identical across standard-library
// implementations (CSV outputs must be byte-reproducible).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::size_t uniform_index(std::size_t n) {
    // Rejection sampling for an unbiased index; n is tiny versus 2^64.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = gen_();
    while (v >= limit) v = gen_();
    return static_cast<std::size_t>(v % n);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Uniform inclusive grid on [0,1]^d, per_axis points per axis (>= 2), row per
// point. Axis 0 varies slowest; the ordering is part of the reproducibility
// contract.
Mat uniform_grid(int d, int per_axis);

// Linear index of the grid row closest to x (same ordering as uniform_grid).
int nearest_grid_index(const Mat& grid, const Vec& x);

inline bool finite(const Vec& x) { return x.allFinite(); }

}  // namespace gpb
