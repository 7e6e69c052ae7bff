#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace treesum {

/// Relative comparison tolerance used throughout the covering code.
/// Distances equal to a radius within this tolerance count as covered.
inline constexpr double kRelTol = 1e-12;

inline bool nearly_equal(double a, double b, double rel = kRelTol) {
  double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * std::max(scale, 1e-300);
}

/// Open-ball membership test: d < eps, with fp ties resolved toward covered.
inline bool covers(double d, double eps) { return d < eps || nearly_equal(d, eps); }

// --- small dynamic bitset -------------------------------------------------

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  void set(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }
  std::size_t count_and(const Bitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i)
      c += static_cast<std::size_t>(__builtin_popcountll(w_[i] & o.w_[i]));
    return c;
  }
  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }
  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  Bitset& and_not(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }
  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }
  /// First set bit at or after `from`, or npos.
  std::size_t find_next(std::size_t from = 0) const {
    if (from >= n_) return npos;
    std::size_t wi = from >> 6;
    std::uint64_t w = w_[wi] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (w) return (wi << 6) + static_cast<std::size_t>(__builtin_ctzll(w));
      if (++wi >= w_.size()) return npos;
      w = w_[wi];
    }
  }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// --- deterministic rng ----------------------------------------------------

/// splitmix64; used to derive per-task seeds so results do not depend on
/// how work is split across threads.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + index * 0xd1b54a32d192ed03ULL);
  splitmix64(s);
  return splitmix64(s);
}

// --- numerics ---------------------------------------------------------------

/// Adaptive Simpson quadrature on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, int max_depth = 40);

/// Bisection solve of f(x) = target for continuous monotone f on [lo, hi].
double bisect_monotone(const std::function<double(double)>& f, double target, double lo,
                       double hi, bool decreasing, double rel_tol = 1e-12);

/// Least squares y ~ X b via Householder QR. X is column-major, n rows.
std::vector<double> lstsq(const std::vector<std::vector<double>>& cols,
                          const std::vector<double>& y);

struct WilsonInterval {
  double lo, hi;
};
WilsonInterval wilson_interval(long long successes, long long n, double z = 1.959963984540054);

// --- parallel fan-out ------------------------------------------------------

/// Runs fn(i) for i in [0, n). Work is chunked over a small thread pool;
/// callers must write results to disjoint slots. `threads <= 1` runs inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

int default_thread_count();

}  // namespace treesum
