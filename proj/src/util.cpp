#include "treesum/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace treesum {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_depth) {
  if (!(a <= b)) throw std::invalid_argument("integrate: a > b");
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  double tol = std::max(std::abs(whole), 1.0) * rel_tol;
  return adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double bisect_monotone(const std::function<double(double)>& f, double target, double lo, double hi,
                       bool decreasing, double rel_tol) {
  if (!(lo < hi)) throw std::invalid_argument("bisect_monotone: empty bracket");
  auto above = [&](double x) {
    double v = f(x);
    return decreasing ? v >= target : v <= target;
  };
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (above(mid))
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> lstsq(const std::vector<std::vector<double>>& cols,
                          const std::vector<double>& y) {
  const std::size_t n = y.size();
  const std::size_t p = cols.size();
  if (p == 0 || n < p) throw std::invalid_argument("lstsq: underdetermined system");
  for (const auto& c : cols)
    if (c.size() != n) throw std::invalid_argument("lstsq: ragged columns");

  // Householder QR on the n x p matrix, applied to rhs in lock-step.
  std::vector<std::vector<double>> a = cols;
  std::vector<double> b = y;
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0;
    for (std::size_t i = k; i < n; ++i) norm += a[k][i] * a[k][i];
    norm = std::sqrt(norm);
    if (norm == 0) throw std::runtime_error("lstsq: rank deficient design matrix");
    double alpha = a[k][k] > 0 ? -norm : norm;
    std::vector<double> v(n, 0.0);
    v[k] = a[k][k] - alpha;
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a[k][i];
    double vtv = 0;
    for (std::size_t i = k; i < n; ++i) vtv += v[i] * v[i];
    if (vtv == 0) continue;
    for (std::size_t j = k; j < p; ++j) {
      double dot = 0;
      for (std::size_t i = k; i < n; ++i) dot += v[i] * a[j][i];
      double s = 2.0 * dot / vtv;
      for (std::size_t i = k; i < n; ++i) a[j][i] -= s * v[i];
    }
    double dotb = 0;
    for (std::size_t i = k; i < n; ++i) dotb += v[i] * b[i];
    double sb = 2.0 * dotb / vtv;
    for (std::size_t i = k; i < n; ++i) b[i] -= sb * v[i];
  }
  // Back substitution on the p x p triangle.
  std::vector<double> x(p, 0.0);
  for (std::size_t k = p; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= a[j][k] * x[j];
    x[k] = s / a[k][k];
  }
  return x;
}

WilsonInterval wilson_interval(long long successes, long long n, double z) {
  if (n <= 0) throw std::invalid_argument("wilson_interval: n <= 0");
  double ph = static_cast<double>(successes) / static_cast<double>(n);
  double z2 = z * z;
  double den = 1.0 + z2 / n;
  double center = (ph + z2 / (2.0 * n)) / den;
  double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / den;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

int default_thread_count() {
  if (const char* env = std::getenv("TREESUM_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hw ? hw : 1, 8));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads) {
  if (threads <= 0) threads = default_thread_count();
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::exception_ptr error;
  std::mutex err_mutex;
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::size_t i = t; i < n; i += nthreads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace treesum
