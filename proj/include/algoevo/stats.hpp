#ifndef ALGOEVO_STATS_HPP
#define ALGOEVO_STATS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace algoevo {

inline double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

// Standard error of the mean: sample standard deviation (n-1) over sqrt(n).
inline double se_of(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  if (n == 1) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return sd / std::sqrt(static_cast<double>(n));
}

// The separation heuristic used throughout the experiment write-ups: two
// means are treated as different when their +-2 SE intervals do not overlap.
inline bool intervals_disjoint_2se(double mean_a, double se_a, double mean_b,
                                   double se_b) {
  return std::abs(mean_a - mean_b) > 2.0 * (se_a + se_b);
}

namespace detail {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// Two-sided p-value of a t statistic with nu degrees of freedom:
// P(|T| >= |t|) = I_{nu/(nu+t^2)}(nu/2, 1/2).
inline double t_two_sided_p(double t, double nu) {
  if (nu <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return detail::incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

// Average ranks (1-based), ties share the mean rank.
inline std::vector<double> ranks_of(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, t approximation
  std::size_t n = 0;
};

inline SpearmanResult spearman(const std::vector<double>& x,
                               const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("need at least 3 points");
  const auto rx = ranks_of(x), ry = ranks_of(y);
  const double mx = mean_of(rx), my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  SpearmanResult res;
  res.n = n;
  if (sxx == 0.0 || syy == 0.0) {
    res.rho = 0.0;
    res.p_value = 1.0;
    return res;
  }
  res.rho = sxy / std::sqrt(sxx * syy);
  const double nu = static_cast<double>(n - 2);
  const double r2 = std::min(res.rho * res.rho, 1.0 - 1e-15);
  const double t = res.rho * std::sqrt(nu / (1.0 - r2));
  res.p_value = t_two_sided_p(t, nu);
  return res;
}

// Least-squares polynomial fit (default cubic). Returns coefficients
// c0..c_degree; advisory output only.
inline std::vector<double> polyfit(const std::vector<double>& x,
                                   const std::vector<double>& y,
                                   int degree = 3) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  const int m = degree + 1;
  if (static_cast<int>(x.size()) < m)
    throw std::invalid_argument("not enough points for the requested degree");
  // Normal equations A c = b with A[i][j] = sum x^(i+j).
  std::vector<double> powers(2 * degree + 1, 0.0);
  std::vector<double> b(m, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    double p = 1.0;
    for (int i = 0; i <= 2 * degree; ++i) {
      powers[i] += p;
      if (i <= degree) b[i] += p * y[k];
      p *= x[k];
    }
  }
  std::vector<std::vector<double>> a(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[i][j] = powers[i + j];
  // Gaussian elimination with partial pivoting.
  std::vector<double> c = b;
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(c[col], c[pivot]);
    if (a[col][col] == 0.0)
      throw std::runtime_error("singular system in polyfit");
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int k = col; k < m; ++k) a[r][k] -= f * a[col][k];
      c[r] -= f * c[col];
    }
  }
  for (int i = 0; i < m; ++i) c[i] /= a[i][i];
  return c;
}

}  // namespace algoevo

#endif  // ALGOEVO_STATS_HPP
