#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adsurge {

namespace stats {

inline constexpr double kLn2Pi = 1.837877066409345483560659472811;  // log(2*pi)

/// log(n!) - log(sqrt(2*pi*n) * (n/e)^n) for integer n >= 1.
inline double stirlerr(double n) {
  // Small n: exact factorials are representable, so compute directly.
  static const std::array<double, 16> table = [] {
    std::array<double, 16> t{};
    double fact = 1;
    for (int k = 1; k < 16; ++k) {
      fact *= k;
      const double kk = k;
      t[static_cast<std::size_t>(k)] = std::log(fact) - (kk + 0.5) * std::log(kk) + kk - 0.5 * kLn2Pi;
    }
    return t;
  }();
  constexpr double S0 = 1.0 / 12, S1 = 1.0 / 360, S2 = 1.0 / 1260, S3 = 1.0 / 1680, S4 = 1.0 / 1188;
  if (n <= 15) return table[static_cast<std::size_t>(n)];
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

/// Deviance term x*log(x/np) + np - x, without cancellation near x = np.
inline double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

/// log of the binomial pmf C(n,x) p^x q^(n-x), q = 1 - p, via the saddle
/// point expansion.
inline double log_dbinom_raw(double x, double n, double p, double q) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (p == 0) return x == 0 ? 0.0 : neg_inf;
  if (q == 0) return x == n ? 0.0 : neg_inf;
  if (x == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) return q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
  if (x < 0 || x > n) return neg_inf;
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

/// Hypergeometric law: `draws` items taken without replacement from a
/// population holding `successes` marked items; X counts marked draws.
class Hypergeometric {
 public:
  Hypergeometric(std::int64_t population, std::int64_t successes, std::int64_t draws)
      : N_(population), K_(successes), n_(draws) {
    if (N_ < 0 || K_ < 0 || n_ < 0 || K_ > N_ || n_ > N_)
      throw std::invalid_argument("invalid hypergeometric parameters");
    // The law is symmetric in K and n; a fixed order makes transposed
    // tables evaluate bit for bit alike.
    if (K_ > n_) std::swap(K_, n_);
    lo_ = std::max<std::int64_t>(0, n_ - (N_ - K_));
    hi_ = std::min(K_, n_);
    mode_ = static_cast<std::int64_t>(
        std::floor(static_cast<double>(n_ + 1) * static_cast<double>(K_ + 1) / static_cast<double>(N_ + 2)));
    mode_ = std::clamp(mode_, lo_, hi_);
  }

  [[nodiscard]] std::int64_t lo() const { return lo_; }
  [[nodiscard]] std::int64_t hi() const { return hi_; }
  [[nodiscard]] std::int64_t mode() const { return mode_; }

  [[nodiscard]] double log_pmf(std::int64_t x) const {
    if (x < lo_ || x > hi_) return -std::numeric_limits<double>::infinity();
    if (lo_ == hi_) return 0.0;
    const double N = static_cast<double>(N_);
    const double p = static_cast<double>(n_) / N;
    const double q = static_cast<double>(N_ - n_) / N;
    const double p1 = log_dbinom_raw(static_cast<double>(x), static_cast<double>(K_), p, q);
    const double p2 = log_dbinom_raw(static_cast<double>(n_ - x), static_cast<double>(N_ - K_), p, q);
    const double p3 = log_dbinom_raw(static_cast<double>(n_), N, p, q);
    return p1 + p2 - p3;
  }

  /// pmf(x + 1) / pmf(x).
  [[nodiscard]] double ratio_up(std::int64_t x) const {
    return (static_cast<double>(K_ - x) * static_cast<double>(n_ - x)) /
           (static_cast<double>(x + 1) * static_cast<double>(N_ - K_ - n_ + x + 1));
  }

  /// log P[X >= x]. Above the mode the tail is summed from x upward;
  /// otherwise it is one minus the lower tail summed from x - 1 downward.
  /// Either way every term is positive and the leading term dominates, so
  /// the result is monotone in x to the last bit.
  [[nodiscard]] double log_upper_tail(std::int64_t x) const {
    if (x <= lo_) return 0.0;
    if (x > hi_) return -std::numeric_limits<double>::infinity();
    constexpr double eps = 1e-17;
    if (x > mode_) {
      double s = 1, term = 1;
      for (std::int64_t k = x; k < hi_; ++k) {
        term *= ratio_up(k);
        s += term;
        if (term < s * eps) break;
      }
      return std::min(0.0, log_pmf(x) + std::log(s));
    }
    double s = 1, term = 1;
    for (std::int64_t k = x - 1; k > lo_; --k) {
      term /= ratio_up(k - 1);
      s += term;
      if (term < s * eps) break;
    }
    const double lower = std::exp(log_pmf(x - 1) + std::log(s));
    return std::min(0.0, std::log1p(-std::min(lower, 1.0)));
  }

  /// log of the two-sided Fisher p: total probability of outcomes no more
  /// likely than x (relative slack 1e-7 absorbs rounding ties).
  [[nodiscard]] double log_two_sided(std::int64_t x) const {
    if (lo_ == hi_) return 0.0;
    const std::size_t len = static_cast<std::size_t>(hi_ - lo_ + 1);
    std::vector<double> rel(len, 0.0);  // log pmf(k) - log pmf(mode)
    const auto at = [&](std::int64_t k) -> double& { return rel[static_cast<std::size_t>(k - lo_)]; };
    for (std::int64_t k = mode_; k < hi_; ++k) at(k + 1) = at(k) + std::log(ratio_up(k));
    for (std::int64_t k = mode_; k > lo_; --k) at(k - 1) = at(k) - std::log(ratio_up(k - 1));
    const double cutoff = at(x) + std::log1p(1e-7);
    double s = 0;
    for (std::size_t i = 0; i < len; ++i)
      if (rel[i] <= cutoff) s += std::exp(rel[i] - at(x));
    return std::min(0.0, log_pmf(x) + std::log(s));
  }

 private:
  std::int64_t N_, K_, n_;
  std::int64_t lo_ = 0, hi_ = 0, mode_ = 0;
};

}  // namespace stats

/// 2x2 table: a = location in analysis window, b = location in reference
/// window, c = baseline in analysis window, d = baseline in reference window.
struct ContingencyTable {
  std::int64_t a = 0, b = 0, c = 0, d = 0;

  [[nodiscard]] std::int64_t total() const { return a + b + c + d; }
  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

enum class Sidedness { Greater, TwoSided };

inline std::string to_string(Sidedness s) { return s == Sidedness::Greater ? "greater" : "two-sided"; }

inline Sidedness parse_sidedness(const std::string& s) {
  if (s == "greater" || s == "one-sided-greater") return Sidedness::Greater;
  if (s == "two-sided") return Sidedness::TwoSided;
  throw std::invalid_argument("unknown sidedness '" + s + "'");
}

struct FisherResult {
  double p_value = 1;
  double log_p = 0;       // log(p_value); finite even where p_value underflows
  double expected_a = 0;  // (a+b)(a+c)/N
};

/// Fisher's exact test on the location row. Degenerate margins (a+b = 0 or
/// a+c = 0) give p = 1 and expected 0.
inline FisherResult fisher_test(const ContingencyTable& t, Sidedness side = Sidedness::Greater) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
    throw std::invalid_argument("contingency table cells must be non-negative");
  FisherResult r;
  const std::int64_t row = t.a + t.b;
  const std::int64_t col = t.a + t.c;
  if (row == 0 || col == 0) return r;
  const std::int64_t N = t.total();
  r.expected_a = static_cast<double>(row * col) / static_cast<double>(N);
  const stats::Hypergeometric h(N, row, col);
  r.log_p = side == Sidedness::Greater ? h.log_upper_tail(t.a) : h.log_two_sided(t.a);
  r.p_value = std::exp(r.log_p);
  // Where p is representable the log is derived from it, so a p read back
  // from text ranks exactly as the in-memory value did.
  if (r.p_value >= std::numeric_limits<double>::min()) r.log_p = std::log(r.p_value);
  return r;
}

}  // namespace adsurge
