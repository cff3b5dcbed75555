#include "masskit/numerics.hpp"

#include <algorithm>
#include <limits>

namespace masskit {

bool log_rel_close(const LogWeight& a, const LogWeight& b, double tol) {
  if (a.sign == 0 && b.sign == 0) return true;
  const LogWeight diff = a - b;
  if (diff.sign == 0) return true;
  const double scale = std::max(a.log_magnitude(), b.log_magnitude());
  return diff.log_mag <= scale + std::log(tol);
}

LogWeight log_binomial(long long n, long long k) {
  if (n < 0 || k < 0) throw std::domain_error("log_binomial: negative argument");
  if (k > n) throw std::domain_error("log_binomial: k > n");
  const long long kk = std::min(k, n - k);
  // Sum of log((n+1-i)/i); all terms positive for kk <= n/2, so the
  // compensated sum keeps the relative error near machine precision even at
  // n ~ 2000.
  CompensatedSum acc;
  for (long long i = 1; i <= kk; ++i)
    acc.add(std::log((static_cast<double>(n) + 1.0 - static_cast<double>(i)) /
                     static_cast<double>(i)));
  return LogWeight::from_log(acc.result(), +1);
}

double log_trinomial(long long n, long long a, long long b) {
  if (a < 0 || b < 0 || a + b > n) throw std::domain_error("log_trinomial: infeasible");
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(a) + 1.0) -
         std::lgamma(static_cast<double>(b) + 1.0) -
         std::lgamma(static_cast<double>(n - a - b) + 1.0);
}

std::vector<double> binomial_ratio_chain(long long n, long long k, long long i_max) {
  if (k < 0 || i_max < 0 || k + i_max > n)
    throw std::domain_error("binomial_ratio_chain: k + i_max > n");
  std::vector<double> c;
  c.reserve(static_cast<size_t>(i_max));
  double cur = 1.0;
  for (long long i = 0; i < i_max; ++i) {
    cur *= static_cast<double>(k + i + 1) / static_cast<double>(n - k - i);
    c.push_back(cur);
  }
  return c;
}

std::vector<double> log_binomial_ratio_chain(long long n, long long k, long long i_max) {
  if (k < 0 || i_max < 0 || k + i_max > n)
    throw std::domain_error("binomial_ratio_chain: k + i_max > n");
  std::vector<double> c;
  c.reserve(static_cast<size_t>(i_max));
  double cur = 0.0;
  for (long long i = 0; i < i_max; ++i) {
    cur += std::log(static_cast<double>(k + i + 1)) -
           std::log(static_cast<double>(n - k - i));
    c.push_back(cur);
  }
  return c;
}

LogWeight compensated_alternating_sum(const std::vector<LogWeight>& terms) {
  bool flagged = false;
  double scale = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    flagged = flagged || t.underflow;
    if (t.sign != 0) scale = std::max(scale, t.log_mag);
  }
  if (scale == -std::numeric_limits<double>::infinity()) {
    LogWeight z;
    z.underflow = flagged;
    return z;
  }
  CompensatedSum acc;
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    acc.add(t.sign * std::exp(t.log_mag - scale));
  }
  const double s = acc.result();
  LogWeight out;
  out.underflow = flagged;
  if (s == 0.0) return out;
  out.sign = s < 0 ? -1 : 1;
  out.log_mag = scale + std::log(std::fabs(s));
  out.clamp();
  return out;
}

BigInt binomial_exact(long long n, long long k) {
  if (n < 0 || k < 0) throw std::domain_error("binomial_exact: negative argument");
  if (k > n) return 0;
  const long long kk = std::min(k, n - k);
  BigInt r = 1;
  for (long long i = 1; i <= kk; ++i) {
    r *= (n + 1 - i);
    r /= i;  // divides exactly: r is C(n, i) after this step
  }
  return r;
}

BigInt trinomial_exact(long long n, long long a, long long b) {
  if (a < 0 || b < 0 || a + b > n) return 0;
  return binomial_exact(n, a) * binomial_exact(n - a, b);
}

Rational pow_exact(const Rational& base, long long e) {
  if (e < 0) throw std::domain_error("pow_exact: negative exponent");
  Rational r = 1, b = base;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("rational_from_double: non-finite");
  return Rational(v);  // cpp_rational converts floating point exactly
}

double rational_to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace masskit
