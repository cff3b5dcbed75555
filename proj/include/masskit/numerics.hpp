#pragma once

// Numeric substrate: sign-aware log-space weights, exact rational arithmetic
// for small oracle instances, and compensated summation for alternating
// series with heavy cancellation.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace masskit {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Signed magnitude in natural-log space. Values below exp(kLogFloor) are
/// clamped to an exact zero and the underflow flag is set so the clamp stays
/// auditable downstream.
struct LogWeight {
  static constexpr double kLogFloor = -5000.0;

  double log_mag = 0.0;  // ln |value|; meaningless when sign == 0
  int sign = 0;          // -1, 0, +1
  bool underflow = false;

  static LogWeight zero() { return LogWeight{}; }

  static LogWeight from_log(double lm, int s) {
    LogWeight w;
    if (s == 0 || lm == -std::numeric_limits<double>::infinity()) return w;
    w.log_mag = lm;
    w.sign = s < 0 ? -1 : 1;
    w.clamp();
    return w;
  }

  static LogWeight from_double(double v) {
    if (v == 0.0) return LogWeight{};
    return from_log(std::log(std::fabs(v)), v < 0 ? -1 : 1);
  }

  bool is_zero() const { return sign == 0; }

  double value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_mag);
  }

  /// ln of the magnitude, or -inf for zero.
  double log_magnitude() const {
    return sign == 0 ? -std::numeric_limits<double>::infinity() : log_mag;
  }

  void clamp() {
    if (sign != 0 && log_mag < kLogFloor) {
      sign = 0;
      underflow = true;
    }
  }

  LogWeight operator-() const {
    LogWeight w = *this;
    w.sign = -w.sign;
    return w;
  }

  LogWeight operator*(const LogWeight& o) const {
    LogWeight w;
    w.underflow = underflow || o.underflow;
    if (sign == 0 || o.sign == 0) return w;
    w.sign = sign * o.sign;
    w.log_mag = log_mag + o.log_mag;
    w.clamp();
    return w;
  }

  LogWeight operator/(const LogWeight& o) const {
    if (o.sign == 0) throw std::domain_error("LogWeight: division by zero");
    LogWeight w;
    w.underflow = underflow || o.underflow;
    if (sign == 0) return w;
    w.sign = sign * o.sign;
    w.log_mag = log_mag - o.log_mag;
    w.clamp();
    return w;
  }

  LogWeight operator+(const LogWeight& o) const {
    LogWeight w;
    w.underflow = underflow || o.underflow;
    if (sign == 0) {
      w.sign = o.sign;
      w.log_mag = o.log_mag;
      return w;
    }
    if (o.sign == 0) {
      w.sign = sign;
      w.log_mag = log_mag;
      return w;
    }
    const double hi = std::max(log_mag, o.log_mag);
    const double lo = std::min(log_mag, o.log_mag);
    if (sign == o.sign) {
      w.sign = sign;
      w.log_mag = hi + std::log1p(std::exp(lo - hi));
    } else if (log_mag == o.log_mag) {
      return w;  // exact cancellation
    } else {
      w.sign = log_mag > o.log_mag ? sign : o.sign;
      const double d = std::exp(lo - hi);
      w.log_mag = hi + std::log1p(-d);
      if (d == 1.0) {  // cancellation beyond double resolution
        w.sign = 0;
        w.underflow = true;
        return w;
      }
    }
    w.clamp();
    return w;
  }

  LogWeight operator-(const LogWeight& o) const { return *this + (-o); }
};

/// |a - b| <= tol * max(|a|, |b|), evaluated in log space so it stays
/// meaningful far below double range.
bool log_rel_close(const LogWeight& a, const LogWeight& b, double tol);

/// ln C(n, k); sign is always +1. Throws std::domain_error for k > n.
LogWeight log_binomial(long long n, long long k);

/// ln of the trinomial coefficient n! / (a! b! (n-a-b)!).
double log_trinomial(long long n, long long a, long long b);

/// c_i = C(n,k) / C(n,k+i) for i = 1..i_max via the overflow-free recurrence
/// c_{i+1} = c_i (k+i+1)/(n-k-i). Requires k + i_max <= n.
std::vector<double> binomial_ratio_chain(long long n, long long k, long long i_max);

/// Same chain in log space, for use where the ratios overflow double.
std::vector<double> log_binomial_ratio_chain(long long n, long long k, long long i_max);

/// Sum of signed log-space terms with Neumaier-compensated accumulation in a
/// max-scaled frame. Exact cancellation yields sign 0.
LogWeight compensated_alternating_sum(const std::vector<LogWeight>& terms);

/// Neumaier (improved Kahan) accumulator for plain doubles.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Exact counterparts used by the enumeration oracle and the exact moment
// engine. Denominators stay positive and fractions in lowest terms by
// cpp_rational's canonical form.
BigInt binomial_exact(long long n, long long k);
BigInt trinomial_exact(long long n, long long a, long long b);
Rational pow_exact(const Rational& base, long long e);

/// Exact binary-fraction rational from a double (doubles are rationals).
Rational rational_from_double(double v);

double rational_to_double(const Rational& r);

}  // namespace masskit
