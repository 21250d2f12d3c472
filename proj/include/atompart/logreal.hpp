#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "atompart/errors.hpp"

namespace atompart {

// Nonnegative real stored as its natural log; -inf encodes an exact zero.
// Every partition probability in the library is a product of many factors
// in (0,1], so this is the working representation throughout.
class LogReal {
 public:
  constexpr LogReal() : lg_(-std::numeric_limits<double>::infinity()) {}

  static constexpr LogReal zero() { return LogReal(); }
  static constexpr LogReal one() { return from_log(0.0); }
  static constexpr LogReal from_log(double lg) {
    LogReal r;
    r.lg_ = lg;
    return r;
  }
  static LogReal from_value(double v) {
    if (v < 0.0 || std::isnan(v)) throw InvalidArgument("LogReal: negative or NaN value");
    return from_log(std::log(v));
  }

  double log() const { return lg_; }
  double value() const { return std::exp(lg_); }
  bool is_zero() const { return std::isinf(lg_) && lg_ < 0; }

  LogReal& operator*=(LogReal o) {
    if (is_zero() || o.is_zero())
      lg_ = -std::numeric_limits<double>::infinity();
    else
      lg_ += o.lg_;
    return *this;
  }
  LogReal& operator/=(LogReal o) {
    if (o.is_zero()) throw InvalidState("LogReal: division by zero");
    if (!is_zero()) lg_ -= o.lg_;
    return *this;
  }
  LogReal& operator+=(LogReal o) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      lg_ = o.lg_;
      return *this;
    }
    double hi = lg_, lo = o.lg_;
    if (hi < lo) std::swap(hi, lo);
    lg_ = hi + std::log1p(std::exp(lo - hi));
    return *this;
  }

  friend LogReal operator*(LogReal a, LogReal b) { return a *= b; }
  friend LogReal operator/(LogReal a, LogReal b) { return a /= b; }
  friend LogReal operator+(LogReal a, LogReal b) { return a += b; }

  LogReal pow(double e) const {
    if (is_zero()) return e == 0.0 ? one() : zero();
    return from_log(lg_ * e);
  }

  friend bool operator==(LogReal a, LogReal b) { return a.lg_ == b.lg_; }
  friend bool operator<(LogReal a, LogReal b) { return a.lg_ < b.lg_; }
  friend bool operator<=(LogReal a, LogReal b) { return a.lg_ <= b.lg_; }
  friend bool operator>(LogReal a, LogReal b) { return a.lg_ > b.lg_; }
  friend bool operator>=(LogReal a, LogReal b) { return a.lg_ >= b.lg_; }

 private:
  double lg_;
};

inline double log_sum_exp(std::span<const double> logs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : logs)
    if (x > hi) hi = x;
  if (std::isinf(hi)) return hi;
  double acc = 0.0;
  for (double x : logs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// log of the rising factorial (x)_n = x(x+1)...(x+n-1), x > 0.
inline double log_rising(double x, long n) {
  if (n < 0) throw InvalidArgument("log_rising: negative length");
  if (n == 0) return 0.0;
  if (x <= 0.0) throw InvalidArgument("log_rising: requires x > 0");
  return std::lgamma(x + static_cast<double>(n)) - std::lgamma(x);
}

inline double log_factorial(long n) {
  if (n < 0) throw InvalidArgument("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log_binomial(long n, long k) {
  if (k < 0 || k > n) throw InvalidArgument("log_binomial: k out of range");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace atompart
