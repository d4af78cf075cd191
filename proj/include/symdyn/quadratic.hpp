#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace symdyn {

using Rational = boost::multiprecision::cpp_rational;

// Exact numbers a + b*sqrt(d) with rational a, b and a fixed non-square
// integer d >= 2 (d = 0 marks a plain rational). Mixing two different
// radicands is rejected.
class Quadratic {
 public:
  Quadratic() = default;
  Quadratic(long long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  explicit Quadratic(Rational a, Rational b = 0, long long d = 0) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    normalize();
  }

  const Rational& rational_part() const { return a_; }
  const Rational& radical_part() const { return b_; }
  long long radicand() const { return d_; }
  bool is_rational() const { return b_ == 0; }

  static Quadratic sqrt(long long d) {
    if (d < 0) fail(ErrorCode::InvalidSpec, "square root of a negative number");
    long long r = static_cast<long long>(std::llround(std::sqrt(static_cast<long double>(d))));
    while (r * r > d) --r;
    while ((r + 1) * (r + 1) <= d) ++r;
    if (r * r == d) return Quadratic(r);
    return Quadratic(0, 1, d);
  }

  friend Quadratic operator+(const Quadratic& x, const Quadratic& y) {
    return Quadratic(x.a_ + y.a_, x.b_ + y.b_, common(x, y));
  }
  friend Quadratic operator-(const Quadratic& x, const Quadratic& y) {
    return Quadratic(x.a_ - y.a_, x.b_ - y.b_, common(x, y));
  }
  friend Quadratic operator-(const Quadratic& x) { return Quadratic(-x.a_, -x.b_, x.d_); }
  friend Quadratic operator*(const Quadratic& x, const Quadratic& y) {
    long long d = common(x, y);
    return Quadratic(x.a_ * y.a_ + x.b_ * y.b_ * d, x.a_ * y.b_ + x.b_ * y.a_, d);
  }
  friend Quadratic operator/(const Quadratic& x, const Quadratic& y) {
    long long d = common(x, y);
    Rational norm = y.a_ * y.a_ - y.b_ * y.b_ * d;
    if (norm == 0) fail(ErrorCode::InvalidSpec, "division by zero");
    Quadratic conj(y.a_ / norm, -y.b_ / norm, d);
    return x * conj;
  }
  Quadratic& operator+=(const Quadratic& y) { return *this = *this + y; }
  Quadratic& operator-=(const Quadratic& y) { return *this = *this - y; }
  Quadratic& operator*=(const Quadratic& y) { return *this = *this * y; }

  // Exact sign.
  int sign() const {
    int sa = a_.sign(), sb = b_.sign();
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with b^2 d.
    Rational diff = a_ * a_ - b_ * b_ * d_;
    int cmp = diff.sign();
    return sa > 0 ? cmp : -cmp;
  }

  friend bool operator==(const Quadratic& x, const Quadratic& y) { return (x - y).sign() == 0; }
  friend bool operator!=(const Quadratic& x, const Quadratic& y) { return !(x == y); }
  friend bool operator<(const Quadratic& x, const Quadratic& y) { return (x - y).sign() < 0; }
  friend bool operator>(const Quadratic& x, const Quadratic& y) { return y < x; }
  friend bool operator<=(const Quadratic& x, const Quadratic& y) { return !(y < x); }
  friend bool operator>=(const Quadratic& x, const Quadratic& y) { return !(x < y); }

  long double to_long_double() const {
    long double v = static_cast<long double>(a_);
    if (b_ != 0) v += static_cast<long double>(b_) * std::sqrt(static_cast<long double>(d_));
    return v;
  }
  double to_double() const { return static_cast<double>(to_long_double()); }

  std::string str() const {
    auto rat = [](const Rational& r) {
      std::string s = boost::multiprecision::numerator(r).str();
      if (boost::multiprecision::denominator(r) != 1) s += "/" + boost::multiprecision::denominator(r).str();
      return s;
    };
    if (b_ == 0) return rat(a_);
    std::string out;
    if (a_ != 0) out = rat(a_) + (b_ > 0 ? "+" : "-");
    else if (b_ < 0) out = "-";
    Rational mag = b_ < 0 ? Rational(-b_) : b_;
    if (mag != 1) out += rat(mag) + "*";
    out += "sqrt(" + std::to_string(d_) + ")";
    return out;
  }

  // Accepts sums and differences of terms, each a rational literal
  // (integer, decimal, p/q) optionally times sqrt(d), or a bare sqrt(d);
  // "golden" is (1+sqrt(5))/2.
  static Quadratic parse(std::string_view text) {
    std::string s;
    for (char ch : text)
      if (ch != ' ') s += ch;
    if (s.empty()) fail(ErrorCode::InvalidSpec, "empty number");
    if (s == "golden") return Quadratic(Rational(1, 2), Rational(1, 2), 5);
    Quadratic total(0);
    std::size_t i = 0;
    while (i < s.size()) {
      int sign = 1;
      if (s[i] == '+' || s[i] == '-') {
        sign = s[i] == '-' ? -1 : 1;
        ++i;
      }
      std::size_t j = i;
      int depth = 0;
      while (j < s.size()) {
        if (s[j] == '(') ++depth;
        if (s[j] == ')') --depth;
        if (depth == 0 && j > i && (s[j] == '+' || s[j] == '-') && s[j - 1] != 'e' && s[j - 1] != 'E') break;
        ++j;
      }
      Quadratic term = parse_term(s.substr(i, j - i), text);
      total = sign > 0 ? total + term : total - term;
      i = j;
    }
    return total;
  }

 private:
  static Rational parse_rational(const std::string& s, std::string_view full) {
    auto bad = [&] { fail(ErrorCode::InvalidSpec, "bad number '" + std::string(full) + "'"); };
    if (s.empty()) bad();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Rational num = parse_rational(s.substr(0, slash), full);
      Rational den = parse_rational(s.substr(slash + 1), full);
      if (den == 0) bad();
      return num / den;
    }
    boost::multiprecision::cpp_int whole = 0, frac = 0, scale = 1;
    bool seen_dot = false, digits = false;
    for (char ch : s) {
      if (ch == '.') {
        if (seen_dot) bad();
        seen_dot = true;
        continue;
      }
      if (ch < '0' || ch > '9') bad();
      digits = true;
      if (seen_dot) {
        frac = frac * 10 + (ch - '0');
        scale *= 10;
      } else {
        whole = whole * 10 + (ch - '0');
      }
    }
    if (!digits) bad();
    return Rational(whole) + Rational(frac, scale);
  }

  static Quadratic parse_term(const std::string& t, std::string_view full) {
    auto pos = t.find("sqrt(");
    if (pos == std::string::npos) return Quadratic(parse_rational(t, full));
    if (t.back() != ')') fail(ErrorCode::InvalidSpec, "bad number '" + std::string(full) + "'");
    std::string inner = t.substr(pos + 5, t.size() - pos - 6);
    Rational rad = parse_rational(inner, full);
    if (boost::multiprecision::denominator(rad) != 1)
      fail(ErrorCode::InvalidSpec, "sqrt argument must be an integer");
    Quadratic root = sqrt(static_cast<long long>(boost::multiprecision::numerator(rad)));
    if (pos == 0) return root;
    std::string coeff = t.substr(0, pos);
    if (coeff.back() != '*') fail(ErrorCode::InvalidSpec, "bad number '" + std::string(full) + "'");
    coeff.pop_back();
    return Quadratic(parse_rational(coeff, full)) * root;
  }

  static long long common(const Quadratic& x, const Quadratic& y) {
    if (x.b_ == 0) return y.d_;
    if (y.b_ == 0) return x.d_;
    if (x.d_ != y.d_) fail(ErrorCode::InvalidSpec, "numbers from different quadratic fields");
    return x.d_;
  }

  void normalize() {
    if (b_ == 0) d_ = 0;
  }

  Rational a_ = 0;
  Rational b_ = 0;
  long long d_ = 0;
};

}  // namespace symdyn
