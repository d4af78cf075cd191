#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace symdyn {

// A set S of non-negative integers given by a finite description.
//   all         every n >= 0
//   powers:k    {k, k^2, k^3, ...}
//   arith:a:d   {a, a+d, a+2d, ...}
//   list:a,b,c  finite
class GapSet {
 public:
  enum class Kind { FiniteList, AllNonneg, PowersOf, Arithmetic };

  static GapSet all() { return GapSet(Kind::AllNonneg, 0, 1, {}); }

  static GapSet powers(std::uint64_t k) {
    if (k < 2) fail(ErrorCode::InvalidSpec, "powers base must be >= 2");
    return GapSet(Kind::PowersOf, k, 0, {});
  }

  static GapSet arithmetic(std::uint64_t a, std::uint64_t d) {
    if (d < 1) fail(ErrorCode::InvalidSpec, "arithmetic step must be >= 1");
    return GapSet(Kind::Arithmetic, a, d, {});
  }

  static GapSet list(std::vector<std::uint64_t> members) {
    if (members.empty()) fail(ErrorCode::InvalidSpec, "gap list must be nonempty");
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    return GapSet(Kind::FiniteList, 0, 0, std::move(members));
  }

  static GapSet parse(std::string_view text) {
    auto number = [&](std::string_view s) {
      std::uint64_t v = 0;
      if (s.empty()) fail(ErrorCode::InvalidSpec, "bad gap set '" + std::string(text) + "'");
      for (char ch : s) {
        if (ch < '0' || ch > '9') fail(ErrorCode::InvalidSpec, "bad gap set '" + std::string(text) + "'");
        v = v * 10 + static_cast<std::uint64_t>(ch - '0');
      }
      return v;
    };
    auto split = [](std::string_view s, char sep) {
      std::vector<std::string_view> parts;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == sep) {
          parts.push_back(s.substr(start, i - start));
          start = i + 1;
        }
      return parts;
    };
    if (text == "all") return all();
    if (text.rfind("powers:", 0) == 0) return powers(number(text.substr(7)));
    if (text.rfind("arith:", 0) == 0) {
      auto parts = split(text.substr(6), ':');
      if (parts.size() != 2) fail(ErrorCode::InvalidSpec, "arith needs a:d");
      return arithmetic(number(parts[0]), number(parts[1]));
    }
    std::string_view body = text.rfind("list:", 0) == 0 ? text.substr(5) : text;
    std::vector<std::uint64_t> members;
    for (auto p : split(body, ',')) members.push_back(number(p));
    return list(std::move(members));
  }

  Kind kind() const { return kind_; }
  bool infinite() const { return kind_ != Kind::FiniteList; }

  bool contains(std::uint64_t n) const {
    switch (kind_) {
      case Kind::AllNonneg: return true;
      case Kind::Arithmetic: return n >= a_ && (n - a_) % d_ == 0;
      case Kind::PowersOf: {
        if (n < a_) return false;
        while (n % a_ == 0) {
          n /= a_;
          if (n == 1) return true;
        }
        return false;
      }
      case Kind::FiniteList: return std::binary_search(list_.begin(), list_.end(), n);
    }
    return false;
  }

  // Smallest member >= r, if any.
  std::optional<std::uint64_t> next_member(std::uint64_t r) const {
    switch (kind_) {
      case Kind::AllNonneg: return r;
      case Kind::Arithmetic:
        if (r <= a_) return a_;
        return a_ + ((r - a_ + d_ - 1) / d_) * d_;
      case Kind::PowersOf: {
        std::uint64_t p = a_;
        while (p < r) {
          if (p > std::numeric_limits<std::uint64_t>::max() / a_) return std::nullopt;
          p *= a_;
        }
        return p;
      }
      case Kind::FiniteList: {
        auto it = std::lower_bound(list_.begin(), list_.end(), r);
        if (it == list_.end()) return std::nullopt;
        return *it;
      }
    }
    return std::nullopt;
  }

  bool has_member_at_least(std::uint64_t r) const { return next_member(r).has_value(); }

  std::vector<std::uint64_t> members_up_to(std::uint64_t bound) const {
    std::vector<std::uint64_t> out;
    std::uint64_t r = 0;
    while (auto m = next_member(r)) {
      if (*m > bound) break;
      out.push_back(*m);
      r = *m + 1;
    }
    return out;
  }

  std::optional<std::uint64_t> max_member() const {
    if (infinite()) return std::nullopt;
    return list_.back();
  }

  std::string spec() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::AllNonneg: os << "all"; break;
      case Kind::PowersOf: os << "powers:" << a_; break;
      case Kind::Arithmetic: os << "arith:" << a_ << ':' << d_; break;
      case Kind::FiniteList:
        os << "list:";
        for (std::size_t i = 0; i < list_.size(); ++i) os << (i ? "," : "") << list_[i];
        break;
    }
    return os.str();
  }

 private:
  GapSet(Kind kind, std::uint64_t a, std::uint64_t d, std::vector<std::uint64_t> list)
      : kind_(kind), a_(a), d_(d), list_(std::move(list)) {}

  Kind kind_;
  std::uint64_t a_;
  std::uint64_t d_;
  std::vector<std::uint64_t> list_;
};

}  // namespace symdyn
