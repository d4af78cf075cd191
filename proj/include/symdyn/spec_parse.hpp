#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gap_set.hpp"
#include "hofbauer.hpp"
#include "shifts.hpp"

namespace symdyn {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidSpec, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ':') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline int parse_int(const std::string& s, const std::string& spec) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidSpec, "bad integer '" + s + "' in '" + spec + "'");
  }
}

// "key=value" -> value, or nullopt when the key differs.
inline std::optional<std::string> keyed(const std::string& part, const std::string& key) {
  if (part.rfind(key + "=", 0) == 0) return part.substr(key.size() + 1);
  return std::nullopt;
}

inline std::string join_from(const std::vector<std::string>& parts, std::size_t i) {
  std::string out;
  for (std::size_t j = i; j < parts.size(); ++j) out += (j > i ? ":" : "") + parts[j];
  return out;
}

}  // namespace detail

// "alphabeta:alpha=0:beta=2", "negbeta:beta=1.8", "pwm:file=<path>".
// Numbers are exact: integers, decimals, p/q, sqrt(d) terms, "golden".
inline PiecewiseMonotoneMap parse_map(const std::string& spec) {
  auto parts = detail::split_colon(spec);
  const std::string& kind = parts[0];
  auto value = [&](const std::string& key) -> std::string {
    for (std::size_t i = 1; i < parts.size(); ++i)
      if (auto v = detail::keyed(parts[i], key)) return *v;
    fail(ErrorCode::InvalidSpec, "map spec '" + spec + "' lacks " + key + "=");
  };
  if (kind == "alphabeta") return PiecewiseMonotoneMap::alpha_beta(Quadratic::parse(value("alpha")), Quadratic::parse(value("beta")));
  if (kind == "negbeta") return PiecewiseMonotoneMap::neg_beta(Quadratic::parse(value("beta")));
  if (kind == "pwm") {
    std::string path = value("file");
    return PiecewiseMonotoneMap::from_text(read_file(path), "pwm(" + path + ")");
  }
  fail(ErrorCode::InvalidSpec, "unknown map kind '" + kind + "'");
}

struct ShiftHandle {
  std::shared_ptr<const LanguageOracle> lang;
  std::string spec;
  std::optional<GapSet> gaps;  // set for sgap and fatsgap
  int symbols = 2;
  std::shared_ptr<const MarkovDiagram> diagram;  // set for hofbauer
};

// Shift spec strings:
//   full:N
//   sft:N:forbid=11,212
//   sgap:<gaps>             gaps: all | powers:k | arith:a:d | list:1,2 | 1,2
//   fatsgap:N=3:<gaps>
//   coded:file=<path>       generator words, one per line
//   kucherenko[:<gaps>]     generators 1^i 2^i for i in the index set
//   hofbauer:depth=D:<map spec>
inline ShiftHandle parse_shift(const std::string& spec, std::optional<std::size_t> horizon = std::nullopt) {
  auto parts = detail::split_colon(spec);
  const std::string& kind = parts[0];
  ShiftHandle h;
  h.spec = spec;
  if (kind == "full") {
    if (parts.size() != 2) fail(ErrorCode::InvalidSpec, "use full:N");
    h.symbols = detail::parse_int(parts[1], spec);
    h.lang = build_full(h.symbols, horizon);
  } else if (kind == "sft") {
    if (parts.size() != 3) fail(ErrorCode::InvalidSpec, "use sft:N:forbid=w1,w2");
    h.symbols = detail::parse_int(parts[1], spec);
    auto list = detail::keyed(parts[2], "forbid");
    if (!list) fail(ErrorCode::InvalidSpec, "use sft:N:forbid=w1,w2");
    SftSpec s{Alphabet(h.symbols), {}};
    std::stringstream ss(*list);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) s.forbidden.push_back(parse_word(tok));
    h.lang = build_sft(s, horizon);
  } else if (kind == "sgap") {
    h.gaps = GapSet::parse(detail::join_from(parts, 1));
    h.lang = build_sgap(*h.gaps, horizon);
  } else if (kind == "fatsgap") {
    if (parts.size() < 3) fail(ErrorCode::InvalidSpec, "use fatsgap:N=3:<gaps>");
    auto n = detail::keyed(parts[1], "N");
    if (!n) fail(ErrorCode::InvalidSpec, "use fatsgap:N=3:<gaps>");
    h.symbols = detail::parse_int(*n, spec);
    h.gaps = GapSet::parse(detail::join_from(parts, 2));
    h.lang = build_fat_sgap(*h.gaps, h.symbols, horizon);
  } else if (kind == "coded") {
    auto path = parts.size() == 2 ? detail::keyed(parts[1], "file") : std::nullopt;
    if (!path) fail(ErrorCode::InvalidSpec, "use coded:file=<path>");
    std::istringstream in(read_file(*path));
    std::vector<Word> gens{Word{}};
    std::string line;
    Symbol top = 1;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      Word w = parse_word(line);
      if (w.empty()) continue;
      for (Symbol a : w) top = std::max(top, a);
      gens.push_back(std::move(w));
    }
    h.symbols = std::max<int>(2, top);
    h.lang = build_coded(Alphabet(h.symbols), generators_from_list(gens, "coded(" + *path + ")"), horizon);
  } else if (kind == "kucherenko") {
    GapSet idx = parts.size() > 1 ? GapSet::parse(detail::join_from(parts, 1)) : GapSet::arithmetic(1, 1);
    h.lang = build_kucherenko(idx, horizon);
  } else if (kind == "hofbauer") {
    if (parts.size() < 3) fail(ErrorCode::InvalidSpec, "use hofbauer:depth=D:<map spec>");
    auto d = detail::keyed(parts[1], "depth");
    if (!d) fail(ErrorCode::InvalidSpec, "use hofbauer:depth=D:<map spec>");
    int depth = detail::parse_int(*d, spec);
    if (depth < 0) fail(ErrorCode::InvalidSpec, "depth must be >= 0");
    auto map = std::make_shared<const PiecewiseMonotoneMap>(parse_map(detail::join_from(parts, 2)));
    h.diagram = std::make_shared<const MarkovDiagram>(build_diagram(map, static_cast<std::size_t>(depth)));
    h.symbols = static_cast<int>(map->branch_count());
    h.lang = std::make_shared<DiagramLanguage>(h.diagram);
  } else {
    fail(ErrorCode::InvalidSpec, "unknown shift kind '" + kind + "'");
  }
  return h;
}

}  // namespace symdyn
