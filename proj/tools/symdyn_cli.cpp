#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symdyn/symdyn.hpp"

using namespace symdyn;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

struct Options {
  std::string shift = "full:2";
  std::string map = "alphabeta:alpha=0:beta=2";
  std::string method = "growth";
  std::string kind = "natural";
  std::string side = "both";
  std::string pot;
  std::string words_file;
  std::string betas = "1:2:4096";
  std::string gaps = "powers:2";
  std::string which_case = "auto";
  std::string format = "json";
  std::size_t n = 16;
  std::size_t horizon = 0;
  std::size_t limit = 1000;
  std::size_t states = 200000;
  std::size_t m = 1;
  std::size_t tmax = 6;
  std::size_t len = 8;
  std::size_t ext = 6;
  std::size_t depth = 20;
  std::size_t cut = 1;
  std::size_t t = 0;
  std::size_t ell = 2;
  std::size_t k = 5;
  int big_n = 3;
  double tol = 1e-10;
  double beta = 1.0;
  std::uint64_t seed = 1;
  std::string report;
  bool json_flag = false;
  bool export_diagram = false;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Canonical "command --opt=value ..." with defaults filled in, in the order
// the options were declared.
std::string canonical_config(const CLI::App& sub) {
  std::string out = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    out += " " + opt->get_name() + "=" + value;
  }
  return out;
}

class Emitter {
 public:
  Emitter(std::string format, std::string command, std::string config, std::uint64_t seed)
      : format_(std::move(format)), command_(std::move(command)), config_(std::move(config)), seed_(seed) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config_)));
    hash_ = buf;
  }

  void emit(Json body) {
    Json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["command"] = command_;
    rec["version"] = kVersion;
    rec["config_hash"] = hash_;
    rec["seed"] = seed_;
    for (auto& [key, v] : body.items()) rec[key] = v;
    if (format_ == "json") {
      std::cout << rec.dump() << '\n';
    } else if (format_ == "csv") {
      std::string head, row;
      for (auto& [key, v] : rec.items()) {
        if (v.is_structured()) continue;
        head += (head.empty() ? "" : ",") + key;
        row += (row.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      }
      if (!csv_header_done_) std::cout << head << '\n';
      csv_header_done_ = true;
      std::cout << row << '\n';
    } else {
      for (auto& [key, v] : rec.items()) std::cout << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      std::cout << '\n';
    }
  }

 private:
  std::string format_, command_, config_, hash_;
  std::uint64_t seed_;
  bool csv_header_done_ = false;
};

std::string big(const BigInt& x) { return x.str(); }

Json estimate_json(const EntropyEstimate& e) {
  Json j;
  j["method"] = to_string(e.method);
  j["value"] = e.value;
  j["bracket_lo"] = e.bracket_lo;
  j["bracket_hi"] = e.bracket_hi;
  j["per_n"] = e.per_n;
  if (e.aitken) j["aitken_advisory"] = *e.aitken;
  if (e.root_x) j["root_x"] = *e.root_x;
  if (!e.flags.empty()) j["flags"] = e.flags;
  return j;
}

std::optional<std::size_t> horizon_of(const Options& o) {
  if (o.horizon == 0) return std::nullopt;
  return o.horizon;
}

std::shared_ptr<const Decomposition> make_decomposition(const Options& o, const ShiftHandle& h) {
  if (o.kind == "natural") return natural_coded_decomposition(h.lang);
  if (o.kind == "hofbauer") {
    if (!h.diagram) fail(ErrorCode::InvalidSpec, "--kind hofbauer needs a hofbauer:depth=D:<map> shift");
    auto lang = std::dynamic_pointer_cast<const DiagramLanguage>(h.lang);
    return diagram_decomposition(lang, closed_component(*h.diagram), o.cut);
  }
  fail(ErrorCode::InvalidSpec, "--kind must be natural or hofbauer");
}

struct PotentialSetup {
  ShiftHandle shift;
  LocallyConstantPotential phi;
  std::shared_ptr<const BlockGraph> graph;      // whole block graph
  std::shared_ptr<const BlockGraph> component;  // main irreducible component
};

PotentialSetup potential_setup(const Options& o) {
  if (o.pot.empty()) fail(ErrorCode::InvalidSpec, "--pot <file> is required");
  PotentialSetup s{parse_shift(o.shift, horizon_of(o)), LocallyConstantPotential::from_text(read_file(o.pot)), {}, {}};
  auto g = block_graph(*s.shift.lang, block_length_for(s.phi));
  s.graph = std::make_shared<const BlockGraph>(g);
  s.component = std::make_shared<const BlockGraph>(g.induced(main_component(g)));
  return s;
}

Json measure_json(const MarkovMeasure& mu) {
  Json st = Json::object();
  for (std::size_t v = 0; v < mu.graph->size(); ++v) st[to_text(mu.graph->states[v])] = mu.stationary[v];
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symdyn: languages, entropy, decompositions, thermodynamic formalism and ergodic optimisation "
               "for subshifts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "json (JSONL records), csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    sub->add_flag("--json", o.json_flag, "same as --format json");
    sub->add_option("--report", o.report, "alias of --format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--seed", o.seed, "seed for randomised spot checks")->capture_default_str();
  };
  auto shift_opt = [&](CLI::App* sub) {
    sub->add_option("--shift", o.shift,
                    "full:N | sft:N:forbid=w,... | sgap:<gaps> | fatsgap:N=K:<gaps> | coded:file=P | "
                    "kucherenko[:<gaps>] | hofbauer:depth=D:<map>; gaps = all | powers:k | arith:a:d | list:a,b")
        ->capture_default_str();
    sub->add_option("--horizon", o.horizon, "language horizon (0 = default)")->capture_default_str();
  };

  std::map<std::string, std::function<void(Emitter&)>> handlers;

  // entropy
  auto* entropy = app.add_subcommand("entropy", "topological entropy by growth, Perron root or gap characteristic root");
  shift_opt(entropy);
  entropy->add_option("--method", o.method)->check(CLI::IsMember({"growth", "perron", "root"}))->capture_default_str();
  entropy->add_option("--n", o.n, "longest word length for growth")->capture_default_str();
  entropy->add_option("--tol", o.tol)->capture_default_str();
  entropy->add_option("--states", o.states, "automaton state limit for perron")->capture_default_str();
  common(entropy);
  handlers["entropy"] = [&](Emitter& out) {
    auto h = parse_shift(o.shift, horizon_of(o));
    EntropyEstimate e;
    if (o.method == "growth") e = growth_entropy(*h.lang, o.n);
    else if (o.method == "perron") e = perron_entropy(explore_automaton(*h.lang, o.states));
    else {
      if (!h.gaps) fail(ErrorCode::InvalidSpec, "--method root needs an sgap or fatsgap shift");
      e = gap_entropy_root(*h.gaps, h.symbols, o.tol);
    }
    Json j = estimate_json(e);
    j["shift"] = h.lang->describe();
    out.emit(j);
  };

  // count
  auto* count = app.add_subcommand("count", "exact word counts c_0..c_n");
  shift_opt(count);
  count->add_option("--n", o.n)->capture_default_str();
  common(count);
  handlers["count"] = [&](Emitter& out) {
    auto h = parse_shift(o.shift, horizon_of(o));
    std::vector<std::string> c;
    for (const auto& x : count_sequence(*h.lang, o.n)) c.push_back(big(x));
    out.emit({{"shift", h.lang->describe()}, {"n", o.n}, {"counts", c}});
  };

  // words
  auto* words = app.add_subcommand("words", "list words of one length");
  shift_opt(words);
  words->add_option("--n", o.n)->capture_default_str();
  words->add_option("--limit", o.limit, "maximum number of words printed")->capture_default_str();
  common(words);
  handlers["words"] = [&](Emitter& out) {
    auto h = parse_shift(o.shift, horizon_of(o));
    std::vector<std::string> ws;
    auto all = enumerate_words(*h.lang, o.n);
    std::size_t total = all.size();
    for (std::size_t i = 0; i < total && i < o.limit; ++i) ws.push_back(to_text(all[i]));
    out.emit({{"shift", h.lang->describe()}, {"n", o.n}, {"total", total}, {"truncated", total > ws.size()}, {"words", ws}});
  };

  // decompose
  auto* decompose = app.add_subcommand("decompose", "prefix/suffix collection counts and the obstruction bound");
  shift_opt(decompose);
  decompose->add_option("--kind", o.kind)->check(CLI::IsMember({"natural", "hofbauer"}))->capture_default_str();
  decompose->add_option("--n", o.n)->capture_default_str();
  decompose->add_option("--cut", o.cut, "level N of the diagram decomposition")->capture_default_str();
  common(decompose);
  handlers["decompose"] = [&](Emitter& out) {
    auto h = parse_shift(o.shift, horizon_of(o));
    auto d = make_decomposition(o, h);
    Json rows = Json::array();
    for (const auto& c : obstruction_counts(*d, o.n))
      rows.push_back({{"n", c.n}, {"prefixes", c.prefixes}, {"suffixes", c.suffixes}, {"union", c.both}});
    Json j;
    j["decomposition"] = d->describe();
    j["counts"] = rows;
    j["upper_bound"] = estimate_json(obstruction_upper_bound(*d, o.n));
    out.emit(j);
  };

  // spec-check
  auto* spec = app.add_subcommand("spec-check", "(W)-specification certificate for a fattened core");
  shift_opt(spec);
  spec->add_option("--kind", o.kind)->check(CLI::IsMember({"natural", "hofbauer"}))->capture_default_str();
  spec->add_option("--cut", o.cut)->capture_default_str();
  spec->add_option("--M", o.m, "fattening level")->capture_default_str();
  spec->add_option("--tmax", o.tmax, "largest connector length searched")->capture_default_str();
  spec->add_option("--len", o.len, "longest glued word")->capture_default_str();
  common(spec);
  handlers["spec-check"] = [&](Emitter& out) {
    auto h = parse_shift(o.shift, horizon_of(o));
    auto d = make_decomposition(o, h);
    auto c = check_w_specification(*d, o.m, o.tmax, o.len, o.seed);
    Json j{{"decomposition", d->describe()}, {"M", c.m},          {"status", to_string(c.status)},
           {"gap", c.gap},                    {"len", c.checked_length}, {"words", c.words},
           {"pairs", c.pairs},                {"triples", c.triples}};
    if (c.counterexample) j["counterexample"] = {to_text(c.counterexample->first), to_text(c.counterexample->second)};
    if (c.failed_triple) j["failed_triple"] = {to_text((*c.failed_triple)[0]), to_text((*c.failed_triple)[1]), to_text((*c.failed_triple)[2])};
    out.emit(j);
  };

  // constraints
  auto* cons = app.add_subcommand("constraints", "left and right constraints of one length");
  shift_opt(cons);
  cons->add_option("--n", o.n)->capture_default_str();
  cons->add_option("--ext", o.ext, "longest witness searched")->capture_default_str();
  cons->add_option("--side", o.side)->check(CLI::IsMember({"left", "right", "both"}))->capture_default_str();
  common(cons);
  handlers["constraints"] = [&](Emitter& out) {
    auto h = parse_shift(o.shift, horizon_of(o));
    auto pack = [](const std::vector<Constraint>& cs) {
      Json a = Json::array();
      for (const auto& c : cs) a.push_back({{"word", to_text(c.word)}, {"witness", to_text(c.witness)}});
      return a;
    };
    Json j{{"shift", h.lang->describe()}, {"n", o.n}};
    if (o.side != "right") j["left"] = pack(enumerate_left_constraints(*h.lang, o.n, o.ext));
    if (o.side != "left") j["right"] = pack(enumerate_right_constraints(*h.lang, o.n, o.ext));
    out.emit(j);
  };

  // hofbauer
  auto* hof = app.add_subcommand("hofbauer", "Markov diagram of a piecewise monotone map");
  hof->add_option("--map", o.map, "alphabeta:alpha=A:beta=B | negbeta:beta=B | pwm:file=P")->capture_default_str();
  hof->add_option("--depth", o.depth)->capture_default_str();
  hof->add_flag("--export", o.export_diagram, "include the vertex table and edge list");
  common(hof);
  handlers["hofbauer"] = [&](Emitter& out) {
    auto map = std::make_shared<const PiecewiseMonotoneMap>(parse_map(o.map));
    auto d = build_diagram(map, o.depth);
    auto c = closed_component(d);
    Json j{{"map", map->name()},
           {"vertices", d.size()},
           {"edges", d.edges.size()},
           {"depth", d.depth},
           {"complete", d.complete},
           {"component_size", c.vertices.size()},
           {"component_closed", c.closed},
           {"entropy", c.log_perron}};
    if (o.export_diagram) j["diagram"] = d.to_text();
    out.emit(j);
  };

  // pressure
  auto* pres = app.add_subcommand("pressure", "topological pressure of beta times a locally constant potential");
  shift_opt(pres);
  pres->add_option("--pot", o.pot, "potential file: lines 'word value'")->required();
  pres->add_option("--beta", o.beta)->capture_default_str();
  common(pres);
  handlers["pressure"] = [&](Emitter& out) {
    auto s = potential_setup(o);
    auto p = pressure(*s.graph, s.phi, o.beta);
    out.emit({{"shift", s.shift.lang->describe()}, {"beta", o.beta}, {"value", p.value}, {"bracket_lo", p.bracket_lo},
              {"bracket_hi", p.bracket_hi}, {"method", p.method}});
  };

  // equilibrium
  auto* eq = app.add_subcommand("equilibrium", "Gibbs-Markov equilibrium measure on the main component");
  shift_opt(eq);
  eq->add_option("--pot", o.pot)->required();
  eq->add_option("--beta", o.beta)->capture_default_str();
  common(eq);
  handlers["equilibrium"] = [&](Emitter& out) {
    auto s = potential_setup(o);
    auto mu = equilibrium_markov(s.component, s.phi, o.beta);
    double h = measure_entropy(mu), in = integral(mu, s.phi), p = pressure(*s.component, s.phi, o.beta).value;
    out.emit({{"beta", o.beta}, {"entropy", h}, {"integral", in}, {"pressure", p},
              {"variational_residual", std::abs(h + o.beta * in - p)},
              {"stationarity_residual", mu.stationarity_residual()}, {"stationary", measure_json(mu)}});
  };

  // zerotemp
  auto* zt = app.add_subcommand("zerotemp", "equilibrium measures along an increasing beta schedule");
  shift_opt(zt);
  zt->add_option("--pot", o.pot)->required();
  zt->add_option("--betas", o.betas, "start:ratio:stop (geometric)")->capture_default_str();
  common(zt);
  handlers["zerotemp"] = [&](Emitter& out) {
    auto s = potential_setup(o);
    for (const auto& pt : zero_temperature_path(s.component, s.phi, parse_schedule(o.betas)))
      out.emit({{"beta", pt.beta}, {"entropy", pt.entropy}, {"integral", pt.mean}, {"pressure", pt.pressure}});
  };

  // maximize
  auto* mx = app.add_subcommand("maximize", "maximal ergodic average and a canonical maximising cycle");
  shift_opt(mx);
  mx->add_option("--pot", o.pot)->required();
  common(mx);
  handlers["maximize"] = [&](Emitter& out) {
    auto s = potential_setup(o);
    auto m = max_ergodic_average(s.graph, s.phi);
    out.emit({{"value", m.value}, {"exact", m.exact.str()}, {"cycle", to_text(m.cycle.word)},
              {"cycle_length", m.cycle.edges.size()}, {"optimal_edges", m.optimal_edges.size()}});
  };

  // glue
  auto* glue = app.add_subcommand("glue", "coded subshift glued from a word list with short connectors");
  shift_opt(glue);
  glue->add_option("--words", o.words_file, "file with one word per line")->required();
  glue->add_option("--t", o.t, "longest connector")->capture_default_str();
  glue->add_option("--states", o.states)->capture_default_str();
  common(glue);
  handlers["glue"] = [&](Emitter& out) {
    auto h = parse_shift(o.shift, horizon_of(o));
    std::vector<Word> ws;
    std::istringstream in(read_file(o.words_file));
    std::string line;
    while (std::getline(in, line)) {
      Word w = parse_word(line);
      if (!w.empty()) ws.push_back(std::move(w));
    }
    auto r = glue_subshift(ws, h.lang, o.t, 12, 40, o.states);
    out.emit({{"words", ws.size()}, {"generators", r.generators.size()}, {"entropy", r.entropy.value},
              {"sublanguage", r.sublanguage}, {"checked_length", r.checked_length}});
  };

  // profile
  auto* prof = app.add_subcommand("profile", "zero-temperature entropy against the optimal subgraph");
  shift_opt(prof);
  prof->add_option("--pot", o.pot)->required();
  prof->add_option("--betas", o.betas)->capture_default_str();
  common(prof);
  handlers["profile"] = [&](Emitter& out) {
    auto s = potential_setup(o);
    auto p = maximizer_entropy_profile(s.component, s.phi, parse_schedule(o.betas));
    Json path = Json::array();
    for (const auto& pt : p.path) path.push_back({{"beta", pt.beta}, {"entropy", pt.entropy}, {"integral", pt.mean}});
    out.emit({{"lambda", p.maximum.value}, {"optimal_entropy", p.optimal_entropy}, {"final_entropy", p.final_entropy},
              {"final_mean_gap", p.final_mean_gap}, {"within_bound", p.entropy_within_bound}, {"path", path}});
  };

  // theoremc
  auto* tc = app.add_subcommand("theoremc", "fibre sizes of the counting maps for fat gap shifts");
  tc->add_option("--N", o.big_n)->capture_default_str();
  tc->add_option("--ell", o.ell)->capture_default_str();
  tc->add_option("--gaps", o.gaps)->capture_default_str();
  tc->add_option("--case", o.which_case, "auto: natural decomposition; 1: filler-core fixture")
      ->check(CLI::IsMember({"auto", "1", "2"}))
      ->capture_default_str();
  common(tc);
  handlers["theoremc"] = [&](Emitter& out) {
    GapSet gaps = GapSet::parse(o.gaps);
    std::size_t len = (std::size_t{2} << o.ell) + 2;
    auto lang = build_fat_sgap(gaps, o.big_n, len);
    CountingMapReport r;
    if (o.which_case == "1") {
      r = counting_map_multiplicity(*filler_core_decomposition(lang), o.big_n, o.ell, std::nullopt, 1);
    } else {
      auto d = natural_coded_decomposition(lang);
      r = counting_map_multiplicity(*d, o.big_n, o.ell, default_case_two_witness(gaps), o.which_case == "2" ? 2 : 0);
    }
    Json j{{"case", r.case_id},         {"ell", r.ell},
           {"domain_length", r.domain_length}, {"words", r.words},
           {"max_multiplicity", r.max_multiplicity}, {"bound", big(r.bound)},
           {"injective", r.injective},   {"windows_ok", r.windows_ok},
           {"core_split_ok", r.core_split_ok},     {"image_range_ok", r.image_range_ok},
           {"al2", r.al2},               {"image_min", r.image_min},
           {"image_max", r.image_max}};
    if (r.witness) j["witness"] = {{"u", to_text(r.witness->u)}, {"t", r.witness->t}};
    if (!r.violations.empty()) j["violations"] = r.violations;
    out.emit(j);
  };

  // ank
  auto* ank = app.add_subcommand("ank", "A_n^k table of generator concatenations");
  ank->add_option("--gaps", o.gaps)->capture_default_str();
  ank->add_option("--N", o.big_n)->capture_default_str();
  ank->add_option("--n", o.n)->capture_default_str();
  ank->add_option("--k", o.k)->capture_default_str();
  ank->add_option("--tol", o.tol)->capture_default_str();
  common(ank);
  handlers["ank"] = [&](Emitter& out) {
    GapSet gaps = GapSet::parse(o.gaps);
    auto t = ank_table(gaps, o.big_n, o.n, o.k);
    Json rows = Json::array();
    for (std::size_t n = 1; n <= o.n; ++n) {
      std::vector<std::string> row;
      for (std::size_t k = 1; k <= o.k; ++k) row.push_back(big(t.at(n, k)));
      rows.push_back({{"n", n}, {"a", row}, {"language", big(t.language_count[n])}});
    }
    auto root = gap_entropy_root(gaps, o.big_n, o.tol);
    out.emit({{"property_i", t.property_i}, {"property_ii", t.property_ii}, {"property_iii", t.property_iii},
              {"root_x", *root.root_x}, {"f1_at_root", f1_series(gaps, o.big_n, *root.root_x, o.tol)}, {"rows", rows}});
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (!o.report.empty()) o.format = o.report;
  if (o.json_flag) o.format = "json";
  for (CLI::App* sub : app.get_subcommands()) {
    try {
      Emitter out(o.format, sub->get_name(), canonical_config(*sub), o.seed);
      handlers.at(sub->get_name())(out);
    } catch (const DomainError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}
