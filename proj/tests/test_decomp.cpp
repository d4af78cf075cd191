#include <gtest/gtest.h>

#include <cmath>

#include "symdyn/decomposition.hpp"

using namespace symdyn;

namespace {

const double kLog2 = std::log(2.0);

Word w(const char* s) { return parse_word(s); }

std::shared_ptr<const Sft> golden_sft(std::size_t horizon = 24) { return build_sft({Alphabet(2), {w("11")}}, horizon); }

// Oracle for factorize: every split, longest core then shortest prefix.
std::optional<Factorization> brute_factorize(const Decomposition& d, const Word& x) {
  const std::size_t n = x.size();
  for (std::size_t len = n + 1; len-- > 0;)
    for (std::size_t i = 0; i + len <= n; ++i) {
      Word p(x.begin(), x.begin() + i), c(x.begin() + i, x.begin() + i + len), s(x.begin() + i + len, x.end());
      if (d.is_prefix(p) && d.is_core(c) && d.is_suffix(s)) return Factorization{p, c, s};
    }
  return std::nullopt;
}

// Oracle for G^M by brute force over every split point.
bool brute_fattened(const Decomposition& d, const Word& x, std::size_t m) {
  for (std::size_t i = 0; i <= x.size(); ++i)
    for (std::size_t j = i; j <= x.size(); ++j) {
      Word p(x.begin(), x.begin() + i), c(x.begin() + i, x.begin() + j), s(x.begin() + j, x.end());
      if (p.size() <= m && s.size() <= m && d.is_prefix(p) && d.is_core(c) && d.is_suffix(s)) return true;
    }
  return false;
}

std::shared_ptr<const Decomposition> trivial(std::shared_ptr<const LanguageOracle> lang) {
  auto l = lang;
  return std::make_shared<PredicateDecomposition>(
      lang, [](WordView) { return false; }, [l](WordView x) { return is_word(*l, x); }, [](WordView) { return false; },
      "trivial");
}

std::shared_ptr<const HofbauerDecomposition> doubling_decomposition(std::size_t cut) {
  auto d = std::make_shared<const MarkovDiagram>(build_diagram(PiecewiseMonotoneMap::alpha_beta(0, 2), 10));
  auto lang = std::make_shared<DiagramLanguage>(d);
  return diagram_decomposition(lang, closed_component(*d), cut);
}

}  // namespace

TEST(Natural, RequiresCodedShift) {
  try {
    (void)natural_coded_decomposition(build_full(2));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCoded);
  }
}

TEST(Natural, GapShiftHasOnePrefixAndSuffixPerLength) {
  auto d = natural_coded_decomposition(build_sgap(GapSet::all(), 30));
  for (std::size_t n = 1; n <= 20; ++n) {
    EXPECT_EQ(d->prefix_words(n).size(), 1u) << n;
    EXPECT_EQ(d->suffix_words(n).size(), 1u) << n;
  }
  EXPECT_EQ(d->prefix_words(3)[0], w("221"));
  EXPECT_EQ(d->suffix_words(3)[0], w("222"));
}

TEST(Natural, CollectionsMatchPredicatesOnLanguage) {
  for (auto lang : std::vector<std::shared_ptr<const LanguageOracle>>{
           build_fat_sgap(GapSet::powers(2), 3, 12), build_kucherenko(GapSet::arithmetic(1, 1), 12),
           build_sgap(GapSet::list({0, 2}), 12)}) {
    auto d = natural_coded_decomposition(lang);
    for (std::size_t n = 1; n <= 8; ++n) {
      std::vector<Word> pre, suf;
      for (const Word& x : enumerate_words(*lang, n)) {
        if (d->is_prefix(x)) pre.push_back(x);
        if (d->is_suffix(x)) suf.push_back(x);
      }
      EXPECT_EQ(d->prefix_words(n), pre) << lang->describe() << " n=" << n;
      EXPECT_EQ(d->suffix_words(n), suf) << lang->describe() << " n=" << n;
    }
  }
}

TEST(Natural, FatGapUnionCount) {
  auto d = natural_coded_decomposition(build_fat_sgap(GapSet::powers(2), 3, 20));
  auto counts = obstruction_counts(*d, 16);
  for (const auto& c : counts) {
    // fillers only (2^n) and fillers then 1 (2^(n-1)) never overlap
    EXPECT_EQ(c.prefixes, std::size_t{1} << (c.n - 1));
    EXPECT_EQ(c.suffixes, std::size_t{1} << c.n);
    EXPECT_EQ(c.both, 3 * (std::size_t{1} << (c.n - 1)));
  }
  auto e = obstruction_upper_bound(*d, 16);
  EXPECT_NEAR(e.value, kLog2, 0.05);
  EXPECT_FALSE(e.flags.empty());
}

TEST(Natural, KucherenkoObstructionDecays) {
  auto d = natural_coded_decomposition(build_kucherenko(GapSet::arithmetic(1, 1), 24));
  auto e = obstruction_upper_bound(*d, 20);
  // one suffix shape 1^i 2^j (i > j) and one prefix shape per split: linear counts
  for (const auto& c : obstruction_counts(*d, 20)) EXPECT_LE(c.both, 2 * c.n + 2);
  EXPECT_LT(e.value, 0.25);
  EXPECT_LT(e.per_n.back(), e.per_n[4]);
}

TEST(Factorize, MatchesBruteForceOracle) {
  std::vector<std::shared_ptr<const Decomposition>> ds{
      natural_coded_decomposition(build_sgap(GapSet::powers(2), 16)),
      natural_coded_decomposition(build_fat_sgap(GapSet::arithmetic(1, 2), 3, 16)),
      natural_coded_decomposition(build_kucherenko(GapSet::arithmetic(1, 1), 16)),
      trivial(golden_sft())};
  for (const auto& d : ds)
    for (std::size_t n = 0; n <= 8; ++n)
      for (const Word& x : enumerate_words(d->language(), n)) {
        auto f = d->factorize(x);
        ASSERT_TRUE(f.has_value()) << d->describe() << " " << to_text(x);
        EXPECT_EQ(concat(concat(f->prefix, f->core), f->suffix), x);
        EXPECT_TRUE(d->is_prefix(f->prefix));
        EXPECT_TRUE(d->is_core(f->core));
        EXPECT_TRUE(d->is_suffix(f->suffix));
        auto g = brute_factorize(*d, x);
        ASSERT_TRUE(g.has_value());
        EXPECT_EQ(f->prefix, g->prefix);
        EXPECT_EQ(f->core, g->core);
      }
}

TEST(Factorize, IsDeterministic) {
  auto d = natural_coded_decomposition(build_fat_sgap(GapSet::powers(2), 3, 16));
  auto x = w("3122132231");
  auto a = d->factorize(x), b = d->factorize(x);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->core, b->core);
  EXPECT_EQ(a->prefix, w("31"));
  EXPECT_EQ(a->core, w("22132231"));
}

TEST(Fattened, FiltrationExhaustsLanguage) {
  auto d = natural_coded_decomposition(build_sgap(GapSet::powers(2), 16));
  for (std::size_t n = 1; n <= 9; ++n) {
    auto all = enumerate_words(d->language(), n);
    std::size_t prev = 0;
    for (std::size_t m = 0; m <= n; ++m) {
      auto g = fattened_core(*d, m, n);
      EXPECT_GE(g.size(), prev);
      prev = g.size();
    }
    EXPECT_EQ(fattened_core(*d, n, n), all);
    std::vector<Word> core;
    for (const Word& x : all)
      if (d->is_core(x)) core.push_back(x);
    EXPECT_EQ(fattened_core(*d, 0, n), core);
  }
}

TEST(Fattened, GapOneMatchesBruteForce) {
  auto d = natural_coded_decomposition(build_sgap(GapSet::list({1}), 10));
  auto g = fattened_core(*d, 1, 3);
  std::vector<Word> expect;
  for (const Word& x : enumerate_words(d->language(), 3))
    if (brute_fattened(*d, x, 1)) expect.push_back(x);
  EXPECT_EQ(g, expect);
  // 121 = 1|21, 212 = 21|2 and 221 is not in the language
  EXPECT_EQ(g, (std::vector<Word>{w("121"), w("212")}));
}

TEST(Fattened, RandomDecompositionsAgreeWithBruteForce) {
  auto d = natural_coded_decomposition(build_fat_sgap(GapSet::list({1, 3}), 3, 12));
  for (std::size_t m = 0; m <= 3; ++m)
    for (const Word& x : enumerate_words(d->language(), 7)) EXPECT_EQ(d->in_fattened(x, m), brute_fattened(*d, x, m));
}

TEST(Specification, FullShiftIsImmediate) {
  auto c = check_w_specification(*trivial(build_full(2)), 0, 3, 6);
  EXPECT_EQ(c.status, SpecStatus::Verified);
  EXPECT_EQ(c.gap, 0u);
  EXPECT_EQ(c.pairs, c.words * c.words);
  EXPECT_EQ(c.triples, 100u);
}

TEST(Specification, GapShiftPowersOfTwo) {
  auto d = natural_coded_decomposition(build_sgap(GapSet::powers(2), 40));
  auto c = check_w_specification(*d, 0, 6, 8);
  EXPECT_EQ(c.status, SpecStatus::Verified);
  // cores end in 1, so gluing is free
  EXPECT_EQ(c.gap, 0u);
  auto c1 = check_w_specification(*d, 1, 8, 8);
  EXPECT_EQ(c1.status, SpecStatus::Verified);
  EXPECT_GE(c1.gap, 1u);
}

TEST(Specification, GoldenMeanWithChosenCores) {
  auto lang = golden_sft();
  auto l = lang;
  auto ends_in_two = std::make_shared<PredicateDecomposition>(
      lang, [](WordView) { return false; }, [l](WordView x) { return x.back() == 2 && is_word(*l, x); },
      [](WordView) { return false; }, "ends-in-2");
  auto c = check_w_specification(*ends_in_two, 0, 2, 6);
  EXPECT_EQ(c.status, SpecStatus::Verified);
  EXPECT_EQ(c.gap, 0u);

  auto all = trivial(lang);
  auto bad = check_w_specification(*all, 0, 0, 6);
  ASSERT_EQ(bad.status, SpecStatus::Counterexample);
  EXPECT_EQ(bad.counterexample->first.back(), 1);
  EXPECT_EQ(bad.counterexample->second.front(), 1);
  auto good = check_w_specification(*all, 0, 1, 6);
  EXPECT_EQ(good.status, SpecStatus::Verified);
  EXPECT_EQ(good.gap, 1u);
}

TEST(Specification, ReproducibleWithSeed) {
  auto d = natural_coded_decomposition(build_fat_sgap(GapSet::powers(2), 3, 30));
  auto a = check_w_specification(*d, 1, 6, 6, 42);
  auto b = check_w_specification(*d, 1, 6, 6, 42);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.gap, b.gap);
  EXPECT_EQ(a.pairs, b.pairs);
}

TEST(Specification, HorizonEnforced) {
  auto d = natural_coded_decomposition(build_sgap(GapSet::powers(2), 10));
  EXPECT_THROW(check_w_specification(*d, 0, 4, 8), DomainError);
}

TEST(Obstruction, GapShiftsAreZero) {
  for (const auto& s : {GapSet::all(), GapSet::powers(2), GapSet::arithmetic(1, 3)}) {
    auto d = natural_coded_decomposition(build_sgap(s, 24));
    auto e = obstruction_upper_bound(*d, 20);
    // at most two words per length: (1/n) log 2
    EXPECT_LE(e.value, std::log(2.0) / 20 + 1e-12) << s.spec();
  }
  auto e = obstruction_upper_bound(*natural_coded_decomposition(build_sgap(GapSet::all(), 24)), 20);
  EXPECT_NEAR(e.value, std::log(2.0) / 20, 1e-12);  // prefix 2..21 and suffix 2..2 differ
}

TEST(Obstruction, DoublingDiagramIsZero) {
  auto d = doubling_decomposition(1);
  EXPECT_EQ(d->suffix_words(5).size(), 0u);
  EXPECT_EQ(obstruction_upper_bound(*d, 8).value, 0.0);
  for (std::size_t n = 1; n <= 8; ++n)
    for (const Word& x : enumerate_words(d->language(), n)) {
      auto f = d->factorize(x);
      ASSERT_TRUE(f);
      EXPECT_EQ(f->core, x);
    }
}

TEST(Constraints, FullShiftHasNone) {
  auto f = build_full(3, 12);
  for (std::size_t n = 1; n <= 4; ++n) {
    EXPECT_TRUE(enumerate_left_constraints(*f, n, 4).empty());
    EXPECT_TRUE(enumerate_right_constraints(*f, n, 4).empty());
  }
}

TEST(Constraints, GoldenMeanOnlyAtLengthOne) {
  auto g = golden_sft();
  auto l1 = enumerate_left_constraints(*g, 1, 4);
  ASSERT_EQ(l1.size(), 1u);
  EXPECT_EQ(l1[0].word, w("1"));
  EXPECT_EQ(l1[0].witness, w("1"));
  for (std::size_t n = 2; n <= 6; ++n) {
    EXPECT_TRUE(enumerate_left_constraints(*g, n, 4).empty()) << n;
    EXPECT_TRUE(enumerate_right_constraints(*g, n, 4).empty()) << n;
  }
}

TEST(Constraints, GapShiftZeroTwoOnlyShortConstraints) {
  // A 2 after a 1 already fixes the remaining gap, so dropping a leading
  // symbol of a length-3 word never frees an extension; length 2 does.
  auto s = build_sgap(GapSet::list({0, 2}), 20);
  auto left2 = enumerate_left_constraints(*s, 2, 6);
  ASSERT_FALSE(left2.empty());
  EXPECT_EQ(left2[0].word, w("12"));
  EXPECT_FALSE(enumerate_right_constraints(*s, 2, 6).empty());
  auto left = enumerate_left_constraints(*s, 3, 6);
  auto right = enumerate_right_constraints(*s, 3, 6);
  EXPECT_TRUE(left.empty());
  EXPECT_TRUE(right.empty());
  // independent check of every reported witness and of completeness
  auto all = enumerate_words(*s, 3);
  std::set<Word> reported;
  for (const auto& c : left) {
    reported.insert(c.word);
    EXPECT_TRUE(is_word(*s, concat(subword(c.word, 1, 2), c.witness)));
    EXPECT_FALSE(is_word(*s, concat(c.word, c.witness)));
  }
  for (const Word& x : all) {
    bool expect = false;
    for (std::size_t k = 1; k <= 6 && !expect; ++k)
      for (const Word& v : enumerate_words(*build_full(2, 6), k))
        if (is_word(*s, concat(subword(x, 1, 2), v)) && !is_word(*s, concat(x, v))) {
          expect = true;
          break;
        }
    EXPECT_EQ(reported.count(x) == 1, expect) << to_text(x);
  }
  for (const auto& c : right) {
    EXPECT_TRUE(is_word(*s, concat(c.witness, subword(c.word, 0, 2))));
    EXPECT_FALSE(is_word(*s, concat(c.witness, c.word)));
  }
}

TEST(Ank, FirstColumnExamples) {
  auto a = ank_table(GapSet::all(), 2, 12, 3);
  for (std::size_t n = 1; n <= 12; ++n) EXPECT_EQ(a.at(n, 1), 1);
  auto b = ank_table(GapSet::powers(2), 3, 12, 3);
  EXPECT_EQ(b.at(3, 1), 4);
  EXPECT_EQ(b.at(2, 1), 0);
  EXPECT_EQ(b.at(1, 1), 0);
  EXPECT_EQ(b.at(5, 1), 16);
  EXPECT_EQ(b.at(6, 2), 16);
  EXPECT_TRUE(b.property_i);
  EXPECT_TRUE(b.property_ii);
  EXPECT_TRUE(b.property_iii);
}

TEST(Ank, MatchesConcatenationEnumeration) {
  // A_n^k counts words that split into exactly k generators (filler block
  // then a single 1); the split at the 1's is unique.
  for (const auto& s : {GapSet::powers(2), GapSet::list({0, 1, 3})}) {
    const int n_sym = 3;
    auto t = ank_table(s, n_sym, 10, 6);
    FatGapModel model(s, n_sym);
    auto full = build_full(n_sym, 10);
    for (std::size_t n = 1; n <= 10; ++n) {
      std::vector<BigInt> by_k(11, 0);
      for (const Word& x : enumerate_words(*full, n)) {
        if (x.back() != 1) continue;
        std::size_t start = 0, k = 0;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
          if (x[i] == 1) {
            ok = model.is_generator(WordView(x).subspan(start, i + 1 - start));
            start = i + 1;
            ++k;
          }
        if (ok) ++by_k[k];
      }
      for (std::size_t k = 1; k <= 6; ++k) EXPECT_EQ(t.at(n, k), by_k[k]) << s.spec() << " n=" << n << " k=" << k;
    }
  }
}

TEST(Ank, RowSumsBoundedByLanguage) {
  auto t = ank_table(GapSet::arithmetic(1, 2), 4, 12, 12);
  EXPECT_TRUE(t.property_i);
  for (std::size_t n = 1; n <= 12; ++n) EXPECT_LE(t.row_sum[n], t.language_count[n]);
}

TEST(Ank, FirstSeriesAtRootIsOne) {
  for (const auto& s : {GapSet::powers(2), GapSet::all(), GapSet::arithmetic(2, 3)}) {
    auto e = gap_entropy_root(s, 3);
    EXPECT_NEAR(f1_series(s, 3, *e.root_x), 1.0, 1e-8) << s.spec();
  }
  EXPECT_NEAR(f1_series(GapSet::list({0, 1}), 2, 0.5), 0.75, 1e-15);
}

TEST(CountingMaps, NaturalDecompositionFibresBounded) {
  auto lang = build_fat_sgap(GapSet::powers(2), 3, 64);
  auto d = natural_coded_decomposition(lang);
  auto wit = default_case_two_witness(GapSet::powers(2));
  EXPECT_EQ(wit.u, w("221221"));
  for (std::size_t ell : {2u, 3u}) {
    auto r = counting_map_multiplicity(*d, 3, ell, wit);
    EXPECT_EQ(r.case_id, 2);
    EXPECT_EQ(r.domain_length, (std::size_t{1} << ell) - 1);
    EXPECT_EQ(r.words, std::size_t{1} << r.domain_length);
    EXPECT_LE(BigInt(r.max_multiplicity), r.bound) << ell;
    EXPECT_TRUE(r.windows_ok);
    EXPECT_TRUE(r.core_split_ok);
    EXPECT_TRUE(r.images_in_collections);
  }
  EXPECT_FALSE(counting_map_multiplicity(*d, 3, 2, wit).al2);
  EXPECT_TRUE(counting_map_multiplicity(*d, 3, 3, wit).al2);
}

TEST(CountingMaps, CaseOneIsInjective) {
  auto lang = build_fat_sgap(GapSet::powers(2), 3, 64);
  auto d = filler_core_decomposition(lang);
  for (std::size_t ell : {1u, 2u, 3u}) {
    auto r = counting_map_multiplicity(*d, 3, ell);
    EXPECT_EQ(r.case_id, 1);
    EXPECT_EQ(r.words, std::size_t{1} << (std::size_t{1} << ell));
    EXPECT_TRUE(r.injective);
    EXPECT_EQ(r.max_multiplicity, 1u);
    EXPECT_TRUE(r.image_range_ok);
    EXPECT_GE(r.image_min, (std::size_t{1} << ell) + 1);
    EXPECT_LE(r.image_max, (std::size_t{2} << ell) + 1);
  }
}

TEST(CountingMaps, Errors) {
  auto lang = build_fat_sgap(GapSet::powers(2), 3, 64);
  auto d = natural_coded_decomposition(lang);
  EXPECT_THROW(counting_map_multiplicity(*d, 2, 2), DomainError);
  EXPECT_THROW(counting_map_multiplicity(*d, 3, 2, CaseTwoWitness{w("21"), 0}), DomainError);
  EXPECT_THROW(counting_map_multiplicity(*natural_coded_decomposition(build_fat_sgap(GapSet::powers(2), 3, 8)), 3, 3,
                                     default_case_two_witness(GapSet::powers(2))),
               DomainError);
  // a decomposition that cannot factor w1w
  auto empty = std::make_shared<PredicateDecomposition>(
      lang, [](WordView) { return false; }, [](WordView x) { return !contains_symbol(x, 1); },
      [](WordView) { return false; }, "broken");
  try {
    (void)counting_map_multiplicity(*empty, 3, 2, std::nullopt, 1);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::FactorizeIncomplete);
  }
}

TEST(Hofbauer, FactorisationSoundOnShiftedMap) {
  auto t = PiecewiseMonotoneMap::alpha_beta(Quadratic::sqrt(2) - Quadratic(1), 2);
  auto diag = std::make_shared<const MarkovDiagram>(build_diagram(t, 14));
  auto lang = std::make_shared<DiagramLanguage>(diag);
  auto comp = closed_component(*diag);
  for (std::size_t cut : {2u, 4u}) {
    auto d = diagram_decomposition(lang, comp, cut);
    EXPECT_TRUE(d->truncated());
    std::size_t factored = 0;
    for (std::size_t n = 1; n <= 9; ++n)
      for (const Word& x : enumerate_words(*lang, n)) {
        auto f = d->factorize(x);
        if (!f) continue;
        ++factored;
        EXPECT_TRUE(f->prefix.empty());
        EXPECT_EQ(concat(f->core, f->suffix), x);
        EXPECT_TRUE(d->is_core(f->core)) << to_text(x);
        EXPECT_TRUE(d->is_suffix(f->suffix)) << to_text(x);
      }
    EXPECT_GT(factored, 0u);
    auto s = d->suffix_words(6);
    for (const Word& x : s) EXPECT_TRUE(d->is_suffix(x));
  }
}
