#include <gtest/gtest.h>

#include <future>
#include <memory>
#include <vector>

#include "brute.hpp"
#include "symdyn/language.hpp"
#include "symdyn/shifts.hpp"

using namespace symdyn;

namespace {

Word w(const char* s) { return parse_word(s); }

std::vector<std::shared_ptr<const LanguageOracle>> zoo() {
  return {
      build_full(2, 10),
      build_sft({Alphabet(2), {w("11")}}, 12),
      build_sft({Alphabet(3), {w("12"), w("33"), w("231")}}, 9),
      build_sgap(GapSet::list({1}), 12),
      build_sgap(GapSet::powers(2), 12),
      build_fat_sgap(GapSet::powers(2), 3, 9),
      build_kucherenko(GapSet::arithmetic(1, 1), 10),
  };
}

}  // namespace

TEST(Alphabet, RejectsEmpty) {
  EXPECT_THROW(Alphabet(0), DomainError);
  EXPECT_EQ(Alphabet(3).size(), 3);
  EXPECT_TRUE(Alphabet(3).contains(3));
  EXPECT_FALSE(Alphabet(3).contains(0));
}

TEST(WordText, RoundTrip) {
  EXPECT_EQ(to_text(Word{}), "-");
  EXPECT_EQ(parse_word("-"), Word{});
  EXPECT_EQ(to_text(w("1 2 10")), "1 2 10");
  EXPECT_EQ(parse_word("1212"), (Word{1, 2, 1, 2}));
  EXPECT_EQ(parse_word(" 3 1 "), (Word{3, 1}));
  EXPECT_THROW(parse_word("1 x"), DomainError);
  EXPECT_THROW(parse_word("0"), DomainError);
}

TEST(WordText, EmptyWordIsConcatenationIdentity) {
  Word a = w("121");
  EXPECT_EQ(concat(a, Word{}), a);
  EXPECT_EQ(concat(Word{}, a), a);
}

TEST(IsWord, Examples) {
  EXPECT_TRUE(is_word(*build_full(2), w("1212")));
  EXPECT_FALSE(is_word(*build_sft({Alphabet(2), {w("11")}}), w("211")));
  EXPECT_TRUE(is_word(*build_sgap(GapSet::list({1})), w("2121")));
}

TEST(IsWord, EmptyWordIsMember) {
  for (const auto& lang : zoo()) EXPECT_TRUE(is_word(*lang, Word{})) << lang->describe();
}

TEST(IsWord, HorizonExceeded) {
  auto lang = build_full(2, 5);
  try {
    (void)is_word(*lang, Word(6, 1));
    FAIL() << "expected HorizonExceeded";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::HorizonExceeded);
  }
  EXPECT_THROW(enumerate_words(*lang, 6), DomainError);
  EXPECT_THROW(count_words(*lang, 6), DomainError);
}

TEST(IsWord, ForeignSymbolIsNotAWord) { EXPECT_FALSE(is_word(*build_full(2), w("13"))); }

TEST(Enumerate, FullShiftLengthTwo) {
  auto words = enumerate_words(*build_full(2), 2);
  std::vector<Word> expect{w("11"), w("12"), w("21"), w("22")};
  EXPECT_EQ(words, expect);
}

TEST(Enumerate, LengthZeroIsEmptyWord) {
  for (const auto& lang : zoo()) {
    auto words = enumerate_words(*lang, 0);
    ASSERT_EQ(words.size(), 1u);
    EXPECT_TRUE(words[0].empty());
  }
}

TEST(Enumerate, GoldenMeanMatchesBruteForce) {
  auto lang = build_sft({Alphabet(2), {w("11")}});
  auto words = enumerate_words(*lang, 3);
  std::vector<Word> expect;
  for (const auto& x : brute::all_words(2, 3))
    if (!brute::has_factor(x, w("11"))) expect.push_back(x);
  EXPECT_EQ(words, expect);
  EXPECT_EQ(words.size(), 5u);
}

TEST(Enumerate, SGapSingleGap) {
  auto words = enumerate_words(*build_sgap(GapSet::list({1})), 2);
  std::vector<Word> expect{w("12"), w("21")};
  EXPECT_EQ(words, expect);
}

TEST(Enumerate, SortedWithoutDuplicates) {
  for (const auto& lang : zoo()) {
    auto words = enumerate_words(*lang, 6);
    EXPECT_TRUE(std::is_sorted(words.begin(), words.end())) << lang->describe();
    EXPECT_EQ(std::adjacent_find(words.begin(), words.end()), words.end()) << lang->describe();
  }
}

TEST(Count, Examples) {
  EXPECT_EQ(count_words(*build_full(3), 4), 81);
  EXPECT_EQ(count_words(*build_sft({Alphabet(2), {w("11")}}), 3), 5);
  EXPECT_EQ(count_words(*build_fat_sgap(GapSet::all(), 3), 2), 9);
}

TEST(Count, EqualsEnumerationLength) {
  for (const auto& lang : zoo())
    for (std::size_t n = 0; n <= 8; ++n)
      EXPECT_EQ(count_words(*lang, n), enumerate_words(*lang, n).size()) << lang->describe() << " n=" << n;
}

TEST(Count, BigIntegersBeyondSixtyFourBits) {
  auto lang = build_full(10, 40);
  BigInt expect = 1;
  for (int i = 0; i < 40; ++i) expect *= 10;
  EXPECT_EQ(count_words(*lang, 40), expect);
  try {
    (void)count_words_u64(*lang, 40);
    FAIL() << "expected Overflow";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Overflow);
  }
  EXPECT_EQ(count_words_u64(*lang, 19), 10000000000000000000ull);
}

TEST(Properties, Subadditivity) {
  for (const auto& lang : zoo()) {
    auto c = count_sequence(*lang, 9);
    for (std::size_t m = 0; m <= 9; ++m)
      for (std::size_t n = 0; m + n <= 9; ++n) EXPECT_LE(c[m + n], c[m] * c[n]) << lang->describe();
  }
}

TEST(Properties, FactorialClosure) {
  for (const auto& lang : zoo())
    for (const auto& x : enumerate_words(*lang, 7))
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i; j <= x.size(); ++j)
          ASSERT_TRUE(is_word(*lang, subword(x, i, j - i))) << lang->describe() << ' ' << to_text(x);
}

TEST(Properties, RightExtendability) {
  for (const auto& lang : zoo())
    for (const auto& x : enumerate_words(*lang, 7)) {
      bool ok = false;
      for (Symbol a = 1; a <= lang->alphabet().size() && !ok; ++a) ok = is_word(*lang, concat(x, Word{a}));
      ASSERT_TRUE(ok) << lang->describe() << ' ' << to_text(x);
    }
}

TEST(Properties, DeterministicAcrossThreads) {
  auto lang = build_kucherenko(GapSet::arithmetic(1, 1), 14);
  auto reference = enumerate_words(*build_kucherenko(GapSet::arithmetic(1, 1), 14), 12);
  std::vector<std::future<std::vector<Word>>> jobs;
  for (int i = 0; i < 4; ++i) jobs.push_back(std::async(std::launch::async, [&] { return enumerate_words(*lang, 12); }));
  for (auto& j : jobs) EXPECT_EQ(j.get(), reference);
}

TEST(Explore, FiniteAutomatonOfGoldenMean) {
  auto g = explore_automaton(*build_sft({Alphabet(2), {w("11")}}), 100);
  EXPECT_EQ(g.states.size(), 3u);  // empty context, "1", "2"
  EXPECT_THROW(explore_automaton(*build_sgap(GapSet::powers(2)), 50), DomainError);
}
