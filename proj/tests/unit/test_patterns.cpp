#include <gtest/gtest.h>

#include "support.hpp"

namespace held {
namespace {

struct Case {
  const char* text;
  const char* pattern;
  std::optional<int> counter;
};

class BuiltinPatterns : public ::testing::TestWithParam<Case> {};

TEST_P(BuiltinPatterns, MatchesWithCounter) {
  static const auto lib = PatternLibrary::builtin();
  const auto& c = GetParam();
  const auto m = lib.match(c.text);
  EXPECT_EQ(lib.name(m.pattern_id), c.pattern) << c.text;
  EXPECT_EQ(m.counter, c.counter) << c.text;
}

INSTANTIATE_TEST_SUITE_P(
    Conventions, BuiltinPatterns,
    ::testing::Values(Case{"1. Overview", "arabic_dot", 1}, Case{"12.Scope", "arabic_dot", 12},
                      Case{"1.1 Scope", "arabic_dot2", 1}, Case{"3.2.7 Notes", "arabic_dot3", 7},
                      Case{"4.1.2.9 Detail", "arabic_dot4", 9}, Case{"(1) first", "arabic_paren", 1},
                      Case{"（12）全角", "arabic_paren", 12}, Case{"3) item", "arabic_rparen", 3},
                      Case{"5、事项", "arabic_comma", 5}, Case{"一、总则", "cn_comma", 1},
                      Case{"十二、附则", "cn_comma", 12}, Case{"（三）说明", "cn_paren", 3},
                      Case{"第一节 释义", "section_cn", 1}, Case{"第二十三章 其他", "chapter_cn", 23},
                      Case{"第一百零五条 规定", "article_cn", 105}, Case{"Chapter 4 Results", "chapter_en", 4},
                      Case{"Part XIV Appendices", "part_en", 14}, Case{"Section 2 Terms", "section_en", 2},
                      Case{"Appendix B Tables", "appendix_en", 2}, Case{"I. Introduction", "roman_upper_dot", 1},
                      Case{"IX. Ninth", "roman_upper_dot", 9}, Case{"(iv) fourth", "roman_lower_paren", 4},
                      Case{"A. Alpha", "letter_upper_dot", 1}, Case{"(c) gamma", "letter_lower_paren", 3},
                      Case{"b) beta", "letter_lower_rparen", 2}, Case{"② second", "circled", 2},
                      Case{"• bullet", "bullet", std::nullopt}, Case{"- dash item", "dash", std::nullopt},
                      Case{"　一、 leading ideographic space", "cn_comma", 1},
                      Case{"Plain sentence.", "none", std::nullopt}, Case{"", "none", std::nullopt},
                      Case{"2015 annual report", "none", std::nullopt}));

TEST(PatternLibrary, BuiltinHasTwentyFourDistinctNames) {
  const auto lib = PatternLibrary::builtin();
  ASSERT_EQ(lib.size(), 24u);
  std::set<std::string> names;
  for (const auto& s : lib.specs()) names.insert(s.name);
  EXPECT_EQ(names.size(), 24u);
  EXPECT_EQ(lib.name(0), "none");
  EXPECT_EQ(lib.id_of("arabic_dot"), lib.match("1. x").pattern_id);
}

TEST(PatternLibrary, ExtensibleAndHashChanges) {
  auto lib = PatternLibrary::builtin();
  const auto before = lib.hash();
  lib.add({"article_en", "(?:Article|ARTICLE)\\s+(\\d+)\\b", CounterKind::arabic});
  EXPECT_NE(lib.hash(), before);
  const auto m = lib.match("Article 7 Governing law");
  EXPECT_EQ(lib.name(m.pattern_id), "article_en");
  EXPECT_EQ(m.counter, 7);
  EXPECT_EQ(PatternLibrary::builtin().hash(), before);
}

TEST(PatternLibrary, BadRegexIsValidationError) {
  PatternLibrary lib;
  try {
    lib.add({"broken", "(unclosed", CounterKind::none});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::validation);
  }
}

TEST(Counters, ChineseNumerals) {
  using detail::parse_chinese_numeral;
  EXPECT_EQ(parse_chinese_numeral("一"), 1);
  EXPECT_EQ(parse_chinese_numeral("十"), 10);
  EXPECT_EQ(parse_chinese_numeral("十五"), 15);
  EXPECT_EQ(parse_chinese_numeral("二十"), 20);
  EXPECT_EQ(parse_chinese_numeral("九十九"), 99);
  EXPECT_EQ(parse_chinese_numeral("一百"), 100);
  EXPECT_EQ(parse_chinese_numeral("两百零三"), 203);
}

TEST(Counters, RomanNumerals) {
  using detail::parse_roman;
  EXPECT_EQ(parse_roman("i"), 1);
  EXPECT_EQ(parse_roman("IV"), 4);
  EXPECT_EQ(parse_roman("xix"), 19);
  EXPECT_EQ(parse_roman("XXXIX"), 39);
  EXPECT_FALSE(parse_roman("").has_value());
}

TEST(Counters, MatchAllIsPerObject) {
  const auto lib = PatternLibrary::builtin();
  const auto doc = test::text_document({"1. A", "body text", "2. B"});
  const auto m = lib.match_all(doc);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].counter, 1);
  EXPECT_FALSE(m[1].matched());
  EXPECT_EQ(m[2].counter, 2);
}

}  // namespace
}  // namespace held
