// Item-number patterns for headings ("1.", "1.2", "(3)", "一、", "第二节", ...).
//
// Each pattern is a regex anchored at the start of the text whose first capture
// group holds the item counter. Patterns are tried in library order and the
// first hit wins, which makes them mutually exclusive. Pattern id 0 means "no
// pattern"; ids 1..size() follow library order.
#pragma once

#include <cstdio>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "held/core.hpp"
#include "held/document.hpp"

namespace held {

enum class CounterKind { none, arabic, chinese, roman, letter, circled };

inline const char* to_string(CounterKind k) {
  switch (k) {
    case CounterKind::none: return "none";
    case CounterKind::arabic: return "arabic";
    case CounterKind::chinese: return "chinese";
    case CounterKind::roman: return "roman";
    case CounterKind::letter: return "letter";
    case CounterKind::circled: return "circled";
  }
  return "none";
}

inline std::optional<CounterKind> parse_counter_kind(std::string_view s) {
  for (auto k : {CounterKind::none, CounterKind::arabic, CounterKind::chinese,
                 CounterKind::roman, CounterKind::letter, CounterKind::circled})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct PatternSpec {
  std::string name;
  std::string regex;
  CounterKind counter = CounterKind::none;
};

struct PatternMatch {
  int pattern_id = 0;
  std::optional<int> counter;

  bool matched() const { return pattern_id != 0; }
  friend bool operator==(const PatternMatch&, const PatternMatch&) = default;
};

using PatternMatches = std::vector<PatternMatch>;

namespace detail {

// Decodes one UTF-8 code point at s[i], advancing i. Invalid bytes decode as U+FFFD.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  const int extra = b0 < 0x80           ? 0
                    : (b0 >> 5) == 0x6  ? 1
                    : (b0 >> 4) == 0xE  ? 2
                    : (b0 >> 3) == 0x1E ? 3
                                        : -1;
  if (extra < 0 || i + static_cast<std::size_t>(extra) >= s.size()) {
    ++i;
    return 0xFFFD;
  }
  char32_t cp = extra == 0 ? b0 : (b0 & (0x3F >> extra));
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += static_cast<std::size_t>(extra) + 1;
  return cp;
}

inline std::optional<int> parse_chinese_numeral(std::string_view s) {
  int total = 0, digit = -1;
  bool any = false;
  for (std::size_t i = 0; i < s.size();) {
    const char32_t cp = next_code_point(s, i);
    int d = -1;
    switch (cp) {
      case U'零': case U'〇': d = 0; break;
      case U'一': d = 1; break;
      case U'二': case U'两': d = 2; break;
      case U'三': d = 3; break;
      case U'四': d = 4; break;
      case U'五': d = 5; break;
      case U'六': d = 6; break;
      case U'七': d = 7; break;
      case U'八': d = 8; break;
      case U'九': d = 9; break;
      case U'十': total += (digit < 0 ? 1 : digit) * 10; digit = -1; any = true; continue;
      case U'百': total += (digit < 0 ? 1 : digit) * 100; digit = -1; any = true; continue;
      default: return std::nullopt;
    }
    digit = d;
    any = true;
  }
  if (!any) return std::nullopt;
  if (digit > 0) total += digit;
  return total > 0 ? std::optional<int>(total) : std::nullopt;
}

inline std::optional<int> parse_roman(std::string_view s) {
  auto value = [](char c) {
    switch (c) {
      case 'i': case 'I': return 1;
      case 'v': case 'V': return 5;
      case 'x': case 'X': return 10;
      case 'l': case 'L': return 50;
      case 'c': case 'C': return 100;
      default: return 0;
    }
  };
  int total = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int v = value(s[i]);
    if (v == 0) return std::nullopt;
    const int next = i + 1 < s.size() ? value(s[i + 1]) : 0;
    total += v < next ? -v : v;
  }
  return total > 0 ? std::optional<int>(total) : std::nullopt;
}

}  // namespace detail

inline std::optional<int> parse_counter(CounterKind kind, std::string_view token) {
  switch (kind) {
    case CounterKind::none: return std::nullopt;
    case CounterKind::arabic: {
      if (token.empty() || token.size() > 6) return std::nullopt;
      int v = 0;
      for (char c : token) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
      }
      return v > 0 ? std::optional<int>(v) : std::nullopt;
    }
    case CounterKind::chinese: return detail::parse_chinese_numeral(token);
    case CounterKind::roman: return detail::parse_roman(token);
    case CounterKind::letter:
      if (token.size() != 1) return std::nullopt;
      if (token[0] >= 'a' && token[0] <= 'z') return token[0] - 'a' + 1;
      if (token[0] >= 'A' && token[0] <= 'Z') return token[0] - 'A' + 1;
      return std::nullopt;
    case CounterKind::circled: {
      std::size_t i = 0;
      if (token.empty()) return std::nullopt;
      const char32_t cp = detail::next_code_point(token, i);
      if (cp >= 0x2460 && cp <= 0x2473) return static_cast<int>(cp - 0x2460) + 1;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

class PatternLibrary {
 public:
  PatternLibrary() = default;

  /// The 24 built-in numbering conventions, most specific first.
  static PatternLibrary builtin() {
    static const std::string cn = "((?:一|二|三|四|五|六|七|八|九|十|百|零|〇|两)+)";
    static const std::string lp = "(?:\\(|（)";
    static const std::string rp = "(?:\\)|）)";
    PatternLibrary lib;
    lib.add({"chapter_cn", "第" + cn + "章", CounterKind::chinese});
    lib.add({"section_cn", "第" + cn + "节", CounterKind::chinese});
    lib.add({"article_cn", "第" + cn + "条", CounterKind::chinese});
    lib.add({"cn_comma", cn + "、", CounterKind::chinese});
    lib.add({"cn_paren", lp + cn + rp, CounterKind::chinese});
    lib.add({"chapter_en", "(?:Chapter|CHAPTER)\\s+(\\d+)\\b", CounterKind::arabic});
    lib.add({"part_en", "(?:Part|PART)\\s+([IVX]+)\\b", CounterKind::roman});
    lib.add({"section_en", "(?:Section|SECTION)\\s+(\\d+)\\b", CounterKind::arabic});
    lib.add({"appendix_en", "(?:Appendix|APPENDIX)\\s+([A-Z])\\b", CounterKind::letter});
    lib.add({"arabic_dot4", "\\d+\\.\\d+\\.\\d+\\.(\\d+)(?!\\.?\\d)", CounterKind::arabic});
    lib.add({"arabic_dot3", "\\d+\\.\\d+\\.(\\d+)(?!\\.?\\d)", CounterKind::arabic});
    lib.add({"arabic_dot2", "\\d+\\.(\\d+)(?!\\.?\\d)", CounterKind::arabic});
    lib.add({"arabic_dot", "(\\d+)\\.(?!\\d)", CounterKind::arabic});
    lib.add({"arabic_comma", "(\\d+)、", CounterKind::arabic});
    lib.add({"arabic_paren", lp + "(\\d+)" + rp, CounterKind::arabic});
    lib.add({"arabic_rparen", "(\\d+)" + rp, CounterKind::arabic});
    lib.add({"circled", "(①|②|③|④|⑤|⑥|⑦|⑧|⑨|⑩|⑪|⑫|⑬|⑭|⑮|⑯|⑰|⑱|⑲|⑳)",
             CounterKind::circled});
    lib.add({"roman_upper_dot", "(?=[IVX])(X{0,3}(?:IX|IV|V?I{0,3}))\\.(?!\\w)",
             CounterKind::roman});
    lib.add({"roman_lower_paren", "\\((?=[ivx])(x{0,3}(?:ix|iv|v?i{0,3}))\\)",
             CounterKind::roman});
    lib.add({"letter_upper_dot", "([A-Z])\\.(?!\\w)", CounterKind::letter});
    lib.add({"letter_lower_paren", "\\(([a-z])\\)", CounterKind::letter});
    lib.add({"letter_lower_rparen", "([a-z])\\)", CounterKind::letter});
    lib.add({"bullet", "(?:•|●|○|■|◆|▪)", CounterKind::none});
    lib.add({"dash", "(?:-|–|—)\\s", CounterKind::none});
    return lib;
  }

  void add(PatternSpec spec) {
    try {
      compiled_.emplace_back(spec.regex, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      fail(ErrorCategory::validation, "pattern '" + spec.name + "': bad regex: " + e.what());
    }
    specs_.push_back(std::move(spec));
  }

  std::size_t size() const { return specs_.size(); }
  const std::vector<PatternSpec>& specs() const { return specs_; }

  /// Name of pattern `id` (1-based); "none" for 0.
  std::string name(int id) const {
    return id <= 0 || static_cast<std::size_t>(id) > specs_.size() ? "none" : specs_[static_cast<std::size_t>(id) - 1].name;
  }

  int id_of(std::string_view name) const {
    for (std::size_t i = 0; i < specs_.size(); ++i)
      if (specs_[i].name == name) return static_cast<int>(i) + 1;
    return 0;
  }

  PatternMatch match(std::string_view text) const {
    std::size_t start = 0;
    while (start < text.size()) {
      if (text[start] == ' ' || text[start] == '\t') {
        ++start;
      } else if (text.substr(start, 3) == "　") {
        start += 3;
      } else {
        break;
      }
    }
    // Item numbers sit at the very start; a bounded prefix keeps matching cheap.
    const std::string_view head = text.substr(start, 64);
    std::cmatch m;
    for (std::size_t i = 0; i < compiled_.size(); ++i) {
      if (!std::regex_search(head.data(), head.data() + head.size(), m, compiled_[i],
                             std::regex_constants::match_continuous))
        continue;
      PatternMatch out{static_cast<int>(i) + 1, std::nullopt};
      if (m.size() > 1 && m[1].matched)
        out.counter = parse_counter(specs_[i].counter,
                                    std::string_view(m[1].first, static_cast<std::size_t>(m[1].length())));
      return out;
    }
    return {};
  }

  PatternMatches match_all(const Document& doc) const {
    PatternMatches out;
    out.reserve(doc.objects.size());
    for (const auto& o : doc.objects) out.push_back(match(o.text));
    return out;
  }

  /// Stable fingerprint of the ordered pattern list; stored in model files.
  std::string hash() const {
    std::uint64_t h = fnv1a("held-patterns-v1");
    for (const auto& s : specs_) {
      h = fnv1a(s.name, h);
      h = fnv1a("\x1f", h);
      h = fnv1a(s.regex, h);
      h = fnv1a("\x1f", h);
      h = fnv1a(to_string(s.counter), h);
      h = fnv1a("\x1e", h);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  std::vector<PatternSpec> specs_;
  std::vector<std::regex> compiled_;
};

}  // namespace held
