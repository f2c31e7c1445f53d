// Synthetic annotated documents: physical objects with numbering and format
// cues, gold hierarchies, heading flags, and retrieval queries with relevance
// labels. Every document is generated from its own derived seed, so corpora are
// reproducible and documents can be generated independently.
#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "held/core.hpp"
#include "held/document.hpp"
#include "held/patterns.hpp"
#include "held/retrieval.hpp"
#include "held/tree.hpp"

namespace held {

struct CorpusConfig {
  int n_docs = 100;
  int min_objects = 300;
  int max_objects = 800;
  int max_depth = 8;
  double heading_ratio = 0.25;
  /// Mean number of sibling headings per level (index 0 = level 1); closing a
  /// section at level l happens with probability 1 / width.
  std::vector<double> level_widths = {8, 4, 3, 3, 2.5, 2.5, 2, 2, 2, 2, 2};
  double descend_prob = 0.35;          // a new heading opens a subsection of the current one
  double ambiguity_prob = 0.25;        // per document: one numbering pattern used at two depths
  double unnumbered_level_prob = 0.08; // per level >= 3: headings carry no item number
  double format_noise = 0.03;          // per heading: font size or weight perturbed
  double list_item_rate = 0.02;        // bulleted body paragraphs
  double non_text_rate = 0.06;         // tables, figures and charts among leaves
  std::uint64_t seed = 42;
};

inline void validate(const CorpusConfig& c) {
  auto bad = [](const std::string& what) { fail(ErrorCategory::validation, "corpus config: " + what); };
  if (c.n_docs < 1) bad("n_docs must be >= 1");
  if (c.min_objects < 2) bad("min_objects must be >= 2");
  if (c.max_objects < c.min_objects) bad("max_objects must be >= min_objects");
  if (c.max_depth < 1 || c.max_depth > 11) bad("max_depth must be in 1..11");
  if (!(c.heading_ratio > 0.0 && c.heading_ratio < 0.9)) bad("heading_ratio must be in (0, 0.9)");
  if (c.level_widths.empty()) bad("level_widths must not be empty");
  if (c.level_widths.size() > 11) bad("level_widths has more than 11 levels");
  if (static_cast<int>(c.level_widths.size()) > c.max_depth &&
      c.level_widths.size() != CorpusConfig{}.level_widths.size())
    bad("level_widths describes " + std::to_string(c.level_widths.size()) +
        " levels but max_depth is " + std::to_string(c.max_depth));
  for (double w : c.level_widths)
    if (!(w >= 1.0)) bad("level widths must be >= 1");
  for (double p : {c.descend_prob, c.ambiguity_prob, c.unnumbered_level_prob, c.format_noise,
                   c.list_item_rate, c.non_text_rate})
    if (!(p >= 0.0 && p <= 1.0)) bad("probabilities must be in [0, 1]");
  if (c.max_depth == 1 && c.descend_prob > 0.0 && c.level_widths.size() > 1 &&
      c.level_widths.size() != CorpusConfig{}.level_widths.size())
    bad("max_depth 1 cannot realise a multi-level width specification");
}

struct AnnotatedDocument {
  Document doc;
  HierarchyTree gold;
  std::vector<std::vector<std::string>> keywords;  // topic keywords of heading objects
  std::vector<int> level_patterns;                 // pattern id used at each heading level (index 0 = level 1)
  bool ambiguous = false;                          // a pattern is shared by two levels

  std::vector<bool> heading_flags() const {
    std::vector<bool> f(gold.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = !gold.is_leaf(static_cast<NodeId>(i));
    return f;
  }
};

namespace synth_detail {

inline std::string pseudo_word(Rng& rng) {
  static const char* onsets[] = {"b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p",
                                 "r", "s", "t", "v", "z", "br", "st", "tr", "pl", "gr", "sh"};
  static const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ea", "ou"};
  std::string w;
  const int syllables = rng.uniform_int(2, 3);
  for (int s = 0; s < syllables; ++s) {
    w += onsets[rng.uniform_int(0, 21)];
    w += vowels[rng.uniform_int(0, 7)];
  }
  if (rng.bernoulli(0.4)) w += "n";
  return w;
}

struct Vocabulary {
  std::vector<std::string> filler;
  std::vector<std::string> topics;
};

/// Fixed across corpora so that word identity does not depend on the corpus seed.
inline const Vocabulary& vocabulary() {
  static const Vocabulary v = [] {
    Vocabulary voc;
    Rng rng(0x5eed5eedULL);
    std::set<std::string> used;
    auto fresh = [&] {
      for (;;) {
        auto w = pseudo_word(rng);
        if (used.insert(w).second) return w;
      }
    };
    for (int i = 0; i < 600; ++i) voc.filler.push_back(fresh());
    for (int i = 0; i < 5000; ++i) voc.topics.push_back(fresh());
    return voc;
  }();
  return v;
}

inline std::string chinese_numeral(int n) {
  static const char* digits[] = {"零", "一", "二", "三", "四", "五", "六", "七", "八", "九"};
  if (n < 10) return digits[n];
  if (n < 20) return std::string("十") + (n % 10 ? digits[n % 10] : "");
  if (n < 100) return std::string(digits[n / 10]) + "十" + (n % 10 ? digits[n % 10] : "");
  std::string s = std::string(digits[n / 100]) + "百";
  const int rest = n % 100;
  if (rest == 0) return s;
  if (rest < 10) return s + "零" + digits[rest];
  return s + digits[rest / 10] + "十" + (rest % 10 ? digits[rest % 10] : "");
}

inline std::string roman(int n, bool upper) {
  static const std::pair<int, const char*> table[] = {
      {100, "c"}, {90, "xc"}, {50, "l"}, {40, "xl"}, {10, "x"}, {9, "ix"}, {5, "v"}, {4, "iv"}, {1, "i"}};
  std::string s;
  for (const auto& [v, sym] : table)
    while (n >= v) {
      s += sym;
      n -= v;
    }
  if (upper)
    for (auto& c : s) c = static_cast<char>(c - 'a' + 'A');
  return s;
}

inline std::string circled(int n) {
  // U+2460 + (n - 1), encoded as UTF-8.
  const char32_t cp = 0x2460 + static_cast<char32_t>(n - 1);
  std::string s;
  s += static_cast<char>(0xE0 | (cp >> 12));
  s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
  s += static_cast<char>(0x80 | (cp & 0x3F));
  return s;
}

/// Item-number prefix for the built-in pattern `name`. `counters` holds the
/// counters of the heading path, outermost first; the last one is the item's own.
inline std::string format_item_number(const std::string& name, const std::vector<int>& counters) {
  const int n = counters.back();
  auto tail = [&](std::size_t k) {
    std::string s;
    const std::size_t from = counters.size() >= k ? counters.size() - k : 0;
    for (std::size_t i = from; i < counters.size(); ++i) {
      if (i > from) s += ".";
      s += std::to_string(std::max(1, counters[i]));
    }
    return s;
  };
  if (name == "chapter_cn") return "第" + chinese_numeral(n) + "章 ";
  if (name == "section_cn") return "第" + chinese_numeral(n) + "节 ";
  if (name == "article_cn") return "第" + chinese_numeral(n) + "条 ";
  if (name == "cn_comma") return chinese_numeral(n) + "、";
  if (name == "cn_paren") return "（" + chinese_numeral(n) + "）";
  if (name == "chapter_en") return "Chapter " + std::to_string(n) + " ";
  if (name == "part_en") return "Part " + roman(n, true) + " ";
  if (name == "section_en") return "Section " + std::to_string(n) + " ";
  if (name == "arabic_dot4") return tail(4) + " ";
  if (name == "arabic_dot3") return tail(3) + " ";
  if (name == "arabic_dot2") return tail(2) + " ";
  if (name == "arabic_dot") return std::to_string(n) + ". ";
  if (name == "arabic_comma") return std::to_string(n) + "、";
  if (name == "arabic_paren") return "(" + std::to_string(n) + ") ";
  if (name == "arabic_rparen") return std::to_string(n) + ") ";
  if (name == "circled") return circled(std::min(n, 20)) + " ";
  if (name == "roman_upper_dot") return roman(n, true) + ". ";
  if (name == "roman_lower_paren") return "(" + roman(n, false) + ") ";
  if (name == "letter_upper_dot") return std::string(1, static_cast<char>('A' + (n - 1) % 26)) + ". ";
  if (name == "letter_lower_paren") return "(" + std::string(1, static_cast<char>('a' + (n - 1) % 26)) + ") ";
  if (name == "letter_lower_rparen") return std::string(1, static_cast<char>('a' + (n - 1) % 26)) + ") ";
  if (name == "bullet") return "• ";
  return "";
}

// Patterns suited to wide top levels (unbounded counters) and to the rest.
inline const std::vector<std::string>& top_level_patterns() {
  static const std::vector<std::string> v = {"chapter_cn", "section_cn", "cn_comma", "chapter_en",
                                             "section_en", "arabic_dot", "part_en", "article_cn"};
  return v;
}
inline const std::vector<std::string>& inner_patterns() {
  static const std::vector<std::string> v = {
      "cn_comma",     "cn_paren",        "arabic_dot",        "arabic_comma",
      "arabic_paren", "arabic_rparen",   "circled",           "roman_upper_dot",
      "roman_lower_paren", "letter_upper_dot", "letter_lower_paren", "letter_lower_rparen",
      "section_cn",   "article_cn"};
  return v;
}

struct LevelStyle {
  FormatAttrs format;
  std::string pattern;  // empty: unnumbered
};

}  // namespace synth_detail

/// Generates document `index` of the corpus described by `cfg`.
inline AnnotatedDocument generate_document(const CorpusConfig& cfg, int index) {
  using namespace synth_detail;
  const auto& voc = vocabulary();
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(index)));
  const PatternLibrary lib = PatternLibrary::builtin();
  // Leaves sit one level below the deepest heading.
  const int depth_cap = cfg.max_depth - 1;

  AnnotatedDocument out;
  char idbuf[32];
  std::snprintf(idbuf, sizeof idbuf, "doc%04d", index);
  out.doc.doc_id = idbuf;

  // Per-level heading styles.
  std::vector<LevelStyle> levels(static_cast<std::size_t>(depth_cap));
  const double base = std::vector<double>{16, 18, 20}[static_cast<std::size_t>(rng.uniform_int(0, 2))];
  const double step = std::vector<double>{1.0, 1.5, 2.0}[static_cast<std::size_t>(rng.uniform_int(0, 2))];
  const int bold_levels = rng.uniform_int(3, 6);
  const double indent_step = rng.uniform_int(0, 2);
  const int heading_family = rng.bernoulli(0.5) ? 2 : 1;
  for (int l = 1; l <= depth_cap; ++l) {
    auto& f = levels[static_cast<std::size_t>(l - 1)].format;
    f.font_family_id = heading_family;
    f.font_size = std::max(11.0, base - step * (l - 1));
    f.bold = l <= bold_levels;
    f.italic = !f.bold && (l - bold_levels) % 2 == 1;
    f.centered = l == 1 && base >= 18;
    f.indent = indent_step * (l - 1);
    f.font_color_id = l == 1 ? 1 : 0;
  }
  FormatAttrs body;
  body.font_family_id = 1;
  body.font_size = 10.5;
  body.indent = rng.bernoulli(0.5) ? 2.0 : 0.0;

  // Numbering patterns per level.
  if (depth_cap > 0) {
    std::vector<std::string> inner = inner_patterns();
    rng.shuffle(inner);
    std::size_t next_inner = 0;
    auto take_inner = [&](const std::string& avoid) {
      while (next_inner < inner.size() && inner[next_inner] == avoid) ++next_inner;
      return next_inner < inner.size() ? inner[next_inner++] : std::string("bullet");
    };
    const bool dotted_chain = rng.bernoulli(0.4);
    const auto& top = top_level_patterns();
    levels[0].pattern = dotted_chain ? "arabic_dot" : top[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(top.size()) - 1))];
    for (int l = 2; l <= depth_cap; ++l) {
      auto& p = levels[static_cast<std::size_t>(l - 1)].pattern;
      if (dotted_chain && l <= 4) {
        p = l == 2 ? "arabic_dot2" : l == 3 ? "arabic_dot3" : "arabic_dot4";
      } else if (l >= 3 && rng.bernoulli(cfg.unnumbered_level_prob)) {
        p.clear();
      } else {
        p = take_inner(levels[0].pattern);
      }
    }
    if (depth_cap >= 3 && rng.bernoulli(cfg.ambiguity_prob)) {
      // Reuse an inner pattern two or more levels apart.
      std::vector<int> single;
      for (int l = 2; l <= depth_cap; ++l) {
        const auto& p = levels[static_cast<std::size_t>(l - 1)].pattern;
        if (!p.empty() && p.rfind("arabic_dot", 0) != 0) single.push_back(l);
      }
      if (!single.empty()) {
        const int src = single[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(single.size()) - 1))];
        std::vector<int> targets;
        for (int l = 2; l <= depth_cap; ++l)
          if (std::abs(l - src) >= 2) targets.push_back(l);
        if (!targets.empty()) {
          const int dst = targets[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(targets.size()) - 1))];
          const bool dst_in_chain = dotted_chain && dst <= 4;
          if (!dst_in_chain) levels[static_cast<std::size_t>(dst - 1)].pattern = levels[static_cast<std::size_t>(src - 1)].pattern;
        }
      }
    }
    for (const auto& lv : levels) out.level_patterns.push_back(lv.pattern.empty() ? 0 : lib.id_of(lv.pattern));
  }

  const int n_target = rng.uniform_int(cfg.min_objects, cfg.max_objects);
  std::vector<NodeId> parents;
  std::vector<NodeId> stack;  // heading path; stack[l - 1] is the open heading at level l
  std::vector<int> counters(static_cast<std::size_t>(depth_cap) + 1, 0);
  std::vector<std::vector<std::string>> keywords;
  std::vector<int> heading_level;
  int headings = 0;

  auto topic_words = [&] {
    std::vector<std::string> kw;
    while (kw.size() < 2) {
      const auto& w = voc.topics[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(voc.topics.size()) - 1))];
      if (std::find(kw.begin(), kw.end(), w) == kw.end()) kw.push_back(w);
    }
    return kw;
  };
  auto filler = [&] {
    const double u = rng.uniform();
    return voc.filler[static_cast<std::size_t>(u * u * static_cast<double>(voc.filler.size()))];
  };
  auto add_object = [&](PhysicalObject o, NodeId parent) {
    o.id = static_cast<NodeId>(out.doc.objects.size());
    out.doc.objects.push_back(std::move(o));
    parents.push_back(parent);
  };

  auto emit_heading = [&](int level) {
    stack.resize(static_cast<std::size_t>(level - 1));
    const NodeId parent = stack.empty() ? kRootId : stack.back();
    ++counters[static_cast<std::size_t>(level)];
    for (std::size_t l = static_cast<std::size_t>(level) + 1; l < counters.size(); ++l) counters[l] = 0;
    const LevelStyle& st = levels[static_cast<std::size_t>(level - 1)];
    std::vector<int> path(counters.begin() + 1, counters.begin() + level + 1);
    auto kw = topic_words();
    std::string text = st.pattern.empty() ? "" : format_item_number(st.pattern, path);
    text += kw[0] + " " + kw[1];
    for (int k = rng.uniform_int(0, 2); k > 0; --k) text += " " + filler();
    PhysicalObject o{0, ObjectKind::paragraph, text, st.format, true};
    if (rng.bernoulli(cfg.format_noise)) {
      if (rng.bernoulli(0.5)) {
        o.format.font_size += rng.bernoulli(0.5) ? 1.0 : -1.0;
      } else {
        o.format.bold = !o.format.bold;
      }
    }
    const NodeId id = static_cast<NodeId>(out.doc.objects.size());
    add_object(std::move(o), parent);
    keywords.resize(out.doc.objects.size());
    keywords.back() = std::move(kw);
    heading_level.resize(out.doc.objects.size(), 0);
    heading_level.back() = level;
    stack.push_back(id);
    ++headings;
  };

  auto emit_leaf = [&] {
    const NodeId parent = stack.empty() ? kRootId : stack.back();
    // Words from the enclosing section's topic, its ancestors' topics, a few
    // distractors from elsewhere in the document, and filler.
    auto section_word = [&]() -> std::string {
      const double r = rng.uniform();
      if (!stack.empty()) {
        if (r < 0.03) {
          const auto& kw = keywords[static_cast<std::size_t>(stack.back())];
          return kw[static_cast<std::size_t>(rng.uniform_int(0, 1))];
        }
        if (r < 0.04 && stack.size() > 1) {
          const auto a = stack[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(stack.size()) - 2))];
          return keywords[static_cast<std::size_t>(a)][static_cast<std::size_t>(rng.uniform_int(0, 1))];
        }
      }
      if (r < 0.05 && headings > 0) {
        std::vector<NodeId> hs;
        for (std::size_t i = 0; i < keywords.size(); ++i)
          if (!keywords[i].empty()) hs.push_back(static_cast<NodeId>(i));
        const auto h = hs[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(hs.size()) - 1))];
        return keywords[static_cast<std::size_t>(h)][static_cast<std::size_t>(rng.uniform_int(0, 1))];
      }
      return filler();
    };
    PhysicalObject o{0, ObjectKind::paragraph, "", body, false};
    if (rng.bernoulli(cfg.non_text_rate)) {
      const int k = rng.uniform_int(0, 2);
      o.kind = k == 0 ? ObjectKind::table : k == 1 ? ObjectKind::figure : ObjectKind::chart;
      o.format.font_size = 9.0;
      o.format.indent = 0.0;
      if (o.kind == ObjectKind::table) {
        for (int w = rng.uniform_int(6, 20); w > 0; --w) o.text += (o.text.empty() ? "" : " ") + section_word();
      } else if (rng.bernoulli(0.5)) {
        o.text = std::string(o.kind == ObjectKind::figure ? "Figure " : "Chart ") +
                 std::to_string(rng.uniform_int(1, 40)) + " " + section_word() + " " + section_word();
      }
    } else {
      if (rng.bernoulli(cfg.list_item_rate)) o.text = "• ";
      const int len = rng.uniform_int(12, 50);
      for (int w = 0; w < len; ++w) {
        auto word = section_word();
        if (w == 0 && o.text.empty()) word[0] = static_cast<char>(word[0] - 'a' + 'A');
        o.text += (w == 0 ? "" : " ") + word;
      }
      o.text += ".";
    }
    add_object(std::move(o), parent);
    keywords.resize(out.doc.objects.size());
    heading_level.resize(out.doc.objects.size(), 0);
  };

  auto width = [&](int level) {
    const auto& w = cfg.level_widths;
    return w[std::min(static_cast<std::size_t>(level - 1), w.size() - 1)];
  };

  for (int k = rng.uniform_int(0, 2); k > 0; --k) emit_leaf();
  bool must_child = false;
  while (static_cast<int>(out.doc.objects.size()) < n_target) {
    const int remaining = n_target - static_cast<int>(out.doc.objects.size());
    const int depth = static_cast<int>(stack.size());
    if (must_child) {
      must_child = false;
      if (depth < depth_cap && remaining >= 3 && rng.bernoulli(cfg.descend_prob)) {
        emit_heading(depth + 1);
        must_child = true;
      } else {
        emit_leaf();
      }
      continue;
    }
    const double ratio = static_cast<double>(headings) / static_cast<double>(std::max<std::size_t>(1, out.doc.objects.size()));
    const double p_heading = std::clamp(cfg.heading_ratio + 2.0 * (cfg.heading_ratio - ratio), 0.02, 0.9);
    if (depth_cap > 0 && remaining >= 2 && (depth == 0 || rng.bernoulli(p_heading))) {
      int level = depth + 1;
      if (depth == 0 || depth >= depth_cap || !rng.bernoulli(cfg.descend_prob)) {
        level = std::max(1, depth);
        while (level > 1 && rng.bernoulli(1.0 / width(level))) --level;
      }
      emit_heading(level);
      must_child = true;
    } else {
      emit_leaf();
    }
  }
  if (must_child) emit_leaf();

  out.gold = HierarchyTree::from_parents(parents);
  out.keywords = std::move(keywords);
  // Audit the ambiguity actually realised: one pattern at two populated depths.
  std::set<std::pair<int, int>> seen;  // (pattern id, level)
  for (std::size_t i = 0; i < heading_level.size(); ++i)
    if (heading_level[i] > 0) {
      const int pid = out.level_patterns[static_cast<std::size_t>(heading_level[i] - 1)];
      if (pid) seen.insert({pid, heading_level[i]});
    }
  for (auto it = seen.begin(); it != seen.end(); ++it) {
    auto nx = std::next(it);
    if (nx != seen.end() && nx->first == it->first) out.ambiguous = true;
  }
  return out;
}

inline std::vector<AnnotatedDocument> generate(const CorpusConfig& cfg) {
  validate(cfg);
  std::vector<AnnotatedDocument> docs;
  docs.reserve(static_cast<std::size_t>(cfg.n_docs));
  for (int i = 0; i < cfg.n_docs; ++i) docs.push_back(generate_document(cfg, i));
  return docs;
}

struct RelevanceLabel {
  std::string query_id;
  std::string doc_id;
  NodeId passage_id = 0;
};

struct RetrievalLabels {
  std::vector<Query> queries;
  std::vector<RelevanceLabel> qrels;
};

/// Each query takes one or both topic keywords of a heading; its relevant
/// passages are the content leaves below that heading.
inline RetrievalLabels generate_retrieval_labels(const std::vector<AnnotatedDocument>& corpus,
                                                 int n_queries, std::uint64_t seed) {
  if (corpus.empty()) fail(ErrorCategory::validation, "retrieval labels need a non-empty corpus");
  RetrievalLabels out;
  Rng rng(derive_seed(seed, 0x9e7));
  for (int q = 0; q < n_queries; ++q) {
    const auto& ad = corpus[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(corpus.size()) - 1))];
    const auto& tree = ad.gold;
    // Leaves below each heading, counted bottom-up.
    std::vector<int> leaves(tree.size(), 0);
    for (std::size_t i = tree.size(); i-- > 0;) {
      const NodeId id = static_cast<NodeId>(i);
      if (tree.is_leaf(id)) leaves[i] = 1;
      const NodeId p = tree.parent(id);
      if (p != kRootId) leaves[static_cast<std::size_t>(p)] += leaves[i];
    }
    std::vector<NodeId> candidates, fallback;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (tree.is_leaf(static_cast<NodeId>(i)) || ad.keywords[i].empty()) continue;
      fallback.push_back(static_cast<NodeId>(i));
      if (leaves[i] >= 2 && leaves[i] <= 60) candidates.push_back(static_cast<NodeId>(i));
    }
    const auto& pool = candidates.empty() ? fallback : candidates;
    if (pool.empty()) continue;
    const NodeId h = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
    char qid[32];
    std::snprintf(qid, sizeof qid, "q%04d", q);
    Query query{qid, ad.doc.doc_id, ad.keywords[static_cast<std::size_t>(h)]};
    if (rng.bernoulli(0.3)) query.terms.erase(query.terms.begin() + rng.uniform_int(0, 1));
    // Descendants of h are the contiguous id range after it in pre-order.
    const int depth_h = tree.depth(h);
    for (std::size_t i = static_cast<std::size_t>(h) + 1;
         i < tree.size() && tree.depth(static_cast<NodeId>(i)) > depth_h; ++i)
      if (tree.is_leaf(static_cast<NodeId>(i)))
        out.qrels.push_back({query.query_id, ad.doc.doc_id, static_cast<NodeId>(i)});
    out.queries.push_back(std::move(query));
  }
  return out;
}

}  // namespace held
