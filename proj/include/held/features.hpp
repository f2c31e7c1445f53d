// Fixed-length feature vectors for put-or-skip contexts.
//
// Three groups: format agreement between the candidate and the siblings it
// would join, format prominence of the would-be parent over the candidate, and
// item-number continuity (same pattern, counter +1, counter restart). A few
// conjunctions give a linear model access to the combinations that matter.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "held/patterns.hpp"
#include "held/scorer.hpp"

namespace held {

using FeatureVector = std::vector<double>;

inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      "sib_present",
      "sib_font_size_eq",
      "sib_font_family_eq",
      "sib_font_color_eq",
      "sib_bold_eq",
      "sib_italic_eq",
      "sib_centered_eq",
      "sib_indent_delta",
      "sib_kind_eq",
      "sib_window_format_agree",
      "sib_font_size_log_ratio",
      "parent_is_root",
      "parent_font_size_log_ratio",
      "parent_bold_over_nonbold",
      "parent_indent_delta",
      "parent_format_eq",
      "parent_more_prominent",
      "cand_pattern_id",
      "cand_has_pattern",
      "continues_sibling_counter",
      "restarts_counter",
      "same_pattern_as_sibling",
      "same_pattern_as_parent",
      "sibling_has_pattern",
      "position_depth",
      "is_deepest_position",
      "text_length_bucket",
      "kind_paragraph",
      "kind_table",
      "kind_figure",
      "kind_chart",
      "continues_and_format_agree",
      "same_pattern_and_format_agree",
      "restart_and_no_siblings",
      "restart_and_parent_prominent",
      "no_siblings_and_parent_prominent",
      "cand_pattern_and_sib_plain",
  };
  return names;
}

inline std::size_t feature_count() { return feature_names().size(); }

namespace detail {

inline std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

inline double length_bucket(std::string_view text) {
  const auto n = code_point_count(text);
  const int b = n == 0 ? 0 : n <= 10 ? 1 : n <= 30 ? 2 : n <= 80 ? 3 : n <= 200 ? 4 : 5;
  return b / 5.0;
}

inline bool same_format(const FormatAttrs& a, const FormatAttrs& b) {
  return a.font_family_id == b.font_family_id && a.font_size == b.font_size &&
         a.font_color_id == b.font_color_id && a.bold == b.bold && a.italic == b.italic &&
         a.centered == b.centered && a.indent == b.indent;
}

inline double clamp_unit(double x, double scale) {
  return std::max(-1.0, std::min(1.0, x / scale));
}

/// Parent renders more prominently than the candidate: larger font, or equal
/// font with bold over non-bold.
inline bool more_prominent(const FormatAttrs& parent, const FormatAttrs& cand) {
  if (parent.font_size > cand.font_size) return true;
  return parent.font_size == cand.font_size && parent.bold && !cand.bold;
}

}  // namespace detail

inline FeatureVector extract_features(const ScoreContext& ctx, const PatternLibrary& patterns) {
  const PhysicalObject& c = *ctx.candidate;
  auto pattern_of = [&](const PhysicalObject& o) {
    return ctx.patterns ? (*ctx.patterns)[static_cast<std::size_t>(o.id)] : patterns.match(o.text);
  };

  FeatureVector f(feature_count(), 0.0);
  std::size_t k = 0;
  auto put = [&](double v) { f[k++] = std::isfinite(v) ? v : 0.0; };

  const PatternMatch cp = pattern_of(c);
  const PhysicalObject* last = ctx.siblings.empty() ? nullptr : ctx.siblings.back();
  const PatternMatch sp = last ? pattern_of(*last) : PatternMatch{};
  const PatternMatch pp = ctx.parent ? pattern_of(*ctx.parent) : PatternMatch{};

  // Candidate vs. siblings.
  bool format_agree = false;
  if (last) {
    const FormatAttrs& a = c.format;
    const FormatAttrs& b = last->format;
    format_agree = detail::same_format(a, b);
    int agreeing = 0;
    for (const auto* s : ctx.siblings) agreeing += detail::same_format(a, s->format);
    put(1.0);
    put(a.font_size == b.font_size);
    put(a.font_family_id == b.font_family_id);
    put(a.font_color_id == b.font_color_id);
    put(a.bold == b.bold);
    put(a.italic == b.italic);
    put(a.centered == b.centered);
    put(detail::clamp_unit(std::abs(a.indent - b.indent), 8.0));
    put(c.kind == last->kind);
    put(static_cast<double>(agreeing) / static_cast<double>(ctx.siblings.size()));
    put(detail::clamp_unit(std::log(a.font_size / b.font_size), 0.5));
  } else {
    k += 11;
  }

  // Candidate vs. parent.
  const bool parent_prominent = ctx.parent && detail::more_prominent(ctx.parent->format, c.format);
  if (ctx.parent) {
    const FormatAttrs& p = ctx.parent->format;
    put(0.0);
    put(detail::clamp_unit(std::log(p.font_size / c.format.font_size), 0.5));
    put(p.bold && !c.format.bold);
    put(detail::clamp_unit(c.format.indent - p.indent, 8.0));
    put(detail::same_format(p, c.format));
    put(parent_prominent);
  } else {
    put(1.0);
    k += 5;
  }

  // Item numbering.
  const bool continues = cp.matched() && cp.pattern_id == sp.pattern_id && cp.counter &&
                         sp.counter && *cp.counter == *sp.counter + 1;
  const bool restarts = cp.matched() && cp.counter && *cp.counter == 1;
  const bool same_as_sibling = cp.matched() && cp.pattern_id == sp.pattern_id;
  put(patterns.size() ? static_cast<double>(cp.pattern_id) / static_cast<double>(patterns.size()) : 0.0);
  put(cp.matched());
  put(continues);
  put(restarts);
  put(same_as_sibling);
  put(cp.matched() && cp.pattern_id == pp.pattern_id);
  put(sp.matched());

  // Position.
  put(ctx.position_depth / 10.0);
  put(!ctx.branch.empty() && static_cast<std::size_t>(ctx.position_depth) + 1 == ctx.branch.size());
  put(detail::length_bucket(c.text));
  put(c.kind == ObjectKind::paragraph);
  put(c.kind == ObjectKind::table);
  put(c.kind == ObjectKind::figure);
  put(c.kind == ObjectKind::chart);

  // Conjunctions.
  put(continues && format_agree);
  put(same_as_sibling && format_agree);
  put(restarts && last == nullptr);
  put(restarts && parent_prominent);
  put(last == nullptr && parent_prominent);
  put(cp.matched() && last && !sp.matched());
  assert(k == f.size());
  return f;
}

}  // namespace held
