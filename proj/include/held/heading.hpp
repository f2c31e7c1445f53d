// Heading / non-heading classification of physical objects, the first stage of
// two-step extraction. Only paragraph objects can be headings.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "held/document.hpp"
#include "held/features.hpp"
#include "held/logistic.hpp"
#include "held/patterns.hpp"

namespace held {

class HeadingClassifier {
 public:
  virtual ~HeadingClassifier() = default;
  virtual std::vector<bool> classify(const Document& doc) const = 0;
};

inline const std::vector<std::string>& heading_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"is_paragraph",  "has_pattern",  "counter_is_one",
                                  "bold",          "italic",       "centered",
                                  "size_vs_body",  "length_bucket", "ends_with_punct",
                                  "indent"};
    for (const char* side : {"prev", "next"})
      for (const char* f : {"exists", "bold", "size_vs_body", "has_pattern", "length_bucket"})
        n.push_back(std::string(side) + "_" + f);
    return n;
  }();
  return names;
}

namespace detail {

inline double body_font_size(const Document& doc) {
  std::vector<double> sizes;
  for (const auto& o : doc.objects)
    if (o.kind == ObjectKind::paragraph) sizes.push_back(o.format.font_size);
  if (sizes.empty()) return 10.0;
  std::nth_element(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(sizes.size() / 2), sizes.end());
  return sizes[sizes.size() / 2];
}

inline bool ends_with_sentence_punct(std::string_view t) {
  while (!t.empty() && (t.back() == ' ' || t.back() == '\n')) t.remove_suffix(1);
  if (t.empty()) return false;
  const char c = t.back();
  if (c == '.' || c == ';' || c == ':' || c == '!' || c == '?') return true;
  return t.ends_with("。") || t.ends_with("；") || t.ends_with("：");
}

}  // namespace detail

/// Feature rows for every object of `doc`: the object itself plus its two neighbours.
inline std::vector<FeatureVector> heading_features(const Document& doc, const PatternMatches& m) {
  const double body = detail::body_font_size(doc);
  auto size_vs_body = [&](const PhysicalObject& o) {
    return detail::clamp_unit(std::log(o.format.font_size / body), 0.5);
  };
  std::vector<FeatureVector> rows;
  rows.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& o = doc.objects[i];
    FeatureVector f;
    f.reserve(heading_feature_names().size());
    f.push_back(o.kind == ObjectKind::paragraph);
    f.push_back(m[i].matched());
    f.push_back(m[i].counter && *m[i].counter == 1);
    f.push_back(o.format.bold);
    f.push_back(o.format.italic);
    f.push_back(o.format.centered);
    f.push_back(size_vs_body(o));
    f.push_back(detail::length_bucket(o.text));
    f.push_back(detail::ends_with_sentence_punct(o.text));
    f.push_back(detail::clamp_unit(o.format.indent, 8.0));
    for (int delta : {-1, 1}) {
      const auto j = static_cast<std::ptrdiff_t>(i) + delta;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(doc.size())) {
        f.insert(f.end(), 5, 0.0);
        continue;
      }
      const auto& n = doc.objects[static_cast<std::size_t>(j)];
      f.push_back(1.0);
      f.push_back(n.format.bold);
      f.push_back(size_vs_body(n));
      f.push_back(m[static_cast<std::size_t>(j)].matched());
      f.push_back(detail::length_bucket(n.text));
    }
    rows.push_back(std::move(f));
  }
  return rows;
}

/// Numbered and emphasised, or short, bold and larger than body text.
class RuleHeadingClassifier final : public HeadingClassifier {
 public:
  explicit RuleHeadingClassifier(std::shared_ptr<const PatternLibrary> patterns)
      : patterns_(std::move(patterns)) {}

  std::vector<bool> classify(const Document& doc) const override {
    const double body = detail::body_font_size(doc);
    std::vector<bool> out(doc.size(), false);
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& o = doc.objects[i];
      if (o.kind != ObjectKind::paragraph) continue;
      const bool larger = o.format.font_size > body;
      const bool numbered = patterns_->match(o.text).matched();
      const bool short_text = detail::code_point_count(o.text) <= 80;
      out[i] = (numbered && (o.format.bold || larger)) || (short_text && o.format.bold && larger);
    }
    return out;
  }

 private:
  std::shared_ptr<const PatternLibrary> patterns_;
};

class LogisticHeadingClassifier final : public HeadingClassifier {
 public:
  LogisticHeadingClassifier(LogisticModel model, std::shared_ptr<const PatternLibrary> patterns)
      : model_(std::move(model)), patterns_(std::move(patterns)) {
    if (model_.weights().size() != heading_feature_names().size())
      fail(ErrorCategory::model, "heading classifier: weight count does not match features");
  }

  std::vector<bool> classify(const Document& doc) const override {
    const auto rows = heading_features(doc, patterns_->match_all(doc));
    std::vector<bool> out(doc.size(), false);
    for (std::size_t i = 0; i < doc.size(); ++i)
      out[i] = doc.objects[i].kind == ObjectKind::paragraph && model_.probability(rows[i]) > 0.5;
    return out;
  }

  const LogisticModel& model() const { return model_; }

 private:
  LogisticModel model_;
  std::shared_ptr<const PatternLibrary> patterns_;
};

inline LogisticHeadingClassifier train_heading_classifier(
    const std::vector<const Document*>& docs, const std::vector<std::vector<bool>>& flags,
    std::shared_ptr<const PatternLibrary> patterns, const LogisticConfig& cfg = {}) {
  Dataset data(heading_feature_names().size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto rows = heading_features(*docs[d], patterns->match_all(*docs[d]));
    for (std::size_t i = 0; i < rows.size(); ++i) data.add(rows[i], flags[d][i]);
  }
  return LogisticHeadingClassifier(LogisticModel::train(data, cfg), std::move(patterns));
}

/// Flips each decision of `base` with probability `flip_rate`, seeded per document.
class NoisyHeadingClassifier final : public HeadingClassifier {
 public:
  NoisyHeadingClassifier(std::shared_ptr<const HeadingClassifier> base, double flip_rate,
                         std::uint64_t seed)
      : base_(std::move(base)), flip_rate_(flip_rate), seed_(seed) {}

  std::vector<bool> classify(const Document& doc) const override {
    auto flags = base_->classify(doc);
    Rng rng(derive_seed(seed_, fnv1a(doc.doc_id)));
    for (std::size_t i = 0; i < flags.size(); ++i)
      if (rng.bernoulli(flip_rate_) && doc.objects[i].kind == ObjectKind::paragraph)
        flags[i] = !flags[i];
    return flags;
  }

 private:
  std::shared_ptr<const HeadingClassifier> base_;
  double flip_rate_;
  std::uint64_t seed_;
};

/// Precision/recall/F1 of predicted heading flags against gold flags.
struct HeadingScore {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

inline HeadingScore score_headings(const std::vector<std::vector<bool>>& pred,
                                   const std::vector<std::vector<bool>>& gold) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t d = 0; d < pred.size(); ++d)
    for (std::size_t i = 0; i < pred[d].size(); ++i) {
      tp += pred[d][i] && gold[d][i];
      fp += pred[d][i] && !gold[d][i];
      fn += !pred[d][i] && gold[d][i];
    }
  HeadingScore s;
  s.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace held
