#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "held/core.hpp"

namespace held {

enum class ObjectKind { paragraph, table, figure, chart };

inline const char* to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::paragraph: return "paragraph";
    case ObjectKind::table: return "table";
    case ObjectKind::figure: return "figure";
    case ObjectKind::chart: return "chart";
  }
  return "paragraph";
}

inline std::optional<ObjectKind> parse_object_kind(std::string_view s) {
  if (s == "paragraph") return ObjectKind::paragraph;
  if (s == "table") return ObjectKind::table;
  if (s == "figure") return ObjectKind::figure;
  if (s == "chart") return ObjectKind::chart;
  return std::nullopt;
}

struct FormatAttrs {
  int font_family_id = 0;
  double font_size = 10.5;  // points
  int font_color_id = 0;
  bool bold = false;
  bool italic = false;
  bool centered = false;
  double indent = 0.0;  // leading whitespace units

  friend bool operator==(const FormatAttrs&, const FormatAttrs&) = default;
};

/// One reading-order unit of a document.
struct PhysicalObject {
  NodeId id = 0;
  ObjectKind kind = ObjectKind::paragraph;
  std::string text;
  FormatAttrs format;
  std::optional<bool> is_heading;

  friend bool operator==(const PhysicalObject&, const PhysicalObject&) = default;
};

struct Document {
  std::string doc_id;
  std::vector<PhysicalObject> objects;

  std::size_t size() const { return objects.size(); }
  const PhysicalObject& operator[](NodeId id) const { return objects[static_cast<std::size_t>(id)]; }

  /// Heading flags taken from the objects' annotations; nullopt if any is missing.
  std::optional<std::vector<bool>> heading_flags() const {
    std::vector<bool> flags;
    flags.reserve(objects.size());
    for (const auto& o : objects) {
      if (!o.is_heading) return std::nullopt;
      flags.push_back(*o.is_heading);
    }
    return flags;
  }
};

/// Checks the ingestion invariants; throws a validation Error naming the offender.
inline void validate(const Document& doc) {
  if (doc.objects.empty())
    fail(ErrorCategory::validation, "document '" + doc.doc_id + "' has no objects");
  for (std::size_t i = 0; i < doc.objects.size(); ++i) {
    const auto& o = doc.objects[i];
    const std::string where = "document '" + doc.doc_id + "' object " + std::to_string(i);
    if (o.id != static_cast<NodeId>(i))
      fail(ErrorCategory::validation, where + ": id " + std::to_string(o.id) +
                                          " breaks the 0..N-1 reading order");
    if (o.kind == ObjectKind::paragraph && o.text.empty())
      fail(ErrorCategory::validation, where + ": paragraph with empty text");
    if (!(o.format.font_size > 0.0))
      fail(ErrorCategory::validation, where + ": font_size must be positive");
    if (!(o.format.indent >= 0.0))
      fail(ErrorCategory::validation, where + ": indent must be non-negative");
  }
}

/// Copies the selected objects into a new document with ids renumbered 0..k-1.
/// `original_ids[j]` is the id the j-th kept object had in `doc`.
struct SubDocument {
  Document doc;
  std::vector<NodeId> original_ids;
};

inline SubDocument select_objects(const Document& doc, const std::vector<bool>& keep) {
  SubDocument sub;
  sub.doc.doc_id = doc.doc_id;
  for (std::size_t i = 0; i < doc.objects.size(); ++i) {
    if (!keep[i]) continue;
    PhysicalObject o = doc.objects[i];
    o.id = static_cast<NodeId>(sub.doc.objects.size());
    sub.doc.objects.push_back(std::move(o));
    sub.original_ids.push_back(static_cast<NodeId>(i));
  }
  return sub;
}

}  // namespace held
