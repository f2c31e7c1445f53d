// Plain-text file formats: JSON Lines documents, tree and model files, query
// and relevance files, tuple dumps, evaluation reports, and the flat
// key = value corpus configuration.
#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "held/document.hpp"
#include "held/evaluation.hpp"
#include "held/heading.hpp"
#include "held/linear_scorer.hpp"
#include "held/retrieval.hpp"
#include "held/synth.hpp"
#include "held/tree.hpp"
#include "held/tuples.hpp"

namespace held::io {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(ErrorCategory::io, "failed writing '" + path + "'");
}

inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::validation, where + ": malformed JSON: " + e.what());
  }
}

/// Calls `fn(json, line_number)` for every non-blank line; parse and type
/// errors are reported as "<source>:<line>: ...".
template <class Fn>
void for_each_json_line(const std::string& text, const std::string& source, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      // The parser counts within the single line, so report the byte offset instead.
      fail(ErrorCategory::validation, where + ": malformed JSON on line " + std::to_string(lineno) +
                                          " near byte " + std::to_string(e.byte));
    }
    try {
      fn(j, lineno);
    } catch (const json::exception& e) {
      fail(ErrorCategory::validation, where + ": " + e.what());
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::validation) fail(e.category(), where + ": " + e.what());
      throw;
    }
  }
}

// ---- documents -------------------------------------------------------------

inline json to_json(const FormatAttrs& f) {
  return {{"font_family_id", f.font_family_id}, {"font_size", f.font_size},
          {"font_color_id", f.font_color_id},   {"bold", f.bold},
          {"italic", f.italic},                 {"centered", f.centered},
          {"indent", f.indent}};
}

inline FormatAttrs format_from_json(const json& j) {
  FormatAttrs f;
  f.font_family_id = j.value("font_family_id", 0);
  f.font_size = j.value("font_size", 10.5);
  f.font_color_id = j.value("font_color_id", 0);
  f.bold = j.value("bold", false);
  f.italic = j.value("italic", false);
  f.centered = j.value("centered", false);
  f.indent = j.value("indent", 0.0);
  return f;
}

inline json to_json(const PhysicalObject& o, const std::string& doc_id) {
  json j = {{"doc_id", doc_id}, {"id", o.id}, {"kind", to_string(o.kind)},
            {"text", o.text},   {"format", to_json(o.format)}};
  if (o.is_heading) j["is_heading"] = *o.is_heading;
  return j;
}

inline PhysicalObject object_from_json(const json& j) {
  PhysicalObject o;
  o.id = j.at("id").get<NodeId>();
  const auto kind_name = j.value("kind", std::string("paragraph"));
  const auto kind = parse_object_kind(kind_name);
  if (!kind) fail(ErrorCategory::validation, "unknown object kind '" + kind_name + "'");
  o.kind = *kind;
  o.text = j.value("text", std::string());
  if (j.contains("format")) o.format = format_from_json(j.at("format"));
  if (j.contains("is_heading") && !j.at("is_heading").is_null()) o.is_heading = j.at("is_heading").get<bool>();
  return o;
}

/// One object per line. Consecutive lines sharing a "doc_id" form a document;
/// lines without one belong to `default_doc_id`.
inline std::vector<Document> parse_documents(const std::string& text, const std::string& source,
                                             const std::string& default_doc_id = "doc") {
  std::vector<Document> docs;
  std::map<std::string, std::size_t> index;
  for_each_json_line(text, source, [&](const json& j, std::size_t) {
    if (!j.is_object()) fail(ErrorCategory::validation, "expected a JSON object");
    const std::string id = j.value("doc_id", default_doc_id);
    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(id, docs.size()).first;
      docs.push_back({id, {}});
    } else if (it->second + 1 != docs.size()) {
      fail(ErrorCategory::validation, "objects of document '" + id + "' are not contiguous");
    }
    auto& doc = docs[it->second];
    PhysicalObject o = object_from_json(j);
    if (o.id != static_cast<NodeId>(doc.objects.size()))
      fail(ErrorCategory::validation, "document '" + id + "': expected object id " +
                                          std::to_string(doc.objects.size()) + ", got " +
                                          std::to_string(o.id));
    if (o.kind == ObjectKind::paragraph && o.text.empty())
      fail(ErrorCategory::validation, "paragraph with empty text");
    if (!(o.format.font_size > 0.0)) fail(ErrorCategory::validation, "font_size must be positive");
    if (!(o.format.indent >= 0.0)) fail(ErrorCategory::validation, "indent must be non-negative");
    doc.objects.push_back(std::move(o));
  });
  if (docs.empty()) fail(ErrorCategory::validation, source + ": no documents");
  for (const auto& d : docs) validate(d);
  return docs;
}

inline std::string file_stem(const std::string& path) {
  auto base = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
  const auto dot = base.find('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

inline std::vector<Document> read_documents(const std::string& path) {
  return parse_documents(read_file(path), path, file_stem(path));
}

inline std::string format_documents(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs)
    for (const auto& o : d.objects) out += to_json(o, d.doc_id).dump() + "\n";
  return out;
}

// ---- trees -----------------------------------------------------------------

struct NamedTree {
  std::string doc_id;
  HierarchyTree tree;
};

/// `[{"doc_id": ..., "parents": [...]}, ...]`; a single object is also accepted.
/// parents[i] is the parent of object i, -1 for the root.
inline std::vector<NamedTree> parse_trees(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  std::vector<NamedTree> out;
  auto one = [&](const json& t, std::size_t k) {
    const std::string where = source + ": tree " + std::to_string(k);
    try {
      if (!t.is_object()) fail(ErrorCategory::validation, "expected a JSON object");
      const auto parents = t.at("parents").get<std::vector<NodeId>>();
      out.push_back({t.value("doc_id", file_stem(source)), HierarchyTree::from_parents(parents)});
    } catch (const json::exception& e) {
      fail(ErrorCategory::validation, where + ": " + e.what());
    } catch (const Error& e) {
      fail(e.category(), where + ": " + e.what());
    }
  };
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) one(j[k], k);
  } else {
    one(j, 0);
  }
  return out;
}

inline std::vector<NamedTree> read_trees(const std::string& path) {
  return parse_trees(read_file(path), path);
}

inline std::string format_trees(const std::vector<NamedTree>& trees) {
  // One tree per line keeps large corpora diff-able.
  std::string out = "[\n";
  for (std::size_t k = 0; k < trees.size(); ++k) {
    const json t = {{"doc_id", trees[k].doc_id}, {"parents", trees[k].tree.parents()}};
    out += "  " + t.dump() + (k + 1 < trees.size() ? ",\n" : "\n");
  }
  return out + "]\n";
}

/// Looks trees up by doc_id, failing with a validation error when absent.
inline const HierarchyTree& tree_for(const std::vector<NamedTree>& trees,
                                     const std::map<std::string, std::size_t>& index,
                                     const std::string& doc_id, const std::string& what) {
  const auto it = index.find(doc_id);
  if (it == index.end()) fail(ErrorCategory::validation, what + ": no tree for document '" + doc_id + "'");
  return trees[it->second].tree;
}

inline std::map<std::string, std::size_t> index_trees(const std::vector<NamedTree>& trees,
                                                      const std::string& what) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t k = 0; k < trees.size(); ++k)
    if (!idx.emplace(trees[k].doc_id, k).second)
      fail(ErrorCategory::validation, what + ": duplicate doc_id '" + trees[k].doc_id + "'");
  return idx;
}

// ---- pattern libraries -----------------------------------------------------

/// Either an array of {"name", "regex", "counter"} replacing the built-ins, or
/// {"extends": "builtin", "patterns": [...]} appending to them.
inline PatternLibrary parse_patterns(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  PatternLibrary lib;
  const json* list = &j;
  if (j.is_object()) {
    if (j.value("extends", std::string()) == "builtin") lib = PatternLibrary::builtin();
    if (!j.contains("patterns")) fail(ErrorCategory::validation, source + ": missing \"patterns\"");
    list = &j.at("patterns");
  }
  if (!list->is_array()) fail(ErrorCategory::validation, source + ": patterns must be an array");
  try {
    for (const auto& p : *list) {
      const auto counter_name = p.value("counter", std::string("none"));
      const auto counter = parse_counter_kind(counter_name);
      if (!counter) fail(ErrorCategory::validation, source + ": unknown counter kind '" + counter_name + "'");
      lib.add({p.at("name").get<std::string>(), p.at("regex").get<std::string>(), *counter});
    }
  } catch (const json::exception& e) {
    fail(ErrorCategory::validation, source + ": " + e.what());
  }
  if (lib.size() == 0) fail(ErrorCategory::validation, source + ": empty pattern library");
  return lib;
}

inline std::shared_ptr<const PatternLibrary> load_patterns(const std::string& path) {
  if (path.empty()) return std::make_shared<const PatternLibrary>(PatternLibrary::builtin());
  return std::make_shared<const PatternLibrary>(parse_patterns(read_file(path), path));
}

// ---- models ----------------------------------------------------------------

struct ScorerModel {
  LogisticModel scorer;
  std::string pattern_library_hash;
  int window = kDefaultSiblingWindow;
  Mode mode = Mode::one_step;
  std::optional<LogisticModel> heading_classifier;
};

inline json model_json(const LogisticModel& m, const std::vector<std::string>& names) {
  return {{"weights", m.weights()}, {"bias", m.bias()}, {"feature_names", names}};
}

inline std::string format_scorer_model(const ScorerModel& m) {
  json j = model_json(m.scorer, feature_names());
  j["pattern_library_hash"] = m.pattern_library_hash;
  j["window"] = m.window;
  j["mode"] = to_string(m.mode);
  if (m.heading_classifier) j["heading_classifier"] = model_json(*m.heading_classifier, heading_feature_names());
  return j.dump(2) + "\n";
}

inline LogisticModel logistic_from_json(const json& j, const std::vector<std::string>& expected,
                                        const std::string& where) {
  const auto names = j.at("feature_names").get<std::vector<std::string>>();
  if (names != expected)
    fail(ErrorCategory::model, where + ": feature names do not match this build's extractor");
  auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != expected.size())
    fail(ErrorCategory::model, where + ": expected " + std::to_string(expected.size()) + " weights");
  return LogisticModel(std::move(w), j.at("bias").get<double>());
}

inline ScorerModel parse_scorer_model(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  try {
    ScorerModel m;
    m.scorer = logistic_from_json(j, feature_names(), source);
    m.pattern_library_hash = j.at("pattern_library_hash").get<std::string>();
    m.window = j.value("window", kDefaultSiblingWindow);
    const auto mode = parse_mode(j.value("mode", std::string("1step")));
    if (!mode) fail(ErrorCategory::model, source + ": unknown mode");
    m.mode = *mode;
    if (j.contains("heading_classifier"))
      m.heading_classifier = logistic_from_json(j.at("heading_classifier"), heading_feature_names(),
                                                source + ": heading_classifier");
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCategory::model, source + ": " + e.what());
  }
}

inline std::string format_ranker(const LinearRanker& r) {
  return json{{"weights", r.weights()}, {"bias", r.bias()}, {"feature_names", passage_feature_names()}}.dump(2) + "\n";
}

inline LinearRanker parse_ranker(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  try {
    if (j.at("feature_names").get<std::vector<std::string>>() != passage_feature_names())
      fail(ErrorCategory::model, source + ": ranker feature names do not match");
    return LinearRanker(j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>());
  } catch (const json::exception& e) {
    fail(ErrorCategory::model, source + ": " + e.what());
  }
}

// ---- tuples ----------------------------------------------------------------

inline std::string format_tuples(const std::vector<LabeledTuple>& tuples) {
  std::string out;
  for (const auto& t : tuples)
    out += json{{"doc_id", t.doc_id},
                {"event_index", t.event_index},
                {"position_depth", t.position_depth},
                {"label", t.label},
                {"features", t.features}}
               .dump() +
           "\n";
  return out;
}

// ---- queries and relevance labels -----------------------------------------

inline std::string format_queries(const std::vector<Query>& qs) {
  std::string out;
  for (const auto& q : qs) out += json{{"query_id", q.query_id}, {"doc_id", q.doc_id}, {"terms", q.terms}}.dump() + "\n";
  return out;
}

inline std::vector<Query> parse_queries(const std::string& text, const std::string& source) {
  std::vector<Query> out;
  for_each_json_line(text, source, [&](const json& j, std::size_t) {
    Query q{j.at("query_id").get<std::string>(), j.value("doc_id", std::string()),
            j.at("terms").get<std::vector<std::string>>()};
    if (q.terms.empty()) fail(ErrorCategory::validation, "query '" + q.query_id + "' has no terms");
    out.push_back(std::move(q));
  });
  return out;
}

inline std::string format_qrels(const std::vector<RelevanceLabel>& labels) {
  std::string out;
  for (const auto& l : labels)
    out += json{{"query_id", l.query_id}, {"doc_id", l.doc_id}, {"passage_id", l.passage_id}}.dump() + "\n";
  return out;
}

inline std::vector<RelevanceLabel> parse_qrels(const std::string& text, const std::string& source) {
  std::vector<RelevanceLabel> out;
  for_each_json_line(text, source, [&](const json& j, std::size_t) {
    out.push_back({j.at("query_id").get<std::string>(), j.at("doc_id").get<std::string>(),
                   j.at("passage_id").get<NodeId>()});
  });
  return out;
}

// ---- evaluation report -----------------------------------------------------

inline json to_json(const EvalReport& r) {
  json levels = json::object();
  for (const auto& [k, s] : r.per_level)
    levels[std::to_string(k)] = {{"tp", s.tp},         {"fp", s.fp},         {"fn", s.fn},
                                 {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  json docs = json::array();
  for (const auto& d : r.documents)
    docs.push_back({{"doc_id", d.doc_id},
                    {"n_nodes", d.n_nodes},
                    {"correct", d.correct},
                    {"depth_correct", d.depth_correct},
                    {"node_accuracy", d.n_nodes ? static_cast<double>(d.correct) / static_cast<double>(d.n_nodes) : 0.0}});
  return {{"node_accuracy", r.node_accuracy},
          {"legacy_depth_accuracy", r.legacy_depth_accuracy},
          {"n_nodes", r.n_nodes},
          {"per_level", levels},
          {"documents", docs}};
}

// ---- corpus configuration --------------------------------------------------

/// Flat `key = value` lines; `#` starts a comment, `[section]` headers are
/// ignored, strings may be quoted, arrays are `[a, b, ...]` of numbers.
inline std::map<std::string, std::string> parse_flat_config(const std::string& text,
                                                            const std::string& source) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCategory::validation, source + ":" + std::to_string(lineno) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) fail(ErrorCategory::validation, source + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

struct GenCorpusConfig {
  CorpusConfig corpus;
  int n_queries = 200;
  std::uint64_t query_seed = 7;
};

inline GenCorpusConfig corpus_config_from(const std::map<std::string, std::string>& kv,
                                          const std::string& source) {
  GenCorpusConfig g;
  auto& c = g.corpus;
  for (const auto& [key, value] : kv) {
    auto bad = [&] { fail(ErrorCategory::validation, source + ": bad value for '" + key + "': " + value); };
    auto num = [&]() -> double {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::logic_error&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) bad();
      return v;
    };
    auto integer = [&]() -> long long {
      const double v = num();
      if (v != static_cast<double>(static_cast<long long>(v))) bad();
      return static_cast<long long>(v);
    };
    if (key == "n_docs") c.n_docs = static_cast<int>(integer());
    else if (key == "min_objects") c.min_objects = static_cast<int>(integer());
    else if (key == "max_objects") c.max_objects = static_cast<int>(integer());
    else if (key == "max_depth") c.max_depth = static_cast<int>(integer());
    else if (key == "heading_ratio") c.heading_ratio = num();
    else if (key == "descend_prob") c.descend_prob = num();
    else if (key == "ambiguity_prob") c.ambiguity_prob = num();
    else if (key == "unnumbered_level_prob") c.unnumbered_level_prob = num();
    else if (key == "format_noise") c.format_noise = num();
    else if (key == "list_item_rate") c.list_item_rate = num();
    else if (key == "non_text_rate") c.non_text_rate = num();
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer());
    else if (key == "n_queries") g.n_queries = static_cast<int>(integer());
    else if (key == "query_seed") g.query_seed = static_cast<std::uint64_t>(integer());
    else if (key == "level_widths") {
      if (value.size() < 2 || value.front() != '[' || value.back() != ']') bad();
      c.level_widths.clear();
      std::istringstream items(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        try {
          c.level_widths.push_back(std::stod(item));
        } catch (const std::logic_error&) {
          bad();
        }
      }
    } else {
      fail(ErrorCategory::validation, source + ": unknown key '" + key + "'");
    }
  }
  if (g.n_queries < 0) fail(ErrorCategory::validation, source + ": n_queries must be >= 0");
  validate(c);
  return g;
}

inline json to_json(const GenCorpusConfig& g) {
  const auto& c = g.corpus;
  return {{"n_docs", c.n_docs},
          {"min_objects", c.min_objects},
          {"max_objects", c.max_objects},
          {"max_depth", c.max_depth},
          {"heading_ratio", c.heading_ratio},
          {"level_widths", c.level_widths},
          {"descend_prob", c.descend_prob},
          {"ambiguity_prob", c.ambiguity_prob},
          {"unnumbered_level_prob", c.unnumbered_level_prob},
          {"format_noise", c.format_noise},
          {"list_item_rate", c.list_item_rate},
          {"non_text_rate", c.non_text_rate},
          {"seed", c.seed},
          {"n_queries", g.n_queries},
          {"query_seed", g.query_seed}};
}

}  // namespace held::io
