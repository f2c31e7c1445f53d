// The `held` command line. Kept in a header so tests can call run() in-process.
#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "held/held.hpp"

namespace held::cli {

using io::json;

inline std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_mt("held");
    l->set_pattern("[%l] %v");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("HELD_LOG")) level = spdlog::level::from_str(env);
    l->set_level(level);
    return l;
  }();
  return log;
}

/// Writes `<output>.run.json`, the resolved configuration of this invocation.
inline void echo_config(const std::string& output, const json& cfg) {
  io::write_file(output + ".run.json", cfg.dump(2) + "\n");
}

inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return 1;
    case ErrorCategory::validation: return 2;
    case ErrorCategory::io: return 3;
    case ErrorCategory::model: return 4;
  }
  return 1;
}

struct Docs {
  std::vector<Document> docs;
  std::vector<io::NamedTree> trees;  // aligned with docs
};

/// Loads documents and the trees with matching doc ids, in document order.
inline Docs load_aligned(const std::string& docs_path, const std::string& trees_path,
                         const std::string& what) {
  Docs d{io::read_documents(docs_path), {}};
  const auto trees = io::read_trees(trees_path);
  const auto idx = io::index_trees(trees, trees_path);
  for (const auto& doc : d.docs) {
    const auto& t = io::tree_for(trees, idx, doc.doc_id, what);
    if (t.size() != doc.size())
      fail(ErrorCategory::validation, what + ": tree for '" + doc.doc_id + "' has " +
                                          std::to_string(t.size()) + " nodes, document has " +
                                          std::to_string(doc.size()));
    d.trees.push_back({doc.doc_id, t});
  }
  return d;
}

inline std::vector<bool> internal_flags(const HierarchyTree& t) {
  std::vector<bool> f(t.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = !t.is_leaf(static_cast<NodeId>(i));
  return f;
}

// ---- gen-corpus ------------------------------------------------------------

struct GenCorpusArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = default_jobs();
};

inline int gen_corpus(const GenCorpusArgs& a) {
  io::GenCorpusConfig g;
  if (!a.config.empty()) g = io::corpus_config_from(io::parse_flat_config(io::read_file(a.config), a.config), a.config);
  if (a.seed) g.corpus.seed = *a.seed;
  validate(g.corpus);
  std::vector<AnnotatedDocument> corpus(static_cast<std::size_t>(g.corpus.n_docs));
  parallel_for(corpus.size(), a.jobs, [&](std::size_t i) { corpus[i] = generate_document(g.corpus, static_cast<int>(i)); });
  const auto labels = generate_retrieval_labels(corpus, g.n_queries, g.query_seed);

  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) fail(ErrorCategory::io, "cannot create '" + a.out_dir + "': " + ec.message());
  std::vector<Document> docs;
  std::vector<io::NamedTree> trees;
  for (auto& ad : corpus) {
    Document d = ad.doc;
    const auto flags = ad.heading_flags();
    for (std::size_t i = 0; i < d.objects.size(); ++i) d.objects[i].is_heading = flags[i];
    docs.push_back(std::move(d));
    trees.push_back({ad.doc.doc_id, ad.gold});
  }
  const std::string dir = a.out_dir + "/";
  io::write_file(dir + "docs.jsonl", io::format_documents(docs));
  io::write_file(dir + "gold.json", io::format_trees(trees));
  io::write_file(dir + "queries.jsonl", io::format_queries(labels.queries));
  io::write_file(dir + "qrels.jsonl", io::format_qrels(labels.qrels));
  json cfg = io::to_json(g);
  cfg["command"] = "gen-corpus";
  echo_config(dir + "corpus", cfg);
  logger()->info("wrote {} documents and {} queries to {}", docs.size(), labels.queries.size(), a.out_dir);
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string docs, gold, out, target = "scorer", mode = "1step", patterns, tuples_out;
  std::string queries, qrels;
  double error_rate = 0.0;
  std::uint64_t seed = 17;
  int window = kDefaultSiblingWindow;
  int jobs = default_jobs();
};

inline int train_ranker(const TrainArgs& a, const Docs& data) {
  if (a.queries.empty() || a.qrels.empty())
    fail(ErrorCategory::usage, "train --target ranker needs --queries and --qrels");
  const auto queries = io::parse_queries(io::read_file(a.queries), a.queries);
  const auto qrels = io::parse_qrels(io::read_file(a.qrels), a.qrels);
  std::map<std::string, std::size_t> doc_index;
  for (std::size_t i = 0; i < data.docs.size(); ++i) doc_index[data.docs[i].doc_id] = i;
  std::map<std::string, std::set<NodeId>> relevant;
  for (const auto& l : qrels) relevant[l.query_id].insert(l.passage_id);
  std::map<std::size_t, DocStats> stats;
  std::vector<RankingExample> examples;
  for (const auto& q : queries) {
    const auto it = doc_index.find(q.doc_id);
    if (it == doc_index.end()) fail(ErrorCategory::validation, "query '" + q.query_id + "': unknown doc '" + q.doc_id + "'");
    auto st = stats.find(it->second);
    if (st == stats.end()) st = stats.emplace(it->second, DocStats(data.docs[it->second])).first;
    const auto& tree = data.trees[it->second].tree;
    const auto& rel = relevant[q.query_id];
    for (NodeId p : content_passages(tree))
      examples.push_back({passage_features(q.terms, p, tree, st->second), rel.count(p) ? 1 : 0});
  }
  const auto ranker = train_linear_ranker(examples, std::vector<bool>(passage_feature_names().size(), true));
  io::write_file(a.out, io::format_ranker(ranker));
  return 0;
}

inline int train(const TrainArgs& a) {
  const auto mode = parse_mode(a.mode);
  if (!mode) fail(ErrorCategory::usage, "--mode must be 1step or 2step");
  if (a.target != "scorer" && a.target != "ranker") fail(ErrorCategory::usage, "--target must be scorer or ranker");
  if (!(a.error_rate >= 0.0 && a.error_rate <= 1.0)) fail(ErrorCategory::usage, "--error-rate must be in [0, 1]");
  if (a.window < 0) fail(ErrorCategory::usage, "--window must be >= 0");
  const Docs data = load_aligned(a.docs, a.gold, "train");
  json cfg = {{"command", "train"}, {"docs", a.docs},         {"gold", a.gold},
              {"target", a.target}, {"mode", a.mode},         {"error_rate", a.error_rate},
              {"seed", a.seed},     {"window", a.window},     {"patterns", a.patterns},
              {"queries", a.queries}, {"qrels", a.qrels}};
  if (a.target == "ranker") {
    const int rc = train_ranker(a, data);
    echo_config(a.out, cfg);
    return rc;
  }

  const auto patterns = io::load_patterns(a.patterns);
  const TupleOptions topt{patterns.get(), a.window};
  std::vector<TupleSet> sets(data.docs.size()), noisy(data.docs.size());
  parallel_for(data.docs.size(), a.jobs, [&](std::size_t i) {
    const Document* doc = &data.docs[i];
    const HierarchyTree* gold = &data.trees[i].tree;
    SubDocument sub;
    HierarchyTree sub_gold;
    if (*mode == Mode::two_step) {
      const auto flags = internal_flags(*gold);
      sub = select_objects(*doc, flags);
      sub_gold = restrict_tree(*gold, flags);
      doc = &sub.doc;
      gold = &sub_gold;
    }
    if (doc->objects.empty()) return;
    sets[i] = generate_tuples(*doc, *gold, topt);
    if (a.error_rate > 0.0)
      noisy[i] = generate_error_tolerant_tuples(*doc, *gold, topt, a.error_rate, derive_seed(a.seed, i));
  });
  std::vector<LabeledTuple> tuples;
  for (auto* group : {&sets, &noisy})
    for (auto& s : *group) tuples.insert(tuples.end(), std::make_move_iterator(s.tuples.begin()), std::make_move_iterator(s.tuples.end()));
  logger()->info("training on {} tuples", tuples.size());
  if (!a.tuples_out.empty()) io::write_file(a.tuples_out, io::format_tuples(tuples));

  ScorerTrainingConfig tcfg;
  tcfg.window = a.window;
  tcfg.optimizer.seed = a.seed;
  TrainingReport report;
  const auto scorer = train_linear_scorer(tuples, patterns, tcfg, &report);
  io::ScorerModel model{scorer.model(), patterns->hash(), a.window, *mode, std::nullopt};

  std::vector<const Document*> docs;
  std::vector<std::vector<bool>> flags;
  for (std::size_t i = 0; i < data.docs.size(); ++i) {
    docs.push_back(&data.docs[i]);
    flags.push_back(data.docs[i].heading_flags().value_or(internal_flags(data.trees[i].tree)));
  }
  LogisticConfig hcfg;
  hcfg.seed = derive_seed(a.seed, 0x4ead);
  model.heading_classifier = train_heading_classifier(docs, flags, patterns, hcfg).model();
  io::write_file(a.out, io::format_scorer_model(model));
  cfg["epochs"] = report.epoch_loss.size();
  cfg["final_loss"] = report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back();
  cfg["tuples"] = tuples.size();
  echo_config(a.out, cfg);
  return 0;
}

// ---- infer -----------------------------------------------------------------

struct InferArgs {
  std::string docs, model, order = "r2l", mode = "1step", out, stats, patterns;
  int beam = 1;
  int jobs = default_jobs();
};

inline int infer(const InferArgs& a) {
  const auto order = parse_order(a.order);
  if (!order) fail(ErrorCategory::usage, "--order must be all, r2l or l2r");
  const auto mode = parse_mode(a.mode);
  if (!mode) fail(ErrorCategory::usage, "--mode must be 1step or 2step");
  if (a.beam < 1) fail(ErrorCategory::usage, "--beam must be >= 1");
  const auto model = io::parse_scorer_model(io::read_file(a.model), a.model);
  const auto patterns = io::load_patterns(a.patterns);
  if (patterns->hash() != model.pattern_library_hash)
    fail(ErrorCategory::model, a.model + ": pattern library hash " + model.pattern_library_hash +
                                   " does not match the loaded library " + patterns->hash());
  if (model.mode != *mode)
    logger()->warn("model was trained for {} but inference runs {}", to_string(model.mode), a.mode);
  const LinearScorer scorer(model.scorer, patterns, model.window);
  std::unique_ptr<HeadingClassifier> headings;
  if (model.heading_classifier) headings = std::make_unique<LogisticHeadingClassifier>(*model.heading_classifier, patterns);
  const auto docs = io::read_documents(a.docs);

  InferenceOptions opt;
  opt.order = *order;
  opt.mode = *mode;
  opt.beam = a.beam;
  opt.window = model.window;
  opt.patterns = patterns.get();
  std::vector<InferenceResult> results(docs.size());
  std::vector<double> wall_ms(docs.size());
  parallel_for(docs.size(), a.jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<bool> flags;
    if (*mode == Mode::two_step) {
      if (headings) {
        flags = headings->classify(docs[i]);
      } else if (auto f = docs[i].heading_flags()) {
        flags = *f;
      } else {
        fail(ErrorCategory::model, "two-step inference needs a heading classifier or annotated headings");
      }
    }
    results[i] = held::infer(docs[i], scorer, opt, *mode == Mode::two_step ? &flags : nullptr);
    wall_ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  std::vector<io::NamedTree> trees;
  std::ostringstream csv;
  csv << "doc_id,n_objects,n_headings,inquiries,wall_ms\n";
  for (std::size_t i = 0; i < docs.size(); ++i) {
    trees.push_back({docs[i].doc_id, results[i].tree});
    csv << docs[i].doc_id << ',' << docs[i].size() << ',' << results[i].stats.headings << ','
        << results[i].stats.inquiries << ',' << fmt::format("{:.3f}", wall_ms[i]) << '\n';
  }
  io::write_file(a.out, io::format_trees(trees));
  if (!a.stats.empty()) io::write_file(a.stats, csv.str());
  echo_config(a.out, {{"command", "infer"}, {"docs", a.docs},   {"model", a.model},
                      {"order", a.order},   {"mode", a.mode},   {"beam", a.beam},
                      {"window", model.window}, {"patterns", a.patterns}, {"stats", a.stats}});
  return 0;
}

// ---- eval ------------------------------------------------------------------

inline int eval(const std::string& pred_path, const std::string& gold_path, const std::string& out) {
  const auto pred = io::read_trees(pred_path);
  const auto gold = io::read_trees(gold_path);
  const auto pidx = io::index_trees(pred, pred_path);
  io::index_trees(gold, gold_path);
  if (pred.size() != gold.size())
    fail(ErrorCategory::validation, "eval: " + std::to_string(pred.size()) + " predicted vs " +
                                        std::to_string(gold.size()) + " gold trees");
  std::vector<TreePair> pairs;
  for (const auto& g : gold) pairs.push_back({g.doc_id, &io::tree_for(pred, pidx, g.doc_id, pred_path), &g.tree});
  const auto report = evaluate(pairs);
  io::write_file(out, io::to_json(report).dump(2) + "\n");
  echo_config(out, {{"command", "eval"}, {"pred", pred_path}, {"gold", gold_path}});
  std::cout << fmt::format("node_accuracy {:.4f}  legacy_depth_accuracy {:.4f}  nodes {}\n",
                           report.node_accuracy, report.legacy_depth_accuracy, report.n_nodes);
  return 0;
}

// ---- bench-traversal -------------------------------------------------------

inline int bench_traversal(const std::string& gold_path, const std::string& out, int jobs) {
  const auto gold = io::read_trees(gold_path);
  std::vector<TraversalStats> stats(gold.size());
  std::vector<std::size_t> two_step(gold.size());
  parallel_for(gold.size(), jobs, [&](std::size_t i) {
    const auto doc = skeleton_document(gold[i].doc_id, gold[i].tree.size());
    stats[i] = traversal_stats(doc, gold[i].tree);
    two_step[i] = empirical_inquiries(doc, gold[i].tree, TraversalOrder::root_to_leaf, Mode::two_step);
  });
  std::ostringstream csv;
  csv << "doc_id,n_nodes,internal,leaves,branch,empirical_all,formula_all,empirical_r2l,formula_r2l,"
         "empirical_l2r,formula_l2r,empirical_2step_r2l\n";
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& s = stats[i];
    const auto& f = s.formulas;
    csv << gold[i].doc_id << ',' << gold[i].tree.size() << ',' << f.internal << ',' << f.leaves << ','
        << f.branch << ',' << s.empirical.at(TraversalOrder::all) << ',' << f.all << ','
        << s.empirical.at(TraversalOrder::root_to_leaf) << ',' << f.root_to_leaf << ','
        << s.empirical.at(TraversalOrder::leaf_to_root) << ',' << f.leaf_to_root << ',' << two_step[i] << '\n';
  }
  io::write_file(out, csv.str());
  echo_config(out, {{"command", "bench-traversal"}, {"gold", gold_path}});
  return 0;
}

// ---- retrieve --------------------------------------------------------------

struct RetrieveArgs {
  std::string docs, trees, queries, model, out, qrels;
};

inline int retrieve(const RetrieveArgs& a) {
  const Docs data = load_aligned(a.docs, a.trees, "retrieve");
  const auto queries = io::parse_queries(io::read_file(a.queries), a.queries);
  const auto ranker = io::parse_ranker(io::read_file(a.model), a.model);
  std::map<std::string, std::size_t> doc_index;
  for (std::size_t i = 0; i < data.docs.size(); ++i) doc_index[data.docs[i].doc_id] = i;
  std::map<std::string, std::set<NodeId>> relevant;
  if (!a.qrels.empty())
    for (const auto& l : io::parse_qrels(io::read_file(a.qrels), a.qrels)) relevant[l.query_id].insert(l.passage_id);

  std::map<std::size_t, DocStats> stats;
  std::ostringstream tsv;
  std::vector<std::vector<NodeId>> rankings;
  std::vector<std::set<NodeId>> rel_sets;
  for (const auto& q : queries) {
    std::vector<std::size_t> targets;
    if (q.doc_id.empty()) {
      for (std::size_t i = 0; i < data.docs.size(); ++i) targets.push_back(i);
    } else {
      const auto it = doc_index.find(q.doc_id);
      if (it == doc_index.end()) fail(ErrorCategory::validation, "query '" + q.query_id + "': unknown doc '" + q.doc_id + "'");
      targets.push_back(it->second);
    }
    for (auto d : targets) {
      auto st = stats.find(d);
      if (st == stats.end()) st = stats.emplace(d, DocStats(data.docs[d])).first;
      const auto ranked = rank_passages(q, data.trees[d].tree, st->second, ranker);
      std::vector<NodeId> ids;
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        ids.push_back(ranked[r].passage);
        tsv << q.query_id << '\t' << data.docs[d].doc_id << ':' << ranked[r].passage << '\t' << r + 1 << '\t'
            << fmt::format("{:.6f}", ranked[r].score) << '\n';
      }
      rankings.push_back(std::move(ids));
      rel_sets.push_back(relevant[q.query_id]);
    }
  }
  io::write_file(a.out, tsv.str());
  json cfg = {{"command", "retrieve"}, {"docs", a.docs}, {"trees", a.trees}, {"queries", a.queries}, {"model", a.model}, {"qrels", a.qrels}};
  if (!a.qrels.empty()) {
    const auto m = retrieval_metrics(rankings, rel_sets);
    cfg["map"] = m.map;
    for (const auto& [k, r] : m.recall) cfg["recall@" + std::to_string(k)] = r;
    std::cout << fmt::format("mAP {:.4f}  recall@1 {:.4f}  queries {}\n", m.map, m.recall.at(1), m.queries);
  }
  echo_config(a.out, cfg);
  return 0;
}

// ---- entry point -----------------------------------------------------------

inline int run(int argc, const char* const* argv) {
  CLI::App app{"held: logical document hierarchy extraction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "held 0.1.0");

  GenCorpusArgs gc;
  auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic annotated corpus");
  gen->add_option("--config", gc.config, "flat key = value corpus config (TOML subset)");
  gen->add_option("--out-dir", gc.out_dir, "output directory")->required();
  gen->add_option("--seed", gc.seed, "overrides the config seed");
  gen->add_option("--jobs", gc.jobs, "worker threads")->check(CLI::PositiveNumber);

  TrainArgs tr;
  auto* trn = app.add_subcommand("train", "train a put-or-skip scorer or a passage ranker");
  trn->add_option("--docs", tr.docs)->required();
  trn->add_option("--gold", tr.gold, "gold trees")->required();
  trn->add_option("--out", tr.out, "model file")->required();
  trn->add_option("--target", tr.target, "scorer or ranker")->capture_default_str();
  trn->add_option("--mode", tr.mode, "1step or 2step")->capture_default_str();
  trn->add_option("--error-rate", tr.error_rate, "simulated insertion error rate")->capture_default_str();
  trn->add_option("--seed", tr.seed)->capture_default_str();
  trn->add_option("--window", tr.window, "sibling window K")->capture_default_str();
  trn->add_option("--patterns", tr.patterns, "pattern library JSON");
  trn->add_option("--tuples-out", tr.tuples_out, "dump training tuples as JSON Lines");
  trn->add_option("--queries", tr.queries, "queries (ranker)");
  trn->add_option("--qrels", tr.qrels, "relevance labels (ranker)");
  trn->add_option("--jobs", tr.jobs)->check(CLI::PositiveNumber);

  InferArgs in;
  auto* inf = app.add_subcommand("infer", "build trees for documents");
  inf->add_option("--docs", in.docs)->required();
  inf->add_option("--model", in.model)->required();
  inf->add_option("--order", in.order, "all, r2l or l2r")->capture_default_str();
  inf->add_option("--beam", in.beam)->capture_default_str();
  inf->add_option("--mode", in.mode, "1step or 2step")->capture_default_str();
  inf->add_option("--out", in.out, "trees JSON")->required();
  inf->add_option("--stats", in.stats, "per-document CSV");
  inf->add_option("--patterns", in.patterns, "pattern library JSON");
  inf->add_option("--jobs", in.jobs)->check(CLI::PositiveNumber);

  std::string pred, gold, eval_out;
  auto* ev = app.add_subcommand("eval", "path and depth accuracy against gold trees");
  ev->add_option("--pred", pred)->required();
  ev->add_option("--gold", gold)->required();
  ev->add_option("--out", eval_out)->required();

  std::string bench_gold, bench_out;
  int bench_jobs = default_jobs();
  auto* bench = app.add_subcommand("bench-traversal", "empirical and closed-form inquiry counts");
  bench->add_option("--gold", bench_gold)->required();
  bench->add_option("--out", bench_out)->required();
  bench->add_option("--jobs", bench_jobs)->check(CLI::PositiveNumber);

  RetrieveArgs rt;
  auto* ret = app.add_subcommand("retrieve", "rank passages with hierarchy features");
  ret->add_option("--docs", rt.docs)->required();
  ret->add_option("--trees", rt.trees)->required();
  ret->add_option("--queries", rt.queries)->required();
  ret->add_option("--model", rt.model, "ranker JSON")->required();
  ret->add_option("--out", rt.out, "TREC-style run")->required();
  ret->add_option("--qrels", rt.qrels, "relevance labels; prints mAP and recall@k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (*gen) return gen_corpus(gc);
    if (*trn) return train(tr);
    if (*inf) return infer(in);
    if (*ev) return eval(pred, gold, eval_out);
    if (*bench) return bench_traversal(bench_gold, bench_out, bench_jobs);
    if (*ret) return retrieve(rt);
  } catch (const Error& e) {
    std::cerr << "held: " << to_string(e.category()) << " error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "held: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace held::cli
