#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;

namespace held {
namespace {

using namespace test;
using nlohmann::json;

// ---- formats ---------------------------------------------------------------

TEST(IoFormats, DocumentsRoundTrip) {
  const auto r = small_report();
  Document d = r.doc;
  d.objects[3].kind = ObjectKind::table;
  d.objects[0].format.centered = true;
  d.objects[0].is_heading = true;
  const auto text = io::format_documents({d, text_document({"x", "y"}, "second")});
  const auto back = io::parse_documents(text, "mem.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(io::format_documents(back), text);
  EXPECT_EQ(back[0].objects[3].kind, ObjectKind::table);
  EXPECT_EQ(back[0].objects[0].is_heading, true);
  EXPECT_FALSE(back[0].objects[1].is_heading.has_value());
}

TEST(IoFormats, MalformedLineIsNamed) {
  std::string text;
  for (int i = 0; i < 16; ++i) text += json{{"doc_id", "d"}, {"id", i}, {"kind", "paragraph"}, {"text", "t"}}.dump() + "\n";
  text += "{\"doc_id\": \"d\", \"id\": 16,\n";
  try {
    io::parse_documents(text, "docs.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::validation);
    EXPECT_NE(std::string(e.what()).find("docs.jsonl:17"), std::string::npos) << e.what();
  }
}

TEST(IoFormats, RejectsOutOfOrderObjects) {
  const std::string text = json{{"doc_id", "d"}, {"id", 1}, {"kind", "paragraph"}, {"text", "t"}}.dump() + "\n";
  EXPECT_THROW(io::parse_documents(text, "x"), Error);
}

TEST(IoFormats, TreesRoundTrip) {
  const std::vector<io::NamedTree> trees = {{"a", example_tree()}, {"b", path_example_gold()}};
  const auto back = io::parse_trees(io::format_trees(trees), "t.json");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].doc_id, "b");
  EXPECT_EQ(back[1].tree.parents(), path_example_gold().parents());
  const auto single = io::parse_trees(R"({"parents": [-1, 0]})", "dir/single.json");
  EXPECT_EQ(single[0].doc_id, "single");
  EXPECT_THROW(io::parse_trees(R"({"parents": [-1, 0, 0, 1]})", "bad.json"), Error);
}

TEST(IoFormats, PatternFiles) {
  const auto extended = io::parse_patterns(
      R"json({"extends": "builtin", "patterns": [{"name": "article_en", "regex": "Article\\s+(\\d+)", "counter": "arabic"}]})json",
      "p.json");
  EXPECT_EQ(extended.size(), PatternLibrary::builtin().size() + 1);
  EXPECT_EQ(extended.match("Article 3 Scope").counter, 3);
  const auto replaced = io::parse_patterns(R"([{"name": "only", "regex": "Only\\b"}])", "p.json");
  EXPECT_EQ(replaced.name(replaced.match("Only this").pattern_id), "only");
  EXPECT_THROW(io::parse_patterns(R"([{"name": "x", "regex": "(", "counter": "arabic"}])", "p.json"), Error);
  EXPECT_THROW(io::parse_patterns(R"([{"name": "x", "regex": "a", "counter": "base7"}])", "p.json"), Error);
}

TEST(IoFormats, ScorerModelRoundTripAndChecks) {
  io::ScorerModel m;
  std::vector<double> w(feature_count());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 0.1 * static_cast<double>(j) - 1.0;
  m.scorer = LogisticModel(w, 0.25);
  m.pattern_library_hash = PatternLibrary::builtin().hash();
  m.mode = Mode::two_step;
  m.heading_classifier = LogisticModel(std::vector<double>(heading_feature_names().size(), 0.5), -1.0);
  const auto text = io::format_scorer_model(m);
  const auto back = io::parse_scorer_model(text, "m.json");
  EXPECT_EQ(back.scorer.weights(), w);
  EXPECT_EQ(back.scorer.bias(), 0.25);
  EXPECT_EQ(back.mode, Mode::two_step);
  ASSERT_TRUE(back.heading_classifier.has_value());
  EXPECT_EQ(io::format_scorer_model(back), text);

  auto j = json::parse(text);
  j["feature_names"][0] = "renamed";
  try {
    io::parse_scorer_model(j.dump(), "m.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::model);
  }
}

TEST(IoFormats, FlatConfig) {
  const auto kv = io::parse_flat_config("# corpus\n[corpus]\nn_docs = 12\nheading_ratio = 0.2  # comment\nseed = \"9\"\n", "c.toml");
  const auto g = io::corpus_config_from(kv, "c.toml");
  EXPECT_EQ(g.corpus.n_docs, 12);
  EXPECT_EQ(g.corpus.heading_ratio, 0.2);
  EXPECT_EQ(g.corpus.seed, 9u);
  EXPECT_THROW(io::corpus_config_from({{"n_dcos", "3"}}, "c.toml"), Error);
  EXPECT_THROW(io::corpus_config_from({{"n_docs", "3.5"}}, "c.toml"), Error);
  EXPECT_THROW(io::parse_flat_config("n_docs 3\n", "c.toml"), Error);
}

TEST(IoFormats, QueriesAndQrelsRoundTrip) {
  const std::vector<Query> qs = {{"q1", "d1", {"cash", "risk"}}, {"q2", "", {"一"}}};
  const auto back = io::parse_queries(io::format_queries(qs), "q.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].terms, qs[0].terms);
  EXPECT_EQ(back[1].doc_id, "");
  const std::vector<RelevanceLabel> labels = {{"q1", "d1", 4}, {"q1", "d1", 5}};
  EXPECT_EQ(io::format_qrels(io::parse_qrels(io::format_qrels(labels), "r.jsonl")), io::format_qrels(labels));
}

// ---- command line ----------------------------------------------------------

class Cli : public ::testing::Test {
 protected:
  static fs::path dir() {
    static const fs::path d = [] {
      auto p = fs::temp_directory_path() / ("held_cli_" + std::to_string(::getpid()));
      fs::remove_all(p);
      fs::create_directories(p);
      return p;
    }();
    return d;
  }

  static std::string path(const std::string& name) { return (dir() / name).string(); }

  // Runs the held binary; returns its exit code and keeps the combined output.
  static int held(const std::string& args, std::string* output = nullptr) {
    const std::string log = path("last.log");
    const std::string cmd = std::string(HELD_EXE) + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) *output = slurp(log);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // A small corpus shared by the pipeline tests.
  static void SetUpTestSuite() {
    std::ofstream(path("small.toml")) << "n_docs = 8\nmin_objects = 60\nmax_objects = 140\nn_queries = 30\n";
    ASSERT_EQ(held("gen-corpus --config " + path("small.toml") + " --out-dir " + path("corpus") + " --jobs 2"), 0);
  }

  static void TearDownTestSuite() { fs::remove_all(dir()); }
};

TEST_F(Cli, GenCorpusWritesAllFiles) {
  for (const char* f : {"docs.jsonl", "gold.json", "queries.jsonl", "qrels.jsonl", "corpus.run.json"})
    EXPECT_TRUE(fs::exists(dir() / "corpus" / f)) << f;
  const auto docs = io::read_documents(path("corpus/docs.jsonl"));
  EXPECT_EQ(docs.size(), 8u);
  EXPECT_EQ(io::read_trees(path("corpus/gold.json")).size(), 8u);
}

TEST_F(Cli, GenCorpusIndependentOfJobs) {
  ASSERT_EQ(held("gen-corpus --config " + path("small.toml") + " --out-dir " + path("corpus1") + " --jobs 1"), 0);
  EXPECT_EQ(slurp(path("corpus1/docs.jsonl")), slurp(path("corpus/docs.jsonl")));
  EXPECT_EQ(slurp(path("corpus1/gold.json")), slurp(path("corpus/gold.json")));
  EXPECT_EQ(slurp(path("corpus1/qrels.jsonl")), slurp(path("corpus/qrels.jsonl")));
}

TEST_F(Cli, EvalOfGoldAgainstItselfIsPerfect) {
  std::string out;
  ASSERT_EQ(held("eval --pred " + path("corpus/gold.json") + " --gold " + path("corpus/gold.json") + " --out " +
                     path("self.json"),
                 &out),
            0)
      << out;
  const auto report = json::parse(slurp(path("self.json")));
  EXPECT_EQ(report.at("node_accuracy").get<double>(), 1.0);
  EXPECT_EQ(report.at("legacy_depth_accuracy").get<double>(), 1.0);
}

TEST_F(Cli, MalformedLineSeventeenExitsTwo) {
  const auto lines = slurp(path("corpus/docs.jsonl"));
  std::istringstream in(lines);
  std::string line, text;
  for (int k = 1; std::getline(in, line) && k <= 20; ++k) text += (k == 17 ? line.substr(0, line.size() / 2) : line) + "\n";
  std::ofstream(path("bad.jsonl")) << text;
  std::string out;
  EXPECT_EQ(held("train --docs " + path("bad.jsonl") + " --gold " + path("corpus/gold.json") + " --out " +
                     path("unused.json"),
                 &out),
            2);
  EXPECT_NE(out.find(":17"), std::string::npos) << out;
  EXPECT_NE(out.find("line 17"), std::string::npos) << out;
}

TEST_F(Cli, ErrorCategoriesMapToExitCodes) {
  EXPECT_EQ(held("infer --bogus-flag"), 1);
  EXPECT_EQ(held("eval --pred " + path("missing.json") + " --gold " + path("corpus/gold.json") + " --out " +
                 path("x.json")),
            3);
  std::ofstream(path("junk_model.json")) << R"({"weights": [1], "bias": 0, "feature_names": ["x"], "pattern_library_hash": ""})";
  EXPECT_EQ(held("infer --docs " + path("corpus/docs.jsonl") + " --model " + path("junk_model.json") + " --out " +
                 path("x.json")),
            4);
}

TEST_F(Cli, FullPipeline) {
  std::string out;
  const std::string docs = path("corpus/docs.jsonl"), gold = path("corpus/gold.json");
  ASSERT_EQ(held("train --docs " + docs + " --gold " + gold + " --out " + path("model.json") +
                     " --mode 2step --error-rate 0.1 --seed 3 --tuples-out " + path("tuples.jsonl"),
                 &out),
            0)
      << out;
  EXPECT_TRUE(fs::exists(path("model.json.run.json")));
  EXPECT_GT(fs::file_size(path("tuples.jsonl")), 0u);

  ASSERT_EQ(held("infer --docs " + docs + " --model " + path("model.json") + " --mode 2step --order r2l --out " +
                     path("pred.json") + " --stats " + path("stats.csv") + " --jobs 1",
                 &out),
            0)
      << out;
  ASSERT_EQ(held("eval --pred " + path("pred.json") + " --gold " + gold + " --out " + path("report.json"), &out), 0)
      << out;
  const auto report = json::parse(slurp(path("report.json")));
  EXPECT_GT(report.at("node_accuracy").get<double>(), 0.5);
  EXPECT_GE(report.at("legacy_depth_accuracy").get<double>(), report.at("node_accuracy").get<double>());
  EXPECT_EQ(report.at("documents").size(), 8u);

  const auto stats = slurp(path("stats.csv"));
  EXPECT_EQ(stats.substr(0, stats.find('\n')), "doc_id,n_objects,n_headings,inquiries,wall_ms");

  ASSERT_EQ(held("bench-traversal --gold " + gold + " --out " + path("bench.csv"), &out), 0) << out;
  const auto bench = slurp(path("bench.csv"));
  EXPECT_EQ(std::count(bench.begin(), bench.end(), '\n'), 9);

  ASSERT_EQ(held("train --target ranker --docs " + docs + " --gold " + gold + " --queries " +
                     path("corpus/queries.jsonl") + " --qrels " + path("corpus/qrels.jsonl") + " --out " +
                     path("ranker.json"),
                 &out),
            0)
      << out;
  ASSERT_EQ(held("retrieve --docs " + docs + " --trees " + path("pred.json") + " --queries " +
                     path("corpus/queries.jsonl") + " --model " + path("ranker.json") + " --out " + path("run.tsv") +
                     " --qrels " + path("corpus/qrels.jsonl"),
                 &out),
            0)
      << out;
  EXPECT_NE(out.find("mAP"), std::string::npos) << out;
  EXPECT_GT(fs::file_size(path("run.tsv")), 0u);
}

// Drops the trailing wall-clock column of stats.csv.
std::string without_wall_ms(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

TEST_F(Cli, InferenceOutputIsDeterministicAcrossJobs) {
  const std::string docs = path("corpus/docs.jsonl"), gold = path("corpus/gold.json");
  ASSERT_EQ(held("train --docs " + docs + " --gold " + gold + " --out " + path("m1.json") + " --seed 5"), 0);
  ASSERT_EQ(held("train --docs " + docs + " --gold " + gold + " --out " + path("m2.json") + " --seed 5 --jobs 3"), 0);
  EXPECT_EQ(slurp(path("m1.json")), slurp(path("m2.json")));
  for (const char* order : {"all", "r2l", "l2r"}) {
    const std::string common = "infer --docs " + docs + " --model " + path("m1.json") + " --order " + order + " --beam 2";
    ASSERT_EQ(held(common + " --out " + path("p1.json") + " --stats " + path("s1.csv") + " --jobs 1"), 0);
    ASSERT_EQ(held(common + " --out " + path("p2.json") + " --stats " + path("s2.csv") + " --jobs 3"), 0);
    EXPECT_EQ(slurp(path("p1.json")), slurp(path("p2.json"))) << order;
    EXPECT_EQ(without_wall_ms(slurp(path("s1.csv"))), without_wall_ms(slurp(path("s2.csv")))) << order;
  }
}

TEST_F(Cli, PatternLibraryMismatchIsModelError) {
  const std::string docs = path("corpus/docs.jsonl"), gold = path("corpus/gold.json");
  ASSERT_EQ(held("train --docs " + docs + " --gold " + gold + " --out " + path("m3.json")), 0);
  std::ofstream(path("extra.json")) << R"json({"extends": "builtin", "patterns": [{"name": "clause", "regex": "Clause\\s+(\\d+)", "counter": "arabic"}]})json";
  std::string out;
  EXPECT_EQ(held("infer --docs " + docs + " --model " + path("m3.json") + " --patterns " + path("extra.json") +
                     " --out " + path("x.json"),
                 &out),
            4)
      << out;
}

}  // namespace
}  // namespace held
