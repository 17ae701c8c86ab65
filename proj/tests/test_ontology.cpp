#include <gtest/gtest.h>

#include <random>
#include <set>

#include "checks.hpp"
#include "ontoforge/error.hpp"
#include "ontoforge/ontology.hpp"
#include "support.hpp"

using namespace ontoforge;
using namespace ontoforge::ontology;

namespace {

Assertion labeled(std::string c1, SemanticLabel l, std::string c2, int partition, double sim) {
  Assertion a;
  a.concept1 = std::move(c1);
  a.concept2 = std::move(c2);
  a.label = l;
  a.status = Status::labeled;
  a.partition = partition;
  a.similarity = sim;
  a.annotator = "ann";
  return a;
}

Assertion candidate(std::string c1, std::string c2, int partition = 2019, double sim = 0.5) {
  Assertion a;
  a.concept1 = std::move(c1);
  a.concept2 = std::move(c2);
  a.partition = partition;
  a.similarity = sim;
  return a;
}

std::vector<std::string> texts(const std::vector<Assertion>& as) {
  std::vector<std::string> out;
  for (const auto& a : as) out.push_back(format_assertion(a));
  return out;
}

const KnowledgeBase& reference_kb() {
  static const KnowledgeBase kb = load_kb(testkit::fixture("reference_kb.jsonl"));
  return kb;
}

}  // namespace

TEST(Labels, ExactlyNineAndParse) {
  EXPECT_EQ(kAllLabels.size(), 9u);
  std::set<std::string> names;
  for (auto l : kAllLabels) {
    names.insert(std::string(to_string(l)));
    EXPECT_EQ(parse_label(to_string(l)), l);
    EXPECT_FALSE(label_rule(l).empty());
  }
  EXPECT_EQ(names.size(), 9u);
  EXPECT_EQ(parse_label("partOf"), SemanticLabel::PartOf);
  EXPECT_EQ(parse_label("DUETO"), SemanticLabel::dueTo);
  EXPECT_FALSE(parse_label("MERONYM"));
  EXPECT_FALSE(parse_label(""));
}

TEST(Assertion, Formatting) {
  EXPECT_EQ(format_assertion(labeled("tremor", SemanticLabel::SYN, "aftershock", 2019, 0.9)),
            "[tremor SYN aftershock]");
  EXPECT_EQ(format_assertion(candidate("tremor", "quake")), "[tremor ? quake]");
}

TEST(KnowledgeBase, AddEnforcesInvariants) {
  KnowledgeBase kb;
  EXPECT_THROW(kb.add(candidate("storm", "storm")), DataError);
  auto bad_sim = candidate("a", "b");
  bad_sim.similarity = 1.5;
  EXPECT_THROW(kb.add(bad_sim), DataError);
  auto labeled_candidate = candidate("a", "b");
  labeled_candidate.label = SemanticLabel::SYN;
  EXPECT_THROW(kb.add(labeled_candidate), DataError);
  auto unlabeled = candidate("a", "b");
  unlabeled.status = Status::labeled;
  EXPECT_THROW(kb.add(unlabeled), DataError);

  EXPECT_EQ(kb.add(labeled("a", SemanticLabel::SYN, "b", 2019, 0.5)).id, 1u);
  EXPECT_THROW(kb.add(labeled("a", SemanticLabel::SYN, "b", 2019, 0.7)), DataError);
  EXPECT_NO_THROW(kb.add(labeled("a", SemanticLabel::SYN, "b", 2018, 0.7)));
  EXPECT_NO_THROW(kb.add(labeled("a", SemanticLabel::IS, "b", 2019, 0.7)));
  auto dup_id = candidate("c", "d");
  dup_id.id = 1;
  EXPECT_THROW(kb.add(dup_id), DataError);
  EXPECT_TRUE(kb.indices_consistent());
}

TEST(KnowledgeBase, LabelingLifecycle) {
  KnowledgeBase kb;
  const auto id = kb.add(candidate("tremor", "aftershock")).id;
  const auto& a = kb.label(id, SemanticLabel::SYN, "ana", {false, "2020-01-01T00:00:00Z"});
  EXPECT_EQ(format_assertion(a), "[tremor SYN aftershock]");
  EXPECT_EQ(a.status, Status::labeled);
  EXPECT_EQ(a.annotator, "ana");
  EXPECT_EQ(a.labeled_at, "2020-01-01T00:00:00Z");

  EXPECT_THROW(kb.label(id, SemanticLabel::ANT, "ana"), ConflictError);
  EXPECT_EQ(kb.label(id, SemanticLabel::RAND, "ben", {true, std::nullopt}).label, SemanticLabel::RAND);
  EXPECT_THROW(kb.label(999, SemanticLabel::SYN, "ana"), NotFoundError);

  const auto other = kb.add(candidate("tremor", "aftershock")).id;
  EXPECT_THROW(kb.label(other, SemanticLabel::RAND, "ana"), ConflictError);  // duplicate tuple
  EXPECT_EQ(kb.at(other).status, Status::candidate);
  EXPECT_EQ(kb.reject(other, "ana").status, Status::rejected);
  EXPECT_FALSE(kb.at(other).label);
  EXPECT_THROW(kb.reject(other, "ana"), ConflictError);
  EXPECT_TRUE(kb.indices_consistent());
}

TEST(KnowledgeBase, CandidatesAndStatus) {
  KnowledgeBase kb;
  kb.add(candidate("a", "b", 2018));
  kb.add(candidate("a", "c", 2019));
  kb.add(candidate("a", "d", 2019));
  kb.label(2, SemanticLabel::DO, "x");
  EXPECT_EQ(kb.candidates().size(), 2u);
  EXPECT_EQ(kb.candidates(2019).size(), 1u);
  EXPECT_EQ(kb.candidates(std::nullopt, 1).size(), 1u);
  EXPECT_EQ(kb.with_status(Status::labeled).size(), 1u);
  EXPECT_EQ(kb.partitions(), (std::vector<int>{2018, 2019}));
}

TEST(Expand, TremorFixtureModel) {
  const auto model = embedding::EmbeddingModel::from_vectors(
      2019, {{"tremor", {1, 0, 0}}, {"aftershock", {0.95f, 0.1f, 0}}, {"quake", {0.9f, 0.3f, 0}},
             {"earthquake", {0.8f, 0.5f, 0.1f}}, {"6.1", {0.99f, 0, 0}}, {"ang", {0.97f, 0, 0.05f}},
             {"market", {0, 0, 1}}});
  ExpandOptions options{3, {"ang"}};
  const auto r = expand_seeds({{"tremor", lexstats::Pos::noun, 2019, 1, 40}}, model, options);
  ASSERT_EQ(r.candidates.size(), 3u);
  EXPECT_TRUE(r.skipped_seeds.empty());
  KnowledgeBase kb;
  const std::vector<SemanticLabel> labels = {SemanticLabel::SYN, SemanticLabel::dueTo, SemanticLabel::dueTo};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = r.candidates[i];
    EXPECT_EQ(c.status, Status::candidate);
    EXPECT_EQ(c.provenance.seed, "tremor");
    EXPECT_EQ(c.partition, 2019);
    EXPECT_NEAR(c.similarity, embedding::cosine(model, "tremor", c.concept2), 1e-12);
    kb.label(kb.add(c).id, labels[i], "ann");
  }
  EXPECT_EQ(texts(kb.query("tremor", Direction::either)),
            (std::vector<std::string>{"[tremor SYN aftershock]", "[tremor dueTo quake]", "[tremor dueTo earthquake]"}));
}

TEST(Expand, OovSeedSkippedAndPartitionChecked) {
  const auto model = embedding::EmbeddingModel::from_vectors(2019, {{"a", {1, 0}}, {"b", {0, 1}}});
  const auto r = expand_seeds({{"lahar", lexstats::Pos::noun, 2019, 1, 5}}, model, {});
  EXPECT_TRUE(r.candidates.empty());
  EXPECT_EQ(r.skipped_seeds, std::vector<std::string>{"lahar"});
  EXPECT_THROW(expand_seeds({{"a", lexstats::Pos::noun, 2018, 1, 5}}, model, {}), DataError);
}

TEST(Expand, FullScale150SeedsGive450) {
  std::vector<std::pair<std::string, std::vector<float>>> rows;
  std::mt19937 rng(1);
  std::normal_distribution<float> v(0, 1);
  for (int i = 0; i < 200; ++i) rows.push_back({"w" + std::to_string(i), {v(rng), v(rng), v(rng)}});
  std::size_t total = 0;
  for (int year : {2017, 2018, 2019}) {
    const auto model = embedding::EmbeddingModel::from_vectors(year, rows);
    std::vector<lexstats::SeedWord> seeds;
    for (int i = 0; i < 50; ++i) seeds.push_back({"w" + std::to_string(i + year % 7), lexstats::Pos::noun, year, i + 1, 1});
    total += expand_seeds(seeds, model, {3, {}}).candidates.size();
  }
  EXPECT_EQ(total, 450u);
}

TEST(Expand, CountMatchesBruteForce) {
  const auto r = checks::expansion_counts(300, 23);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Expand, NumericTokens) {
  EXPECT_TRUE(is_numeric_token("6.1"));
  EXPECT_TRUE(is_numeric_token("1,500"));
  EXPECT_TRUE(is_numeric_token("2019"));
  EXPECT_FALSE(is_numeric_token("signal3"));
  EXPECT_FALSE(is_numeric_token(""));
  EXPECT_FALSE(is_numeric_token("."));
}

TEST(Query, ReferenceFixture) {
  const auto& kb = reference_kb();
  EXPECT_EQ(texts(kb.query("experts", Direction::as_subject, {std::nullopt, 2019})),
            (std::vector<std::string>{"[experts IS supporting]", "[experts DO recommend]", "[experts DO impose]"}));
  const auto police_do = kb.query("police", Direction::as_subject, {SemanticLabel::DO, std::nullopt});
  const auto police_all = kb.query("police", Direction::as_subject);
  std::size_t do_count = 0;
  for (const auto& a : police_all) do_count += a.label == SemanticLabel::DO;
  EXPECT_EQ(police_do.size(), do_count);
  EXPECT_EQ(police_do.size(), 8u);
  for (const auto& a : police_do) EXPECT_EQ(a.label, SemanticLabel::DO);
  for (std::size_t i = 1; i < police_all.size(); ++i) {
    const auto& p = police_all[i - 1];
    const auto& q = police_all[i];
    EXPECT_TRUE(p.partition < q.partition || (p.partition == q.partition && p.similarity >= q.similarity));
  }
  EXPECT_TRUE(KnowledgeBase{}.query("experts", Direction::either).empty());
  EXPECT_TRUE(kb.query("nonexistent", Direction::either).empty());
}

TEST(Query, SubjectUnionObjectIsEither) {
  std::mt19937 rng(4);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 50; ++trial) {
    KnowledgeBase kb;
    for (int i = 0; i < 40; ++i) {
      auto c1 = words[rng() % 5], c2 = words[rng() % 5];
      if (c1 == c2) continue;
      try {
        kb.add(labeled(c1, kAllLabels[rng() % 9], c2, 2017 + static_cast<int>(rng() % 3),
                       std::uniform_real_distribution<double>(-1, 1)(rng)));
      } catch (const DataError&) {
      }
    }
    for (const auto& w : words) {
      std::set<AssertionId> either, both;
      for (const auto& a : kb.query(w, Direction::either)) either.insert(a.id);
      for (const auto& a : kb.query(w, Direction::as_subject)) both.insert(a.id);
      for (const auto& a : kb.query(w, Direction::as_object)) both.insert(a.id);
      EXPECT_EQ(either, both);
    }
  }
}

TEST(Chain, RescueHierarchy) {
  const auto h = hypernym_chain(reference_kb(), "rescue");
  ASSERT_EQ(h.above.size(), 1u);
  EXPECT_EQ(h.above[0].term, "operations");
  ASSERT_EQ(h.below.size(), 2u);
  EXPECT_EQ(h.below[0].term, "retrieval");
  EXPECT_EQ(h.below[1].term, "aid");
  EXPECT_TRUE(h.cycles.empty());
  EXPECT_EQ(render_hierarchy(h), "rescue\n  ^ operations\n  v retrieval\n  v aid\n");
}

TEST(Chain, SingletonAndMultiLevel) {
  KnowledgeBase kb;
  kb.add(labeled("typhoon", SemanticLabel::SYN, "storm", 2019, 0.9));
  const auto single = hypernym_chain(kb, "typhoon");
  EXPECT_TRUE(single.above.empty());
  EXPECT_TRUE(single.below.empty());
  EXPECT_EQ(single.node_count(), 1u);

  kb.add(labeled("rescue", SemanticLabel::PartOf, "operations", 2019, 0.9));
  kb.add(labeled("operations", SemanticLabel::PartOf, "response", 2019, 0.9));
  kb.add(labeled("rescue", SemanticLabel::HYP, "aid", 2018, 0.9));
  kb.add(labeled("medic", SemanticLabel::PartOf, "aid", 2018, 0.9));
  const auto h = hypernym_chain(kb, "rescue");
  EXPECT_EQ(render_hierarchy(h), "rescue\n  ^ operations\n    ^ response\n  v aid\n    v medic\n");
  EXPECT_EQ(h.node_count(), 5u);
}

TEST(Chain, CycleTerminatesAndIsFlagged) {
  KnowledgeBase kb;
  kb.add(labeled("a", SemanticLabel::HYP, "b", 2019, 0.9));
  kb.add(labeled("b", SemanticLabel::HYP, "a", 2019, 0.9));
  const auto h = hypernym_chain(kb, "a");
  EXPECT_FALSE(h.cycles.empty());
  EXPECT_LE(h.node_count(), 2u);
  EXPECT_NE(render_hierarchy(h).find("cycle:"), std::string::npos);
}

TEST(Chain, TerminatesOnRandomGraphs) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    KnowledgeBase kb;
    std::set<std::string> concepts;
    for (int i = 0; i < 30; ++i) {
      const auto c1 = "n" + std::to_string(rng() % 8), c2 = "n" + std::to_string(rng() % 8);
      if (c1 == c2) continue;
      try {
        kb.add(labeled(c1, rng() % 2 ? SemanticLabel::HYP : SemanticLabel::PartOf, c2, 2019, 0.5));
        concepts.insert(c1);
        concepts.insert(c2);
      } catch (const DataError&) {
      }
    }
    const auto h = hypernym_chain(kb, "n0");
    EXPECT_LE(h.node_count(), std::max<std::size_t>(1, concepts.size()));
  }
}

TEST(KbFile, ReferenceFixtureRoundTrip) {
  testkit::TempDir dir;
  const auto& kb = reference_kb();
  EXPECT_EQ(kb.size(), 450u);
  save_kb(kb, dir / "kb.jsonl");
  const auto back = load_kb(dir / "kb.jsonl");
  EXPECT_EQ(back.assertions(), kb.assertions());
  save_kb(KnowledgeBase{}, dir / "empty.jsonl");
  EXPECT_TRUE(load_kb(dir / "empty.jsonl").empty());
}

TEST(KbFile, RandomRoundTrips) {
  const auto r = checks::kb_roundtrip(40, 5);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(KbFile, UnknownLabelNamedWithLine) {
  testkit::TempDir dir;
  auto first = labeled("a", SemanticLabel::SYN, "b", 2019, 0.5);
  first.id = 1;
  auto second = first;
  second.id = 2;
  const auto line = assertion_to_json_line(first);
  auto bad = assertion_to_json_line(second);
  bad.replace(bad.find("\"SYN\""), 5, "\"MERONYM\"");
  testkit::write_file(dir / "kb.jsonl", line + "\n" + bad + "\n");
  try {
    load_kb(dir / "kb.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("MERONYM"), std::string::npos);
  }
  testkit::write_file(dir / "kb.jsonl", "{oops\n");
  EXPECT_THROW(load_kb(dir / "kb.jsonl"), ParseError);
}
