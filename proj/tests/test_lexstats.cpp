#include <gtest/gtest.h>

#include <random>

#include "checks.hpp"
#include "ontoforge/corpus.hpp"
#include "ontoforge/error.hpp"
#include "ontoforge/lexstats.hpp"
#include "support.hpp"

using namespace ontoforge;
using namespace ontoforge::lexstats;

namespace {

corpus::Partition partition(int year, std::vector<std::string> bodies) {
  corpus::Partition p{year, {}};
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    p.documents.push_back({std::to_string(i), {year, 1, 1}, "", bodies[i], std::nullopt});
  }
  return p;
}

FrequencyTable table(std::map<std::string, std::uint64_t> counts) { return {2019, std::move(counts)}; }

std::vector<std::string> tokens_of(const std::vector<SeedWord>& seeds) {
  std::vector<std::string> out;
  for (const auto& s : seeds) out.push_back(s.token);
  return out;
}

}  // namespace

TEST(TermFrequencies, DirectCount) {
  const auto t = term_frequencies(partition(2019, {"baha baha ulan"}));
  EXPECT_EQ(t.counts, (std::map<std::string, std::uint64_t>{{"baha", 2}, {"ulan", 1}}));
  EXPECT_EQ(t.total(), 3u);
  EXPECT_EQ(t.count("absent"), 0u);
  EXPECT_THROW(term_frequencies(partition(2019, {})), DataError);
}

TEST(TermFrequencies, Additive) {
  const auto a = partition(2019, {"baha ulan", "signal"});
  const auto b = partition(2019, {"ulan ulan lindol"});
  auto merged = a;
  merged.documents.insert(merged.documents.end(), b.documents.begin(), b.documents.end());
  auto sum = term_frequencies(a);
  sum += term_frequencies(b);
  EXPECT_EQ(sum.counts, term_frequencies(merged).counts);
}

TEST(ExtractSeeds, StoplistedAndTiedExamples) {
  PosLexicon lex(Pos::noun);
  const Stoplist stop = {"ang"};
  const auto seeds = extract_seeds(table({{"flood", 10}, {"rain", 5}, {"ang", 50}, {"x", 1}}), lex, stop, {2, false});
  ASSERT_EQ(seeds.size(), 2u);
  EXPECT_EQ(seeds[0], (SeedWord{"flood", Pos::noun, 2019, 1, 10}));
  EXPECT_EQ(seeds[1], (SeedWord{"rain", Pos::noun, 2019, 2, 5}));

  const auto tied = extract_seeds(table({{"b", 3}, {"a", 3}, {"c", 3}}), lex, {}, {2, false});
  EXPECT_EQ(tokens_of(tied), (std::vector<std::string>{"a", "b"}));
  EXPECT_THROW(extract_seeds(table({}), lex, {}, {0, false}), ConfigError);
}

TEST(ExtractSeeds, PosFilterBeforeOrAfterRank) {
  PosLexicon lex;
  lex.set("flood", Pos::noun);
  lex.set("rain", Pos::noun);
  lex.set("very", Pos::other);
  const auto t = table({{"very", 20}, {"flood", 10}, {"rain", 5}, {"untagged", 30}});
  EXPECT_EQ(tokens_of(extract_seeds(t, lex, {}, {2, false})), (std::vector<std::string>{"flood", "rain"}));
  const auto after = extract_seeds(t, lex, {}, {3, true});
  ASSERT_EQ(after.size(), 1u);
  EXPECT_EQ(after[0].token, "flood");
  EXPECT_EQ(after[0].rank, 3);
}

TEST(ExtractSeeds, FiftyPerPartitionAtFullScale) {
  PosLexicon lex(Pos::noun);
  std::size_t total = 0;
  for (int year : {2017, 2018, 2019}) {
    std::map<std::string, std::uint64_t> counts;
    for (int i = 0; i < 400; ++i) counts["w" + std::to_string(i)] = 1 + (i * 37) % 101;
    total += extract_seeds({year, counts}, lex, {}, {50, false}).size();
  }
  EXPECT_EQ(total, 150u);
}

TEST(ExtractSeeds, LexiconFixtureCategories) {
  const auto lex = PosLexicon::load(testkit::fixture("toy_lexicon.tsv"));
  const auto stop = load_stoplist(testkit::fixture("toy_stoplist.txt"));
  const auto c = corpus::load_corpus(testkit::fixture("toy_corpus.jsonl"));
  std::map<std::string, Pos> seen;
  for (const auto& p : corpus::partition_by_year(c)) {
    for (const auto& s : extract_seeds(term_frequencies(p), lex, stop, {5, false})) seen[s.token] = s.pos;
  }
  EXPECT_EQ(seen.size(), 15u);
  EXPECT_EQ(seen.at("family"), Pos::noun);
  EXPECT_EQ(seen.at("update"), Pos::verb);
  EXPECT_EQ(seen.at("weakened"), Pos::adjective);
  EXPECT_EQ(lex.lookup("never-seen"), Pos::other);
}

TEST(ExtractSeeds, PropertiesOnRandomTables) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, std::uint64_t> counts;
    PosLexicon lex;
    Stoplist stop;
    for (int i = 0; i < 25; ++i) {
      const std::string w = "w" + std::to_string(i);
      counts[w] = std::uniform_int_distribution<int>(1, 8)(rng);
      lex.set(w, static_cast<Pos>(std::uniform_int_distribution<int>(0, 3)(rng)));
      if (std::uniform_int_distribution<int>(0, 5)(rng) == 0) stop.insert(w);
    }
    std::vector<SeedWord> previous;
    for (std::size_t k = 1; k <= 26; ++k) {
      const auto seeds = extract_seeds({1, counts}, lex, stop, {k, false});
      EXPECT_LE(seeds.size(), k);
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        EXPECT_FALSE(stop.contains(seeds[i].token));
        EXPECT_TRUE(is_content_pos(seeds[i].pos));
        EXPECT_EQ(seeds[i].rank, static_cast<int>(i + 1));
        if (i) {
          const auto& a = seeds[i - 1];
          const auto& b = seeds[i];
          EXPECT_TRUE(a.frequency > b.frequency || (a.frequency == b.frequency && a.token < b.token));
        }
      }
      ASSERT_GE(seeds.size(), previous.size());
      EXPECT_TRUE(std::equal(previous.begin(), previous.end(), seeds.begin())) << "prefix broken at k=" << k;
      previous = seeds;
    }
  }
}

TEST(ExtractSeeds, MatchesBruteForceOn100Partitions) {
  const auto r = checks::seeds_match_bruteforce(100, 3);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Seeds, FileRoundTripAndErrors) {
  testkit::TempDir dir;
  const std::vector<SeedWord> seeds = {{"family", Pos::noun, 2017, 1, 90}, {"update", Pos::verb, 2017, 2, 60}};
  save_seeds(seeds, dir / "seeds.tsv");
  EXPECT_EQ(load_seeds(dir / "seeds.tsv"), seeds);
  testkit::write_file(dir / "bad.tsv", "partition\trank\ttoken\tpos\tfrequency\n2017\t1\tx\tbogus\t3\n");
  EXPECT_THROW(load_seeds(dir / "bad.tsv"), ParseError);
  testkit::write_file(dir / "lex.tsv", "flood\tnoun\nrain\tweird\n");
  EXPECT_THROW(PosLexicon::load(dir / "lex.tsv"), ParseError);
}
