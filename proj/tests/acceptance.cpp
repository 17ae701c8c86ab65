// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "checks.hpp"
#include "ontoforge/cli.hpp"
#include "ontoforge/embedding.hpp"
#include "ontoforge/ontology.hpp"
#include "support.hpp"

namespace {

using namespace ontoforge;
using testkit::fixture;

struct Outcome {
  bool ok;
  std::string detail;
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

Outcome pipeline_scale_law() {
  testkit::TempDir a, b;
  const auto run = [&](const testkit::TempDir& dir) {
    return cli({"pipeline", "--corpus", fixture("toy_corpus.jsonl").string(), "--k", "5",
                "--per-seed", "3", "--seed", "13", "--deterministic", "--out", dir.path().string()});
  };
  const auto first = run(a);
  const auto second = run(b);
  if (first.code != 0 || second.code != 0) return {false, "pipeline exited non-zero: " + first.err};
  const auto kb = ontology::load_kb(a / "kb.jsonl");
  std::size_t candidates = 0;
  for (const auto& x : kb.assertions()) candidates += x.status == ontology::Status::candidate;
  if (candidates != 45 || kb.size() != 45) {
    return {false, std::to_string(candidates) + " candidates (expected 45)"};
  }
  if (contains(first.err, "not in the model vocabulary")) {
    return {false, "a seed was out of vocabulary"};
  }
  for (const char* name : {"kb.jsonl", "seeds.tsv", "model_2017.vec", "model_2018.vec", "model_2019.vec"}) {
    if (testkit::read_file(a / name) != testkit::read_file(b / name)) {
      return {false, std::string(name) + " differs between runs"};
    }
  }
  return {true, "45 candidates, byte-identical outputs across two runs"};
}

Outcome embedding_correctness() {
  const auto grad = checks::gradient_check(100, 7);
  if (!grad.ok) return {false, "gradient: " + grad.detail};
  const auto corpus = checks::two_topic_corpus(3000, 11);
  const auto model = embedding::train(corpus, embedding::TrainConfig{});
  const auto sep = checks::topic_separation(model);
  std::ostringstream os;
  os << "max gradient rel err " << grad.value << "; intra " << sep.intra << " inter " << sep.inter
     << " gap " << sep.gap();
  return {sep.gap() >= 0.2, os.str()};
}

Outcome agreeability_report() {
  const std::vector<std::pair<int, double>> expected = {{2019, 0.64}, {2018, 0.52}, {2017, 0.49}};
  std::ostringstream os;
  bool ok = true;
  for (const auto& [year, rate] : expected) {
    const auto r = cli({"validate", "--kb", fixture("reference_kb.jsonl").string(), "--judgments",
                        fixture("reference_judgments.csv").string(), "report", "--partition",
                        std::to_string(year), "--format", "json"});
    if (r.code != 0) return {false, "validate report failed: " + r.err};
    const double got = nlohmann::json::parse(r.out).at("agreeability").get<double>();
    os << year << "=" << got << " ";
    ok = ok && std::abs(got - rate) <= 0.005;
  }
  return {ok, os.str()};
}

Outcome tremor_and_chain() {
  const std::string kb = fixture("reference_kb.jsonl").string();
  const auto q = cli({"kb", "--kb", kb, "query", "tremor", "--format", "json"});
  if (q.code != 0) return {false, "kb query failed: " + q.err};
  std::vector<std::string> got;
  for (const auto& a : nlohmann::json::parse(q.out)) {
    got.push_back(a["concept1"].get<std::string>() + " " + a["label"].get<std::string>() + " " +
                  a["concept2"].get<std::string>());
  }
  const std::vector<std::string> want = {"tremor SYN aftershock", "tremor dueTo quake",
                                         "tremor dueTo earthquake"};
  if (got != want) return {false, "kb query tremor returned " + std::to_string(got.size()) + " rows"};

  const auto c = cli({"kb", "--kb", kb, "chain", "rescue"});
  const std::string fig = "rescue\n  ^ operations\n  v retrieval\n  v aid\n";
  if (c.code != 0 || c.out != fig) return {false, "kb chain rescue printed:\n" + c.out};
  return {true, "3 tremor assertions; operations above rescue, retrieval and aid below"};
}

Outcome timeline_and_diff() {
  const std::string kb = fixture("reference_kb.jsonl").string();
  const auto t = cli({"timeline", "police", "--n", "3", "--kb", kb, "--format", "json"});
  if (t.code != 0) return {false, "timeline failed: " + t.err};
  const auto timeline = nlohmann::json::parse(t.out);
  std::size_t with_risk = 0;
  for (const auto& row : timeline["partitions"]) {
    for (const auto& a : row["assertions"]) {
      with_risk += a["label"] == "DO" && a["concept2"] == "risk";
    }
  }
  if (timeline["partitions"].size() != 3 || with_risk != 3) {
    return {false, "(DO, risk) in " + std::to_string(with_risk) + " of 3 partitions"};
  }

  const auto d = cli({"diff", "earthquake", "--kb", kb, "--format", "json"});
  if (d.code != 0) return {false, "diff failed: " + d.err};
  const auto diff = nlohmann::json::parse(d.out);
  if (diff["steps"].size() != 2) return {false, "expected 2 partition steps"};
  for (const auto& step : diff["steps"]) {
    bool magnitude = false, quake = false;
    for (const auto& p : step["persistent"]) {
      magnitude = magnitude || (p["label"] == "IS" && p["concept2"] == "magnitude");
      quake = quake || (p["label"] == "SYN" && p["concept2"] == "quake");
    }
    if (!magnitude || !quake) return {false, "missing persistent pair in " + step.dump()};
  }
  return {true, "(DO, risk) in 2017-2019; (IS, magnitude), (SYN, quake) persistent in both steps"};
}

Outcome property_suites() {
  const std::vector<std::pair<std::string, checks::Result>> suites = {
      {"seeds", checks::seeds_match_bruteforce(100, 3)},
      {"kb round-trip", checks::kb_roundtrip(30, 5)},
      {"model round-trip", checks::model_roundtrip(30, 9)},
      {"diff identities", checks::diff_identities(200, 13)},
      {"neighbors", checks::neighbors_sorted(100, 17)},
  };
  for (const auto& [name, r] : suites) {
    if (!r.ok) return {false, name + ": " + r.detail};
  }
  return {true, "seeds x100, kb round-trip x30, model round-trip x30, diff x200, neighbors x100"};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    double limit_seconds;  // 0 = untimed
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "pipeline scale law", 10, pipeline_scale_law},
      {2, "embedding correctness", 60, embedding_correctness},
      {3, "agreeability fixture report", 0, agreeability_report},
      {4, "tremor query and rescue chain", 0, tremor_and_chain},
      {5, "timeline and association diff", 0, timeline_and_diff},
      {6, "property suites", 0, property_suites},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
      o.ok = false;
      o.detail += " (exceeded " + std::to_string(static_cast<int>(c.limit_seconds)) + " s)";
    }
    failures += !o.ok;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << c.number << " " << c.name << " ["
              << seconds << " s]: " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
