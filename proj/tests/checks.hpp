#pragma once

// Randomized property checks and oracles shared by the unit tests and the
// acceptance binary. Each returns ok == false with a description of the
// first counterexample.

#include <cstdint>
#include <string>

#include "ontoforge/embedding.hpp"

namespace ontoforge::checks {

struct Result {
  bool ok = true;
  std::string detail;
  double value = 0.0;  // check-specific measurement
};

// Analytic SGNS gradient vs central differences of an independent loss.
// value = worst relative error over all models.
Result gradient_check(int models, std::uint64_t seed, double h = 1e-5, double tolerance = 1e-4);

struct Separation {
  double intra = 0.0;
  double inter = 0.0;
  double gap() const { return intra - inter; }
};
// Two disjoint topic vocabularies; every sentence draws from one topic.
corpus::TokenStream two_topic_corpus(std::size_t sentences, std::uint64_t seed);
Separation topic_separation(const embedding::EmbeddingModel& model);

// Term counts and top-k seeds against a brute-force tally.
Result seeds_match_bruteforce(int partitions, std::uint64_t seed);
// Knowledge base save/load equality on random assertion sets.
Result kb_roundtrip(int trials, std::uint64_t seed);
// Vector-file save/load: bit-identical rows and neighbor lists.
Result model_roundtrip(int trials, std::uint64_t seed);
// persistent/appeared/disappeared partition the two association sets.
Result diff_identities(int trials, std::uint64_t seed);
// Order, exclusion and content of nearest_neighbors vs a full scan.
Result neighbors_sorted(int trials, std::uint64_t seed);
// Candidate count = sum over in-vocab seeds of min(per_seed, eligible).
Result expansion_counts(int trials, std::uint64_t seed);

}  // namespace ontoforge::checks
