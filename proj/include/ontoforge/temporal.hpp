#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ontoforge/ontology.hpp"

namespace ontoforge::temporal {

struct TimelineRow {
  int partition = 0;
  std::vector<ontology::Assertion> assertions;  // similarity descending
};

struct Timeline {
  std::string term;
  std::vector<TimelineRow> rows;  // one per KB partition, ascending
};

// Top-n labeled assertions with concept1 == term in every partition of the KB.
Timeline entity_timeline(const ontology::KnowledgeBase& kb, std::string_view term, std::size_t n = 3);

struct LabelDistribution {
  std::string term;
  // Every KB partition is present; labels absent from a partition count 0.
  std::map<int, std::map<ontology::SemanticLabel, std::size_t>> counts;

  std::size_t total(int partition) const;
};

LabelDistribution label_distribution(const ontology::KnowledgeBase& kb, std::string_view term);

using Association = std::pair<ontology::SemanticLabel, std::string>;  // (label, concept2)

struct PartitionDiff {
  int from = 0;
  int to = 0;
  std::set<Association> persistent;
  std::set<Association> appeared;
  std::set<Association> disappeared;
};

struct AssociationDiff {
  std::string term;
  std::vector<PartitionDiff> steps;  // consecutive partition pairs
};

// Compares the (label, concept2) pairs of term's labeled assertions between
// consecutive KB partitions. With top_n set, only each partition's top_n
// assertions by similarity are compared. Throws DataError when the KB spans
// fewer than two partitions.
AssociationDiff association_diff(const ontology::KnowledgeBase& kb, std::string_view term,
                                 std::optional<std::size_t> top_n = std::nullopt);

std::string render_timeline(const Timeline& t);
std::string timeline_to_json(const Timeline& t);
std::string render_diff(const AssociationDiff& d);
std::string diff_to_json(const AssociationDiff& d);

}  // namespace ontoforge::temporal
