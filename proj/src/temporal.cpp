#include "ontoforge/temporal.hpp"

#include <algorithm>

#include <json.hpp>

#include "ontoforge/error.hpp"

namespace ontoforge::temporal {

using ontology::Assertion;
using ontology::Direction;
using ontology::KnowledgeBase;

namespace {

std::vector<Assertion> subject_rows(const KnowledgeBase& kb, std::string_view term, int partition) {
  // query() already orders by similarity descending within a partition.
  return kb.query(term, Direction::as_subject, {std::nullopt, partition});
}

std::set<Association> pairs_of(const std::vector<Assertion>& rows) {
  std::set<Association> out;
  for (const auto& a : rows) out.emplace(*a.label, a.concept2);
  return out;
}

std::string association_text(const Association& p) {
  return "(" + std::string(ontology::to_string(p.first)) + ", " + p.second + ")";
}

nlohmann::ordered_json association_list(const std::set<Association>& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [label, c2] : s) {
    arr.push_back({{"label", std::string(ontology::to_string(label))}, {"concept2", c2}});
  }
  return arr;
}

}  // namespace

Timeline entity_timeline(const KnowledgeBase& kb, std::string_view term, std::size_t n) {
  Timeline t;
  t.term = std::string(term);
  for (int p : kb.partitions()) {
    auto rows = subject_rows(kb, term, p);
    if (rows.size() > n) rows.resize(n);
    t.rows.push_back({p, std::move(rows)});
  }
  return t;
}

std::size_t LabelDistribution::total(int partition) const {
  auto it = counts.find(partition);
  if (it == counts.end()) return 0;
  std::size_t n = 0;
  for (const auto& [label, c] : it->second) n += c;
  return n;
}

LabelDistribution label_distribution(const KnowledgeBase& kb, std::string_view term) {
  LabelDistribution d;
  d.term = std::string(term);
  for (int p : kb.partitions()) d.counts[p];
  for (const auto& a : kb.query(term, Direction::as_subject)) ++d.counts[a.partition][*a.label];
  return d;
}

AssociationDiff association_diff(const KnowledgeBase& kb, std::string_view term,
                                 std::optional<std::size_t> top_n) {
  const auto partitions = kb.partitions();
  if (partitions.size() < 2) {
    throw DataError("association diff needs at least 2 partitions, knowledge base has " +
                    std::to_string(partitions.size()));
  }
  std::vector<std::set<Association>> per_partition;
  for (int p : partitions) {
    auto rows = subject_rows(kb, term, p);
    if (top_n && rows.size() > *top_n) rows.resize(*top_n);
    per_partition.push_back(pairs_of(rows));
  }

  AssociationDiff d;
  d.term = std::string(term);
  for (std::size_t i = 0; i + 1 < partitions.size(); ++i) {
    const auto& before = per_partition[i];
    const auto& after = per_partition[i + 1];
    PartitionDiff step;
    step.from = partitions[i];
    step.to = partitions[i + 1];
    std::set_intersection(before.begin(), before.end(), after.begin(), after.end(),
                          std::inserter(step.persistent, step.persistent.end()));
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                        std::inserter(step.appeared, step.appeared.end()));
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::inserter(step.disappeared, step.disappeared.end()));
    d.steps.push_back(std::move(step));
  }
  return d;
}

std::string render_timeline(const Timeline& t) {
  std::size_t depth = 0;
  for (const auto& r : t.rows) depth = std::max(depth, r.assertions.size());

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Seed"};
  for (const auto& r : t.rows) header.push_back(std::to_string(r.partition));
  grid.push_back(header);
  for (std::size_t i = 0; i < std::max<std::size_t>(depth, 1); ++i) {
    std::vector<std::string> line{i == 0 ? t.term : ""};
    for (const auto& r : t.rows) {
      line.push_back(i < r.assertions.size() ? ontology::format_assertion(r.assertions[i]) : "");
    }
    grid.push_back(std::move(line));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string out;
  for (const auto& line : grid) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) text += " | ";
      text += line[c];
      if (c + 1 < line.size()) text += std::string(width[c] - line[c].size(), ' ');
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + "\n";
  }
  return out;
}

std::string timeline_to_json(const Timeline& t) {
  nlohmann::ordered_json j;
  j["concept"] = t.term;
  auto& rows = j["partitions"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    auto items = nlohmann::ordered_json::array();
    for (const auto& a : r.assertions) {
      items.push_back({{"id", a.id},
                       {"label", std::string(ontology::to_string(*a.label))},
                       {"concept2", a.concept2},
                       {"similarity", a.similarity},
                       {"text", ontology::format_assertion(a)}});
    }
    rows.push_back({{"partition", r.partition}, {"assertions", std::move(items)}});
  }
  return j.dump();
}

std::string render_diff(const AssociationDiff& d) {
  std::string out;
  const auto list = [&](const char* name, const std::set<Association>& s) {
    out += std::string("  ") + name + ":";
    if (s.empty()) out += " -";
    for (const auto& p : s) out += " " + association_text(p);
    out += "\n";
  };
  for (const auto& step : d.steps) {
    out += d.term + " " + std::to_string(step.from) + " -> " + std::to_string(step.to) + "\n";
    list("persistent", step.persistent);
    list("appeared", step.appeared);
    list("disappeared", step.disappeared);
  }
  return out;
}

std::string diff_to_json(const AssociationDiff& d) {
  nlohmann::ordered_json j;
  j["concept"] = d.term;
  auto& steps = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : d.steps) {
    steps.push_back({{"from", s.from},
                     {"to", s.to},
                     {"persistent", association_list(s.persistent)},
                     {"appeared", association_list(s.appeared)},
                     {"disappeared", association_list(s.disappeared)}});
  }
  return j.dump();
}

}  // namespace ontoforge::temporal
