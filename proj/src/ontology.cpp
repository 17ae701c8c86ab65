#include "ontoforge/ontology.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ontoforge/error.hpp"
#include "text_io.hpp"

namespace ontoforge::ontology {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto lower = [](char c) { return c >= 'A' && c <= 'Z' ? char(c + 32) : c; };
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

bool query_order(const Assertion& a, const Assertion& b) {
  if (a.partition != b.partition) return a.partition < b.partition;
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

void check_shape(const Assertion& a) {
  if (a.concept1.empty() || a.concept2.empty()) throw DataError("assertion with an empty concept");
  if (a.concept1 == a.concept2) {
    throw DataError("assertion relates a concept to itself: " + a.concept1);
  }
  if (!std::isfinite(a.similarity) || a.similarity < -1.0 || a.similarity > 1.0) {
    throw DataError("similarity out of [-1, 1] for " + format_assertion(a));
  }
  if (a.status == Status::candidate && a.label) {
    throw DataError("candidate assertion carries a label: " + format_assertion(a));
  }
  if (a.status == Status::labeled && !a.label) {
    throw DataError("labeled assertion without a label: " + format_assertion(a));
  }
}

}  // namespace

std::string_view to_string(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::SYN: return "SYN";
    case SemanticLabel::ANT: return "ANT";
    case SemanticLabel::HYP: return "HYP";
    case SemanticLabel::DO: return "DO";
    case SemanticLabel::PartOf: return "PartOf";
    case SemanticLabel::IS: return "IS";
    case SemanticLabel::CAUSE: return "CAUSE";
    case SemanticLabel::dueTo: return "dueTo";
    case SemanticLabel::RAND: return "RAND";
  }
  return "RAND";
}

std::optional<SemanticLabel> parse_label(std::string_view text) {
  for (auto label : kAllLabels) {
    if (iequals(text, to_string(label))) return label;
  }
  return std::nullopt;
}

std::string_view label_rule(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::SYN: return "concept1 has the same meaning as concept2";
    case SemanticLabel::ANT: return "concept1 has the opposite meaning of concept2";
    case SemanticLabel::HYP: return "concept1 is broader in meaning than concept2";
    case SemanticLabel::DO: return "concept1 is the actor or doer of concept2";
    case SemanticLabel::PartOf: return "concept1 is a member of concept2";
    case SemanticLabel::IS: return "concept1 describes concept2";
    case SemanticLabel::CAUSE: return "concept1 is the cause of event concept2";
    case SemanticLabel::dueTo: return "concept1 is the resulting effect of event concept2";
    case SemanticLabel::RAND: return "concept1 has no direct relationship to concept2";
  }
  return "";
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::candidate: return "candidate";
    case Status::labeled: return "labeled";
    case Status::rejected: return "rejected";
  }
  return "candidate";
}

std::optional<Status> parse_status(std::string_view text) {
  if (text == "candidate") return Status::candidate;
  if (text == "labeled") return Status::labeled;
  if (text == "rejected") return Status::rejected;
  return std::nullopt;
}

std::string format_assertion(const Assertion& a) {
  std::string s = "[" + a.concept1 + " ";
  s += a.label ? std::string(to_string(*a.label)) : std::string("?");
  s += " " + a.concept2 + "]";
  return s;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --- KnowledgeBase ---------------------------------------------------------

const Assertion& KnowledgeBase::add(Assertion a) {
  check_shape(a);
  if (a.id == 0) a.id = next_id_;
  if (by_id_.contains(a.id)) throw DataError("duplicate assertion id " + std::to_string(a.id));
  if (a.status == Status::labeled) {
    Tuple t{a.concept1, *a.label, a.concept2, a.partition};
    if (labeled_tuples_.contains(t)) {
      throw DataError("duplicate labeled assertion " + format_assertion(a) + " in " +
                      std::to_string(a.partition));
    }
    labeled_tuples_.insert(std::move(t));
  }
  next_id_ = std::max(next_id_, a.id + 1);
  const std::size_t pos = assertions_.size();
  assertions_.push_back(std::move(a));
  index_insert(pos);
  return assertions_.back();
}

void KnowledgeBase::index_insert(std::size_t pos) {
  const Assertion& a = assertions_[pos];
  by_id_[a.id] = pos;
  by_concept1_[a.concept1].push_back(pos);
  by_concept2_[a.concept2].push_back(pos);
  by_partition_[a.partition].push_back(pos);
  if (a.status == Status::labeled) by_label_[*a.label].insert(pos);
}

void KnowledgeBase::set_label_index(std::size_t pos, std::optional<SemanticLabel> old_label) {
  if (old_label) {
    auto it = by_label_.find(*old_label);
    if (it != by_label_.end()) {
      it->second.erase(pos);
      if (it->second.empty()) by_label_.erase(it);
    }
  }
  const Assertion& a = assertions_[pos];
  if (a.status == Status::labeled) by_label_[*a.label].insert(pos);
}

Assertion& KnowledgeBase::mutable_at(AssertionId id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw NotFoundError("unknown assertion id " + std::to_string(id));
  return assertions_[it->second];
}

const Assertion* KnowledgeBase::find(AssertionId id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &assertions_[it->second];
}

const Assertion& KnowledgeBase::at(AssertionId id) const {
  const Assertion* a = find(id);
  if (!a) throw NotFoundError("unknown assertion id " + std::to_string(id));
  return *a;
}

const Assertion& KnowledgeBase::label(AssertionId id, SemanticLabel label,
                                      const std::string& annotator,
                                      const LabelOptions& options) {
  Assertion& a = mutable_at(id);
  if (a.status != Status::candidate && !options.force) {
    throw ConflictError("assertion " + std::to_string(id) + " is already " +
                        std::string(to_string(a.status)) + "; use force to relabel");
  }
  Tuple next{a.concept1, label, a.concept2, a.partition};
  const bool same = a.status == Status::labeled && a.label == label;
  if (!same && labeled_tuples_.contains(next)) {
    throw ConflictError("labeled assertion [" + a.concept1 + " " + std::string(to_string(label)) +
                        " " + a.concept2 + "] already exists in " + std::to_string(a.partition));
  }
  const auto old_label = a.status == Status::labeled ? a.label : std::nullopt;
  if (old_label) labeled_tuples_.erase(Tuple{a.concept1, *old_label, a.concept2, a.partition});
  labeled_tuples_.insert(std::move(next));

  a.label = label;
  a.status = Status::labeled;
  a.annotator = annotator;
  a.labeled_at = options.timestamp ? *options.timestamp : utc_timestamp();
  set_label_index(by_id_.at(id), old_label);
  return a;
}

const Assertion& KnowledgeBase::reject(AssertionId id, const std::string& annotator,
                                       const LabelOptions& options) {
  Assertion& a = mutable_at(id);
  if (a.status != Status::candidate && !options.force) {
    throw ConflictError("assertion " + std::to_string(id) + " is already " +
                        std::string(to_string(a.status)) + "; use force to reject");
  }
  const auto old_label = a.status == Status::labeled ? a.label : std::nullopt;
  if (old_label) labeled_tuples_.erase(Tuple{a.concept1, *old_label, a.concept2, a.partition});
  a.status = Status::rejected;
  a.label.reset();
  a.annotator = annotator;
  a.labeled_at = options.timestamp ? *options.timestamp : utc_timestamp();
  set_label_index(by_id_.at(id), old_label);
  return a;
}

std::vector<int> KnowledgeBase::partitions() const {
  std::vector<int> out;
  for (const auto& [p, v] : by_partition_) {
    if (!v.empty()) out.push_back(p);
  }
  return out;
}

std::vector<Assertion> KnowledgeBase::query(std::string_view term, Direction direction,
                                            const QueryFilter& filter) const {
  std::set<std::size_t> hits;
  const auto collect = [&](const auto& index) {
    auto it = index.find(term);
    if (it == index.end()) return;
    for (auto pos : it->second) {
      const Assertion& a = assertions_[pos];
      if (a.status != Status::labeled) continue;
      if (filter.label && a.label != filter.label) continue;
      if (filter.partition && a.partition != *filter.partition) continue;
      hits.insert(pos);
    }
  };
  if (direction != Direction::as_object) collect(by_concept1_);
  if (direction != Direction::as_subject) collect(by_concept2_);

  std::vector<Assertion> out;
  out.reserve(hits.size());
  for (auto pos : hits) out.push_back(assertions_[pos]);
  std::sort(out.begin(), out.end(), query_order);
  return out;
}

std::vector<Assertion> KnowledgeBase::with_status(Status status, std::optional<int> partition) const {
  std::vector<Assertion> out;
  for (const auto& a : assertions_) {
    if (a.status == status && (!partition || a.partition == *partition)) out.push_back(a);
  }
  return out;
}

std::vector<Assertion> KnowledgeBase::candidates(std::optional<int> partition,
                                                 std::size_t limit) const {
  std::vector<Assertion> out;
  for (const auto& a : assertions_) {
    if (out.size() >= limit) break;
    if (a.status == Status::candidate && (!partition || a.partition == *partition)) {
      out.push_back(a);
    }
  }
  return out;
}

bool KnowledgeBase::indices_consistent() const {
  KnowledgeBase rebuilt;
  for (const auto& a : assertions_) {
    try {
      rebuilt.add(a);
    } catch (const DataError&) {
      return false;
    }
  }
  return rebuilt.by_id_ == by_id_ && rebuilt.by_concept1_ == by_concept1_ &&
         rebuilt.by_concept2_ == by_concept2_ && rebuilt.by_partition_ == by_partition_ &&
         rebuilt.by_label_ == by_label_ && rebuilt.labeled_tuples_ == labeled_tuples_;
}

// --- expansion -------------------------------------------------------------

bool is_numeric_token(std::string_view token) {
  bool digit = false;
  for (char c : token) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c != '.' && c != ',') {
      return false;
    }
  }
  return digit;
}

ExpansionResult expand_seeds(const std::vector<lexstats::SeedWord>& seeds,
                             const embedding::EmbeddingModel& model,
                             const ExpandOptions& options) {
  if (options.per_seed == 0) throw ConfigError("per_seed must be at least 1");
  ExpansionResult result;
  for (const auto& seed : seeds) {
    if (seed.partition != model.partition()) {
      throw DataError("seed \"" + seed.token + "\" belongs to partition " +
                      std::to_string(seed.partition) + " but the model is for " +
                      std::to_string(model.partition()));
    }
    if (!model.contains(seed.token)) {
      result.skipped_seeds.push_back(seed.token);
      continue;
    }
    const auto ranked = embedding::nearest_neighbors(model, seed.token, model.vocab().size());
    std::size_t taken = 0;
    for (std::size_t r = 0; r < ranked.size() && taken < options.per_seed; ++r) {
      const auto& n = ranked[r];
      if (options.stoplist.contains(n.token) || is_numeric_token(n.token)) continue;
      Assertion a;
      a.concept1 = seed.token;
      a.concept2 = n.token;
      a.partition = model.partition();
      a.similarity = n.similarity;
      a.status = Status::candidate;
      a.provenance = {seed.token, static_cast<int>(r + 1)};
      result.candidates.push_back(std::move(a));
      ++taken;
    }
  }
  return result;
}

// --- hierarchy -------------------------------------------------------------

std::size_t Hierarchy::node_count() const {
  const auto count = [](const auto& self, const std::vector<ChainNode>& nodes) -> std::size_t {
    std::size_t n = 0;
    for (const auto& node : nodes) n += 1 + self(self, node.next);
    return n;
  };
  return 1 + count(count, above) + count(count, below);
}

namespace {

using Adjacency = std::map<std::string, std::vector<std::string>, std::less<>>;

void add_edge(Adjacency& adj, const std::string& from, const std::string& to) {
  auto& v = adj[from];
  if (std::find(v.begin(), v.end(), to) == v.end()) v.push_back(to);
}

struct Walker {
  const Adjacency& adj;
  std::unordered_set<std::string>& visited;
  std::vector<std::vector<std::string>>& cycles;
  std::vector<std::string> path;

  std::vector<ChainNode> expand(const std::string& from) {
    std::vector<ChainNode> out;
    auto it = adj.find(from);
    if (it == adj.end()) return out;
    path.push_back(from);
    for (const auto& to : it->second) {
      auto on_path = std::find(path.begin(), path.end(), to);
      if (on_path != path.end()) {
        std::vector<std::string> cycle(on_path, path.end());
        cycle.push_back(to);
        cycles.push_back(std::move(cycle));
        continue;
      }
      if (!visited.insert(to).second) continue;
      ChainNode node{to, {}};
      node.next = expand(to);
      out.push_back(std::move(node));
    }
    path.pop_back();
    return out;
  }
};

}  // namespace

Hierarchy hypernym_chain(const KnowledgeBase& kb, std::string_view term) {
  std::vector<Assertion> edges;
  for (const auto& a : kb.assertions()) {
    if (a.status == Status::labeled &&
        (a.label == SemanticLabel::HYP || a.label == SemanticLabel::PartOf)) {
      edges.push_back(a);
    }
  }
  std::sort(edges.begin(), edges.end(), query_order);

  Adjacency up;
  Adjacency down;
  for (const auto& a : edges) {
    if (a.label == SemanticLabel::HYP) {
      add_edge(down, a.concept1, a.concept2);
      add_edge(up, a.concept2, a.concept1);
    } else {
      add_edge(up, a.concept1, a.concept2);
      add_edge(down, a.concept2, a.concept1);
    }
  }

  Hierarchy h;
  h.term = std::string(term);
  std::unordered_set<std::string> visited{h.term};
  h.above = Walker{up, visited, h.cycles, {}}.expand(h.term);
  h.below = Walker{down, visited, h.cycles, {}}.expand(h.term);
  return h;
}

std::string render_hierarchy(const Hierarchy& h) {
  std::string out = h.term + "\n";
  const auto render = [&](const auto& self, const std::vector<ChainNode>& nodes, char mark,
                          std::size_t depth) -> void {
    for (const auto& n : nodes) {
      out += std::string(2 * depth, ' ') + mark + ' ' + n.term + '\n';
      self(self, n.next, mark, depth + 1);
    }
  };
  render(render, h.above, '^', 1);
  render(render, h.below, 'v', 1);
  for (const auto& cycle : h.cycles) {
    out += "cycle:";
    for (const auto& c : cycle) out += " " + c;
    out += '\n';
  }
  return out;
}

// --- persistence -----------------------------------------------------------

std::string assertion_to_json_line(const Assertion& a) {
  nlohmann::ordered_json j;
  j["id"] = a.id;
  j["concept1"] = a.concept1;
  j["label"] = a.label ? nlohmann::ordered_json(std::string(to_string(*a.label))) : nullptr;
  j["concept2"] = a.concept2;
  j["partition"] = a.partition;
  j["similarity"] = a.similarity;
  j["status"] = std::string(to_string(a.status));
  j["provenance"] = {{"seed", a.provenance.seed}, {"rank", a.provenance.neighbor_rank}};
  j["annotator"] = a.annotator ? nlohmann::ordered_json(*a.annotator) : nullptr;
  j["labeled_at"] = a.labeled_at ? nlohmann::ordered_json(*a.labeled_at) : nullptr;
  return j.dump();
}

Assertion assertion_from_json_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record is not a JSON object");

  Assertion a;
  try {
    a.id = j.at("id").get<AssertionId>();
    a.concept1 = j.at("concept1").get<std::string>();
    a.concept2 = j.at("concept2").get<std::string>();
    a.partition = j.at("partition").get<int>();
    a.similarity = j.value("similarity", 0.0);
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
      const auto text = it->get<std::string>();
      auto label = parse_label(text);
      if (!label) throw DataError("unknown label \"" + text + "\"");
      a.label = *label;
    }
    const auto status_text = j.value("status", std::string(a.label ? "labeled" : "candidate"));
    auto status = parse_status(status_text);
    if (!status) throw DataError("unknown status \"" + status_text + "\"");
    a.status = *status;
    if (auto it = j.find("provenance"); it != j.end() && it->is_object()) {
      a.provenance.seed = it->value("seed", std::string());
      a.provenance.neighbor_rank = it->value("rank", 0);
    }
    if (auto it = j.find("annotator"); it != j.end() && !it->is_null()) {
      a.annotator = it->get<std::string>();
    }
    if (auto it = j.find("labeled_at"); it != j.end() && !it->is_null()) {
      a.labeled_at = it->get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad field: ") + e.what());
  }
  if (a.id == 0) throw DataError("assertion id must be positive");
  return a;
}

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
  std::string content;
  for (const auto& a : kb.assertions()) {
    content += assertion_to_json_line(a);
    content += '\n';
  }
  text_io::write_file_atomic(path, content);
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
  KnowledgeBase kb;
  text_io::for_each_record_line(path, [&](std::string_view line, std::size_t line_no) {
    try {
      kb.add(assertion_from_json_line(line));
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  });
  return kb;
}

}  // namespace ontoforge::ontology
