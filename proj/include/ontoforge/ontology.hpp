#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ontoforge/embedding.hpp"
#include "ontoforge/lexstats.hpp"

namespace ontoforge::ontology {

// The nine relation labels, in annotation-guide order.
enum class SemanticLabel { SYN, ANT, HYP, DO, PartOf, IS, CAUSE, dueTo, RAND };

inline constexpr std::array<SemanticLabel, 9> kAllLabels = {
    SemanticLabel::SYN,    SemanticLabel::ANT, SemanticLabel::HYP,
    SemanticLabel::DO,     SemanticLabel::PartOf, SemanticLabel::IS,
    SemanticLabel::CAUSE,  SemanticLabel::dueTo,  SemanticLabel::RAND};

std::string_view to_string(SemanticLabel label);
// Case-insensitive, so "partOf" and "PartOf" both parse.
std::optional<SemanticLabel> parse_label(std::string_view text);
// One-line rule an annotator applies when choosing the label.
std::string_view label_rule(SemanticLabel label);

enum class Status { candidate, labeled, rejected };
std::string_view to_string(Status status);
std::optional<Status> parse_status(std::string_view text);

using AssertionId = std::uint64_t;

struct Provenance {
  std::string seed;
  int neighbor_rank = 0;  // 1-based position in the seed's neighbor list

  bool operator==(const Provenance&) const = default;
};

struct Assertion {
  AssertionId id = 0;  // 0 = not yet stored
  std::string concept1;
  std::optional<SemanticLabel> label;  // nullopt = pending
  std::string concept2;
  int partition = 0;
  double similarity = 0.0;
  Status status = Status::candidate;
  Provenance provenance;
  std::optional<std::string> annotator;
  std::optional<std::string> labeled_at;  // ISO-8601 UTC

  bool operator==(const Assertion&) const = default;
};

// "[tremor SYN aftershock]"; pending labels print as "?".
std::string format_assertion(const Assertion& a);

enum class Direction { as_subject, as_object, either };

struct QueryFilter {
  std::optional<SemanticLabel> label;
  std::optional<int> partition;
};

struct LabelOptions {
  bool force = false;
  std::optional<std::string> timestamp;  // defaults to the current UTC time
};

// Assertion set with lookup indices by concept1, concept2, partition and
// label. Not internally synchronized: callers that share one instance
// across threads serialize writes (see api::AnnotationStore).
class KnowledgeBase {
 public:
  // Stores `a`, assigning the next free id when a.id == 0. Throws
  // DataError on concept1 == concept2, inconsistent status/label, an id
  // collision, or a labeled (concept1, label, concept2, partition) tuple
  // that already exists.
  const Assertion& add(Assertion a);

  // candidate -> labeled. NotFoundError on unknown ids; ConflictError when
  // the assertion is not a candidate and force is off, or when the label
  // would duplicate an existing labeled tuple.
  const Assertion& label(AssertionId id, SemanticLabel label, const std::string& annotator,
                         const LabelOptions& options = {});
  const Assertion& reject(AssertionId id, const std::string& annotator,
                          const LabelOptions& options = {});

  const Assertion* find(AssertionId id) const;
  const Assertion& at(AssertionId id) const;
  const std::vector<Assertion>& assertions() const { return assertions_; }
  std::size_t size() const { return assertions_.size(); }
  bool empty() const { return assertions_.empty(); }

  // Partitions holding at least one assertion, ascending.
  std::vector<int> partitions() const;

  // Labeled assertions only, sorted by (partition asc, similarity desc, id).
  std::vector<Assertion> query(std::string_view term, Direction direction,
                               const QueryFilter& filter = {}) const;
  std::vector<Assertion> candidates(std::optional<int> partition = std::nullopt,
                                    std::size_t limit = SIZE_MAX) const;
  std::vector<Assertion> with_status(Status status, std::optional<int> partition = std::nullopt) const;

  // Recomputes every index from scratch and compares; used by tests.
  bool indices_consistent() const;

 private:
  using Tuple = std::tuple<std::string, SemanticLabel, std::string, int>;

  void index_insert(std::size_t pos);
  void set_label_index(std::size_t pos, std::optional<SemanticLabel> old_label);
  Assertion& mutable_at(AssertionId id);

  std::vector<Assertion> assertions_;
  std::unordered_map<AssertionId, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_concept1_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_concept2_;
  std::map<int, std::vector<std::size_t>> by_partition_;
  std::map<SemanticLabel, std::set<std::size_t>> by_label_;
  std::set<Tuple> labeled_tuples_;
  AssertionId next_id_ = 1;
};

struct ExpandOptions {
  std::size_t per_seed = 3;
  lexstats::Stoplist stoplist;
};

struct ExpansionResult {
  std::vector<Assertion> candidates;
  std::vector<std::string> skipped_seeds;  // not in the model vocabulary
};

// Digits with optional '.', ',' separators ("6.1", "1,500").
bool is_numeric_token(std::string_view token);

// For each in-vocabulary seed, the first per_seed neighbors that are not the
// seed, not stoplisted and not numeric become candidate assertions. Seeds
// must belong to the model's partition (DataError otherwise).
ExpansionResult expand_seeds(const std::vector<lexstats::SeedWord>& seeds,
                             const embedding::EmbeddingModel& model, const ExpandOptions& options);

struct ChainNode {
  std::string term;
  std::vector<ChainNode> next;  // further up (for `above`) or down (for `below`)
};

struct Hierarchy {
  std::string term;
  std::vector<ChainNode> above;  // broader terms / groups the concept belongs to
  std::vector<ChainNode> below;  // narrower terms / members
  std::vector<std::vector<std::string>> cycles;

  std::size_t node_count() const;
};

// Parents of X: Y with [X PartOf Y] or [Y HYP X]. Children of X: Y with
// [X HYP Y] or [Y PartOf X]. Each concept appears at most once; a back-edge
// to a concept on the current path is reported as a cycle.
Hierarchy hypernym_chain(const KnowledgeBase& kb, std::string_view term);

// Indented text rendering: "^" lines above, "v" lines below.
std::string render_hierarchy(const Hierarchy& h);

// JSON lines, one assertion per line.
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);
KnowledgeBase load_kb(const std::filesystem::path& path);

std::string assertion_to_json_line(const Assertion& a);
// Parses one JSON line; errors are DataError with a short description.
Assertion assertion_from_json_line(std::string_view line);

std::string utc_timestamp();

}  // namespace ontoforge::ontology
