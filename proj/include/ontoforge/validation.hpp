#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ontoforge/ontology.hpp"

namespace ontoforge::validation {

enum class Verdict { agree, disagree };
std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);

struct Judgment {
  ontology::AssertionId assertion_id = 0;
  std::string expert;
  Verdict verdict = Verdict::agree;
  std::string timestamp;

  bool operator==(const Judgment&) const = default;
};

struct RecordResult {
  Judgment judgment;
  std::optional<Judgment> replaced;  // previous verdict by the same expert
};

// At most one verdict per (assertion, expert). Not internally synchronized.
class JudgmentStore {
 public:
  // Requires a labeled assertion: NotFoundError for unknown ids,
  // ConflictError for candidates and rejected assertions.
  RecordResult record(const ontology::KnowledgeBase& kb, ontology::AssertionId id,
                      std::string expert, Verdict verdict,
                      std::optional<std::string> timestamp = std::nullopt);

  // Inserts without checking against a KB (used when loading files).
  void put(Judgment j);

  std::vector<Judgment> judgments() const;
  std::vector<Judgment> for_assertion(ontology::AssertionId id) const;
  std::size_t size() const { return judgments_.size(); }
  bool empty() const { return judgments_.empty(); }

  bool operator==(const JudgmentStore&) const = default;

 private:
  std::map<std::pair<ontology::AssertionId, std::string>, Judgment> judgments_;
};

struct Rate {
  std::size_t agree = 0;
  std::size_t total = 0;
  double value() const { return total ? static_cast<double>(agree) / static_cast<double>(total) : 0.0; }
};

struct LabelBreakdown {
  std::size_t n_assertions = 0;
  double agreeability = 0.0;  // macro average over this label's assertions
};

struct ValidationReport {
  int partition = 0;
  std::size_t n_assertions = 0;  // judged assertions
  std::size_t n_judgments = 0;
  // Mean over judged assertions of the assertion's agree fraction.
  double agreeability = 0.0;
  // Agree verdicts over all verdicts.
  double micro_agreeability = 0.0;
  std::map<std::string, Rate> per_expert;
  std::map<ontology::SemanticLabel, LabelBreakdown> per_label;
};

// Uses judgments of labeled assertions in `partition`. Throws DataError when
// the partition has no such judgments.
ValidationReport agreeability_rate(const JudgmentStore& store, const ontology::KnowledgeBase& kb,
                                   int partition);

std::string report_to_json(const ValidationReport& report);
std::string render_report(const ValidationReport& report);

// CSV with header "assertion_id,expert,verdict,timestamp".
void save_judgments(const JudgmentStore& store, const std::filesystem::path& path);
JudgmentStore load_judgments(const std::filesystem::path& path);

}  // namespace ontoforge::validation
