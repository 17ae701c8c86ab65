#include "ontoforge/validation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ontoforge/error.hpp"
#include "text_io.hpp"

namespace ontoforge::validation {
namespace {

constexpr std::string_view kHeader = "assertion_id,expert,verdict,timestamp";

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// RFC 4180 fields for a single physical line (no embedded newlines).
std::optional<std::vector<std::string>> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty() || was_quoted) return std::nullopt;
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      if (was_quoted) return std::nullopt;
      cur += c;
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::string_view to_string(Verdict v) { return v == Verdict::agree ? "agree" : "disagree"; }

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "agree") return Verdict::agree;
  if (text == "disagree") return Verdict::disagree;
  return std::nullopt;
}

RecordResult JudgmentStore::record(const ontology::KnowledgeBase& kb, ontology::AssertionId id,
                                   std::string expert, Verdict verdict,
                                   std::optional<std::string> timestamp) {
  const auto& a = kb.at(id);
  if (a.status != ontology::Status::labeled) {
    throw ConflictError("assertion " + std::to_string(id) + " is " +
                        std::string(ontology::to_string(a.status)) +
                        "; only labeled assertions can be judged");
  }
  if (expert.empty()) throw DataError("expert name is empty");

  Judgment j{id, std::move(expert), verdict,
             timestamp ? std::move(*timestamp) : ontology::utc_timestamp()};
  RecordResult result{j, std::nullopt};
  auto key = std::make_pair(id, j.expert);
  if (auto it = judgments_.find(key); it != judgments_.end()) {
    result.replaced = it->second;
    it->second = std::move(j);
  } else {
    judgments_.emplace(std::move(key), std::move(j));
  }
  return result;
}

void JudgmentStore::put(Judgment j) {
  auto key = std::make_pair(j.assertion_id, j.expert);
  judgments_[std::move(key)] = std::move(j);
}

std::vector<Judgment> JudgmentStore::judgments() const {
  std::vector<Judgment> out;
  out.reserve(judgments_.size());
  for (const auto& [k, j] : judgments_) out.push_back(j);
  return out;
}

std::vector<Judgment> JudgmentStore::for_assertion(ontology::AssertionId id) const {
  std::vector<Judgment> out;
  for (auto it = judgments_.lower_bound({id, std::string()});
       it != judgments_.end() && it->first.first == id; ++it) {
    out.push_back(it->second);
  }
  return out;
}

ValidationReport agreeability_rate(const JudgmentStore& store, const ontology::KnowledgeBase& kb,
                                   int partition) {
  ValidationReport report;
  report.partition = partition;

  std::map<ontology::AssertionId, Rate> per_assertion;
  Rate overall;
  for (const auto& j : store.judgments()) {
    const auto* a = kb.find(j.assertion_id);
    if (!a || a->partition != partition || a->status != ontology::Status::labeled) continue;
    const std::size_t agree = j.verdict == Verdict::agree ? 1 : 0;
    auto& r = per_assertion[j.assertion_id];
    r.agree += agree;
    ++r.total;
    auto& e = report.per_expert[j.expert];
    e.agree += agree;
    ++e.total;
    overall.agree += agree;
    ++overall.total;
  }
  if (overall.total == 0) {
    throw DataError("no judgments for partition " + std::to_string(partition));
  }

  double sum = 0.0;
  std::map<ontology::SemanticLabel, double> label_sums;
  for (const auto& [id, r] : per_assertion) {
    sum += r.value();
    const auto label = *kb.at(id).label;
    label_sums[label] += r.value();
    ++report.per_label[label].n_assertions;
  }
  for (auto& [label, b] : report.per_label) {
    b.agreeability = label_sums[label] / static_cast<double>(b.n_assertions);
  }
  report.n_assertions = per_assertion.size();
  report.n_judgments = overall.total;
  report.agreeability = sum / static_cast<double>(per_assertion.size());
  report.micro_agreeability = overall.value();
  return report;
}

std::string report_to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["partition"] = report.partition;
  j["n_assertions"] = report.n_assertions;
  j["n_judgments"] = report.n_judgments;
  j["agreeability"] = report.agreeability;
  j["micro_agreeability"] = report.micro_agreeability;
  auto& experts = j["per_expert"] = nlohmann::ordered_json::object();
  for (const auto& [name, r] : report.per_expert) {
    experts[name] = {{"agree", r.agree}, {"total", r.total}, {"rate", r.value()}};
  }
  auto& labels = j["per_label"] = nlohmann::ordered_json::object();
  for (const auto& [label, b] : report.per_label) {
    labels[std::string(ontology::to_string(label))] = {{"n_assertions", b.n_assertions},
                                                       {"agreeability", b.agreeability}};
  }
  return j.dump();
}

std::string render_report(const ValidationReport& report) {
  std::ostringstream os;
  char buf[128];
  os << "partition " << report.partition << "\n";
  std::snprintf(buf, sizeof buf, "agreeability %.4f (micro %.4f) over %zu assertions, %zu judgments\n",
                report.agreeability, report.micro_agreeability, report.n_assertions,
                report.n_judgments);
  os << buf;
  for (const auto& [name, r] : report.per_expert) {
    std::snprintf(buf, sizeof buf, "  expert %-16s %.4f (%zu/%zu)\n", name.c_str(), r.value(),
                  r.agree, r.total);
    os << buf;
  }
  for (const auto& [label, b] : report.per_label) {
    std::snprintf(buf, sizeof buf, "  label  %-16s %.4f (%zu assertions)\n",
                  std::string(ontology::to_string(label)).c_str(), b.agreeability, b.n_assertions);
    os << buf;
  }
  return os.str();
}

void save_judgments(const JudgmentStore& store, const std::filesystem::path& path) {
  std::string content(kHeader);
  content += '\n';
  for (const auto& j : store.judgments()) {
    content += std::to_string(j.assertion_id) + ',' + csv_field(j.expert) + ',' +
               std::string(to_string(j.verdict)) + ',' + csv_field(j.timestamp) + '\n';
  }
  text_io::write_file_atomic(path, content);
}

JudgmentStore load_judgments(const std::filesystem::path& path) {
  JudgmentStore store;
  bool header = true;
  text_io::for_each_record_line(path, [&](std::string_view line, std::size_t line_no) {
    if (header) {
      header = false;
      if (text_io::trim(line) != kHeader) {
        throw ParseError(path.string(), line_no, "expected header \"" + std::string(kHeader) + "\"");
      }
      return;
    }
    auto fields = parse_csv_line(line);
    if (!fields || fields->size() != 4) {
      throw ParseError(path.string(), line_no, "expected 4 CSV fields");
    }
    Judgment j;
    if (!text_io::parse_int((*fields)[0], j.assertion_id) || j.assertion_id == 0) {
      throw ParseError(path.string(), line_no, "bad assertion id \"" + (*fields)[0] + "\"");
    }
    j.expert = (*fields)[1];
    if (j.expert.empty()) throw ParseError(path.string(), line_no, "empty expert name");
    auto verdict = parse_verdict((*fields)[2]);
    if (!verdict) {
      throw ParseError(path.string(), line_no, "unknown verdict \"" + (*fields)[2] + "\"");
    }
    j.verdict = *verdict;
    j.timestamp = (*fields)[3];
    store.put(std::move(j));
  });
  return store;
}

}  // namespace ontoforge::validation
