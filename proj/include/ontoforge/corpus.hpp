#pragma once

#include <compare>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ontoforge::corpus {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  // Accepts "YYYY-MM-DD" optionally followed by an ISO-8601 time part
  // ("T..." or " ..."). Returns nullopt for anything that is not a real
  // calendar date.
  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const Date&) const = default;
};

struct Document {
  std::string id;
  Date date;
  std::string title;
  std::string body;
  std::optional<std::string> source;
};

class Corpus {
 public:
  Corpus() = default;
  // Throws DataError on duplicate or empty ids, or empty bodies.
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

 private:
  std::vector<Document> documents_;
};

struct Partition {
  int year = 0;
  std::vector<Document> documents;
};

using Tokens = std::vector<std::string>;
// One token sequence per document.
using TokenStream = std::vector<Tokens>;

enum class CorpusFormat { jsonl };

// One JSON object per line with keys id, date, title, body, source.
// Blank lines are skipped. Errors carry the 1-based line number.
Corpus load_corpus(const std::filesystem::path& path,
                   CorpusFormat format = CorpusFormat::jsonl);

// Sorted ascending by year; years without documents are absent.
std::vector<Partition> partition_by_year(const Corpus& corpus);

// Whitespace split (ASCII and Unicode space separators), edge punctuation
// stripped, lowercased. Tokens made only of punctuation are dropped.
Tokens tokenize(std::string_view text);

Tokens document_tokens(const Document& doc, bool include_title = true);
TokenStream token_stream(const std::vector<Document>& docs, bool include_title = true);

}  // namespace ontoforge::corpus
