#include "ontoforge/corpus.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "ontoforge/error.hpp"
#include "utf8.hpp"

namespace ontoforge::corpus {
namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

bool parse_fixed_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string required_string(const nlohmann::json& record, const char* key,
                            const std::string& path, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    throw ParseError(path, line, std::string("missing required field \"") + key + "\"");
  }
  if (!it->is_string()) {
    throw ParseError(path, line, std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
  Date d;
  if (!parse_fixed_int(text.substr(0, 4), d.year) ||
      !parse_fixed_int(text.substr(5, 2), d.month) ||
      !parse_fixed_int(text.substr(8, 2), d.day)) {
    return std::nullopt;
  }
  if (d.month < 1 || d.month > 12) return std::nullopt;
  if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (doc.id.empty()) throw DataError("document with empty id");
    if (doc.body.empty()) throw DataError("document " + doc.id + " has an empty body");
    if (!seen.insert(doc.id).second) throw DataError("duplicate document id: " + doc.id);
  }
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  if (format != CorpusFormat::jsonl) throw DataError("unsupported corpus format");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path.string());

  const std::string name = path.string();
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(name, line_no, std::string("malformed record: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(name, line_no, "record is not a JSON object");

    Document doc;
    doc.id = required_string(record, "id", name, line_no);
    const std::string date = required_string(record, "date", name, line_no);
    doc.body = required_string(record, "body", name, line_no);
    if (doc.id.empty()) throw ParseError(name, line_no, "field \"id\" is empty");
    if (doc.body.empty()) throw ParseError(name, line_no, "field \"body\" is empty");

    auto parsed = Date::parse(date);
    if (!parsed) throw ParseError(name, line_no, "invalid date \"" + date + "\"");
    doc.date = *parsed;

    if (auto it = record.find("title"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(name, line_no, "field \"title\" must be a string");
      doc.title = it->get<std::string>();
    }
    if (auto it = record.find("source"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(name, line_no, "field \"source\" must be a string");
      doc.source = it->get<std::string>();
    }
    if (!ids.insert(doc.id).second) {
      throw ParseError(name, line_no, "duplicate id \"" + doc.id + "\"");
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

std::vector<Partition> partition_by_year(const Corpus& corpus) {
  std::map<int, std::vector<Document>> by_year;
  for (const auto& doc : corpus.documents()) by_year[doc.date.year].push_back(doc);

  std::vector<Partition> out;
  out.reserve(by_year.size());
  for (auto& [year, docs] : by_year) out.push_back({year, std::move(docs)});
  return out;
}

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::vector<utf8::CodePoint> word;

  const auto flush = [&] {
    std::size_t first = 0;
    std::size_t last = word.size();
    while (first < last && utf8::is_punct(word[first].value)) ++first;
    while (last > first && utf8::is_punct(word[last - 1].value)) --last;
    if (first < last) {
      std::string token;
      for (std::size_t i = first; i < last; ++i) {
        const auto& cp = word[i];
        const char32_t lower = utf8::to_lower(cp.value);
        if (lower == cp.value) {
          token.append(text.substr(cp.offset, cp.length));
        } else {
          utf8::append(token, lower);
        }
      }
      tokens.push_back(std::move(token));
    }
    word.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto cp = utf8::decode(text, pos);
    pos += cp.length;
    if (utf8::is_space(cp.value)) {
      flush();
    } else {
      word.push_back(cp);
    }
  }
  flush();
  return tokens;
}

Tokens document_tokens(const Document& doc, bool include_title) {
  if (!include_title || doc.title.empty()) return tokenize(doc.body);
  Tokens tokens = tokenize(doc.title);
  Tokens body = tokenize(doc.body);
  tokens.insert(tokens.end(), std::make_move_iterator(body.begin()),
                std::make_move_iterator(body.end()));
  return tokens;
}

TokenStream token_stream(const std::vector<Document>& docs, bool include_title) {
  TokenStream stream;
  stream.reserve(docs.size());
  for (const auto& doc : docs) stream.push_back(document_tokens(doc, include_title));
  return stream;
}

}  // namespace ontoforge::corpus
