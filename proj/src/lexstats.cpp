#include "ontoforge/lexstats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ontoforge/error.hpp"
#include "text_io.hpp"

namespace ontoforge::lexstats {

std::string_view to_string(Pos pos) {
  switch (pos) {
    case Pos::noun: return "noun";
    case Pos::verb: return "verb";
    case Pos::adjective: return "adjective";
    case Pos::other: return "other";
  }
  return "other";
}

std::optional<Pos> parse_pos(std::string_view text) {
  if (text == "noun") return Pos::noun;
  if (text == "verb") return Pos::verb;
  if (text == "adjective") return Pos::adjective;
  if (text == "other") return Pos::other;
  return std::nullopt;
}

std::uint64_t FrequencyTable::count(const std::string& token) const {
  auto it = counts.find(token);
  return it == counts.end() ? 0 : it->second;
}

std::uint64_t FrequencyTable::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const auto& kv) { return acc + kv.second; });
}

FrequencyTable& FrequencyTable::operator+=(const FrequencyTable& other) {
  for (const auto& [token, n] : other.counts) counts[token] += n;
  return *this;
}

FrequencyTable term_frequencies(int year, const corpus::TokenStream& tokens) {
  FrequencyTable table;
  table.year = year;
  for (const auto& doc : tokens) {
    for (const auto& token : doc) ++table.counts[token];
  }
  return table;
}

FrequencyTable term_frequencies(const corpus::Partition& partition, bool include_titles) {
  if (partition.documents.empty()) {
    throw DataError("partition " + std::to_string(partition.year) + " has no documents");
  }
  return term_frequencies(partition.year, corpus::token_stream(partition.documents, include_titles));
}

PosLexicon PosLexicon::load(const std::filesystem::path& path) {
  PosLexicon lexicon;
  text_io::for_each_record_line(path, [&](std::string_view line, std::size_t line_no) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(path.string(), line_no, "expected \"token<TAB>pos\"");
    }
    auto pos = parse_pos(text_io::trim(line.substr(tab + 1)));
    if (!pos) {
      throw ParseError(path.string(), line_no,
                       "unknown POS category \"" + std::string(line.substr(tab + 1)) + "\"");
    }
    auto tokens = corpus::tokenize(line.substr(0, tab));
    if (tokens.size() != 1) {
      throw ParseError(path.string(), line_no, "lexicon entry must be a single token");
    }
    lexicon.set(std::move(tokens.front()), *pos);
  });
  return lexicon;
}

Pos PosLexicon::lookup(const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? fallback_ : it->second;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
  Stoplist stop;
  text_io::for_each_record_line(path, [&](std::string_view line, std::size_t) {
    for (auto& token : corpus::tokenize(line)) stop.insert(std::move(token));
  });
  return stop;
}

std::vector<SeedWord> extract_seeds(const FrequencyTable& table, const PosLexicon& lexicon,
                                    const Stoplist& stoplist, const SeedOptions& options) {
  if (options.k == 0) throw ConfigError("k must be at least 1");

  struct Candidate {
    const std::string* token;
    std::uint64_t count;
    Pos pos;
  };
  std::vector<Candidate> candidates;
  for (const auto& [token, count] : table.counts) {
    if (count == 0 || stoplist.contains(token)) continue;
    const Pos pos = lexicon.lookup(token);
    if (!options.filter_after_rank && !is_content_pos(pos)) continue;
    candidates.push_back({&token, count, pos});
  }

  const auto by_rank = [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return *a.token < *b.token;
  };
  const std::size_t keep = std::min(options.k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), by_rank);

  std::vector<SeedWord> seeds;
  for (std::size_t i = 0; i < keep; ++i) {
    const auto& c = candidates[i];
    if (!is_content_pos(c.pos)) continue;
    seeds.push_back({*c.token, c.pos, table.year, static_cast<int>(i + 1), c.count});
  }
  return seeds;
}

void save_seeds(const std::vector<SeedWord>& seeds, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "partition\trank\ttoken\tpos\tfrequency\n";
  for (const auto& s : seeds) {
    os << s.partition << '\t' << s.rank << '\t' << s.token << '\t' << to_string(s.pos) << '\t'
       << s.frequency << '\n';
  }
  text_io::write_file_atomic(path, os.str());
}

std::vector<SeedWord> load_seeds(const std::filesystem::path& path) {
  std::vector<SeedWord> seeds;
  bool header = true;
  text_io::for_each_record_line(path, [&](std::string_view line, std::size_t line_no) {
    if (header) {
      header = false;
      if (line.starts_with("partition\t")) return;
    }
    auto fields = text_io::split(line, '\t');
    if (fields.size() != 5) {
      throw ParseError(path.string(), line_no, "expected 5 tab-separated fields");
    }
    SeedWord s;
    s.token = std::string(fields[2]);
    auto pos = parse_pos(fields[3]);
    if (!pos || !text_io::parse_int(fields[0], s.partition) ||
        !text_io::parse_int(fields[1], s.rank) || !text_io::parse_int(fields[4], s.frequency) ||
        s.token.empty()) {
      throw ParseError(path.string(), line_no, "malformed seed record");
    }
    s.pos = *pos;
    seeds.push_back(std::move(s));
  });
  return seeds;
}

}  // namespace ontoforge::lexstats
