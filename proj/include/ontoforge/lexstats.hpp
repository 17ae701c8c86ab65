#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ontoforge/corpus.hpp"

namespace ontoforge::lexstats {

enum class Pos { noun, verb, adjective, other };

std::string_view to_string(Pos pos);
std::optional<Pos> parse_pos(std::string_view text);
inline bool is_content_pos(Pos pos) { return pos != Pos::other; }

struct FrequencyTable {
  int year = 0;
  std::map<std::string, std::uint64_t> counts;

  std::uint64_t count(const std::string& token) const;
  std::uint64_t total() const;
  FrequencyTable& operator+=(const FrequencyTable& other);
};

// Counts raw token occurrences over the partition's documents.
// Throws DataError when the partition has no documents.
FrequencyTable term_frequencies(const corpus::Partition& partition, bool include_titles = true);
FrequencyTable term_frequencies(int year, const corpus::TokenStream& tokens);

class PosLexicon {
 public:
  explicit PosLexicon(Pos fallback = Pos::other) : fallback_(fallback) {}

  // Lines of "token<TAB>pos"; blank lines and lines starting with '#' are
  // ignored. Tokens are lowercased on load to match the tokenizer.
  static PosLexicon load(const std::filesystem::path& path);

  void set(std::string token, Pos pos) { entries_[std::move(token)] = pos; }
  Pos lookup(const std::string& token) const;
  Pos fallback() const { return fallback_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Pos> entries_;
  Pos fallback_;
};

using Stoplist = std::set<std::string, std::less<>>;

// One token per line, lowercased; '#' comments allowed.
Stoplist load_stoplist(const std::filesystem::path& path);

struct SeedWord {
  std::string token;
  Pos pos = Pos::other;
  int partition = 0;
  int rank = 0;
  std::uint64_t frequency = 0;

  bool operator==(const SeedWord&) const = default;
};

struct SeedOptions {
  std::size_t k = 50;
  // Rank all non-stoplisted tokens first, then drop non content words from
  // the top k. When false (default) the POS filter runs before ranking.
  bool filter_after_rank = false;
};

std::vector<SeedWord> extract_seeds(const FrequencyTable& table, const PosLexicon& lexicon,
                                    const Stoplist& stoplist, const SeedOptions& options);

// seeds.tsv: header "partition\trank\ttoken\tpos\tfrequency".
void save_seeds(const std::vector<SeedWord>& seeds, const std::filesystem::path& path);
std::vector<SeedWord> load_seeds(const std::filesystem::path& path);

}  // namespace ontoforge::lexstats
