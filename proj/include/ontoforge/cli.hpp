#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ontoforge/embedding.hpp"

namespace ontoforge::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

struct PipelineConfig {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> stoplist;
  std::size_t k = 50;
  bool filter_after_rank = false;
  bool include_titles = true;
  embedding::TrainConfig train;
  std::size_t per_seed = 3;
  std::filesystem::path out_dir = "out";

  // Throws ConfigError on k/per_seed == 0 and DataError on missing files.
  void validate() const;
};

struct PipelineSummary {
  std::size_t documents = 0;
  std::size_t seeds = 0;
  std::size_t candidates = 0;
  std::vector<int> partitions;
  std::vector<std::string> skipped_seeds;
};

// ingest -> seeds -> train -> expand; writes partitions.tsv, seeds.tsv,
// model_<year>.vec (+ .counts) and kb.jsonl into out_dir.
PipelineSummary run_pipeline(const PipelineConfig& config, std::ostream& log);

// Entry point shared by the executable and tests. `args` excludes the
// program name. ONTOFORGE_OUT, when set, replaces every --out value.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ontoforge::cli
