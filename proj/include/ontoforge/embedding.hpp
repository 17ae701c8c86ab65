#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ontoforge/corpus.hpp"

namespace ontoforge::embedding {

struct TrainConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double initial_lr = 0.025;
  std::uint64_t min_count = 5;
  double subsample_t = 1e-3;
  std::uint64_t rng_seed = 1;
  // Single worker, bit-reproducible. When false, `workers` threads update
  // the shared matrices without synchronization.
  bool deterministic = false;
  std::size_t workers = 0;  // 0 = hardware concurrency

  // Throws ConfigError naming the first violated bound.
  void validate() const;
};

class VocabTable {
 public:
  VocabTable() = default;

  // Entries in index order. Throws DataError if empty or a token repeats.
  explicit VocabTable(std::vector<std::pair<std::string, std::uint64_t>> entries);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  std::uint64_t count(std::size_t index) const { return counts_[index]; }
  std::optional<std::size_t> index(std::string_view token) const;
  std::uint64_t total_count() const { return total_; }

  // Negative-sampling distribution, proportional to count^0.75.
  std::span<const double> noise_probabilities() const { return probabilities_; }
  // Maps u in [0, 1) to an index drawn from the noise distribution.
  std::size_t sample_noise(double u) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  std::uint64_t total_ = 0;
};

// Keeps tokens with count >= min_count, ordered by count descending then
// token ascending. Throws DataError when nothing survives.
VocabTable build_vocab(const corpus::TokenStream& tokens, const TrainConfig& config);

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(int partition, VocabTable vocab, std::size_t dim, std::vector<float> input,
                 std::vector<float> output, TrainConfig config);

  // Hand-built model, one row per token; counts default to 1.
  static EmbeddingModel from_vectors(int partition,
                                     const std::vector<std::pair<std::string, std::vector<float>>>& rows);

  int partition() const { return partition_; }
  void set_partition(int partition) { partition_ = partition; }
  const VocabTable& vocab() const { return vocab_; }
  std::size_t dim() const { return dim_; }
  const TrainConfig& config() const { return config_; }

  std::span<const float> input_vector(std::size_t index) const {
    return {input_.data() + index * dim_, dim_};
  }
  std::span<const float> input_matrix() const { return input_; }
  // Empty for models loaded from a vector file.
  std::span<const float> output_matrix() const { return output_; }

  // Index of `token`; throws DataError naming an out-of-vocabulary token.
  std::size_t require(std::string_view token) const;
  bool contains(std::string_view token) const { return vocab_.index(token).has_value(); }

 private:
  int partition_ = 0;
  VocabTable vocab_;
  std::size_t dim_ = 0;
  std::vector<float> input_;
  std::vector<float> output_;
  TrainConfig config_;
};

EmbeddingModel train(const corpus::TokenStream& tokens, const TrainConfig& config,
                     int partition = 0);

double cosine(const EmbeddingModel& model, std::string_view a, std::string_view b);

struct Neighbor {
  std::string token;
  double similarity = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// The k most similar tokens to `query`, excluding the query itself, by
// cosine descending and token ascending on ties.
std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, std::string_view query,
                                        std::size_t k);

// Text vectors: "V dim" header then "token v1 ... vdim" with 9 significant
// digits. Counts go to the sidecar `<path>.counts` as "token count" lines.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
// Reads the sidecar when present (counts default to 1 otherwise).
EmbeddingModel load_model(const std::filesystem::path& path, int partition = 0);

std::filesystem::path counts_path(const std::filesystem::path& vectors_path);

}  // namespace ontoforge::embedding
