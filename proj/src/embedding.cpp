#include "ontoforge/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "ontoforge/error.hpp"
#include "ontoforge/sgns.hpp"
#include "text_io.hpp"

namespace ontoforge::embedding {
namespace {

constexpr double kNoisePower = 0.75;
constexpr double kFinalLrFraction = 1e-4;

// mt19937_64 output is fully specified by the standard; the distributions
// are not, so the conversions below are done by hand to keep runs
// reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::vector<std::uint32_t>> encode(const corpus::TokenStream& tokens,
                                               const VocabTable& vocab) {
  std::vector<std::vector<std::uint32_t>> docs;
  docs.reserve(tokens.size());
  for (const auto& doc : tokens) {
    std::vector<std::uint32_t> ids;
    ids.reserve(doc.size());
    for (const auto& t : doc) {
      if (auto i = vocab.index(t)) ids.push_back(static_cast<std::uint32_t>(*i));
    }
    if (!ids.empty()) docs.push_back(std::move(ids));
  }
  return docs;
}

// Replays the structural randomness of training (subsampling and window
// shrinking) for one shard, calling fn(center, context) for each pair. The
// same seed always yields the same pair sequence, which lets the trainer
// count pairs up front for the learning-rate schedule.
template <typename Fn>
void for_each_pair(const std::vector<const std::vector<std::uint32_t>*>& shard,
                   const std::vector<double>& keep_prob, const TrainConfig& config,
                   std::uint64_t seed, Fn&& fn) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> kept;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto* doc : shard) {
      kept.clear();
      for (auto id : *doc) {
        const double p = keep_prob[id];
        if (p >= 1.0 || uniform01(rng) < p) kept.push_back(id);
      }
      const std::size_t n = kept.size();
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t reach = 1 + uniform_below(rng, config.window);
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(n - 1, pos + reach);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c != pos) fn(kept[pos], kept[c]);
        }
      }
    }
  }
}

std::string format_float(float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, ptr);
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
    throw ConfigError("initial_lr must be > 0");
  }
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  if (!(subsample_t > 0.0) || !std::isfinite(subsample_t)) {
    throw ConfigError("subsample_t must be > 0");
  }
}

VocabTable::VocabTable(std::vector<std::pair<std::string, std::uint64_t>> entries) {
  if (entries.empty()) throw DataError("empty vocabulary");
  tokens_.reserve(entries.size());
  counts_.reserve(entries.size());
  for (auto& [token, count] : entries) {
    if (!index_.emplace(token, tokens_.size()).second) {
      throw DataError("duplicate vocabulary token: " + token);
    }
    tokens_.push_back(std::move(token));
    counts_.push_back(count);
    total_ += count;
  }

  probabilities_.resize(size());
  double norm = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    probabilities_[i] = std::pow(static_cast<double>(counts_[i]), kNoisePower);
    norm += probabilities_[i];
  }
  cumulative_.resize(size());
  double running = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    probabilities_[i] = norm > 0.0 ? probabilities_[i] / norm : 1.0 / static_cast<double>(size());
    running += probabilities_[i];
    cumulative_[i] = running;
  }
  cumulative_.back() = 1.0;
}

std::optional<std::size_t> VocabTable::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VocabTable::sample_noise(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

VocabTable build_vocab(const corpus::TokenStream& tokens, const TrainConfig& config) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& doc : tokens) {
    for (const auto& t : doc) ++counts[t];
  }
  if (counts.empty()) throw DataError("token stream is empty");

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (auto& [token, n] : counts) {
    if (n >= config.min_count) entries.emplace_back(token, n);
  }
  if (entries.empty()) {
    throw DataError("no token reaches min_count=" + std::to_string(config.min_count));
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return VocabTable(std::move(entries));
}

EmbeddingModel::EmbeddingModel(int partition, VocabTable vocab, std::size_t dim,
                               std::vector<float> input, std::vector<float> output,
                               TrainConfig config)
    : partition_(partition),
      vocab_(std::move(vocab)),
      dim_(dim),
      input_(std::move(input)),
      output_(std::move(output)),
      config_(config) {
  if (input_.size() != vocab_.size() * dim_) throw DataError("input matrix has wrong shape");
  if (!output_.empty() && output_.size() != input_.size()) {
    throw DataError("output matrix has wrong shape");
  }
}

EmbeddingModel EmbeddingModel::from_vectors(
    int partition, const std::vector<std::pair<std::string, std::vector<float>>>& rows) {
  if (rows.empty()) throw DataError("empty vocabulary");
  const std::size_t dim = rows.front().second.size();
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::vector<float> input;
  for (const auto& [token, v] : rows) {
    if (v.size() != dim) throw DataError("inconsistent vector dimension for " + token);
    entries.emplace_back(token, 1);
    input.insert(input.end(), v.begin(), v.end());
  }
  TrainConfig config;
  config.dim = dim;
  return EmbeddingModel(partition, VocabTable(std::move(entries)), dim, std::move(input), {},
                        config);
}

std::size_t EmbeddingModel::require(std::string_view token) const {
  auto i = vocab_.index(token);
  if (!i) throw DataError("token not in vocabulary: " + std::string(token));
  return *i;
}

EmbeddingModel train(const corpus::TokenStream& tokens, const TrainConfig& config,
                     int partition) {
  config.validate();
  VocabTable vocab = build_vocab(tokens, config);
  const std::size_t V = vocab.size();
  const std::size_t dim = config.dim;

  std::vector<float> input(V * dim);
  std::vector<float> output(V * dim, 0.0f);
  {
    std::mt19937_64 init(mix_seed(config.rng_seed, 0));
    const double scale = 1.0 / static_cast<double>(dim);
    for (auto& x : input) x = static_cast<float>((uniform01(init) - 0.5) * scale);
  }

  std::vector<double> keep_prob(V);
  for (std::size_t i = 0; i < V; ++i) {
    const double f = static_cast<double>(vocab.count(i)) / static_cast<double>(vocab.total_count());
    keep_prob[i] = std::min(1.0, std::sqrt(config.subsample_t / f));
  }

  const auto docs = encode(tokens, vocab);
  std::size_t workers = 1;
  if (!config.deterministic) {
    workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::max<std::size_t>(1, std::min(workers, docs.size()));
  }
  std::vector<std::vector<const std::vector<std::uint32_t>*>> shards(workers);
  for (std::size_t d = 0; d < docs.size(); ++d) shards[d % workers].push_back(&docs[d]);

  std::uint64_t total_pairs = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    for_each_pair(shards[w], keep_prob, config, mix_seed(config.rng_seed, 2 * w + 1),
                  [&](std::uint32_t, std::uint32_t) { ++total_pairs; });
  }

  std::atomic<std::uint64_t> pairs_done{0};
  const auto run_worker = [&](std::size_t w) {
    std::mt19937_64 noise_rng(mix_seed(config.rng_seed, 2 * w + 2));
    std::vector<std::span<const float>> targets;
    std::vector<std::uint32_t> target_ids;
    std::vector<float> d_center(dim);
    std::vector<float> d_targets((config.negatives + 1) * dim);
    const double decay = (1.0 - kFinalLrFraction) / static_cast<double>(std::max<std::uint64_t>(1, total_pairs));

    for_each_pair(shards[w], keep_prob, config, mix_seed(config.rng_seed, 2 * w + 1),
                  [&](std::uint32_t center, std::uint32_t context) {
      const std::uint64_t step = pairs_done.fetch_add(1, std::memory_order_relaxed);
      const float lr = static_cast<float>(config.initial_lr *
                                          (1.0 - decay * static_cast<double>(step)));

      target_ids.clear();
      target_ids.push_back(context);
      for (std::size_t n = 0; n < config.negatives; ++n) {
        const auto id = static_cast<std::uint32_t>(vocab.sample_noise(uniform01(noise_rng)));
        if (id != context) target_ids.push_back(id);
      }
      targets.clear();
      for (auto id : target_ids) targets.emplace_back(output.data() + id * dim, dim);

      float* v = input.data() + center * dim;
      sgns::loss_and_gradient<float>(std::span<const float>(v, dim), targets, d_center,
                                     std::span<float>(d_targets.data(), target_ids.size() * dim));
      for (std::size_t j = 0; j < target_ids.size(); ++j) {
        float* u = output.data() + target_ids[j] * dim;
        const float* g = d_targets.data() + j * dim;
        for (std::size_t i = 0; i < dim; ++i) u[i] -= lr * g[i];
      }
      for (std::size_t i = 0; i < dim; ++i) v[i] -= lr * d_center[i];
    });
  };

  if (workers == 1) {
    run_worker(0);
  } else {
    // Workers write the shared matrices without locks (Hogwild-style SGD);
    // results in this mode are not reproducible.
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
  }

  for (float x : input) {
    if (!std::isfinite(x)) throw DataError("training diverged (non-finite input vector)");
  }
  for (float x : output) {
    if (!std::isfinite(x)) throw DataError("training diverged (non-finite output vector)");
  }
  return EmbeddingModel(partition, std::move(vocab), dim, std::move(input), std::move(output),
                        config);
}

namespace {

double cosine_rows(std::span<const float> a, std::span<const float> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

}  // namespace

double cosine(const EmbeddingModel& model, std::string_view a, std::string_view b) {
  return cosine_rows(model.input_vector(model.require(a)), model.input_vector(model.require(b)));
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, std::string_view query,
                                        std::size_t k) {
  const std::size_t q = model.require(query);
  const auto qv = model.input_vector(q);
  const auto& vocab = model.vocab();

  std::vector<Neighbor> all;
  all.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (i == q) continue;
    all.push_back({vocab.token(i), cosine_rows(qv, model.input_vector(i))});
  }
  const auto order = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.token < b.token;
  };
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), order);
  all.resize(keep);
  return all;
}

std::filesystem::path counts_path(const std::filesystem::path& vectors_path) {
  auto p = vectors_path;
  p += ".counts";
  return p;
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  const auto& vocab = model.vocab();
  std::string vectors;
  std::string counts;
  vectors += std::to_string(vocab.size()) + " " + std::to_string(model.dim()) + "\n";
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    vectors += vocab.token(i);
    for (float x : model.input_vector(i)) {
      vectors += ' ';
      vectors += format_float(x);
    }
    vectors += '\n';
    counts += vocab.token(i) + " " + std::to_string(vocab.count(i)) + "\n";
  }
  text_io::write_file_atomic(path, vectors);
  text_io::write_file_atomic(counts_path(path), counts);
}

EmbeddingModel load_model(const std::filesystem::path& path, int partition) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path.string());
  const std::string name = path.string();

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(name, 1, "missing \"V dim\" header");
  auto header = text_io::split(text_io::trim(line), ' ');
  std::size_t V = 0, dim = 0;
  if (header.size() != 2 || !text_io::parse_int(header[0], V) ||
      !text_io::parse_int(header[1], dim) || V == 0 || dim == 0) {
    throw ParseError(name, 1, "malformed header, expected \"V dim\"");
  }

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::vector<float> input;
  entries.reserve(V);
  input.reserve(V * dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text_io::trim(line).empty()) continue;
    if (entries.size() == V) {
      throw ParseError(name, line_no, "more vector lines than the header's V=" + std::to_string(V));
    }
    auto fields = text_io::split(text_io::trim(line), ' ');
    if (fields.size() != dim + 1) {
      throw ParseError(name, line_no,
                       "expected token and " + std::to_string(dim) + " values, got " +
                           std::to_string(fields.size()) + " fields");
    }
    for (std::size_t i = 1; i <= dim; ++i) {
      float v = 0;
      auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
      if (ec != std::errc() || ptr != fields[i].data() + fields[i].size() || !std::isfinite(v)) {
        throw ParseError(name, line_no, "bad vector value \"" + std::string(fields[i]) + "\"");
      }
      input.push_back(v);
    }
    entries.emplace_back(std::string(fields[0]), 1);
  }
  if (entries.size() != V) {
    throw ParseError(name, line_no,
                     "header declares " + std::to_string(V) + " vectors but file has " +
                         std::to_string(entries.size()));
  }

  const auto sidecar = counts_path(path);
  if (std::filesystem::exists(sidecar)) {
    std::unordered_map<std::string, std::uint64_t> counts;
    text_io::for_each_record_line(sidecar, [&](std::string_view l, std::size_t n) {
      auto f = text_io::split(text_io::trim(l), ' ');
      std::uint64_t c = 0;
      if (f.size() != 2 || !text_io::parse_int(f[1], c)) {
        throw ParseError(sidecar.string(), n, "expected \"token count\"");
      }
      counts[std::string(f[0])] = c;
    });
    for (auto& [token, c] : entries) {
      if (auto it = counts.find(token); it != counts.end()) c = it->second;
    }
  }

  TrainConfig config;
  config.dim = dim;
  return EmbeddingModel(partition, VocabTable(std::move(entries)), dim, std::move(input), {},
                        config);
}

}  // namespace ontoforge::embedding
