#include "ontoforge/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ontoforge/api.hpp"
#include "ontoforge/corpus.hpp"
#include "ontoforge/error.hpp"
#include "ontoforge/lexstats.hpp"
#include "ontoforge/ontology.hpp"
#include "ontoforge/temporal.hpp"
#include "ontoforge/validation.hpp"
#include "text_io.hpp"

namespace ontoforge::cli {
namespace fs = std::filesystem;

namespace {

lexstats::PosLexicon lexicon_from(const std::optional<fs::path>& path) {
  // Without a lexicon every token is admitted as a noun candidate.
  if (!path) return lexstats::PosLexicon(lexstats::Pos::noun);
  return lexstats::PosLexicon::load(*path);
}

lexstats::Stoplist stoplist_from(const std::optional<fs::path>& path) {
  return path ? lexstats::load_stoplist(*path) : lexstats::Stoplist{};
}

fs::path model_file(const fs::path& dir, int year) {
  return dir / ("model_" + std::to_string(year) + ".vec");
}

std::optional<int> year_from_model_name(const fs::path& path) {
  static const std::regex pattern(R"(model_(-?\d+)\.vec)");
  std::smatch m;
  const std::string name = path.filename().string();
  if (std::regex_match(name, m, pattern)) return std::stoi(m[1]);
  return std::nullopt;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void write_partition_summary(const std::vector<corpus::Partition>& parts, bool include_titles,
                             const fs::path& path) {
  std::string content = "partition\tdocuments\ttokens\n";
  for (const auto& p : parts) {
    std::size_t tokens = 0;
    for (const auto& doc : p.documents) tokens += corpus::document_tokens(doc, include_titles).size();
    content += std::to_string(p.year) + "\t" + std::to_string(p.documents.size()) + "\t" +
               std::to_string(tokens) + "\n";
  }
  text_io::write_file_atomic(path, content);
}

// Options shared by the subcommands that read the corpus or train models.
struct CorpusOptions {
  std::string corpus;
  bool include_titles = true;

  void attach(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--corpus", corpus, "Corpus file (JSON lines)");
    if (required) opt->required();
    app->add_flag("--include-titles,!--no-include-titles", include_titles,
                  "Prepend headlines to article bodies (default on)");
  }
};

struct SeedFlags {
  std::size_t k = 50;
  std::string lexicon;
  std::string stoplist;
  bool filter_after_rank = false;

  void attach(CLI::App* app) {
    app->add_option("--k", k, "Seed words per partition")->check(CLI::PositiveNumber);
    app->add_option("--lexicon", lexicon, "POS lexicon (token<TAB>pos)")->check(CLI::ExistingFile);
    app->add_option("--stoplist", stoplist, "Stoplist, one token per line")->check(CLI::ExistingFile);
    app->add_flag("--filter-after-rank", filter_after_rank,
                  "Apply the POS filter after taking the top k");
  }
  std::optional<fs::path> lexicon_path() const {
    return lexicon.empty() ? std::nullopt : std::optional<fs::path>(lexicon);
  }
  std::optional<fs::path> stoplist_path() const {
    return stoplist.empty() ? std::nullopt : std::optional<fs::path>(stoplist);
  }
};

void attach_train_flags(CLI::App* app, embedding::TrainConfig& c) {
  app->add_option("--dim", c.dim, "Vector dimensionality")->capture_default_str();
  app->add_option("--window", c.window, "Maximum context distance")->capture_default_str();
  app->add_option("--negatives", c.negatives, "Negative samples per pair")->capture_default_str();
  app->add_option("--epochs", c.epochs, "Passes over the partition")->capture_default_str();
  app->add_option("--lr", c.initial_lr, "Initial learning rate")->capture_default_str();
  app->add_option("--min-count", c.min_count, "Vocabulary frequency floor")->capture_default_str();
  app->add_option("--subsample", c.subsample_t, "Subsampling threshold")->capture_default_str();
  app->add_option("--seed", c.rng_seed, "Random seed")->capture_default_str();
  app->add_flag("--deterministic", c.deterministic, "Single worker, reproducible output");
  app->add_option("--threads", c.workers, "Worker threads when not deterministic (0 = all)");
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::optional<std::string> env_out;

  fs::path out_dir(const std::string& flag) const { return env_out ? fs::path(*env_out) : fs::path(flag); }
};

std::optional<ontology::SemanticLabel> label_arg(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto label = ontology::parse_label(text);
  if (!label) {
    std::string valid;
    for (auto l : ontology::kAllLabels) valid += " " + std::string(ontology::to_string(l));
    throw ConfigError("unknown label \"" + text + "\"; valid labels:" + valid);
  }
  return label;
}

void print_assertions(std::ostream& out, const std::vector<ontology::Assertion>& as) {
  for (const auto& a : as) {
    out << a.partition << '\t' << ontology::format_assertion(a) << '\t' << fixed(a.similarity)
        << "\tid=" << a.id << '\n';
  }
}

std::string hierarchy_json(const ontology::Hierarchy& h) {
  const auto nodes = [](const auto& self, const std::vector<ontology::ChainNode>& ns) -> nlohmann::ordered_json {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& n : ns) arr.push_back({{"concept", n.term}, {"next", self(self, n.next)}});
    return arr;
  };
  nlohmann::ordered_json j;
  j["concept"] = h.term;
  j["above"] = nodes(nodes, h.above);
  j["below"] = nodes(nodes, h.below);
  j["cycles"] = h.cycles;
  return j.dump();
}

}  // namespace

void PipelineConfig::validate() const {
  if (k == 0) throw ConfigError("k must be positive");
  if (per_seed == 0) throw ConfigError("per_seed must be positive");
  if (!fs::exists(corpus)) throw DataError("corpus not found: " + corpus.string());
  if (lexicon && !fs::exists(*lexicon)) throw DataError("lexicon not found: " + lexicon->string());
  if (stoplist && !fs::exists(*stoplist)) throw DataError("stoplist not found: " + stoplist->string());
  train.validate();
}

PipelineSummary run_pipeline(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  const auto lexicon = lexicon_from(config.lexicon);
  const auto stoplist = stoplist_from(config.stoplist);

  const auto corpus = corpus::load_corpus(config.corpus);
  const auto partitions = corpus::partition_by_year(corpus);
  fs::create_directories(config.out_dir);
  write_partition_summary(partitions, config.include_titles, config.out_dir / "partitions.tsv");

  PipelineSummary summary;
  summary.documents = corpus.size();
  std::vector<lexstats::SeedWord> all_seeds;
  ontology::KnowledgeBase kb;
  for (const auto& part : partitions) {
    const auto tokens = corpus::token_stream(part.documents, config.include_titles);
    const auto table = lexstats::term_frequencies(part.year, tokens);
    const auto seeds = lexstats::extract_seeds(table, lexicon, stoplist,
                                               {config.k, config.filter_after_rank});
    all_seeds.insert(all_seeds.end(), seeds.begin(), seeds.end());

    const auto model = embedding::train(tokens, config.train, part.year);
    embedding::save_model(model, model_file(config.out_dir, part.year));

    auto expansion = ontology::expand_seeds(seeds, model, {config.per_seed, stoplist});
    for (auto& a : expansion.candidates) kb.add(std::move(a));
    for (const auto& s : expansion.skipped_seeds) {
      log << "warning: seed \"" << s << "\" (" << part.year << ") is not in the model vocabulary\n";
      summary.skipped_seeds.push_back(s);
    }
    log << part.year << ": " << part.documents.size() << " documents, " << seeds.size()
        << " seeds, vocabulary " << model.vocab().size() << ", "
        << expansion.candidates.size() << " candidates\n";
    summary.partitions.push_back(part.year);
  }
  lexstats::save_seeds(all_seeds, config.out_dir / "seeds.tsv");
  ontology::save_kb(kb, config.out_dir / "kb.jsonl");
  summary.seeds = all_seeds.size();
  summary.candidates = kb.size();
  return summary;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, std::nullopt};
  if (const char* env = std::getenv("ONTOFORGE_OUT"); env && *env) ctx.env_out = env;

  CLI::App app{"Learn a semantic-network knowledge base from a year-partitioned news corpus",
               "ontoforge"};
  app.require_subcommand(1);
  std::function<void()> action;

  // ingest
  CorpusOptions ingest_corpus;
  std::string ingest_out = "out";
  auto* ingest = app.add_subcommand("ingest", "Validate the corpus and summarize its partitions");
  ingest_corpus.attach(ingest);
  ingest->add_option("--out", ingest_out, "Output directory");
  ingest->callback([&] {
    action = [&] {
      const auto corpus = corpus::load_corpus(ingest_corpus.corpus);
      const auto parts = corpus::partition_by_year(corpus);
      const auto dir = ctx.out_dir(ingest_out);
      write_partition_summary(parts, ingest_corpus.include_titles, dir / "partitions.tsv");
      out << corpus.size() << " documents in " << parts.size() << " partitions\n";
      for (const auto& p : parts) out << "  " << p.year << ": " << p.documents.size() << "\n";
    };
  });

  // seeds
  CorpusOptions seeds_corpus;
  SeedFlags seed_flags;
  std::string seeds_out = "out";
  auto* seeds_cmd = app.add_subcommand("seeds", "Extract top-k seed words per partition");
  seeds_corpus.attach(seeds_cmd);
  seed_flags.attach(seeds_cmd);
  seeds_cmd->add_option("--out", seeds_out, "Output directory");
  seeds_cmd->callback([&] {
    action = [&] {
      const auto lexicon = lexicon_from(seed_flags.lexicon_path());
      const auto stoplist = stoplist_from(seed_flags.stoplist_path());
      const auto corpus = corpus::load_corpus(seeds_corpus.corpus);
      std::vector<lexstats::SeedWord> all;
      for (const auto& p : corpus::partition_by_year(corpus)) {
        const auto table = lexstats::term_frequencies(p, seeds_corpus.include_titles);
        auto seeds = lexstats::extract_seeds(table, lexicon, stoplist,
                                             {seed_flags.k, seed_flags.filter_after_rank});
        for (const auto& s : seeds) {
          out << s.partition << '\t' << s.rank << '\t' << s.token << '\t'
              << lexstats::to_string(s.pos) << '\t' << s.frequency << '\n';
        }
        all.insert(all.end(), seeds.begin(), seeds.end());
      }
      lexstats::save_seeds(all, ctx.out_dir(seeds_out) / "seeds.tsv");
    };
  });

  // train
  CorpusOptions train_corpus;
  embedding::TrainConfig train_config;
  int train_partition = 0;
  std::string train_out = "out";
  auto* train_cmd = app.add_subcommand("train", "Train a skip-gram model for one partition");
  train_corpus.attach(train_cmd);
  train_cmd->add_option("--partition", train_partition, "Partition year")->required();
  attach_train_flags(train_cmd, train_config);
  train_cmd->add_option("--out", train_out, "Output directory");
  train_cmd->callback([&] {
    action = [&] {
      const auto corpus = corpus::load_corpus(train_corpus.corpus);
      for (const auto& p : corpus::partition_by_year(corpus)) {
        if (p.year != train_partition) continue;
        const auto model = embedding::train(corpus::token_stream(p.documents, train_corpus.include_titles),
                                            train_config, p.year);
        const auto path = model_file(ctx.out_dir(train_out), p.year);
        embedding::save_model(model, path);
        out << "wrote " << path.string() << " (" << model.vocab().size() << " x " << model.dim()
            << ")\n";
        return;
      }
      throw DataError("corpus has no documents in partition " + std::to_string(train_partition));
    };
  });

  // expand
  std::string expand_seeds_path;
  std::vector<std::string> expand_models;
  std::size_t per_seed = 3;
  std::string expand_stoplist;
  std::string expand_kb;
  std::optional<int> expand_partition;
  bool expand_append = false;
  std::string expand_out = "out";
  auto* expand = app.add_subcommand("expand", "Turn seed neighbors into candidate assertions");
  expand->add_option("--seeds", expand_seeds_path, "seeds.tsv")->required()->check(CLI::ExistingFile);
  expand->add_option("--model", expand_models, "Vector file(s), named model_<year>.vec")
      ->required()->check(CLI::ExistingFile);
  expand->add_option("--per-seed", per_seed, "Candidates per seed")->check(CLI::PositiveNumber);
  expand->add_option("--stoplist", expand_stoplist, "Tokens never used as neighbors")
      ->check(CLI::ExistingFile);
  expand->add_option("--partition", expand_partition, "Partition of a single --model");
  expand->add_option("--kb", expand_kb, "Knowledge base file (default <out>/kb.jsonl)");
  expand->add_flag("--append", expand_append, "Add to an existing knowledge base");
  expand->add_option("--out", expand_out, "Output directory");
  expand->callback([&] {
    action = [&] {
      const auto seeds = lexstats::load_seeds(expand_seeds_path);
      const auto stoplist = stoplist_from(expand_stoplist.empty() ? std::nullopt
                                                                  : std::optional<fs::path>(expand_stoplist));
      const fs::path kb_path = expand_kb.empty() ? ctx.out_dir(expand_out) / "kb.jsonl" : fs::path(expand_kb);
      ontology::KnowledgeBase kb;
      if (expand_append && fs::exists(kb_path)) kb = ontology::load_kb(kb_path);
      if (expand_partition && expand_models.size() != 1) {
        throw ConfigError("--partition requires exactly one --model");
      }
      std::size_t added = 0;
      for (const auto& m : expand_models) {
        auto year = expand_partition ? expand_partition : year_from_model_name(m);
        if (!year) throw ConfigError("cannot infer partition from " + m + "; pass --partition");
        const auto model = embedding::load_model(m, *year);
        std::vector<lexstats::SeedWord> mine;
        std::copy_if(seeds.begin(), seeds.end(), std::back_inserter(mine),
                     [&](const auto& s) { return s.partition == *year; });
        auto result = ontology::expand_seeds(mine, model, {per_seed, stoplist});
        for (const auto& s : result.skipped_seeds) {
          err << "warning: seed \"" << s << "\" (" << *year << ") is not in the model vocabulary\n";
        }
        for (auto& a : result.candidates) {
          kb.add(std::move(a));
          ++added;
        }
      }
      ontology::save_kb(kb, kb_path);
      out << added << " candidate assertions written to " << kb_path.string() << "\n";
    };
  });

  // kb
  std::string kb_path_flag;
  std::string kb_out = "out";
  auto* kb_cmd = app.add_subcommand("kb", "Query and label the knowledge base");
  kb_cmd->require_subcommand(1);
  kb_cmd->add_option("--kb", kb_path_flag, "Knowledge base file (default <out>/kb.jsonl)");
  kb_cmd->add_option("--out", kb_out, "Output directory");
  kb_cmd->fallthrough();
  const auto kb_file = [&]() -> fs::path {
    return kb_path_flag.empty() ? ctx.out_dir(kb_out) / "kb.jsonl" : fs::path(kb_path_flag);
  };

  std::string q_concept, q_label, q_direction = "either", q_format = "text";
  std::optional<int> q_partition;
  auto* kb_query = kb_cmd->add_subcommand("query", "Labeled assertions mentioning a concept");
  kb_query->add_option("concept", q_concept)->required();
  kb_query->add_option("--label", q_label, "Only this semantic label");
  kb_query->add_option("--direction", q_direction, "subject, object or either")
      ->check(CLI::IsMember({"subject", "object", "either"}));
  kb_query->add_option("--partition", q_partition, "Only this partition");
  kb_query->add_option("--format", q_format, "Output format (default text)")->check(CLI::IsMember({"text", "json"}));
  kb_query->callback([&] {
    action = [&] {
      const auto kb = ontology::load_kb(kb_file());
      const auto dir = q_direction == "subject"  ? ontology::Direction::as_subject
                       : q_direction == "object" ? ontology::Direction::as_object
                                                 : ontology::Direction::either;
      const auto rows = kb.query(q_concept, dir, {label_arg(q_label), q_partition});
      if (q_format == "json") {
        out << "[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          out << (i ? "," : "") << ontology::assertion_to_json_line(rows[i]);
        }
        out << "]\n";
      } else {
        print_assertions(out, rows);
      }
    };
  });

  std::string c_concept, c_format = "text";
  auto* kb_chain = kb_cmd->add_subcommand("chain", "Hypernym / membership hierarchy of a concept");
  kb_chain->add_option("concept", c_concept)->required();
  kb_chain->add_option("--format", c_format, "Output format (default text)")->check(CLI::IsMember({"text", "json"}));
  kb_chain->callback([&] {
    action = [&] {
      const auto h = ontology::hypernym_chain(ontology::load_kb(kb_file()), c_concept);
      out << (c_format == "json" ? hierarchy_json(h) + "\n" : ontology::render_hierarchy(h));
    };
  });

  ontology::AssertionId l_id = 0;
  std::string l_label, l_annotator;
  bool l_force = false;
  auto* kb_label = kb_cmd->add_subcommand("label", "Assign a semantic label to a candidate");
  kb_label->add_option("id", l_id)->required();
  kb_label->add_option("label", l_label)->required();
  kb_label->add_option("--annotator", l_annotator)->required();
  kb_label->add_flag("--force", l_force, "Relabel an already labeled assertion");
  kb_label->callback([&] {
    action = [&] {
      const auto path = kb_file();
      auto kb = ontology::load_kb(path);
      const auto& a = kb.label(l_id, *label_arg(l_label), l_annotator, {l_force, std::nullopt});
      ontology::save_kb(kb, path);
      out << ontology::format_assertion(a) << "\n";
    };
  });

  ontology::AssertionId r_id = 0;
  std::string r_annotator;
  bool r_force = false;
  auto* kb_reject = kb_cmd->add_subcommand("reject", "Reject a candidate");
  kb_reject->add_option("id", r_id)->required();
  kb_reject->add_option("--annotator", r_annotator)->required();
  kb_reject->add_flag("--force", r_force, "Reject an already labeled assertion");
  kb_reject->callback([&] {
    action = [&] {
      const auto path = kb_file();
      auto kb = ontology::load_kb(path);
      kb.reject(r_id, r_annotator, {r_force, std::nullopt});
      ontology::save_kb(kb, path);
      out << "rejected " << r_id << "\n";
    };
  });

  std::string ls_status;
  std::optional<int> ls_partition;
  auto* kb_list = kb_cmd->add_subcommand("list", "List assertions by status");
  kb_list->add_option("--status", ls_status)->check(CLI::IsMember({"candidate", "labeled", "rejected"}));
  kb_list->add_option("--partition", ls_partition);
  kb_list->callback([&] {
    action = [&] {
      const auto kb = ontology::load_kb(kb_file());
      for (const auto& a : kb.assertions()) {
        if (!ls_status.empty() && ontology::to_string(a.status) != ls_status) continue;
        if (ls_partition && a.partition != *ls_partition) continue;
        out << a.id << '\t' << a.partition << '\t' << ontology::format_assertion(a) << '\t'
            << fixed(a.similarity) << '\t' << ontology::to_string(a.status) << '\n';
      }
    };
  });

  // validate
  std::string v_kb, v_judgments, v_out = "out";
  auto* validate = app.add_subcommand("validate", "Expert judgments and agreeability reports");
  validate->require_subcommand(1);
  validate->add_option("--kb", v_kb, "Knowledge base file (default <out>/kb.jsonl)");
  validate->add_option("--judgments", v_judgments, "Judgment CSV (default <out>/judgments.csv)");
  validate->add_option("--out", v_out, "Output directory");
  validate->fallthrough();
  const auto v_kb_file = [&] { return v_kb.empty() ? ctx.out_dir(v_out) / "kb.jsonl" : fs::path(v_kb); };
  const auto v_judgment_file = [&] {
    return v_judgments.empty() ? ctx.out_dir(v_out) / "judgments.csv" : fs::path(v_judgments);
  };

  int rep_partition = 0;
  std::string rep_format = "text";
  auto* report = validate->add_subcommand("report", "Agreeability for one partition");
  report->add_option("--partition", rep_partition)->required();
  report->add_option("--format", rep_format, "Output format (default text)")->check(CLI::IsMember({"text", "json"}));
  report->callback([&] {
    action = [&] {
      const auto kb = ontology::load_kb(v_kb_file());
      const auto store = validation::load_judgments(v_judgment_file());
      const auto r = validation::agreeability_rate(store, kb, rep_partition);
      out << (rep_format == "json" ? validation::report_to_json(r) + "\n" : validation::render_report(r));
    };
  });

  ontology::AssertionId j_id = 0;
  std::string j_expert, j_verdict;
  auto* judge = validate->add_subcommand("judge", "Record an Agree/Disagree verdict");
  judge->add_option("id", j_id)->required();
  judge->add_option("--expert", j_expert)->required();
  judge->add_option("--verdict", j_verdict)->required()->check(CLI::IsMember({"agree", "disagree"}));
  judge->callback([&] {
    action = [&] {
      const auto kb = ontology::load_kb(v_kb_file());
      const auto path = v_judgment_file();
      auto store = fs::exists(path) ? validation::load_judgments(path) : validation::JudgmentStore{};
      auto result = store.record(kb, j_id, j_expert, *validation::parse_verdict(j_verdict));
      validation::save_judgments(store, path);
      if (result.replaced) {
        err << "warning: replaced earlier verdict by " << j_expert << " on assertion " << j_id << "\n";
      }
      out << ontology::format_assertion(kb.at(j_id)) << " " << j_verdict << " by " << j_expert << "\n";
    };
  });

  // timeline / diff
  std::string t_concept, t_kb, t_format = "text", t_out = "out";
  std::size_t t_n = 3;
  auto* timeline = app.add_subcommand("timeline", "Top assertions of a concept per partition");
  timeline->add_option("concept", t_concept)->required();
  timeline->add_option("--n", t_n, "Assertions per partition")->check(CLI::PositiveNumber);
  timeline->add_option("--kb", t_kb, "Knowledge base file (default <out>/kb.jsonl)");
  timeline->add_option("--format", t_format, "Output format (default text)")->check(CLI::IsMember({"text", "json"}));
  timeline->add_option("--out", t_out, "Output directory");
  timeline->callback([&] {
    action = [&] {
      const auto kb = ontology::load_kb(t_kb.empty() ? ctx.out_dir(t_out) / "kb.jsonl" : fs::path(t_kb));
      const auto t = temporal::entity_timeline(kb, t_concept, t_n);
      out << (t_format == "json" ? temporal::timeline_to_json(t) + "\n" : temporal::render_timeline(t));
    };
  });

  std::string d_concept, d_kb, d_format = "text", d_out = "out";
  std::optional<std::size_t> d_n;
  auto* diff = app.add_subcommand("diff", "Association changes between consecutive partitions");
  diff->add_option("concept", d_concept)->required();
  diff->add_option("--n", d_n, "Compare only the top n assertions per partition");
  diff->add_option("--kb", d_kb, "Knowledge base file (default <out>/kb.jsonl)");
  diff->add_option("--format", d_format, "Output format (default text)")->check(CLI::IsMember({"text", "json"}));
  diff->add_option("--out", d_out, "Output directory");
  diff->callback([&] {
    action = [&] {
      const auto kb = ontology::load_kb(d_kb.empty() ? ctx.out_dir(d_out) / "kb.jsonl" : fs::path(d_kb));
      const auto d = temporal::association_diff(kb, d_concept, d_n);
      out << (d_format == "json" ? temporal::diff_to_json(d) + "\n" : temporal::render_diff(d));
    };
  });

  // serve
  std::string s_kb, s_judgments, s_host = "127.0.0.1", s_static, s_out = "out";
  int s_port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP service for labeling and expert validation");
  serve->add_option("--port", s_port, "TCP port (0 = any free port)")->capture_default_str();
  serve->add_option("--host", s_host, "Interface to bind")->capture_default_str();
  serve->add_option("--kb", s_kb, "Knowledge base file (default <out>/kb.jsonl)");
  serve->add_option("--judgments", s_judgments, "Judgment CSV (default <out>/judgments.csv)");
  serve->add_option("--static", s_static, "Directory of UI files served at /");
  serve->add_option("--out", s_out, "Output directory");
  serve->callback([&] {
    action = [&] {
      const auto dir = ctx.out_dir(s_out);
      api::AnnotationStore store(s_kb.empty() ? dir / "kb.jsonl" : fs::path(s_kb),
                                 s_judgments.empty() ? dir / "judgments.csv" : fs::path(s_judgments));
      api::ServerOptions opts{s_host, s_port, std::nullopt};
      if (!s_static.empty()) opts.static_dir = fs::path(s_static);
      api::Server server(store, opts);
      out << "listening on http://" << s_host << ":" << server.port() << std::endl;
      server.run();
    };
  });

  // pipeline
  CorpusOptions p_corpus;
  SeedFlags p_seeds;
  PipelineConfig p_config;
  std::string p_out = "out";
  auto* pipeline = app.add_subcommand("pipeline", "ingest -> seeds -> train -> expand");
  p_corpus.attach(pipeline);
  p_seeds.attach(pipeline);
  attach_train_flags(pipeline, p_config.train);
  pipeline->add_option("--per-seed", p_config.per_seed, "Candidates per seed")->check(CLI::PositiveNumber);
  pipeline->add_option("--out", p_out, "Output directory");
  pipeline->callback([&] {
    action = [&] {
      p_config.corpus = p_corpus.corpus;
      p_config.include_titles = p_corpus.include_titles;
      p_config.lexicon = p_seeds.lexicon_path();
      p_config.stoplist = p_seeds.stoplist_path();
      p_config.k = p_seeds.k;
      p_config.filter_after_rank = p_seeds.filter_after_rank;
      p_config.out_dir = ctx.out_dir(p_out);
      const auto summary = run_pipeline(p_config, err);
      out << summary.documents << " documents, " << summary.partitions.size() << " partitions, "
          << summary.seeds << " seeds, " << summary.candidates << " candidate assertions -> "
          << p_config.out_dir.string() << "\n";
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << "\n";
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    // Point at the innermost subcommand's usage.
    const CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    err << target->help();
    return kUsage;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace ontoforge::cli
