#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ontoforge/ontology.hpp"
#include "ontoforge/temporal.hpp"
#include "ontoforge/validation.hpp"

namespace ontoforge::api {

enum class Role { annotator, expert };

struct Session {
  std::string actor;
  Role role = Role::annotator;
  std::string opened;

  bool may_label() const { return role == Role::annotator; }
  bool may_judge() const { return role == Role::expert; }
};

struct AssertionFilter {
  std::optional<int> partition;
  std::optional<ontology::Status> status;
  std::optional<std::string> term;  // matches concept1 or concept2
};

// KB and judgment files behind a single-writer / multi-reader lock. Every
// mutation is written to disk before the call returns; a failed write
// leaves the in-memory state unchanged.
class AnnotationStore {
 public:
  // The KB file must exist; a missing judgment file starts empty.
  AnnotationStore(std::filesystem::path kb_path, std::filesystem::path judgments_path);

  std::vector<ontology::Assertion> candidates(std::optional<int> partition, std::size_t limit) const;
  std::vector<ontology::Assertion> assertions(const AssertionFilter& filter) const;
  ontology::Assertion assertion(ontology::AssertionId id) const;

  ontology::Assertion label(ontology::AssertionId id, ontology::SemanticLabel label,
                            const Session& session, bool force = false);
  ontology::Assertion reject(ontology::AssertionId id, const Session& session, bool force = false);
  validation::RecordResult judge(ontology::AssertionId id, validation::Verdict verdict,
                                 const Session& session);

  validation::ValidationReport report(int partition) const;
  temporal::Timeline timeline(std::string_view term, std::size_t n) const;

  ontology::KnowledgeBase kb_snapshot() const;
  validation::JudgmentStore judgments_snapshot() const;

 private:
  std::filesystem::path kb_path_;
  std::filesystem::path judgments_path_;
  mutable std::shared_mutex mutex_;
  ontology::KnowledgeBase kb_;
  validation::JudgmentStore judgments_;
};

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;  // query string
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;  // JSON
};

// Maps requests onto store operations. Transport-independent so the same
// routing is exercised in-process and over HTTP.
class Router {
 public:
  explicit Router(AnnotationStore& store) : store_(store) {}
  Response handle(const Request& request) const;

 private:
  AnnotationStore& store_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

class Server {
 public:
  // Binds immediately; throws DataError when the port cannot be bound.
  Server(AnnotationStore& store, const ServerOptions& options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const { return port_; }
  // Blocks until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace ontoforge::api
