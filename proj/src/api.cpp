#include "ontoforge/api.hpp"

#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "ontoforge/error.hpp"
#include "text_io.hpp"

namespace ontoforge::api {

using nlohmann::json;
using ontology::Assertion;
using ontology::AssertionId;

// --- AnnotationStore -------------------------------------------------------

AnnotationStore::AnnotationStore(std::filesystem::path kb_path,
                                 std::filesystem::path judgments_path)
    : kb_path_(std::move(kb_path)), judgments_path_(std::move(judgments_path)) {
  if (!std::filesystem::exists(kb_path_)) {
    throw DataError("knowledge base file not found: " + kb_path_.string());
  }
  kb_ = ontology::load_kb(kb_path_);
  if (std::filesystem::exists(judgments_path_)) {
    judgments_ = validation::load_judgments(judgments_path_);
  }
}

std::vector<Assertion> AnnotationStore::candidates(std::optional<int> partition,
                                                   std::size_t limit) const {
  std::shared_lock lock(mutex_);
  return kb_.candidates(partition, limit);
}

std::vector<Assertion> AnnotationStore::assertions(const AssertionFilter& filter) const {
  std::shared_lock lock(mutex_);
  std::vector<Assertion> out;
  for (const auto& a : kb_.assertions()) {
    if (filter.partition && a.partition != *filter.partition) continue;
    if (filter.status && a.status != *filter.status) continue;
    if (filter.term && a.concept1 != *filter.term && a.concept2 != *filter.term) continue;
    out.push_back(a);
  }
  return out;
}

Assertion AnnotationStore::assertion(AssertionId id) const {
  std::shared_lock lock(mutex_);
  return kb_.at(id);
}

Assertion AnnotationStore::label(AssertionId id, ontology::SemanticLabel label,
                                 const Session& session, bool force) {
  if (!session.may_label()) throw ConflictError("only annotators may label assertions");
  std::unique_lock lock(mutex_);
  auto next = kb_;
  Assertion result = next.label(id, label, session.actor, {force, std::nullopt});
  ontology::save_kb(next, kb_path_);
  kb_ = std::move(next);
  return result;
}

Assertion AnnotationStore::reject(AssertionId id, const Session& session, bool force) {
  if (!session.may_label()) throw ConflictError("only annotators may reject assertions");
  std::unique_lock lock(mutex_);
  auto next = kb_;
  Assertion result = next.reject(id, session.actor, {force, std::nullopt});
  ontology::save_kb(next, kb_path_);
  kb_ = std::move(next);
  return result;
}

validation::RecordResult AnnotationStore::judge(AssertionId id, validation::Verdict verdict,
                                                const Session& session) {
  if (!session.may_judge()) throw ConflictError("only experts may record judgments");
  std::unique_lock lock(mutex_);
  auto next = judgments_;
  auto result = next.record(kb_, id, session.actor, verdict);
  validation::save_judgments(next, judgments_path_);
  judgments_ = std::move(next);
  return result;
}

validation::ValidationReport AnnotationStore::report(int partition) const {
  std::shared_lock lock(mutex_);
  return validation::agreeability_rate(judgments_, kb_, partition);
}

temporal::Timeline AnnotationStore::timeline(std::string_view term, std::size_t n) const {
  std::shared_lock lock(mutex_);
  return temporal::entity_timeline(kb_, term, n);
}

ontology::KnowledgeBase AnnotationStore::kb_snapshot() const {
  std::shared_lock lock(mutex_);
  return kb_;
}

validation::JudgmentStore AnnotationStore::judgments_snapshot() const {
  std::shared_lock lock(mutex_);
  return judgments_;
}

// --- Router ----------------------------------------------------------------

namespace {

struct HttpError {
  int status;
  json body;
};

[[noreturn]] void fail(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  throw HttpError{status, std::move(extra)};
}

json assertion_json(const Assertion& a) {
  return json::parse(ontology::assertion_to_json_line(a));
}

json assertion_list(const std::vector<Assertion>& as) {
  auto arr = json::array();
  for (const auto& a : as) arr.push_back(assertion_json(a));
  return arr;
}

json valid_labels() {
  auto arr = json::array();
  for (auto l : ontology::kAllLabels) arr.push_back(std::string(ontology::to_string(l)));
  return arr;
}

template <typename Int>
Int int_param(const Request& r, const std::string& name, Int fallback) {
  auto it = r.params.find(name);
  if (it == r.params.end()) return fallback;
  Int v{};
  if (!text_io::parse_int(it->second, v)) fail(400, "query parameter " + name + " must be an integer");
  return v;
}

std::optional<int> optional_int_param(const Request& r, const std::string& name) {
  if (!r.params.contains(name)) return std::nullopt;
  return int_param<int>(r, name, 0);
}

json parse_body(const Request& r) {
  json body;
  try {
    body = json::parse(r.body.empty() ? std::string("{}") : r.body);
  } catch (const json::parse_error&) {
    fail(400, "request body is not valid JSON");
  }
  if (!body.is_object()) fail(400, "request body must be a JSON object");
  return body;
}

std::string required_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
    fail(400, std::string("field \"") + key + "\" is required");
  }
  return it->get<std::string>();
}

Session session_for(const json& body, const char* actor_field, Role role) {
  Session s{required_field(body, actor_field), role, ontology::utc_timestamp()};
  if (auto it = body.find("role"); it != body.end()) {
    const std::string declared = it->is_string() ? it->get<std::string>() : "";
    const std::string expected = role == Role::annotator ? "annotator" : "expert";
    if (declared != expected) fail(403, "role \"" + declared + "\" may not perform this action");
  }
  return s;
}

AssertionId parse_id(const std::string& text) {
  AssertionId id = 0;
  if (!text_io::parse_int(text, id) || id == 0) fail(404, "unknown assertion id " + text);
  return id;
}

}  // namespace

Response Router::handle(const Request& request) const {
  std::vector<std::string> parts;
  for (auto piece : text_io::split(request.path, '/')) {
    if (!piece.empty()) parts.emplace_back(piece);
  }
  const bool get = request.method == "GET";
  const bool post = request.method == "POST";

  try {
    if (get && parts.size() == 1 && parts[0] == "candidates") {
      const auto limit = int_param<std::size_t>(request, "limit", SIZE_MAX);
      return {200, assertion_list(store_.candidates(optional_int_param(request, "partition"), limit)).dump()};
    }
    if (get && parts.size() == 1 && parts[0] == "assertions") {
      AssertionFilter f;
      f.partition = optional_int_param(request, "partition");
      if (auto it = request.params.find("status"); it != request.params.end()) {
        f.status = ontology::parse_status(it->second);
        if (!f.status) fail(400, "unknown status " + it->second);
      }
      if (auto it = request.params.find("concept"); it != request.params.end()) f.term = it->second;
      return {200, assertion_list(store_.assertions(f)).dump()};
    }
    if (get && parts.size() == 1 && parts[0] == "labels") {
      auto arr = json::array();
      for (auto l : ontology::kAllLabels) {
        arr.push_back({{"label", std::string(ontology::to_string(l))},
                       {"rule", std::string(ontology::label_rule(l))}});
      }
      return {200, arr.dump()};
    }
    if (get && parts.size() == 2 && parts[0] == "assertions") {
      return {200, assertion_json(store_.assertion(parse_id(parts[1]))).dump()};
    }
    if (post && parts.size() == 3 && parts[0] == "assertions") {
      const AssertionId id = parse_id(parts[1]);
      const json body = parse_body(request);
      const bool force = body.value("force", false);
      if (parts[2] == "label") {
        const Session s = session_for(body, "annotator", Role::annotator);
        const auto text = body.contains("label") && body["label"].is_string()
                              ? body["label"].get<std::string>()
                              : std::string();
        auto label = ontology::parse_label(text);
        if (!label) {
          fail(422, "invalid label \"" + text + "\"", {{"valid_labels", valid_labels()}});
        }
        return {200, assertion_json(store_.label(id, *label, s, force)).dump()};
      }
      if (parts[2] == "reject") {
        const Session s = session_for(body, "annotator", Role::annotator);
        return {200, assertion_json(store_.reject(id, s, force)).dump()};
      }
      if (parts[2] == "judgment") {
        const Session s = session_for(body, "expert", Role::expert);
        const auto text = body.contains("verdict") && body["verdict"].is_string()
                              ? body["verdict"].get<std::string>()
                              : std::string();
        auto verdict = validation::parse_verdict(text);
        if (!verdict) {
          fail(422, "invalid verdict \"" + text + "\"",
               {{"valid_verdicts", json::array({"agree", "disagree"})}});
        }
        auto result = store_.judge(id, *verdict, s);
        json out = {{"assertion_id", result.judgment.assertion_id},
                    {"expert", result.judgment.expert},
                    {"verdict", std::string(validation::to_string(result.judgment.verdict))},
                    {"timestamp", result.judgment.timestamp},
                    {"replaced", result.replaced.has_value()}};
        return {200, out.dump()};
      }
    }
    if (get && parts.size() == 2 && parts[0] == "report") {
      int partition = 0;
      if (!text_io::parse_int(parts[1], partition)) fail(400, "partition must be an integer");
      return {200, validation::report_to_json(store_.report(partition))};
    }
    if (get && parts.size() == 2 && parts[0] == "timeline") {
      const auto n = int_param<std::size_t>(request, "n", 3);
      if (n == 0) fail(400, "n must be positive");
      return {200, temporal::timeline_to_json(store_.timeline(parts[1], n))};
    }
    fail(404, "no route for " + request.method + " " + request.path);
  } catch (const HttpError& e) {
    return {e.status, e.body.dump()};
  } catch (const NotFoundError& e) {
    return {404, json{{"error", e.what()}}.dump()};
  } catch (const ConflictError& e) {
    return {409, json{{"error", e.what()}}.dump()};
  } catch (const DataError& e) {
    return {404, json{{"error", e.what()}}.dump()};
  } catch (const std::exception& e) {
    return {500, json{{"error", e.what()}}.dump()};
  }
}

// --- Server ----------------------------------------------------------------

struct Server::Impl {
  explicit Impl(AnnotationStore& store) : router(store) {}
  Router router;
  httplib::Server http;
};

Server::Server(AnnotationStore& store, const ServerOptions& options)
    : impl_(std::make_unique<Impl>(store)) {
  const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.params[k] = v;
    const Response out = impl_->router.handle(r);
    res.status = out.status;
    res.set_content(out.body, "application/json; charset=utf-8");
  };
  for (const char* pattern : {"/candidates", "/assertions", "/assertions/[^/]+", "/labels",
                              "/report/[^/]+", "/timeline/[^/]+"}) {
    impl_->http.Get(pattern, dispatch);
  }
  impl_->http.Post("/assertions/[^/]+/[^/]+", dispatch);

  if (options.static_dir) {
    if (!impl_->http.set_mount_point("/", options.static_dir->string())) {
      throw DataError("static directory not found: " + options.static_dir->string());
    }
  }

  // SO_REUSEADDR only: a second server on a busy port must fail to bind.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  if (options.port == 0) {
    port_ = impl_->http.bind_to_any_port(options.host);
    if (port_ < 0) throw DataError("cannot bind " + options.host);
  } else {
    if (!impl_->http.bind_to_port(options.host, options.port)) {
      throw DataError("cannot bind " + options.host + ":" + std::to_string(options.port) +
                      " (port in use?)");
    }
    port_ = options.port;
  }
}

Server::~Server() { stop(); }

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace ontoforge::api
