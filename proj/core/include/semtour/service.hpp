#pragma once

// HTTP-facing service. `Service::handle` is transport independent so routing,
// status mapping and payloads are testable in process; HttpServer binds it to
// a socket and adds the live event stream.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "semtour/error.hpp"
#include "semtour/extraction.hpp"
#include "semtour/json.hpp"
#include "semtour/session.hpp"
#include "semtour/store.hpp"
#include "semtour/tour.hpp"

namespace semtour {

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

// Every error code maps to exactly one status.
int http_status(ErrorCode code);

// {"status", "code", "message", "detail"}
Json error_body(const Error& error);

// Server-sent event framing of one log event.
std::string sse_frame(const ProvenanceEvent& event);

// flag > SEMTOUR_PORT > 8080. Throws InvalidArgument for an unusable value.
int resolve_port(std::optional<int> flag);

class Service {
public:
    explicit Service(Clock clock = system_clock_ms());

    void add_documents(std::vector<Document> documents);
    void add_graph(KnowledgeGraph graph);

    HttpResponse handle(const HttpRequest& request);

    // Throws UnknownSession.
    std::shared_ptr<NavigationSession> session(const SessionId& id) const;
    std::shared_ptr<SharedGraph> graph(const std::string& id) const;

private:
    using Params = std::vector<std::string>;

    HttpResponse dispatch(const HttpRequest& request);

    HttpResponse post_corpora(const Json& body);
    HttpResponse post_build(const Json& body);
    HttpResponse get_entities(const std::string& graph, const HttpRequest& request);
    HttpResponse get_neighborhood(const std::string& graph, const HttpRequest& request);
    HttpResponse get_document(const std::string& document, const HttpRequest& request);
    HttpResponse post_seed(const Json& body);
    HttpResponse post_session(const Json& body);
    HttpResponse session_post(const std::string& session, const std::string& action, const Json& body);
    HttpResponse session_get(const std::string& session, const std::string& action, const HttpRequest& request);

    Document document(const DocumentId& id) const;
    SemanticTour tour(const TourId& id) const;

    Clock clock_;
    mutable std::shared_mutex mutex_;  // guards the registries, not their contents
    std::map<DocumentId, Document> documents_;
    std::vector<DocumentId> document_order_;  // first registration order; builds follow it
    ExtractorConfig extractor_ = ExtractorConfig::with_default_codes();
    std::map<std::string, std::shared_ptr<SharedGraph>> graphs_;
    std::map<TourId, SemanticTour> tours_;
    std::map<SessionId, std::shared_ptr<NavigationSession>> sessions_;
    std::atomic<std::uint64_t> next_session_{1};
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::chrono::milliseconds stream_poll{200};
};

// cpp-httplib server around a Service. Logs one line per request.
class HttpServer {
public:
    HttpServer(Service& service, ServerOptions options);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds the socket; returns the bound port. Throws IoError.
    int bind();
    // Serves until stop(). Call bind() first.
    void listen();
    // bind() and listen() on a background thread; returns the port.
    int start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace semtour
