#include "semtour/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <tuple>

namespace semtour {

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(path);
    while (std::getline(in, part, '/')) {
        if (!part.empty()) parts.push_back(part);
    }
    return parts;
}

HttpResponse json_response(int status, const Json& body) { return {status, "application/json", body.dump()}; }

Json parse_body(const std::string& body) {
    if (body.empty()) return Json::object();
    Json json = parse_json(body, "$body");
    if (!json.is_object()) fail(ErrorCode::SchemaError, "request body must be an object", {{"field", "$body"}});
    return json;
}

[[noreturn]] void body_error(const std::string& key, const std::string& problem) {
    const std::string field = "$body." + key;
    fail(ErrorCode::SchemaError, problem + " at " + field, {{"field", field}});
}

std::optional<std::string> opt_string(const Json& body, const std::string& key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) body_error(key, "expected string");
    return it->get<std::string>();
}

std::string req_string(const Json& body, const std::string& key) {
    auto value = opt_string(body, key);
    if (!value) body_error(key, "missing field");
    if (value->empty()) body_error(key, "empty value");
    return *value;
}

std::optional<std::uint64_t> opt_uint(const Json& body, const std::string& key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_unsigned()) body_error(key, "expected non-negative integer");
    return it->get<std::uint64_t>();
}

std::uint64_t req_uint(const Json& body, const std::string& key) {
    auto value = opt_uint(body, key);
    if (!value) body_error(key, "missing field");
    return *value;
}

std::optional<std::string> query(const HttpRequest& request, const std::string& key) {
    auto it = request.query.find(key);
    if (it == request.query.end()) return std::nullopt;
    return it->second;
}

std::uint64_t query_uint(const HttpRequest& request, const std::string& key, std::uint64_t fallback) {
    auto text = query(request, key);
    if (!text) return fallback;
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(*text, &used);
        if (used == text->size() && (*text)[0] != '-') return value;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::InvalidArgument, "query parameter " + key + " must be a non-negative integer",
         {{"parameter", key}});
}

Json summary_json(const StateSummary& summary) { return to_json(summary); }

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownScene:
        case ErrorCode::UnknownEntity:
        case ErrorCode::UnknownRelationType:
        case ErrorCode::UnknownEdge:
        case ErrorCode::UnknownDocument:
        case ErrorCode::UnknownEvent:
        case ErrorCode::UnknownGraph:
        case ErrorCode::UnknownTour:
        case ErrorCode::UnknownSession:
        case ErrorCode::RouteNotFound: return 404;
        case ErrorCode::AlreadySequenced:
        case ErrorCode::DuplicateId:
        case ErrorCode::SelfLoopForbidden:
        case ErrorCode::AmbiguousContainer:
        case ErrorCode::SessionMismatch:
        case ErrorCode::NotInTour:
        case ErrorCode::NotAdjacentToCurrent:
        case ErrorCode::SourceNotVisited:
        case ErrorCode::UseStepOrBranch: return 409;
        case ErrorCode::HighlightOutsideSelection:
        case ErrorCode::DanglingSource:
        case ErrorCode::NoMatches:
        case ErrorCode::EmptyTour:
        case ErrorCode::RangeOutOfBounds:
        case ErrorCode::SpanOutOfBounds:
        case ErrorCode::TacitProvenanceRequired: return 422;
        case ErrorCode::SchemaError:
        case ErrorCode::InvalidArgument: return 400;
        case ErrorCode::IoError: return 500;
    }
    return 500;
}

Json error_body(const Error& error) {
    return {{"status", http_status(error.code())},
            {"code", std::string(enum_name(error.code()))},
            {"message", error.message()},
            {"detail", error.detail()}};
}

std::string sse_frame(const ProvenanceEvent& event) {
    return "id: " + std::to_string(event.seq) + "\nevent: " + std::string(enum_name(event.kind)) +
           "\ndata: " + to_json(event).dump() + "\n\n";
}

int resolve_port(std::optional<int> flag) {
    auto check = [](long value, const std::string& origin) {
        if (value < 0 || value > 65535) fail(ErrorCode::InvalidArgument, "port out of range from " + origin);
        return static_cast<int>(value);
    };
    if (flag) return check(*flag, "flag");
    if (const char* env = std::getenv("SEMTOUR_PORT"); env && *env) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (*end != '\0') fail(ErrorCode::InvalidArgument, "SEMTOUR_PORT is not a number");
        return check(value, "SEMTOUR_PORT");
    }
    return 8080;
}

Service::Service(Clock clock) : clock_(std::move(clock)) {}

void Service::add_documents(std::vector<Document> documents) {
    std::unique_lock lock(mutex_);
    for (auto& doc : documents) {
        auto id = doc.id;
        if (!documents_.contains(id)) document_order_.push_back(id);
        documents_.insert_or_assign(std::move(id), std::move(doc));
    }
}

void Service::add_graph(KnowledgeGraph graph) {
    auto id = graph.id();
    auto shared = std::make_shared<SharedGraph>(std::move(graph));
    std::unique_lock lock(mutex_);
    graphs_.insert_or_assign(std::move(id), std::move(shared));
}

std::shared_ptr<NavigationSession> Service::session(const SessionId& id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorCode::UnknownSession, "unknown session " + id.str(), {{"session", id.str()}});
    return it->second;
}

std::shared_ptr<SharedGraph> Service::graph(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = graphs_.find(id);
    if (it == graphs_.end()) fail(ErrorCode::UnknownGraph, "unknown graph " + id, {{"graph", id}});
    return it->second;
}

Document Service::document(const DocumentId& id) const {
    std::shared_lock lock(mutex_);
    auto it = documents_.find(id);
    if (it == documents_.end()) {
        fail(ErrorCode::UnknownDocument, "unknown document " + id.str(), {{"document", id.str()}});
    }
    return it->second;
}

SemanticTour Service::tour(const TourId& id) const {
    std::shared_lock lock(mutex_);
    auto it = tours_.find(id);
    if (it == tours_.end()) fail(ErrorCode::UnknownTour, "unknown tour " + id.str(), {{"tour", id.str()}});
    return it->second;
}

HttpResponse Service::handle(const HttpRequest& request) {
    try {
        return dispatch(request);
    } catch (const Error& e) {
        return json_response(http_status(e.code()), error_body(e));
    } catch (const std::exception& e) {
        return json_response(400, error_body(Error(ErrorCode::InvalidArgument, e.what())));
    }
}

HttpResponse Service::dispatch(const HttpRequest& request) {
    const auto parts = split_path(request.path);
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    const std::size_t n = parts.size();

    if (get && n == 1 && parts[0] == "healthz") return json_response(200, {{"status", "ok"}});
    if (post && n == 1 && parts[0] == "corpora") return post_corpora(parse_body(request.body));
    if (n >= 2 && parts[0] == "graphs") {
        if (post && n == 2 && parts[1] == "build") return post_build(parse_body(request.body));
        if (get && n == 3 && parts[2] == "entities") return get_entities(parts[1], request);
        if (get && n == 3 && parts[2] == "neighborhood") return get_neighborhood(parts[1], request);
    }
    if (get && n == 2 && parts[0] == "documents") return get_document(parts[1], request);
    if (post && n == 2 && parts[0] == "tours" && parts[1] == "seed") return post_seed(parse_body(request.body));
    if (get && n == 2 && parts[0] == "tours") return json_response(200, to_json(tour(TourId(parts[1]))));
    if (n >= 1 && parts[0] == "sessions") {
        if (post && n == 1) return post_session(parse_body(request.body));
        if (post && n == 3) return session_post(parts[1], parts[2], parse_body(request.body));
        if (get && n == 2) return session_get(parts[1], "", request);
        if (get && n == 3) return session_get(parts[1], parts[2], request);
    }
    fail(ErrorCode::RouteNotFound, "no route for " + request.method + " " + request.path,
         {{"method", request.method}, {"path", request.path}});
}

HttpResponse Service::post_corpora(const Json& body) {
    std::vector<Document> documents;
    std::optional<ExtractorConfig> extractor;
    if (auto manifest_path = opt_string(body, "manifest")) {
        CorpusManifest manifest = load_manifest(*manifest_path);
        documents = load_corpus(manifest);
        extractor = manifest.extractor;
    } else if (auto it = body.find("documents"); it != body.end()) {
        if (!it->is_array()) body_error("documents", "expected array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            documents.push_back(from_json<Document>((*it)[i], "$body.documents[" + std::to_string(i) + "]"));
        }
    } else {
        body_error("manifest", "missing field");
    }
    if (auto it = body.find("extractor"); it != body.end() && !it->is_null()) {
        extractor = from_json<ExtractorConfig>(*it, "$body.extractor");
    }

    Json ids = Json::array();
    for (const auto& doc : documents) ids.push_back(doc.id.str());
    add_documents(std::move(documents));
    if (extractor) {
        std::unique_lock lock(mutex_);
        extractor_ = *extractor;
    }
    return json_response(201, {{"documents", std::move(ids)}});
}

HttpResponse Service::post_build(const Json& body) {
    const std::string graph_id = opt_string(body, "graph").value_or("default");
    std::vector<Document> corpus;
    ExtractorConfig config;
    {
        std::shared_lock lock(mutex_);
        config = extractor_;
        if (auto it = body.find("documents"); it != body.end() && !it->is_null()) {
            if (!it->is_array()) body_error("documents", "expected array");
            for (const auto& id : *it) {
                if (!id.is_string()) body_error("documents", "expected document ids");
                auto doc = documents_.find(DocumentId(id.get<std::string>()));
                if (doc == documents_.end()) {
                    fail(ErrorCode::UnknownDocument, "unknown document " + id.get<std::string>(),
                         {{"document", id.get<std::string>()}});
                }
                corpus.push_back(doc->second);
            }
        } else {
            for (const auto& id : document_order_) corpus.push_back(documents_.at(id));
        }
    }
    if (auto it = body.find("extractor"); it != body.end() && !it->is_null()) {
        config = from_json<ExtractorConfig>(*it, "$body.extractor");
    }

    BuildResult result = build_graph(corpus, config, graph_id);
    Json unresolved = Json::array();
    for (const auto& u : result.unresolved) {
        unresolved.push_back(
            {{"document", u.document.str()}, {"target", u.target}, {"span", to_json(u.reference.source_span)}});
    }
    Json response{{"graph", graph_id},
                  {"entities", result.graph.entity_count()},
                  {"edges", result.graph.edge_count()},
                  {"hash", graph_hash(result.graph)},
                  {"unresolved", std::move(unresolved)}};
    add_graph(std::move(result.graph));
    return json_response(201, response);
}

HttpResponse Service::get_entities(const std::string& graph_id, const HttpRequest& request) {
    const std::string q = query(request, "q").value_or("");
    if (q.empty()) fail(ErrorCode::InvalidArgument, "query parameter q is required", {{"parameter", "q"}});
    const std::size_t limit = query_uint(request, "limit", 50);
    Json hits = graph(graph_id)->read([&](const KnowledgeGraph& g) {
        Json out = Json::array();
        for (const auto& hit : search_entities(g, q, limit)) {
            out.push_back({{"entity", to_json(g.entity(hit.entity))}, {"score", hit.score}});
        }
        return out;
    });
    return json_response(200, {{"query", q}, {"hits", std::move(hits)}});
}

HttpResponse Service::get_neighborhood(const std::string& graph_id, const HttpRequest& request) {
    const auto entity = query(request, "entity");
    if (!entity || entity->empty()) {
        fail(ErrorCode::InvalidArgument, "query parameter entity is required", {{"parameter", "entity"}});
    }
    const auto depth = query_uint(request, "depth", 1);
    if (depth > 64) fail(ErrorCode::InvalidArgument, "depth too large", {{"parameter", "depth"}});
    Direction direction = Direction::both;
    if (auto text = query(request, "direction")) {
        auto parsed = enum_from_name<Direction>(*text);
        if (!parsed) fail(ErrorCode::InvalidArgument, "direction must be out, in or both", {{"parameter", "direction"}});
        direction = *parsed;
    }
    Json body = graph(graph_id)->read([&](const KnowledgeGraph& g) {
        Subgraph sub = neighborhood(g, EntityId(*entity), static_cast<int>(depth), direction);
        Json entities = Json::array();
        for (const auto& id : sub.entities) entities.push_back(to_json(g.entity(id)));
        Json edges = Json::array();
        for (const auto& id : sub.edges) edges.push_back(to_json(g.edge(id)));
        return Json{{"entity", *entity}, {"depth", depth}, {"entities", std::move(entities)}, {"edges", std::move(edges)}};
    });
    return json_response(200, body);
}

HttpResponse Service::get_document(const std::string& document_id, const HttpRequest& request) {
    const Document doc = document(DocumentId(document_id));
    Json body = to_json(doc);
    Json mentions = Json::array();
    const std::string graph_id = query(request, "graph").value_or("default");
    std::shared_ptr<SharedGraph> shared;
    {
        std::shared_lock lock(mutex_);
        if (auto it = graphs_.find(graph_id); it != graphs_.end()) shared = it->second;
    }
    if (shared) {
        // Entities whose backing span lies in this document, in text order.
        mentions = shared->read([&](const KnowledgeGraph& g) {
            std::vector<std::tuple<Span, EntityId, EntityKind>> found;
            for (const auto& [id, entity] : g.entities()) {
                if (!entity.source) continue;
                const DataPoint* point = g.data().find_point(*entity.source);
                if (!point || !point->locator || point->locator->document != doc.id) continue;
                found.emplace_back(point->locator->span, id, entity.kind);
            }
            std::sort(found.begin(), found.end());
            Json out = Json::array();
            for (const auto& [span, id, kind] : found) {
                out.push_back({{"entity", id.str()}, {"kind", std::string(enum_name(kind))}, {"span", to_json(span)}});
            }
            return out;
        });
    }
    body["mentions"] = std::move(mentions);
    return json_response(200, body);
}

HttpResponse Service::post_seed(const Json& body) {
    const std::string graph_id = opt_string(body, "graph").value_or("default");
    auto shared = graph(graph_id);
    std::vector<SemanticTour> tours;
    if (auto entity = opt_string(body, "entity")) {
        const auto radius = opt_uint(body, "radius").value_or(1);
        if (radius < 1 || radius > 64) body_error("radius", "radius must be between 1 and 64");
        tours.push_back(shared->read(
            [&](const KnowledgeGraph& g) { return seed_from_entity(g, EntityId(*entity), static_cast<int>(radius)); }));
    } else if (auto document = opt_string(body, "document")) {
        tours = shared->read([&](const KnowledgeGraph& g) { return seed_from_document(g, DocumentId(*document)); });
    } else {
        body_error("entity", "either entity or document is required");
    }
    Json out = Json::array();
    {
        std::unique_lock lock(mutex_);
        for (const auto& t : tours) {
            out.push_back(to_json(t));
            tours_.insert_or_assign(t.id, t);
        }
    }
    return json_response(201, {{"tours", std::move(out)}});
}

HttpResponse Service::post_session(const Json& body) {
    SemanticTour t = tour(TourId(req_string(body, "tour")));
    const EntityId start(opt_string(body, "start").value_or(t.start.str()));
    auto shared = graph(t.graph_id);
    const SessionId id("s-" + std::to_string(next_session_.fetch_add(1)));
    auto created = std::make_shared<NavigationSession>(id, std::move(shared), std::move(t), start, clock_);
    const StateSummary summary = created->summary();
    {
        std::unique_lock lock(mutex_);
        sessions_.emplace(id, std::move(created));
    }
    return json_response(201, summary_json(summary));
}

HttpResponse Service::session_post(const std::string& session_id, const std::string& action, const Json& body) {
    auto s = session(SessionId(session_id));
    if (action == "step") return json_response(200, summary_json(s->step(EdgeId(req_string(body, "edge")))));
    if (action == "branch") return json_response(200, summary_json(s->branch(EdgeId(req_string(body, "edge")))));
    if (action == "detour") return json_response(200, summary_json(s->detour(EntityId(req_string(body, "entity")))));
    if (action == "navigate") {
        const EntityId target(req_string(body, "entity"));
        const MoveClass move = s->classify(target);
        Json out = summary_json(s->navigate(target));
        out["move"] = to_json(move);
        return json_response(200, out);
    }
    if (action == "replay") {
        Json snapshots = Json::array();
        for (const auto& snap : s->replay(req_uint(body, "from"), req_uint(body, "to"))) {
            snapshots.push_back(to_json(snap));
        }
        Json out = summary_json(s->summary());
        out["snapshots"] = std::move(snapshots);
        return json_response(200, out);
    }
    if (action == "edges") {
        RelationMetadata meta;
        if (auto it = body.find("meta"); it != body.end() && !it->is_null()) {
            Json m = *it;
            if (!m.is_object()) body_error("meta", "expected object");
            if (!m.contains("provenance")) m["provenance"] = "user";
            meta = from_json<RelationMetadata>(m, "$body.meta");
        } else {
            meta.provenance = Provenance::user();
        }
        const std::string rel_text = req_string(body, "rel");
        auto shared = graph(s->tour().graph_id);
        const RelationTypeId rel = shared->read([&](const KnowledgeGraph& g) {
            if (g.find_relation_type(RelationTypeId(rel_text))) return RelationTypeId(rel_text);
            if (const RelationType* t = g.relation_type_by_name(rel_text)) return t->id;
            fail(ErrorCode::UnknownRelationType, "unknown relation type " + rel_text, {{"rel", rel_text}});
        });
        const EdgeId edge =
            s->add_tacit_edge(EntityId(req_string(body, "src")), EntityId(req_string(body, "dst")), rel, std::move(meta));
        Json out = summary_json(s->summary());
        out["edge"] = edge.str();
        return json_response(201, out);
    }
    if (action == "entities") {
        const Document doc = document(DocumentId(req_string(body, "document")));
        auto it = body.find("span");
        if (it == body.end()) body_error("span", "missing field");
        const Span span = from_json<Span>(*it, "$body.span");
        const EntityId entity = s->add_entity_from_span(doc, span);
        Json out = summary_json(s->summary());
        out["entity"] = entity.str();
        return json_response(201, out);
    }
    if (action == "tasks") {
        const std::string tag_text = req_string(body, "tag");
        auto tag = enum_from_name<TaskTag>(tag_text);
        if (!tag) body_error("tag", "unknown task tag " + tag_text);
        s->annotate_task(req_uint(body, "event"), *tag);
        return json_response(200, summary_json(s->summary()));
    }
    fail(ErrorCode::RouteNotFound, "no route for POST /sessions/" + session_id + "/" + action,
         {{"method", "POST"}, {"path", "/sessions/" + session_id + "/" + action}});
}

HttpResponse Service::session_get(const std::string& session_id, const std::string& action,
                                  const HttpRequest& request) {
    auto s = session(SessionId(session_id));
    if (action.empty()) {
        return json_response(200, {{"summary", summary_json(s->summary())},
                                   {"tour", s->tour_id().str()},
                                   {"state", to_json(s->state())}});
    }
    if (action == "lens") return json_response(200, to_json(s->lens()));
    if (action == "layout") {
        LayoutOptions options;
        options.aggregation_threshold = query_uint(request, "threshold", options.aggregation_threshold);
        return json_response(200, to_json(s->layout(options)));
    }
    if (action == "classify") {
        const auto entity = query(request, "entity");
        if (!entity || entity->empty()) {
            fail(ErrorCode::InvalidArgument, "query parameter entity is required", {{"parameter", "entity"}});
        }
        return json_response(200, to_json(s->classify(EntityId(*entity))));
    }
    if (action == "log") return {200, "application/x-ndjson", save_session_log(s->log())};
    if (action == "events") {
        std::optional<std::uint64_t> after;
        if (auto it = request.headers.find("Last-Event-ID"); it != request.headers.end() && !it->second.empty()) {
            HttpRequest probe;
            probe.query["Last-Event-ID"] = it->second;
            after = query_uint(probe, "Last-Event-ID", 0);
        }
        if (query(request, "after")) after = query_uint(request, "after", 0);
        std::string body;
        for (const auto& event : s->events_after(after)) body += sse_frame(event);
        return {200, "text/event-stream", std::move(body)};
    }
    fail(ErrorCode::RouteNotFound, "no route for GET /sessions/" + session_id + "/" + action,
         {{"method", "GET"}, {"path", "/sessions/" + session_id + "/" + action}});
}

}  // namespace semtour
