#include "semtour/store.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "semtour/error.hpp"
#include "semtour/json.hpp"

namespace semtour {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& problem) {
    fail(ErrorCode::SchemaError, problem + " at " + path, {{"field", path}});
}

std::size_t count_units(const std::vector<Unit>& units) {
    std::size_t n = units.size();
    for (const auto& u : units) n += count_units(u.children);
    return n;
}

const Json& require_field(const Json& json, const char* key, const std::string& path) {
    if (!json.is_object()) schema_error(path, "expected object");
    auto it = json.find(key);
    if (it == json.end()) schema_error(path + "." + key, "missing field");
    return *it;
}

std::string require_string(const Json& json, const char* key, const std::string& path) {
    const Json& value = require_field(json, key, path);
    if (!value.is_string()) schema_error(path + "." + key, "expected string");
    return value.get<std::string>();
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string(), {{"path", path.string()}});
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) fail(ErrorCode::IoError, "cannot read " + path.string(), {{"path", path.string()}});
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing", {{"path", path.string()}});
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string(), {{"path", path.string()}});
}

CorpusManifest parse_manifest(std::string_view text, std::filesystem::path base_dir) {
    const Json json = parse_json(text);
    if (!json.is_object()) schema_error("$", "expected object");
    if (json.contains("schema_version")) require_schema_version(json);

    CorpusManifest manifest;
    manifest.base_dir = std::move(base_dir);
    const Json& documents = require_field(json, "documents", "$");
    if (!documents.is_array()) schema_error("$.documents", "expected array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        const std::string p = "$.documents[" + std::to_string(i) + "]";
        const Json& entry = documents[i];
        ManifestDocument doc;
        doc.path = require_string(entry, "path", p);
        const std::string kind = require_string(entry, "kind", p);
        auto parsed = enum_from_name<DocumentKind>(kind);
        if (!parsed) schema_error(p + ".kind", "unknown value \"" + kind + "\"");
        doc.kind = *parsed;
        doc.title = require_string(entry, "title", p);
        if (auto it = entry.find("units"); it != entry.end()) {
            if (!it->is_number_unsigned()) schema_error(p + ".units", "expected non-negative integer");
            doc.unit_count = it->get<std::size_t>();
        }
        if (!seen.insert(doc.path).second) schema_error(p + ".path", "duplicate path " + doc.path);
        manifest.documents.push_back(std::move(doc));
    }
    if (auto it = json.find("gold_edges"); it != json.end()) {
        if (!it->is_array()) schema_error("$.gold_edges", "expected array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string p = "$.gold_edges[" + std::to_string(i) + "]";
            const Json& g = (*it)[i];
            manifest.gold_edges.push_back(
                {require_string(g, "src", p), require_string(g, "dst", p), require_string(g, "relation", p)});
        }
    }
    if (auto it = json.find("extractor"); it != json.end() && !it->is_null()) {
        manifest.extractor = from_json<ExtractorConfig>(*it, "$.extractor");
    }
    return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_file(path), path.parent_path());
}

Document parse_document(std::string_view text, std::string_view origin) {
    return from_json<Document>(parse_json(text, origin), origin);
}

std::vector<Document> load_corpus(const CorpusManifest& manifest) {
    std::vector<Document> documents;
    documents.reserve(manifest.documents.size());
    for (const auto& entry : manifest.documents) {
        const auto path = manifest.base_dir / entry.path;
        Document doc = parse_document(read_file(path), entry.path);
        if (doc.kind != entry.kind) {
            schema_error(entry.path + ".kind", "document kind " + std::string(enum_name(doc.kind)) +
                                                   " disagrees with manifest " + std::string(enum_name(entry.kind)));
        }
        if (entry.unit_count && count_units(doc.units) != *entry.unit_count) {
            schema_error(entry.path + ".units", "document has " + std::to_string(count_units(doc.units)) +
                                                    " units, manifest lists " + std::to_string(*entry.unit_count));
        }
        documents.push_back(std::move(doc));
    }
    return documents;
}

ExtractorConfig extractor_config(const CorpusManifest& manifest) {
    return manifest.extractor.value_or(ExtractorConfig::with_default_codes());
}

std::string save_graph(const KnowledgeGraph& graph) { return to_json(graph).dump(); }

KnowledgeGraph load_graph(std::string_view bytes) { return from_json<KnowledgeGraph>(parse_json(bytes)); }

std::string graph_hash(const KnowledgeGraph& graph) { return content_hash(save_graph(graph)); }

std::string save_tour(const SemanticTour& tour) {
    Json json = to_json(tour);
    json["schema_version"] = kSchemaVersion;
    return json.dump();
}

SemanticTour load_tour(std::string_view bytes) {
    const Json json = parse_json(bytes);
    require_schema_version(json);
    return from_json<SemanticTour>(json);
}

std::string save_session_log(std::span<const ProvenanceEvent> events) {
    std::string out;
    for (const auto& event : events) {
        out += to_json(event).dump();
        out += '\n';
    }
    return out;
}

std::vector<ProvenanceEvent> load_session_log(std::string_view bytes) {
    std::vector<ProvenanceEvent> events;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string_view::npos) end = bytes.size();
        std::string_view line = bytes.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::string where = "line " + std::to_string(line_no);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) schema_error(where, "empty line");
        ProvenanceEvent event = from_json<ProvenanceEvent>(parse_json(line, where), where);
        if (event.seq != events.size()) {
            schema_error(where + ".seq", "expected seq " + std::to_string(events.size()) + ", got " +
                                             std::to_string(event.seq));
        }
        events.push_back(std::move(event));
    }
    return events;
}

std::string save_session(const NavigationSession& session) {
    Json log = Json::array();
    for (const auto& event : session.log()) log.push_back(to_json(event));
    Json json{{"schema_version", kSchemaVersion},
              {"id", session.id().str()},
              {"tour", to_json(session.tour())},
              {"log", std::move(log)}};
    return json.dump();
}

std::unique_ptr<NavigationSession> load_session(std::string_view bytes, std::shared_ptr<SharedGraph> graph,
                                                Clock clock) {
    const Json json = parse_json(bytes);
    require_schema_version(json);
    const std::string id = require_string(json, "id", "$");
    SemanticTour tour = from_json<SemanticTour>(require_field(json, "tour", "$"), "$.tour");
    const Json& log_json = require_field(json, "log", "$");
    if (!log_json.is_array()) schema_error("$.log", "expected array");
    std::vector<ProvenanceEvent> log;
    for (std::size_t i = 0; i < log_json.size(); ++i) {
        log.push_back(from_json<ProvenanceEvent>(log_json[i], "$.log[" + std::to_string(i) + "]"));
    }
    return NavigationSession::restore(SessionId(id), std::move(graph), std::move(tour), std::move(log),
                                      std::move(clock));
}

}  // namespace semtour
