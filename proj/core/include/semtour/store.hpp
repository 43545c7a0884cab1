#pragma once

// Corpus ingestion, canonical persistence of graphs, tours and sessions, and
// DOT export.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semtour/extraction.hpp"
#include "semtour/knowledge_graph.hpp"
#include "semtour/session.hpp"
#include "semtour/tour.hpp"

namespace semtour {

struct ManifestDocument {
    std::string path;  // relative to the manifest's directory
    DocumentKind kind = DocumentKind::statute;
    std::string title;
    std::optional<std::size_t> unit_count;  // cross-checked by load_corpus when present
};

// Expected edge between two unit keys ("<document>/<unit>").
struct GoldEdge {
    std::string src;
    std::string dst;
    std::string relation;
    friend bool operator==(const GoldEdge&, const GoldEdge&) = default;
};

struct CorpusManifest {
    std::filesystem::path base_dir;
    std::vector<ManifestDocument> documents;
    std::vector<GoldEdge> gold_edges;
    std::optional<ExtractorConfig> extractor;
};

// Throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Throws SchemaError (duplicate paths, bad fields).
CorpusManifest parse_manifest(std::string_view text, std::filesystem::path base_dir);
CorpusManifest load_manifest(const std::filesystem::path& path);

Document parse_document(std::string_view text, std::string_view origin = "$");

// Reads every listed document; kind and unit count must agree with the
// manifest. Throws IoError or SchemaError.
std::vector<Document> load_corpus(const CorpusManifest& manifest);

// The manifest's extractor settings, or the default code whitelist.
ExtractorConfig extractor_config(const CorpusManifest& manifest);

std::string save_graph(const KnowledgeGraph& graph);
KnowledgeGraph load_graph(std::string_view bytes);
std::string graph_hash(const KnowledgeGraph& graph);

std::string save_tour(const SemanticTour& tour);
SemanticTour load_tour(std::string_view bytes);

// JSON-lines, one event per line: {"kind","payload","seq","ts"}.
std::string save_session_log(std::span<const ProvenanceEvent> events);
// Throws SchemaError naming the line; seq values must run 0, 1, 2, ...
std::vector<ProvenanceEvent> load_session_log(std::string_view bytes);

// Session file: id, tour and log in one canonical JSON document.
std::string save_session(const NavigationSession& session);
std::unique_ptr<NavigationSession> load_session(std::string_view bytes, std::shared_ptr<SharedGraph> graph,
                                                Clock clock = system_clock_ms());

// Nodes carry kind (and focus when a lens is given), edges carry id and
// relation. Nodes and edges are emitted in id order.
std::string export_dot(const KnowledgeGraph& graph, const LensState* lens = nullptr);
std::string export_dot(const SemanticTour& tour, const KnowledgeGraph& graph, const LensState* lens = nullptr);

}  // namespace semtour
