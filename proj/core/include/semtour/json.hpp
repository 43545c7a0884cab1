#pragma once

// Canonical JSON forms of the engine's values. Objects are emitted with keys
// in sorted order (nlohmann::json's default std::map storage) and arrays in
// id order, so `to_json(x).dump()` is a canonical serialization.
//
// Decoders throw Error{SchemaError} naming the offending field as a path
// such as "$.documents[2].kind".

#include <string_view>

#include <nlohmann/json.hpp>

#include "semtour/dataspace.hpp"
#include "semtour/extraction.hpp"
#include "semtour/knowledge_graph.hpp"
#include "semtour/session.hpp"
#include "semtour/tour.hpp"

namespace semtour {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const Span& span);
Json to_json(const DataPoint& point);
Json to_json(const Dataset& dataset);
Json to_json(const Selection& selection);
Json to_json(const StagingConfig& config);
Json to_json(const Scene& scene);
Json to_json(const LinearTour& tour);

Json to_json(const Entity& entity);
Json to_json(const RelationType& type);
Json to_json(const RelationMetadata& meta);
Json to_json(const Edge& edge);
Json to_json(const Subgraph& subgraph);
Json to_json(const KnowledgeGraph& graph);

Json to_json(const Unit& unit);
Json to_json(const Document& document);
Json to_json(const Reference& reference);
Json to_json(const ExtractorConfig& config);

Json to_json(const TourEdge& edge);
Json to_json(const SemanticTour& tour);
Json to_json(const ValidationReport& report);

Json to_json(const ProvenanceEvent& event);
Json to_json(const SemanticPath& path);
Json to_json(const SessionState& state);
Json to_json(const Snapshot& snapshot);
Json to_json(const LensState& lens);
Json to_json(const LayoutModel& layout);
Json to_json(const StateSummary& summary);
Json to_json(const MoveClass& move);

template <typename T>
T from_json(const Json& json, std::string_view path = "$");

template <> Span from_json<Span>(const Json&, std::string_view);
template <> DataPoint from_json<DataPoint>(const Json&, std::string_view);
template <> StagingConfig from_json<StagingConfig>(const Json&, std::string_view);
template <> Scene from_json<Scene>(const Json&, std::string_view);
template <> Entity from_json<Entity>(const Json&, std::string_view);
template <> RelationType from_json<RelationType>(const Json&, std::string_view);
template <> RelationMetadata from_json<RelationMetadata>(const Json&, std::string_view);
template <> Edge from_json<Edge>(const Json&, std::string_view);
template <> KnowledgeGraph from_json<KnowledgeGraph>(const Json&, std::string_view);
template <> Unit from_json<Unit>(const Json&, std::string_view);
template <> Document from_json<Document>(const Json&, std::string_view);
template <> ExtractorConfig from_json<ExtractorConfig>(const Json&, std::string_view);
template <> TourEdge from_json<TourEdge>(const Json&, std::string_view);
template <> SemanticTour from_json<SemanticTour>(const Json&, std::string_view);
template <> ProvenanceEvent from_json<ProvenanceEvent>(const Json&, std::string_view);

// FNV-1a 64 of the bytes as 16 lower-case hex digits.
std::string content_hash(std::string_view bytes);

// Parses text, mapping syntax errors to SchemaError.
Json parse_json(std::string_view text, std::string_view origin = "$");

// Throws SchemaError unless json["schema_version"] == kSchemaVersion.
void require_schema_version(const Json& json, std::string_view path = "$");

}  // namespace semtour
