#pragma once

// Semantic tours: subgraphs of the knowledge graph with one scene per member
// entity, plus their reduction to linear tours.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "semtour/dataspace.hpp"
#include "semtour/knowledge_graph.hpp"

namespace semtour {

// A potential transition: a KG edge whose endpoints are both tour members.
struct TourEdge {
    EntityId src;
    EntityId dst;
    EdgeId edge;

    friend auto operator<=>(const TourEdge&, const TourEdge&) = default;
};

struct DocumentGroup {
    DocumentId document;
    std::size_t group = 0;

    friend bool operator==(const DocumentGroup&, const DocumentGroup&) = default;
};

using TourSeed = std::variant<EntityId, DocumentGroup>;

struct SemanticTour {
    TourId id;
    std::string graph_id;
    std::set<EntityId> members;
    std::map<EntityId, Scene> scenes;
    std::vector<TourEdge> edges;  // sorted by edge id
    TourSeed seed;
    EntityId start;  // seed entity, or the smallest member of a document group

    bool contains(const EntityId& entity) const { return members.contains(entity); }
    friend bool operator==(const SemanticTour&, const SemanticTour&) = default;
};

// Staging defaults per entity kind: norms and laws as icicle plots, concepts
// and user entities as entity cards, everything else as text.
StagingConfig default_staging(EntityKind kind);

// The singleton selection of the entity's backing point (empty when the
// entity has none) staged with default_staging. Scene id: "scene:<entity>".
Scene entity_scene(const Entity& entity);

// Every KG edge with both endpoints in `members`, sorted by edge id.
std::vector<TourEdge> edges_among(const KnowledgeGraph& graph, const std::set<EntityId>& members);

// Members: the undirected neighborhood of `entity` within `radius`.
SemanticTour seed_from_entity(const KnowledgeGraph& graph, const EntityId& entity, int radius);

// Entities the document mentions, split into connected components of the
// subgraph they induce; one tour per component, largest first (ties broken
// by smallest member id). Throws UnknownDocument or NoMatches.
std::vector<SemanticTour> seed_from_document(const KnowledgeGraph& graph, const DocumentId& document);

// Adds the radius-neighborhood of `entity` (radius 0: just the entity) and
// recomputes tour edges. Existing scenes are kept.
SemanticTour expand(const KnowledgeGraph& graph, const SemanticTour& tour, const EntityId& entity, int radius);

struct DepthFirst {};

// First-visit order of a navigation session over the tour.
struct ProvenanceOrder {
    TourId tour;
    std::vector<EntityId> first_visits;
};

using LinearizationStrategy = std::variant<DepthFirst, ProvenanceOrder>;

// Visits every member scene exactly once. Depth-first walks tour edges as
// undirected links from the start entity, neighbors in ascending id order,
// restarting at the smallest unvisited member if the tour is disconnected.
// The provenance order lists visited members first, then the rest in
// depth-first order. Throws EmptyTour or SessionMismatch.
LinearTour linearize(const SemanticTour& tour, const LinearizationStrategy& strategy);

TourId linear_tour_id(const SemanticTour& tour);

struct ValidationReport {
    std::vector<TourEdge> bad_edges;          // KG edge missing, endpoints differ or leave the tour
    std::vector<EntityId> foreign_members;     // member not in the graph
    std::vector<EntityId> members_without_scene;

    bool valid() const { return bad_edges.empty() && foreign_members.empty() && members_without_scene.empty(); }
};

ValidationReport validate(const SemanticTour& tour, const KnowledgeGraph& graph);

}  // namespace semtour
