#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semtour/dataspace.hpp"
#include "semtour/enum_names.hpp"
#include "semtour/ids.hpp"

namespace semtour {

enum class EntityKind { norm, law, concept_, ruling, commentary, fact, user_defined };

template <>
struct EnumNames<EntityKind> {
    static constexpr std::array<std::string_view, 7> names = {
        "norm", "law", "concept", "ruling", "commentary", "fact", "user_defined"};
};

enum class Interpretation { grammatical, teleological, systematic, historical };

template <>
struct EnumNames<Interpretation> {
    static constexpr std::array<std::string_view, 4> names = {"grammatical", "teleological",
                                                              "systematic", "historical"};
};

enum class ProvenanceKind { extractor, user, induced };

// Who asserted a relation. Wire form: "extractor:<name>", "user" or "induced".
struct Provenance {
    ProvenanceKind kind = ProvenanceKind::user;
    std::string extractor;

    static Provenance from_extractor(std::string name) {
        return {ProvenanceKind::extractor, std::move(name)};
    }
    static Provenance user() { return {ProvenanceKind::user, {}}; }
    static Provenance induced() { return {ProvenanceKind::induced, {}}; }

    std::string to_string() const;
    static std::optional<Provenance> parse(std::string_view text);

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct RelationMetadata {
    std::map<std::string, std::string> entries;
    Provenance provenance;
    std::optional<Interpretation> interpretation;

    // Stable textual key over all fields; used for edge deduplication.
    std::string fingerprint() const;

    friend bool operator==(const RelationMetadata&, const RelationMetadata&) = default;
};

struct Entity {
    EntityId id;
    std::string label;
    EntityKind kind = EntityKind::concept_;
    std::optional<DataPointId> source;  // nullopt: created by a user without a backing span
    std::map<std::string, std::string> attributes;

    bool user_created() const noexcept { return !source.has_value(); }
    friend bool operator==(const Entity&, const Entity&) = default;
};

struct RelationType {
    RelationTypeId id;
    std::string name;
    std::optional<RelationTypeId> induced_parent;
    bool allows_self_loops = false;

    friend bool operator==(const RelationType&, const RelationType&) = default;
};

struct Edge {
    EdgeId id;
    EntityId src;
    EntityId dst;
    RelationTypeId rel;
    RelationMetadata meta;

    friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Direction { out, in, both };

template <>
struct EnumNames<Direction> {
    static constexpr std::array<std::string_view, 3> names = {"out", "in", "both"};
};

struct Subgraph {
    std::set<EntityId> entities;
    std::set<EdgeId> edges;

    friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

// Directed multigraph of entities. Parallel edges between the same pair are
// allowed and distinguished by id. The graph also owns the data space whose
// points back its entities, and remembers which entities each document
// mentions.
class KnowledgeGraph {
public:
    explicit KnowledgeGraph(std::string id = "default");

    const std::string& id() const noexcept { return id_; }

    DataStore& data() noexcept { return data_; }
    const DataStore& data() const noexcept { return data_; }

    // Parent types must already exist, so induced chains cannot form cycles.
    RelationTypeId add_relation_type(RelationType type);

    // An empty id is replaced by a fresh one. Throws DuplicateId,
    // DanglingSource (source point missing) or InvalidArgument (empty label).
    EntityId add_entity(Entity entity);

    // Throws UnknownEntity, UnknownRelationType or SelfLoopForbidden.
    EdgeId add_edge(const EntityId& src, const EntityId& dst, const RelationTypeId& rel,
                    RelationMetadata meta);
    // Same, keeping the caller's id when non-empty (used by loaders).
    EdgeId add_edge(Edge edge);

    void remove_edge(const EdgeId& id);
    // Removes the entity together with every incident edge.
    void remove_entity(const EntityId& id);
    // Only used to refresh derived metadata (induced edge counts).
    void replace_metadata(const EdgeId& id, RelationMetadata meta);

    void record_mention(const DatasetId& document, const EntityId& entity);
    const std::set<EntityId>& mentions(const DatasetId& document) const;
    const std::map<DatasetId, std::set<EntityId>>& all_mentions() const noexcept { return mentions_; }

    const Entity* find_entity(const EntityId& id) const;
    const Entity& entity(const EntityId& id) const;
    bool has_entity(const EntityId& id) const { return entities_.contains(id); }

    const Edge* find_edge(const EdgeId& id) const;
    const Edge& edge(const EdgeId& id) const;

    const RelationType* find_relation_type(const RelationTypeId& id) const;
    const RelationType& relation_type(const RelationTypeId& id) const;
    const RelationType* relation_type_by_name(std::string_view name) const;

    const std::map<EntityId, Entity>& entities() const noexcept { return entities_; }
    const std::map<EdgeId, Edge>& edges() const noexcept { return edges_; }
    const std::map<RelationTypeId, RelationType>& relation_types() const noexcept { return relation_types_; }

    const std::vector<EdgeId>& out_edges(const EntityId& id) const;
    const std::vector<EdgeId>& in_edges(const EntityId& id) const;

    std::size_t entity_count() const noexcept { return entities_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    // Full scan: every indexed edge exists and matches its index key, every
    // edge is indexed under both endpoints, no endpoint dangles.
    bool check_integrity() const;

    EntityId fresh_entity_id();
    DataPointId fresh_data_point_id();

private:
    EdgeId fresh_edge_id();

    std::string id_;
    DataStore data_;
    std::map<EntityId, Entity> entities_;
    std::map<EdgeId, Edge> edges_;
    std::map<RelationTypeId, RelationType> relation_types_;
    std::map<EntityId, std::vector<EdgeId>> out_index_;
    std::map<EntityId, std::vector<EdgeId>> in_index_;
    std::map<DatasetId, std::set<EntityId>> mentions_;
    std::size_t next_entity_ = 1;
    std::size_t next_edge_ = 1;
    std::size_t next_point_ = 1;
};

// Information function: the metadata stored on an edge. Throws UnknownEdge.
const RelationMetadata& get_metadata(const KnowledgeGraph& graph, const EdgeId& edge);

struct MappedRelation {
    RelationTypeId rel;
    RelationMetadata meta;
};

// One side of a pair handed to a mapping function: the entity and, when it
// has one, its backing data point.
struct MappingEndpoint {
    const Entity& entity;
    const DataPoint* point;
};

// Partial mapping function from ordered entity pairs to zero or more typed,
// annotated relations.
using MappingFunction =
    std::function<std::vector<MappedRelation>(const MappingEndpoint& from, const MappingEndpoint& to)>;

// Inserts every relation the mapper returns, in pair order then result order.
// A relation whose (src, dst, rel, metadata) already exists in the graph is
// skipped. Returns the ids of inserted edges.
std::vector<EdgeId> apply_mapping(KnowledgeGraph& graph, const MappingFunction& mapper,
                                  std::span<const std::pair<EntityId, EntityId>> pairs);

// Induced subgraph over all entities within `depth` hops. Throws
// UnknownEntity, InvalidArgument for depth < 1.
Subgraph neighborhood(const KnowledgeGraph& graph, const EntityId& entity, int depth,
                      Direction direction = Direction::both);

// Lifts base relations between members to their containers. Membership edges
// point member -> container. For each container pair (U, V), U != V, a single
// edge of the induced type carries entries {count, support}; the induced type
// is registered on first use with induced_parent = base_rel. Existing induced
// edges are reused (metadata refreshed when the support changed). Returns the
// induced edge ids in container-pair order.
std::vector<EdgeId> induce_relations(KnowledgeGraph& graph, const RelationTypeId& membership_rel,
                                     const RelationTypeId& base_rel);

// The single container of `member` under `membership_rel`, if any. Throws
// AmbiguousContainer when there are several.
std::optional<EntityId> container_of(const KnowledgeGraph& graph, const EntityId& member,
                                     const RelationTypeId& membership_rel);

struct SearchHit {
    EntityId entity;
    double score = 0.0;  // 1.0 for substring hits, trigram similarity otherwise
};

// Case-insensitive substring match on labels; if nothing matches, falls back
// to trigram similarity (Jaccard >= 0.3). Ordered by score, then id.
std::vector<SearchHit> search_entities(const KnowledgeGraph& graph, std::string_view query,
                                       std::size_t limit = 50);

// Lower-cases ASCII and the Latin-1 supplement letters (umlauts) of UTF-8 text.
std::string fold_case(std::string_view text);

// Reader/writer wrapper used once a graph is shared between sessions: reads
// take a shared lock, edits an exclusive one. Readers pass a turnstile that a
// waiting writer holds, so a steady stream of readers cannot starve edits.
class SharedGraph {
public:
    explicit SharedGraph(KnowledgeGraph graph) : graph_(std::move(graph)) {}

    template <typename F>
    decltype(auto) read(F&& f) const {
        std::shared_lock lock = [this] {
            std::lock_guard gate(turnstile_);
            return std::shared_lock(mutex_);
        }();
        return std::forward<F>(f)(static_cast<const KnowledgeGraph&>(graph_));
    }

    template <typename F>
    decltype(auto) write(F&& f) {
        std::unique_lock lock = [this] {
            std::lock_guard gate(turnstile_);
            return std::unique_lock(mutex_);
        }();
        return std::forward<F>(f)(graph_);
    }

private:
    mutable std::mutex turnstile_;
    mutable std::shared_mutex mutex_;
    KnowledgeGraph graph_;
};

}  // namespace semtour
