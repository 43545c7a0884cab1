#include "semtour/knowledge_graph.hpp"

#include <algorithm>
#include <cstdio>

#include "semtour/error.hpp"

namespace semtour {

namespace {

const std::vector<EdgeId> kNoEdges;
const std::set<EntityId> kNoMentions;

std::string numbered(std::string_view prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", n);
    return std::string(prefix) + buf;
}

void erase_from(std::map<EntityId, std::vector<EdgeId>>& index, const EntityId& key, const EdgeId& edge) {
    auto it = index.find(key);
    if (it == index.end()) return;
    auto& list = it->second;
    list.erase(std::remove(list.begin(), list.end(), edge), list.end());
    if (list.empty()) index.erase(it);
}

}  // namespace

std::string Provenance::to_string() const {
    switch (kind) {
        case ProvenanceKind::extractor: return "extractor:" + extractor;
        case ProvenanceKind::user: return "user";
        case ProvenanceKind::induced: return "induced";
    }
    return "user";
}

std::optional<Provenance> Provenance::parse(std::string_view text) {
    if (text == "user") return user();
    if (text == "induced") return induced();
    constexpr std::string_view prefix = "extractor:";
    if (text.starts_with(prefix) && text.size() > prefix.size()) {
        return from_extractor(std::string(text.substr(prefix.size())));
    }
    return std::nullopt;
}

std::string RelationMetadata::fingerprint() const {
    std::string key = provenance.to_string();
    key += '|';
    if (interpretation) key += enum_name(*interpretation);
    for (const auto& [k, v] : entries) {
        key += '|';
        key += std::to_string(k.size());
        key += ':';
        key += k;
        key += '=';
        key += std::to_string(v.size());
        key += ':';
        key += v;
    }
    return key;
}

KnowledgeGraph::KnowledgeGraph(std::string id) : id_(std::move(id)) {}

RelationTypeId KnowledgeGraph::add_relation_type(RelationType type) {
    if (type.id.empty()) fail(ErrorCode::InvalidArgument, "relation type id must not be empty");
    if (relation_types_.contains(type.id)) {
        fail(ErrorCode::DuplicateId, "relation type " + type.id.str() + " already exists",
             {{"id", type.id.str()}});
    }
    if (type.induced_parent && !relation_types_.contains(*type.induced_parent)) {
        fail(ErrorCode::UnknownRelationType, "induced parent " + type.induced_parent->str() + " is unknown",
             {{"relation_type", type.induced_parent->str()}});
    }
    auto id = type.id;
    relation_types_.emplace(id, std::move(type));
    return id;
}

EntityId KnowledgeGraph::add_entity(Entity entity) {
    if (entity.id.empty()) entity.id = fresh_entity_id();
    if (entities_.contains(entity.id)) {
        fail(ErrorCode::DuplicateId, "entity " + entity.id.str() + " already exists",
             {{"id", entity.id.str()}});
    }
    if (entity.label.empty()) fail(ErrorCode::InvalidArgument, "entity label must not be empty");
    if (entity.source && !data_.has_point(*entity.source)) {
        fail(ErrorCode::DanglingSource, "source data point " + entity.source->str() + " does not exist",
             {{"source", entity.source->str()}});
    }
    auto id = entity.id;
    entities_.emplace(id, std::move(entity));
    return id;
}

EdgeId KnowledgeGraph::add_edge(const EntityId& src, const EntityId& dst, const RelationTypeId& rel,
                                RelationMetadata meta) {
    return add_edge(Edge{EdgeId{}, src, dst, rel, std::move(meta)});
}

EdgeId KnowledgeGraph::add_edge(Edge edge) {
    if (!entities_.contains(edge.src)) {
        fail(ErrorCode::UnknownEntity, "unknown source entity " + edge.src.str(), {{"entity", edge.src.str()}});
    }
    if (!entities_.contains(edge.dst)) {
        fail(ErrorCode::UnknownEntity, "unknown target entity " + edge.dst.str(), {{"entity", edge.dst.str()}});
    }
    const RelationType* type = find_relation_type(edge.rel);
    if (!type) {
        fail(ErrorCode::UnknownRelationType, "unknown relation type " + edge.rel.str(),
             {{"relation_type", edge.rel.str()}});
    }
    if (edge.src == edge.dst && !type->allows_self_loops) {
        fail(ErrorCode::SelfLoopForbidden, "relation " + type->name + " does not allow self-loops",
             {{"entity", edge.src.str()}});
    }
    if (edge.id.empty()) {
        edge.id = fresh_edge_id();
    } else if (edges_.contains(edge.id)) {
        fail(ErrorCode::DuplicateId, "edge " + edge.id.str() + " already exists", {{"id", edge.id.str()}});
    }
    auto id = edge.id;
    out_index_[edge.src].push_back(id);
    in_index_[edge.dst].push_back(id);
    edges_.emplace(id, std::move(edge));
    return id;
}

void KnowledgeGraph::remove_edge(const EdgeId& id) {
    auto it = edges_.find(id);
    if (it == edges_.end()) fail(ErrorCode::UnknownEdge, "unknown edge " + id.str(), {{"edge", id.str()}});
    erase_from(out_index_, it->second.src, id);
    erase_from(in_index_, it->second.dst, id);
    edges_.erase(it);
}

void KnowledgeGraph::remove_entity(const EntityId& id) {
    if (!entities_.contains(id)) {
        fail(ErrorCode::UnknownEntity, "unknown entity " + id.str(), {{"entity", id.str()}});
    }
    std::vector<EdgeId> incident = out_edges(id);
    const auto& incoming = in_edges(id);
    incident.insert(incident.end(), incoming.begin(), incoming.end());
    std::sort(incident.begin(), incident.end());
    incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
    for (const auto& edge : incident) remove_edge(edge);
    for (auto& [doc, set] : mentions_) set.erase(id);
    entities_.erase(id);
}

void KnowledgeGraph::replace_metadata(const EdgeId& id, RelationMetadata meta) {
    auto it = edges_.find(id);
    if (it == edges_.end()) fail(ErrorCode::UnknownEdge, "unknown edge " + id.str(), {{"edge", id.str()}});
    it->second.meta = std::move(meta);
}

void KnowledgeGraph::record_mention(const DatasetId& document, const EntityId& entity) {
    if (!entities_.contains(entity)) {
        fail(ErrorCode::UnknownEntity, "unknown entity " + entity.str(), {{"entity", entity.str()}});
    }
    mentions_[document].insert(entity);
}

const std::set<EntityId>& KnowledgeGraph::mentions(const DatasetId& document) const {
    auto it = mentions_.find(document);
    return it == mentions_.end() ? kNoMentions : it->second;
}

const Entity* KnowledgeGraph::find_entity(const EntityId& id) const {
    auto it = entities_.find(id);
    return it == entities_.end() ? nullptr : &it->second;
}

const Entity& KnowledgeGraph::entity(const EntityId& id) const {
    const Entity* e = find_entity(id);
    if (!e) fail(ErrorCode::UnknownEntity, "unknown entity " + id.str(), {{"entity", id.str()}});
    return *e;
}

const Edge* KnowledgeGraph::find_edge(const EdgeId& id) const {
    auto it = edges_.find(id);
    return it == edges_.end() ? nullptr : &it->second;
}

const Edge& KnowledgeGraph::edge(const EdgeId& id) const {
    const Edge* e = find_edge(id);
    if (!e) fail(ErrorCode::UnknownEdge, "unknown edge " + id.str(), {{"edge", id.str()}});
    return *e;
}

const RelationType* KnowledgeGraph::find_relation_type(const RelationTypeId& id) const {
    auto it = relation_types_.find(id);
    return it == relation_types_.end() ? nullptr : &it->second;
}

const RelationType& KnowledgeGraph::relation_type(const RelationTypeId& id) const {
    const RelationType* t = find_relation_type(id);
    if (!t) {
        fail(ErrorCode::UnknownRelationType, "unknown relation type " + id.str(), {{"relation_type", id.str()}});
    }
    return *t;
}

const RelationType* KnowledgeGraph::relation_type_by_name(std::string_view name) const {
    for (const auto& [id, type] : relation_types_) {
        if (type.name == name) return &type;
    }
    return nullptr;
}

const std::vector<EdgeId>& KnowledgeGraph::out_edges(const EntityId& id) const {
    auto it = out_index_.find(id);
    return it == out_index_.end() ? kNoEdges : it->second;
}

const std::vector<EdgeId>& KnowledgeGraph::in_edges(const EntityId& id) const {
    auto it = in_index_.find(id);
    return it == in_index_.end() ? kNoEdges : it->second;
}

bool KnowledgeGraph::check_integrity() const {
    std::size_t indexed_out = 0;
    std::size_t indexed_in = 0;
    for (const auto& [entity, list] : out_index_) {
        for (const auto& id : list) {
            const Edge* e = find_edge(id);
            if (!e || e->src != entity) return false;
        }
        indexed_out += list.size();
    }
    for (const auto& [entity, list] : in_index_) {
        for (const auto& id : list) {
            const Edge* e = find_edge(id);
            if (!e || e->dst != entity) return false;
        }
        indexed_in += list.size();
    }
    if (indexed_out != edges_.size() || indexed_in != edges_.size()) return false;
    for (const auto& [id, e] : edges_) {
        if (!entities_.contains(e.src) || !entities_.contains(e.dst)) return false;
        if (!relation_types_.contains(e.rel)) return false;
        const auto& out = out_edges(e.src);
        if (std::find(out.begin(), out.end(), id) == out.end()) return false;
    }
    for (const auto& [id, entity] : entities_) {
        if (entity.source && !data_.has_point(*entity.source)) return false;
    }
    return true;
}

EntityId KnowledgeGraph::fresh_entity_id() {
    EntityId id;
    do {
        id = EntityId(numbered("n", next_entity_++));
    } while (entities_.contains(id));
    return id;
}

DataPointId KnowledgeGraph::fresh_data_point_id() {
    DataPointId id;
    do {
        id = DataPointId(numbered("p", next_point_++));
    } while (data_.has_point(id));
    return id;
}

EdgeId KnowledgeGraph::fresh_edge_id() {
    EdgeId id;
    do {
        id = EdgeId(numbered("e", next_edge_++));
    } while (edges_.contains(id));
    return id;
}

const RelationMetadata& get_metadata(const KnowledgeGraph& graph, const EdgeId& edge) {
    return graph.edge(edge).meta;
}

}  // namespace semtour
