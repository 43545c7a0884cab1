#include <algorithm>
#include <deque>
#include <unordered_set>

#include "semtour/error.hpp"
#include "semtour/knowledge_graph.hpp"

namespace semtour {

std::vector<EdgeId> apply_mapping(KnowledgeGraph& graph, const MappingFunction& mapper,
                                  std::span<const std::pair<EntityId, EntityId>> pairs) {
    // Dedup key: (src, dst, rel, metadata fingerprint).
    auto key_of = [](const EntityId& src, const EntityId& dst, const RelationTypeId& rel,
                     const RelationMetadata& meta) {
        std::string key = src.str();
        key += '\x1f';
        key += dst.str();
        key += '\x1f';
        key += rel.str();
        key += '\x1f';
        key += meta.fingerprint();
        return key;
    };

    std::unordered_set<std::string> seen;
    seen.reserve(graph.edge_count());
    for (const auto& [id, edge] : graph.edges()) seen.insert(key_of(edge.src, edge.dst, edge.rel, edge.meta));

    std::vector<EdgeId> inserted;
    for (const auto& [src_id, dst_id] : pairs) {
        const Entity& src = graph.entity(src_id);
        const Entity& dst = graph.entity(dst_id);
        const MappingEndpoint from{src, src.source ? graph.data().find_point(*src.source) : nullptr};
        const MappingEndpoint to{dst, dst.source ? graph.data().find_point(*dst.source) : nullptr};
        for (auto& relation : mapper(from, to)) {
            auto key = key_of(src_id, dst_id, relation.rel, relation.meta);
            if (!seen.insert(std::move(key)).second) continue;
            inserted.push_back(graph.add_edge(src_id, dst_id, relation.rel, std::move(relation.meta)));
        }
    }
    return inserted;
}

Subgraph neighborhood(const KnowledgeGraph& graph, const EntityId& entity, int depth, Direction direction) {
    if (!graph.has_entity(entity)) {
        fail(ErrorCode::UnknownEntity, "unknown entity " + entity.str(), {{"entity", entity.str()}});
    }
    if (depth < 1) fail(ErrorCode::InvalidArgument, "neighborhood depth must be at least 1");

    Subgraph sub;
    sub.entities.insert(entity);
    std::deque<std::pair<EntityId, int>> queue{{entity, 0}};
    while (!queue.empty()) {
        auto [current, dist] = queue.front();
        queue.pop_front();
        if (dist == depth) continue;
        auto visit = [&](const EntityId& next) {
            if (sub.entities.insert(next).second) queue.emplace_back(next, dist + 1);
        };
        if (direction != Direction::in) {
            for (const auto& id : graph.out_edges(current)) visit(graph.edge(id).dst);
        }
        if (direction != Direction::out) {
            for (const auto& id : graph.in_edges(current)) visit(graph.edge(id).src);
        }
    }
    for (const auto& id : sub.entities) {
        for (const auto& edge_id : graph.out_edges(id)) {
            if (sub.entities.contains(graph.edge(edge_id).dst)) sub.edges.insert(edge_id);
        }
    }
    return sub;
}

std::optional<EntityId> container_of(const KnowledgeGraph& graph, const EntityId& member,
                                     const RelationTypeId& membership_rel) {
    std::optional<EntityId> container;
    for (const auto& id : graph.out_edges(member)) {
        const Edge& e = graph.edge(id);
        if (e.rel != membership_rel) continue;
        if (container && *container != e.dst) {
            fail(ErrorCode::AmbiguousContainer,
                 "entity " + member.str() + " has several containers (" + container->str() + ", " +
                     e.dst.str() + ")",
                 {{"entity", member.str()}});
        }
        container = e.dst;
    }
    return container;
}

std::vector<EdgeId> induce_relations(KnowledgeGraph& graph, const RelationTypeId& membership_rel,
                                     const RelationTypeId& base_rel) {
    graph.relation_type(membership_rel);
    const RelationType& base = graph.relation_type(base_rel);

    std::map<EntityId, EntityId> container;
    for (const auto& [id, entity] : graph.entities()) {
        if (auto c = container_of(graph, id, membership_rel)) container.emplace(id, *c);
    }

    std::map<std::pair<EntityId, EntityId>, std::vector<EdgeId>> support;
    for (const auto& [id, edge] : graph.edges()) {
        if (edge.rel != base_rel) continue;
        auto cu = container.find(edge.src);
        auto cv = container.find(edge.dst);
        if (cu == container.end() || cv == container.end() || cu->second == cv->second) continue;
        support[{cu->second, cv->second}].push_back(id);
    }
    if (support.empty()) return {};

    RelationTypeId induced_rel;
    for (const auto& [id, type] : graph.relation_types()) {
        if (type.induced_parent == base_rel) {
            induced_rel = id;
            break;
        }
    }
    if (induced_rel.empty()) {
        induced_rel = graph.add_relation_type(
            RelationType{RelationTypeId(base_rel.str() + "_induced"), base.name + "_induced", base_rel, false});
    }

    std::map<std::pair<EntityId, EntityId>, EdgeId> existing;
    for (const auto& [id, edge] : graph.edges()) {
        if (edge.rel == induced_rel) existing.emplace(std::pair{edge.src, edge.dst}, id);
    }

    std::vector<EdgeId> result;
    for (auto& [pair, edges] : support) {
        std::sort(edges.begin(), edges.end());
        std::string joined;
        for (const auto& e : edges) {
            if (!joined.empty()) joined += ',';
            joined += e.str();
        }
        RelationMetadata meta;
        meta.provenance = Provenance::induced();
        meta.entries["count"] = std::to_string(edges.size());
        meta.entries["support"] = joined;

        auto found = existing.find(pair);
        if (found == existing.end()) {
            result.push_back(graph.add_edge(pair.first, pair.second, induced_rel, std::move(meta)));
        } else {
            if (graph.edge(found->second).meta != meta) graph.replace_metadata(found->second, std::move(meta));
            result.push_back(found->second);
        }
    }
    return result;
}

std::string fold_case(std::string_view text) {
    std::string out(text);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto c = static_cast<unsigned char>(out[i]);
        if (c >= 'A' && c <= 'Z') {
            out[i] = static_cast<char>(c - 'A' + 'a');
        } else if (c == 0xC3 && i + 1 < out.size()) {
            auto next = static_cast<unsigned char>(out[i + 1]);
            // U+00C0..U+00DE (except U+00D7) lower-case by +0x20.
            if (next >= 0x80 && next <= 0x9E && next != 0x97) out[i + 1] = static_cast<char>(next + 0x20);
            ++i;
        }
    }
    return out;
}

namespace {

std::set<std::string> trigrams(std::string_view folded) {
    std::string padded = "  ";
    padded += folded;
    padded += ' ';
    std::set<std::string> grams;
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) grams.insert(padded.substr(i, 3));
    return grams;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& g : a) common += b.contains(g) ? 1 : 0;
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

}  // namespace

std::vector<SearchHit> search_entities(const KnowledgeGraph& graph, std::string_view query, std::size_t limit) {
    const std::string needle = fold_case(query);
    std::vector<SearchHit> hits;
    if (needle.empty()) return hits;

    for (const auto& [id, entity] : graph.entities()) {
        if (fold_case(entity.label).find(needle) != std::string::npos) hits.push_back({id, 1.0});
    }
    if (hits.empty()) {
        const auto query_grams = trigrams(needle);
        for (const auto& [id, entity] : graph.entities()) {
            double score = jaccard(query_grams, trigrams(fold_case(entity.label)));
            if (score >= 0.3) hits.push_back({id, score});
        }
        std::stable_sort(hits.begin(), hits.end(),
                         [](const SearchHit& a, const SearchHit& b) { return a.score > b.score; });
    }
    if (hits.size() > limit) hits.resize(limit);
    return hits;
}

}  // namespace semtour
