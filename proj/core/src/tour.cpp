#include "semtour/tour.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "semtour/error.hpp"

namespace semtour {

namespace {

std::map<EntityId, std::vector<EntityId>> undirected_adjacency(const SemanticTour& tour) {
    std::map<EntityId, std::set<EntityId>> sets;
    for (const auto& e : tour.edges) {
        if (e.src == e.dst) continue;
        sets[e.src].insert(e.dst);
        sets[e.dst].insert(e.src);
    }
    std::map<EntityId, std::vector<EntityId>> adjacency;
    for (auto& [id, set] : sets) adjacency.emplace(id, std::vector<EntityId>(set.begin(), set.end()));
    return adjacency;
}

std::vector<EntityId> depth_first_order(const SemanticTour& tour) {
    const auto adjacency = undirected_adjacency(tour);
    std::set<EntityId> seen;
    std::vector<EntityId> order;
    order.reserve(tour.members.size());

    auto walk = [&](const EntityId& root) {
        // Explicit stack of (entity, next neighbor index) to mirror recursion.
        std::vector<std::pair<EntityId, std::size_t>> stack;
        seen.insert(root);
        order.push_back(root);
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            auto it = adjacency.find(node);
            if (it == adjacency.end() || next >= it->second.size()) {
                stack.pop_back();
                continue;
            }
            const EntityId& candidate = it->second[next++];
            if (!tour.members.contains(candidate) || !seen.insert(candidate).second) continue;
            order.push_back(candidate);
            stack.emplace_back(candidate, 0);
        }
    };

    if (tour.members.contains(tour.start)) walk(tour.start);
    for (const auto& member : tour.members) {
        if (!seen.contains(member)) walk(member);
    }
    return order;
}

SemanticTour make_tour(const KnowledgeGraph& graph, TourId id, std::set<EntityId> members, TourSeed seed,
                       EntityId start) {
    SemanticTour tour;
    tour.id = std::move(id);
    tour.graph_id = graph.id();
    tour.members = std::move(members);
    for (const auto& member : tour.members) tour.scenes.emplace(member, entity_scene(graph.entity(member)));
    tour.edges = edges_among(graph, tour.members);
    tour.seed = std::move(seed);
    tour.start = std::move(start);
    return tour;
}

}  // namespace

StagingConfig default_staging(EntityKind kind) {
    StagingConfig config;
    switch (kind) {
        case EntityKind::norm:
        case EntityKind::law: config.view_kind = ViewKind::icicle; break;
        case EntityKind::concept_:
        case EntityKind::user_defined: config.view_kind = ViewKind::entity_card; break;
        case EntityKind::ruling:
        case EntityKind::commentary:
        case EntityKind::fact: config.view_kind = ViewKind::text; break;
    }
    return config;
}

Scene entity_scene(const Entity& entity) {
    Selection selection;
    if (entity.source) selection.member_ids.insert(*entity.source);
    return stage(std::move(selection), default_staging(entity.kind), SceneId("scene:" + entity.id.str()));
}

std::vector<TourEdge> edges_among(const KnowledgeGraph& graph, const std::set<EntityId>& members) {
    std::vector<TourEdge> edges;
    for (const auto& member : members) {
        for (const auto& id : graph.out_edges(member)) {
            const Edge& e = graph.edge(id);
            if (members.contains(e.dst)) edges.push_back({e.src, e.dst, id});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const TourEdge& a, const TourEdge& b) { return a.edge < b.edge; });
    return edges;
}

SemanticTour seed_from_entity(const KnowledgeGraph& graph, const EntityId& entity, int radius) {
    Subgraph sub = neighborhood(graph, entity, radius, Direction::both);
    return make_tour(graph, TourId("tour:" + entity.str() + ":r" + std::to_string(radius)), std::move(sub.entities),
                     entity, entity);
}

std::vector<SemanticTour> seed_from_document(const KnowledgeGraph& graph, const DocumentId& document) {
    const DatasetId dataset(document.str());
    if (!graph.data().find_dataset(dataset) && !graph.all_mentions().contains(dataset)) {
        fail(ErrorCode::UnknownDocument, "unknown document " + document.str(), {{"document", document.str()}});
    }
    std::set<EntityId> matched;
    for (const auto& id : graph.mentions(dataset)) {
        if (graph.has_entity(id)) matched.insert(id);
    }
    if (matched.empty()) {
        fail(ErrorCode::NoMatches, "document " + document.str() + " matches no entity", {{"document", document.str()}});
    }

    // connected components over the induced subgraph, treating edges as undirected
    std::map<EntityId, std::size_t> component;
    std::vector<std::set<EntityId>> components;
    for (const auto& root : matched) {
        if (component.contains(root)) continue;
        const std::size_t index = components.size();
        components.emplace_back();
        std::vector<EntityId> stack{root};
        component[root] = index;
        while (!stack.empty()) {
            EntityId node = stack.back();
            stack.pop_back();
            components[index].insert(node);
            auto visit = [&](const EntityId& next) {
                if (matched.contains(next) && !component.contains(next)) {
                    component[next] = index;
                    stack.push_back(next);
                }
            };
            for (const auto& id : graph.out_edges(node)) visit(graph.edge(id).dst);
            for (const auto& id : graph.in_edges(node)) visit(graph.edge(id).src);
        }
    }

    std::vector<std::size_t> order(components.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (components[a].size() != components[b].size()) return components[a].size() > components[b].size();
        return *components[a].begin() < *components[b].begin();
    });

    std::vector<SemanticTour> tours;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& members = components[order[i]];
        EntityId start = *members.begin();
        tours.push_back(make_tour(graph, TourId("tour:" + document.str() + ":" + std::to_string(i)),
                                  std::move(members), DocumentGroup{document, i}, std::move(start)));
    }
    return tours;
}

SemanticTour expand(const KnowledgeGraph& graph, const SemanticTour& tour, const EntityId& entity, int radius) {
    if (!graph.has_entity(entity)) {
        fail(ErrorCode::UnknownEntity, "unknown entity " + entity.str(), {{"entity", entity.str()}});
    }
    if (radius < 0) fail(ErrorCode::InvalidArgument, "radius must not be negative");
    SemanticTour next = tour;
    std::set<EntityId> added{entity};
    if (radius > 0) added = neighborhood(graph, entity, radius, Direction::both).entities;
    for (const auto& id : added) {
        if (next.members.insert(id).second) next.scenes.emplace(id, entity_scene(graph.entity(id)));
    }
    next.edges = edges_among(graph, next.members);
    return next;
}

TourId linear_tour_id(const SemanticTour& tour) { return TourId(tour.id.str() + ":linear"); }

LinearTour linearize(const SemanticTour& tour, const LinearizationStrategy& strategy) {
    if (tour.members.empty()) fail(ErrorCode::EmptyTour, "tour " + tour.id.str() + " has no members");

    std::vector<EntityId> order;
    if (const auto* provenance = std::get_if<ProvenanceOrder>(&strategy)) {
        if (provenance->tour != tour.id) {
            fail(ErrorCode::SessionMismatch,
                 "session runs over tour " + provenance->tour.str() + ", not " + tour.id.str());
        }
        std::set<EntityId> placed;
        for (const auto& id : provenance->first_visits) {
            if (tour.members.contains(id) && placed.insert(id).second) order.push_back(id);
        }
        for (const auto& id : depth_first_order(tour)) {
            if (placed.insert(id).second) order.push_back(id);
        }
    } else {
        order = depth_first_order(tour);
    }

    std::vector<Scene> scenes;
    scenes.reserve(order.size());
    for (const auto& id : order) {
        auto it = tour.scenes.find(id);
        if (it == tour.scenes.end()) {
            fail(ErrorCode::InvalidArgument, "member " + id.str() + " has no scene");
        }
        Scene scene = it->second;
        scene.seq_index.reset();
        scenes.push_back(std::move(scene));
    }
    return make_linear_tour(linear_tour_id(tour), std::move(scenes));
}

ValidationReport validate(const SemanticTour& tour, const KnowledgeGraph& graph) {
    ValidationReport report;
    for (const auto& e : tour.edges) {
        const Edge* kg = graph.find_edge(e.edge);
        const bool inside = tour.members.contains(e.src) && tour.members.contains(e.dst);
        if (!kg || kg->src != e.src || kg->dst != e.dst || !inside) report.bad_edges.push_back(e);
    }
    for (const auto& member : tour.members) {
        if (!graph.has_entity(member)) report.foreign_members.push_back(member);
        if (!tour.scenes.contains(member)) report.members_without_scene.push_back(member);
    }
    return report;
}

}  // namespace semtour
