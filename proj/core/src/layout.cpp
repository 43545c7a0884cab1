#include <deque>
#include <tuple>

#include "semtour/error.hpp"
#include "semtour/session.hpp"

namespace semtour {

LensState compute_lens(const SemanticTour& tour, const SessionState& state) {
    std::map<EntityId, std::vector<EntityId>> adjacency;
    for (const auto& e : tour.edges) {
        adjacency[e.src].push_back(e.dst);
        adjacency[e.dst].push_back(e.src);
    }

    std::map<EntityId, int> distance;
    if (tour.contains(state.current)) {
        distance[state.current] = 0;
        std::deque<EntityId> queue{state.current};
        while (!queue.empty()) {
            EntityId node = queue.front();
            queue.pop_front();
            const int d = distance[node];
            if (d >= 2) continue;  // levels beyond Context are all Blurred
            for (const auto& next : adjacency[node]) {
                if (distance.try_emplace(next, d + 1).second) queue.push_back(next);
            }
        }
    }

    LensState lens;
    lens.current_outlined = state.current;
    for (const auto& member : tour.members) {
        auto it = distance.find(member);
        FocusLevel level = it == distance.end() ? FocusLevel::Blurred : static_cast<FocusLevel>(it->second);
        if (state.visited_entities.contains(member) && level == FocusLevel::Blurred) level = FocusLevel::Context;
        lens.focus[member] = level;
    }
    return lens;
}

LayoutModel compute_layout(const SemanticTour& tour, const KnowledgeGraph& graph, const SessionState& state,
                           const LayoutOptions& options) {
    if (options.aggregation_threshold < 2) fail(ErrorCode::InvalidArgument, "aggregation threshold must be >= 2");

    LayoutModel layout;
    for (const auto& [entity, visit] : state.first_visits) {
        if (visit.path >= state.paths.size()) continue;
        layout.placements[entity] = {state.paths[visit.path].id, visit.column};
    }

    // Frontier: unvisited members one tour edge away from a visited entity.
    struct Anchor {
        EntityId entity;
        std::size_t column = 0;
        EdgeId edge;
    };
    std::map<EntityId, Anchor> anchors;
    auto consider = [&](const EntityId& candidate, const EntityId& visited, const EdgeId& edge) {
        if (state.visited_entities.contains(candidate) || !tour.contains(candidate)) return;
        auto fv = state.first_visits.find(visited);
        if (fv == state.first_visits.end()) return;
        Anchor next{visited, fv->second.column, edge};
        auto [it, inserted] = anchors.try_emplace(candidate, next);
        if (inserted) return;
        Anchor& cur = it->second;
        if (std::tie(next.column, next.entity, next.edge) < std::tie(cur.column, cur.entity, cur.edge)) cur = next;
    };
    for (const auto& e : tour.edges) {
        if (state.visited_entities.contains(e.src)) consider(e.dst, e.src, e.edge);
        if (state.visited_entities.contains(e.dst)) consider(e.src, e.dst, e.edge);
    }

    const RelationType* membership = graph.relation_type_by_name(options.membership_relation);
    struct GroupKey {
        std::size_t column;
        EntityId container;
        RelationTypeId relation;
        auto operator<=>(const GroupKey&) const = default;
    };
    std::map<GroupKey, std::vector<EntityId>> groups;

    for (const auto& [entity, anchor] : anchors) {
        const Placement& anchor_place = layout.placements.at(anchor.entity);
        layout.placements[entity] = {anchor_place.row, anchor_place.column + 1};

        if (!membership) continue;
        std::optional<EntityId> container;
        try {
            container = container_of(graph, entity, membership->id);
        } catch (const Error&) {
            container.reset();
        }
        const Edge* edge = graph.find_edge(anchor.edge);
        if (!container || !edge) continue;
        groups[{anchor_place.column + 1, *container, edge->rel}].push_back(entity);
    }

    for (auto& [key, members] : groups) {
        if (members.size() < options.aggregation_threshold) continue;
        Aggregate aggregate;
        aggregate.id = "agg-" + std::to_string(layout.aggregates.size());
        aggregate.container = key.container;
        aggregate.relation = key.relation;
        aggregate.column = key.column;
        aggregate.row = layout.placements.at(members.front()).row;
        for (const auto& m : members) layout.placements.erase(m);
        aggregate.members = std::move(members);
        layout.aggregates.push_back(std::move(aggregate));
    }
    return layout;
}

}  // namespace semtour
