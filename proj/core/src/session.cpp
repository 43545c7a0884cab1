#include "semtour/session.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <tuple>

#include "semtour/error.hpp"
#include "semtour/json.hpp"

namespace semtour {

namespace {

constexpr std::array<TaskInfo, 9> kTasks = {{
    {"Facts", "Facts extraction", "Identify legally relevant facts from narratives and judgments"},
    {"Facts", "Counterfactuals", "Hypothesize about outcomes under excluded and inverted facts"},
    {"Norms", "Doctrinalization", "Categorize a case into one or more legal fields"},
    {"Norms", "Issue identification", "Identify applicable statutes, case law, commentary, etc."},
    {"Norms", "Conflict resolution", "Determine authority, hierarchy, binding force (lex specialis...)"},
    {"Subsumption", "Norm interpretation", "Interpret a legal norm using different methodology"},
    {"Subsumption", "Argument construction", "Draft complete arguments and counterarguments"},
    {"Subsumption", "Rule-conclusion", "Derive the doctrinal outcome under the relevant legislation"},
    {"Meta", "Academic critique", "Evaluate doctrinal coherence, policy effects; propose reforms"},
}};

std::string path_id(std::size_t index) { return "path-" + std::to_string(index); }

}  // namespace

const TaskInfo& task_info(TaskTag tag) { return kTasks.at(static_cast<std::size_t>(tag)); }

std::string state_hash(const SessionState& state) { return content_hash(to_json(state).dump()); }

std::string lens_digest(const LensState& lens) { return content_hash(to_json(lens).dump()); }

Clock system_clock_ms() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
}

// ---------------------------------------------------------------------------
// Log fold. Kept separate from the live operations below so that the two can
// be checked against each other.

namespace {

void fold_event(SessionState& s, const ProvenanceEvent& ev) {
    auto first_visit = [&s](const EntityId& entity) {
        s.first_visits.try_emplace(entity, FirstVisit{s.paths.size() - 1, s.moves});
        s.visited_entities.insert(entity);
    };
    switch (ev.kind) {
        case EventKind::init: {
            const auto& p = std::get<InitPayload>(ev.payload);
            s.current = p.entity;
            s.paths.push_back({path_id(0), {p.entity}, {PathOriginKind::init, std::nullopt}, {ev.seq}});
            first_visit(p.entity);
            ++s.moves;
            break;
        }
        case EventKind::step: {
            const auto& p = std::get<MovePayload>(ev.payload);
            s.current = p.to;
            s.visited_edges.insert(p.edge);
            s.paths.back().steps.push_back(p.to);
            s.paths.back().events.push_back(ev.seq);
            first_visit(p.to);
            ++s.moves;
            break;
        }
        case EventKind::branch: {
            const auto& p = std::get<MovePayload>(ev.payload);
            s.current = p.to;
            s.visited_edges.insert(p.edge);
            s.paths.push_back(
                {path_id(s.paths.size()), {p.from, p.to}, {PathOriginKind::branch_at, p.from}, {ev.seq}});
            first_visit(p.to);
            ++s.moves;
            break;
        }
        case EventKind::detour: {
            const auto& p = std::get<DetourPayload>(ev.payload);
            s.current = p.entity;
            s.paths.push_back(
                {path_id(s.paths.size()), {p.entity}, {PathOriginKind::detour, std::nullopt}, {ev.seq}});
            first_visit(p.entity);
            ++s.moves;
            break;
        }
        case EventKind::annotate_task: {
            const auto& p = std::get<TaskPayload>(ev.payload);
            s.task_tags[p.event] = p.tag;
            break;
        }
        case EventKind::replay_begin:
        case EventKind::replay_end:
        case EventKind::add_edge:
        case EventKind::add_entity: break;
    }
}

}  // namespace

SessionState replay_events(std::span<const ProvenanceEvent> events) {
    SessionState state;
    for (const auto& ev : events) fold_event(state, ev);
    return state;
}

std::vector<Snapshot> replay_range(std::span<const ProvenanceEvent> events, std::uint64_t from, std::uint64_t to) {
    if (from > to || to >= events.size()) {
        fail(ErrorCode::RangeOutOfBounds,
             "replay range [" + std::to_string(from) + ", " + std::to_string(to) + "] outside log of " +
                 std::to_string(events.size()) + " events",
             {{"from", std::to_string(from)}, {"to", std::to_string(to)}});
    }
    std::vector<Snapshot> snapshots;
    snapshots.reserve(to - from + 1);
    SessionState state = replay_events(events.subspan(0, from));
    for (std::uint64_t seq = from; seq <= to; ++seq) {
        fold_event(state, events[seq]);
        snapshots.push_back({seq, state});
    }
    return snapshots;
}

MoveClass classify_move(const SemanticTour& tour, const SessionState& state, const EntityId& target) {
    for (const auto& e : tour.edges) {
        if (e.src == state.current && e.dst == target) return {MoveKind::step, e.edge};
    }
    const TourEdge* best = nullptr;
    for (const auto& e : tour.edges) {
        if (e.dst != target || e.src == state.current || !state.visited_entities.contains(e.src)) continue;
        if (!best || std::tie(e.src, e.edge) < std::tie(best->src, best->edge)) best = &e;
    }
    if (best) return {MoveKind::branch, best->edge};
    return {MoveKind::detour, std::nullopt};
}

// ---------------------------------------------------------------------------
// Live session

NavigationSession::NavigationSession(SessionId id, std::shared_ptr<SharedGraph> graph, SemanticTour tour,
                                     const EntityId& start, Clock clock)
    : id_(std::move(id)), graph_(std::move(graph)), tour_(std::move(tour)), clock_(std::move(clock)) {
    if (!tour_.contains(start)) {
        fail(ErrorCode::NotInTour, "entity " + start.str() + " is not a member of tour " + tour_.id.str(),
             {{"entity", start.str()}});
    }
    const auto& ev = append(EventKind::init, InitPayload{start});
    state_.current = start;
    state_.paths.push_back({path_id(0), {start}, {PathOriginKind::init, std::nullopt}, {ev.seq}});
    record_visit(start, 0);
}

NavigationSession::NavigationSession(RestoreTag, SessionId id, std::shared_ptr<SharedGraph> graph,
                                     SemanticTour tour, std::vector<ProvenanceEvent> log, Clock clock)
    : id_(std::move(id)),
      graph_(std::move(graph)),
      tour_(std::move(tour)),
      state_(replay_events(log)),
      log_(std::move(log)),
      clock_(std::move(clock)) {
    if (!log_.empty()) last_timestamp_ = log_.back().timestamp_ms;
}

std::unique_ptr<NavigationSession> NavigationSession::restore(SessionId id, std::shared_ptr<SharedGraph> graph,
                                                              SemanticTour tour, std::vector<ProvenanceEvent> log,
                                                              Clock clock) {
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].seq != i) fail(ErrorCode::SchemaError, "session log seq is not dense at line " + std::to_string(i));
        if (i > 0 && log[i].timestamp_ms < log[i - 1].timestamp_ms) {
            fail(ErrorCode::SchemaError, "session log timestamps decrease at line " + std::to_string(i));
        }
    }
    if (log.empty() || log.front().kind != EventKind::init) {
        fail(ErrorCode::SchemaError, "session log must begin with an init event");
    }
    return std::unique_ptr<NavigationSession>(new NavigationSession(
        RestoreTag{}, std::move(id), std::move(graph), std::move(tour), std::move(log), std::move(clock)));
}

TourId NavigationSession::tour_id() const {
    std::lock_guard lock(mutex_);
    return tour_.id;
}

const ProvenanceEvent& NavigationSession::append(EventKind kind, EventPayload payload) {
    last_timestamp_ = std::max(last_timestamp_, clock_());
    log_.push_back({log_.size(), last_timestamp_, kind, std::move(payload)});
    appended_.notify_all();
    return log_.back();
}

void NavigationSession::record_visit(const EntityId& entity, std::size_t path) {
    if (state_.visited_entities.insert(entity).second) {
        state_.first_visits.emplace(entity, FirstVisit{path, state_.moves});
    }
    ++state_.moves;
}

const TourEdge* NavigationSession::find_tour_edge(const EdgeId& edge) const {
    auto it = std::lower_bound(tour_.edges.begin(), tour_.edges.end(), edge,
                               [](const TourEdge& e, const EdgeId& id) { return e.edge < id; });
    return it != tour_.edges.end() && it->edge == edge ? &*it : nullptr;
}

StateSummary NavigationSession::summary_locked() const {
    return {id_, state_.current, lens_digest(compute_lens(tour_, state_)), state_.paths.size(),
            log_.empty() ? 0 : log_.back().seq};
}

StateSummary NavigationSession::move_along(const TourEdge& edge, MoveKind kind) {
    const auto& ev = append(kind == MoveKind::step ? EventKind::step : EventKind::branch,
                            MovePayload{edge.edge, edge.src, edge.dst});
    if (kind == MoveKind::branch) {
        state_.paths.push_back({path_id(state_.paths.size()),
                                {edge.src},
                                {PathOriginKind::branch_at, edge.src},
                                {}});
    }
    SemanticPath& path = state_.paths.back();
    path.steps.push_back(edge.dst);
    path.events.push_back(ev.seq);
    state_.current = edge.dst;
    state_.visited_edges.insert(edge.edge);
    record_visit(edge.dst, state_.paths.size() - 1);
    return summary_locked();
}

StateSummary NavigationSession::step(const EdgeId& edge) {
    std::lock_guard lock(mutex_);
    const TourEdge* e = find_tour_edge(edge);
    if (!e) fail(ErrorCode::UnknownEdge, "edge " + edge.str() + " is not an edge of the tour", {{"edge", edge.str()}});
    if (e->src != state_.current) {
        fail(ErrorCode::NotAdjacentToCurrent,
             "edge " + edge.str() + " does not start at the current entity " + state_.current.str(),
             {{"edge", edge.str()}, {"current", state_.current.str()}});
    }
    return move_along(*e, MoveKind::step);
}

StateSummary NavigationSession::branch(const EdgeId& edge) {
    std::lock_guard lock(mutex_);
    const TourEdge* e = find_tour_edge(edge);
    if (!e) fail(ErrorCode::UnknownEdge, "edge " + edge.str() + " is not an edge of the tour", {{"edge", edge.str()}});
    if (!state_.visited_entities.contains(e->src)) {
        fail(ErrorCode::SourceNotVisited, "branch source " + e->src.str() + " has not been visited",
             {{"edge", edge.str()}, {"source", e->src.str()}});
    }
    if (e->src == state_.current) {
        fail(ErrorCode::InvalidArgument, "edge " + edge.str() + " starts at the current entity; use step",
             {{"edge", edge.str()}});
    }
    return move_along(*e, MoveKind::branch);
}

StateSummary NavigationSession::detour_locked(const EntityId& entity) {
    const bool known = graph_->read([&](const KnowledgeGraph& g) { return g.has_entity(entity); });
    if (!known) fail(ErrorCode::UnknownEntity, "unknown entity " + entity.str(), {{"entity", entity.str()}});
    for (const auto& e : tour_.edges) {
        if (e.dst == entity && state_.visited_entities.contains(e.src)) {
            fail(ErrorCode::UseStepOrBranch,
                 "entity " + entity.str() + " is reachable from visited entity " + e.src.str(),
                 {{"entity", entity.str()}, {"edge", e.edge.str()}});
        }
    }
    SemanticTour expanded = graph_->read([&](const KnowledgeGraph& g) { return expand(g, tour_, entity, 1); });
    std::vector<EntityId> added;
    std::set_difference(expanded.members.begin(), expanded.members.end(), tour_.members.begin(),
                        tour_.members.end(), std::back_inserter(added));
    tour_ = std::move(expanded);

    const auto& ev = append(EventKind::detour, DetourPayload{entity, added});
    state_.paths.push_back({path_id(state_.paths.size()), {entity}, {PathOriginKind::detour, std::nullopt}, {ev.seq}});
    state_.current = entity;
    record_visit(entity, state_.paths.size() - 1);
    return summary_locked();
}

StateSummary NavigationSession::detour(const EntityId& entity) {
    std::lock_guard lock(mutex_);
    return detour_locked(entity);
}

StateSummary NavigationSession::navigate(const EntityId& entity) {
    std::lock_guard lock(mutex_);
    MoveClass move = classify_move(tour_, state_, entity);
    if (move.kind == MoveKind::detour) return detour_locked(entity);
    return move_along(*find_tour_edge(*move.edge), move.kind);
}

MoveClass NavigationSession::classify(const EntityId& entity) const {
    std::lock_guard lock(mutex_);
    return classify_move(tour_, state_, entity);
}

std::vector<Snapshot> NavigationSession::replay(std::uint64_t from, std::uint64_t to) {
    std::lock_guard lock(mutex_);
    auto snapshots = replay_range(log_, from, to);
    append(EventKind::replay_begin, ReplayPayload{from, to});
    append(EventKind::replay_end, ReplayPayload{from, to});
    return snapshots;
}

EdgeId NavigationSession::add_tacit_edge(const EntityId& src, const EntityId& dst, const RelationTypeId& rel,
                                         RelationMetadata meta) {
    if (meta.provenance.kind != ProvenanceKind::user) {
        fail(ErrorCode::TacitProvenanceRequired,
             "tacit edges must carry user provenance, got " + meta.provenance.to_string());
    }
    std::lock_guard lock(mutex_);
    EdgeId id = graph_->write([&](KnowledgeGraph& g) { return g.add_edge(src, dst, rel, std::move(meta)); });
    if (tour_.contains(src) && tour_.contains(dst)) {
        TourEdge added{src, dst, id};
        auto pos = std::lower_bound(tour_.edges.begin(), tour_.edges.end(), added,
                                    [](const TourEdge& a, const TourEdge& b) { return a.edge < b.edge; });
        tour_.edges.insert(pos, added);
    }
    append(EventKind::add_edge, TacitEdgePayload{id, src, dst, rel});
    return id;
}

EntityId NavigationSession::add_entity_from_span(const Document& document, const Span& span) {
    if (span.start >= span.end || span.end > document.text.size()) {
        fail(ErrorCode::SpanOutOfBounds,
             "span [" + std::to_string(span.start) + ", " + std::to_string(span.end) + ") outside document " +
                 document.id.str(),
             {{"document", document.id.str()}});
    }
    std::vector<std::string> unit_path;
    for (const auto& u : flatten_units(document)) {
        if (u.unit->span.contains(span)) unit_path = u.path;
    }
    std::lock_guard lock(mutex_);
    EntityId id = graph_->write([&](KnowledgeGraph& g) {
        const DatasetId dataset(document.id.str());
        if (!g.data().find_dataset(dataset)) g.data().add_dataset({dataset, document.title, {}});
        DataPoint point{g.fresh_data_point_id(),
                        dataset,
                        DataPointKind::expression,
                        std::string(document.slice(span)),
                        Locator{document.id, span, unit_path},
                        1};
        const DataPointId point_id = point.id;
        g.data().add_point(std::move(point));
        Entity entity;
        entity.id = g.fresh_entity_id();
        entity.label = std::string(document.slice(span));
        entity.kind = EntityKind::user_defined;
        entity.source = point_id;
        entity.attributes["document"] = document.id.str();
        return g.add_entity(std::move(entity));
    });
    append(EventKind::add_entity, SpanEntityPayload{id, document.id, span});
    return id;
}

void NavigationSession::annotate_task(std::uint64_t event_seq, TaskTag tag) {
    std::lock_guard lock(mutex_);
    if (event_seq >= log_.size()) {
        fail(ErrorCode::UnknownEvent, "no event with seq " + std::to_string(event_seq),
             {{"event", std::to_string(event_seq)}});
    }
    state_.task_tags[event_seq] = tag;
    append(EventKind::annotate_task, TaskPayload{event_seq, tag});
}

std::optional<TaskTag> NavigationSession::task_of(std::uint64_t event_seq) const {
    std::lock_guard lock(mutex_);
    auto it = state_.task_tags.find(event_seq);
    if (it == state_.task_tags.end()) return std::nullopt;
    return it->second;
}

std::vector<TaskTag> NavigationSession::tasks_of_path(const std::string& path) const {
    std::lock_guard lock(mutex_);
    std::vector<TaskTag> tags;
    for (const auto& p : state_.paths) {
        if (p.id != path) continue;
        for (auto seq : p.events) {
            if (auto it = state_.task_tags.find(seq); it != state_.task_tags.end()) tags.push_back(it->second);
        }
    }
    return tags;
}

LensState NavigationSession::lens() const {
    SemanticTour tour;
    SessionState state;
    {
        std::lock_guard lock(mutex_);
        tour = tour_;
        state = state_;
    }
    return compute_lens(tour, state);
}

LayoutModel NavigationSession::layout(const LayoutOptions& options) const {
    SemanticTour tour;
    SessionState state;
    {
        std::lock_guard lock(mutex_);
        tour = tour_;
        state = state_;
    }
    return graph_->read([&](const KnowledgeGraph& g) { return compute_layout(tour, g, state, options); });
}

StateSummary NavigationSession::summary() const {
    std::lock_guard lock(mutex_);
    return summary_locked();
}

SessionState NavigationSession::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

SemanticTour NavigationSession::tour() const {
    std::lock_guard lock(mutex_);
    return tour_;
}

std::vector<ProvenanceEvent> NavigationSession::log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::vector<ProvenanceEvent> NavigationSession::events_after(std::optional<std::uint64_t> seq) const {
    std::lock_guard lock(mutex_);
    const std::size_t first = seq ? static_cast<std::size_t>(*seq + 1) : 0;
    if (first >= log_.size()) return {};
    return {log_.begin() + static_cast<std::ptrdiff_t>(first), log_.end()};
}

ProvenanceOrder NavigationSession::provenance_order() const {
    std::lock_guard lock(mutex_);
    std::vector<std::pair<std::size_t, EntityId>> visits;
    for (const auto& [entity, visit] : state_.first_visits) visits.emplace_back(visit.column, entity);
    std::sort(visits.begin(), visits.end());
    ProvenanceOrder order{tour_.id, {}};
    for (auto& [column, entity] : visits) order.first_visits.push_back(std::move(entity));
    return order;
}

bool NavigationSession::wait_for_events(std::optional<std::uint64_t> seq, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    const std::size_t wanted = seq ? static_cast<std::size_t>(*seq + 2) : 1;
    return appended_.wait_for(lock, timeout, [&] { return log_.size() >= wanted; });
}

}  // namespace semtour
