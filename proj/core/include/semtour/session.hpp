#pragma once

// Navigation sessions over a semantic tour: step / branch / detour moves,
// an append-only provenance log, semantic paths, replay, task annotation,
// and the lens and layered layout derived from session state.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "semtour/extraction.hpp"
#include "semtour/knowledge_graph.hpp"
#include "semtour/tour.hpp"

namespace semtour {

enum class EventKind { init, step, branch, detour, replay_begin, replay_end, add_edge, add_entity, annotate_task };

template <>
struct EnumNames<EventKind> {
    static constexpr std::array<std::string_view, 9> names = {
        "init", "step", "branch", "detour", "replay_begin", "replay_end", "add_edge", "add_entity", "annotate_task"};
};

// Legal analysis tasks T1..T9.
enum class TaskTag { T1, T2, T3, T4, T5, T6, T7, T8, T9 };

template <>
struct EnumNames<TaskTag> {
    static constexpr std::array<std::string_view, 9> names = {"T1", "T2", "T3", "T4", "T5",
                                                              "T6", "T7", "T8", "T9"};
};

struct TaskInfo {
    std::string_view category;
    std::string_view name;
    std::string_view description;
};

const TaskInfo& task_info(TaskTag tag);

struct InitPayload {
    EntityId entity;
    friend bool operator==(const InitPayload&, const InitPayload&) = default;
};

// step and branch
struct MovePayload {
    EdgeId edge;
    EntityId from;
    EntityId to;
    friend bool operator==(const MovePayload&, const MovePayload&) = default;
};

struct DetourPayload {
    EntityId entity;
    std::vector<EntityId> added_members;
    friend bool operator==(const DetourPayload&, const DetourPayload&) = default;
};

// replay_begin and replay_end
struct ReplayPayload {
    std::uint64_t from = 0;
    std::uint64_t to = 0;
    friend bool operator==(const ReplayPayload&, const ReplayPayload&) = default;
};

struct TacitEdgePayload {
    EdgeId edge;
    EntityId src;
    EntityId dst;
    RelationTypeId rel;
    friend bool operator==(const TacitEdgePayload&, const TacitEdgePayload&) = default;
};

struct SpanEntityPayload {
    EntityId entity;
    DocumentId document;
    Span span;
    friend bool operator==(const SpanEntityPayload&, const SpanEntityPayload&) = default;
};

struct TaskPayload {
    std::uint64_t event = 0;
    TaskTag tag = TaskTag::T1;
    friend bool operator==(const TaskPayload&, const TaskPayload&) = default;
};

using EventPayload = std::variant<InitPayload, MovePayload, DetourPayload, ReplayPayload, TacitEdgePayload,
                                  SpanEntityPayload, TaskPayload>;

struct ProvenanceEvent {
    std::uint64_t seq = 0;
    std::int64_t timestamp_ms = 0;
    EventKind kind = EventKind::init;
    EventPayload payload;

    friend bool operator==(const ProvenanceEvent&, const ProvenanceEvent&) = default;
};

enum class PathOriginKind { init, branch_at, detour };

template <>
struct EnumNames<PathOriginKind> {
    static constexpr std::array<std::string_view, 3> names = {"init", "branch_at", "detour"};
};

struct PathOrigin {
    PathOriginKind kind = PathOriginKind::init;
    std::optional<EntityId> branch_point;
    friend bool operator==(const PathOrigin&, const PathOrigin&) = default;
};

struct SemanticPath {
    std::string id;  // "path-<index>"
    std::vector<EntityId> steps;
    PathOrigin origin;
    std::vector<std::uint64_t> events;  // navigation events grouped into this path
    friend bool operator==(const SemanticPath&, const SemanticPath&) = default;
};

struct FirstVisit {
    std::size_t path = 0;    // index into paths
    std::size_t column = 0;  // index of the navigation move (init = 0)
    friend bool operator==(const FirstVisit&, const FirstVisit&) = default;
};

// Everything a provenance log determines about a session.
struct SessionState {
    EntityId current;
    std::set<EntityId> visited_entities;
    std::set<EdgeId> visited_edges;
    std::vector<SemanticPath> paths;
    std::map<std::uint64_t, TaskTag> task_tags;
    std::map<EntityId, FirstVisit> first_visits;
    std::size_t moves = 0;  // navigation events so far

    friend bool operator==(const SessionState&, const SessionState&) = default;
};

// Canonical digest (FNV-1a over canonical JSON) of a state.
std::string state_hash(const SessionState& state);

// Rebuilds state by folding the events in order, independent of any graph.
SessionState replay_events(std::span<const ProvenanceEvent> events);

struct Snapshot {
    std::uint64_t seq = 0;  // state after this event
    SessionState state;
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// States after each event in [from, to]. Throws RangeOutOfBounds.
std::vector<Snapshot> replay_range(std::span<const ProvenanceEvent> events, std::uint64_t from, std::uint64_t to);

enum class FocusLevel { Focused = 0, Near = 1, Context = 2, Blurred = 3 };

template <>
struct EnumNames<FocusLevel> {
    static constexpr std::array<std::string_view, 4> names = {"Focused", "Near", "Context", "Blurred"};
};

struct LensState {
    std::map<EntityId, FocusLevel> focus;
    EntityId current_outlined;
    friend bool operator==(const LensState&, const LensState&) = default;
};

std::string lens_digest(const LensState& lens);

// Undirected BFS distance over tour edges from the current entity:
// 0 Focused, 1 Near, 2 Context, otherwise Blurred; visited entities are
// raised to at least Context.
LensState compute_lens(const SemanticTour& tour, const SessionState& state);

struct Placement {
    std::string row;  // semantic path id
    std::size_t column = 0;
    friend bool operator==(const Placement&, const Placement&) = default;
};

struct Aggregate {
    std::string id;
    std::vector<EntityId> members;
    EntityId container;
    RelationTypeId relation;
    std::string row;
    std::size_t column = 0;
    friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct LayoutModel {
    std::map<EntityId, Placement> placements;
    std::vector<Aggregate> aggregates;
    friend bool operator==(const LayoutModel&, const LayoutModel&) = default;
};

struct LayoutOptions {
    std::size_t aggregation_threshold = 3;
    std::string membership_relation{kPartOf};
};

// Visited entities sit at (path of first visit, move index of first visit).
// Unvisited members adjacent to a visited one (the frontier) sit one column
// right of their anchor, the adjacent visited entity visited earliest. Frontier
// entities sharing column, container and relation to the anchor collapse into
// an aggregate once the group reaches the threshold.
LayoutModel compute_layout(const SemanticTour& tour, const KnowledgeGraph& graph, const SessionState& state,
                           const LayoutOptions& options = {});

enum class MoveKind { step, branch, detour };

template <>
struct EnumNames<MoveKind> {
    static constexpr std::array<std::string_view, 3> names = {"step", "branch", "detour"};
};

struct MoveClass {
    MoveKind kind = MoveKind::detour;
    std::optional<EdgeId> edge;  // for step and branch
};

// step: a tour edge from current to target (smallest edge id);
// branch: otherwise a tour edge from another visited entity (smallest
// source id, then edge id); detour: neither.
MoveClass classify_move(const SemanticTour& tour, const SessionState& state, const EntityId& target);

struct StateSummary {
    SessionId session;
    EntityId current;
    std::string lens_digest;
    std::size_t path_count = 0;
    std::uint64_t seq = 0;  // seq of the last log event
    friend bool operator==(const StateSummary&, const StateSummary&) = default;
};

using Clock = std::function<std::int64_t()>;
Clock system_clock_ms();

// One analyst's walk through a tour. All public operations are serialized by
// an internal mutex; graph edits take the shared graph's write lock.
class NavigationSession {
public:
    // Starts a session at `start`. Throws NotInTour.
    NavigationSession(SessionId id, std::shared_ptr<SharedGraph> graph, SemanticTour tour, const EntityId& start,
                      Clock clock = system_clock_ms());

    // Rebuilds a session from its tour and log.
    static std::unique_ptr<NavigationSession> restore(SessionId id, std::shared_ptr<SharedGraph> graph,
                                                      SemanticTour tour, std::vector<ProvenanceEvent> log,
                                                      Clock clock = system_clock_ms());

    NavigationSession(const NavigationSession&) = delete;
    NavigationSession& operator=(const NavigationSession&) = delete;

    const SessionId& id() const noexcept { return id_; }
    TourId tour_id() const;

    // Throws UnknownEdge or NotAdjacentToCurrent.
    StateSummary step(const EdgeId& edge);
    // Throws UnknownEdge or SourceNotVisited.
    StateSummary branch(const EdgeId& edge);
    // Throws UnknownEntity or UseStepOrBranch.
    StateSummary detour(const EntityId& entity);
    // Classifies the move and performs it.
    StateSummary navigate(const EntityId& entity);
    MoveClass classify(const EntityId& entity) const;

    // Read-only; appends replay_begin/replay_end markers.
    std::vector<Snapshot> replay(std::uint64_t from, std::uint64_t to);

    // Throws TacitProvenanceRequired unless meta.provenance is user.
    EdgeId add_tacit_edge(const EntityId& src, const EntityId& dst, const RelationTypeId& rel,
                          RelationMetadata meta);
    // Throws SpanOutOfBounds.
    EntityId add_entity_from_span(const Document& document, const Span& span);

    // Throws UnknownEvent.
    void annotate_task(std::uint64_t event_seq, TaskTag tag);
    std::optional<TaskTag> task_of(std::uint64_t event_seq) const;
    std::vector<TaskTag> tasks_of_path(const std::string& path_id) const;

    LensState lens() const;
    LayoutModel layout(const LayoutOptions& options = {}) const;

    StateSummary summary() const;
    SessionState state() const;
    SemanticTour tour() const;
    std::vector<ProvenanceEvent> log() const;
    std::vector<ProvenanceEvent> events_after(std::optional<std::uint64_t> seq) const;
    ProvenanceOrder provenance_order() const;

    // Blocks until the log holds an event with seq > `seq` (or any event when
    // `seq` is empty), or the timeout passes. Returns whether one arrived.
    bool wait_for_events(std::optional<std::uint64_t> seq, std::chrono::milliseconds timeout) const;

private:
    struct RestoreTag {};
    NavigationSession(RestoreTag, SessionId id, std::shared_ptr<SharedGraph> graph, SemanticTour tour,
                      std::vector<ProvenanceEvent> log, Clock clock);

    const ProvenanceEvent& append(EventKind kind, EventPayload payload);
    void record_visit(const EntityId& entity, std::size_t path);
    StateSummary summary_locked() const;
    StateSummary move_along(const TourEdge& edge, MoveKind kind);
    StateSummary detour_locked(const EntityId& entity);
    const TourEdge* find_tour_edge(const EdgeId& edge) const;

    SessionId id_;
    std::shared_ptr<SharedGraph> graph_;
    SemanticTour tour_;
    SessionState state_;
    std::vector<ProvenanceEvent> log_;
    Clock clock_;
    std::int64_t last_timestamp_ = 0;
    mutable std::mutex mutex_;
    mutable std::condition_variable appended_;
};

}  // namespace semtour
