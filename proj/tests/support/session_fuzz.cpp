#include "session_fuzz.hpp"

#include "oracles.hpp"
#include "semtour/error.hpp"

namespace semtour::testing {

namespace {

bool adjacent_to_visited(const SemanticTour& tour, const SessionState& state, const EntityId& target) {
    for (const auto& e : tour.edges) {
        if (e.dst == target && state.visited_entities.contains(e.src)) return true;
    }
    return false;
}

}  // namespace

FuzzReport fuzz_session(Rng& rng, std::shared_ptr<SharedGraph> graph, const SemanticTour& tour,
                        std::size_t operations, std::unique_ptr<NavigationSession>* keep) {
    FuzzReport report;
    auto session = std::make_unique<NavigationSession>(SessionId("fuzz"), graph, tour, tour.start, counting_clock());
    auto note = [&](std::string what) {
        if (report.failures.size() < 20) report.failures.push_back(std::move(what));
    };

    for (std::size_t i = 0; i < operations; ++i) {
        const SessionState before = session->state();
        const SemanticTour current_tour = session->tour();
        const std::size_t log_size = session->log().size();
        const FuzzAction a = graph->read([&](const KnowledgeGraph& g) {
            return random_action(rng, g, current_tour, before, log_size);
        });
        ++report.operations;
        const std::string at = "op " + std::to_string(i) + ": ";
        try {
            switch (a.op) {
                case FuzzOp::step: session->step(a.edge); break;
                case FuzzOp::branch: session->branch(a.edge); break;
                case FuzzOp::detour: {
                    const bool known = graph->read([&](const KnowledgeGraph& g) { return g.has_entity(a.entity); });
                    const bool adjacent = adjacent_to_visited(current_tour, before, a.entity);
                    try {
                        session->detour(a.entity);
                        if (!known || adjacent) note(at + "detour to " + a.entity.str() + " should have failed");
                    } catch (const Error& e) {
                        const ErrorCode want = !known ? ErrorCode::UnknownEntity : ErrorCode::UseStepOrBranch;
                        if ((known && !adjacent) || e.code() != want) {
                            note(at + "detour to " + a.entity.str() + " failed with " + std::string(enum_name(e.code())));
                        }
                        throw;
                    }
                    break;
                }
                case FuzzOp::navigate: {
                    const MoveKind want = classify_oracle(current_tour, before.current, before.visited_entities, a.entity);
                    const MoveClass got = session->classify(a.entity);
                    ++report.classified;
                    if (got.kind != want) {
                        note(at + "classify " + a.entity.str() + " gave " + std::string(enum_name(got.kind)) +
                             ", oracle " + std::string(enum_name(want)));
                    }
                    session->navigate(a.entity);
                    const auto log = session->log();
                    const EventKind kind = log.back().kind;
                    const EventKind expected_kind = want == MoveKind::step     ? EventKind::step
                                                    : want == MoveKind::branch ? EventKind::branch
                                                                               : EventKind::detour;
                    if (kind != expected_kind) note(at + "navigate logged " + std::string(enum_name(kind)));
                    if (session->state().current != a.entity) note(at + "navigate did not reach " + a.entity.str());
                    break;
                }
                case FuzzOp::replay: {
                    const auto snapshots = session->replay(a.from, a.to);
                    if (session->state() != before) note(at + "replay changed the live state");
                    if (snapshots.size() != a.to - a.from + 1) note(at + "replay returned a wrong snapshot count");
                    break;
                }
                case FuzzOp::tag: session->annotate_task(a.from, a.tag); break;
            }
        } catch (const Error& e) {
            ++report.rejected;
            if (session->log().size() != log_size) note(at + "failed operation appended to the log");
            if (session->state() != before) note(at + "failed operation changed state");
        }

        const SessionState after = session->state();
        if (!after.visited_entities.contains(after.current)) note(at + "current not visited");
    }

    const auto log = session->log();
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].seq != i) note("seq not dense at " + std::to_string(i));
        if (i > 0 && log[i].timestamp_ms < log[i - 1].timestamp_ms) note("timestamps decrease at " + std::to_string(i));
    }
    const SessionState live = session->state();
    report.live_hash = state_hash(live);
    report.replayed_hash = state_hash(replay_events(log));

    // every navigation event sits in exactly one path
    std::map<std::uint64_t, std::size_t> owners;
    for (const auto& p : live.paths) {
        if (p.steps.empty()) note(p.id + " has no steps");
        for (auto seq : p.events) ++owners[seq];
    }
    for (const auto& ev : log) {
        const bool navigation = ev.kind == EventKind::init || ev.kind == EventKind::step ||
                                ev.kind == EventKind::branch || ev.kind == EventKind::detour;
        const std::size_t count = owners.contains(ev.seq) ? owners[ev.seq] : 0;
        if (count != (navigation ? 1u : 0u)) note("event " + std::to_string(ev.seq) + " owned by " + std::to_string(count) + " paths");
    }
    const VisitScan scan = scan_log(log);
    if (scan.entities != live.visited_entities || scan.edges != live.visited_edges) note("visited sets differ from log scan");
    if (scan.tags != live.task_tags) note("task tags differ from log scan");

    if (keep) *keep = std::move(session);
    return report;
}

}  // namespace semtour::testing
