#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <sstream>

namespace semtour::testing {

std::set<EntityId> neighborhood_oracle(const KnowledgeGraph& graph, const EntityId& root, int depth,
                                       Direction direction) {
    std::set<EntityId> reached{root};
    std::set<EntityId> frontier{root};
    for (int level = 0; level < depth && !frontier.empty(); ++level) {
        std::set<EntityId> next;
        for (const auto& [id, e] : graph.edges()) {
            if (direction != Direction::in && frontier.contains(e.src) && !reached.contains(e.dst)) next.insert(e.dst);
            if (direction != Direction::out && frontier.contains(e.dst) && !reached.contains(e.src)) next.insert(e.src);
        }
        reached.insert(next.begin(), next.end());
        frontier = std::move(next);
    }
    return reached;
}

InducedCounts induce_oracle(const KnowledgeGraph& graph, const RelationTypeId& membership,
                            const RelationTypeId& base) {
    InducedCounts counts;
    for (const auto& [bid, b] : graph.edges()) {
        if (b.rel != base) continue;
        for (const auto& [uid, u] : graph.edges()) {
            if (u.rel != membership || u.src != b.src) continue;
            for (const auto& [vid, v] : graph.edges()) {
                if (v.rel != membership || v.src != b.dst) continue;
                if (u.dst != v.dst) ++counts[{u.dst, v.dst}];
            }
        }
    }
    return counts;
}

std::vector<EntityId> dfs_oracle(const std::set<EntityId>& members, const std::vector<TourEdge>& edges,
                                 const EntityId& start) {
    std::set<EntityId> seen;
    std::vector<EntityId> order;
    std::function<void(const EntityId&)> visit = [&](const EntityId& node) {
        seen.insert(node);
        order.push_back(node);
        std::set<EntityId> neighbors;
        for (const auto& e : edges) {
            if (e.src == node && e.dst != node) neighbors.insert(e.dst);
            if (e.dst == node && e.src != node) neighbors.insert(e.src);
        }
        for (const auto& n : neighbors) {
            if (members.contains(n) && !seen.contains(n)) visit(n);
        }
    };
    if (members.contains(start)) visit(start);
    for (const auto& m : members) {
        if (!seen.contains(m)) visit(m);
    }
    return order;
}

std::vector<std::set<EntityId>> components_oracle(const KnowledgeGraph& graph, const std::set<EntityId>& nodes) {
    const std::vector<EntityId> ids(nodes.begin(), nodes.end());
    std::map<EntityId, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
    std::vector<std::size_t> parent(ids.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const auto& [id, e] : graph.edges()) {
        auto a = index.find(e.src);
        auto b = index.find(e.dst);
        if (a == index.end() || b == index.end()) continue;
        parent[find(a->second)] = find(b->second);
    }
    std::map<std::size_t, std::set<EntityId>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) groups[find(i)].insert(ids[i]);
    std::vector<std::set<EntityId>> out;
    for (auto& [root, group] : groups) out.push_back(std::move(group));
    return out;
}

std::map<EntityId, FocusLevel> lens_oracle(const SemanticTour& tour, const EntityId& current,
                                           const std::set<EntityId>& visited) {
    constexpr std::size_t kInf = static_cast<std::size_t>(-1);
    std::map<EntityId, std::size_t> dist;
    for (const auto& m : tour.members) dist[m] = kInf;
    if (tour.members.contains(current)) dist[current] = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& e : tour.edges) {
            for (auto [a, b] : {std::pair{e.src, e.dst}, std::pair{e.dst, e.src}}) {
                auto da = dist.find(a);
                auto db = dist.find(b);
                if (da == dist.end() || db == dist.end() || da->second == kInf) continue;
                if (da->second + 1 < db->second) {
                    db->second = da->second + 1;
                    changed = true;
                }
            }
        }
    }
    std::map<EntityId, FocusLevel> levels;
    for (const auto& [m, d] : dist) {
        FocusLevel level = d == 0 ? FocusLevel::Focused
                           : d == 1 ? FocusLevel::Near
                           : d == 2 ? FocusLevel::Context
                                    : FocusLevel::Blurred;
        if (visited.contains(m) && level == FocusLevel::Blurred) level = FocusLevel::Context;
        levels[m] = level;
    }
    return levels;
}

MoveKind classify_oracle(const SemanticTour& tour, const EntityId& current, const std::set<EntityId>& visited,
                         const EntityId& target) {
    const bool from_current = std::any_of(tour.edges.begin(), tour.edges.end(), [&](const TourEdge& e) {
        return e.src == current && e.dst == target;
    });
    if (from_current) return MoveKind::step;
    const bool from_visited = std::any_of(tour.edges.begin(), tour.edges.end(), [&](const TourEdge& e) {
        return e.src != current && visited.contains(e.src) && e.dst == target;
    });
    return from_visited ? MoveKind::branch : MoveKind::detour;
}

ValidationReport validate_oracle(const SemanticTour& tour, const KnowledgeGraph& graph) {
    ValidationReport r;
    for (const auto& te : tour.edges) {
        bool ok = false;
        for (const auto& [id, e] : graph.edges()) {
            if (id == te.edge && e.src == te.src && e.dst == te.dst) ok = true;
        }
        ok = ok && tour.members.contains(te.src) && tour.members.contains(te.dst);
        if (!ok) r.bad_edges.push_back(te);
    }
    for (const auto& m : tour.members) {
        bool known = false;
        for (const auto& [id, e] : graph.entities()) known = known || id == m;
        if (!known) r.foreign_members.push_back(m);
        bool staged = false;
        for (const auto& [id, s] : tour.scenes) staged = staged || id == m;
        if (!staged) r.members_without_scene.push_back(m);
    }
    return r;
}

VisitScan scan_log(const std::vector<ProvenanceEvent>& log) {
    VisitScan scan;
    for (const auto& ev : log) {
        if (const auto* p = std::get_if<InitPayload>(&ev.payload)) {
            scan.entities.insert(p->entity);
            scan.current = p->entity;
        } else if (const auto* m = std::get_if<MovePayload>(&ev.payload)) {
            scan.entities.insert(m->to);
            scan.edges.insert(m->edge);
            scan.current = m->to;
        } else if (const auto* d = std::get_if<DetourPayload>(&ev.payload)) {
            scan.entities.insert(d->entity);
            scan.current = d->entity;
        } else if (const auto* t = std::get_if<TaskPayload>(&ev.payload)) {
            scan.tags[t->event] = t->tag;
        }
    }
    return scan;
}

namespace {

// Reads a quoted DOT string starting at text[pos] == '"'.
std::optional<std::string> read_quoted(const std::string& text, std::size_t& pos) {
    if (pos >= text.size() || text[pos] != '"') return std::nullopt;
    std::string out;
    for (++pos; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c == '"') {
            ++pos;
            return out;
        }
        if (c == '\\') {
            if (++pos >= text.size()) return std::nullopt;
            char n = text[pos];
            out += n == 'n' ? '\n' : n;
            continue;
        }
        if (c == '\n') return std::nullopt;
        out += c;
    }
    return std::nullopt;
}

bool expect(const std::string& text, std::size_t& pos, std::string_view lit) {
    if (text.compare(pos, lit.size(), lit) != 0) return false;
    pos += lit.size();
    return true;
}

std::optional<std::map<std::string, std::string>> read_attrs(const std::string& line, std::size_t& pos) {
    std::map<std::string, std::string> attrs;
    if (!expect(line, pos, " [")) return std::nullopt;
    while (true) {
        std::size_t eq = line.find('=', pos);
        if (eq == std::string::npos) return std::nullopt;
        std::string key = line.substr(pos, eq - pos);
        if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz_") != std::string::npos) {
            return std::nullopt;
        }
        pos = eq + 1;
        std::string value;
        if (pos < line.size() && line[pos] == '"') {
            auto q = read_quoted(line, pos);
            if (!q) return std::nullopt;
            value = *q;
        } else {
            std::size_t end = pos;
            while (end < line.size() && std::isdigit(static_cast<unsigned char>(line[end]))) ++end;
            if (end == pos) return std::nullopt;
            value = line.substr(pos, end - pos);
            pos = end;
        }
        if (!attrs.emplace(key, value).second) return std::nullopt;
        if (expect(line, pos, "];")) break;
        if (!expect(line, pos, ", ")) return std::nullopt;
    }
    return attrs;
}

}  // namespace

std::optional<DotGraph> parse_dot(const std::string& text, std::string* error) {
    auto bad = [&](const std::string& why) -> std::optional<DotGraph> {
        if (error) *error = why;
        return std::nullopt;
    };
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "digraph g {") return bad("missing header");
    DotGraph g;
    bool closed = false;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (closed) return bad("content after closing brace at line " + std::to_string(number));
        if (line == "}") {
            closed = true;
            continue;
        }
        std::size_t pos = 0;
        if (!expect(line, pos, "  ")) return bad("bad indent at line " + std::to_string(number));
        auto first = read_quoted(line, pos);
        if (!first) return bad("bad id at line " + std::to_string(number));
        if (expect(line, pos, " -> ")) {
            auto second = read_quoted(line, pos);
            if (!second) return bad("bad edge target at line " + std::to_string(number));
            auto attrs = read_attrs(line, pos);
            if (!attrs || pos != line.size()) return bad("bad edge attributes at line " + std::to_string(number));
            g.edges.push_back({*first, *second, *attrs});
        } else {
            if (!g.edges.empty()) return bad("node after edges at line " + std::to_string(number));
            auto attrs = read_attrs(line, pos);
            if (!attrs || pos != line.size()) return bad("bad node attributes at line " + std::to_string(number));
            g.nodes.push_back({*first, *attrs});
        }
    }
    if (!closed) return bad("missing closing brace");
    if (text.empty() || text.back() != '\n') return bad("missing final newline");
    return g;
}

}  // namespace semtour::testing
