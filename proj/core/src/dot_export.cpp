#include <string>

#include "semtour/store.hpp"

namespace semtour {

namespace {

std::string quote(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

void node_line(std::string& out, const EntityId& id, const Entity* entity, const LensState* lens) {
    out += "  " + quote(id.str()) + " [label=" + quote(entity ? entity->label : id.str());
    if (entity) out += ", kind=" + quote(enum_name(entity->kind));
    if (lens) {
        if (auto it = lens->focus.find(id); it != lens->focus.end()) out += ", focus=" + quote(enum_name(it->second));
        if (lens->current_outlined == id) out += ", peripheries=\"2\"";
    }
    out += "];\n";
}

void edge_line(std::string& out, const EntityId& src, const EntityId& dst, const EdgeId& id,
               const KnowledgeGraph& graph) {
    out += "  " + quote(src.str()) + " -> " + quote(dst.str()) + " [id=" + quote(id.str());
    if (const Edge* e = graph.find_edge(id)) {
        const RelationType* type = graph.find_relation_type(e->rel);
        out += ", rel=" + quote(type ? type->name : e->rel.str());
    }
    out += "];\n";
}

}  // namespace

std::string export_dot(const KnowledgeGraph& graph, const LensState* lens) {
    std::string out = "digraph g {\n";
    for (const auto& [id, entity] : graph.entities()) node_line(out, id, &entity, lens);
    for (const auto& [id, edge] : graph.edges()) edge_line(out, edge.src, edge.dst, id, graph);
    out += "}\n";
    return out;
}

std::string export_dot(const SemanticTour& tour, const KnowledgeGraph& graph, const LensState* lens) {
    std::string out = "digraph g {\n";
    for (const auto& id : tour.members) node_line(out, id, graph.find_entity(id), lens);
    for (const auto& e : tour.edges) edge_line(out, e.src, e.dst, e.edge, graph);
    out += "}\n";
    return out;
}

}  // namespace semtour
