#include "semtour/json.hpp"

#include <cstdio>
#include <string>

#include "semtour/error.hpp"

namespace semtour {

namespace {

std::string join(std::string_view path, std::string_view key) {
    std::string out(path);
    out += '.';
    out += key;
    return out;
}

std::string index(std::string_view path, std::size_t i) {
    return std::string(path) + "[" + std::to_string(i) + "]";
}

[[noreturn]] void schema_error(std::string_view path, const std::string& problem) {
    fail(ErrorCode::SchemaError, problem + " at " + std::string(path), {{"field", std::string(path)}});
}

const Json& object(const Json& j, std::string_view path) {
    if (!j.is_object()) schema_error(path, "expected object");
    return j;
}

const Json& array(const Json& j, std::string_view path) {
    if (!j.is_array()) schema_error(path, "expected array");
    return j;
}

const Json& field(const Json& j, std::string_view key, std::string_view path) {
    object(j, path);
    auto it = j.find(key);
    if (it == j.end()) schema_error(join(path, key), "missing field");
    return *it;
}

const Json* optional_field(const Json& j, std::string_view key, std::string_view path) {
    object(j, path);
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return nullptr;
    return &*it;
}

std::string as_string(const Json& j, std::string_view path) {
    if (!j.is_string()) schema_error(path, "expected string");
    return j.get<std::string>();
}

std::uint64_t as_uint(const Json& j, std::string_view path) {
    if (!j.is_number_unsigned()) schema_error(path, "expected non-negative integer");
    return j.get<std::uint64_t>();
}

std::int64_t as_int(const Json& j, std::string_view path) {
    if (!j.is_number_integer()) schema_error(path, "expected integer");
    return j.get<std::int64_t>();
}

double as_double(const Json& j, std::string_view path) {
    if (!j.is_number()) schema_error(path, "expected number");
    return j.get<double>();
}

bool as_bool(const Json& j, std::string_view path) {
    if (!j.is_boolean()) schema_error(path, "expected boolean");
    return j.get<bool>();
}

std::string get_string(const Json& j, std::string_view key, std::string_view path) {
    return as_string(field(j, key, path), join(path, key));
}

std::uint64_t get_uint(const Json& j, std::string_view key, std::string_view path) {
    return as_uint(field(j, key, path), join(path, key));
}

std::optional<std::string> get_optional_string(const Json& j, std::string_view key, std::string_view path) {
    const Json* value = optional_field(j, key, path);
    if (!value) return std::nullopt;
    return as_string(*value, join(path, key));
}

template <typename E>
E get_enum(const Json& j, std::string_view key, std::string_view path) {
    const std::string p = join(path, key);
    const std::string text = as_string(field(j, key, path), p);
    auto value = enum_from_name<E>(text);
    if (!value) schema_error(p, "unknown value \"" + text + "\"");
    return *value;
}

template <typename Id>
Id get_id(const Json& j, std::string_view key, std::string_view path) {
    std::string text = get_string(j, key, path);
    if (text.empty()) schema_error(join(path, key), "empty id");
    return Id(std::move(text));
}

template <typename Id>
std::vector<Id> get_id_list(const Json& j, std::string_view key, std::string_view path) {
    const std::string p = join(path, key);
    const Json& list = array(field(j, key, path), p);
    std::vector<Id> out;
    out.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) out.emplace_back(as_string(list[i], index(p, i)));
    return out;
}

template <typename Id>
std::set<Id> get_id_set(const Json& j, std::string_view key, std::string_view path) {
    auto list = get_id_list<Id>(j, key, path);
    return {list.begin(), list.end()};
}

std::map<std::string, std::string> get_string_map(const Json& j, std::string_view key, std::string_view path) {
    const Json* value = optional_field(j, key, path);
    std::map<std::string, std::string> out;
    if (!value) return out;
    const std::string p = join(path, key);
    object(*value, p);
    for (const auto& [k, v] : value->items()) out.emplace(k, as_string(v, join(p, k)));
    return out;
}

template <typename Id>
Json id_array(const std::set<Id>& ids) {
    Json out = Json::array();
    for (const auto& id : ids) out.push_back(id.str());
    return out;
}

template <typename Id>
Json id_array(const std::vector<Id>& ids) {
    Json out = Json::array();
    for (const auto& id : ids) out.push_back(id.str());
    return out;
}

template <typename T>
Json optional_json(const std::optional<T>& value) {
    if (!value) return nullptr;
    if constexpr (requires { value->str(); }) {
        return value->str();
    } else {
        return *value;
    }
}

std::string enum_text(auto value) { return std::string(enum_name(value)); }

Json units_json(const std::vector<Unit>& units) {
    Json out = Json::array();
    for (const auto& unit : units) out.push_back(to_json(unit));
    return out;
}

}  // namespace

// ----- dataspace -----

Json to_json(const Span& span) { return Json::array({span.start, span.end}); }

template <>
Span from_json<Span>(const Json& json, std::string_view path) {
    array(json, path);
    if (json.size() != 2) schema_error(path, "span must be [start, end]");
    Span span{as_uint(json[0], index(path, 0)), as_uint(json[1], index(path, 1))};
    if (span.end < span.start) schema_error(path, "span end precedes start");
    return span;
}

Json to_json(const DataPoint& point) {
    Json out{{"id", point.id.str()},
             {"dataset", point.dataset_id.str()},
             {"kind", enum_text(point.kind)},
             {"payload", point.payload},
             {"granularity", point.granularity},
             {"locator", nullptr}};
    if (point.locator) {
        out["locator"] = {{"document", point.locator->document.str()},
                          {"span", to_json(point.locator->span)},
                          {"unit_path", point.locator->unit_path}};
    }
    return out;
}

template <>
DataPoint from_json<DataPoint>(const Json& json, std::string_view path) {
    DataPoint point;
    point.id = get_id<DataPointId>(json, "id", path);
    point.dataset_id = get_id<DatasetId>(json, "dataset", path);
    point.kind = get_enum<DataPointKind>(json, "kind", path);
    point.payload = get_string(json, "payload", path);
    const std::uint64_t granularity = get_uint(json, "granularity", path);
    if (granularity > UINT32_MAX) schema_error(join(path, "granularity"), "out of range");
    point.granularity = static_cast<std::uint32_t>(granularity);
    if (const Json* loc = optional_field(json, "locator", path)) {
        const std::string p = join(path, "locator");
        Locator locator;
        locator.document = get_id<DocumentId>(*loc, "document", p);
        locator.span = from_json<Span>(field(*loc, "span", p), join(p, "span"));
        const std::string up = join(p, "unit_path");
        const Json& units = array(field(*loc, "unit_path", p), up);
        for (std::size_t i = 0; i < units.size(); ++i) locator.unit_path.push_back(as_string(units[i], index(up, i)));
        point.locator = std::move(locator);
    }
    return point;
}

Json to_json(const Dataset& dataset) {
    return {{"id", dataset.id.str()}, {"name", dataset.name}, {"members", id_array(dataset.member_ids)}};
}

Json to_json(const Selection& selection) { return id_array(selection.member_ids); }

Json to_json(const StagingConfig& config) {
    Json highlights = Json::array();
    for (const auto& h : config.highlights) highlights.push_back({{"point", h.point.str()}, {"color", h.color}});
    return {{"view_kind", enum_text(config.view_kind)},
            {"viewport",
             {{"x", config.viewport.x},
              {"y", config.viewport.y},
              {"width", config.viewport.width},
              {"height", config.viewport.height}}},
            {"zoom", config.zoom},
            {"highlights", std::move(highlights)},
            {"layout_hints", config.layout_hints}};
}

template <>
StagingConfig from_json<StagingConfig>(const Json& json, std::string_view path) {
    StagingConfig config;
    config.view_kind = get_enum<ViewKind>(json, "view_kind", path);
    const std::string vp = join(path, "viewport");
    const Json& viewport = field(json, "viewport", path);
    config.viewport.x = as_double(field(viewport, "x", vp), join(vp, "x"));
    config.viewport.y = as_double(field(viewport, "y", vp), join(vp, "y"));
    config.viewport.width = as_double(field(viewport, "width", vp), join(vp, "width"));
    config.viewport.height = as_double(field(viewport, "height", vp), join(vp, "height"));
    config.zoom = as_double(field(json, "zoom", path), join(path, "zoom"));
    const std::string hp = join(path, "highlights");
    const Json& highlights = array(field(json, "highlights", path), hp);
    for (std::size_t i = 0; i < highlights.size(); ++i) {
        const std::string p = index(hp, i);
        config.highlights.push_back({get_id<DataPointId>(highlights[i], "point", p),
                                     get_string(highlights[i], "color", p)});
    }
    config.layout_hints = get_string_map(json, "layout_hints", path);
    return config;
}

Json to_json(const Scene& scene) {
    return {{"id", scene.id.str()},
            {"selection", to_json(scene.selection)},
            {"staging", to_json(scene.staging)},
            {"seq_index", optional_json(scene.seq_index)}};
}

template <>
Scene from_json<Scene>(const Json& json, std::string_view path) {
    Selection selection;
    selection.member_ids = get_id_set<DataPointId>(json, "selection", path);
    StagingConfig staging = from_json<StagingConfig>(field(json, "staging", path), join(path, "staging"));
    Scene scene;
    try {
        scene = stage(std::move(selection), std::move(staging), get_id<SceneId>(json, "id", path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaError) throw;
        schema_error(path, e.what());
    }
    if (const Json* seq = optional_field(json, "seq_index", path)) {
        scene.seq_index = as_uint(*seq, join(path, "seq_index"));
    }
    return scene;
}

Json to_json(const LinearTour& tour) {
    Json scenes = Json::array();
    for (const auto& s : tour.scenes) scenes.push_back(to_json(s));
    Json transitions = Json::array();
    for (const auto& t : tour.transitions) transitions.push_back({{"from", t.from.str()}, {"to", t.to.str()}});
    return {{"id", tour.id.str()}, {"scenes", std::move(scenes)}, {"transitions", std::move(transitions)}};
}

// ----- knowledge graph -----

Json to_json(const Entity& entity) {
    return {{"id", entity.id.str()},
            {"label", entity.label},
            {"kind", enum_text(entity.kind)},
            {"source", optional_json(entity.source)},
            {"attributes", entity.attributes}};
}

template <>
Entity from_json<Entity>(const Json& json, std::string_view path) {
    Entity entity;
    entity.id = get_id<EntityId>(json, "id", path);
    entity.label = get_string(json, "label", path);
    entity.kind = get_enum<EntityKind>(json, "kind", path);
    if (auto source = get_optional_string(json, "source", path)) entity.source = DataPointId(*source);
    entity.attributes = get_string_map(json, "attributes", path);
    return entity;
}

Json to_json(const RelationType& type) {
    return {{"id", type.id.str()},
            {"name", type.name},
            {"induced_parent", optional_json(type.induced_parent)},
            {"allows_self_loops", type.allows_self_loops}};
}

template <>
RelationType from_json<RelationType>(const Json& json, std::string_view path) {
    RelationType type;
    type.id = get_id<RelationTypeId>(json, "id", path);
    type.name = get_string(json, "name", path);
    if (auto parent = get_optional_string(json, "induced_parent", path)) type.induced_parent = RelationTypeId(*parent);
    if (const Json* loops = optional_field(json, "allows_self_loops", path)) {
        type.allows_self_loops = as_bool(*loops, join(path, "allows_self_loops"));
    }
    return type;
}

Json to_json(const RelationMetadata& meta) {
    return {{"entries", meta.entries},
            {"provenance", meta.provenance.to_string()},
            {"interpretation", meta.interpretation ? Json(enum_text(*meta.interpretation)) : Json(nullptr)}};
}

template <>
RelationMetadata from_json<RelationMetadata>(const Json& json, std::string_view path) {
    RelationMetadata meta;
    meta.entries = get_string_map(json, "entries", path);
    const std::string text = get_string(json, "provenance", path);
    auto provenance = Provenance::parse(text);
    if (!provenance) schema_error(join(path, "provenance"), "unknown provenance \"" + text + "\"");
    meta.provenance = *provenance;
    if (optional_field(json, "interpretation", path)) {
        meta.interpretation = get_enum<Interpretation>(json, "interpretation", path);
    }
    return meta;
}

Json to_json(const Edge& edge) {
    return {{"id", edge.id.str()},
            {"src", edge.src.str()},
            {"dst", edge.dst.str()},
            {"rel", edge.rel.str()},
            {"meta", to_json(edge.meta)}};
}

template <>
Edge from_json<Edge>(const Json& json, std::string_view path) {
    Edge edge;
    edge.id = get_id<EdgeId>(json, "id", path);
    edge.src = get_id<EntityId>(json, "src", path);
    edge.dst = get_id<EntityId>(json, "dst", path);
    edge.rel = get_id<RelationTypeId>(json, "rel", path);
    edge.meta = from_json<RelationMetadata>(field(json, "meta", path), join(path, "meta"));
    return edge;
}

Json to_json(const Subgraph& subgraph) {
    return {{"entities", id_array(subgraph.entities)}, {"edges", id_array(subgraph.edges)}};
}

Json to_json(const KnowledgeGraph& graph) {
    Json types = Json::array();
    for (const auto& [id, t] : graph.relation_types()) types.push_back(to_json(t));
    Json entities = Json::array();
    for (const auto& [id, e] : graph.entities()) entities.push_back(to_json(e));
    Json edges = Json::array();
    for (const auto& [id, e] : graph.edges()) edges.push_back(to_json(e));
    Json datasets = Json::array();
    for (const auto& [id, d] : graph.data().datasets()) datasets.push_back({{"id", id.str()}, {"name", d.name}});
    Json points = Json::array();
    for (const auto& [id, p] : graph.data().points()) points.push_back(to_json(p));
    Json mentions = Json::object();
    for (const auto& [doc, ids] : graph.all_mentions()) mentions[doc.str()] = id_array(ids);
    return {{"schema_version", kSchemaVersion},
            {"id", graph.id()},
            {"relation_types", std::move(types)},
            {"entities", std::move(entities)},
            {"edges", std::move(edges)},
            {"datasets", std::move(datasets)},
            {"data_points", std::move(points)},
            {"mentions", std::move(mentions)}};
}

template <>
KnowledgeGraph from_json<KnowledgeGraph>(const Json& json, std::string_view path) {
    require_schema_version(json, path);
    std::string id = "default";
    if (auto given = get_optional_string(json, "id", path)) id = *given;
    KnowledgeGraph graph(id);

    // Errors raised by the graph while loading describe a broken document.
    auto guarded = [](std::string_view p, auto&& action) {
        try {
            action();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SchemaError) throw;
            schema_error(p, e.what());
        }
    };

    if (const Json* datasets = optional_field(json, "datasets", path)) {
        const std::string p = join(path, "datasets");
        array(*datasets, p);
        for (std::size_t i = 0; i < datasets->size(); ++i) {
            const std::string ip = index(p, i);
            Dataset dataset{get_id<DatasetId>((*datasets)[i], "id", ip), get_string((*datasets)[i], "name", ip), {}};
            guarded(ip, [&] { graph.data().add_dataset(std::move(dataset)); });
        }
    }
    if (const Json* points = optional_field(json, "data_points", path)) {
        const std::string p = join(path, "data_points");
        array(*points, p);
        for (std::size_t i = 0; i < points->size(); ++i) {
            const std::string ip = index(p, i);
            DataPoint point = from_json<DataPoint>((*points)[i], ip);
            guarded(ip, [&] { graph.data().add_point(std::move(point)); });
        }
    }

    // Parents must precede induced types; insert in dependency order.
    {
        const std::string p = join(path, "relation_types");
        const Json& types = array(field(json, "relation_types", path), p);
        std::vector<std::pair<std::string, RelationType>> pending;
        for (std::size_t i = 0; i < types.size(); ++i) {
            const std::string ip = index(p, i);
            pending.emplace_back(ip, from_json<RelationType>(types[i], ip));
        }
        while (!pending.empty()) {
            std::vector<std::pair<std::string, RelationType>> next;
            for (auto& [ip, type] : pending) {
                if (type.induced_parent && !graph.find_relation_type(*type.induced_parent)) {
                    next.emplace_back(std::move(ip), std::move(type));
                    continue;
                }
                guarded(ip, [&] { graph.add_relation_type(std::move(type)); });
            }
            if (next.size() == pending.size()) {
                schema_error(join(next.front().first, "induced_parent"), "unknown parent relation type");
            }
            pending = std::move(next);
        }
    }

    {
        const std::string p = join(path, "entities");
        const Json& entities = array(field(json, "entities", path), p);
        for (std::size_t i = 0; i < entities.size(); ++i) {
            const std::string ip = index(p, i);
            Entity entity = from_json<Entity>(entities[i], ip);
            guarded(ip, [&] { graph.add_entity(std::move(entity)); });
        }
    }
    {
        const std::string p = join(path, "edges");
        const Json& edges = array(field(json, "edges", path), p);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const std::string ip = index(p, i);
            Edge edge = from_json<Edge>(edges[i], ip);
            guarded(ip, [&] { graph.add_edge(std::move(edge)); });
        }
    }
    if (const Json* mentions = optional_field(json, "mentions", path)) {
        const std::string p = join(path, "mentions");
        object(*mentions, p);
        for (const auto& [doc, ids] : mentions->items()) {
            const std::string dp = join(p, doc);
            array(ids, dp);
            for (std::size_t i = 0; i < ids.size(); ++i) {
                EntityId entity(as_string(ids[i], index(dp, i)));
                if (!graph.has_entity(entity)) schema_error(index(dp, i), "unknown entity " + entity.str());
                graph.record_mention(DatasetId(doc), entity);
            }
        }
    }
    return graph;
}

// ----- documents -----

Json to_json(const Unit& unit) {
    return {{"id", unit.id}, {"label", unit.label}, {"span", to_json(unit.span)}, {"children", units_json(unit.children)}};
}

template <>
Unit from_json<Unit>(const Json& json, std::string_view path) {
    Unit unit;
    unit.id = get_string(json, "id", path);
    unit.label = get_string(json, "label", path);
    unit.span = from_json<Span>(field(json, "span", path), join(path, "span"));
    if (const Json* children = optional_field(json, "children", path)) {
        const std::string p = join(path, "children");
        array(*children, p);
        for (std::size_t i = 0; i < children->size(); ++i) unit.children.push_back(from_json<Unit>((*children)[i], index(p, i)));
    }
    return unit;
}

Json to_json(const Document& document) {
    return {{"id", document.id.str()},
            {"title", document.title},
            {"kind", enum_text(document.kind)},
            {"code", document.code},
            {"text", document.text},
            {"units", units_json(document.units)}};
}

template <>
Document from_json<Document>(const Json& json, std::string_view path) {
    if (optional_field(json, "schema_version", path)) require_schema_version(json, path);
    Document document;
    document.id = get_id<DocumentId>(json, "id", path);
    document.title = get_string(json, "title", path);
    document.kind = get_enum<DocumentKind>(json, "kind", path);
    document.code = get_optional_string(json, "code", path).value_or(document.id.str());
    document.text = get_string(json, "text", path);
    const std::string p = join(path, "units");
    const Json& units = array(field(json, "units", path), p);
    for (std::size_t i = 0; i < units.size(); ++i) document.units.push_back(from_json<Unit>(units[i], index(p, i)));
    try {
        validate_document(document);
    } catch (const Error& e) {
        std::string where = std::string(path);
        if (auto it = e.detail().find("field"); it != e.detail().end()) where = join(path, it->second);
        fail(ErrorCode::SchemaError, std::string(e.what()) + " at " + where, {{"field", where}});
    }
    return document;
}

Json to_json(const Reference& reference) {
    return {{"span", to_json(reference.source_span)},
            {"form", enum_text(reference.form)},
            {"code", reference.code},
            {"section", reference.section},
            {"further_sections", reference.further_sections},
            {"subsection", optional_json(reference.subsection)},
            {"sentence", optional_json(reference.sentence)},
            {"item", optional_json(reference.item)},
            {"resolved", optional_json(reference.resolved)}};
}

Json to_json(const ExtractorConfig& config) {
    Json lexicon = Json::array();
    for (const auto& entry : config.concept_lexicon) lexicon.push_back({{"pattern", entry.pattern}, {"label", entry.label}});
    return {{"codes", config.code_whitelist},
            {"lexicon", std::move(lexicon)},
            {"co_occurrence_window", enum_text(config.co_occurrence_window)}};
}

template <>
ExtractorConfig from_json<ExtractorConfig>(const Json& json, std::string_view path) {
    ExtractorConfig config = ExtractorConfig::with_default_codes();
    if (const Json* codes = optional_field(json, "codes", path)) {
        const std::string p = join(path, "codes");
        array(*codes, p);
        config.code_whitelist.clear();
        for (std::size_t i = 0; i < codes->size(); ++i) config.code_whitelist.insert(as_string((*codes)[i], index(p, i)));
    }
    if (const Json* lexicon = optional_field(json, "lexicon", path)) {
        const std::string p = join(path, "lexicon");
        array(*lexicon, p);
        for (std::size_t i = 0; i < lexicon->size(); ++i) {
            const std::string ip = index(p, i);
            const Json& entry = (*lexicon)[i];
            LexiconEntry e;
            e.label = get_string(entry, "label", ip);
            e.pattern = get_optional_string(entry, "pattern", ip).value_or(e.label);
            if (e.pattern.empty()) schema_error(join(ip, "pattern"), "empty pattern");
            config.concept_lexicon.push_back(std::move(e));
        }
    }
    if (optional_field(json, "co_occurrence_window", path)) {
        config.co_occurrence_window = get_enum<CoOccurrenceWindow>(json, "co_occurrence_window", path);
    }
    return config;
}

// ----- tours -----

Json to_json(const TourEdge& edge) {
    return {{"src", edge.src.str()}, {"dst", edge.dst.str()}, {"edge", edge.edge.str()}};
}

template <>
TourEdge from_json<TourEdge>(const Json& json, std::string_view path) {
    return {get_id<EntityId>(json, "src", path), get_id<EntityId>(json, "dst", path), get_id<EdgeId>(json, "edge", path)};
}

Json to_json(const SemanticTour& tour) {
    Json scenes = Json::object();
    for (const auto& [id, scene] : tour.scenes) scenes[id.str()] = to_json(scene);
    Json edges = Json::array();
    for (const auto& e : tour.edges) edges.push_back(to_json(e));
    Json seed;
    if (const auto* entity = std::get_if<EntityId>(&tour.seed)) {
        seed = {{"entity", entity->str()}};
    } else {
        const auto& group = std::get<DocumentGroup>(tour.seed);
        seed = {{"document", group.document.str()}, {"group", group.group}};
    }
    return {{"id", tour.id.str()},
            {"graph", tour.graph_id},
            {"members", id_array(tour.members)},
            {"scenes", std::move(scenes)},
            {"edges", std::move(edges)},
            {"seed", std::move(seed)},
            {"start", tour.start.str()}};
}

template <>
SemanticTour from_json<SemanticTour>(const Json& json, std::string_view path) {
    if (optional_field(json, "schema_version", path)) require_schema_version(json, path);
    SemanticTour tour;
    tour.id = get_id<TourId>(json, "id", path);
    tour.graph_id = get_string(json, "graph", path);
    tour.members = get_id_set<EntityId>(json, "members", path);
    const std::string sp = join(path, "scenes");
    const Json& scenes = object(field(json, "scenes", path), sp);
    for (const auto& [id, scene] : scenes.items()) {
        const std::string p = join(sp, id);
        if (!tour.members.contains(EntityId(id))) schema_error(p, "scene for non-member");
        tour.scenes.emplace(EntityId(id), from_json<Scene>(scene, p));
    }
    const std::string ep = join(path, "edges");
    const Json& edges = array(field(json, "edges", path), ep);
    for (std::size_t i = 0; i < edges.size(); ++i) tour.edges.push_back(from_json<TourEdge>(edges[i], index(ep, i)));
    for (std::size_t i = 1; i < tour.edges.size(); ++i) {
        if (!(tour.edges[i - 1].edge < tour.edges[i].edge)) schema_error(index(ep, i), "edges not sorted by id");
    }
    const std::string seedp = join(path, "seed");
    const Json& seed = field(json, "seed", path);
    if (optional_field(seed, "entity", seedp)) {
        tour.seed = get_id<EntityId>(seed, "entity", seedp);
    } else {
        tour.seed = DocumentGroup{get_id<DocumentId>(seed, "document", seedp), get_uint(seed, "group", seedp)};
    }
    tour.start = get_id<EntityId>(json, "start", path);
    if (!tour.members.contains(tour.start)) schema_error(join(path, "start"), "start is not a member");
    return tour;
}

Json to_json(const ValidationReport& report) {
    Json bad = Json::array();
    for (const auto& e : report.bad_edges) bad.push_back(to_json(e));
    return {{"valid", report.valid()},
            {"bad_edges", std::move(bad)},
            {"foreign_members", id_array(report.foreign_members)},
            {"members_without_scene", id_array(report.members_without_scene)}};
}

// ----- sessions -----

namespace {

struct PayloadWriter {
    Json operator()(const InitPayload& p) const { return {{"entity", p.entity.str()}}; }
    Json operator()(const MovePayload& p) const {
        return {{"edge", p.edge.str()}, {"from", p.from.str()}, {"to", p.to.str()}};
    }
    Json operator()(const DetourPayload& p) const {
        return {{"entity", p.entity.str()}, {"added_members", id_array(p.added_members)}};
    }
    Json operator()(const ReplayPayload& p) const { return {{"from", p.from}, {"to", p.to}}; }
    Json operator()(const TacitEdgePayload& p) const {
        return {{"edge", p.edge.str()}, {"src", p.src.str()}, {"dst", p.dst.str()}, {"rel", p.rel.str()}};
    }
    Json operator()(const SpanEntityPayload& p) const {
        return {{"entity", p.entity.str()}, {"document", p.document.str()}, {"span", to_json(p.span)}};
    }
    Json operator()(const TaskPayload& p) const { return {{"event", p.event}, {"tag", enum_text(p.tag)}}; }
};

EventPayload read_payload(EventKind kind, const Json& json, std::string_view path) {
    switch (kind) {
        case EventKind::init: return InitPayload{get_id<EntityId>(json, "entity", path)};
        case EventKind::step:
        case EventKind::branch:
            return MovePayload{get_id<EdgeId>(json, "edge", path), get_id<EntityId>(json, "from", path),
                               get_id<EntityId>(json, "to", path)};
        case EventKind::detour:
            return DetourPayload{get_id<EntityId>(json, "entity", path),
                                 get_id_list<EntityId>(json, "added_members", path)};
        case EventKind::replay_begin:
        case EventKind::replay_end:
            return ReplayPayload{get_uint(json, "from", path), get_uint(json, "to", path)};
        case EventKind::add_edge:
            return TacitEdgePayload{get_id<EdgeId>(json, "edge", path), get_id<EntityId>(json, "src", path),
                                    get_id<EntityId>(json, "dst", path), get_id<RelationTypeId>(json, "rel", path)};
        case EventKind::add_entity:
            return SpanEntityPayload{get_id<EntityId>(json, "entity", path), get_id<DocumentId>(json, "document", path),
                                     from_json<Span>(field(json, "span", path), join(path, "span"))};
        case EventKind::annotate_task:
            return TaskPayload{get_uint(json, "event", path), get_enum<TaskTag>(json, "tag", path)};
    }
    schema_error(path, "unknown event kind");
}

bool payload_matches(EventKind kind, const EventPayload& payload) {
    switch (kind) {
        case EventKind::init: return std::holds_alternative<InitPayload>(payload);
        case EventKind::step:
        case EventKind::branch: return std::holds_alternative<MovePayload>(payload);
        case EventKind::detour: return std::holds_alternative<DetourPayload>(payload);
        case EventKind::replay_begin:
        case EventKind::replay_end: return std::holds_alternative<ReplayPayload>(payload);
        case EventKind::add_edge: return std::holds_alternative<TacitEdgePayload>(payload);
        case EventKind::add_entity: return std::holds_alternative<SpanEntityPayload>(payload);
        case EventKind::annotate_task: return std::holds_alternative<TaskPayload>(payload);
    }
    return false;
}

}  // namespace

Json to_json(const ProvenanceEvent& event) {
    if (!payload_matches(event.kind, event.payload)) {
        fail(ErrorCode::InvalidArgument, "payload does not match event kind " + enum_text(event.kind));
    }
    return {{"seq", event.seq},
            {"ts", event.timestamp_ms},
            {"kind", enum_text(event.kind)},
            {"payload", std::visit(PayloadWriter{}, event.payload)}};
}

template <>
ProvenanceEvent from_json<ProvenanceEvent>(const Json& json, std::string_view path) {
    ProvenanceEvent event;
    event.seq = get_uint(json, "seq", path);
    event.timestamp_ms = as_int(field(json, "ts", path), join(path, "ts"));
    event.kind = get_enum<EventKind>(json, "kind", path);
    event.payload = read_payload(event.kind, object(field(json, "payload", path), join(path, "payload")),
                                 join(path, "payload"));
    return event;
}

Json to_json(const SemanticPath& path) {
    Json origin{{"kind", enum_text(path.origin.kind)}, {"branch_point", optional_json(path.origin.branch_point)}};
    return {{"id", path.id}, {"steps", id_array(path.steps)}, {"origin", std::move(origin)}, {"events", path.events}};
}

Json to_json(const SessionState& state) {
    Json paths = Json::array();
    for (const auto& p : state.paths) paths.push_back(to_json(p));
    Json tags = Json::object();
    for (const auto& [seq, tag] : state.task_tags) tags[std::to_string(seq)] = enum_text(tag);
    Json visits = Json::object();
    for (const auto& [entity, fv] : state.first_visits) visits[entity.str()] = {{"path", fv.path}, {"column", fv.column}};
    return {{"current", state.current.str()},
            {"visited_entities", id_array(state.visited_entities)},
            {"visited_edges", id_array(state.visited_edges)},
            {"paths", std::move(paths)},
            {"task_tags", std::move(tags)},
            {"first_visits", std::move(visits)},
            {"moves", state.moves}};
}

Json to_json(const Snapshot& snapshot) {
    return {{"seq", snapshot.seq}, {"state", to_json(snapshot.state)}, {"state_hash", state_hash(snapshot.state)}};
}

Json to_json(const LensState& lens) {
    Json focus = Json::object();
    for (const auto& [entity, level] : lens.focus) focus[entity.str()] = enum_text(level);
    return {{"current_outlined", lens.current_outlined.str()}, {"focus", std::move(focus)}};
}

Json to_json(const LayoutModel& layout) {
    Json placements = Json::object();
    for (const auto& [entity, p] : layout.placements) placements[entity.str()] = {{"row", p.row}, {"column", p.column}};
    Json aggregates = Json::array();
    for (const auto& a : layout.aggregates) {
        aggregates.push_back({{"id", a.id},
                              {"members", id_array(a.members)},
                              {"container", a.container.str()},
                              {"relation", a.relation.str()},
                              {"row", a.row},
                              {"column", a.column}});
    }
    return {{"placements", std::move(placements)}, {"aggregates", std::move(aggregates)}};
}

Json to_json(const StateSummary& summary) {
    return {{"session", summary.session.str()},
            {"current", summary.current.str()},
            {"lens_digest", summary.lens_digest},
            {"path_count", summary.path_count},
            {"seq", summary.seq}};
}

Json to_json(const MoveClass& move) {
    return {{"kind", enum_text(move.kind)}, {"edge", optional_json(move.edge)}};
}

// ----- helpers -----

std::string content_hash(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

Json parse_json(std::string_view text, std::string_view origin) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const std::string where = std::string(origin) + "@" + std::to_string(e.byte);
        fail(ErrorCode::SchemaError, "malformed JSON at " + where + ": " + e.what(),
             {{"field", std::string(origin)}, {"byte", std::to_string(e.byte)}});
    }
}

void require_schema_version(const Json& json, std::string_view path) {
    const std::string p = join(path, "schema_version");
    const Json& version = field(json, "schema_version", path);
    if (!version.is_number_integer() || version.get<std::int64_t>() != kSchemaVersion) {
        schema_error(p, "unsupported schema version " + version.dump());
    }
}

}  // namespace semtour
