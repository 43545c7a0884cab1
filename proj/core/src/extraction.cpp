#include <algorithm>
#include <map>
#include <tuple>

#include "semtour/error.hpp"
#include "semtour/extraction.hpp"

namespace semtour {

namespace {

constexpr std::string_view kReferenceExtractor = "reference-grammar";
constexpr std::string_view kStructureExtractor = "structure";
constexpr std::string_view kCoOccurrenceExtractor = "co-occurrence";

// `pointer` locates the unit list in the document JSON, e.g. "units[0].children".
void validate_units(const std::vector<Unit>& units, const Span& parent, const std::string& where,
                    const std::string& pointer) {
    std::size_t last_end = parent.start;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const Unit& unit = units[i];
        const std::string here = where + "/" + unit.id;
        const std::string at = pointer + "[" + std::to_string(i) + "]";
        if (unit.id.empty()) fail(ErrorCode::SchemaError, "unit without id under " + where, {{"field", at + ".id"}});
        const std::map<std::string, std::string> span_field{{"field", at + ".span"}};
        if (unit.span.start >= unit.span.end) {
            fail(ErrorCode::SchemaError, "unit " + here + " has an empty or inverted span", span_field);
        }
        if (!parent.contains(unit.span)) {
            fail(ErrorCode::SchemaError, "unit " + here + " lies outside its parent", span_field);
        }
        if (unit.span.start < last_end) {
            fail(ErrorCode::SchemaError, "unit " + here + " overlaps its previous sibling", span_field);
        }
        last_end = unit.span.end;
        validate_units(unit.children, unit.span, here, at + ".children");
    }
}

void flatten(const std::vector<Unit>& units, std::vector<std::string>& prefix, std::vector<UnitPath>& out) {
    for (const auto& unit : units) {
        prefix.push_back(unit.id);
        out.push_back({&unit, prefix});
        flatten(unit.children, prefix, out);
        prefix.pop_back();
    }
}

EntityKind unit_entity_kind(DocumentKind doc, std::size_t depth) {
    switch (doc) {
        case DocumentKind::statute: return depth == 0 ? EntityKind::law : EntityKind::norm;
        case DocumentKind::ruling: return EntityKind::ruling;
        case DocumentKind::commentary: return EntityKind::commentary;
        case DocumentKind::case_description: return EntityKind::fact;
    }
    return EntityKind::fact;
}

DataPointKind unit_point_kind(DocumentKind doc, std::size_t depth) {
    if (depth == 0) return doc == DocumentKind::statute ? DataPointKind::law : DataPointKind::document;
    if (depth == 1 && doc == DocumentKind::statute) return DataPointKind::section;
    return DataPointKind::paragraph;
}

std::uint32_t granularity_of(DataPointKind kind) {
    switch (kind) {
        case DataPointKind::token: return 0;
        case DataPointKind::expression: return 1;
        case DataPointKind::concept_: return 2;
        case DataPointKind::paragraph: return 3;
        case DataPointKind::section: return 4;
        case DataPointKind::document: return 5;
        case DataPointKind::law: return 5;
    }
    return 0;
}

// Smallest unit whose span contains `span`.
const UnitPath* innermost_unit(const std::vector<UnitPath>& units, const Span& span) {
    const UnitPath* best = nullptr;
    for (const auto& u : units) {
        if (u.unit->span.contains(span) && (!best || u.unit->span.length() <= best->unit->span.length())) {
            best = &u;
        }
    }
    return best;
}

bool is_abbreviation_before(std::string_view text, std::size_t dot) {
    static const std::set<std::string_view> abbreviations = {"Abs", "Nr",  "Art", "vgl", "bzw", "ggf",
                                                             "Rn",  "Urt", "Az",  "z.B", "S",   "f",
                                                             "ff",  "lit", "Buchst"};
    std::size_t start = dot;
    while (start > 0) {
        char c = text[start - 1];
        if (c == ' ' || c == '\n' || c == '\t' || c == '(') break;
        --start;
    }
    return abbreviations.contains(text.substr(start, dot - start));
}

// Sorted cut positions splitting the text into sentence windows that never
// cross a unit boundary or cut through a reference.
std::vector<std::size_t> sentence_cuts(const Document& doc, const std::vector<UnitPath>& units,
                                       const std::vector<Reference>& refs) {
    std::set<std::size_t> cuts{0, doc.text.size()};
    for (const auto& u : units) {
        cuts.insert(u.unit->span.start);
        cuts.insert(u.unit->span.end);
    }
    const std::string_view text = doc.text;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool at_break = i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\n' ||
                              text[i + 1] == '\t' || text[i + 1] == '\r';
        if (!at_break) continue;
        const bool inside_ref = std::any_of(refs.begin(), refs.end(), [&](const Reference& r) {
            return r.source_span.start <= i && i < r.source_span.end;
        });
        if (inside_ref || (c == '.' && is_abbreviation_before(text, i))) continue;
        cuts.insert(i + 1);
    }
    return {cuts.begin(), cuts.end()};
}

struct ResolutionKey {
    std::string code;
    ReferenceForm form;
    std::string section;
    friend auto operator<=>(const ResolutionKey&, const ResolutionKey&) = default;
};

}  // namespace

std::string_view Document::slice(const Span& span) const {
    if (span.start > span.end || span.end > text.size()) return {};
    return std::string_view(text).substr(span.start, span.length());
}

void validate_document(const Document& document) {
    if (document.id.empty()) fail(ErrorCode::SchemaError, "document without id", {{"field", "id"}});
    validate_units(document.units, Span{0, document.text.size()}, document.id.str(), "units");
}

std::vector<UnitPath> flatten_units(const Document& document) {
    std::vector<UnitPath> out;
    std::vector<std::string> prefix;
    flatten(document.units, prefix, out);
    return out;
}

ExtractorConfig ExtractorConfig::with_default_codes() {
    ExtractorConfig config;
    config.code_whitelist = {"StGB", "BGB", "GG", "StPO", "ZPO", "HGB", "WaffG", "BJagdG", "VwVfG", "SGB"};
    return config;
}

std::string unit_entity_id(const DocumentId& document, std::string_view unit_id) {
    return document.str() + "/" + std::string(unit_id);
}

std::string concept_entity_id(std::string_view label) { return "concept:" + std::string(label); }

Extraction extract_entities(const Document& document, const ExtractorConfig& config) {
    Extraction out;
    const DatasetId dataset(document.id.str());

    for (const auto& [unit, path] : flatten_units(document)) {
        const std::size_t depth = path.size() - 1;
        const DataPointKind point_kind = unit_point_kind(document.kind, depth);
        DataPoint point{DataPointId(document.id.str() + "#" + unit->id),
                        dataset,
                        point_kind,
                        std::string(document.slice(unit->span)),
                        Locator{document.id, unit->span, path},
                        granularity_of(point_kind)};

        Entity entity;
        entity.id = EntityId(unit_entity_id(document.id, unit->id));
        entity.label = unit->label.empty() ? unit->id : unit->label;
        entity.kind = unit_entity_kind(document.kind, depth);
        entity.source = point.id;
        entity.attributes["document"] = document.id.str();
        entity.attributes["unit"] = unit->id;
        if (document.kind == DocumentKind::statute) {
            entity.attributes["code"] = document.code.empty() ? document.id.str() : document.code;
            if (auto address = parse_norm_label(unit->label)) {
                entity.attributes["section"] = address->section;
                entity.attributes["form"] = std::string(enum_name(address->form));
            }
        }
        out.points.push_back(std::move(point));
        out.entities.push_back(std::move(entity));
    }

    const std::string folded_text = fold_case(document.text);
    std::set<std::string> labels_seen;
    std::set<DataPointId> points_seen;
    for (const auto& entry : config.concept_lexicon) {
        if (entry.pattern.empty()) fail(ErrorCode::InvalidArgument, "lexicon pattern must not be empty");
        const std::string needle = fold_case(entry.pattern);
        const EntityId concept_id(concept_entity_id(entry.label));
        for (std::size_t at = folded_text.find(needle); at != std::string::npos;
             at = folded_text.find(needle, at + 1)) {
            const Span span{at, at + needle.size()};
            DataPointId point_id(document.id.str() + "@" + std::to_string(span.start) + "-" +
                                 std::to_string(span.end));
            if (points_seen.insert(point_id).second) {
                out.points.push_back(DataPoint{point_id, dataset, DataPointKind::expression,
                                               std::string(document.slice(span)),
                                               Locator{document.id, span, {}},
                                               granularity_of(DataPointKind::expression)});
            }
            if (labels_seen.insert(entry.label).second) {
                Entity entity;
                entity.id = concept_id;
                entity.label = entry.label;
                entity.kind = EntityKind::concept_;
                entity.source = point_id;
                out.entities.push_back(std::move(entity));
            }
            out.concept_mentions.push_back({concept_id, span});
        }
    }
    std::sort(out.concept_mentions.begin(), out.concept_mentions.end(), [](const Mention& a, const Mention& b) {
        return std::tie(a.span, a.entity) < std::tie(b.span, b.entity);
    });
    return out;
}

BuildResult build_graph(std::span<const Document> corpus, const ExtractorConfig& config, std::string graph_id) {
    BuildResult result{KnowledgeGraph(std::move(graph_id)), {}, {}};
    KnowledgeGraph& graph = result.graph;

    const RelationTypeId refers_to =
        graph.add_relation_type({RelationTypeId(std::string(kRefersTo)), std::string(kRefersTo), {}, false});
    const RelationTypeId part_of =
        graph.add_relation_type({RelationTypeId(std::string(kPartOf)), std::string(kPartOf), {}, false});
    const RelationTypeId co_occurs =
        graph.add_relation_type({RelationTypeId(std::string(kCoOccurs)), std::string(kCoOccurs), {}, false});

    std::vector<Extraction> extractions;
    extractions.reserve(corpus.size());
    for (const auto& doc : corpus) {
        validate_document(doc);
        graph.data().add_dataset(Dataset{DatasetId(doc.id.str()), doc.title, {}});
        Extraction ex = extract_entities(doc, config);
        for (auto& point : ex.points) graph.data().add_point(point);
        for (auto& entity : ex.entities) {
            if (!graph.has_entity(entity.id)) graph.add_entity(entity);
        }
        for (const auto& mention : ex.concept_mentions) {
            graph.record_mention(DatasetId(doc.id.str()), mention.entity);
        }
        extractions.push_back(std::move(ex));
    }

    // part_of along every unit tree
    for (const auto& doc : corpus) {
        for (const auto& [unit, path] : flatten_units(doc)) {
            if (path.size() < 2) continue;
            RelationMetadata meta;
            meta.provenance = Provenance::from_extractor(std::string(kStructureExtractor));
            meta.entries["document"] = doc.id.str();
            graph.add_edge(EntityId(unit_entity_id(doc.id, unit->id)),
                           EntityId(unit_entity_id(doc.id, path[path.size() - 2])), part_of, std::move(meta));
        }
    }

    std::map<ResolutionKey, EntityId> norms;
    for (const auto& [id, entity] : graph.entities()) {
        auto code = entity.attributes.find("code");
        auto section = entity.attributes.find("section");
        auto form = entity.attributes.find("form");
        if (code == entity.attributes.end() || section == entity.attributes.end() ||
            form == entity.attributes.end()) {
            continue;
        }
        norms.emplace(ResolutionKey{code->second, *enum_from_name<ReferenceForm>(form->second), section->second},
                      id);
    }

    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const Document& doc = corpus[d];
        const DatasetId dataset(doc.id.str());
        const auto units = flatten_units(doc);
        auto refs = parse_references(doc.text, config);

        // window participants, keyed by window index
        std::map<std::size_t, std::set<EntityId>> windows;
        std::map<std::size_t, const UnitPath*> window_unit;
        const auto cuts = sentence_cuts(doc, units, refs);
        auto window_of = [&](const Span& span) -> std::size_t {
            if (config.co_occurrence_window == CoOccurrenceWindow::sentence) {
                auto it = std::upper_bound(cuts.begin(), cuts.end(), span.start);
                return static_cast<std::size_t>(it - cuts.begin());
            }
            const UnitPath* unit = innermost_unit(units, span);
            if (!unit) return 0;
            return 1 + static_cast<std::size_t>(unit - units.data());
        };
        auto note_participant = [&](const Span& span, const EntityId& entity) {
            const std::size_t w = window_of(span);
            windows[w].insert(entity);
            if (!window_unit.contains(w)) window_unit[w] = innermost_unit(units, span);
        };

        for (auto& ref : refs) {
            const std::string code =
                !ref.code.empty() ? ref.code
                                  : (doc.kind == DocumentKind::statute ? (doc.code.empty() ? doc.id.str() : doc.code)
                                                                       : std::string{});
            std::vector<std::string> sections{ref.section};
            sections.insert(sections.end(), ref.further_sections.begin(), ref.further_sections.end());
            const UnitPath* source_unit = innermost_unit(units, ref.source_span);
            for (std::size_t s = 0; s < sections.size(); ++s) {
                auto found = code.empty() ? norms.end() : norms.find(ResolutionKey{code, ref.form, sections[s]});
                if (found == norms.end()) {
                    std::string target = (ref.form == ReferenceForm::article ? "Art. " : "\xC2\xA7 ") + sections[s];
                    if (!code.empty()) target += " " + code;
                    result.unresolved.push_back({doc.id, ref, std::move(target)});
                    continue;
                }
                const EntityId& target = found->second;
                if (s == 0) ref.resolved = target;
                graph.record_mention(dataset, target);
                note_participant(ref.source_span, target);
                if (!source_unit) continue;
                const EntityId source(unit_entity_id(doc.id, source_unit->unit->id));
                if (source == target) continue;
                RelationMetadata meta;
                meta.provenance = Provenance::from_extractor(std::string(kReferenceExtractor));
                meta.entries["document"] = doc.id.str();
                meta.entries["span"] = std::to_string(ref.source_span.start) + "-" +
                                       std::to_string(ref.source_span.end);
                if (ref.subsection) meta.entries["subsection"] = *ref.subsection;
                if (ref.sentence) meta.entries["sentence"] = *ref.sentence;
                if (ref.item) meta.entries["item"] = *ref.item;
                graph.add_edge(source, target, refers_to, std::move(meta));
            }
            result.references.push_back({doc.id, ref});
        }

        for (const auto& mention : extractions[d].concept_mentions) note_participant(mention.span, mention.entity);

        // Outside case descriptions the enclosing unit takes part in its windows.
        if (doc.kind != DocumentKind::case_description) {
            for (auto& [w, members] : windows) {
                if (const UnitPath* unit = window_unit[w]) {
                    members.insert(EntityId(unit_entity_id(doc.id, unit->unit->id)));
                }
            }
        }

        std::set<std::pair<EntityId, EntityId>> sharing;
        for (const auto& [w, members] : windows) {
            for (auto a = members.begin(); a != members.end(); ++a) {
                for (auto b = std::next(a); b != members.end(); ++b) sharing.emplace(*a, *b);
            }
        }
        const std::vector<std::pair<EntityId, EntityId>> pairs(sharing.begin(), sharing.end());
        const std::string doc_id = doc.id.str();
        apply_mapping(graph,
                      [&](const MappingEndpoint& from, const MappingEndpoint& to) -> std::vector<MappedRelation> {
                          if (!sharing.contains({from.entity.id, to.entity.id})) return {};
                          RelationMetadata meta;
                          meta.provenance = Provenance::from_extractor(std::string(kCoOccurrenceExtractor));
                          meta.entries["document"] = doc_id;
                          return {MappedRelation{co_occurs, std::move(meta)}};
                      },
                      pairs);
    }

    induce_relations(graph, part_of, refers_to);
    return result;
}

}  // namespace semtour
