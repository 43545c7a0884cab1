#pragma once

// Mapping functions over a legal corpus: the explicit statute-reference
// grammar, lexicon-based concept extraction, and assembly of a knowledge
// graph from a list of documents.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semtour/dataspace.hpp"
#include "semtour/knowledge_graph.hpp"

namespace semtour {

enum class DocumentKind { statute, ruling, case_description, commentary };

template <>
struct EnumNames<DocumentKind> {
    static constexpr std::array<std::string_view, 4> names = {"statute", "ruling", "case_description",
                                                              "commentary"};
};

// Structural unit of a document (law, section, paragraph, ...). Children
// nest inside the parent's span.
struct Unit {
    std::string id;
    std::string label;
    Span span;
    std::vector<Unit> children;

    friend bool operator==(const Unit&, const Unit&) = default;
};

struct Document {
    DocumentId id;
    std::string title;
    DocumentKind kind = DocumentKind::statute;
    // Statute abbreviation used to resolve references without an explicit
    // code. Defaults to the document id when the corpus leaves it out.
    std::string code;
    std::string text;
    std::vector<Unit> units;

    std::string_view slice(const Span& span) const;
    friend bool operator==(const Document&, const Document&) = default;
};

// Throws SchemaError when a unit span leaves the text or its parent.
void validate_document(const Document& document);

// Depth-first list of units together with their ancestor chain.
struct UnitPath {
    const Unit* unit = nullptr;
    std::vector<std::string> path;  // ids from the outermost unit to this one
};
std::vector<UnitPath> flatten_units(const Document& document);

enum class ReferenceForm { section, article };

template <>
struct EnumNames<ReferenceForm> {
    static constexpr std::array<std::string_view, 2> names = {"section", "article"};
};

// One explicit citation such as "§ 224 Abs. 1 Nr. 2 StGB" or "§§ 223, 224 StGB".
struct Reference {
    Span source_span;
    ReferenceForm form = ReferenceForm::section;
    std::string code;  // empty when the citation names no code
    std::string section;
    std::vector<std::string> further_sections;  // list tail of "§§ N, M"
    std::optional<std::string> subsection;      // Abs.
    std::optional<std::string> sentence;        // Satz
    std::optional<std::string> item;            // Nr.
    std::optional<EntityId> resolved;

    friend bool operator==(const Reference&, const Reference&) = default;
};

enum class CoOccurrenceWindow { sentence, unit };

template <>
struct EnumNames<CoOccurrenceWindow> {
    static constexpr std::array<std::string_view, 2> names = {"sentence", "unit"};
};

struct LexiconEntry {
    std::string pattern;  // matched case-insensitively
    std::string label;

    friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

struct ExtractorConfig {
    std::set<std::string> code_whitelist;
    std::vector<LexiconEntry> concept_lexicon;
    CoOccurrenceWindow co_occurrence_window = CoOccurrenceWindow::sentence;

    // Common federal codes (StGB, BGB, GG, ...) and an empty lexicon.
    static ExtractorConfig with_default_codes();
    friend bool operator==(const ExtractorConfig&, const ExtractorConfig&) = default;
};

// Non-overlapping maximal matches of the reference grammar in text order.
// Single left-to-right pass; text that does not parse yields nothing.
std::vector<Reference> parse_references(std::string_view text, const ExtractorConfig& config);

// Section-form or article-form head of a unit label ("§ 223", "Art. 2").
struct NormAddress {
    ReferenceForm form = ReferenceForm::section;
    std::string section;
};
std::optional<NormAddress> parse_norm_label(std::string_view label);

struct Mention {
    EntityId entity;
    Span span;

    friend bool operator==(const Mention&, const Mention&) = default;
};

// Data points and entities found in one document: one entity per structural
// unit and one concept entity per distinct lexicon label that occurs.
struct Extraction {
    std::vector<DataPoint> points;
    std::vector<Entity> entities;
    std::vector<Mention> concept_mentions;  // every lexicon hit, in text order
};

Extraction extract_entities(const Document& document, const ExtractorConfig& config);

std::string unit_entity_id(const DocumentId& document, std::string_view unit_id);
std::string concept_entity_id(std::string_view label);

inline constexpr std::string_view kRefersTo = "refers_to";
inline constexpr std::string_view kPartOf = "part_of";
inline constexpr std::string_view kCoOccurs = "co_occurs";

struct UnresolvedReference {
    DocumentId document;
    Reference reference;
    std::string target;  // "<code> <section>" that failed to resolve
};

struct DocumentReference {
    DocumentId document;
    Reference reference;  // `resolved` set when the first section resolved
};

struct BuildResult {
    KnowledgeGraph graph;
    std::vector<DocumentReference> references;  // every parsed reference, corpus then text order
    std::vector<UnresolvedReference> unresolved;
};

// Entities for every unit and concept; part_of edges along the unit trees,
// refers_to edges for resolved references, co_occurs edges between entities
// sharing a window; then one pass of induce_relations(part_of, refers_to).
BuildResult build_graph(std::span<const Document> corpus, const ExtractorConfig& config,
                        std::string graph_id = "default");

}  // namespace semtour
