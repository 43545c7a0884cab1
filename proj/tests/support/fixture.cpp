#include "fixture.hpp"

#include <stdexcept>

#include "semtour/json.hpp"

namespace semtour::testing {

std::filesystem::path fixture_dir() { return SEMTOUR_FIXTURE_DIR; }
std::filesystem::path golden_dir() { return SEMTOUR_GOLDEN_DIR; }
std::filesystem::path manifest_path() { return fixture_dir() / "corpus" / "manifest.json"; }

const Document& Fixture::document(std::string_view id) const {
    for (const auto& d : documents) {
        if (d.id.str() == id) return d;
    }
    throw std::out_of_range("no fixture document " + std::string(id));
}

const Fixture& fixture() {
    static const Fixture instance = [] {
        Fixture f;
        f.manifest = load_manifest(manifest_path());
        f.documents = load_corpus(f.manifest);
        f.config = extractor_config(f.manifest);
        f.build = build_graph(f.documents, f.config, "fixture");
        return f;
    }();
    return instance;
}

std::vector<GoldReference> gold_references() {
    const Json root = parse_json(read_file(fixture_dir() / "corpus" / "references.gold.json"), "gold");
    std::vector<GoldReference> out;
    for (const auto& j : root.at("references")) {
        GoldReference g;
        g.document = DocumentId(j.at("document").get<std::string>());
        g.text = j.at("text").get<std::string>();
        Reference& r = g.reference;
        r.source_span = {j.at("span").at(0).get<std::size_t>(), j.at("span").at(1).get<std::size_t>()};
        r.form = *enum_from_name<ReferenceForm>(j.at("form").get<std::string>());
        r.code = j.at("code").get<std::string>();
        r.section = j.at("section").get<std::string>();
        r.further_sections = j.at("further_sections").get<std::vector<std::string>>();
        auto opt = [&](const char* key) -> std::optional<std::string> {
            if (j.at(key).is_null()) return std::nullopt;
            return j.at(key).get<std::string>();
        };
        r.subsection = opt("subsection");
        r.sentence = opt("sentence");
        r.item = opt("item");
        if (auto resolved = opt("resolved")) r.resolved = EntityId(*resolved);
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace semtour::testing
