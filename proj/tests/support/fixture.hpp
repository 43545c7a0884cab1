#pragma once

// Access to the fixture corpus under tests/fixtures/corpus and the golden
// files under tests/golden.

#include <filesystem>
#include <string>
#include <vector>

#include "semtour/extraction.hpp"
#include "semtour/store.hpp"

namespace semtour::testing {

std::filesystem::path fixture_dir();
std::filesystem::path golden_dir();
std::filesystem::path manifest_path();

struct Fixture {
    CorpusManifest manifest;
    std::vector<Document> documents;
    ExtractorConfig config;
    BuildResult build;

    const Document& document(std::string_view id) const;
};

// Loaded and built once per process.
const Fixture& fixture();

struct GoldReference {
    DocumentId document;
    Reference reference;  // resolved filled from the gold file
    std::string text;
};

std::vector<GoldReference> gold_references();

}  // namespace semtour::testing
