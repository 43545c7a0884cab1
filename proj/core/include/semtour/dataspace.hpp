#pragma once

// Data space: data points grouped into datasets, and the four operators that
// turn selections of them into sequenced scenes (select, stage, sequence,
// transition).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "semtour/enum_names.hpp"
#include "semtour/ids.hpp"

namespace semtour {

enum class DataPointKind { token, expression, concept_, paragraph, section, document, law };

template <>
struct EnumNames<DataPointKind> {
    static constexpr std::array<std::string_view, 7> names = {
        "token", "expression", "concept", "paragraph", "section", "document", "law"};
};

// Half-open byte range [start, end) into a document's UTF-8 text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const noexcept { return end - start; }
    bool contains(const Span& other) const noexcept {
        return start <= other.start && other.end <= end;
    }
    bool overlaps(const Span& other) const noexcept {
        return start < other.end && other.start < end;
    }
    friend auto operator<=>(const Span&, const Span&) = default;
};

struct Locator {
    DocumentId document;
    Span span;
    std::vector<std::string> unit_path;  // outermost unit first

    friend bool operator==(const Locator&, const Locator&) = default;
};

struct DataPoint {
    DataPointId id;
    DatasetId dataset_id;
    DataPointKind kind = DataPointKind::token;
    std::string payload;
    std::optional<Locator> locator;
    std::uint32_t granularity = 0;  // 0 = token level

    friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

struct Dataset {
    DatasetId id;
    std::string name;
    std::set<DataPointId> member_ids;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Owns every data point; a point belongs to exactly one dataset.
class DataStore {
public:
    void add_dataset(Dataset dataset);
    void add_point(DataPoint point);

    const DataPoint* find_point(const DataPointId& id) const;
    const Dataset* find_dataset(const DatasetId& id) const;
    bool has_point(const DataPointId& id) const { return points_.contains(id); }

    const std::map<DataPointId, DataPoint>& points() const noexcept { return points_; }
    const std::map<DatasetId, Dataset>& datasets() const noexcept { return datasets_; }

    std::set<DataPointId> union_ids() const;

    friend bool operator==(const DataStore&, const DataStore&) = default;

private:
    std::map<DataPointId, DataPoint> points_;
    std::map<DatasetId, Dataset> datasets_;
};

struct Selection {
    std::set<DataPointId> member_ids;

    bool empty() const noexcept { return member_ids.empty(); }
    bool contains(const DataPointId& id) const { return member_ids.contains(id); }
    friend bool operator==(const Selection&, const Selection&) = default;
};

enum class ViewKind { text, treemap, icicle, entity_card };

template <>
struct EnumNames<ViewKind> {
    static constexpr std::array<std::string_view, 4> names = {"text", "treemap", "icicle",
                                                              "entity_card"};
};

struct Viewport {
    double x = 0.0;
    double y = 0.0;
    double width = 1.0;
    double height = 1.0;

    friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct Highlight {
    DataPointId point;
    std::string color;

    friend bool operator==(const Highlight&, const Highlight&) = default;
};

struct StagingConfig {
    ViewKind view_kind = ViewKind::text;
    Viewport viewport;
    double zoom = 1.0;
    std::vector<Highlight> highlights;
    std::map<std::string, std::string> layout_hints;

    friend bool operator==(const StagingConfig&, const StagingConfig&) = default;
};

struct Scene {
    SceneId id;
    Selection selection;
    StagingConfig staging;
    std::optional<std::size_t> seq_index;

    friend bool operator==(const Scene&, const Scene&) = default;
};

struct Transition {
    SceneId from;
    SceneId to;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct LinearTour {
    TourId id;
    std::vector<Scene> scenes;
    std::vector<Transition> transitions;

    friend bool operator==(const LinearTour&, const LinearTour&) = default;
};

using DataPointPredicate = std::function<bool(const DataPoint&)>;

// Selection operator: every point of the store (or of the given datasets)
// satisfying the predicate.
Selection select(const DataStore& store, const DataPointPredicate& predicate);
Selection select(const DataStore& store, std::span<const DatasetId> datasets,
                 const DataPointPredicate& predicate);

// Staging operator. Throws HighlightOutsideSelection when a highlight names a
// point outside the selection, InvalidArgument for a non-positive zoom.
Scene stage(Selection selection, StagingConfig config, SceneId id);

// Fresh scene ids: "scene-1", "scene-2", ... Thread-safe.
SceneId next_scene_id();
Scene stage(Selection selection, StagingConfig config);

bool equal_modulo_id(const Scene& a, const Scene& b);

// Sequencing operator: seq_index = list position (0-based).
std::vector<Scene> sequence_scenes(std::vector<Scene> scenes);

// Sequences the scenes in the given order and connects consecutive ones.
LinearTour make_linear_tour(TourId id, std::vector<Scene> scenes);

// Transition operator: the scene with seq_index + 1, or nullopt at the end.
std::optional<Scene> transition_next(const LinearTour& tour, const SceneId& scene_id);

}  // namespace semtour
