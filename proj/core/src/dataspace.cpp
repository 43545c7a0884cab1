#include "semtour/dataspace.hpp"

#include <algorithm>
#include <atomic>
#include <utility>

#include "semtour/error.hpp"

namespace semtour {

void DataStore::add_dataset(Dataset dataset) {
    if (dataset.id.empty()) fail(ErrorCode::InvalidArgument, "dataset id must not be empty");
    if (datasets_.contains(dataset.id)) {
        fail(ErrorCode::DuplicateId, "dataset " + dataset.id.str() + " already exists");
    }
    for (const auto& member : dataset.member_ids) {
        auto it = points_.find(member);
        if (it == points_.end()) {
            fail(ErrorCode::InvalidArgument, "dataset member " + member.str() + " does not exist");
        }
        if (it->second.dataset_id != dataset.id) {
            fail(ErrorCode::InvalidArgument,
                 "data point " + member.str() + " already belongs to " + it->second.dataset_id.str());
        }
    }
    datasets_.emplace(dataset.id, std::move(dataset));
}

void DataStore::add_point(DataPoint point) {
    if (point.id.empty()) fail(ErrorCode::InvalidArgument, "data point id must not be empty");
    if (points_.contains(point.id)) {
        fail(ErrorCode::DuplicateId, "data point " + point.id.str() + " already exists");
    }
    auto ds = datasets_.find(point.dataset_id);
    if (ds == datasets_.end()) {
        fail(ErrorCode::InvalidArgument, "unknown dataset " + point.dataset_id.str());
    }
    if (point.locator && point.locator->span.start >= point.locator->span.end) {
        fail(ErrorCode::InvalidArgument, "data point " + point.id.str() + " has an empty span");
    }
    if (point.kind == DataPointKind::token && point.granularity != 0) {
        fail(ErrorCode::InvalidArgument, "token data points have granularity 0");
    }
    ds->second.member_ids.insert(point.id);
    points_.emplace(point.id, std::move(point));
}

const DataPoint* DataStore::find_point(const DataPointId& id) const {
    auto it = points_.find(id);
    return it == points_.end() ? nullptr : &it->second;
}

const Dataset* DataStore::find_dataset(const DatasetId& id) const {
    auto it = datasets_.find(id);
    return it == datasets_.end() ? nullptr : &it->second;
}

std::set<DataPointId> DataStore::union_ids() const {
    std::set<DataPointId> ids;
    for (const auto& [id, point] : points_) ids.insert(id);
    return ids;
}

Selection select(const DataStore& store, const DataPointPredicate& predicate) {
    Selection selection;
    for (const auto& [id, point] : store.points()) {
        if (predicate(point)) selection.member_ids.insert(id);
    }
    return selection;
}

Selection select(const DataStore& store, std::span<const DatasetId> datasets,
                 const DataPointPredicate& predicate) {
    Selection selection;
    for (const auto& dataset_id : datasets) {
        const Dataset* dataset = store.find_dataset(dataset_id);
        if (!dataset) continue;
        for (const auto& id : dataset->member_ids) {
            if (predicate(*store.find_point(id))) selection.member_ids.insert(id);
        }
    }
    return selection;
}

Scene stage(Selection selection, StagingConfig config, SceneId id) {
    if (!(config.zoom > 0.0)) fail(ErrorCode::InvalidArgument, "zoom must be positive");
    for (const auto& highlight : config.highlights) {
        if (!selection.contains(highlight.point)) {
            fail(ErrorCode::HighlightOutsideSelection,
                 "highlighted point " + highlight.point.str() + " is not selected",
                 {{"point", highlight.point.str()}});
        }
    }
    return Scene{std::move(id), std::move(selection), std::move(config), std::nullopt};
}

SceneId next_scene_id() {
    static std::atomic<std::uint64_t> counter{0};
    return SceneId("scene-" + std::to_string(++counter));
}

Scene stage(Selection selection, StagingConfig config) {
    return stage(std::move(selection), std::move(config), next_scene_id());
}

bool equal_modulo_id(const Scene& a, const Scene& b) {
    return a.selection == b.selection && a.staging == b.staging && a.seq_index == b.seq_index;
}

std::vector<Scene> sequence_scenes(std::vector<Scene> scenes) {
    if (scenes.empty()) fail(ErrorCode::InvalidArgument, "cannot sequence an empty scene list");
    for (const auto& scene : scenes) {
        if (scene.seq_index) {
            fail(ErrorCode::AlreadySequenced, "scene " + scene.id.str() + " is already sequenced",
                 {{"scene", scene.id.str()}});
        }
    }
    for (std::size_t i = 0; i < scenes.size(); ++i) scenes[i].seq_index = i;
    return scenes;
}

LinearTour make_linear_tour(TourId id, std::vector<Scene> scenes) {
    LinearTour tour{std::move(id), sequence_scenes(std::move(scenes)), {}};
    for (std::size_t i = 0; i + 1 < tour.scenes.size(); ++i) {
        tour.transitions.push_back({tour.scenes[i].id, tour.scenes[i + 1].id});
    }
    return tour;
}

std::optional<Scene> transition_next(const LinearTour& tour, const SceneId& scene_id) {
    auto it = std::find_if(tour.scenes.begin(), tour.scenes.end(),
                           [&](const Scene& s) { return s.id == scene_id; });
    if (it == tour.scenes.end()) {
        fail(ErrorCode::UnknownScene, "scene " + scene_id.str() + " is not part of tour " + tour.id.str(),
             {{"scene", scene_id.str()}});
    }
    if (!it->seq_index) return std::nullopt;
    const std::size_t next = *it->seq_index + 1;
    for (const auto& scene : tour.scenes) {
        if (scene.seq_index == next) return scene;
    }
    return std::nullopt;
}

}  // namespace semtour
