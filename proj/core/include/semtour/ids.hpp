#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace semtour {

// String-backed identifier tagged with the domain it belongs to, so an
// EntityId cannot be handed to something expecting an EdgeId.
template <typename Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string value) : value_(std::move(value)) {}
    explicit Id(std::string_view value) : value_(value) {}
    explicit Id(const char* value) : value_(value) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const Id&, const Id&) = default;
    friend bool operator==(const Id&, const Id&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Id& id) { return os << id.value_; }

private:
    std::string value_;
};

using EntityId = Id<struct EntityTag>;
using EdgeId = Id<struct EdgeTag>;
using RelationTypeId = Id<struct RelationTypeTag>;
using DataPointId = Id<struct DataPointTag>;
using DatasetId = Id<struct DatasetTag>;
using DocumentId = Id<struct DocumentTag>;
using SceneId = Id<struct SceneTag>;
using TourId = Id<struct TourTag>;
using SessionId = Id<struct SessionTag>;

}  // namespace semtour

template <typename Tag>
struct std::hash<semtour::Id<Tag>> {
    std::size_t operator()(const semtour::Id<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
