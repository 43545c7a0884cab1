#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace semtour {

// Specialize with `static constexpr std::array<std::string_view, N> names`
// listing the wire names in enumerator order.
template <typename E>
struct EnumNames;

template <typename E>
constexpr std::string_view enum_name(E value) {
    const auto& names = EnumNames<E>::names;
    const auto index = static_cast<std::size_t>(value);
    return index < names.size() ? names[index] : std::string_view{"?"};
}

template <typename E>
constexpr std::optional<E> enum_from_name(std::string_view name) {
    const auto& names = EnumNames<E>::names;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<E>(i);
    }
    return std::nullopt;
}

template <typename E>
constexpr std::size_t enum_count() {
    return EnumNames<E>::names.size();
}

}  // namespace semtour
