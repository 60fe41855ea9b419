#pragma once

#include <optional>
#include <string_view>

namespace aer {

/// Shape prior on the source. Convex means nonnegative second differences,
/// concave nonpositive ones.
enum class ConstraintClass { none, monotone, convex, concave };

const char* to_string(ConstraintClass c) noexcept;
std::optional<ConstraintClass> parse_constraint_class(std::string_view name) noexcept;

}  // namespace aer
