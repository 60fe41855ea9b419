#include "aer/shape.hpp"

namespace aer {

const char* to_string(ConstraintClass c) noexcept {
  switch (c) {
    case ConstraintClass::none: return "none";
    case ConstraintClass::monotone: return "monotone";
    case ConstraintClass::convex: return "convex";
    case ConstraintClass::concave: return "concave";
  }
  return "none";
}

std::optional<ConstraintClass> parse_constraint_class(std::string_view name) noexcept {
  if (name == "none") return ConstraintClass::none;
  if (name == "monotone") return ConstraintClass::monotone;
  if (name == "convex") return ConstraintClass::convex;
  if (name == "concave") return ConstraintClass::concave;
  return std::nullopt;
}

}  // namespace aer
