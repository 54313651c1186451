#include "vsm/geometry.hpp"

namespace vsm {

std::string_view to_string(TruthMode m) noexcept {
  return m == TruthMode::Strict ? "strict" : "approximate";
}

TruthMode truth_mode_from_string(std::string_view s) {
  if (s == "strict") return TruthMode::Strict;
  if (s == "approximate") return TruthMode::Approximate;
  throw std::invalid_argument("unknown truth mode '" + std::string(s) + "'");
}

}  // namespace vsm
