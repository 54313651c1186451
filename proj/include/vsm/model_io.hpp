// JSON documents for vector models:
//   {"dimension": N, "delta": d, "mode": "approximate",
//    "points": {"a": [..N floats..], ...},
//    "predicates": {"P": {"dims": [...], "direction": [...]}, ...}}
// Names are resolved against a KnowledgeBase so the model's column order
// matches the KB's term order.

#ifndef VSM_MODEL_IO_HPP
#define VSM_MODEL_IO_HPP

#include <json.hpp>

#include <string>
#include <string_view>

#include "vsm/geometry.hpp"
#include "vsm/logic.hpp"

namespace vsm {

nlohmann::ordered_json model_to_json(const VectorModel& m, const KnowledgeBase& kb);
VectorModel model_from_json(const nlohmann::json& doc, const KnowledgeBase& kb);

std::string write_model(const VectorModel& m, const KnowledgeBase& kb);
VectorModel read_model(std::string_view text, const KnowledgeBase& kb);

}  // namespace vsm

#endif  // VSM_MODEL_IO_HPP
