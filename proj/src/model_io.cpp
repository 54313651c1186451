#include "vsm/model_io.hpp"

#include <stdexcept>

namespace vsm {

nlohmann::ordered_json model_to_json(const VectorModel& m, const KnowledgeBase& kb) {
  check_coverage(m, kb);
  nlohmann::ordered_json doc;
  doc["dimension"] = m.dimension();
  doc["delta"] = m.delta();
  doc["mode"] = std::string(to_string(m.mode()));
  doc["angle_tolerance"] = m.angle_tolerance();
  auto& points = doc["points"] = nlohmann::ordered_json::object();
  for (TermId t : kb.domain()) {
    auto col = m.point(t);
    points[kb.name(t)] = std::vector<double>(col.data(), col.data() + col.size());
  }
  auto& preds = doc["predicates"] = nlohmann::ordered_json::object();
  for (std::size_t p = 0; p < kb.num_predicates(); ++p) {
    const auto& rel = m.relation(pred_id(p));
    preds[kb.name(pred_id(p))] = {
        {"dims", rel.dims},
        {"direction", std::vector<double>(rel.direction.data(), rel.direction.data() + rel.direction.size())}};
  }
  return doc;
}

VectorModel model_from_json(const nlohmann::json& doc, const KnowledgeBase& kb) {
  const auto n_dims = doc.at("dimension").get<Eigen::Index>();
  if (n_dims < 1) throw std::invalid_argument("model dimension must be positive");
  const auto& points = doc.at("points");
  const auto& preds = doc.at("predicates");
  if (points.size() != kb.num_terms() || preds.size() != kb.num_predicates()) {
    throw std::invalid_argument("model symbols do not match the knowledge base");
  }
  Eigen::MatrixXd cols(n_dims, static_cast<Eigen::Index>(kb.num_terms()));
  for (TermId t : kb.domain()) {
    const auto& name = kb.name(t);
    if (!points.contains(name)) throw std::invalid_argument("model has no point for term '" + name + "'");
    auto values = points.at(name).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != n_dims) {
      throw std::invalid_argument("point for '" + name + "' has the wrong length");
    }
    cols.col(static_cast<Eigen::Index>(index(t))) = Eigen::Map<const Eigen::VectorXd>(values.data(), n_dims);
  }
  std::vector<PredicateEmbedding> rels;
  for (std::size_t p = 0; p < kb.num_predicates(); ++p) {
    const auto& name = kb.name(pred_id(p));
    if (!preds.contains(name)) throw std::invalid_argument("model has no embedding for predicate '" + name + "'");
    const auto& entry = preds.at(name);
    PredicateEmbedding e;
    e.dims = entry.at("dims").get<std::vector<Eigen::Index>>();
    auto dir = entry.at("direction").get<std::vector<double>>();
    e.direction = Eigen::Map<const Eigen::VectorXd>(dir.data(), static_cast<Eigen::Index>(dir.size()));
    rels.push_back(std::move(e));
  }
  return VectorModel(std::move(cols), std::move(rels), doc.at("delta").get<double>(),
                     truth_mode_from_string(doc.at("mode").get<std::string>()),
                     doc.value("angle_tolerance", 1e-6));
}

std::string write_model(const VectorModel& m, const KnowledgeBase& kb) { return model_to_json(m, kb).dump(2) + "\n"; }

VectorModel read_model(std::string_view text, const KnowledgeBase& kb) {
  return model_from_json(nlohmann::json::parse(text), kb);
}

}  // namespace vsm
