// A set of accepted vector models plus how each was obtained.

#ifndef VSM_ENSEMBLE_HPP
#define VSM_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vsm/geometry.hpp"

namespace vsm {

struct Provenance {
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  double hard_loss = 0.0;
  double disparity = 0.0;
  int iterations = 0;
};

/// One generation attempt, accepted or not.
struct Attempt {
  std::uint64_t seed = 0;
  bool accepted = false;
  std::string reason;  // empty when accepted
};

enum class EnsembleStatus { Complete, Partial };

struct Ensemble {
  std::vector<VectorModel> models;
  std::vector<Provenance> provenance;
  std::vector<Attempt> attempts;
  std::size_t requested = 0;
  EnsembleStatus status = EnsembleStatus::Complete;

  std::size_t size() const noexcept { return models.size(); }
  bool empty() const noexcept { return models.empty(); }
  void add(VectorModel m, Provenance p = {}) {
    models.push_back(std::move(m));
    provenance.push_back(p);
  }
};

}  // namespace vsm

#endif  // VSM_ENSEMBLE_HPP
