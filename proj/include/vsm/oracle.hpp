// Brute-force classical semantics over the KB's own terms.
//
// A structure assigns each predicate a subset of terms x terms and is stored
// as a bitmask, bit (p * n + head) * n + tail. Structures are enumerated in
// increasing mask order. "Entailed" means true in every satisfying
// structure over exactly these terms; with none, everything is entailed.

#ifndef VSM_ORACLE_HPP
#define VSM_ORACLE_HPP

#include <array>
#include <cstdint>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsm/ensemble.hpp"
#include "vsm/geometry.hpp"
#include "vsm/inference.hpp"
#include "vsm/logic.hpp"

namespace vsm {

inline constexpr std::size_t kOracleBitCap = 24;

class OracleCapExceeded : public std::runtime_error {
 public:
  explicit OracleCapExceeded(std::size_t required_bits);
  std::size_t required_bits() const noexcept { return required_bits_; }

 private:
  std::size_t required_bits_;
};

/// |terms|^2 * |predicates|.
std::size_t required_bits(const KnowledgeBase& kb) noexcept;
/// Throws OracleCapExceeded when required_bits(kb) > kOracleBitCap.
void check_oracle_cap(const KnowledgeBase& kb);

struct FiniteStructure {
  std::size_t num_terms = 0;
  std::size_t num_predicates = 0;
  std::uint64_t bits = 0;

  std::size_t bit_index(PredId p, TermId head, TermId tail) const noexcept {
    return (index(p) * num_terms + index(head)) * num_terms + index(tail);
  }
  bool holds(PredId p, TermId head, TermId tail) const noexcept { return (bits >> bit_index(p, head, tail)) & 1U; }
  void set(PredId p, TermId head, TermId tail, bool value) noexcept;

  /// Extensions read off a model's atom truth table.
  static FiniteStructure from_induced(const InducedRelations& r);
  bool operator==(const FiniteStructure&) const = default;
};

/// Standard recursive truth over the structure; quantifiers range over all
/// of its terms.
bool evaluate_classical(const FiniteStructure& s, const Formula& f);
/// Triples, unrolled axioms and constraints all hold.
bool structure_satisfies(const FiniteStructure& s, const KnowledgeBase& kb);

/// Lazy range over satisfying structures. Triple bits are pinned, the rest
/// are counted up in mask order and filtered by axioms and constraints.
class SatisfyingStructures {
 public:
  explicit SatisfyingStructures(const KnowledgeBase& kb);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = FiniteStructure;
    using difference_type = std::ptrdiff_t;
    using pointer = const FiniteStructure*;
    using reference = const FiniteStructure&;

    iterator() = default;
    reference operator*() const noexcept { return current_; }
    pointer operator->() const noexcept { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    friend bool operator==(const iterator& a, const iterator& b) noexcept { return a.done_ == b.done_ && (a.done_ || a.free_ == b.free_); }

   private:
    friend class SatisfyingStructures;
    iterator(const SatisfyingStructures* owner, bool done);
    void settle();
    bool advance_raw();

    const SatisfyingStructures* owner_ = nullptr;
    std::uint64_t free_ = 0;  // current assignment of the free bits
    FiniteStructure current_;
    bool done_ = true;
  };

  iterator begin() const { return iterator(this, false); }
  iterator end() const { return iterator(this, true); }

 private:
  const KnowledgeBase* kb_;
  std::uint64_t pinned_ = 0;
  std::uint64_t free_mask_ = 0;
};

SatisfyingStructures enumerate_satisfying(const KnowledgeBase& kb);
/// All satisfying structures, materialized.
std::vector<FiniteStructure> satisfying_structures(const KnowledgeBase& kb);

enum class OracleStatus { Entailed, RefutedInAll, Contingent };
std::string_view to_string(OracleStatus s) noexcept;

bool classical_entails(const KnowledgeBase& kb, const Formula& f);
OracleStatus classical_status(const KnowledgeBase& kb, const Formula& f);
/// Same, against a precomputed set of satisfying structures.
OracleStatus classical_status(std::span<const FiniteStructure> models, const Formula& f);

struct ComparisonRow {
  std::string query;    // name, with [term] for expanded binding queries
  std::string formula;  // printed closed formula
  QueryVerdict verdict;
  OracleStatus status;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  /// counts[verdict][status] in enum order.
  std::array<std::array<std::size_t, 3>, 3> counts{};
  std::size_t satisfying_structures = 0;
  std::vector<std::size_t> generalization_hits;    // rows: TRUE on contingent
  std::vector<std::size_t> soundness_violations;   // rows: TRUE on refuted-in-all

  std::size_t total() const noexcept;
  double generalization_rate() const noexcept;
  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
};

/// Binding queries are expanded into one closed query per term.
ComparisonReport compare(const Ensemble& e, const KnowledgeBase& kb, std::span<const NamedQuery> queries);

}  // namespace vsm

#endif  // VSM_ORACLE_HPP
