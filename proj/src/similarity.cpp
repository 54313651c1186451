#include "vsm/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace vsm {

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> terms, Eigen::MatrixXd values)
    : terms_(std::move(terms)), values_(std::move(values)) {
  const auto n = static_cast<Eigen::Index>(terms_.size());
  if (values_.rows() != n || values_.cols() != n) throw std::invalid_argument("similarity matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values_(i, i) != 1.0) throw std::invalid_argument("similarity of a term with itself must be 1");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = values_(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("similarity values must lie in [0, 1]");
      if (std::abs(v - values_(j, i)) > 1e-12) throw std::invalid_argument("similarity matrix must be symmetric");
    }
  }
}

SimilarityMatrix jaccard_similarity(const KnowledgeBase& kb) {
  using Feature = std::tuple<std::size_t, int, std::size_t>;  // predicate, role (0 head / 1 tail), other term
  std::vector<std::set<Feature>> features(kb.num_terms());
  for (const auto& t : kb.triples()) {
    features[index(t.head)].emplace(index(t.pred), 0, index(t.tail));
    features[index(t.tail)].emplace(index(t.pred), 1, index(t.head));
  }
  const auto n = static_cast<Eigen::Index>(kb.num_terms());
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = features[static_cast<std::size_t>(i)];
      const auto& b = features[static_cast<std::size_t>(j)];
      std::size_t common = 0;
      for (const auto& f : a) common += b.count(f);
      const std::size_t together = a.size() + b.size() - common;
      s(i, j) = s(j, i) = together == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(together);
    }
  }
  return SimilarityMatrix({kb.term_names().begin(), kb.term_names().end()}, std::move(s));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::string normalized = line;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<std::string> out;
  for (std::string f; in >> f;) out.push_back(f);
  return out;
}

}  // namespace

SimilarityMatrix read_similarity_matrix(std::string_view text, const KnowledgeBase& kb) {
  std::istringstream in{std::string(text)};
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto fields = split_fields(line);
    if (!fields.empty()) rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw std::invalid_argument("similarity file is empty");
  const auto& header = rows.front();
  if (header.size() != kb.num_terms() || rows.size() != header.size() + 1) {
    throw std::invalid_argument("similarity matrix must list every KB term exactly once");
  }
  std::vector<std::size_t> to_kb(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto t = kb.find_term(header[i]);
    if (!t) throw std::invalid_argument("similarity matrix names unknown term '" + header[i] + "'");
    to_kb[i] = index(*t);
  }
  const auto n = static_cast<Eigen::Index>(header.size());
  Eigen::MatrixXd s(n, n);
  for (std::size_t r = 0; r < header.size(); ++r) {
    const auto& row = rows[r + 1];
    if (row.size() != header.size()) throw std::invalid_argument("similarity matrix row has the wrong length");
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::size_t used = 0;
      double v = std::stod(row[c], &used);
      if (used != row[c].size()) throw std::invalid_argument("malformed number '" + row[c] + "'");
      s(static_cast<Eigen::Index>(to_kb[r]), static_cast<Eigen::Index>(to_kb[c])) = v;
    }
  }
  return SimilarityMatrix({kb.term_names().begin(), kb.term_names().end()}, std::move(s));
}

std::string write_similarity_matrix(const SimilarityMatrix& s) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s.terms()[i];
  out << "\n";
  for (Eigen::Index r = 0; r < s.values().rows(); ++r) {
    for (Eigen::Index c = 0; c < s.values().cols(); ++c) out << (c ? "," : "") << s.values()(r, c);
    out << "\n";
  }
  return out.str();
}

std::optional<double> sd_ratio(const SimilarityMatrix& s, const VectorModel& m, TermId a, TermId b) {
  const double numerator = 1.0 - s(a, b);
  const double distance = (m.point(a) - m.point(b)).norm();
  if (distance == 0.0) {
    if (numerator == 0.0) return std::nullopt;
    return std::numeric_limits<double>::infinity();
  }
  return numerator / distance;
}

double pair_disparity(double similarity, double distance, const DisparityOptions& opts) {
  const double numerator = std::max(1.0 - similarity, opts.resolution);
  const double denominator = std::max(distance, opts.resolution);
  if (denominator == 0.0 && numerator == 0.0) return 0.0;
  double sd = denominator == 0.0 ? 1.0 / opts.eps_sd : numerator / denominator;
  sd = std::clamp(sd, opts.eps_sd, 1.0 / opts.eps_sd);
  const double l = std::log(sd);
  return l * l;
}

double disparity_score(const SimilarityMatrix& s, const VectorModel& m, const DisparityOptions& opts) {
  const std::size_t n = m.num_terms();
  if (s.size() != n) throw std::invalid_argument("similarity matrix does not match the model's terms");
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (m.point(term_id(i)) - m.point(term_id(j))).norm();
      total += pair_disparity(s(term_id(i), term_id(j)), d, opts);
    }
  }
  return total / static_cast<double>(n * (n - 1) / 2);
}

bool is_preferred(const SimilarityMatrix& s, const VectorModel& m, double threshold, const DisparityOptions& opts,
                  PreferenceMode mode) {
  if (!(threshold > 0.0)) throw std::invalid_argument("preference threshold must be positive");
  if (mode == PreferenceMode::MeanDisparity) return disparity_score(s, m, opts) < threshold;
  for (std::size_t i = 0; i < m.num_terms(); ++i) {
    for (std::size_t j = i + 1; j < m.num_terms(); ++j) {
      const double d = (m.point(term_id(i)) - m.point(term_id(j))).norm();
      if (!(pair_disparity(s(term_id(i), term_id(j)), d, opts) < threshold)) return false;
    }
  }
  return true;
}

}  // namespace vsm
