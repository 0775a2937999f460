#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "blobtrack/mesh.hpp"

namespace blobtrack {

using Label = std::uint32_t;
inline constexpr Label kNullLabel = 0;

// Disjoint-set forest stored in a single array: parent(l) is the parent label
// of l, roots point to themselves. Label 0 is reserved as "unlabeled".
// Unions always hang the larger root under the smaller one, so parent(l) <= l
// and a single ascending sweep flattens the forest.
class UnionFind {
 public:
  UnionFind() : parent_{kNullLabel} {}

  Label make_label() {
    const auto l = static_cast<Label>(parent_.size());
    parent_.push_back(l);
    return l;
  }
  Label find_root(Label l) const {
    while (parent_[l] != l) l = parent_[l];
    return l;
  }
  // Point both roots at the smaller one and return it.
  Label merge_roots(Label a, Label b) {
    const Label root = a < b ? a : b;
    parent_[a] = root;
    parent_[b] = root;
    return root;
  }
  void flatten() {
    for (std::size_t l = 1; l < parent_.size(); ++l) parent_[l] = parent_[parent_[l]];
  }

  Label parent(Label l) const { return parent_[l]; }
  std::size_t size() const { return parent_.size(); }  // includes the null label

 private:
  std::vector<Label> parent_;
};

// Per-vertex labels after all passes. Non-candidates hold kNullLabel; candidates
// hold dense component ids 1..component_count in order of first appearance.
struct VertexLabels {
  std::vector<Label> labels;
  std::size_t component_count = 0;
  UnionFind forest;  // flattened forest from the scan, kept for inspection
};

// Two-pass labeling over triangles: pass 1 scans triangles and unions the
// candidate vertices of each, pass 2 flattens the forest, pass 3 rewrites
// vertex labels. Candidates not covered by any triangle get their own label.
VertexLabels label_vertices(const TriMesh& mesh, std::span<const std::uint8_t> candidates);

struct BlobCandidate {
  Label id = kNullLabel;
  std::vector<VertexId> members;  // ascending vertex ids
  double median = std::numeric_limits<double>::quiet_NaN();

  std::size_t vertex_count() const { return members.size(); }
};

std::vector<BlobCandidate> label_components(const TriMesh& mesh, std::span<const std::uint8_t> candidates);

// Fill BlobCandidate::median from per-vertex normalized densities.
void compute_medians(std::vector<BlobCandidate>& components, std::span<const double> values);

// Middle order statistic; mean of the middle pair for even lengths.
// Throws StatisticsError on empty input.
double median(std::span<const double> values);

// Component acceptance. Defaults are the reference settings: minArea 3,
// minAbsMden 2.15, minMden 1.3, maxAbsMden 2.75.
struct BlobParams {
  std::size_t min_area = 3;
  double min_abs_median = 2.15;
  double min_rel_median = 1.3;
  double max_abs_median = 2.75;

  void validate() const;
};

// max(min_abs_median, min(min_rel_median * mu2, max_abs_median))
double median_threshold(double mu2, const BlobParams& params);

std::vector<BlobCandidate> accept_blobs(std::vector<BlobCandidate> components, double mu2,
                                        const BlobParams& params);

}  // namespace blobtrack
