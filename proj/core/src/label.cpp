#include "blobtrack/label.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blobtrack/error.hpp"

namespace blobtrack {

VertexLabels label_vertices(const TriMesh& mesh, std::span<const std::uint8_t> candidates) {
  if (candidates.size() != mesh.vertex_count()) {
    throw ArgumentError("candidate mask has " + std::to_string(candidates.size()) +
                        " entries, mesh has " + std::to_string(mesh.vertex_count()) + " vertices");
  }

  VertexLabels out;
  auto& labels = out.labels;
  auto& uf = out.forest;
  labels.assign(mesh.vertex_count(), kNullLabel);

  // Pass 1: scan triangles. Only candidate vertices take part; a triangle
  // with no labeled candidate issues a fresh label, otherwise every candidate
  // takes the minimum root and the other roots are hung under it.
  for (const auto& tri : mesh.triangles) {
    VertexId members[3];
    int n = 0;
    for (VertexId v : tri) {
      if (candidates[v]) members[n++] = v;
    }
    if (n == 0) continue;

    Label roots[3];
    int labeled = 0;
    for (int i = 0; i < n; ++i) {
      if (labels[members[i]] != kNullLabel) roots[labeled++] = uf.find_root(labels[members[i]]);
    }

    Label target;
    if (labeled == 0) {
      target = uf.make_label();
    } else {
      target = *std::min_element(roots, roots + labeled);
      for (int i = 0; i < labeled; ++i) uf.merge_roots(roots[i], target);
    }
    for (int i = 0; i < n; ++i) labels[members[i]] = target;
  }

  // Candidates that no triangle reaches still form singleton components.
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (candidates[v] && labels[v] == kNullLabel) labels[v] = uf.make_label();
  }

  // Pass 2: flatten the forest.
  uf.flatten();

  // Pass 3: final labels, renumbered densely by first appearance.
  std::vector<Label> dense(uf.size(), kNullLabel);
  Label next = 0;
  for (auto& l : labels) {
    if (l == kNullLabel) continue;
    const Label root = uf.parent(l);
    if (dense[root] == kNullLabel) dense[root] = ++next;
    l = dense[root];
  }
  out.component_count = next;
  return out;
}

std::vector<BlobCandidate> label_components(const TriMesh& mesh, std::span<const std::uint8_t> candidates) {
  const auto labeled = label_vertices(mesh, candidates);
  std::vector<BlobCandidate> components(labeled.component_count);
  for (std::size_t i = 0; i < components.size(); ++i) components[i].id = static_cast<Label>(i + 1);
  for (std::size_t v = 0; v < labeled.labels.size(); ++v) {
    const Label l = labeled.labels[v];
    if (l != kNullLabel) components[l - 1].members.push_back(static_cast<VertexId>(v));
  }
  return components;
}

double median(std::span<const double> values) {
  if (values.empty()) throw StatisticsError("median of an empty set");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void compute_medians(std::vector<BlobCandidate>& components, std::span<const double> values) {
  std::vector<double> scratch;
  for (auto& c : components) {
    scratch.clear();
    for (VertexId v : c.members) {
      if (v >= values.size()) throw ArgumentError("component member outside the value array");
      scratch.push_back(values[v]);
    }
    c.median = median(scratch);
  }
}

void BlobParams::validate() const {
  if (min_area < 3) throw ArgumentError("min_area must be >= 3");
  if (!(min_abs_median < max_abs_median)) {
    throw ArgumentError("min_abs_median must be below max_abs_median");
  }
  if (!(min_rel_median > 0.0)) throw ArgumentError("min_rel_median must be > 0");
}

double median_threshold(double mu2, const BlobParams& params) {
  return std::max(params.min_abs_median, std::min(params.min_rel_median * mu2, params.max_abs_median));
}

std::vector<BlobCandidate> accept_blobs(std::vector<BlobCandidate> components, double mu2,
                                        const BlobParams& params) {
  const double threshold = median_threshold(mu2, params);
  std::vector<BlobCandidate> kept;
  for (auto& c : components) {
    if (std::isnan(c.median)) throw ContractError("component " + std::to_string(c.id) + " has no median");
    if (c.vertex_count() >= params.min_area && c.median > threshold) kept.push_back(std::move(c));
  }
  return kept;
}

}  // namespace blobtrack
