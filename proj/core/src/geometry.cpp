#include "blobtrack/geometry.hpp"

#include <algorithm>

#include "blobtrack/error.hpp"

namespace blobtrack {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.r - o.r) * (b.z - o.z) - (a.z - o.z) * (b.r - o.r);
}

}  // namespace

Point2 weighted_center(std::span<const WeightedPoint> points) {
  if (points.empty()) throw ArgumentError("weighted center of an empty set");
  double mass = 0.0;
  double sr = 0.0;
  double sz = 0.0;
  for (const auto& p : points) {
    mass += p.weight;
    sr += p.position.r * p.weight;
    sz += p.position.z * p.weight;
  }
  if (!(mass > 0.0)) throw NumericalError("blob mass is not positive");
  return {sr / mass, sz / mass};
}

std::vector<Point2> convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.r < b.r || (a.r == b.r && a.z < b.z);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const Point2> polygon) {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    twice += a.r * b.z - b.r * a.z;
  }
  return 0.5 * twice;
}

BlobSummary summarize(const TriMesh& mesh, std::span<const double> density, std::span<const VertexId> members) {
  if (members.empty()) throw ArgumentError("blob has no members");
  std::vector<WeightedPoint> weighted;
  std::vector<Point2> positions;
  weighted.reserve(members.size());
  positions.reserve(members.size());
  for (VertexId v : members) {
    if (v >= mesh.vertex_count() || v >= density.size()) {
      throw ArgumentError("blob member outside the mesh");
    }
    weighted.push_back({mesh.vertices[v], density[v]});
    positions.push_back(mesh.vertices[v]);
  }

  BlobSummary s;
  s.center = weighted_center(weighted);
  s.hull = convex_hull(positions);
  s.area = blob_area(members);
  for (const auto& w : weighted) s.mass += w.weight;
  s.hull_area = polygon_area(s.hull);
  return s;
}

}  // namespace blobtrack
