#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blobtrack/mesh.hpp"

namespace blobtrack {

struct WeightedPoint {
  Point2 position;
  double weight = 0.0;  // density
};

// Density-weighted mean position. Throws NumericalError when the summed
// weight is not positive.
Point2 weighted_center(std::span<const WeightedPoint> points);

// Andrew's monotone chain. Returns the extreme points in counter-clockwise
// order starting from the lowest-r (then lowest-z) point; collinear boundary
// points are dropped. One distinct point gives a single point, collinear input
// gives the two segment endpoints.
std::vector<Point2> convex_hull(std::span<const Point2> points);

// Shoelace area of a simple polygon (positive for counter-clockwise).
double polygon_area(std::span<const Point2> polygon);

struct BlobSummary {
  Point2 center;
  std::vector<Point2> hull;
  std::size_t area = 0;        // member vertex count
  double mass = 0.0;           // summed density over members
  double hull_area = 0.0;      // polygon area of the hull, for plotting only
};

inline std::size_t blob_area(std::span<const VertexId> members) { return members.size(); }

// Center, hull and area of a blob whose members index `mesh` and `density`.
BlobSummary summarize(const TriMesh& mesh, std::span<const double> density,
                      std::span<const VertexId> members);

}  // namespace blobtrack
