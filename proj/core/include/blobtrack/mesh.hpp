#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace blobtrack {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

// A point in the poloidal (r, z) plane.
struct Point2 {
  double r = 0.0;
  double z = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

using Triangle = std::array<VertexId, 3>;
// Undirected edge stored as (min, max).
using Edge = std::array<VertexId, 2>;

// Triangulated measurement grid. `edges` is derived by build_edges() and is
// empty until then.
struct TriMesh {
  std::vector<Point2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  std::size_t edge_count() const { return edges.size(); }
};

// Axis-aligned box in (r, z). Bounds are inclusive.
struct RegionOfInterest {
  double r_min = 0.0;
  double r_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  bool contains(const Point2& p) const {
    return p.r >= r_min && p.r <= r_max && p.z >= z_min && p.z <= z_max;
  }
  // Throws ArgumentError unless r_min < r_max and z_min < z_max.
  void validate() const;
};

// Per-vertex scalar field at one (time, plane) coordinate.
struct Frame {
  std::int64_t time_index = 0;
  int plane_index = 0;
  double dt = 0.0;  // seconds between consecutive time indices
  std::vector<double> values;
};

// Throws StructuralError if a triangle references a vertex out of range or
// repeats a vertex.
void validate_topology(const TriMesh& mesh);

struct EdgeBuild {
  TriMesh mesh;
  // For triangle t = (a, b, c): indices into mesh.edges of (a,b), (b,c), (c,a).
  std::vector<std::array<std::uint32_t, 3>> triangle_edges;
};

// Derive the sorted unique undirected edge list.
EdgeBuild build_edges(TriMesh mesh);

// Precomputed 4-way refinement of a fixed mesh. Topology work happens once in
// the constructor; apply() only interpolates a field, so frames sharing a mesh
// can be refined cheaply.
class Refinement {
 public:
  Refinement(const TriMesh& mesh, int levels);

  const TriMesh& mesh() const { return refined_; }
  int levels() const { return static_cast<int>(steps_.size()); }
  std::size_t source_vertex_count() const { return source_vertex_count_; }

  // Interpolate a field given on the source mesh onto the refined mesh.
  std::vector<double> apply(std::span<const double> field) const;

 private:
  struct Step {
    std::size_t vertex_count = 0;  // vertices before this level
    std::vector<Edge> edges;       // new vertex (vertex_count + i) sits on edges[i]
  };

  std::size_t source_vertex_count_ = 0;
  std::vector<Step> steps_;
  TriMesh refined_;
};

struct RefinedMesh {
  TriMesh mesh;
  std::vector<double> field;
};

// Split every triangle into four through its edge midpoints, `levels` times.
// New vertices carry the mean of the edge endpoints' values; original
// vertices keep their indices and values.
RefinedMesh refine(const TriMesh& mesh, std::span<const double> field, int levels);

struct Restriction {
  TriMesh mesh;                       // edges populated
  std::vector<VertexId> old_to_new;   // kNoVertex for dropped vertices
  std::vector<VertexId> new_to_old;
};

// Keep the vertices inside `roi` and the triangles whose three vertices all
// survive.
Restriction restrict_to(const TriMesh& mesh, const RegionOfInterest& roi);

// Gather a full-mesh field onto the restricted vertex set.
std::vector<double> restrict_field(const Restriction& restriction,
                                   std::span<const double> field);

// Structured nr x nz grid over [r0, r1] x [z0, z1], two triangles per cell.
TriMesh make_grid_mesh(double r0, double r1, double z0, double z1,
                       std::size_t nr, std::size_t nz);

}  // namespace blobtrack
