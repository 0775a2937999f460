#include "blobtrack/mesh.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "blobtrack/error.hpp"

namespace blobtrack {

void RegionOfInterest::validate() const {
  if (!(r_min < r_max) || !(z_min < z_max)) {
    throw ArgumentError("invalid region of interest: need r_min < r_max and z_min < z_max");
  }
}

void validate_topology(const TriMesh& mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (VertexId v : tri) {
      if (v >= n) {
        throw StructuralError("triangle " + std::to_string(t) + " references vertex " +
                              std::to_string(v) + " but the mesh has " + std::to_string(n) +
                              " vertices");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw StructuralError("triangle " + std::to_string(t) + " repeats a vertex");
    }
  }
}

EdgeBuild build_edges(TriMesh mesh) {
  validate_topology(mesh);

  // Key each directed triangle side by its normalized (min, max) pair and
  // remember which (triangle, slot) it came from.
  const std::size_t sides = mesh.triangles.size() * 3;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(sides);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int s = 0; s < 3; ++s) {
      VertexId a = tri[s];
      VertexId b = tri[(s + 1) % 3];
      if (a > b) std::swap(a, b);
      keyed[t * 3 + s] = {(std::uint64_t{a} << 32) | b, static_cast<std::uint32_t>(t * 3 + s)};
    }
  }
  std::sort(keyed.begin(), keyed.end());

  EdgeBuild out;
  out.triangle_edges.resize(mesh.triangles.size());
  mesh.edges.clear();
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) {
      const auto key = keyed[i].first;
      mesh.edges.push_back({static_cast<VertexId>(key >> 32), static_cast<VertexId>(key & 0xffffffffu)});
    }
    const auto side = keyed[i].second;
    out.triangle_edges[side / 3][side % 3] = static_cast<std::uint32_t>(mesh.edges.size() - 1);
  }
  out.mesh = std::move(mesh);
  return out;
}

Refinement::Refinement(const TriMesh& mesh, int levels) : source_vertex_count_(mesh.vertex_count()) {
  if (levels < 1) throw ArgumentError("refinement levels must be >= 1");
  if (mesh.vertices.empty() || mesh.triangles.empty()) {
    throw StructuralError("cannot refine an empty mesh");
  }

  TriMesh current = mesh;
  for (int level = 0; level < levels; ++level) {
    auto built = build_edges(std::move(current));
    TriMesh& m = built.mesh;
    const auto base = static_cast<VertexId>(m.vertices.size());

    TriMesh next;
    next.vertices = m.vertices;
    next.vertices.reserve(m.vertices.size() + m.edges.size());
    for (const auto& e : m.edges) {
      const auto& a = m.vertices[e[0]];
      const auto& b = m.vertices[e[1]];
      next.vertices.push_back({0.5 * (a.r + b.r), 0.5 * (a.z + b.z)});
    }

    next.triangles.reserve(m.triangles.size() * 4);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      const auto& tri = m.triangles[t];
      const auto& te = built.triangle_edges[t];
      const VertexId mab = base + te[0];
      const VertexId mbc = base + te[1];
      const VertexId mca = base + te[2];
      next.triangles.push_back({tri[0], mab, mca});
      next.triangles.push_back({mab, tri[1], mbc});
      next.triangles.push_back({mca, mbc, tri[2]});
      next.triangles.push_back({mab, mbc, mca});
    }

    steps_.push_back(Step{m.vertices.size(), std::move(m.edges)});
    current = std::move(next);
  }
  refined_ = build_edges(std::move(current)).mesh;
}

std::vector<double> Refinement::apply(std::span<const double> field) const {
  if (field.size() != source_vertex_count_) {
    throw ArgumentError("field has " + std::to_string(field.size()) + " values, mesh has " +
                        std::to_string(source_vertex_count_) + " vertices");
  }
  std::vector<double> out(refined_.vertex_count());
  std::copy(field.begin(), field.end(), out.begin());
  for (const auto& step : steps_) {
    double* dst = out.data() + step.vertex_count;
    for (std::size_t i = 0; i < step.edges.size(); ++i) {
      dst[i] = 0.5 * (out[step.edges[i][0]] + out[step.edges[i][1]]);
    }
  }
  return out;
}

RefinedMesh refine(const TriMesh& mesh, std::span<const double> field, int levels) {
  if (levels < 1) throw ArgumentError("refinement levels must be >= 1");
  if (field.size() != mesh.vertex_count()) {
    throw ArgumentError("field length does not match vertex count");
  }
  Refinement plan(mesh, levels);
  auto values = plan.apply(field);
  return {plan.mesh(), std::move(values)};
}

Restriction restrict_to(const TriMesh& mesh, const RegionOfInterest& roi) {
  roi.validate();
  validate_topology(mesh);

  Restriction out;
  out.old_to_new.assign(mesh.vertex_count(), kNoVertex);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (roi.contains(mesh.vertices[v])) {
      out.old_to_new[v] = static_cast<VertexId>(out.new_to_old.size());
      out.new_to_old.push_back(static_cast<VertexId>(v));
    }
  }
  if (out.new_to_old.empty()) throw StructuralError("ROI excludes entire mesh");

  TriMesh kept;
  kept.vertices.reserve(out.new_to_old.size());
  for (VertexId old : out.new_to_old) kept.vertices.push_back(mesh.vertices[old]);
  for (const auto& tri : mesh.triangles) {
    const Triangle mapped{out.old_to_new[tri[0]], out.old_to_new[tri[1]], out.old_to_new[tri[2]]};
    if (mapped[0] != kNoVertex && mapped[1] != kNoVertex && mapped[2] != kNoVertex) {
      kept.triangles.push_back(mapped);
    }
  }
  out.mesh = build_edges(std::move(kept)).mesh;
  return out;
}

std::vector<double> restrict_field(const Restriction& restriction, std::span<const double> field) {
  if (field.size() != restriction.old_to_new.size()) {
    throw ArgumentError("field length does not match the unrestricted mesh");
  }
  std::vector<double> out(restriction.new_to_old.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field[restriction.new_to_old[i]];
  return out;
}

TriMesh make_grid_mesh(double r0, double r1, double z0, double z1, std::size_t nr, std::size_t nz) {
  if (nr < 2 || nz < 2) throw ArgumentError("grid mesh needs at least 2 x 2 vertices");
  if (!(r0 < r1) || !(z0 < z1)) throw ArgumentError("grid mesh bounds must be increasing");

  TriMesh mesh;
  mesh.vertices.reserve(nr * nz);
  for (std::size_t j = 0; j < nz; ++j) {
    const double z = z0 + (z1 - z0) * static_cast<double>(j) / static_cast<double>(nz - 1);
    for (std::size_t i = 0; i < nr; ++i) {
      const double r = r0 + (r1 - r0) * static_cast<double>(i) / static_cast<double>(nr - 1);
      mesh.vertices.push_back({r, z});
    }
  }
  mesh.triangles.reserve(2 * (nr - 1) * (nz - 1));
  for (std::size_t j = 0; j + 1 < nz; ++j) {
    for (std::size_t i = 0; i + 1 < nr; ++i) {
      const auto v00 = static_cast<VertexId>(j * nr + i);
      const auto v10 = v00 + 1;
      const auto v01 = static_cast<VertexId>(v00 + nr);
      const auto v11 = v01 + 1;
      // Alternate the diagonal so the grid has no preferred direction.
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }
  return build_edges(std::move(mesh)).mesh;
}

}  // namespace blobtrack
