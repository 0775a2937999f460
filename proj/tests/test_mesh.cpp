#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "blobtrack/error.hpp"
#include "blobtrack/mesh.hpp"
#include "support/random_mesh.hpp"

using namespace blobtrack;
using blobtrack::testing::brute_force_edges;
using blobtrack::testing::random_disk_mesh;
using blobtrack::testing::random_mesh;

namespace {

TriMesh unit_triangle() {
  TriMesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  return m;
}

TriMesh two_triangles() {
  TriMesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  m.triangles = {{0, 1, 2}, {1, 2, 3}};
  return m;
}

std::vector<double> random_field(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> f(n);
  for (auto& x : f) x = u(rng);
  return f;
}

}  // namespace

TEST_CASE("build_edges: single triangle has three sorted edges") {
  const auto built = build_edges(unit_triangle());
  CHECK(built.mesh.edges == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(built.triangle_edges[0] == std::array<std::uint32_t, 3>{0, 2, 1});
}

TEST_CASE("build_edges: shared edge is counted once") {
  const auto built = build_edges(two_triangles());
  CHECK(built.mesh.edge_count() == 5);
}

TEST_CASE("build_edges: matches brute-force enumeration on random meshes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    testing::RandomMeshOptions opt;
    opt.max_triangles = 100;
    const auto mesh = random_mesh(rng, opt);
    const auto built = build_edges(mesh);
    const auto oracle = brute_force_edges(mesh);
    REQUIRE(built.mesh.edges.size() == oracle.size());
    std::size_t i = 0;
    for (const auto& [a, b] : oracle) {
      CHECK(built.mesh.edges[i] == Edge{a, b});
      ++i;
    }
    // The per-triangle map points at the right edge.
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      for (int s = 0; s < 3; ++s) {
        const auto a = mesh.triangles[t][s];
        const auto b = mesh.triangles[t][(s + 1) % 3];
        CHECK(built.mesh.edges[built.triangle_edges[t][s]] == Edge{std::min(a, b), std::max(a, b)});
      }
    }
  }
}

TEST_CASE("build_edges: idempotent and independent of triangle order") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto mesh = random_mesh(rng);
    const auto once = build_edges(mesh).mesh.edges;
    CHECK(build_edges(build_edges(mesh).mesh).mesh.edges == once);
    std::shuffle(mesh.triangles.begin(), mesh.triangles.end(), rng);
    CHECK(build_edges(mesh).mesh.edges == once);
  }
}

TEST_CASE("build_edges: out-of-range vertex names the triangle") {
  TriMesh m = two_triangles();
  m.triangles[1][2] = 9;
  try {
    build_edges(m);
    FAIL("expected StructuralError");
  } catch (const StructuralError& e) {
    CHECK(std::string(e.what()).find("triangle 1") != std::string::npos);
  }
  m.triangles[1] = {1, 1, 2};
  CHECK_THROWS_AS(build_edges(m), StructuralError);
}

TEST_CASE("refine: single triangle, one level") {
  const auto out = refine(unit_triangle(), std::vector<double>{1, 2, 3}, 1);
  REQUIRE(out.mesh.vertex_count() == 6);
  CHECK(out.mesh.triangle_count() == 4);
  CHECK(out.field == std::vector<double>{1, 2, 3, 1.5, 2.0, 2.5});
  CHECK(out.mesh.vertices[3] == Point2{0.5, 0.0});
  CHECK(out.mesh.vertices[4] == Point2{0.0, 0.5});
  CHECK(out.mesh.vertices[5] == Point2{0.5, 0.5});
}

TEST_CASE("refine: two levels equal one level applied twice") {
  const auto mesh = two_triangles();
  const std::vector<double> field{1.0, -2.0, 4.0, 0.25};
  const auto twice = refine(refine(mesh, field, 1).mesh, refine(mesh, field, 1).field, 1);
  const auto direct = refine(mesh, field, 2);
  CHECK(direct.mesh.triangle_count() == 16 * mesh.triangle_count());
  CHECK(direct.mesh.vertices == twice.mesh.vertices);
  CHECK(direct.mesh.triangles == twice.mesh.triangles);
  CHECK(direct.field == twice.field);
  for (std::size_t v = 0; v < field.size(); ++v) CHECK(direct.field[v] == field[v]);
}

TEST_CASE("refine: argument and structural errors") {
  CHECK_THROWS_AS(refine(unit_triangle(), std::vector<double>{1, 2, 3}, 0), ArgumentError);
  CHECK_THROWS_AS(refine(TriMesh{}, std::vector<double>{}, 1), StructuralError);
  CHECK_THROWS_AS(refine(unit_triangle(), std::vector<double>{1, 2}, 1), ArgumentError);
}

TEST_CASE("refine: counting identities and field preservation on random meshes") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mesh = build_edges(random_mesh(rng)).mesh;
    const auto field = random_field(rng, mesh.vertex_count());
    const auto out = refine(mesh, field, 1);
    const auto V = mesh.vertex_count(), E = mesh.edge_count(), T = mesh.triangle_count();
    CHECK(out.mesh.vertex_count() == V + E);
    CHECK(out.mesh.triangle_count() == 4 * T);
    CHECK(out.mesh.edge_count() == 2 * E + 3 * T);
    const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
    for (std::size_t v = 0; v < out.field.size(); ++v) {
      if (v < V) CHECK(out.field[v] == field[v]);
      CHECK(out.field[v] >= *lo);
      CHECK(out.field[v] <= *hi);
    }
  }
}

TEST_CASE("generated disk meshes have Euler characteristic 1 before and after refinement") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mesh = build_edges(random_disk_mesh(rng)).mesh;
    auto euler = [](const TriMesh& m) {
      return static_cast<long>(m.vertex_count()) - static_cast<long>(m.edge_count()) +
             static_cast<long>(m.triangle_count());
    };
    CHECK(euler(mesh) == 1);
    CHECK(euler(refine(mesh, std::vector<double>(mesh.vertex_count(), 1.0), 2).mesh) == 1);
  }
  const auto grid = make_grid_mesh(0, 1, 0, 1, 7, 5);
  CHECK(grid.vertex_count() + grid.triangle_count() == grid.edge_count() + 1);
}

TEST_CASE("restrict_to: whole mesh is the identity") {
  const auto mesh = make_grid_mesh(0, 1, 0, 1, 5, 5);
  const auto r = restrict_to(mesh, {-1, 2, -1, 2});
  CHECK(r.mesh.vertices == mesh.vertices);
  CHECK(r.mesh.triangles == mesh.triangles);
  CHECK(r.mesh.edges == mesh.edges);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) CHECK(r.old_to_new[v] == v);
}

TEST_CASE("restrict_to: empty result and invalid box are errors") {
  const auto mesh = make_grid_mesh(0, 1, 0, 1, 5, 5);
  CHECK_THROWS_WITH_AS(restrict_to(mesh, {5, 6, 5, 6}), "ROI excludes entire mesh", StructuralError);
  CHECK_THROWS_AS(restrict_to(mesh, {1, 0, 0, 1}), ArgumentError);
}

TEST_CASE("restrict_to: left half matches point-in-box filter and edge filtering") {
  const auto mesh = make_grid_mesh(0, 1, 0, 1, 11, 11);
  const RegionOfInterest roi{0.0, 0.5, 0.0, 1.0};
  const auto r = restrict_to(mesh, roi);

  std::vector<VertexId> expected;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const auto& p = mesh.vertices[v];
    if (p.r >= 0.0 && p.r <= 0.5 && p.z >= 0.0 && p.z <= 1.0) expected.push_back(static_cast<VertexId>(v));
  }
  CHECK(r.new_to_old == expected);

  // Oracle: full-mesh edges that lie on a surviving triangle, remapped.
  std::set<std::pair<VertexId, VertexId>> oracle;
  for (const auto& t : mesh.triangles) {
    if (r.old_to_new[t[0]] == kNoVertex || r.old_to_new[t[1]] == kNoVertex || r.old_to_new[t[2]] == kNoVertex) continue;
    for (int s = 0; s < 3; ++s) {
      const auto a = r.old_to_new[t[s]];
      const auto b = r.old_to_new[t[(s + 1) % 3]];
      oracle.insert({std::min(a, b), std::max(a, b)});
    }
  }
  REQUIRE(r.mesh.edges.size() == oracle.size());
  std::size_t i = 0;
  for (const auto& [a, b] : oracle) CHECK(r.mesh.edges[i++] == Edge{a, b});

  std::vector<double> field(mesh.vertex_count());
  for (std::size_t v = 0; v < field.size(); ++v) field[v] = static_cast<double>(v);
  const auto sub = restrict_field(r, field);
  for (std::size_t v = 0; v < sub.size(); ++v) CHECK(sub[v] == static_cast<double>(r.new_to_old[v]));
}

TEST_CASE("restrict_to: random meshes agree with the edge-filter oracle") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mesh = random_mesh(rng);
    double rmax = 0, zmax = 0;
    for (const auto& p : mesh.vertices) {
      rmax = std::max(rmax, p.r);
      zmax = std::max(zmax, p.z);
    }
    const RegionOfInterest roi{-1.0, rmax * 0.6, -1.0, zmax * 0.7};
    Restriction r;
    try {
      r = restrict_to(mesh, roi);
    } catch (const StructuralError&) {
      continue;
    }
    std::set<std::pair<VertexId, VertexId>> oracle;
    for (const auto& t : mesh.triangles) {
      if (!roi.contains(mesh.vertices[t[0]]) || !roi.contains(mesh.vertices[t[1]]) || !roi.contains(mesh.vertices[t[2]]))
        continue;
      for (int s = 0; s < 3; ++s) {
        const auto a = r.old_to_new[t[s]];
        const auto b = r.old_to_new[t[(s + 1) % 3]];
        oracle.insert({std::min(a, b), std::max(a, b)});
      }
    }
    CHECK(r.mesh.edges.size() == oracle.size());
  }
}
