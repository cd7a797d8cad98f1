#include "ccg/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace ccg;

namespace {

const char* kTwoTriangles =
    "# unit square split along the diagonal\n"
    "2 4 2\n"
    "0 0\n1 0\n1 1\n0 1\n"
    "0 1 2\n0 2 3\n";

void check_invariants(const Mesh& m, double domain_measure) {
  double total = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    total += m.cell_measure(c);
    Vec3 closed = Vec3::Zero();
    for (int f : m.cell_faces(c)) closed += m.face(f).measure * m.outward_normal(c, f);
    EXPECT_LT(closed.norm(), 1e-12 * m.cell_diameter(c)) << "cell " << c;
  }
  EXPECT_NEAR(total, domain_measure, 1e-12 * domain_measure);
  int boundary = 0;
  for (int f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.face(f);
    if (face.boundary()) {
      ++boundary;
      EXPECT_GE(face.cells[0], 0);
      EXPECT_NEAR((m.outward_normal(face.cells[0], f) - face.normal).norm(), 0.0, 1e-15);
    } else {
      EXPECT_LT(face.cells[0], face.cells[1]);
      EXPECT_NEAR((m.outward_normal(face.cells[0], f) - face.normal).norm(), 0.0, 1e-15);
      EXPECT_NEAR((m.outward_normal(face.cells[1], f) + face.normal).norm(), 0.0, 1e-15);
      // the normal points from the first cell towards the second
      EXPECT_GT((m.centroid(face.cells[1]) - m.centroid(face.cells[0])).dot(face.normal), 0.0);
    }
  }
  EXPECT_EQ(boundary, m.num_boundary_faces());
}

}  // namespace

TEST(Mesh, StructuredCounts) {
  EXPECT_EQ(generate_structured(2, 32).num_cells(), 2048);
  EXPECT_EQ(generate_structured(3, 8).num_cells(), 3072);
  const Mesh line = generate_structured(1, 4);
  EXPECT_EQ(line.num_cells(), 4);
  EXPECT_EQ(line.num_faces(), 5);
  EXPECT_EQ(line.num_boundary_faces(), 2);
}

TEST(Mesh, RejectsBadDimension) {
  EXPECT_THROW((void)generate_structured(4, 2), std::invalid_argument);
  EXPECT_THROW((void)generate_structured(0, 2), std::invalid_argument);
  EXPECT_THROW((void)generate_structured(2, 0), std::invalid_argument);
}

TEST(Mesh, TypeInvariantsHold) {
  check_invariants(generate_structured(1, 7), 1.0);
  check_invariants(generate_structured(2, 9), 1.0);
  check_invariants(generate_structured(3, 4), 1.0);
  Box box{Vec3(-1.0, 0.5, 0.0), Vec3(2.0, 1.5, 3.0)};
  check_invariants(generate_structured(2, 5, box), 3.0);
  check_invariants(generate_structured(3, 3, box), 9.0);
}

TEST(Mesh, StructuredOrderingIsDeterministic) {
  const Mesh a = generate_structured(3, 3);
  const Mesh b = generate_structured(3, 3);
  ASSERT_EQ(a.num_cells(), b.num_cells());
  for (int c = 0; c < a.num_cells(); ++c) {
    const auto va = a.cell_vertices(c);
    const auto vb = b.cell_vertices(c);
    EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
  }
}

TEST(Mesh, ParsesTwoTriangles) {
  const Mesh m = parse_mesh(kTwoTriangles);
  EXPECT_EQ(m.num_cells(), 2);
  EXPECT_EQ(m.num_faces() - m.num_boundary_faces(), 1);
  check_invariants(m, 1.0);
}

TEST(Mesh, DuplicatedCellIsTopologyError) {
  const std::string text = "2 4 3\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n2 3 0\n";
  EXPECT_THROW((void)parse_mesh(text), TopologyError);
}

TEST(Mesh, ParseErrorsCarryLineNumber) {
  const std::string text = "2 4 2\n0 0\n1 0\n1 x\n0 1\n0 1 2\n0 2 3\n";
  try {
    (void)parse_mesh(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_THROW((void)parse_mesh("2 4 2\n0 0\n1 0\n1 1\n0 1\n0 1 7\n0 2 3\n"), ParseError);
  EXPECT_THROW((void)parse_mesh("2 4 3\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n"), ParseError);
}

TEST(Mesh, FileRoundTrip) {
  const Mesh m = generate_structured(2, 3);
  const auto path = std::filesystem::temp_directory_path() / "ccg_mesh_roundtrip.msh";
  write_mesh(m, path);
  const Mesh r = load_mesh(path);
  ASSERT_EQ(r.num_cells(), m.num_cells());
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_EQ(r.vertex(v), m.vertex(v));
  std::filesystem::remove(path);
}

TEST(Mesh, ShippedUnstructuredMesh) {
  const Mesh m = load_mesh(std::filesystem::path(CCG_SOURCE_DIR) / "data/meshes/unstructured_3424.msh");
  EXPECT_EQ(m.num_cells(), 3424);
  check_invariants(m, 1.0);
}

TEST(Mesh, LocateFindsContainingCell) {
  const Mesh m = generate_structured(2, 8);
  for (int c = 0; c < m.num_cells(); c += 7) EXPECT_EQ(m.locate(m.centroid(c)), c);
  EXPECT_EQ(m.locate(Vec3(1.5, 0.5, 0.0)), -1);
}

TEST(FaceStencils, OneDimensionalMidpoints) {
  const Mesh m = generate_structured(1, 6);
  const auto stencils = select_face_stencils(m);
  for (int f = 0; f < m.num_faces(); ++f) {
    const FaceStencil& s = stencils[f];
    if (m.face(f).boundary()) {
      EXPECT_EQ(s.size, 1);
      EXPECT_EQ(s.cells[0], m.face(f).cells[0]);
      EXPECT_EQ(s.weights[0], 1.0);
      continue;
    }
    ASSERT_EQ(s.size, 2);
    EXPECT_NEAR(s.weights[0], 0.5, 1e-14);
    EXPECT_NEAR(s.weights[1], 0.5, 1e-14);
  }
}

TEST(FaceStencils, BarycentricInvariants) {
  for (const Mesh& m : {generate_structured(2, 8), generate_structured(3, 3),
                        load_mesh(std::filesystem::path(CCG_SOURCE_DIR) /
                                  "data/meshes/unstructured_3424.msh")}) {
    const StencilOptions opts;
    const auto stencils = select_face_stencils(m, opts);
    const int d = m.dim();
    for (int f = 0; f < m.num_faces(); ++f) {
      const Face& face = m.face(f);
      if (face.boundary()) continue;
      const FaceStencil& s = stencils[f];
      ASSERT_EQ(s.size, d + 1);
      EXPECT_EQ(s.cells[0], face.cells[0]);
      EXPECT_EQ(s.cells[1], face.cells[1]);
      double sum = 0.0;
      Vec3 x = Vec3::Zero();
      double mean_h = 0.0;
      for (int k = 0; k < s.size; ++k) {
        sum += s.weights[k];
        x += s.weights[k] * m.centroid(s.cells[k]);
        mean_h += m.cell_diameter(s.cells[k]) / s.size;
        EXPECT_GE(s.weights[k], -opts.max_extrapolation);
        EXPECT_LE(s.weights[k], 1.0 + opts.max_extrapolation);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_NEAR((x - face.barycenter).norm(), 0.0, 1e-10);
      Eigen::MatrixXd edges(d, d);
      for (int j = 0; j < d; ++j) {
        const Vec3 e = m.centroid(s.cells[j + 1]) - m.centroid(s.cells[0]);
        for (int i = 0; i < d; ++i) edges(i, j) = e[i];
      }
      EXPECT_GE(std::abs(edges.determinant()), opts.degeneracy_floor * std::pow(mean_h, d));
    }
  }
}

TEST(FaceStencils, Deterministic) {
  const Mesh m = generate_structured(3, 3);
  const auto a = select_face_stencils(m);
  const auto b = select_face_stencils(m);
  for (std::size_t f = 0; f < a.size(); ++f) {
    EXPECT_EQ(a[f].cells, b[f].cells);
    EXPECT_EQ(a[f].weights, b[f].weights);
  }
}

TEST(FaceStencils, InadmissibleMeshReportsFace) {
  // Two triangles: the interior face has no third cell to complete S_F.
  const Mesh m = parse_mesh(kTwoTriangles);
  try {
    (void)select_face_stencils(m);
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_FALSE(m.face(e.face()).boundary());
  }
}
