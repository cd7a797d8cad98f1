#include "ccg/quadrature.hpp"
#include "ccg/spaces.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <filesystem>
#include <random>
#include <set>

using namespace ccg;

namespace {

std::shared_ptr<const Mesh> structured(int dim, int n) {
  return std::make_shared<const Mesh>(generate_structured(dim, n));
}

std::shared_ptr<const Mesh> unstructured() {
  return std::make_shared<const Mesh>(
      load_mesh(std::filesystem::path(CCG_SOURCE_DIR) / "data/meshes/unstructured_3424.msh"));
}

bool all_faces_interior(const Mesh& m, int cell) {
  for (int f : m.cell_faces(cell)) {
    if (m.face(f).boundary()) return false;
  }
  return true;
}

Field affine_averages(const std::shared_ptr<const CcgSpace>& space, const Vec3& g, double c0) {
  const Mesh& m = space->mesh();
  Eigen::VectorXd v(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) v[c] = c0 + g.dot(m.centroid(c));
  return Field(space, v);
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST(CcgSpace, OneDofPerCellAndGradientOfConstantVanishes) {
  for (auto mesh : {structured(1, 9), structured(2, 6), structured(3, 3), unstructured()}) {
    auto space = std::make_shared<const CcgSpace>(mesh);
    EXPECT_EQ(space->num_dofs(), mesh->num_cells());
    for (int c = 0; c < mesh->num_cells(); ++c) {
      Vec3 sum = Vec3::Zero();
      for (const auto& t : space->gradient_stencil(c)) sum += t.coefficient;
      EXPECT_LT(sum.norm(), 1e-10 / mesh->cell_diameter(c));
    }
  }
}

TEST(CcgSpace, TraceOfConstant) {
  auto mesh = unstructured();
  for (auto policy : {BoundaryTrace::mirror, BoundaryTrace::dirichlet}) {
    auto space = std::make_shared<const CcgSpace>(mesh, policy);
    const Field f(space, Eigen::VectorXd::Constant(mesh->num_cells(), 2.5),
                  [](const Vec3&) { return 2.5; });
    for (int face = 0; face < mesh->num_faces(); ++face) {
      EXPECT_NEAR(space->trace_interpolate(f, face), 2.5, 1e-13);
    }
  }
}

TEST(CcgSpace, OneDimensionalTraceAndGradient) {
  const int n = 8;
  auto mesh = structured(1, n);
  auto space = std::make_shared<const CcgSpace>(mesh, BoundaryTrace::dirichlet);
  const double h = 1.0 / n;
  for (int c = 1; c < n; ++c) ASSERT_GT(mesh->centroid(c)[0], mesh->centroid(c - 1)[0]);

  const Eigen::VectorXd v = random_vector(n, 7);
  const Field f(space, v);
  for (int face = 0; face < mesh->num_faces(); ++face) {
    const Face& fc = mesh->face(face);
    if (fc.boundary()) continue;
    EXPECT_NEAR(space->trace_interpolate(f, face), 0.5 * (v[fc.cells[0]] + v[fc.cells[1]]), 1e-15);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    const Field phi(space, e);
    for (int l = 1; l + 1 < n; ++l) {
      const double expected = ((j == l + 1) - (j == l - 1)) / (2.0 * h);
      EXPECT_NEAR(space->reconstruct_gradient(phi, l)[0], expected, 1e-12) << j << ' ' << l;
    }
  }
}

TEST(CcgSpace, AffineTraceExactness) {
  const Vec3 g(0.7, -1.3, 0.4);
  for (auto mesh : {structured(2, 7), structured(3, 3), unstructured()}) {
    auto space = std::make_shared<const CcgSpace>(mesh);
    const Field f = affine_averages(space, g, 0.2);
    for (int face = 0; face < mesh->num_faces(); ++face) {
      const Face& fc = mesh->face(face);
      if (fc.boundary()) continue;
      EXPECT_NEAR(space->trace_interpolate(f, face), 0.2 + g.dot(fc.barycenter), 1e-10);
    }
  }
}

TEST(CcgSpace, AffineReconstructionExactness) {
  const Vec3 g(0.7, -1.3, 0.4);
  for (auto mesh : {structured(2, 7), structured(3, 3), unstructured()}) {
    const int d = mesh->dim();
    Vec3 gd = g;
    for (int i = d; i < 3; ++i) gd[i] = 0.0;
    auto ud = [&gd](const Vec3& x) { return 0.2 + gd.dot(x); };

    auto mirror = std::make_shared<const CcgSpace>(mesh, BoundaryTrace::mirror);
    const Field fm = affine_averages(mirror, gd, 0.2);
    auto dirichlet = std::make_shared<const CcgSpace>(mesh, BoundaryTrace::dirichlet);
    Field fd = affine_averages(dirichlet, gd, 0.2);
    fd.set_boundary(ud);

    int interior_cells = 0;
    for (int c = 0; c < mesh->num_cells(); ++c) {
      const Vec3 x = 0.5 * mesh->centroid(c) + 0.5 * mesh->vertex(mesh->cell_vertices(c)[0]);
      // with exact boundary data every face trace is exact
      EXPECT_LT((dirichlet->reconstruct_gradient(fd, c) - gd).norm(), 1e-9);
      EXPECT_NEAR(dirichlet->reconstruct_affine(fd, c, x), ud(x), 1e-10);
      EXPECT_NEAR(fd.value(c, x), ud(x), 1e-10);
      if (!all_faces_interior(*mesh, c)) continue;
      ++interior_cells;
      EXPECT_LT((mirror->reconstruct_gradient(fm, c) - gd).norm(), 1e-9);
      EXPECT_NEAR(mirror->reconstruct_affine(fm, c, x), ud(x), 1e-10);
      EXPECT_NEAR(fm.value(c, x), ud(x), 1e-10);
    }
    EXPECT_GT(interior_cells, 0);
  }
}

TEST(CcgSpace, AffineAtCentroidIsAverage) {
  auto mesh = unstructured();
  auto space = std::make_shared<const CcgSpace>(mesh);
  const Field f(space, random_vector(mesh->num_cells(), 3));
  for (int c = 0; c < mesh->num_cells(); c += 5) {
    EXPECT_NEAR(space->reconstruct_affine(f, c, mesh->centroid(c)), f.values()[c], 1e-14);
    EXPECT_NEAR(f.cell_average(c), f.values()[c], 1e-13);
  }
}

TEST(CcgSpace, CachedStencilMatchesDefinition) {
  for (auto mesh : {structured(2, 6), structured(3, 3), unstructured()}) {
    auto space = std::make_shared<const CcgSpace>(mesh);
    const Field f(space, random_vector(mesh->num_cells(), 11));
    for (int c = 0; c < mesh->num_cells(); ++c) {
      const Vec3 x = mesh->vertex(mesh->cell_vertices(c)[1]);
      EXPECT_LT((f.gradient(c, x) - space->reconstruct_gradient(f, c)).norm(), 1e-11);
      EXPECT_NEAR(f.value(c, x), space->reconstruct_affine(f, c, x), 1e-12);
    }
  }
}

TEST(CcgSpace, BasisIsKroneckerAtCentroids) {
  auto mesh = unstructured();
  auto space = std::make_shared<const CcgSpace>(mesh);
  double values[kMaxLocalDofs];
  Vec3 grads[kMaxLocalDofs];
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const auto dofs = space->cell_dofs(c);
    space->evaluate(c, mesh->centroid(c), values, grads);
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      EXPECT_NEAR(values[a], dofs[a] == c ? 1.0 : 0.0, 1e-14);
    }
  }
}

TEST(CcgSpace, SupportFollowsFaceStencils) {
  auto mesh = unstructured();
  auto space = std::make_shared<const CcgSpace>(mesh);
  for (int c = 0; c < mesh->num_cells(); ++c) {
    std::set<int> allowed{c};
    for (int f : mesh->cell_faces(c)) {
      for (int j : space->stencils()[f].cell_span()) allowed.insert(j);
    }
    std::set<int> coupled;
    for (const auto& t : space->gradient_stencil(c)) coupled.insert(t.cell);
    for (int j : space->cell_dofs(c)) coupled.insert(j);
    EXPECT_TRUE(std::includes(allowed.begin(), allowed.end(), coupled.begin(), coupled.end()));
    EXPECT_TRUE(coupled.count(c));
  }

  // 1D: basis j is supported on {j-1, j, j+1}
  const int n = 10;
  auto line = structured(1, n);
  auto s1 = std::make_shared<const CcgSpace>(line, BoundaryTrace::dirichlet);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    const Field phi(s1, e);
    for (int l = 0; l < n; ++l) {
      const Vec3 x = line->vertex(line->cell_vertices(l)[0]);
      const bool nonzero = std::abs(phi.value(l, x)) > 1e-14 || phi.gradient(l, x).norm() > 1e-14;
      EXPECT_EQ(nonzero, std::abs(j - l) <= 1) << j << ' ' << l;
    }
  }
}

TEST(CcgSpace, ImageLiesInP1) {
  for (auto mesh : {structured(2, 5), structured(3, 2), unstructured()}) {
    auto ccg = std::make_shared<const CcgSpace>(mesh);
    auto p1 = std::make_shared<const DgSpace>(mesh, 1);
    const Field f(ccg, random_vector(mesh->num_cells(), 5));
    const Field g(p1, ccg_to_p1(f, *p1));
    std::vector<QuadraturePoint> rule;
    for (int c = 0; c < mesh->num_cells(); ++c) {
      cell_rule(*mesh, c, 4, rule);
      for (const auto& q : rule) EXPECT_NEAR(f.value(c, q.point), g.value(c, q.point), 1e-12);
    }
  }
}

TEST(DgSpace, DimensionAndLayout) {
  EXPECT_EQ(dg_local_size(1, 2), 3);
  EXPECT_EQ(dg_local_size(2, 2), 6);
  EXPECT_EQ(dg_local_size(3, 3), 20);
  auto mesh = structured(2, 4);
  for (int k = 1; k <= 3; ++k) {
    const DgSpace s(mesh, k);
    EXPECT_EQ(s.num_dofs(), dg_local_size(k, 2) * mesh->num_cells());
    for (int c = 0; c < mesh->num_cells(); ++c) {
      const auto dofs = s.cell_dofs(c);
      for (int a = 0; a < s.local_size(); ++a) EXPECT_EQ(dofs[a], c * s.local_size() + a);
    }
  }
  EXPECT_THROW(DgSpace(mesh, 4), std::invalid_argument);
}

TEST(DgSpace, NodalBasisAndSpdMass) {
  for (auto mesh : {structured(2, 3), structured(3, 2)}) {
    for (int k = 1; k <= 3; ++k) {
      const DgSpace s(mesh, k);
      const int n = s.local_size();
      double values[kMaxLocalDofs];
      Vec3 grads[kMaxLocalDofs];
      std::vector<QuadraturePoint> rule;
      for (int c = 0; c < mesh->num_cells(); ++c) {
        for (int a = 0; a < n; ++a) {
          s.evaluate(c, s.node(c, a), values, grads);
          double sum = 0.0;
          Vec3 gsum = Vec3::Zero();
          for (int b = 0; b < n; ++b) {
            EXPECT_NEAR(values[b], a == b ? 1.0 : 0.0, 1e-12);
            sum += values[b];
            gsum += grads[b];
          }
          EXPECT_NEAR(sum, 1.0, 1e-12);
          EXPECT_LT(gsum.norm(), 1e-9);
        }
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
        cell_rule(*mesh, c, 2 * k, rule);
        for (const auto& q : rule) {
          s.evaluate(c, q.point, values, grads);
          for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) mass(a, b) += q.weight * values[a] * values[b];
          }
        }
        EXPECT_LT((mass - mass.transpose()).norm(), 1e-14);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass);
        EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
      }
    }
  }
}

TEST(DgSpace, ReproducesPolynomialsOfItsDegree) {
  auto mesh = structured(2, 3);
  auto u = [](const Vec3& x) { return 1.0 - 2.0 * x[0] + x[0] * x[1] * x[1] + 0.5 * x[1] * x[1] * x[1]; };
  for (int k = 1; k <= 3; ++k) {
    auto s = std::make_shared<const DgSpace>(mesh, k);
    Eigen::VectorXd v(s->num_dofs());
    for (int c = 0; c < mesh->num_cells(); ++c) {
      for (int a = 0; a < s->local_size(); ++a) v[s->cell_dofs(c)[a]] = u(s->node(c, a));
    }
    const Field f(s, v);
    const double err = l2_error(f, u);
    if (k == 3) {
      EXPECT_LT(err, 1e-12);
    } else {
      EXPECT_GT(err, 1e-6);
    }
  }
}

TEST(Quadrature, Examples) {
  const auto centroid = quadrature(2, 1);
  ASSERT_EQ(centroid.size(), 1u);
  EXPECT_NEAR(centroid[0].point[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(centroid[0].point[1], 1.0 / 3.0, 1e-15);
  double integral = 0.0;
  for (const auto& q : quadrature(2, 2)) {
    integral += q.weight * (q.point[0] * q.point[0] + q.point[1] * q.point[1]);
  }
  EXPECT_NEAR(integral, 1.0 / 6.0, 1e-15);
  EXPECT_THROW((void)quadrature(2, 0), std::invalid_argument);
  EXPECT_THROW((void)quadrature(2, 7), std::invalid_argument);
}

TEST(Quadrature, ExactForMonomialsUpToOrder) {
  // int over the reference simplex of x^a y^b z^c = a! b! c! / (a+b+c+d)!
  auto fact = [](int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  for (int dim = 1; dim <= 3; ++dim) {
    for (int order = 1; order <= kMaxQuadratureOrder; ++order) {
      const auto rule = quadrature(dim, order);
      double wsum = 0.0;
      for (const auto& q : rule) wsum += q.weight;
      EXPECT_NEAR(wsum, 1.0 / fact(dim), 1e-14);
      for (int a = 0; a <= order; ++a) {
        for (int b = 0; a + b <= order; ++b) {
          for (int c = 0; a + b + c <= order; ++c) {
            if ((dim < 2 && b > 0) || (dim < 3 && c > 0)) continue;
            double num = 0.0;
            for (const auto& q : rule) {
              num += q.weight * std::pow(q.point[0], a) * std::pow(q.point[1], b) *
                     std::pow(q.point[2], c);
            }
            const double exact = fact(a) * fact(b) * fact(c) / fact(a + b + c + dim);
            EXPECT_NEAR(num, exact, 1e-14) << dim << ' ' << order << ' ' << a << b << c;
          }
        }
      }
    }
  }
}
