#include <gtest/gtest.h>

#include <tlasso/errors.hpp>
#include <tlasso/rng.hpp>
#include <tlasso/sets.hpp>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace tlasso;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected tlasso::Error";
  return ErrorCode::io;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

std::vector<ConstraintSet> convex_sets(Eigen::Index dim) {
  return {ConstraintSet::l1_ball(dim, 1.0), ConstraintSet::l1_ball(dim, 0.05), ConstraintSet::l2_ball(dim, 1.0),
          ConstraintSet::l2_ball(dim, 3.0),
          ConstraintSet::product(ConstraintSet::l1_ball(dim / 2, 0.7),
                                 ConstraintSet::l2_ball(dim - dim / 2, 0.4)),
          ConstraintSet::full_space(dim), ConstraintSet::singleton(Vector::Ones(dim))};
}

}  // namespace

TEST(Project, L2InsideUnchanged) {
  EXPECT_EQ(project(ConstraintSet::l2_ball(2, 1.0), vec({0.3, 0.4})), vec({0.3, 0.4}));
}

TEST(Project, L2Rescales) {
  const Vector q = project(ConstraintSet::l2_ball(2, 1.0), vec({3, 4}));
  EXPECT_NEAR(q[0], 0.6, 1e-15);
  EXPECT_NEAR(q[1], 0.8, 1e-15);
}

TEST(Project, L1Example) {
  const Vector q = project(ConstraintSet::l1_ball(2, 1.0), vec({3, 0}));
  EXPECT_EQ(q, vec({1, 0}));
  const Vector grid = oracle::project_l1_grid(vec({3, 0}), 1.0, 400);
  EXPECT_LE((grid - q).norm(), 1e-2);
}

TEST(Project, TopKExample) {
  EXPECT_EQ(project(ConstraintSet::top_k(3, 2), vec({3, 1, -2})), vec({3, 0, -2}));
}

TEST(Project, TopKTieKeepsLowerIndex) {
  EXPECT_EQ(project(ConstraintSet::top_k(4, 1), vec({1, -2, 2, 2})), vec({0, -2, 0, 0}));
  EXPECT_EQ(project(ConstraintSet::top_k(4, 2), vec({5, 5, 5, 5})), vec({5, 5, 0, 0}));
}

TEST(Project, TopKWithRadius) {
  const Vector q = project(ConstraintSet::top_k(3, 1, 2.0), vec({3, 0, -1}));
  EXPECT_EQ(q, vec({2, 0, 0}));
}

TEST(Project, SingletonAndFull) {
  EXPECT_EQ(project(ConstraintSet::singleton(vec({1, 2})), vec({-5, 7})), vec({1, 2}));
  EXPECT_EQ(project(ConstraintSet::full_space(2), vec({-5, 7})), vec({-5, 7}));
}

TEST(Project, ProductIsBlockwise) {
  const auto a = ConstraintSet::l1_ball(3, 1.0);
  const auto b = ConstraintSet::top_k(2, 1);
  const auto prod = ConstraintSet::product(a, b);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vector p = 3.0 * rng.normal_vector(5);
    Vector expected(5);
    expected << project(a, p.head(3)), project(b, p.tail(2));
    EXPECT_EQ(project(prod, p), expected);
  }
}

TEST(Project, ShapeMismatch) {
  EXPECT_EQ(code_of([] { project(ConstraintSet::l1_ball(3, 1.0), Vector::Zero(2)); }), ErrorCode::shape);
  EXPECT_EQ(code_of([] { contains(ConstraintSet::l2_ball(3, 1.0), Vector::Zero(4), 0.0); }), ErrorCode::shape);
}

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(ConstraintSet::l1_ball(2, 1.0), vec({0.5, 0.5}), 0.0));
  EXPECT_FALSE(contains(ConstraintSet::l1_ball(2, 1.0), vec({0.9, 0.9}), 0.0));
  EXPECT_TRUE(contains(ConstraintSet::top_k(2, 1), vec({1, 1e-9}), 1e-6));
  EXPECT_FALSE(contains(ConstraintSet::top_k(2, 1), vec({1, 1e-3}), 1e-6));
}

TEST(Contains, NegativeTolerance) {
  EXPECT_EQ(code_of([] { contains(ConstraintSet::l2_ball(1, 1.0), Vector::Zero(1), -1.0); }),
            ErrorCode::invalid_parameter);
}

TEST(Properties, IdempotentAndFeasible) {
  Rng rng(11);
  for (Eigen::Index dim : {1, 2, 7, 50}) {
    auto sets = convex_sets(std::max<Eigen::Index>(dim, 2));
    sets.push_back(ConstraintSet::top_k(std::max<Eigen::Index>(dim, 2), 1));
    sets.push_back(ConstraintSet::top_k(std::max<Eigen::Index>(dim, 2), 2, 0.5));
    for (const auto& set : sets) {
      for (int i = 0; i < 200; ++i) {
        const Vector p = (i % 3 + 0.1) * rng.normal_vector(set.dim());
        const Vector q = project(set, p);
        EXPECT_EQ(project(set, q), q) << set.spec();
        EXPECT_TRUE(contains(set, q, 1e-9)) << set.spec();
      }
    }
  }
}

TEST(Properties, Nonexpansive) {
  Rng rng(12);
  for (const auto& set : convex_sets(6)) {
    for (int i = 0; i < 1000; ++i) {
      const Vector p = 2.0 * rng.normal_vector(6);
      const Vector q = 2.0 * rng.normal_vector(6);
      EXPECT_LE((project(set, p) - project(set, q)).norm(), (p - q).norm() + 1e-12) << set.spec();
    }
  }
}

TEST(Properties, L1AgreesWithFaceEnumeration) {
  Rng rng(13);
  for (Eigen::Index dim : {1, 2, 3}) {
    for (int i = 0; i < 100; ++i) {
      const double r = 0.2 + rng.uniform();
      const Vector p = 2.0 * rng.normal_vector(dim);
      const Vector q = project(ConstraintSet::l1_ball(dim, r), p);
      EXPECT_LE((q - oracle::project_l1_faces(p, r)).norm(), 1e-4);
      EXPECT_LE((q - oracle::project_l1_bisect(p, r)).norm(), 1e-10);
    }
  }
}

TEST(Properties, L1AgreesWithGridInTwoDimensions) {
  Rng rng(14);
  for (int i = 0; i < 20; ++i) {
    const Vector p = 2.0 * rng.normal_vector(2);
    const Vector q = project(ConstraintSet::l1_ball(2, 1.0), p);
    EXPECT_LE((q - oracle::project_l1_grid(p, 1.0, 1000)).norm(), 3e-3);
  }
}

TEST(Properties, L1BisectionAgreementInHighDimension) {
  Rng rng(15);
  for (int i = 0; i < 50; ++i) {
    const Vector p = rng.normal_vector(300);
    const Vector q = project_l1_ball(p, 3.0);
    EXPECT_LE((q - oracle::project_l1_bisect(p, 3.0)).norm(), 1e-10);
  }
}

TEST(Properties, TopKAgreesWithEnumeration) {
  Rng rng(16);
  for (Eigen::Index dim : {2, 3, 6}) {
    for (Eigen::Index k = 1; k <= dim; ++k) {
      for (int i = 0; i < 100; ++i) {
        Vector p = rng.normal_vector(dim);
        if (i % 4 == 0) p = p.array().round();  // plenty of ties
        EXPECT_EQ(project(ConstraintSet::top_k(dim, k), p),
                  oracle::project_topk_enumerate(p, static_cast<int>(k)));
      }
    }
  }
}

TEST(Properties, L2AgreesWithOracle) {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Vector p = 2.0 * rng.normal_vector(3);
    EXPECT_LE((project(ConstraintSet::l2_ball(3, 1.3), p) - oracle::project_l2(p, 1.3)).norm(), 1e-15);
  }
}

TEST(ConstraintSet, Validation) {
  EXPECT_EQ(code_of([] { ConstraintSet::l1_ball(3, 0.0); }), ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { ConstraintSet::l2_ball(3, -1.0); }), ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { ConstraintSet::top_k(3, 0); }), ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { ConstraintSet::top_k(3, 4); }), ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { ConstraintSet::full_space(0); }), ErrorCode::invalid_spec);
}

TEST(ConstraintSet, ConvexityAndBoundedness) {
  EXPECT_TRUE(ConstraintSet::l1_ball(3, 1).is_convex());
  EXPECT_FALSE(ConstraintSet::top_k(3, 1).is_convex());
  EXPECT_TRUE(ConstraintSet::top_k(3, 3).is_convex());
  EXPECT_FALSE(ConstraintSet::top_k(3, 1).is_bounded());
  EXPECT_TRUE(ConstraintSet::top_k(3, 1, 2.0).is_bounded());
  EXPECT_FALSE(ConstraintSet::full_space(3).is_bounded());
  const auto prod = ConstraintSet::product(ConstraintSet::l1_ball(2, 1), ConstraintSet::full_space(2));
  EXPECT_TRUE(prod.is_convex());
  EXPECT_FALSE(prod.is_bounded());
  EXPECT_EQ(prod.dim(), 4);
}

TEST(ConstraintSet, ParseGrammar) {
  EXPECT_EQ(ConstraintSet::parse("l1:2.5", 4).kind(), SetKind::l1_ball);
  EXPECT_EQ(ConstraintSet::parse("l1:2.5", 4).radius(), 2.5);
  EXPECT_EQ(ConstraintSet::parse("l2:1", 4).kind(), SetKind::l2_ball);
  EXPECT_EQ(ConstraintSet::parse("topk:3", 4).k(), 3);
  EXPECT_EQ(ConstraintSet::parse("topk:3:1.5", 4).radius(), 1.5);
  EXPECT_EQ(ConstraintSet::parse("full", 4).kind(), SetKind::full_space);
  EXPECT_TRUE(ConstraintSet::parse("zero", 4).anchor().isZero(0.0));
  const auto prod = ConstraintSet::parse_product("prod(l1:1,topk:2)", 5, 3);
  EXPECT_EQ(prod.kind(), SetKind::product);
  EXPECT_EQ(prod.first().dim(), 5);
  EXPECT_EQ(prod.second().k(), 2);
  EXPECT_EQ(prod.spec(), "prod(l1:1,topk:2)");
  EXPECT_EQ(ConstraintSet::parse(ConstraintSet::parse("l2:0.25", 3).spec(), 3).radius(), 0.25);
}

TEST(ConstraintSet, ParseErrors) {
  for (std::string spec : {"", "ball:1", "l1", "l1:", "l1:-2", "l2:x", "topk:0", "topk:9", "prod(l1:1,l2:1)"}) {
    EXPECT_EQ(code_of([&] { ConstraintSet::parse(spec, 4); }), ErrorCode::invalid_spec) << spec;
  }
  EXPECT_EQ(code_of([] { ConstraintSet::parse_product("prod(l1:1)", 2, 2); }), ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { ConstraintSet::parse_product("l1:1", 2, 2); }), ErrorCode::invalid_spec);
}

TEST(ConstraintSet, ParsePointFile) {
  const auto path = std::filesystem::temp_directory_path() / "tlasso_point.txt";
  {
    std::ofstream out(path);
    out << "1.5 -2\n0.25\n";
  }
  const auto set = ConstraintSet::parse("point:" + path.string(), 3);
  EXPECT_EQ(set.anchor(), vec({1.5, -2, 0.25}));
  EXPECT_EQ(code_of([&] { ConstraintSet::parse("point:" + path.string(), 2); }), ErrorCode::shape);
  std::filesystem::remove(path);
  EXPECT_EQ(code_of([&] { ConstraintSet::parse("point:" + path.string(), 3); }), ErrorCode::io);
}
