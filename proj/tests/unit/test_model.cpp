#include <gtest/gtest.h>

#include <tlasso/errors.hpp>
#include <tlasso/model.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>

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

InstanceSpec spec_of(Eigen::Index n, Eigen::Index m, Eigen::Index s, Eigen::Index k, double amplitude,
                     LinkFunction link, std::uint64_t seed) {
  InstanceSpec spec;
  spec.n = n;
  spec.m = m;
  spec.s = s;
  spec.k = k;
  spec.amplitude = amplitude;
  spec.link = std::move(link);
  spec.seed = seed;
  return spec;
}

bool identical(const ProblemInstance& a, const ProblemInstance& b) {
  return a.phi == b.phi && a.x_star == b.x_star && a.v_star == b.v_star && a.y == b.y && a.seed == b.seed &&
         a.link.spec() == b.link.spec();
}

}  // namespace

TEST(GenerateInstance, OneSparseSelectsAColumn) {
  const auto inst = generate_instance(spec_of(4, 8, 1, 0, 0.0, LinkFunction::identity(), 7));
  Eigen::Index support = -1;
  EXPECT_EQ((inst.x_star.array() != 0.0).count(), 1);
  inst.x_star.cwiseAbs().maxCoeff(&support);
  EXPECT_EQ(std::abs(inst.x_star[support]), 1.0);
  const Vector expected = inst.phi.col(support) * inst.x_star[support];
  EXPECT_EQ(inst.y, expected);
}

TEST(GenerateInstance, SignRange) {
  const auto inst = generate_instance(spec_of(10, 50, 3, 0, 0.0, LinkFunction::sign(), 5));
  for (double y : inst.y) EXPECT_TRUE(y == -1.0 || y == 0.0 || y == 1.0);
}

TEST(GenerateInstance, ConstructionIdentity) {
  const auto inst = generate_instance(spec_of(2, 2, 1, 1, 5.0, LinkFunction::identity(), 3));
  const Vector linear = inst.phi * inst.x_star;
  // y is assembled as f(Phi x*) + sqrt(m) v*; undoing the addition is exact
  // on uncorrupted rows and exact to rounding on the corrupted one.
  EXPECT_EQ(inst.y, Vector(linear + std::sqrt(2.0) * inst.v_star));
  const Vector back = inst.y - std::sqrt(2.0) * inst.v_star;
  for (Eigen::Index i = 0; i < 2; ++i) {
    if (inst.v_star[i] == 0.0) {
      EXPECT_EQ(back[i], linear[i]);
    } else {
      EXPECT_NEAR(back[i], linear[i], 1e-14 * std::abs(inst.y[i]));
    }
  }
  EXPECT_EQ((inst.v_star.array() != 0.0).count(), 1);
  EXPECT_EQ(inst.v_star.cwiseAbs().maxCoeff(), 5.0);
}

TEST(GenerateInstance, StructureOfTruths) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_instance(spec_of(64, 40, 5, 7, 2.5, LinkFunction::clip(1.0), seed));
    EXPECT_NEAR(inst.x_star.norm(), 1.0, 1e-12);
    EXPECT_EQ((inst.x_star.array() != 0.0).count(), 5);
    EXPECT_EQ((inst.v_star.array() != 0.0).count(), 7);
    for (double v : inst.v_star) EXPECT_TRUE(v == 0.0 || std::abs(v) == 2.5);
    EXPECT_EQ(inst.y, Vector(apply_link(inst.link, inst.phi * inst.x_star) + inst.sqrt_m() * inst.v_star));
  }
}

TEST(GenerateInstance, SeedDeterminism) {
  const auto spec = spec_of(30, 20, 4, 3, 1.0, LinkFunction::sign(), 99);
  EXPECT_TRUE(identical(generate_instance(spec), generate_instance(spec)));
  auto other = spec;
  other.seed = 100;
  EXPECT_NE(generate_instance(spec).phi, generate_instance(other).phi);
}

TEST(GenerateInstance, TruthMatchesInstance) {
  const auto spec = spec_of(30, 20, 4, 3, 1.0, LinkFunction::sign(), 42);
  const auto truth = generate_truth(spec);
  const auto inst = generate_instance(spec);
  EXPECT_EQ(truth.x_star, inst.x_star);
  EXPECT_EQ(truth.v_star, inst.v_star);
}

TEST(GenerateInstance, ColumnScale) {
  const auto inst = generate_instance(spec_of(32, 256, 2, 0, 0.0, LinkFunction::identity(), 1));
  const double root = inst.sqrt_m();
  for (Eigen::Index j = 0; j < inst.n(); ++j) {
    EXPECT_GE(inst.phi.col(j).norm(), 0.8 * root);
    EXPECT_LE(inst.phi.col(j).norm(), 1.2 * root);
  }
}

TEST(GenerateInstance, GaussianEntries) {
  const auto inst = generate_instance(spec_of(100, 400, 1, 0, 0.0, LinkFunction::identity(), 8));
  const double mean = inst.phi.mean();
  const double var = (inst.phi.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(GenerateInstance, InvalidSpecs) {
  EXPECT_EQ(code_of([] { generate_instance(spec_of(4, 4, 0, 0, 1, LinkFunction::identity(), 0)); }),
            ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { generate_instance(spec_of(4, 4, 5, 0, 1, LinkFunction::identity(), 0)); }),
            ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { generate_instance(spec_of(4, 4, 1, 5, 1, LinkFunction::identity(), 0)); }),
            ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { generate_instance(spec_of(4, 4, 1, -1, 1, LinkFunction::identity(), 0)); }),
            ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { generate_instance(spec_of(4, 4, 1, 1, -1, LinkFunction::identity(), 0)); }),
            ErrorCode::invalid_spec);
  EXPECT_EQ(code_of([] { generate_instance(spec_of(0, 4, 1, 0, 1, LinkFunction::identity(), 0)); }),
            ErrorCode::invalid_spec);
}

TEST(Residual, Examples) {
  const auto inst = generate_instance(spec_of(10, 12, 2, 2, 3.0, LinkFunction::identity(), 4));
  EXPECT_EQ(residual(inst, inst.x_star, inst.v_star).norm(), 0.0);
  EXPECT_EQ(residual(inst, Vector::Zero(10), Vector::Zero(12)), inst.y);

  const auto sign_inst = generate_instance(spec_of(10, 12, 2, 2, 3.0, LinkFunction::sign(), 4));
  const double mu = std::sqrt(2.0 / std::acos(-1.0));
  const Vector z = apply_link(sign_inst.link, sign_inst.phi * sign_inst.x_star) - mu * sign_inst.phi * sign_inst.x_star;
  EXPECT_LE((residual(sign_inst, mu * sign_inst.x_star, sign_inst.v_star) - z).norm(), 1e-12);
}

TEST(Residual, ShapeErrors) {
  const auto inst = generate_instance(spec_of(3, 4, 1, 0, 0.0, LinkFunction::identity(), 1));
  EXPECT_EQ(code_of([&] { residual(inst, Vector::Zero(4), Vector::Zero(4)); }), ErrorCode::shape);
  EXPECT_EQ(code_of([&] { residual(inst, Vector::Zero(3), Vector::Zero(3)); }), ErrorCode::shape);
}

TEST(InstanceIo, RoundTripIsExact) {
  for (const auto& link : {LinkFunction::identity(), LinkFunction::sign(), LinkFunction::clip(0.3)}) {
    const auto inst = generate_instance(spec_of(7, 9, 3, 2, 1.7, link, 123456789012345ULL));
    std::stringstream buffer;
    write_instance(buffer, inst);
    EXPECT_TRUE(identical(read_instance(buffer), inst));
  }
}

TEST(InstanceIo, HeaderLayout) {
  const auto inst = generate_instance(spec_of(2, 3, 1, 0, 0.0, LinkFunction::clip(0.5), 77));
  std::stringstream buffer;
  write_instance(buffer, inst);
  std::string header;
  std::getline(buffer, header);
  EXPECT_EQ(header, "2 3 77 clip:0.5");
}

TEST(InstanceIo, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "tlasso_instance.txt").string();
  const auto inst = generate_instance(spec_of(5, 6, 2, 1, 2.0, LinkFunction::sign(), 9));
  save_instance(path, inst);
  EXPECT_TRUE(identical(load_instance(path), inst));
  std::filesystem::remove(path);
  EXPECT_EQ(code_of([&] { load_instance(path); }), ErrorCode::io);
}

TEST(InstanceIo, MalformedInput) {
  for (std::string text : {"", "2 2\n", "2 2 1 identity\n1 2 3\n", "2 x 1 identity\n", "0 2 1 identity\n",
                           "1 1 1 identity\n1\n2\n3\nnope\n"}) {
    std::istringstream in(text);
    EXPECT_EQ(code_of([&] { read_instance(in); }), ErrorCode::io) << text;
  }
  std::istringstream bad_link("1 1 1 relu\n1\n1\n1\n1\n");
  EXPECT_EQ(code_of([&] { read_instance(bad_link); }), ErrorCode::invalid_link);
}
