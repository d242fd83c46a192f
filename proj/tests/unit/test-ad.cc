// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "doctest.h"
#include "grad-check.h"
#include "remixsep/ad/ops.h"

using namespace remixsep;
using namespace remixsep::ad;
using remixsep::testing::GradientError;
using remixsep::testing::RandomComplex;
using remixsep::testing::RandomReal;

namespace {

template <typename Build>
void CheckPrimitive(const char* name, double tol, Build build) {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial, {static_cast<uint64_t>(std::hash<std::string>{}(name))});
    std::vector<Var> leaves;
    std::function<Var()> loss = build(rng, leaves);
    worst = std::max(worst, GradientError(loss, leaves));
  }
  INFO(name << " worst relative error " << worst);
  CHECK(worst < tol);
}

// sum(c .* y), or sum Re(conj(c) y) for complex y, spelled with norms:
// 0.5 * (|y + c|^2 - |c|^2 - |y|^2).
Var Weighted(const Var& y, const Var& c) {
  return Scale(Sub(Sub(SquaredNorm(Add(y, c)), SquaredNorm(c)), SquaredNorm(y)), 0.5);
}

Var WeightsLike(Rng& rng, const Var& y) {
  return y.IsComplex() ? RandomComplex(rng, y.shape(), false)
                       : RandomReal(rng, y.shape(), -1, 1, false);
}

}  // namespace

TEST_CASE("sum of squares has gradient 2p") {
  Var p = Var::Real({5}, {1.0, -2.0, 0.5, 3.0, 0.0}, true);
  Backward(SquaredNorm(p));
  auto g = p.RealGrad();
  for (int i = 0; i < 5; ++i) CHECK(g[i] == 2.0 * p.RealValues()[i]);
}

TEST_CASE("complex quadratic bowl: gradient is a descent direction along w") {
  Var w = Var::Complex({1}, {cplx(0.6, -0.8)}, true);
  Backward(SquaredNorm(w));
  cplx g = w.ComplexGrad()[0];
  CHECK(std::abs(g - 2.0 * cplx(0.6, -0.8)) < 1e-15);
  cplx stepped = w.ComplexValues()[0] - 0.1 * g;
  CHECK(std::norm(stepped) < std::norm(w.ComplexValues()[0]));
}

TEST_CASE("backward rejects non-scalar and complex losses") {
  Var a = Var::Real({2}, {1, 2}, true);
  CHECK_THROWS_AS(Backward(a), std::invalid_argument);
  Var c = Var::Complex({}, {cplx(1, 1)}, true);
  CHECK_THROWS_AS(Backward(c), std::invalid_argument);
}

TEST_CASE("backward detects cycles") {
  Var a = Var::Real({}, {1.0}, true);
  Var b = Scale(a, 2.0);
  Var c = Scale(b, 3.0);
  // Splice c back in as a parent of b.
  b.node()->parents.push_back(c.ptr());
  CHECK_THROWS_AS(Backward(c), std::logic_error);
  b.node()->parents.pop_back();
}

TEST_CASE("shared subexpressions are visited once") {
  Var x = Var::Real({}, {1.5}, true);
  int calls = 0;
  Var y = MakeReal({}, {x.Item() * x.Item()}, {x}, [&calls](Node& self) {
    ++calls;
    self.parents[0]->RealGrad()[0] += self.real_grad[0] * 2.0 * self.parents[0]->real[0];
  });
  // loss = y + 2y + y*y-ish via Add of shared node.
  Var loss = Add(Add(y, Scale(y, 2.0)), Scale(y, 0.5));
  Backward(loss);
  CHECK(calls == 1);
  CHECK(x.RealGrad()[0] == doctest::Approx(3.5 * 2.0 * 1.5));
}

TEST_CASE("backward is bit-deterministic") {
  auto run = [] {
    Rng rng(5);
    Var x = RandomReal(rng, {7, 5});
    Var w = RandomReal(rng, {5, 3});
    Var b = RandomReal(rng, {3});
    Backward(SquaredNorm(Softmax(Relu(Linear(x, w, b)))));
    return w.RealGrad();
  };
  CHECK(run() == run());
}

TEST_CASE("no graph is retained without gradients") {
  Var a = Var::Real({3}, {1, 2, 3});
  Var b = Scale(a, 2.0);
  CHECK_FALSE(b.RequiresGrad());
  CHECK(b.node()->parents.empty());
}

TEST_CASE("primitive ops match finite differences") {
  const double kReal = 1e-5, kComplex = 1e-4;
  CheckPrimitive("add_sub_real", kReal, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomReal(rng, {3, 4}), b = RandomReal(rng, {3, 4});
    Var c = WeightsLike(rng, a);
    l = {a, b};
    return [=] { return Weighted(Sub(Add(a, b), Scale(b, 2.5)), c); };
  });
  CheckPrimitive("add_sub_complex", kComplex, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomComplex(rng, {2, 3}), b = RandomComplex(rng, {2, 3});
    Var c = WeightsLike(rng, a);
    l = {a, b};
    return [=] { return Weighted(Sub(Add(a, b), Scale(b, -1.5)), c); };
  });
  CheckPrimitive("affine_sum_mean", kReal, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomReal(rng, {6});
    l = {a};
    return [=] { return Add(Sum(Affine(a, 1.7, 0.3)), Scale(Mean(a), 3.0)); };
  });
  CheckPrimitive("squared_norm_and_norm", kComplex, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomComplex(rng, {2, 2, 3}), r = RandomReal(rng, {5});
    l = {a, r};
    return [=] { return Add(Add(Norm(a), SquaredNorm(a)), Add(Norm(r), SquaredNorm(r))); };
  });
  CheckPrimitive("activations", kReal, [](Rng& rng, std::vector<Var>& l) {
    // Keep away from the ReLU kink so central differences are valid.
    std::vector<double> v(12);
    for (double& x : v) x = (rng.Uniform() < 0.5 ? -1 : 1) * rng.Uniform(0.05, 2.0);
    Var a = Var::Real({12}, v, true);
    Var c1 = WeightsLike(rng, a), c2 = WeightsLike(rng, a), c3 = WeightsLike(rng, a);
    l = {a};
    return [=] {
      return Add(Add(Weighted(Relu(a), c1), Weighted(LeakyRelu(a, 0.2), c2)),
                 Weighted(Sigmoid(a), c3));
    };
  });
  CheckPrimitive("clamped_log", kReal, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomReal(rng, {8}, 0.1, 3.0);
    Var c = WeightsLike(rng, a);
    l = {a};
    return [=] { return Weighted(ClampedLog(a, 1e-7), c); };
  });
  CheckPrimitive("linear", kReal, [](Rng& rng, std::vector<Var>& l) {
    Var x = RandomReal(rng, {5, 4}), w = RandomReal(rng, {4, 3}), b = RandomReal(rng, {3});
    Var c = RandomReal(rng, {5, 3}, -1, 1, false);
    l = {x, w, b};
    return [=] { return Weighted(Linear(x, w, b), c); };
  });
  CheckPrimitive("slice_stack", kComplex, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomComplex(rng, {3, 2, 2}), b = RandomComplex(rng, {2, 2});
    Var c = RandomComplex(rng, {2, 2, 2}, false);
    l = {a, b};
    return [=] { return Weighted(Stack0({Slice0(a, 2), b}), c); };
  });
  CheckPrimitive("conv2d", kReal, [](Rng& rng, std::vector<Var>& l) {
    Var x = RandomReal(rng, {2, 7, 6}), k = RandomReal(rng, {3, 2, 3, 3}),
        b = RandomReal(rng, {3});
    Var y = Conv2d(x, k, b, 2, 1);
    Var c = WeightsLike(rng, y);
    l = {x, k, b};
    return [=] { return Weighted(Conv2d(x, k, b, 2, 1), c); };
  });
  CheckPrimitive("log_magnitude", kComplex, [](Rng& rng, std::vector<Var>& l) {
    Var z = RandomComplex(rng, {4, 3});
    Var c = RandomReal(rng, {4, 3}, -1, 1, false);
    l = {z};
    return [=] { return Weighted(LogMagnitude(z, 1e-6), c); };
  });
  CheckPrimitive("reshape_transpose_softmax", kReal, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomReal(rng, {6, 3}, -2, 2);
    Var c = RandomReal(rng, {3, 2, 3}, -1, 1, false);
    l = {a};
    return [=] { return Weighted(Reshape(Transpose2d(Softmax(a)), {3, 2, 3}), c); };
  });
  CheckPrimitive("reshape_complex", kComplex, [](Rng& rng, std::vector<Var>& l) {
    Var a = RandomComplex(rng, {2, 3});
    Var c = RandomComplex(rng, {3, 2}, false);
    l = {a};
    return [=] { return Weighted(Reshape(a, {3, 2}), c); };
  });
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(3);
  Var a = RandomReal(rng, {10, 4}, -50, 50, false);
  Var s = Softmax(a);
  for (int r = 0; r < 10; ++r) {
    double t = 0.0;
    for (int j = 0; j < 4; ++j) t += s.RealValues()[r * 4 + j];
    CHECK(t == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ops reject mismatched operands") {
  Var a = Var::Real({2}, {1, 2}), b = Var::Real({3}, {1, 2, 3});
  CHECK_THROWS_AS(Add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(Linear(Var::Real({2, 3}, std::vector<double>(6)),
                         Var::Real({2, 2}, std::vector<double>(4)),
                         Var::Real({2}, {0, 0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(Reshape(a, {3}), std::invalid_argument);
}
