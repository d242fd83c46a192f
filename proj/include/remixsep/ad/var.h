// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_AD_VAR_H_
#define REMIXSEP_AD_VAR_H_

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace remixsep::ad {

using cplx = std::complex<double>;
using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& s);
std::string ShapeString(const Shape& s);

// Gradient convention: for a real loss L and complex entry z = a + ib the
// stored adjoint is dL/da + i dL/db, i.e. twice dL/d(conj z). It is the
// steepest-ascent direction in the complex plane, so z -= lr * grad descends
// exactly as for real parameters. For a holomorphic w = f(z) the chain rule
// reads grad_z += conj(f'(z)) * grad_w.
struct Node {
  Shape shape;
  bool is_complex = false;
  bool requires_grad = false;
  std::vector<double> real;
  std::vector<cplx> cval;
  std::vector<double> real_grad;
  std::vector<cplx> cplx_grad;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's adjoint and accumulates into the parents' adjoints.
  std::function<void(Node&)> backward;

  int64_t Numel() const { return NumElements(shape); }
  // Lazily zero-initialized adjoint buffers.
  std::span<double> RealGrad();
  std::span<cplx> ComplexGrad();
  bool HasGrad() const {
    return is_complex ? !cplx_grad.empty() : !real_grad.empty();
  }
};

// Differentiable tensor handle: a value plus, once Backward() has run, its
// adjoint. Copies share the underlying node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var Real(Shape shape, std::vector<double> values,
                  bool requires_grad = false);
  static Var Complex(Shape shape, std::vector<cplx> values,
                     bool requires_grad = false);
  static Var Scalar(double v, bool requires_grad = false) {
    return Real({}, {v}, requires_grad);
  }

  bool Defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t Numel() const { return node_->Numel(); }
  bool IsComplex() const { return node_->is_complex; }
  bool RequiresGrad() const { return node_->requires_grad; }

  std::span<const double> RealValues() const { return node_->real; }
  std::span<const cplx> ComplexValues() const { return node_->cval; }
  // Zero-filled when no adjoint reached this node.
  std::vector<double> RealGrad() const;
  std::vector<cplx> ComplexGrad() const;

  // Value of a real scalar.
  double Item() const;

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& ptr() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Builds an op result. The node requires a gradient iff any parent does;
// otherwise the backward closure is dropped and parents are not retained.
Var MakeReal(Shape shape, std::vector<double> values,
             const std::vector<Var>& parents,
             std::function<void(Node&)> backward);
Var MakeComplex(Shape shape, std::vector<cplx> values,
                const std::vector<Var>& parents,
                std::function<void(Node&)> backward);

// Reverse sweep from a real scalar. Every node reachable through
// gradient-requiring edges is visited once, in reverse topological order.
// Throws std::invalid_argument for a non-scalar or complex loss and
// std::logic_error if a cycle is found.
void Backward(const Var& loss);

// Value copy with no history.
Var Detach(const Var& v);

}  // namespace remixsep::ad

#endif  // REMIXSEP_AD_VAR_H_
