// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/ad/var.h"

#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace remixsep::ad {

int64_t NumElements(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string ShapeString(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

std::span<double> Node::RealGrad() {
  if (real_grad.empty()) real_grad.assign(Numel(), 0.0);
  return real_grad;
}

std::span<cplx> Node::ComplexGrad() {
  if (cplx_grad.empty()) cplx_grad.assign(Numel(), cplx(0.0, 0.0));
  return cplx_grad;
}

Var Var::Real(Shape shape, std::vector<double> values, bool requires_grad) {
  if (static_cast<int64_t>(values.size()) != NumElements(shape))
    throw std::invalid_argument("Var::Real: value count does not match shape " +
                                ShapeString(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->real = std::move(values);
  n->requires_grad = requires_grad;
  return Var(n);
}

Var Var::Complex(Shape shape, std::vector<cplx> values, bool requires_grad) {
  if (static_cast<int64_t>(values.size()) != NumElements(shape))
    throw std::invalid_argument(
        "Var::Complex: value count does not match shape " + ShapeString(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->is_complex = true;
  n->cval = std::move(values);
  n->requires_grad = requires_grad;
  return Var(n);
}

std::vector<double> Var::RealGrad() const {
  if (node_->real_grad.empty()) return std::vector<double>(Numel(), 0.0);
  return node_->real_grad;
}

std::vector<cplx> Var::ComplexGrad() const {
  if (node_->cplx_grad.empty())
    return std::vector<cplx>(Numel(), cplx(0.0, 0.0));
  return node_->cplx_grad;
}

double Var::Item() const {
  if (IsComplex() || Numel() != 1)
    throw std::invalid_argument("Var::Item: not a real scalar");
  return node_->real[0];
}

namespace {

std::shared_ptr<Node> NewResult(Shape shape, const std::vector<Var>& parents,
                                std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  for (const Var& p : parents)
    if (p.RequiresGrad()) n->requires_grad = true;
  if (n->requires_grad) {
    for (const Var& p : parents) n->parents.push_back(p.ptr());
    n->backward = std::move(backward);
  }
  return n;
}

}  // namespace

Var MakeReal(Shape shape, std::vector<double> values,
             const std::vector<Var>& parents,
             std::function<void(Node&)> backward) {
  auto n = NewResult(std::move(shape), parents, std::move(backward));
  if (static_cast<int64_t>(values.size()) != n->Numel())
    throw std::logic_error("MakeReal: value count does not match shape");
  n->real = std::move(values);
  return Var(n);
}

Var MakeComplex(Shape shape, std::vector<cplx> values,
                const std::vector<Var>& parents,
                std::function<void(Node&)> backward) {
  auto n = NewResult(std::move(shape), parents, std::move(backward));
  if (static_cast<int64_t>(values.size()) != n->Numel())
    throw std::logic_error("MakeComplex: value count does not match shape");
  n->is_complex = true;
  n->cval = std::move(values);
  return Var(n);
}

void Backward(const Var& loss) {
  if (!loss.Defined() || loss.IsComplex() || loss.Numel() != 1)
    throw std::invalid_argument("Backward: loss must be a real scalar");
  if (!loss.RequiresGrad()) return;

  // Iterative DFS; state 1 = on the stack, 2 = finished.
  std::vector<Node*> order;
  std::unordered_map<Node*, int> state;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  state[loss.node()] = 1;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (!p->requires_grad) continue;
      int& s = state[p];
      if (s == 1) throw std::logic_error("Backward: cycle in graph");
      if (s == 0) {
        s = 1;
        stack.emplace_back(p, 0);
      }
    } else {
      state[node] = 2;
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->RealGrad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && n->HasGrad()) n->backward(*n);
  }
}

Var Detach(const Var& v) {
  if (v.IsComplex())
    return Var::Complex(v.shape(), std::vector<cplx>(v.ComplexValues().begin(),
                                                     v.ComplexValues().end()));
  return Var::Real(v.shape(), std::vector<double>(v.RealValues().begin(),
                                                  v.RealValues().end()));
}

}  // namespace remixsep::ad
