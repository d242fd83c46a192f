// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/nn/parameters.h"

#include <cmath>
#include <stdexcept>

#include "remixsep/util/hash.h"

namespace remixsep {

void ParameterSet::Add(const std::string& name, ad::Shape shape,
                       std::vector<double> values) {
  if (Has(name)) throw std::invalid_argument("ParameterSet: duplicate " + name);
  if (ad::NumElements(shape) != static_cast<int64_t>(values.size()))
    throw std::invalid_argument("ParameterSet: size mismatch for " + name);
  order_.push_back(name);
  tensors_[name] = Tensor{std::move(shape), std::move(values)};
}

const Tensor& ParameterSet::Get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end())
    throw std::out_of_range("ParameterSet: no parameter " + name);
  return it->second;
}

Tensor& ParameterSet::Get(const std::string& name) {
  return const_cast<Tensor&>(std::as_const(*this).Get(name));
}

size_t ParameterSet::NumValues() const {
  size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.values.size();
  return n;
}

bool ParameterSet::SameLayout(const ParameterSet& o) const {
  if (order_ != o.order_) return false;
  for (const auto& name : order_)
    if (Get(name).shape != o.Get(name).shape) return false;
  return true;
}

ParameterSet ParameterSet::ZerosLike() const {
  ParameterSet out;
  for (const auto& name : order_) {
    const Tensor& t = Get(name);
    out.Add(name, t.shape, std::vector<double>(t.values.size(), 0.0));
  }
  return out;
}

std::string ParameterSet::Hash() const {
  Fnv1a h;
  for (const auto& name : order_) {
    const Tensor& t = Get(name);
    h.Update(name);
    for (int64_t d : t.shape) h.Update(&d, sizeof(d));
    h.Update(t.values);
  }
  return h.HexDigest();
}

std::map<std::string, ad::Var> ParameterSet::Leaves(bool requires_grad) const {
  std::map<std::string, ad::Var> out;
  for (const auto& name : order_) {
    const Tensor& t = Get(name);
    out[name] = ad::Var::Real(t.shape, t.values, requires_grad);
  }
  return out;
}

GradientMap CollectGradients(const std::map<std::string, ad::Var>& leaves) {
  GradientMap g;
  for (const auto& [name, v] : leaves) g[name] = v.RealGrad();
  return g;
}

void AccumulateGradients(GradientMap& into, const GradientMap& g) {
  for (const auto& [name, v] : g) {
    auto it = into.find(name);
    if (it == into.end()) {
      into[name] = v;
      continue;
    }
    if (it->second.size() != v.size())
      throw std::invalid_argument("AccumulateGradients: size mismatch for " + name);
    for (size_t i = 0; i < v.size(); ++i) it->second[i] += v[i];
  }
}

void ScaleGradients(GradientMap& g, double s) {
  for (auto& [name, v] : g)
    for (double& x : v) x *= s;
}

bool AllFinite(const GradientMap& g) {
  for (const auto& [name, v] : g)
    for (double x : v)
      if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace remixsep
