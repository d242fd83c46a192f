// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_NN_PARAMETERS_H_
#define REMIXSEP_NN_PARAMETERS_H_

#include <map>
#include <string>
#include <vector>

#include "remixsep/ad/var.h"

namespace remixsep {

struct Tensor {
  ad::Shape shape;
  std::vector<double> values;
};

// Named real tensors kept in insertion order, so iteration (and therefore
// hashing, checkpointing and optimizer updates) is deterministic.
class ParameterSet {
 public:
  void Add(const std::string& name, ad::Shape shape, std::vector<double> values);
  bool Has(const std::string& name) const { return tensors_.count(name) > 0; }
  const Tensor& Get(const std::string& name) const;
  Tensor& Get(const std::string& name);
  const std::vector<std::string>& Names() const { return order_; }
  size_t NumTensors() const { return order_.size(); }
  size_t NumValues() const;

  // Same names and shapes.
  bool SameLayout(const ParameterSet& o) const;
  // Copy with every value zeroed.
  ParameterSet ZerosLike() const;
  // FNV-1a over names, shapes and raw value bytes.
  std::string Hash() const;

  // Graph leaves holding copies of the current values.
  std::map<std::string, ad::Var> Leaves(bool requires_grad) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, Tensor> tensors_;
};

using GradientMap = std::map<std::string, std::vector<double>>;

// Adjoints of the given leaves (zeros where no gradient arrived).
GradientMap CollectGradients(const std::map<std::string, ad::Var>& leaves);
// into += g, name by name; missing names are inserted.
void AccumulateGradients(GradientMap& into, const GradientMap& g);
void ScaleGradients(GradientMap& g, double s);
bool AllFinite(const GradientMap& g);

}  // namespace remixsep

#endif  // REMIXSEP_NN_PARAMETERS_H_
