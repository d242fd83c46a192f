// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Central finite-difference checker for the AD engine, shared by the unit
// and acceptance tests.

#ifndef REMIXSEP_TESTS_GRAD_CHECK_H_
#define REMIXSEP_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "remixsep/ad/var.h"
#include "remixsep/util/rng.h"

namespace remixsep::testing {

// ||analytic - numeric|| / max(||numeric||, floor) over all entries of all
// leaves; complex entries contribute real and imaginary parts separately.
inline double GradientError(const std::function<ad::Var()>& loss_fn,
                            const std::vector<ad::Var>& leaves,
                            double step = 1e-5, double floor = 1e-12) {
  for (const auto& v : leaves) {
    v.node()->real_grad.clear();
    v.node()->cplx_grad.clear();
  }
  ad::Backward(loss_fn());
  std::vector<double> analytic, numeric;
  auto eval = [&] { return loss_fn().Item(); };
  for (const auto& v : leaves) {
    ad::Node* n = v.node();
    if (n->is_complex) {
      auto g = v.ComplexGrad();
      for (size_t i = 0; i < n->cval.size(); ++i) {
        const std::complex<double> orig = n->cval[i];
        for (int part = 0; part < 2; ++part) {
          std::complex<double> d = part == 0 ? std::complex<double>(step, 0)
                                             : std::complex<double>(0, step);
          n->cval[i] = orig + d;
          double fp = eval();
          n->cval[i] = orig - d;
          double fm = eval();
          n->cval[i] = orig;
          numeric.push_back((fp - fm) / (2 * step));
          analytic.push_back(part == 0 ? g[i].real() : g[i].imag());
        }
      }
    } else {
      auto g = v.RealGrad();
      for (size_t i = 0; i < n->real.size(); ++i) {
        const double orig = n->real[i];
        n->real[i] = orig + step;
        double fp = eval();
        n->real[i] = orig - step;
        double fm = eval();
        n->real[i] = orig;
        numeric.push_back((fp - fm) / (2 * step));
        analytic.push_back(g[i]);
      }
    }
  }
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    num += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    den += numeric[i] * numeric[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

inline ad::Var RandomReal(Rng& rng, ad::Shape shape, double lo = -1.0,
                          double hi = 1.0, bool requires_grad = true) {
  std::vector<double> v(ad::NumElements(shape));
  for (double& x : v) x = rng.Uniform(lo, hi);
  return ad::Var::Real(std::move(shape), std::move(v), requires_grad);
}

inline ad::Var RandomComplex(Rng& rng, ad::Shape shape, bool requires_grad = true) {
  std::vector<std::complex<double>> v(ad::NumElements(shape));
  for (auto& x : v) x = {rng.Normal(), rng.Normal()};
  return ad::Var::Complex(std::move(shape), std::move(v), requires_grad);
}

}  // namespace remixsep::testing

#endif  // REMIXSEP_TESTS_GRAD_CHECK_H_
