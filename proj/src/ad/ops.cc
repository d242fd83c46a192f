// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/ad/ops.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace remixsep::ad {

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RowMajor>;
using ConstMapRM = Eigen::Map<const RowMajor>;

void CheckSame(const Var& a, const Var& b, const char* op) {
  if (a.IsComplex() != b.IsComplex() || a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": operand mismatch " +
                                ShapeString(a.shape()) + " vs " +
                                ShapeString(b.shape()));
}

void CheckReal(const Var& a, const char* op) {
  if (a.IsComplex())
    throw std::invalid_argument(std::string(op) + ": expects a real tensor");
}

Var AddSub(const Var& a, const Var& b, double sign, const char* name) {
  CheckSame(a, b, name);
  if (a.IsComplex()) {
    auto av = a.ComplexValues(), bv = b.ComplexValues();
    std::vector<cplx> out(av.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + sign * bv[i];
    return MakeComplex(a.shape(), std::move(out), {a, b}, [sign](Node& self) {
      const auto& g = self.cplx_grad;
      for (int k = 0; k < 2; ++k) {
        Node* p = self.parents[k].get();
        if (!p->requires_grad) continue;
        auto pg = p->ComplexGrad();
        double s = k == 0 ? 1.0 : sign;
        for (size_t i = 0; i < g.size(); ++i) pg[i] += s * g[i];
      }
    });
  }
  auto av = a.RealValues(), bv = b.RealValues();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + sign * bv[i];
  return MakeReal(a.shape(), std::move(out), {a, b}, [sign](Node& self) {
    auto& g = self.real_grad;
    for (int k = 0; k < 2; ++k) {
      Node* p = self.parents[k].get();
      if (!p->requires_grad) continue;
      auto pg = p->RealGrad();
      double s = k == 0 ? 1.0 : sign;
      for (size_t i = 0; i < g.size(); ++i) pg[i] += s * g[i];
    }
  });
}

}  // namespace

Var Add(const Var& a, const Var& b) { return AddSub(a, b, 1.0, "Add"); }
Var Sub(const Var& a, const Var& b) { return AddSub(a, b, -1.0, "Sub"); }

Var Scale(const Var& a, double s) {
  if (a.IsComplex()) {
    auto av = a.ComplexValues();
    std::vector<cplx> out(av.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = s * av[i];
    return MakeComplex(a.shape(), std::move(out), {a}, [s](Node& self) {
      auto pg = self.parents[0]->ComplexGrad();
      for (size_t i = 0; i < pg.size(); ++i) pg[i] += s * self.cplx_grad[i];
    });
  }
  return Affine(a, s, 0.0);
}

Var Affine(const Var& a, double s, double shift) {
  CheckReal(a, "Affine");
  auto av = a.RealValues();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = s * av[i] + shift;
  return MakeReal(a.shape(), std::move(out), {a}, [s](Node& self) {
    auto pg = self.parents[0]->RealGrad();
    for (size_t i = 0; i < pg.size(); ++i) pg[i] += s * self.real_grad[i];
  });
}

Var Sum(const Var& a) {
  CheckReal(a, "Sum");
  double acc = 0.0;
  for (double v : a.RealValues()) acc += v;
  return MakeReal({}, {acc}, {a}, [](Node& self) {
    auto pg = self.parents[0]->RealGrad();
    for (double& g : pg) g += self.real_grad[0];
  });
}

Var Mean(const Var& a) {
  return Scale(Sum(a), 1.0 / static_cast<double>(a.Numel()));
}

Var SquaredNorm(const Var& a) {
  double acc = 0.0;
  if (a.IsComplex()) {
    for (const cplx& v : a.ComplexValues()) acc += std::norm(v);
    return MakeReal({}, {acc}, {a}, [](Node& self) {
      Node* p = self.parents[0].get();
      auto pg = p->ComplexGrad();
      const double g = self.real_grad[0];
      for (size_t i = 0; i < pg.size(); ++i) pg[i] += 2.0 * g * p->cval[i];
    });
  }
  for (double v : a.RealValues()) acc += v * v;
  return MakeReal({}, {acc}, {a}, [](Node& self) {
    Node* p = self.parents[0].get();
    auto pg = p->RealGrad();
    const double g = self.real_grad[0];
    for (size_t i = 0; i < pg.size(); ++i) pg[i] += 2.0 * g * p->real[i];
  });
}

Var Norm(const Var& a) {
  double acc = 0.0;
  if (a.IsComplex())
    for (const cplx& v : a.ComplexValues()) acc += std::norm(v);
  else
    for (double v : a.RealValues()) acc += v * v;
  const double norm = std::sqrt(acc);
  return MakeReal({}, {norm}, {a}, [norm](Node& self) {
    if (norm == 0.0) return;
    Node* p = self.parents[0].get();
    const double g = self.real_grad[0] / norm;
    if (p->is_complex) {
      auto pg = p->ComplexGrad();
      for (size_t i = 0; i < pg.size(); ++i) pg[i] += g * p->cval[i];
    } else {
      auto pg = p->RealGrad();
      for (size_t i = 0; i < pg.size(); ++i) pg[i] += g * p->real[i];
    }
  });
}

Var Relu(const Var& a) { return LeakyRelu(a, 0.0); }

Var LeakyRelu(const Var& a, double slope) {
  CheckReal(a, "LeakyRelu");
  auto av = a.RealValues();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = av[i] > 0.0 ? av[i] : slope * av[i];
  return MakeReal(a.shape(), std::move(out), {a}, [slope](Node& self) {
    Node* p = self.parents[0].get();
    auto pg = p->RealGrad();
    for (size_t i = 0; i < pg.size(); ++i)
      pg[i] += self.real_grad[i] * (p->real[i] > 0.0 ? 1.0 : slope);
  });
}

Var Sigmoid(const Var& a) {
  CheckReal(a, "Sigmoid");
  auto av = a.RealValues();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i) {
    double v = av[i];
    out[i] = v >= 0 ? 1.0 / (1.0 + std::exp(-v))
                    : std::exp(v) / (1.0 + std::exp(v));
  }
  return MakeReal(a.shape(), std::move(out), {a}, [](Node& self) {
    auto pg = self.parents[0]->RealGrad();
    for (size_t i = 0; i < pg.size(); ++i) {
      double y = self.real[i];
      pg[i] += self.real_grad[i] * y * (1.0 - y);
    }
  });
}

Var ClampedLog(const Var& a, double floor) {
  CheckReal(a, "ClampedLog");
  auto av = a.RealValues();
  std::vector<double> out(av.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = std::log(std::max(av[i], floor));
  return MakeReal(a.shape(), std::move(out), {a}, [floor](Node& self) {
    Node* p = self.parents[0].get();
    auto pg = p->RealGrad();
    for (size_t i = 0; i < pg.size(); ++i)
      if (p->real[i] > floor) pg[i] += self.real_grad[i] / p->real[i];
  });
}

Var Linear(const Var& x, const Var& w, const Var& b) {
  CheckReal(x, "Linear");
  CheckReal(w, "Linear");
  CheckReal(b, "Linear");
  if (x.shape().size() != 2 || w.shape().size() != 2 ||
      b.shape().size() != 1 || x.shape()[1] != w.shape()[0] ||
      b.shape()[0] != w.shape()[1])
    throw std::invalid_argument("Linear: incompatible shapes " +
                                ShapeString(x.shape()) + " x " +
                                ShapeString(w.shape()));
  const int64_t rows = x.shape()[0], in = w.shape()[0], out = w.shape()[1];
  std::vector<double> y(rows * out);
  {
    ConstMapRM xm(x.RealValues().data(), rows, in);
    ConstMapRM wm(w.RealValues().data(), in, out);
    Eigen::Map<const Eigen::RowVectorXd> bm(b.RealValues().data(), out);
    MapRM ym(y.data(), rows, out);
    ym.noalias() = xm * wm;
    ym.rowwise() += bm;
  }
  return MakeReal({rows, out}, std::move(y), {x, w, b},
                  [rows, in, out](Node& self) {
    Node* xn = self.parents[0].get();
    Node* wn = self.parents[1].get();
    Node* bn = self.parents[2].get();
    ConstMapRM gy(self.real_grad.data(), rows, out);
    if (xn->requires_grad) {
      MapRM gx(xn->RealGrad().data(), rows, in);
      ConstMapRM wm(wn->real.data(), in, out);
      gx.noalias() += gy * wm.transpose();
    }
    if (wn->requires_grad) {
      MapRM gw(wn->RealGrad().data(), in, out);
      ConstMapRM xm(xn->real.data(), rows, in);
      gw.noalias() += xm.transpose() * gy;
    }
    if (bn->requires_grad) {
      Eigen::Map<Eigen::RowVectorXd> gb(bn->RealGrad().data(), out);
      gb += gy.colwise().sum();
    }
  });
}

Var Slice0(const Var& a, int64_t i) {
  if (a.shape().empty() || i < 0 || i >= a.shape()[0])
    throw std::out_of_range("Slice0: index out of range");
  Shape rest(a.shape().begin() + 1, a.shape().end());
  const int64_t block = NumElements(rest);
  const int64_t offset = i * block;
  if (a.IsComplex()) {
    auto av = a.ComplexValues();
    std::vector<cplx> out(av.begin() + offset, av.begin() + offset + block);
    return MakeComplex(rest, std::move(out), {a}, [offset](Node& self) {
      auto pg = self.parents[0]->ComplexGrad();
      for (size_t k = 0; k < self.cplx_grad.size(); ++k)
        pg[offset + k] += self.cplx_grad[k];
    });
  }
  auto av = a.RealValues();
  std::vector<double> out(av.begin() + offset, av.begin() + offset + block);
  return MakeReal(rest, std::move(out), {a}, [offset](Node& self) {
    auto pg = self.parents[0]->RealGrad();
    for (size_t k = 0; k < self.real_grad.size(); ++k)
      pg[offset + k] += self.real_grad[k];
  });
}

Var Stack0(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("Stack0: no inputs");
  for (const Var& p : parts) CheckSame(parts.front(), p, "Stack0");
  Shape shape = parts.front().shape();
  const int64_t block = NumElements(shape);
  shape.insert(shape.begin(), static_cast<int64_t>(parts.size()));
  if (parts.front().IsComplex()) {
    std::vector<cplx> out;
    out.reserve(block * parts.size());
    for (const Var& p : parts)
      out.insert(out.end(), p.ComplexValues().begin(), p.ComplexValues().end());
    return MakeComplex(shape, std::move(out), parts, [block](Node& self) {
      for (size_t k = 0; k < self.parents.size(); ++k) {
        Node* p = self.parents[k].get();
        if (!p->requires_grad) continue;
        auto pg = p->ComplexGrad();
        for (int64_t j = 0; j < block; ++j) pg[j] += self.cplx_grad[k * block + j];
      }
    });
  }
  std::vector<double> out;
  out.reserve(block * parts.size());
  for (const Var& p : parts)
    out.insert(out.end(), p.RealValues().begin(), p.RealValues().end());
  return MakeReal(shape, std::move(out), parts, [block](Node& self) {
    for (size_t k = 0; k < self.parents.size(); ++k) {
      Node* p = self.parents[k].get();
      if (!p->requires_grad) continue;
      auto pg = p->RealGrad();
      for (int64_t j = 0; j < block; ++j) pg[j] += self.real_grad[k * block + j];
    }
  });
}

Var Conv2d(const Var& x, const Var& kernel, const Var& bias, int stride,
           int pad) {
  CheckReal(x, "Conv2d");
  CheckReal(kernel, "Conv2d");
  CheckReal(bias, "Conv2d");
  if (x.shape().size() != 3 || kernel.shape().size() != 4 ||
      bias.shape().size() != 1 || kernel.shape()[1] != x.shape()[0] ||
      bias.shape()[0] != kernel.shape()[0] || stride < 1 || pad < 0)
    throw std::invalid_argument("Conv2d: incompatible shapes " +
                                ShapeString(x.shape()) + " * " +
                                ShapeString(kernel.shape()));
  const int64_t C = x.shape()[0], H = x.shape()[1], W = x.shape()[2];
  const int64_t O = kernel.shape()[0], KH = kernel.shape()[2],
                KW = kernel.shape()[3];
  const int64_t OH = (H + 2 * pad - KH) / stride + 1;
  const int64_t OW = (W + 2 * pad - KW) / stride + 1;
  if (OH < 1 || OW < 1)
    throw std::invalid_argument("Conv2d: input smaller than kernel");

  auto xv = x.RealValues();
  auto kv = kernel.RealValues();
  auto bv = bias.RealValues();
  std::vector<double> y(O * OH * OW);
  for (int64_t o = 0; o < O; ++o)
    for (int64_t oh = 0; oh < OH; ++oh)
      for (int64_t ow = 0; ow < OW; ++ow) {
        double acc = bv[o];
        for (int64_t c = 0; c < C; ++c)
          for (int64_t kh = 0; kh < KH; ++kh) {
            const int64_t ih = oh * stride - pad + kh;
            if (ih < 0 || ih >= H) continue;
            for (int64_t kw = 0; kw < KW; ++kw) {
              const int64_t iw = ow * stride - pad + kw;
              if (iw < 0 || iw >= W) continue;
              acc += kv[((o * C + c) * KH + kh) * KW + kw] *
                     xv[(c * H + ih) * W + iw];
            }
          }
        y[(o * OH + oh) * OW + ow] = acc;
      }

  return MakeReal(
      {O, OH, OW}, std::move(y), {x, kernel, bias},
      [=](Node& self) {
        Node* xn = self.parents[0].get();
        Node* kn = self.parents[1].get();
        Node* bn = self.parents[2].get();
        const auto& g = self.real_grad;
        std::span<double> gx, gk, gb;
        if (xn->requires_grad) gx = xn->RealGrad();
        if (kn->requires_grad) gk = kn->RealGrad();
        if (bn->requires_grad) gb = bn->RealGrad();
        for (int64_t o = 0; o < O; ++o)
          for (int64_t oh = 0; oh < OH; ++oh)
            for (int64_t ow = 0; ow < OW; ++ow) {
              const double go = g[(o * OH + oh) * OW + ow];
              if (go == 0.0) continue;
              if (!gb.empty()) gb[o] += go;
              for (int64_t c = 0; c < C; ++c)
                for (int64_t kh = 0; kh < KH; ++kh) {
                  const int64_t ih = oh * stride - pad + kh;
                  if (ih < 0 || ih >= H) continue;
                  for (int64_t kw = 0; kw < KW; ++kw) {
                    const int64_t iw = ow * stride - pad + kw;
                    if (iw < 0 || iw >= W) continue;
                    const int64_t ki = ((o * C + c) * KH + kh) * KW + kw;
                    const int64_t xi = (c * H + ih) * W + iw;
                    if (!gk.empty()) gk[ki] += go * xn->real[xi];
                    if (!gx.empty()) gx[xi] += go * kn->real[ki];
                  }
                }
            }
      });
}

Var LogMagnitude(const Var& z, double eps) {
  if (!z.IsComplex())
    throw std::invalid_argument("LogMagnitude: expects a complex tensor");
  auto zv = z.ComplexValues();
  std::vector<double> out(zv.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = 0.5 * std::log(std::norm(zv[i]) + eps);
  return MakeReal(z.shape(), std::move(out), {z}, [eps](Node& self) {
    Node* p = self.parents[0].get();
    auto pg = p->ComplexGrad();
    for (size_t i = 0; i < pg.size(); ++i)
      pg[i] += self.real_grad[i] * p->cval[i] / (std::norm(p->cval[i]) + eps);
  });
}

Var Reshape(const Var& a, Shape shape) {
  if (NumElements(shape) != a.Numel())
    throw std::invalid_argument("Reshape: " + ShapeString(a.shape()) +
                                " -> " + ShapeString(shape));
  if (a.IsComplex()) {
    std::vector<cplx> v(a.ComplexValues().begin(), a.ComplexValues().end());
    return MakeComplex(std::move(shape), std::move(v), {a}, [](Node& self) {
      auto pg = self.parents[0]->ComplexGrad();
      for (size_t i = 0; i < pg.size(); ++i) pg[i] += self.cplx_grad[i];
    });
  }
  std::vector<double> v(a.RealValues().begin(), a.RealValues().end());
  return MakeReal(std::move(shape), std::move(v), {a}, [](Node& self) {
    auto pg = self.parents[0]->RealGrad();
    for (size_t i = 0; i < pg.size(); ++i) pg[i] += self.real_grad[i];
  });
}

Var Transpose2d(const Var& a) {
  CheckReal(a, "Transpose2d");
  if (a.shape().size() != 2)
    throw std::invalid_argument("Transpose2d: expects a 2-d tensor");
  const int64_t r = a.shape()[0], c = a.shape()[1];
  auto av = a.RealValues();
  std::vector<double> out(av.size());
  for (int64_t i = 0; i < r; ++i)
    for (int64_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  return MakeReal({c, r}, std::move(out), {a}, [r, c](Node& self) {
    auto pg = self.parents[0]->RealGrad();
    for (int64_t i = 0; i < r; ++i)
      for (int64_t j = 0; j < c; ++j) pg[i * c + j] += self.real_grad[j * r + i];
  });
}

Var Softmax(const Var& a) {
  CheckReal(a, "Softmax");
  if (a.shape().empty())
    throw std::invalid_argument("Softmax: expects at least one axis");
  const int64_t c = a.shape().back();
  const int64_t rows = c == 0 ? 0 : a.Numel() / c;
  auto av = a.RealValues();
  std::vector<double> out(av.size());
  for (int64_t i = 0; i < rows; ++i) {
    const double* in = av.data() + i * c;
    double* o = out.data() + i * c;
    double peak = in[0];
    for (int64_t j = 1; j < c; ++j) peak = std::max(peak, in[j]);
    double total = 0.0;
    for (int64_t j = 0; j < c; ++j) total += (o[j] = std::exp(in[j] - peak));
    for (int64_t j = 0; j < c; ++j) o[j] /= total;
  }
  return MakeReal(a.shape(), std::move(out), {a}, [rows, c](Node& self) {
    auto pg = self.parents[0]->RealGrad();
    for (int64_t i = 0; i < rows; ++i) {
      const double* y = self.real.data() + i * c;
      const double* g = self.real_grad.data() + i * c;
      double dot = 0.0;
      for (int64_t j = 0; j < c; ++j) dot += y[j] * g[j];
      for (int64_t j = 0; j < c; ++j) pg[i * c + j] += y[j] * (g[j] - dot);
    }
  });
}

}  // namespace remixsep::ad
