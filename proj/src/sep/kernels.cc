// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "kernels.h"

#include <Eigen/Dense>
#include <cmath>

namespace remixsep::kernels {

namespace {

using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<CMat>;
using ConstCMap = Eigen::Map<const CMat>;

size_t ScmOffset(const Dims& d, int kind, int i, int f) {
  const size_t mm = static_cast<size_t>(d.mics) * d.mics;
  return ((static_cast<size_t>(kind) * d.sources + i) * d.bins + f) * mm;
}

size_t XIndex(const Dims& d, int m, int f, int t) {
  return (static_cast<size_t>(m) * d.bins + f) * d.frames + t;
}

size_t MaskIndex(const Dims& d, int i, int f, int t) {
  return (static_cast<size_t>(i) * d.bins + f) * d.frames + t;
}

double MeanChannelPower(const Dims& d, std::span<const cplx> x, int f) {
  double p = 0.0;
  for (int m = 0; m < d.mics; ++m)
    for (int t = 0; t < d.frames; ++t) p += std::norm(x[XIndex(d, m, f, t)]);
  return p / (static_cast<double>(d.frames) * d.mics);
}

bool AllFinite(const CMat& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i].real()) || !std::isfinite(a.data()[i].imag()))
      return false;
  return true;
}

}  // namespace

void ScmForward(const Dims& d, std::span<const cplx> x,
                std::span<const double> masks, std::span<cplx> scm,
                std::span<uint8_t> fallback) {
  const int M = d.mics;
  std::vector<cplx> outer(static_cast<size_t>(M) * M);
  std::vector<double> weight(2 * d.sources);
  std::vector<cplx> acc(2 * d.sources * M * M);
  for (int f = 0; f < d.bins; ++f) {
    std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
    std::fill(weight.begin(), weight.end(), 0.0);
    for (int t = 0; t < d.frames; ++t) {
      // Upper triangle only; the lower one is mirrored so the result is
      // exactly Hermitian.
      for (int a = 0; a < M; ++a) {
        const cplx xa = x[XIndex(d, a, f, t)];
        outer[a * M + a] = cplx(std::norm(xa), 0.0);
        for (int b = a + 1; b < M; ++b)
          outer[a * M + b] = xa * std::conj(x[XIndex(d, b, f, t)]);
      }
      for (int i = 0; i < d.sources; ++i) {
        const double ms = masks[MaskIndex(d, i, f, t)];
        const double mn = 1.0 - ms;
        weight[i] += ms;
        weight[d.sources + i] += mn;
        cplx* as = acc.data() + static_cast<size_t>(i) * M * M;
        cplx* an = acc.data() + static_cast<size_t>(d.sources + i) * M * M;
        for (int a = 0; a < M; ++a)
          for (int b = a; b < M; ++b) {
            as[a * M + b] += ms * outer[a * M + b];
            an[a * M + b] += mn * outer[a * M + b];
          }
      }
    }
    double fallback_power = -1.0;
    for (int kind = 0; kind < 2; ++kind)
      for (int i = 0; i < d.sources; ++i) {
        cplx* dst = scm.data() + ScmOffset(d, kind, i, f);
        const double w = weight[kind * d.sources + i];
        const cplx* src = acc.data() + static_cast<size_t>(kind * d.sources + i) * M * M;
        const bool use_fallback = !(w > kMinMaskWeight);
        fallback[(static_cast<size_t>(kind) * d.sources + i) * d.bins + f] =
            use_fallback;
        if (use_fallback) {
          if (fallback_power < 0.0) fallback_power = MeanChannelPower(d, x, f);
          for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
              dst[a * M + b] =
                  a == b ? cplx(fallback_power + kFallbackFloor, 0.0) : cplx(0.0, 0.0);
          continue;
        }
        for (int a = 0; a < M; ++a) {
          dst[a * M + a] = cplx(src[a * M + a].real() / w, 0.0);
          for (int b = a + 1; b < M; ++b) {
            dst[a * M + b] = src[a * M + b] / w;
            dst[b * M + a] = std::conj(dst[a * M + b]);
          }
        }
      }
  }
}

void ScmBackward(const Dims& d, std::span<const cplx> x,
                 std::span<const double> masks, std::span<const cplx> scm,
                 std::span<const uint8_t> fallback,
                 std::span<const cplx> grad_scm, std::span<cplx> grad_x,
                 std::span<double> grad_masks) {
  const int M = d.mics;
  const size_t mm = static_cast<size_t>(M) * M;
  CMat sym(M, M);
  std::vector<cplx> xt(M), hx(M);
  for (int kind = 0; kind < 2; ++kind)
    for (int i = 0; i < d.sources; ++i)
      for (int f = 0; f < d.bins; ++f) {
        const size_t off = ScmOffset(d, kind, i, f);
        ConstCMap g(grad_scm.data() + off, M, M);
        ConstCMap r(scm.data() + off, M, M);
        const bool fb =
            fallback[(static_cast<size_t>(kind) * d.sources + i) * d.bins + f];
        if (fb) {
          // R = (mean power + floor) I depends on x only.
          if (grad_x.empty()) continue;
          const double gtr = g.trace().real();
          const double k = 2.0 * gtr / (static_cast<double>(d.frames) * M);
          for (int m = 0; m < M; ++m)
            for (int t = 0; t < d.frames; ++t)
              grad_x[XIndex(d, m, f, t)] += k * x[XIndex(d, m, f, t)];
          continue;
        }
        double weight = 0.0;
        for (int t = 0; t < d.frames; ++t) {
          double m = masks[MaskIndex(d, i, f, t)];
          weight += kind == 0 ? m : 1.0 - m;
        }
        sym = g + g.adjoint();
        // Re tr(R^H G), shared by every frame's mask gradient.
        cplx rg(0.0, 0.0);
        for (size_t k = 0; k < mm; ++k) rg += std::conj(r.data()[k]) * g.data()[k];
        const double sign = kind == 0 ? 1.0 : -1.0;
        for (int t = 0; t < d.frames; ++t) {
          for (int m = 0; m < M; ++m) xt[m] = x[XIndex(d, m, f, t)];
          if (!grad_masks.empty()) {
            // Re(x^H G x)
            cplx q(0.0, 0.0);
            for (int a = 0; a < M; ++a) {
              cplx row(0.0, 0.0);
              for (int b = 0; b < M; ++b) row += g(a, b) * xt[b];
              q += std::conj(xt[a]) * row;
            }
            grad_masks[MaskIndex(d, i, f, t)] +=
                sign * (q.real() - rg.real()) / weight;
          }
          if (!grad_x.empty()) {
            double m = masks[MaskIndex(d, i, f, t)];
            const double w = (kind == 0 ? m : 1.0 - m) / weight;
            if (w == 0.0) continue;
            for (int a = 0; a < M; ++a) {
              cplx acc(0.0, 0.0);
              for (int b = 0; b < M; ++b) acc += sym(a, b) * xt[b];
              grad_x[XIndex(d, a, f, t)] += w * acc;
            }
          }
        }
      }
}

void MvdrForward(const Dims& d, std::span<const cplx> scm, double loading,
                 MvdrForm form, std::span<cplx> w,
                 std::span<uint8_t> degenerate) {
  const int M = d.mics;
  const size_t mm = static_cast<size_t>(M) * M;
  CMat a(M, M), p(M, M);
  for (int i = 0; i < d.sources; ++i)
    for (int f = 0; f < d.bins; ++f) {
      ConstCMap rs(scm.data() + ScmOffset(d, 0, i, f), M, M);
      ConstCMap rn(scm.data() + ScmOffset(d, 1, i, f), M, M);
      if (form == MvdrForm::kInverse) {
        a = rn;
        const cplx load = loading * rn.trace() / static_cast<double>(M);
        for (int k = 0; k < M; ++k) a(k, k) += load;
        p = a.partialPivLu().solve(CMat(rs));
      } else {
        p = rn * rs;
      }
      const cplx tau = p.trace();
      CMap out(w.data() + (static_cast<size_t>(i) * d.bins + f) * mm, M, M);
      const bool bad = !(std::abs(tau) >= kMinTrace) || !AllFinite(p);
      degenerate[static_cast<size_t>(i) * d.bins + f] = bad;
      if (bad) {
        out.setIdentity();
        out /= static_cast<double>(M);
      } else {
        out = p / tau;
      }
    }
}

void MvdrBackward(const Dims& d, std::span<const cplx> scm, double loading,
                  MvdrForm form, std::span<const uint8_t> degenerate,
                  std::span<const cplx> grad_w, std::span<cplx> grad_scm) {
  const int M = d.mics;
  const size_t mm = static_cast<size_t>(M) * M;
  CMat a(M, M), p(M, M), gp(M, M), grs(M, M), gra(M, M), grn(M, M);
  for (int i = 0; i < d.sources; ++i)
    for (int f = 0; f < d.bins; ++f) {
      if (degenerate[static_cast<size_t>(i) * d.bins + f]) continue;
      const size_t s_off = ScmOffset(d, 0, i, f);
      const size_t n_off = ScmOffset(d, 1, i, f);
      ConstCMap rs(scm.data() + s_off, M, M);
      ConstCMap rn(scm.data() + n_off, M, M);
      ConstCMap gw(grad_w.data() + (static_cast<size_t>(i) * d.bins + f) * mm, M, M);

      Eigen::PartialPivLU<CMat> lu;
      if (form == MvdrForm::kInverse) {
        a = rn;
        const cplx load = loading * rn.trace() / static_cast<double>(M);
        for (int k = 0; k < M; ++k) a(k, k) += load;
        lu.compute(a);
        p = lu.solve(CMat(rs));
      } else {
        p = rn * rs;
      }
      const cplx tau = p.trace();
      // W = P / tau
      gp = gw / std::conj(tau);
      cplx gtau(0.0, 0.0);
      for (size_t k = 0; k < mm; ++k)
        gtau += std::conj(-p.data()[k] / (tau * tau)) * gw.data()[k];
      for (int k = 0; k < M; ++k) gp(k, k) += gtau;

      if (form == MvdrForm::kInverse) {
        // P = A^-1 Rs: grad_Rs = A^-H gP, grad_A = -grad_Rs P^H.
        grs = a.adjoint().partialPivLu().solve(gp);
        gra = -grs * p.adjoint();
        grn = gra;
        const cplx tr = gra.trace() * (loading / static_cast<double>(M));
        for (int k = 0; k < M; ++k) grn(k, k) += tr;
      } else {
        // P = Rn Rs
        grn = gp * rs.adjoint();
        grs = rn.adjoint() * gp;
      }
      CMap(grad_scm.data() + s_off, M, M) += grs;
      CMap(grad_scm.data() + n_off, M, M) += grn;
    }
}

void BeamformForward(const Dims& d, std::span<const cplx> w,
                     std::span<const cplx> x, std::span<cplx> out) {
  const int M = d.mics, T = d.frames;
  const size_t mm = static_cast<size_t>(M) * M;
  std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
  for (int i = 0; i < d.sources; ++i)
    for (int f = 0; f < d.bins; ++f) {
      const cplx* wf = w.data() + (static_cast<size_t>(i) * d.bins + f) * mm;
      for (int m = 0; m < M; ++m) {
        cplx* dst = out.data() + ((static_cast<size_t>(i) * M + m) * d.bins + f) * T;
        for (int a = 0; a < M; ++a) {
          const cplx c = std::conj(wf[a * M + m]);
          const cplx* src = x.data() + XIndex(d, a, f, 0);
          for (int t = 0; t < T; ++t) dst[t] += c * src[t];
        }
      }
    }
}

void BeamformBackward(const Dims& d, std::span<const cplx> w,
                      std::span<const cplx> x, std::span<const cplx> grad_out,
                      std::span<cplx> grad_w, std::span<cplx> grad_x) {
  const int M = d.mics, T = d.frames;
  const size_t mm = static_cast<size_t>(M) * M;
  for (int i = 0; i < d.sources; ++i)
    for (int f = 0; f < d.bins; ++f) {
      const size_t woff = (static_cast<size_t>(i) * d.bins + f) * mm;
      for (int m = 0; m < M; ++m) {
        const cplx* g =
            grad_out.data() + ((static_cast<size_t>(i) * M + m) * d.bins + f) * T;
        for (int a = 0; a < M; ++a) {
          const cplx* xs = x.data() + XIndex(d, a, f, 0);
          if (!grad_x.empty()) {
            const cplx c = w[woff + a * M + m];
            cplx* gx = grad_x.data() + XIndex(d, a, f, 0);
            for (int t = 0; t < T; ++t) gx[t] += c * g[t];
          }
          if (!grad_w.empty()) {
            cplx acc(0.0, 0.0);
            for (int t = 0; t < T; ++t) acc += xs[t] * std::conj(g[t]);
            grad_w[woff + a * M + m] += acc;
          }
        }
      }
    }
}

}  // namespace remixsep::kernels
