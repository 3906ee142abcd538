#pragma once

#include <limits>
#include <span>
#include <vector>

#include "harmsurf/analytic.hpp"
#include "harmsurf/common.hpp"
#include "harmsurf/errors.hpp"

namespace harmsurf {

/// Helical motif: the angular singularity pitch * arg(z - center). `pitch` is
/// the vertical rise per full turn divided by 2*pi, signed for handedness.
struct Motif {
  double pitch = 0.0;
  Cplx center{0.0, 0.0};
};

/// Real harmonic function assembled from weighted Re/Im parts of analytic
/// expressions, arg-of-analytic terms (Im log f, the cut-aware kind), and
/// helical motif terms a*arg(z - z0). The ∂_z Wirtinger derivative is exact.
///
/// Im-log terms may carry an R-linear precomposition u(z) = sigma*z +
/// tau*conj(z). tau != 0 makes the term anisotropic and the scalar is then no
/// longer harmonic; is_harmonic() reports this and the Laplacian oracle will
/// measure it. Only the pi/2 grain-boundary field with unequal scale factors
/// uses that degree of freedom.
class HarmonicScalar {
 public:
  enum class TermKind { Re, Im, ImLog };

  struct Term {
    TermKind kind;
    double weight;
    AnalyticFn fn;
    AnalyticFn dfn;  // cached structural derivative of fn
    Cplx sigma{1.0, 0.0};
    Cplx tau{0.0, 0.0};
  };

  HarmonicScalar() = default;

  static HarmonicScalar zero() { return HarmonicScalar{}; }

  void add_re(double weight, const AnalyticFn& f) { push(TermKind::Re, weight, f); }
  void add_im(double weight, const AnalyticFn& f) {
    // Im log g == arg g; normalize to the cut-aware term kind so unwrapping
    // and winding bookkeeping see it.
    if (auto g = f.log_argument())
      push(TermKind::ImLog, weight, *g);
    else
      push(TermKind::Im, weight, f);
  }
  void add_im_log(double weight, const AnalyticFn& f) { push(TermKind::ImLog, weight, f); }
  void add_im_log_anisotropic(double weight, const AnalyticFn& f, Cplx sigma, Cplx tau) {
    Term t{TermKind::ImLog, weight, f, f.derivative(), sigma, tau};
    terms_.push_back(std::move(t));
  }
  void add_motif(const Motif& m) { motifs_.push_back(m); }
  void add_constant(double c) { constant_ += c; }

  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<Motif>& motifs() const { return motifs_; }
  double constant_term() const { return constant_; }
  bool empty() const { return terms_.empty() && motifs_.empty(); }

  bool is_harmonic() const {
    for (const auto& t : terms_)
      if (t.tau != Cplx(0.0, 0.0)) return false;
    return true;
  }

  /// Principal-branch evaluation.
  double eval(Cplx z, const EvalOptions& opts = plain_opts()) const {
    double acc = constant_;
    for (const auto& t : terms_) acc += t.weight * term_value(t, z, opts);
    for (const auto& m : motifs_) acc += m.pitch * std::arg(z - m.center);
    return acc;
  }
  double operator()(Cplx z) const { return eval(z); }

  /// Exact Wirtinger derivative ∂_z h. Defined for anisotropic terms too.
  Cplx dz(Cplx z, const EvalOptions& opts = plain_opts()) const {
    const Cplx half_i(0.0, -0.5);  // 1/(2i)
    Cplx acc(0.0, 0.0);
    for (const auto& t : terms_) {
      switch (t.kind) {
        case TermKind::Re:
          acc += 0.5 * t.weight * t.dfn.eval(z, opts);
          break;
        case TermKind::Im:
          acc += half_i * t.weight * t.dfn.eval(z, opts);
          break;
        case TermKind::ImLog: {
          const Cplx u = t.sigma * z + t.tau * std::conj(z);
          const Cplx q = t.dfn.eval(u, opts) / t.fn.eval(u, opts);
          acc += half_i * t.weight * (t.sigma * q - std::conj(t.tau * q));
          break;
        }
      }
    }
    for (const auto& m : motifs_) acc += half_i * m.pitch / (z - m.center);
    return acc;
  }

  /// ∂_z h as an exact AnalyticFn (holomorphic). Requires a harmonic scalar.
  AnalyticFn dz_fn() const {
    if (!is_harmonic())
      throw DomainError("HarmonicScalar::dz_fn: anisotropic term has no holomorphic derivative");
    std::vector<std::pair<Cplx, AnalyticFn>> parts;
    const Cplx half_i(0.0, -0.5);
    for (const auto& t : terms_) {
      switch (t.kind) {
        case TermKind::Re:
          parts.emplace_back(Cplx(0.5 * t.weight, 0.0), t.dfn);
          break;
        case TermKind::Im:
          parts.emplace_back(half_i * t.weight, t.dfn);
          break;
        case TermKind::ImLog:
          parts.emplace_back(half_i * t.weight, t.dfn * pow(t.fn, -1));
          break;
      }
    }
    for (const auto& m : motifs_)
      parts.emplace_back(half_i * m.pitch, pow(AnalyticFn::affine(1.0, -m.center), -1));
    return AnalyticFn::sum(std::move(parts), 0.0);
  }

  /// Singular structure: motif centers and Im-log zero/pole sets (winding
  /// carriers) plus any poles of Re/Im parts.
  SingularSet singularities() const {
    SingularSet s;
    for (const auto& m : motifs_) s.points.push_back({m.center, SingKind::BranchPoint, 1});
    for (const auto& t : terms_) {
      if (t.kind == TermKind::ImLog) {
        if (t.tau == Cplx(0.0, 0.0) && t.sigma == Cplx(1.0, 0.0)) {
          s.merge(t.fn.zero_set());
          s.merge(t.fn.singularities());
        } else {
          s.exhaustive = false;  // anisotropic: locate in the u plane instead
        }
      } else {
        s.merge(t.fn.singularities());
      }
    }
    return s;
  }

  /// Signed winding weights of every located singular point: each zero of an
  /// Im-log term contributes +weight*order, each pole -weight*order, each
  /// motif its pitch. Restricted to the given box.
  std::vector<std::pair<Cplx, double>> winding_centers(double x0, double x1, double y0,
                                                       double y1) const {
    std::vector<std::pair<Cplx, double>> out;
    for (const auto& m : motifs_)
      if (m.center.real() >= x0 && m.center.real() <= x1 && m.center.imag() >= y0 &&
          m.center.imag() <= y1)
        out.emplace_back(m.center, m.pitch);
    for (const auto& t : terms_) {
      if (t.kind != TermKind::ImLog) continue;
      for (const auto& p : t.fn.zero_set().enumerate_in(x0, x1, y0, y1))
        out.emplace_back(p.pos, t.weight * p.order);
      for (const auto& p : t.fn.singularities().enumerate_in(x0, x1, y0, y1))
        if (p.kind == SingKind::Pole) out.emplace_back(p.pos, -t.weight * p.order);
    }
    return out;
  }

  /// Branch cuts introduced by log nodes inside plain Re/Im terms (the only
  /// place where a principal-branch jump can leak into evaluation).
  std::vector<CutRay> re_im_cut_rays() const {
    std::vector<CutRay> out;
    for (const auto& t : terms_) {
      if (t.kind == TermKind::ImLog) continue;
      const auto s = t.fn.singularities();
      out.insert(out.end(), s.cuts.begin(), s.cuts.end());
    }
    return out;
  }

  /// Continuous evaluation along a path: Im-log and motif terms accumulate
  /// per-step principal deltas of the argument, so each term unwraps
  /// independently of everyone's branch cuts. The first value is the
  /// principal-branch value at path.front(). Points whose evaluation fails
  /// (singular or non-finite) yield NaN; the branch state resumes from the
  /// last good point, so one bad sample cannot derail the rest of the path.
  std::vector<double> eval_along(std::span<const Cplx> path,
                                 const EvalOptions& opts = plain_opts()) const {
    std::vector<double> out;
    out.reserve(path.size());
    if (path.empty()) return out;

    const size_t n_ang = terms_.size() + motifs_.size();
    std::vector<double> theta(n_ang, 0.0);
    std::vector<Cplx> prev(n_ang, Cplx(0.0, 0.0));
    std::vector<Cplx> fresh(n_ang);

    // Evaluates every angular term at z into `fresh`; false on any failure.
    const auto angular_eval = [&](Cplx z) {
      size_t idx = 0;
      try {
        for (const auto& t : terms_) {
          if (t.kind == TermKind::ImLog) {
            const Cplx w = t.fn.eval(t.sigma * z + t.tau * std::conj(z), opts);
            if (!is_finite(w) || w == Cplx(0.0, 0.0)) return false;
            fresh[idx] = w;
          }
          ++idx;
        }
        for (const auto& m : motifs_) {
          const Cplx w = z - m.center;
          if (w == Cplx(0.0, 0.0)) return false;
          fresh[idx++] = w;
        }
      } catch (const Error&) {
        return false;
      }
      return true;
    };
    const auto total_at = [&](Cplx z) -> double {
      double acc = constant_;
      size_t idx = 0;
      try {
        for (const auto& t : terms_) {
          if (t.kind == TermKind::ImLog)
            acc += t.weight * theta[idx];
          else
            acc += t.weight * term_value(t, z, opts);
          ++idx;
        }
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
      for (const auto& m : motifs_) acc += m.pitch * theta[idx++];
      return acc;
    };

    for (Cplx z : path) {
      if (!angular_eval(z)) {
        out.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      // prev == 0 marks "no branch yet" (successful evaluations are nonzero).
      for (size_t idx = 0; idx < n_ang; ++idx) {
        if (prev[idx] == Cplx(0.0, 0.0))
          theta[idx] = std::arg(fresh[idx]);
        else
          theta[idx] += std::arg(fresh[idx] / prev[idx]);
        prev[idx] = fresh[idx];
      }
      out.push_back(total_at(z));
    }
    return out;
  }

  /// Five-point stencil {center, +x, -x, +y, -y} evaluated on the local
  /// harmonic branch around z (angular terms continued from the center), so
  /// discrete-Laplacian tests are immune to principal-branch cuts.
  std::array<double, 5> stencil_local(Cplx z, double delta,
                                      const EvalOptions& opts = plain_opts()) const {
    const std::array<Cplx, 5> pts = {z, z + delta, z - delta, z + Cplx(0.0, delta),
                                     z - Cplx(0.0, delta)};
    std::array<double, 5> vals{};
    vals[0] = eval(z, opts);
    for (int i = 1; i < 5; ++i) {
      double acc = constant_;
      for (const auto& t : terms_) {
        if (t.kind == TermKind::ImLog) {
          const Cplx wc = t.fn.eval(t.sigma * z + t.tau * std::conj(z), opts);
          const Cplx wp = t.fn.eval(t.sigma * pts[i] + t.tau * std::conj(pts[i]), opts);
          acc += t.weight * (std::arg(wc) + std::arg(wp / wc));
        } else {
          acc += t.weight * term_value(t, pts[i], opts);
        }
      }
      for (const auto& m : motifs_) {
        const Cplx wc = z - m.center;
        const Cplx wp = pts[i] - m.center;
        acc += m.pitch * (std::arg(wc) + std::arg(wp / wc));
      }
      vals[i] = acc;
    }
    return vals;
  }

  /// Returns a copy with every weight (and motif pitch) scaled by s.
  HarmonicScalar scaled(double s) const {
    HarmonicScalar out(*this);
    out.constant_ *= s;
    for (auto& t : out.terms_) t.weight *= s;
    for (auto& m : out.motifs_) m.pitch *= s;
    return out;
  }

  /// Appends all terms of `o` (used by superposition).
  void append(const HarmonicScalar& o) {
    constant_ += o.constant_;
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    motifs_.insert(motifs_.end(), o.motifs_.begin(), o.motifs_.end());
  }

  static EvalOptions plain_opts() {
    EvalOptions o;
    o.throw_on_cut = false;  // harmonic terms manage their own continuity
    return o;
  }

 private:
  void push(TermKind k, double w, const AnalyticFn& f) {
    terms_.push_back({k, w, f, f.derivative(), Cplx(1.0, 0.0), Cplx(0.0, 0.0)});
  }

  double term_value(const Term& t, Cplx z, const EvalOptions& opts) const {
    switch (t.kind) {
      case TermKind::Re:
        return t.fn.eval(z, opts).real();
      case TermKind::Im:
        return t.fn.eval(z, opts).imag();
      case TermKind::ImLog:
        return std::arg(t.fn.eval(t.sigma * z + t.tau * std::conj(z), opts));
    }
    return 0.0;
  }

  double constant_ = 0.0;
  std::vector<Term> terms_;
  std::vector<Motif> motifs_;
};

}  // namespace harmsurf
