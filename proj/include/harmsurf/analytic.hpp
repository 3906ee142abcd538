#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "harmsurf/common.hpp"
#include "harmsurf/elliptic.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/quadrature.hpp"

namespace harmsurf {

enum class SingKind { Pole, Zero, BranchPoint };

struct SingPoint {
  Cplx pos;
  SingKind kind;
  int order = 1;
};

/// Lattice of singular points: base + m*period1 (+ n*period2 when doubly
/// periodic). Used by sin/cos/sinh/cosh zero rows and the sn zero/pole lattices.
struct SingLattice {
  Cplx base;
  Cplx period1;
  Cplx period2{0.0, 0.0};
  bool doubly_periodic = false;
  SingKind kind = SingKind::Zero;
  int order = 1;

  double distance(Cplx z) const {
    const Cplx w = z - base;
    if (!doubly_periodic) {
      const double t = (w.real() * period1.real() + w.imag() * period1.imag()) / std::norm(period1);
      const double lo = std::floor(t), hi = lo + 1.0;
      return std::min(std::abs(w - lo * period1), std::abs(w - hi * period1));
    }
    // Solve w = s*p1 + t*p2 over the reals, then check the 4 surrounding nodes.
    const double det = period1.real() * period2.imag() - period1.imag() * period2.real();
    const double s = (w.real() * period2.imag() - w.imag() * period2.real()) / det;
    const double t = (period1.real() * w.imag() - period1.imag() * w.real()) / det;
    double best = std::abs(w - std::round(s) * period1 - std::round(t) * period2);
    for (double ds : {std::floor(s), std::floor(s) + 1.0})
      for (double dt : {std::floor(t), std::floor(t) + 1.0})
        best = std::min(best, std::abs(w - ds * period1 - dt * period2));
    return best;
  }

  void enumerate_in(double x0, double x1, double y0, double y1,
                    std::vector<SingPoint>& out) const {
    // Conservative index box, then an exact membership filter.
    const double diam = std::hypot(x1 - x0, y1 - y0);
    const Cplx c(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    const auto in_box = [&](Cplx p) {
      return p.real() >= x0 - 1e-12 && p.real() <= x1 + 1e-12 && p.imag() >= y0 - 1e-12 &&
             p.imag() <= y1 + 1e-12;
    };
    if (!doubly_periodic) {
      const double t0 = ((c - base).real() * period1.real() + (c - base).imag() * period1.imag()) /
                        std::norm(period1);
      const long span = static_cast<long>(diam / std::abs(period1)) + 2;
      for (long m = static_cast<long>(std::floor(t0)) - span;
           m <= static_cast<long>(std::ceil(t0)) + span; ++m) {
        const Cplx p = base + static_cast<double>(m) * period1;
        if (in_box(p)) out.push_back({p, kind, order});
      }
      return;
    }
    const long span1 = static_cast<long>(diam / std::abs(period1)) + 2;
    const long span2 = static_cast<long>(diam / std::abs(period2)) + 2;
    const double det = period1.real() * period2.imag() - period1.imag() * period2.real();
    const Cplx w = c - base;
    const double s0 = (w.real() * period2.imag() - w.imag() * period2.real()) / det;
    const double t0 = (period1.real() * w.imag() - period1.imag() * w.real()) / det;
    for (long m = static_cast<long>(std::floor(s0)) - span1;
         m <= static_cast<long>(std::ceil(s0)) + span1; ++m)
      for (long n = static_cast<long>(std::floor(t0)) - span2;
           n <= static_cast<long>(std::ceil(t0)) + span2; ++n) {
        const Cplx p = base + static_cast<double>(m) * period1 + static_cast<double>(n) * period2;
        if (in_box(p)) out.push_back({p, kind, order});
      }
  }
};

struct CutRay {
  Cplx origin;
  Cplx dir;  // unit direction

  double distance(Cplx z) const {
    const Cplx w = z - origin;
    const double along = w.real() * dir.real() + w.imag() * dir.imag();
    if (along <= 0.0) return std::abs(w);
    return std::abs(w - along * dir);
  }
};

/// Located singular structure of an expression: isolated points, periodic
/// lattices, and log branch cuts. `exhaustive` is false when some subterm's
/// singularities could not be located structurally (non-affine arguments of
/// log or negative powers); evaluation-time guards still apply there.
struct SingularSet {
  std::vector<SingPoint> points;
  std::vector<SingLattice> lattices;
  std::vector<CutRay> cuts;
  bool exhaustive = true;

  bool empty() const { return points.empty() && lattices.empty() && cuts.empty(); }

  void merge(const SingularSet& o) {
    points.insert(points.end(), o.points.begin(), o.points.end());
    lattices.insert(lattices.end(), o.lattices.begin(), o.lattices.end());
    cuts.insert(cuts.end(), o.cuts.begin(), o.cuts.end());
    exhaustive = exhaustive && o.exhaustive;
  }

  /// Distance to the nearest located point / lattice member (cuts excluded).
  double distance(Cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : points) d = std::min(d, std::abs(z - p.pos));
    for (const auto& l : lattices) d = std::min(d, l.distance(z));
    return d;
  }

  double cut_distance(Cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : cuts) d = std::min(d, c.distance(z));
    return d;
  }

  std::vector<SingPoint> enumerate_in(double x0, double x1, double y0, double y1) const {
    std::vector<SingPoint> out;
    for (const auto& p : points)
      if (p.pos.real() >= x0 && p.pos.real() <= x1 && p.pos.imag() >= y0 && p.pos.imag() <= y1)
        out.push_back(p);
    for (const auto& l : lattices) l.enumerate_in(x0, x1, y0, y1, out);
    return out;
  }
};

struct EvalOptions {
  double eps_sing = default_tolerances().eps_sing;
  /// If true (the default for AnalyticFn::eval), evaluating log on its branch
  /// cut raises DomainError. Harmonic-scalar machinery evaluates with the
  /// principal value instead and manages continuity itself.
  bool throw_on_cut = true;
};

/// Closed family of holomorphic expressions: constants, affine maps of z,
/// integer powers, exp/log/sin/cos/sinh/cosh, Jacobi sn/cn/dn of affine
/// arguments, finite sums and products with complex scalars, and primitives
/// (antiderivatives evaluated by contour quadrature from a basepoint).
/// Immutable value type; every node reports its exact derivative as another
/// AnalyticFn.
class AnalyticFn {
 public:
  enum class Kind {
    Const, Affine, Pow, Exp, Log, Sin, Cos, Sinh, Cosh, Sn, Cn, Dn, Sum, Product, Primitive
  };

  AnalyticFn() { *this = constant(0.0); }

  // --- factories ---------------------------------------------------------

  static AnalyticFn constant(Cplx c) {
    AnalyticFn f{RawTag{}};
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->c0 = c;
    f.n_ = std::move(n);
    return f;
  }
  static AnalyticFn z() { return affine(1.0, 0.0); }
  static AnalyticFn affine(Cplx alpha, Cplx beta) {
    if (alpha == Cplx(0.0, 0.0)) return constant(beta);
    AnalyticFn f{RawTag{}};
    auto n = std::make_shared<Node>();
    n->kind = Kind::Affine;
    n->c0 = alpha;
    n->c1 = beta;
    f.n_ = std::move(n);
    return f;
  }

  // --- structural queries -------------------------------------------------

  Kind kind() const { return n_->kind; }
  bool is_const() const { return n_->kind == Kind::Const; }
  bool is_zero() const { return is_const() && n_->c0 == Cplx(0.0, 0.0); }
  Cplx const_value() const { return n_->c0; }

  /// If the expression is exactly alpha*z + beta, reports the coefficients.
  std::optional<std::pair<Cplx, Cplx>> as_affine() const {
    if (n_->kind == Kind::Const) return std::make_pair(Cplx(0.0, 0.0), n_->c0);
    if (n_->kind == Kind::Affine) return std::make_pair(n_->c0, n_->c1);
    return std::nullopt;
  }

  /// Argument of a top-level log node (lets Im(log g) normalize to arg g).
  std::optional<AnalyticFn> log_argument() const {
    if (n_->kind == Kind::Log) return n_->kids[0];
    return std::nullopt;
  }

  // --- evaluation ---------------------------------------------------------

  Cplx eval(Cplx z, const EvalOptions& opts = EvalOptions{}) const {
    if (!is_finite(z)) throw DomainError("AnalyticFn::eval: non-finite argument");
    return eval_node(*n_, z, opts);
  }
  Cplx operator()(Cplx z) const { return eval(z); }

  /// Exact derivative, built structurally by chain/product rules.
  AnalyticFn derivative() const { return deriv_node(*n_); }

  /// Poles, branch points and cuts of this expression (best effort: exact for
  /// affine-argument log / negative powers / sn, flagged non-exhaustive
  /// otherwise).
  SingularSet singularities() const {
    SingularSet s;
    collect_sing(*n_, s);
    return s;
  }

  /// Zero set (needed by Im-log terms for winding bookkeeping). Best effort;
  /// non-exhaustive for sums and general compositions.
  SingularSet zero_set() const {
    SingularSet s;
    collect_zeros(*n_, s);
    return s;
  }

  /// Grammar-compatible rendering (see expression grammar in the README).
  std::string str() const {
    std::ostringstream os;
    print_node(*n_, os);
    return os.str();
  }

  // --- algebra ------------------------------------------------------------

  friend AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b) {
    return sum({{Cplx(1.0, 0.0), a}, {Cplx(1.0, 0.0), b}}, 0.0);
  }
  friend AnalyticFn operator-(const AnalyticFn& a, const AnalyticFn& b) {
    return sum({{Cplx(1.0, 0.0), a}, {Cplx(-1.0, 0.0), b}}, 0.0);
  }
  friend AnalyticFn operator-(const AnalyticFn& a) { return Cplx(-1.0, 0.0) * a; }
  friend AnalyticFn operator*(Cplx s, const AnalyticFn& a) {
    if (s == Cplx(0.0, 0.0)) return constant(0.0);
    if (a.is_const()) return constant(s * a.n_->c0);
    if (a.n_->kind == Kind::Affine) return affine(s * a.n_->c0, s * a.n_->c1);
    if (a.n_->kind == Kind::Sum) {
      auto terms = a.n_->terms;
      for (auto& t : terms) t.first *= s;
      return sum(std::move(terms), s * a.n_->c1);
    }
    if (a.n_->kind == Kind::Product) {
      AnalyticFn f = a.clone_node();
      f.n_mut()->c0 *= s;
      return f;
    }
    return sum({{s, a}}, 0.0);
  }
  friend AnalyticFn operator*(const AnalyticFn& a, Cplx s) { return s * a; }
  friend AnalyticFn operator*(double s, const AnalyticFn& a) { return Cplx(s, 0.0) * a; }
  friend AnalyticFn operator*(const AnalyticFn& a, double s) { return Cplx(s, 0.0) * a; }
  friend AnalyticFn operator+(const AnalyticFn& a, Cplx c) { return a + constant(c); }
  friend AnalyticFn operator+(Cplx c, const AnalyticFn& a) { return a + constant(c); }
  friend AnalyticFn operator-(const AnalyticFn& a, Cplx c) { return a + constant(-c); }

  friend AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b) {
    if (a.is_zero() || b.is_zero()) return constant(0.0);
    if (a.is_const()) return a.n_->c0 * b;
    if (b.is_const()) return b.n_->c0 * a;
    std::vector<AnalyticFn> factors;
    Cplx scale(1.0, 0.0);
    const auto absorb = [&](const AnalyticFn& f) {
      if (f.n_->kind == Kind::Product) {
        scale *= f.n_->c0;
        factors.insert(factors.end(), f.n_->kids.begin(), f.n_->kids.end());
      } else {
        factors.push_back(f);
      }
    };
    absorb(a);
    absorb(b);
    return product(std::move(factors), scale);
  }

  static AnalyticFn sum(std::vector<std::pair<Cplx, AnalyticFn>> terms, Cplx constant_term) {
    // Constants and affine terms fold so that e.g. 0.5*z + 0.1 stays a plain
    // affine map (the Jacobi builders rely on recognizing those).
    std::vector<std::pair<Cplx, AnalyticFn>> flat;
    Cplx c = constant_term;
    Cplx lin(0.0, 0.0);
    const std::function<void(Cplx, const AnalyticFn&)> absorb = [&](Cplx w, const AnalyticFn& f) {
      if (w == Cplx(0.0, 0.0) || f.is_zero()) return;
      switch (f.n_->kind) {
        case Kind::Const:
          c += w * f.n_->c0;
          return;
        case Kind::Affine:
          lin += w * f.n_->c0;
          c += w * f.n_->c1;
          return;
        case Kind::Sum:
          c += w * f.n_->c1;
          for (const auto& [w2, f2] : f.n_->terms) absorb(w * w2, f2);
          return;
        default:
          flat.emplace_back(w, f);
      }
    };
    for (auto& [w, f] : terms) absorb(w, f);
    if (flat.empty()) return affine(lin, c);
    if (lin != Cplx(0.0, 0.0)) flat.emplace_back(Cplx(1.0, 0.0), affine(lin, 0.0));
    if (flat.size() == 1 && c == Cplx(0.0, 0.0) && flat[0].first == Cplx(1.0, 0.0))
      return flat[0].second;
    AnalyticFn f{RawTag{}};
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sum;
    n->c1 = c;
    n->terms = std::move(flat);
    f.n_ = std::move(n);
    return f;
  }

  static AnalyticFn product(std::vector<AnalyticFn> factors, Cplx scale) {
    if (scale == Cplx(0.0, 0.0)) return constant(0.0);
    std::vector<AnalyticFn> keep;
    for (auto& f : factors) {
      if (f.is_zero()) return constant(0.0);
      if (f.is_const())
        scale *= f.n_->c0;
      else
        keep.push_back(std::move(f));
    }
    if (keep.empty()) return constant(scale);
    if (keep.size() == 1 && scale == Cplx(1.0, 0.0)) return keep[0];
    AnalyticFn f{RawTag{}};
    auto n = std::make_shared<Node>();
    n->kind = Kind::Product;
    n->c0 = scale;
    n->kids = std::move(keep);
    f.n_ = std::move(n);
    return f;
  }

  // --- named builders (free-function style entry points below) ------------

  static AnalyticFn make_pow(AnalyticFn base, int n) {
    if (n == 0) return constant(1.0);
    if (n == 1) return base;
    if (base.is_const()) return constant(ipow(base.n_->c0, n));
    AnalyticFn f{RawTag{}};
    auto node = std::make_shared<Node>();
    node->kind = Kind::Pow;
    node->ipar = n;
    node->kids.push_back(std::move(base));
    f.n_ = std::move(node);
    return f;
  }

  static AnalyticFn make_unary(Kind k, AnalyticFn arg) {
    AnalyticFn f{RawTag{}};
    auto node = std::make_shared<Node>();
    node->kind = k;
    node->kids.push_back(std::move(arg));
    f.n_ = std::move(node);
    return f;
  }

  static AnalyticFn make_jacobi(Kind k, AnalyticFn arg, double modulus) {
    detail::check_modulus(modulus);
    if (!arg.as_affine())
      throw DomainError("jacobi nodes require an affine argument alpha*z + beta");
    AnalyticFn f{RawTag{}};
    auto node = std::make_shared<Node>();
    node->kind = k;
    node->k = modulus;
    node->kids.push_back(std::move(arg));
    f.n_ = std::move(node);
    return f;
  }

  /// Antiderivative of `integrand` vanishing at `basepoint`, evaluated by
  /// adaptive Gauss-Kronrod quadrature along the straight segment from the
  /// basepoint. Values are memoized per exact argument behind a shared mutex,
  /// so concurrent readers are safe and results do not depend on call order.
  static AnalyticFn primitive(AnalyticFn integrand, Cplx basepoint, double tol = 1e-12) {
    AnalyticFn f{RawTag{}};
    auto node = std::make_shared<Node>();
    node->kind = Kind::Primitive;
    node->c1 = basepoint;
    node->k = tol;
    node->kids.push_back(std::move(integrand));
    node->cache = std::make_shared<PrimitiveCache>();
    f.n_ = std::move(node);
    return f;
  }

 private:
  struct RawTag {};
  explicit AnalyticFn(RawTag) {}

  struct PrimitiveCache {
    mutable std::shared_mutex mutex;
    mutable std::unordered_map<uint64_t, Cplx> memo;
  };

  struct Node {
    Kind kind = Kind::Const;
    Cplx c0{0.0, 0.0};  // Const value | Affine alpha | Product scale
    Cplx c1{0.0, 0.0};  // Affine beta | Sum constant | Primitive basepoint
    int ipar = 0;       // Pow exponent
    double k = 0.0;     // Jacobi modulus | Primitive tolerance
    std::vector<std::pair<Cplx, AnalyticFn>> terms;  // Sum
    std::vector<AnalyticFn> kids;                    // operand(s)
    std::shared_ptr<PrimitiveCache> cache;           // Primitive only
  };

  std::shared_ptr<const Node> n_;

  Node* n_mut() { return const_cast<Node*>(n_.get()); }
  AnalyticFn clone_node() const {
    AnalyticFn f{RawTag{}};
    f.n_ = std::make_shared<Node>(*n_);
    return f;
  }

  static Cplx ipow(Cplx base, int n) {
    if (n < 0) return 1.0 / ipow(base, -n);
    Cplx r(1.0, 0.0), b = base;
    for (int e = n; e > 0; e >>= 1) {
      if (e & 1) r *= b;
      b *= b;
    }
    return r;
  }

  static uint64_t hash_point(Cplx z) {
    const uint64_t a = std::bit_cast<uint64_t>(z.real());
    const uint64_t b = std::bit_cast<uint64_t>(z.imag());
    uint64_t h = a * 0x9e3779b97f4a7c15ULL;
    h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  static Cplx eval_node(const Node& n, Cplx z, const EvalOptions& opts) {
    switch (n.kind) {
      case Kind::Const:
        return n.c0;
      case Kind::Affine:
        return n.c0 * z + n.c1;
      case Kind::Pow: {
        const Cplx w = n.kids[0].eval(z, opts);
        if (n.ipar < 0) {
          // Convert the z-plane exclusion radius into a w guard when the base
          // is affine; otherwise guard on |w| directly.
          double guard = opts.eps_sing;
          if (auto ab = n.kids[0].as_affine()) guard = opts.eps_sing * std::abs(ab->first);
          if (std::abs(w) < std::max(guard, 1e-300))
            throw SingularPoint(z, "pole of negative power");
        }
        return ipow(w, n.ipar);
      }
      case Kind::Exp:
        return guard_finite(std::exp(n.kids[0].eval(z, opts)), z);
      case Kind::Log: {
        const Cplx w = n.kids[0].eval(z, opts);
        double guard = opts.eps_sing;
        if (auto ab = n.kids[0].as_affine()) guard = opts.eps_sing * std::abs(ab->first);
        if (std::abs(w) < std::max(guard, 1e-300))
          throw SingularPoint(z, "branch point of log");
        if (opts.throw_on_cut && w.real() < 0.0 && std::abs(w.imag()) <= guard)
          throw DomainError(detail::with_point("evaluation on the branch cut of log", z));
        return std::log(w);
      }
      case Kind::Sin:
        return guard_finite(std::sin(n.kids[0].eval(z, opts)), z);
      case Kind::Cos:
        return guard_finite(std::cos(n.kids[0].eval(z, opts)), z);
      case Kind::Sinh:
        return guard_finite(std::sinh(n.kids[0].eval(z, opts)), z);
      case Kind::Cosh:
        return guard_finite(std::cosh(n.kids[0].eval(z, opts)), z);
      case Kind::Sn:
      case Kind::Cn:
      case Kind::Dn: {
        const auto ab = *n.kids[0].as_affine();
        const Cplx u = ab.first * z + ab.second;
        const double eps_u = opts.eps_sing * std::max(std::abs(ab.first), 1e-30);
        const auto t = jacobi_complex(u, n.k, eps_u);
        return n.kind == Kind::Sn ? t.sn : (n.kind == Kind::Cn ? t.cn : t.dn);
      }
      case Kind::Sum: {
        Cplx acc = n.c1;
        for (const auto& [w, f] : n.terms) acc += w * f.eval(z, opts);
        return acc;
      }
      case Kind::Product: {
        Cplx acc = n.c0;
        for (const auto& f : n.kids) acc *= f.eval(z, opts);
        return acc;
      }
      case Kind::Primitive: {
        const uint64_t key = hash_point(z);
        {
          std::shared_lock lock(n.cache->mutex);
          auto it = n.cache->memo.find(key);
          if (it != n.cache->memo.end()) return it->second;
        }
        const auto& integrand = n.kids[0];
        const SingularSet sing = integrand.singularities();
        if (!sing.empty()) {
          const double margin = std::max(opts.eps_sing, 1e-9);
          for (const auto& p : sing.enumerate_in(
                   std::min(n.c1.real(), z.real()) - 1.0, std::max(n.c1.real(), z.real()) + 1.0,
                   std::min(n.c1.imag(), z.imag()) - 1.0, std::max(n.c1.imag(), z.imag()) + 1.0))
            if (segment_distance(p.pos, n.c1, z) < margin)
              throw PathThroughSingularity(p.pos, "integration path passes a singularity");
        }
        const Cplx v = integrate_segment(
            [&](Cplx w) { return integrand.eval(w, opts); }, n.c1, z, n.k);
        {
          std::unique_lock lock(n.cache->mutex);
          n.cache->memo.emplace(key, v);
        }
        return v;
      }
    }
    throw Error("AnalyticFn: corrupt node");
  }

  static Cplx guard_finite(Cplx v, Cplx z) {
    if (!is_finite(v)) throw DomainError(detail::with_point("non-finite evaluation", z));
    return v;
  }

  static AnalyticFn deriv_node(const Node& n) {
    switch (n.kind) {
      case Kind::Const:
        return constant(0.0);
      case Kind::Affine:
        return constant(n.c0);
      case Kind::Pow: {
        const auto& g = n.kids[0];
        const AnalyticFn inner = make_pow(g, n.ipar - 1);
        return Cplx(static_cast<double>(n.ipar), 0.0) * (inner * g.derivative());
      }
      case Kind::Exp: {
        AnalyticFn self{RawTag{}};
        self.n_ = std::make_shared<Node>(n);
        return self * n.kids[0].derivative();
      }
      case Kind::Log:
        return n.kids[0].derivative() * make_pow(n.kids[0], -1);
      case Kind::Sin:
        return make_unary(Kind::Cos, n.kids[0]) * n.kids[0].derivative();
      case Kind::Cos:
        return Cplx(-1.0, 0.0) * (make_unary(Kind::Sin, n.kids[0]) * n.kids[0].derivative());
      case Kind::Sinh:
        return make_unary(Kind::Cosh, n.kids[0]) * n.kids[0].derivative();
      case Kind::Cosh:
        return make_unary(Kind::Sinh, n.kids[0]) * n.kids[0].derivative();
      case Kind::Sn: {
        const Cplx alpha = n.kids[0].as_affine()->first;
        return alpha * (make_jacobi(Kind::Cn, n.kids[0], n.k) * make_jacobi(Kind::Dn, n.kids[0], n.k));
      }
      case Kind::Cn: {
        const Cplx alpha = n.kids[0].as_affine()->first;
        return (-alpha) * (make_jacobi(Kind::Sn, n.kids[0], n.k) * make_jacobi(Kind::Dn, n.kids[0], n.k));
      }
      case Kind::Dn: {
        const Cplx alpha = n.kids[0].as_affine()->first;
        return (-n.k * n.k * alpha) *
               (make_jacobi(Kind::Sn, n.kids[0], n.k) * make_jacobi(Kind::Cn, n.kids[0], n.k));
      }
      case Kind::Sum: {
        std::vector<std::pair<Cplx, AnalyticFn>> terms;
        terms.reserve(n.terms.size());
        for (const auto& [w, f] : n.terms) terms.emplace_back(w, f.derivative());
        return sum(std::move(terms), 0.0);
      }
      case Kind::Product: {
        // Leibniz rule over the factor list.
        std::vector<std::pair<Cplx, AnalyticFn>> terms;
        for (size_t i = 0; i < n.kids.size(); ++i) {
          std::vector<AnalyticFn> factors;
          factors.reserve(n.kids.size());
          for (size_t j = 0; j < n.kids.size(); ++j)
            factors.push_back(j == i ? n.kids[j].derivative() : n.kids[j]);
          terms.emplace_back(Cplx(1.0, 0.0), product(std::move(factors), n.c0));
        }
        return sum(std::move(terms), 0.0);
      }
      case Kind::Primitive:
        return n.kids[0];
    }
    throw Error("AnalyticFn: corrupt node");
  }

  static void collect_sing(const Node& n, SingularSet& s) {
    switch (n.kind) {
      case Kind::Const:
      case Kind::Affine:
      case Kind::Exp:
      case Kind::Sin:
      case Kind::Cos:
      case Kind::Sinh:
      case Kind::Cosh:
        for (const auto& f : n.kids) collect_sing(*f.n_, s);
        return;
      case Kind::Pow: {
        collect_sing(*n.kids[0].n_, s);
        if (n.ipar < 0) {
          if (auto ab = n.kids[0].as_affine(); ab && ab->first != Cplx(0.0, 0.0)) {
            s.points.push_back({-ab->second / ab->first, SingKind::Pole, -n.ipar});
          } else {
            SingularSet zeros = n.kids[0].zero_set();
            if (zeros.exhaustive) {
              for (auto p : zeros.points) s.points.push_back({p.pos, SingKind::Pole, p.order * -n.ipar});
              for (auto l : zeros.lattices) {
                l.kind = SingKind::Pole;
                l.order *= -n.ipar;
                s.lattices.push_back(l);
              }
            } else {
              s.exhaustive = false;
            }
          }
        }
        return;
      }
      case Kind::Log: {
        collect_sing(*n.kids[0].n_, s);
        if (auto ab = n.kids[0].as_affine(); ab && ab->first != Cplx(0.0, 0.0)) {
          const Cplx origin = -ab->second / ab->first;
          s.points.push_back({origin, SingKind::BranchPoint, 1});
          // Cut: preimage of the negative real axis, a ray from the branch point.
          s.cuts.push_back({origin, -std::conj(ab->first) / std::abs(ab->first)});
        } else {
          s.exhaustive = false;
        }
        return;
      }
      case Kind::Sn:
      case Kind::Cn:
      case Kind::Dn: {
        const auto ab = *n.kids[0].as_affine();
        if (ab.first == Cplx(0.0, 0.0)) return;
        if (n.k < detail::kModulusZeroCutoff) return;  // degenerates to trig, no poles
        const EllipticModulus em(n.k);
        const Cplx inv = 1.0 / ab.first;
        s.lattices.push_back({(Cplx(0.0, em.Kprime) - ab.second) * inv, 2.0 * em.K * inv,
                              Cplx(0.0, 2.0 * em.Kprime) * inv, true, SingKind::Pole, 1});
        return;
      }
      case Kind::Sum:
        for (const auto& [w, f] : n.terms) collect_sing(*f.n_, s);
        return;
      case Kind::Product:
        for (const auto& f : n.kids) collect_sing(*f.n_, s);
        return;
      case Kind::Primitive:
        // Its integrand's poles become branch points of the primitive.
        {
          SingularSet inner = n.kids[0].singularities();
          for (auto& p : inner.points) p.kind = SingKind::BranchPoint;
          s.merge(inner);
        }
        return;
    }
  }

  static void collect_zeros(const Node& n, SingularSet& s) {
    switch (n.kind) {
      case Kind::Const:
        if (n.c0 == Cplx(0.0, 0.0)) s.exhaustive = false;  // identically zero: degenerate
        return;
      case Kind::Affine:
        s.points.push_back({-n.c1 / n.c0, SingKind::Zero, 1});
        return;
      case Kind::Pow: {
        if (n.ipar > 0) {
          SingularSet zeros = n.kids[0].zero_set();
          for (auto p : zeros.points) s.points.push_back({p.pos, SingKind::Zero, p.order * n.ipar});
          for (auto l : zeros.lattices) {
            l.order *= n.ipar;
            s.lattices.push_back(l);
          }
          s.exhaustive = s.exhaustive && zeros.exhaustive;
        }
        return;  // negative powers: no zeros
      }
      case Kind::Exp:
        return;  // never zero
      case Kind::Log: {
        if (auto ab = n.kids[0].as_affine(); ab && ab->first != Cplx(0.0, 0.0))
          s.points.push_back({(Cplx(1.0, 0.0) - ab->second) / ab->first, SingKind::Zero, 1});
        else
          s.exhaustive = false;
        return;
      }
      case Kind::Sin:
      case Kind::Cos:
      case Kind::Sinh:
      case Kind::Cosh: {
        const auto ab = n.kids[0].as_affine();
        if (!ab || ab->first == Cplx(0.0, 0.0)) {
          s.exhaustive = false;
          return;
        }
        const Cplx inv = 1.0 / ab->first;
        Cplx base, period;
        switch (n.kind) {
          case Kind::Sin:  base = Cplx(0.0, 0.0);        period = Cplx(kPi, 0.0); break;
          case Kind::Cos:  base = Cplx(kPi / 2.0, 0.0);  period = Cplx(kPi, 0.0); break;
          case Kind::Sinh: base = Cplx(0.0, 0.0);        period = Cplx(0.0, kPi); break;
          default:         base = Cplx(0.0, kPi / 2.0);  period = Cplx(0.0, kPi); break;
        }
        s.lattices.push_back({(base - ab->second) * inv, period * inv, Cplx(0.0, 0.0), false,
                              SingKind::Zero, 1});
        return;
      }
      case Kind::Sn: {
        const auto ab = *n.kids[0].as_affine();
        if (ab.first == Cplx(0.0, 0.0)) return;
        const Cplx inv = 1.0 / ab.first;
        if (n.k < detail::kModulusZeroCutoff) {
          s.lattices.push_back({-ab.second * inv, Cplx(kPi, 0.0) * inv, Cplx(0.0, 0.0), false,
                                SingKind::Zero, 1});
          return;
        }
        const EllipticModulus em(n.k);
        s.lattices.push_back({-ab.second * inv, 2.0 * em.K * inv, Cplx(0.0, 2.0 * em.Kprime) * inv,
                              true, SingKind::Zero, 1});
        return;
      }
      case Kind::Cn:
      case Kind::Dn:
        s.exhaustive = false;  // not needed by any construction in this library
        return;
      case Kind::Sum:
        s.exhaustive = false;
        return;
      case Kind::Product:
        for (const auto& f : n.kids) collect_zeros(*f.n_, s);
        return;
      case Kind::Primitive:
        s.exhaustive = false;
        return;
    }
  }

  static void print_cplx(Cplx c, std::ostream& os) {
    const auto num = [&os](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
    };
    if (c.imag() == 0.0) {
      if (c.real() < 0.0) {
        os << "(";
        num(c.real());
        os << ")";
      } else {
        num(c.real());
      }
      return;
    }
    os << "(";
    num(c.real());
    os << (c.imag() < 0.0 ? "-" : "+");
    num(std::abs(c.imag()));
    os << "*i)";
  }

  static void print_node(const Node& n, std::ostream& os) {
    switch (n.kind) {
      case Kind::Const:
        print_cplx(n.c0, os);
        return;
      case Kind::Affine:
        os << "(";
        print_cplx(n.c0, os);
        os << "*z+";
        print_cplx(n.c1, os);
        os << ")";
        return;
      case Kind::Pow:
        os << "(";
        print_node(*n.kids[0].n_, os);
        os << ")^" << (n.ipar < 0 ? "(" : "") << n.ipar << (n.ipar < 0 ? ")" : "");
        return;
      case Kind::Exp: os << "exp("; print_node(*n.kids[0].n_, os); os << ")"; return;
      case Kind::Log: os << "log("; print_node(*n.kids[0].n_, os); os << ")"; return;
      case Kind::Sin: os << "sin("; print_node(*n.kids[0].n_, os); os << ")"; return;
      case Kind::Cos: os << "cos("; print_node(*n.kids[0].n_, os); os << ")"; return;
      case Kind::Sinh: os << "sinh("; print_node(*n.kids[0].n_, os); os << ")"; return;
      case Kind::Cosh: os << "cosh("; print_node(*n.kids[0].n_, os); os << ")"; return;
      case Kind::Sn:
      case Kind::Cn:
      case Kind::Dn: {
        os << (n.kind == Kind::Sn ? "sn(" : (n.kind == Kind::Cn ? "cn(" : "dn("));
        print_node(*n.kids[0].n_, os);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.k);
        os << ";" << buf << ")";
        return;
      }
      case Kind::Sum: {
        os << "(";
        print_cplx(n.c1, os);
        for (const auto& [w, f] : n.terms) {
          os << "+";
          print_cplx(w, os);
          os << "*";
          print_node(*f.n_, os);
        }
        os << ")";
        return;
      }
      case Kind::Product: {
        os << "(";
        print_cplx(n.c0, os);
        for (const auto& f : n.kids) {
          os << "*";
          print_node(*f.n_, os);
        }
        os << ")";
        return;
      }
      case Kind::Primitive:
        throw DomainError("AnalyticFn::str: primitives have no grammar form");
    }
  }
};

// Free-function spellings used throughout the library.
inline AnalyticFn pow(const AnalyticFn& f, int n) { return AnalyticFn::make_pow(f, n); }
inline AnalyticFn exp(const AnalyticFn& f) { return AnalyticFn::make_unary(AnalyticFn::Kind::Exp, f); }
inline AnalyticFn log(const AnalyticFn& f) { return AnalyticFn::make_unary(AnalyticFn::Kind::Log, f); }
inline AnalyticFn sin(const AnalyticFn& f) { return AnalyticFn::make_unary(AnalyticFn::Kind::Sin, f); }
inline AnalyticFn cos(const AnalyticFn& f) { return AnalyticFn::make_unary(AnalyticFn::Kind::Cos, f); }
inline AnalyticFn sinh(const AnalyticFn& f) { return AnalyticFn::make_unary(AnalyticFn::Kind::Sinh, f); }
inline AnalyticFn cosh(const AnalyticFn& f) { return AnalyticFn::make_unary(AnalyticFn::Kind::Cosh, f); }
inline AnalyticFn sn(const AnalyticFn& f, double k) { return AnalyticFn::make_jacobi(AnalyticFn::Kind::Sn, f, k); }
inline AnalyticFn cn(const AnalyticFn& f, double k) { return AnalyticFn::make_jacobi(AnalyticFn::Kind::Cn, f, k); }
inline AnalyticFn dn(const AnalyticFn& f, double k) { return AnalyticFn::make_jacobi(AnalyticFn::Kind::Dn, f, k); }

}  // namespace harmsurf
