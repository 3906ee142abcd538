#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

#include "harmsurf/common.hpp"

namespace harmsurf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string with_point(const std::string& msg, Cplx z) {
  std::ostringstream os;
  os << msg << " at z = (" << z.real() << ", " << z.imag() << ")";
  return os.str();
}
}  // namespace detail

/// Evaluation requested within eps_sing of a pole or branch point.
class SingularPoint : public Error {
 public:
  Cplx where;
  SingularPoint(Cplx z, const std::string& msg) : Error(detail::with_point(msg, z)), where(z) {}
};

/// Evaluation on a declared branch cut, a non-finite input, or a value
/// outside the function's domain of definition.
class DomainError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class ZeroPitch : public Error {
 public:
  using Error::Error;
};

class DegeneratePlanarPart : public Error {
 public:
  Cplx where;
  DegeneratePlanarPart(Cplx z, const std::string& msg)
      : Error(detail::with_point(msg, z)), where(z) {}
};

class DilatationMismatch : public Error {
 public:
  Cplx where;
  Cplx nu_ref, nu_other;
  DilatationMismatch(Cplx z, Cplx ref, Cplx other)
      : Error([&] {
          std::ostringstream os;
          os << "dilatations disagree at z = (" << z.real() << ", " << z.imag() << "): nu_1 = ("
             << ref.real() << ", " << ref.imag() << ") vs nu_i = (" << other.real() << ", "
             << other.imag() << ")";
          return os.str();
        }()),
        where(z),
        nu_ref(ref),
        nu_other(other) {}
};

class ZeroPlanarSum : public Error {
 public:
  using Error::Error;
};

class EmptyDomainIntersection : public Error {
 public:
  using Error::Error;
};

class InsideConvergenceRadius : public Error {
 public:
  using Error::Error;
};

class PathThroughSingularity : public Error {
 public:
  Cplx where;
  PathThroughSingularity(Cplx z, const std::string& msg)
      : Error(detail::with_point(msg, z)), where(z) {}
};

class NonremovableSingularity : public Error {
 public:
  using Error::Error;
};

class DegenerateGaussMap : public Error {
 public:
  Cplx where;
  DegenerateGaussMap(Cplx z, const std::string& msg)
      : Error(detail::with_point(msg, z)), where(z) {}
};

class StencilHitsSingularity : public Error {
 public:
  using Error::Error;
};

class LoopHitsSingularity : public Error {
 public:
  using Error::Error;
};

class EmptyMesh : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Expression-grammar parse failure (CLI front end).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace harmsurf
