#pragma once

#include "harmsurf/analytic.hpp"
#include "harmsurf/common.hpp"
#include "harmsurf/decompose.hpp"
#include "harmsurf/domain.hpp"
#include "harmsurf/elliptic.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/expr.hpp"
#include "harmsurf/harmonic.hpp"
#include "harmsurf/immersion.hpp"
#include "harmsurf/mesh.hpp"
#include "harmsurf/motifs.hpp"
#include "harmsurf/multipole.hpp"
#include "harmsurf/quadrature.hpp"
#include "harmsurf/tgb.hpp"
#include "harmsurf/verify.hpp"
