#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "harmsurf/common.hpp"
#include "harmsurf/domain.hpp"
#include "harmsurf/errors.hpp"
#include "harmsurf/immersion.hpp"

namespace harmsurf {

struct GridSpec {
  int nx = 64;
  int ny = 64;
};

struct MeshOptions {
  bool unwrap = false;
  /// Height jump across one grid edge above which the edge is treated as
  /// crossing a branch cut and adjacent faces are masked (unwrap == false
  /// only). Negative means auto: pi * (largest angular-term weight).
  double jump_threshold = -1.0;
  /// Extra vertically shifted copies of the sheet (layer-stack export);
  /// 0 = just the base sheet.
  int layers = 0;
  double layer_spacing = 0.0;
};

/// Grid-sampled surface: vertices for every valid sample, triangles that
/// avoid invalid samples and cut-crossing edges, and the per-sample validity
/// mask in row-major (j * nx + i) order.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<uint8_t> valid;
  int nx = 0, ny = 0;
  std::string provenance;
};

namespace detail {

/// Maps (i, j) grid indices to domain points; rows (varying i) are the
/// unwrap direction. Annuli are parametrized by (angle, radius).
struct ParamMap {
  const Domain& d;
  int nx, ny;

  Cplx operator()(int i, int j) const {
    const double fu = nx == 1 ? 0.5 : static_cast<double>(i) / (nx - 1);
    const double fv = ny == 1 ? 0.5 : static_cast<double>(j) / (ny - 1);
    if (d.kind == Domain::Kind::Annulus && !d.shells.empty()) {
      const Shell& s = d.shells.front();
      return s.center + std::polar(s.r_in + (s.r_out - s.r_in) * fv, 2.0 * kPi * fu);
    }
    return Cplx(d.x0 + fu * (d.x1 - d.x0), d.y0 + fv * (d.y1 - d.y0));
  }
};

/// Builds vertices and faces from sampled positions and the validity mask.
/// Faces skip invalid corners and, when jump > 0, any edge whose height step
/// exceeds it. Annulus parameters are clockwise in the plane, so triangle
/// winding flips there to keep planar orientation aligned with the map's.
inline void assemble_mesh(SurfaceMesh& mesh, const std::vector<Vec3>& pos, GridSpec grid,
                          bool annulus, double jump) {
  const size_t n = pos.size();
  std::vector<int> vidx(n, -1);
  for (size_t idx = 0; idx < n; ++idx)
    if (mesh.valid[idx]) {
      vidx[idx] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(pos[idx]);
    }
  if (mesh.vertices.empty()) throw EmptyMesh("sample: no valid samples");

  const auto edge_ok = [&](size_t a, size_t b) {
    return jump <= 0.0 || std::abs(pos[a][2] - pos[b][2]) < jump;
  };
  const auto d2 = [&](size_t a, size_t b) {
    const Vec3 d = pos[a] - pos[b];
    return d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  };
  for (int j = 0; j + 1 < grid.ny; ++j)
    for (int i = 0; i + 1 < grid.nx; ++i) {
      const size_t i00 = static_cast<size_t>(j) * grid.nx + i;
      const size_t i10 = i00 + 1;
      const size_t i01 = i00 + grid.nx;
      const size_t i11 = i01 + 1;
      if (!(mesh.valid[i00] && mesh.valid[i10] && mesh.valid[i01] && mesh.valid[i11])) continue;
      if (!(edge_ok(i00, i10) && edge_ok(i00, i01) && edge_ok(i10, i11) && edge_ok(i01, i11) &&
            edge_ok(i00, i11) && edge_ok(i10, i01)))
        continue;
      // Split the quad along its shorter diagonal (better aspect near steep
      // helical cores).
      std::array<std::array<size_t, 3>, 2> tris;
      if (d2(i00, i11) <= d2(i10, i01))
        tris = {{{i00, i10, i11}, {i00, i11, i01}}};
      else
        tris = {{{i00, i10, i01}, {i10, i11, i01}}};
      for (auto& t : tris) {
        std::array<int, 3> f = {vidx[t[0]], vidx[t[1]], vidx[t[2]]};
        if (annulus) std::swap(f[1], f[2]);
        mesh.faces.push_back(f);
      }
    }
}

}  // namespace detail

/// Samples a parametric map over the domain grid into a triangle mesh.
/// `height_jump` masks faces with a larger |dz| across any edge when positive.
inline SurfaceMesh sample_map(const std::function<Vec3(Cplx)>& fn, const Domain& domain,
                              GridSpec grid, double height_jump = -1.0,
                              const std::string& provenance = "map") {
  if (grid.nx < 2 || grid.ny < 2) throw DomainError("sample_map: grid must be at least 2x2");
  SurfaceMesh mesh;
  mesh.nx = grid.nx;
  mesh.ny = grid.ny;
  mesh.provenance = provenance;
  const detail::ParamMap pm{domain, grid.nx, grid.ny};
  const size_t n = static_cast<size_t>(grid.nx) * grid.ny;
  mesh.valid.assign(n, 0);
  std::vector<Vec3> pos(n);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const size_t idx = static_cast<size_t>(j) * grid.nx + i;
      const Cplx z = pm(i, j);
      if (!domain.contains(z)) continue;
      try {
        const Vec3 v = fn(z);
        if (!is_finite(v)) continue;
        pos[idx] = v;
        mesh.valid[idx] = 1;
      } catch (const Error&) {
      }
    }
  const bool annulus = domain.kind == Domain::Kind::Annulus && !domain.shells.empty();
  detail::assemble_mesh(mesh, pos, grid, annulus, height_jump);
  return mesh;
}

/// Samples an Enneper immersion/graph. With unwrap the height's angular terms
/// are continued along each row, rows stitched through the first column, so
/// helical sheets come out without 2 pi pitch jumps; without it, principal
/// branches are used and faces crossing a cut are masked.
inline SurfaceMesh sample_graph(const EnneperImmersion& X, GridSpec grid,
                                const MeshOptions& opts = MeshOptions{}) {
  if (grid.nx < 2 || grid.ny < 2) throw DomainError("sample_graph: grid must be at least 2x2");
  if (!opts.unwrap) {
    double jump = opts.jump_threshold;
    if (jump < 0.0) {
      double wmax = 0.0;
      for (const auto& m : X.h.motifs()) wmax = std::max(wmax, std::abs(m.pitch));
      for (const auto& t : X.h.terms())
        if (t.kind == HarmonicScalar::TermKind::ImLog) wmax = std::max(wmax, std::abs(t.weight));
      jump = wmax > 0.0 ? kPi * wmax : 0.0;
    }
    return sample_map([&X](Cplx z) { return X.point(z); }, X.domain, grid, jump, "graph");
  }

  SurfaceMesh mesh;
  mesh.nx = grid.nx;
  mesh.ny = grid.ny;
  mesh.provenance = "graph-unwrapped";
  const detail::ParamMap pm{X.domain, grid.nx, grid.ny};
  const size_t n = static_cast<size_t>(grid.nx) * grid.ny;
  mesh.valid.assign(n, 0);
  std::vector<Vec3> pos(n);

  // Column 0 stitches the rows; each row is then unwrapped left to right and
  // shifted onto the stitched branch.
  std::vector<Cplx> col0;
  col0.reserve(grid.ny);
  for (int j = 0; j < grid.ny; ++j) col0.push_back(pm(0, j));
  const std::vector<double> col0_h = X.h.eval_along(col0);
  for (int j = 0; j < grid.ny; ++j) {
    std::vector<Cplx> row;
    row.reserve(grid.nx);
    for (int i = 0; i < grid.nx; ++i) row.push_back(pm(i, j));
    const std::vector<double> rh = X.h.eval_along(row);
    const double shift = col0_h[static_cast<size_t>(j)] - rh[0];
    for (int i = 0; i < grid.nx; ++i) {
      const size_t idx = static_cast<size_t>(j) * grid.nx + i;
      const Cplx z = row[static_cast<size_t>(i)];
      if (!X.domain.contains(z)) continue;
      try {
        const Cplx f = X.planar(z);
        const Vec3 v = {f.real(), f.imag(), rh[static_cast<size_t>(i)] + shift};
        if (!is_finite(v)) continue;
        pos[idx] = v;
        mesh.valid[idx] = 1;
      } catch (const Error&) {
      }
    }
  }
  const bool annulus = X.domain.kind == Domain::Kind::Annulus && !X.domain.shells.empty();
  detail::assemble_mesh(mesh, pos, grid, annulus, -1.0);
  return mesh;
}

/// Appends `layers` copies of the mesh shifted by multiples of `spacing` in
/// height (the level-set family of a layered phase field).
inline SurfaceMesh with_layer_stack(SurfaceMesh mesh, int layers, double spacing) {
  if (layers <= 0) return mesh;
  const size_t base_v = mesh.vertices.size();
  const size_t base_f = mesh.faces.size();
  for (int m = 1; m <= layers; ++m) {
    const double dz = m * spacing;
    for (size_t i = 0; i < base_v; ++i) {
      Vec3 v = mesh.vertices[i];
      v[2] += dz;
      mesh.vertices.push_back(v);
    }
    const int off = static_cast<int>(base_v) * m;
    for (size_t i = 0; i < base_f; ++i) {
      auto f = mesh.faces[i];
      for (auto& idx : f) idx += off;
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

namespace detail {
inline void format_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}
inline void format_g15(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  out += buf;
}
}  // namespace detail

/// Writes `v x y z` lines then 1-based `f i j k` lines. Coordinates use
/// %.17g so a reparse reproduces them bit-exactly.
inline void export_obj(const SurfaceMesh& mesh, const std::string& path) {
  std::string body;
  for (const auto& v : mesh.vertices) {
    if (!is_finite(v)) throw IoError("export_obj: non-finite vertex");
    body += "v ";
    detail::format_g17(body, v[0]);
    body += ' ';
    detail::format_g17(body, v[1]);
    body += ' ';
    detail::format_g17(body, v[2]);
    body += '\n';
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    for (int idx : f)
      if (idx < 0 || idx >= nv) throw IoError("export_obj: face index out of range");
    body += "f ";
    body += std::to_string(f[0] + 1);
    body += ' ';
    body += std::to_string(f[1] + 1);
    body += ' ';
    body += std::to_string(f[2] + 1);
    body += '\n';
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("export_obj: cannot open '" + path + "'");
  os << body;
  if (!os) throw IoError("export_obj: write failed for '" + path + "'");
}

inline SurfaceMesh read_obj(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("read_obj: cannot open '" + path + "'");
  SurfaceMesh mesh;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v[0] >> v[1] >> v[2];
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> f;
      ls >> f[0] >> f[1] >> f[2];
      for (auto& idx : f) idx -= 1;
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

/// CSV with a header row and >= 12 significant digits per value; rows are
/// written in order, so identical inputs give byte-identical files.
inline void export_csv(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::string body;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) body += ',';
    body += header[i];
  }
  body += '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) body += ',';
      if (!is_finite(row[i])) throw IoError("export_csv: non-finite value");
      detail::format_g15(body, row[i]);
    }
    body += '\n';
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("export_csv: cannot open '" + path + "'");
  os << body;
  if (!os) throw IoError("export_csv: write failed for '" + path + "'");
}

}  // namespace harmsurf
