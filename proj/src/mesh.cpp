#include "shapehom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "shapehom/errors.hpp"

namespace shapehom {

namespace {

double signed_area(const TriangleMesh& m, const std::array<int, 3>& t) {
  Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
  return 0.5 * cross(b - a, c - a);
}

}  // namespace

TriangleMesh generate_disk(double radius, double target_h) {
  if (!(radius > 0.0) || !(target_h > 0.0) || !(target_h < radius))
    throw MeshError("generate_disk: need radius > 0 and 0 < target_h < radius");

  const int n_rings = std::max(1, (int)std::ceil(radius / target_h - 1e-12));
  TriangleMesh m;
  m.vertices.push_back({0.0, 0.0});
  std::vector<int> ring_start(n_rings + 1, 0);
  for (int i = 1; i <= n_rings; ++i) {
    ring_start[i] = m.n_vertices();
    const int mi = 6 * i;
    const double ri = radius * i / n_rings;
    for (int j = 0; j < mi; ++j) {
      double th = 2.0 * M_PI * j / mi;
      m.vertices.push_back({ri * std::cos(th), ri * std::sin(th)});
    }
  }

  // Center fan.
  for (int j = 0; j < 6; ++j)
    m.triangles.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});

  // Stitch consecutive rings, always taking the shorter diagonal.
  for (int i = 2; i <= n_rings; ++i) {
    const int p = 6 * (i - 1), c = 6 * i;
    const int si = ring_start[i - 1], so = ring_start[i];
    int ai = 0, bi = 0;
    auto inner = [&](int k) { return si + k % p; };
    auto outer = [&](int k) { return so + k % c; };
    while (ai < p || bi < c) {
      bool advance_outer;
      if (ai == p)
        advance_outer = true;
      else if (bi == c)
        advance_outer = false;
      else {
        Vec2 vin = m.vertices[inner(ai)], vout = m.vertices[outer(bi)];
        double diag_outer = norm(m.vertices[outer(bi + 1)] - vin);
        double diag_inner = norm(m.vertices[inner(ai + 1)] - vout);
        advance_outer = diag_outer <= diag_inner;
      }
      if (advance_outer) {
        m.triangles.push_back({inner(ai), outer(bi), outer(bi + 1)});
        ++bi;
      } else {
        m.triangles.push_back({inner(ai), outer(bi), inner(ai + 1)});
        ++ai;
      }
    }
  }

  m.boundary_loop.resize(6 * n_rings);
  for (int j = 0; j < 6 * n_rings; ++j)
    m.boundary_loop[j] = ring_start[n_rings] + j;
  return m;
}

BoundaryFrame boundary_frames(const TriangleMesh& mesh) {
  const int nb = mesh.n_bdy();
  BoundaryFrame fr;
  fr.tangent.resize(nb);
  fr.normal.resize(nb);
  for (int k = 0; k < nb; ++k) {
    Vec2 xp = mesh.vertices[mesh.boundary_loop[(k + nb - 1) % nb]];
    Vec2 x0 = mesh.vertices[mesh.boundary_loop[k]];
    Vec2 xn = mesh.vertices[mesh.boundary_loop[(k + 1) % nb]];
    Vec2 e_prev = x0 - xp, e_next = xn - x0;
    if (norm(e_prev) == 0.0 || norm(e_next) == 0.0)
      throw MeshError("boundary_frames: zero-length boundary edge");
    Vec2 t = normalized(normalized(e_prev) + normalized(e_next));
    fr.tangent[k] = t;
    fr.normal[k] = rot270(t);
  }
  return fr;
}

TriangleMesh deform(const TriangleMesh& mesh, const VolumeVectorField& field) {
  if (field.n_vertices() != mesh.n_vertices())
    throw MeshError("deform: field length does not match mesh");
  TriangleMesh out = mesh;
  for (int i = 0; i < mesh.n_vertices(); ++i)
    out.vertices[i] = mesh.vertices[i] + field.at(i);
  return out;
}

double min_signed_area(const TriangleMesh& mesh) {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& t : mesh.triangles) mn = std::min(mn, signed_area(mesh, t));
  return mn;
}

double median_triangle_area(const TriangleMesh& mesh) {
  std::vector<double> areas;
  areas.reserve(mesh.n_triangles());
  for (const auto& t : mesh.triangles) areas.push_back(signed_area(mesh, t));
  std::nth_element(areas.begin(), areas.begin() + areas.size() / 2,
                   areas.end());
  return areas[areas.size() / 2];
}

bool is_tangled(const TriangleMesh& mesh) {
  return min_signed_area(mesh) <= 1e-12 * median_triangle_area(mesh);
}

double boundary_l2_norm(const TriangleMesh& mesh,
                        const BoundaryVectorField& field) {
  const int nb = mesh.n_bdy();
  if (field.n_bdy() != nb)
    throw MeshError("boundary_l2_norm: field length does not match boundary");
  double acc = 0.0;
  for (int k = 0; k < nb; ++k) {
    int kn = (k + 1) % nb;
    double L = norm(mesh.vertices[mesh.boundary_loop[kn]] -
                    mesh.vertices[mesh.boundary_loop[k]]);
    Vec2 a = field.at(k), b = field.at(kn);
    // int_0^1 |(1-s)a + s b|^2 ds = (|a|^2 + a.b + |b|^2)/3
    acc += L * (dot(a, a) + dot(a, b) + dot(b, b)) / 3.0;
  }
  return std::sqrt(acc);
}

double boundary_perimeter(const TriangleMesh& mesh) {
  const int nb = mesh.n_bdy();
  double p = 0.0;
  for (int k = 0; k < nb; ++k)
    p += norm(mesh.vertices[mesh.boundary_loop[(k + 1) % nb]] -
              mesh.vertices[mesh.boundary_loop[k]]);
  return p;
}

double mesh_h(const TriangleMesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, norm(mesh.vertices[t[(e + 1) % 3]] - mesh.vertices[t[e]]));
  return h;
}

std::vector<int> boundary_index_map(const TriangleMesh& mesh) {
  std::vector<int> map(mesh.n_vertices(), -1);
  for (int k = 0; k < mesh.n_bdy(); ++k) map[mesh.boundary_loop[k]] = k;
  return map;
}

VolumeVectorField to_volume(const TriangleMesh& mesh,
                            const BoundaryVectorField& bf) {
  VolumeVectorField vf(mesh.n_vertices());
  for (int k = 0; k < mesh.n_bdy(); ++k) vf.set(mesh.boundary_loop[k], bf.at(k));
  return vf;
}

BoundaryVectorField boundary_trace(const TriangleMesh& mesh,
                                   const VolumeVectorField& vf) {
  BoundaryVectorField bf(mesh.n_bdy());
  for (int k = 0; k < mesh.n_bdy(); ++k) bf.set(k, vf.at(mesh.boundary_loop[k]));
  return bf;
}

void validate(const TriangleMesh& mesh) {
  if (mesh.n_vertices() < 3 || mesh.n_triangles() < 1 || mesh.n_bdy() < 3)
    throw MeshError("validate: degenerate mesh");
  for (const auto& t : mesh.triangles) {
    for (int v : t)
      if (v < 0 || v >= mesh.n_vertices())
        throw MeshError("validate: triangle index out of range");
    if (!(signed_area(mesh, t) > 0.0))
      throw MeshError("validate: nonpositive triangle area");
  }
  // Boundary edges are exactly those incident to one triangle.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::map<std::pair<int, int>, int> loop_edges;
  const int nb = mesh.n_bdy();
  for (int k = 0; k < nb; ++k) {
    int a = mesh.boundary_loop[k], b = mesh.boundary_loop[(k + 1) % nb];
    loop_edges[{std::min(a, b), std::max(a, b)}]++;
  }
  int n_bdy_edges = 0;
  for (const auto& [e, c] : edge_count) {
    if (c == 1) {
      ++n_bdy_edges;
      if (!loop_edges.count(e))
        throw MeshError("validate: boundary edge missing from loop");
    } else if (c != 2) {
      throw MeshError("validate: edge incident to more than two triangles");
    }
  }
  if (n_bdy_edges != nb)
    throw MeshError("validate: loop length does not match boundary edges");
}

void write_mesh(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("write_mesh: cannot open " + path);
  char buf[80];
  out << mesh.n_vertices() << " " << mesh.n_triangles() << " " << mesh.n_bdy()
      << "\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x, v.y);
    out << buf;
  }
  for (const auto& t : mesh.triangles)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (int k : mesh.boundary_loop) out << k << "\n";
  if (!out) throw MeshError("write_mesh: write failed for " + path);
}

TriangleMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("read_mesh: cannot open " + path);
  int n = 0, nt = 0, nb = 0;
  if (!(in >> n >> nt >> nb)) throw MeshError("read_mesh: bad header");
  TriangleMesh m;
  m.vertices.resize(n);
  m.triangles.resize(nt);
  m.boundary_loop.resize(nb);
  for (auto& v : m.vertices)
    if (!(in >> v.x >> v.y)) throw MeshError("read_mesh: bad vertex line");
  for (auto& t : m.triangles)
    if (!(in >> t[0] >> t[1] >> t[2]))
      throw MeshError("read_mesh: bad triangle line");
  for (auto& k : m.boundary_loop)
    if (!(in >> k)) throw MeshError("read_mesh: bad loop line");
  validate(m);
  return m;
}

}  // namespace shapehom
