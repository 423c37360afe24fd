#pragma once

#include <array>
#include <string>
#include <vector>

#include "shapehom/vec2.hpp"

namespace shapehom {

// Coefficients of a P1 vector field attached to boundary vertices, in
// boundary-loop order: (x_0, y_0, x_1, y_1, ...), length 2*N_bdy. The
// implied volume field is zero at interior vertices.
struct BoundaryVectorField {
  std::vector<double> coeffs;

  explicit BoundaryVectorField(int n_bdy = 0) : coeffs(2 * n_bdy, 0.0) {}
  int n_bdy() const { return static_cast<int>(coeffs.size()) / 2; }
  Vec2 at(int k) const { return {coeffs[2 * k], coeffs[2 * k + 1]}; }
  void set(int k, Vec2 v) {
    coeffs[2 * k] = v.x;
    coeffs[2 * k + 1] = v.y;
  }
};

// Coefficients of a P1 vector field on all vertices, length 2*N.
struct VolumeVectorField {
  std::vector<double> coeffs;

  explicit VolumeVectorField(int n_vertices = 0)
      : coeffs(2 * n_vertices, 0.0) {}
  int n_vertices() const { return static_cast<int>(coeffs.size()) / 2; }
  Vec2 at(int i) const { return {coeffs[2 * i], coeffs[2 * i + 1]}; }
  void set(int i, Vec2 v) {
    coeffs[2 * i] = v.x;
    coeffs[2 * i + 1] = v.y;
  }
};

// Conforming triangle mesh with CCW triangles and a single closed CCW
// boundary loop. The loop lists vertex indices; boundary-indexed arrays
// (fields, constraint rows) follow loop order.
struct TriangleMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_loop;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_bdy() const { return static_cast<int>(boundary_loop.size()); }
};

// Unit tangent / outward normal per boundary vertex, loop order.
// Tangents average the two adjacent unit edge directions; the normal is
// the tangent rotated by -90 degrees (outward for a CCW loop).
struct BoundaryFrame {
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;
};

// Structured disk mesh: concentric rings at spacing radius/R with 6*i
// vertices on ring i, R = ceil(radius/target_h). Boundary vertices lie
// exactly on the circle of the given radius. Deterministic.
TriangleMesh generate_disk(double radius, double target_h);

BoundaryFrame boundary_frames(const TriangleMesh& mesh);

// New mesh with vertices displaced by the field; connectivity shared.
TriangleMesh deform(const TriangleMesh& mesh, const VolumeVectorField& field);

double min_signed_area(const TriangleMesh& mesh);
double median_triangle_area(const TriangleMesh& mesh);

// Tangling guard: min signed area at or below 1e-12 of the median area.
bool is_tangled(const TriangleMesh& mesh);

// Exact L2(boundary) norm of a piecewise-linear vector field along the
// boundary polygon.
double boundary_l2_norm(const TriangleMesh& mesh,
                        const BoundaryVectorField& field);

double boundary_perimeter(const TriangleMesh& mesh);

// Longest edge in the mesh; the h used by geometric acceptance bounds.
double mesh_h(const TriangleMesh& mesh);

// vertex index -> position in boundary_loop, or -1 for interior vertices.
std::vector<int> boundary_index_map(const TriangleMesh& mesh);

VolumeVectorField to_volume(const TriangleMesh& mesh,
                            const BoundaryVectorField& bf);
BoundaryVectorField boundary_trace(const TriangleMesh& mesh,
                                   const VolumeVectorField& vf);

// Checks orientation, boundary-edge topology and loop consistency;
// throws MeshError on violation.
void validate(const TriangleMesh& mesh);

// Text format: "N N_T N_bdy", then N lines "x y", then N_T lines "i j k",
// then N_bdy loop indices. 17 significant digits.
void write_mesh(const std::string& path, const TriangleMesh& mesh);
TriangleMesh read_mesh(const std::string& path);

}  // namespace shapehom
