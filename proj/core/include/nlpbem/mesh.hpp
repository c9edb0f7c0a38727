/** \file mesh.hpp
 *  Closed triangulated surfaces: construction, I/O, derived geometry.
 */
#pragma once

#include <Eigen/Core>
#include <filesystem>

namespace nlpbem::bem {

struct TriMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 3> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;  // CCW seen from outside

  // Derived, filled by finalize_mesh:
  Eigen::Matrix<double, Eigen::Dynamic, 3> normals;    // unit outward
  Eigen::Matrix<double, Eigen::Dynamic, 3> centroids;  // collocation points
  Eigen::VectorXd areas;

  bool flipped_on_load = false;  // windings reversed to make volume positive

  Eigen::Index n() const { return triangles.rows(); }
};

/** Validates topology (closed, manifold, consistently oriented, no
 *  degenerate triangles) and computes normals/centroids/areas.
 *  Throws MeshError on violation. */
void finalize_mesh(TriMesh& mesh);

/** Refined icosahedron projected to the unit sphere; level in [0,6],
 *  20*4^level triangles. */
TriMesh build_icosphere(int level);

/** Reads an OFF file (triangles only) and validates it.  If the signed
 *  volume is negative all windings are reversed and flipped_on_load set. */
TriMesh load_mesh(const std::filesystem::path& path);

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);

double signed_volume(const TriMesh& mesh);

}  // namespace nlpbem::bem
