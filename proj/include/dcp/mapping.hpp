#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <vector>

#include "dcp/layout.hpp"
#include "dcp/mesh.hpp"
#include "dcp/solver.hpp"

namespace dcp {

struct FlattenResult {
    DiscreteMetric metric;  // the flat (conformally equivalent) metric
    PlanarLayout layout;
    SolveReport report;
};

/// Solve the prescribed-boundary-angle flattening problem on a disk:
/// interior angle sums 2π, boundary angle sums boundary_theta (entries read
/// on boundary vertices only), then develop the result in the plane.
FlattenResult flatten(const Triangulation& T, const DiscreteMetric& metric,
                      const Eigen::VectorXd& boundary_theta,
                      const SolverConfig& config = {});

/// Boundary-angle vector for mapping a disk onto a rectangle: π/2 at the
/// four given boundary vertices, π at every other boundary vertex.
Eigen::VectorXd rectangle_theta(const Triangulation& T,
                                const std::array<int, 4>& corners);

struct SpherePolyhedron {
    Eigen::MatrixXd positions;  // V×3, all on the unit sphere
    SolveReport report;
};

/// Map a triangulated sphere to a polyhedron with vertices on the unit
/// sphere: rescale so all edges at the apex k have length 1, flatten the
/// complement of k's star with u = 0 on its boundary, and project the plane
/// back to the sphere stereographically; k goes to the north pole (0,0,1).
SpherePolyhedron map_to_sphere(const Triangulation& T, const DiscreteMetric& metric,
                               int apex, const SolverConfig& config = {});

struct DiskMapResult {
    DiscreteMetric metric;         // chordal metric of the final positions
    PlanarLayout layout;           // straight-triangle layout of those positions
    Eigen::MatrixXd vertex_pos;    // V×2 final positions
    SolveReport report;
};

/// Map a disk so that its boundary polygon is inscribed in the unit circle:
/// rescale edges at the boundary vertex k to length 1, flatten the
/// complement of k's star with the non-neighbor boundary straightened
/// (Θ = π), and apply the Möbius transformation taking that line to the
/// unit circle; k is reinserted at the image of infinity.
DiskMapResult map_to_disk(const Triangulation& T, const DiscreteMetric& metric,
                          int boundary_vertex, const SolverConfig& config = {});

/// Find the discrete metric whose circumcircle intersection angles are
/// Φ_ij (interior edges: α̃_ij^k + α̃_ji^l; boundary edges: α̃_ij^k) by
/// minimizing the circle-pattern energy over λ with u = 0.
std::pair<DiscreteMetric, SolveReport> solve_circle_pattern(
    const Triangulation& T, const Eigen::VectorXd& phi, const Eigen::VectorXd& theta,
    const SolverConfig& config = {});

/// Polygonal surface with circumscribed faces: oriented polygons (≥3
/// vertices each) and a length per polygon edge (keys sorted pairs).
struct CircularMesh {
    std::vector<std::vector<int>> polygons;
    std::map<std::pair<int, int>, double> lengths;
};

struct CircularMeshResult {
    Triangulation tri;            // fan triangulation of the polygons
    std::vector<bool> diagonal;   // per tri edge: true for added diagonals
    DiscreteMetric metric;        // solved metric on tri
    SolveReport report;
};

/// Conformal mapping problem for a circular polyhedral surface: triangulate
/// the faces, keep λ fixed on polygon edges, let diagonals vary with Φ = π
/// across them, and minimize the joint (u, λ) energy. The boundary
/// conditions prescribe Θ or u per vertex exactly as in solve_problem.
CircularMeshResult solve_circular_mesh(const CircularMesh& P,
                                       const BoundaryConditions& bc,
                                       const SolverConfig& config = {});

struct CircleDomainResult {
    DiscreteMetric metric;
    PlanarLayout layout;
    Eigen::MatrixXd vertex_pos;         // V×2
    std::vector<std::vector<int>> hole_loops;  // input hole boundary polygons
    SolveReport report;
};

/// Map a genus-0 surface with b ≥ 1 boundary loops onto a circle domain:
/// the longest loop becomes the outer unit circle and each remaining loop
/// is filled by a circular polygon (free diagonals, Φ = π) so that its
/// vertices end up inscribed in a circle.
CircleDomainResult map_to_circle_domain(const Triangulation& T,
                                        const DiscreteMetric& metric,
                                        const SolverConfig& config = {});

struct UniformizationResult {
    DiscreteMetric metric;  // hyperbolic flavor
    HyperbolicLayout layout;
    SolveReport report;
};

/// Uniformize a closed surface of genus ≥ 2: find the hyperbolic metric
/// with angle sum 2π at every vertex that is conformally equivalent to the
/// euclidean input (sinh(ℓ̃/2) = e^{(u_i+u_j)/2} ℓ), and develop it in the
/// Poincaré disk.
UniformizationResult uniformize_hyperbolic(const Triangulation& T,
                                           const DiscreteMetric& metric,
                                           const SolverConfig& config = {});

/// Projective map of the plane sending one triangle onto another so that
/// circumcircles correspond; in homogeneous coordinates F·(v_i,1) is
/// proportional to e^{-u_i}·(ṽ_i,1).
struct ProjectiveTriangleMap {
    Eigen::Matrix3d F;
    Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
};

/// Build the circumcircle-preserving projective map between two triangles
/// whose side lengths are related by the scale factors u (ℓ̃ =
/// e^{(u_i+u_j)/2} ℓ). Throws DegenerateFaceError and InconsistentUError.
ProjectiveTriangleMap projective_interpolation(const Eigen::Matrix<double, 3, 2>& src,
                                               const Eigen::Matrix<double, 3, 2>& dst,
                                               const Eigen::Vector3d& u);

}  // namespace dcp
