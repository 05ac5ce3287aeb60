#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "dcp/mesh.hpp"
#include "dcp/solver.hpp"

namespace dcp {

/// Shear coordinates of the ideal triangulation with Penner coordinates λ:
/// Z_ij = ½(λ_il − λ_lj + λ_jk − λ_ki) on interior edges (k opposite the
/// directed edge (i,j), l opposite (j,i)); boundary entries are 0.
Eigen::VectorXd penner_to_shear(const Triangulation& T,
                                const Eigen::VectorXd& lambda);

/// Complete invariant of the hyperbolic cusp metric induced by a euclidean
/// triangulation: its shear coordinates (= log length-cross-ratios) and
/// their sums around each vertex. Two euclidean metrics on the same
/// triangulation are discretely conformally equivalent iff the signatures
/// coincide.
struct CuspMetricSignature {
    Eigen::VectorXd shear;                // per edge; 0 on boundary edges
    Eigen::VectorXd vertex_log_products;  // Σ of shear over the edges at v
};

CuspMetricSignature cusp_metric_signature(const Triangulation& T,
                                          const DiscreteMetric& metric);

/// Ideal hyperbolic triangle with a horocycle at each vertex; λ are the
/// signed distances between horocycles along the edges. The symmetry-point
/// distances p and horocyclic arc lengths c are derived.
struct DecoratedIdealTriangle {
    double lambda_ij = 0;
    double lambda_jk = 0;
    double lambda_ki = 0;

    // signed distance from the symmetry point on the named edge to the
    // horocycle at the opposite vertex
    double p_ij_k() const { return 0.5 * (-lambda_ij + lambda_jk + lambda_ki); }
    double p_jk_i() const { return 0.5 * (lambda_ij - lambda_jk + lambda_ki); }
    double p_ki_j() const { return 0.5 * (lambda_ij + lambda_jk - lambda_ki); }

    // arc length of the horocycle at the named vertex inside the triangle
    double c_ij_k() const;
    double c_jk_i() const;
    double c_ki_j() const;
};

/// Ideal hyperbolic tetrahedron with horospheres at its vertices i, j, k, l;
/// λ ordered (λ_ij, λ_jk, λ_ki, λ_il, λ_jl, λ_kl). Each horospheric section
/// is a euclidean triangle whose angles are the dihedral angles.
struct DecoratedIdealTetrahedron {
    std::array<double, 6> lambda{};

    /// The tetrahedron exists iff the horospheric triangle side lengths
    /// satisfy the triangle inequalities.
    bool exists() const;

    /// Horospheric triangle side lengths at vertex 0..3 = (i,j,k,l); entry m
    /// is the side cut from the face missing the m-th of the other vertices
    /// in cyclic order, i.e. at vertex l: (c_ij^l, c_jk^l, c_ki^l).
    std::array<double, 3> horo_sides(int vertex) const;

    /// Dihedral angles (α_ij = α_kl, α_jk = α_il, α_ki = α_jl).
    std::array<double, 3> dihedral() const;
};

/// One decorated ideal tetrahedron of a realized polyhedron.
struct IdealTetRecord {
    std::array<int, 4> vertices{};         // base i, j, k and the apex
    DecoratedIdealTetrahedron tet;         // λ_ij, λ_jk, λ_ki, −u_i, −u_j, −u_k
    std::array<double, 3> dihedral{};      // α_ij=α_kl, α_jk=α_il, α_ki=α_jl
    Eigen::Matrix<double, 4, 3> positions; // rows: ideal vertices, ball model
};

struct IdealPolyhedron {
    std::vector<IdealTetRecord> tetrahedra;
    Eigen::MatrixXd positions;  // V×3, ideal vertices on the unit sphere
    Eigen::VectorXd u;          // per-vertex log scale factors (0 at the apex)
    SolveReport report;
};

/// Realize a sphere triangulation with Penner coordinates λ as an ideal
/// hyperbolic polyhedron, star-shaped with respect to the apex: flatten the
/// complement of the apex star with Θ = 2π inside and u = −λ_i,apex on its
/// boundary, then erect one decorated ideal tetrahedron over every triangle.
/// Positions are reported in the Poincaré ball model (ideal vertices on the
/// unit sphere, apex at the north pole).
IdealPolyhedron realize_ideal_polyhedron(const Triangulation& T,
                                         const Eigen::VectorXd& lambda, int apex,
                                         const SolverConfig& config = {});

struct MixedEquivalenceResult {
    bool equivalent = false;
    Eigen::VectorXd u;  // valid when equivalent: sinh(ℓ̃/2) = e^{(u_i+u_j)/2} ℓ
};

/// Check whether a hyperbolic metric is discretely conformally equivalent to
/// a euclidean one in the mixed sense sinh(ℓ̃_ij/2) = e^{(u_i+u_j)/2} ℓ_ij,
/// i.e. the secant lengths of ℓ̃ and the lengths ℓ induce equal
/// length-cross-ratios; recovers u when they do.
MixedEquivalenceResult mixed_equivalence_check(const Triangulation& T,
                                               const DiscreteMetric& euclidean,
                                               const DiscreteMetric& hyperbolic,
                                               double tol = 1e-8);

}  // namespace dcp
