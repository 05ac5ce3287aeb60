#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

#include "dcp/mesh.hpp"

namespace dcp {

/// Partition of the vertex set into V₀ (prescribed scale factor u) and
/// V₁ (prescribed angle sum Θ), plus optional per-edge circle-pattern data.
struct BoundaryConditions {
    std::vector<bool> u_fixed;   // size V; true → vertex in V₀
    Eigen::VectorXd u_values;    // used where u_fixed
    Eigen::VectorXd theta;       // used where !u_fixed
    Eigen::VectorXd phi;         // per edge; empty unless circle pattern
    std::vector<bool> lambda_free;  // per edge; empty means all fixed
};

struct EnergyEval {
    double value = 0;
    Eigen::VectorXd grad;              // over all variables (u, then λ if joint)
    Eigen::SparseMatrix<double> hess;  // same indexing
    std::vector<int> broken_faces;
    Eigen::VectorXd angle_sums;        // per vertex, of the rescaled metric
};

/// E(u) = Σ_T (2f(λ̃/2, …) − (π/2) Σ λ̃) + Σ Θ_i u_i with λ̃ = λ + u_i + u_j.
/// Gradient/Hessian over all u.
EnergyEval energy_euclidean(const Triangulation& T, const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& theta, const Eigen::VectorXd& u);

/// Cotan edge form of the euclidean Hessian: Σ_E w_ij (e_i−e_j)(e_i−e_j)ᵀ
/// with w_ij = ½(cot α̃_ij^k + cot α̃_ij^l); an independent assembly path.
Eigen::SparseMatrix<double> euclidean_hessian_edge_formula(
    const Triangulation& T, const Eigen::VectorXd& lambda, const Eigen::VectorXd& u);

/// E^h(u) = Σ_T 2V̂_h(λ_ij, λ_jk, λ_ki, −u_i, −u_j, −u_k) + Σ Θ_i u_i.
EnergyEval energy_hyperbolic(const Triangulation& T, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& theta, const Eigen::VectorXd& u);

/// Hyperbolic Hessian edge form:
/// Σ_E w_ij ((du_i−du_j)² + tanh²(ℓ̃_ij/2)(du_i+du_j)²) as a matrix.
Eigen::SparseMatrix<double> hyperbolic_hessian_edge_formula(
    const Triangulation& T, const Eigen::VectorXd& lambda, const Eigen::VectorXd& u);

/// 𝓔(λ,u) = Σ_T 2V̂(λ_ij, λ_jk, λ_ki, −u_i, −u_j, −u_k) − Σ_E Φ_ij λ_ij
///          + Σ Θ_i u_i.  Variables are u (V entries) followed by λ (E entries).
EnergyEval energy_circle_pattern(const Triangulation& T, const Eigen::VectorXd& lambda,
                                 const Eigen::VectorXd& phi,
                                 const Eigen::VectorXd& theta,
                                 const Eigen::VectorXd& u);

/// Φ per the euclidean reduction: π on interior edges, π/2 on boundary edges.
Eigen::VectorXd default_phi(const Triangulation& T);

/// S(α) = Σ_corners (Л(α) + α λ_opp/2); gradient entries
/// λ_opp/2 − log(2 sin α). The λ/2 coefficient makes the half log-lengths
/// (log ℓ) the conjugate variables of the angles, so that S is stationary
/// along edge cycles exactly at angle systems of conformally equivalent
/// metrics. Corners indexed 3·face + slot. Throws AngleOutOfRangeError.
std::pair<double, Eigen::VectorXd> s_functional(const Triangulation& T,
                                                const Eigen::VectorXd& lambda,
                                                const Eigen::VectorXd& alpha);

/// Directional derivative of S along the cycle vector of each interior edge;
/// zero entries on boundary edges. Vanishes at solutions of the first
/// variational principle.
Eigen::VectorXd s_cycle_derivatives(const Triangulation& T,
                                    const Eigen::VectorXd& lambda,
                                    const Eigen::VectorXd& alpha);

struct ConditionReport {
    bool condition1 = false;
    double condition1_residual = 0;
    bool condition2 = false;
    bool condition3 = false;        // equivalent to condition 2
    Eigen::VectorXd alpha_witness;  // per corner, valid when condition2
};

/// Check the solvability conditions for prescribed angle sums Θ (one value
/// per vertex). Condition 2 is decided by a feasible-flow computation with
/// strict positivity relaxed to α̂ ≥ eps.
ConditionReport check_conditions(const Triangulation& T, const Eigen::VectorXd& theta,
                                 double eps = 1e-9);

struct CoercivityReport {
    std::vector<std::vector<double>> samples;   // E along each ray, t = 1..t_max
    std::vector<bool> eventually_increasing;
};

/// Sample E along rays u = t·d for each direction; diagnostic for coercivity.
CoercivityReport coercivity_probe(const Triangulation& T, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd& theta,
                                  const std::vector<Eigen::VectorXd>& directions,
                                  int t_max = 20);

}  // namespace dcp
