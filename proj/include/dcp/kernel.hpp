#pragma once

#include <Eigen/Dense>

#include <array>

namespace dcp {

/// Milnor's Lobachevsky function Л(x) = -∫₀ˣ log|2 sin t| dt.
/// Odd, π-periodic, smooth except at multiples of π. Absolute error < 1e-14.
double lobachevsky(double x);

/// Angles of a euclidean or hyperbolic triangle, with the C¹ extension to
/// side triples violating the triangle inequality: the angle opposite the
/// too-long side is π, the other two are 0.
struct TriangleAngles {
    std::array<double, 3> alpha{};  // alpha[i] is opposite side i
    bool broken = false;
    int broken_index = -1;  // index of the too-long side when broken
};

/// Euclidean angles from side lengths via the half-angle formula.
/// Throws std::invalid_argument on non-positive sides.
TriangleAngles euclidean_angles(double a, double b, double c);

/// Hyperbolic angles from side lengths via the sinh half-angle formula.
TriangleAngles hyperbolic_angles(double a, double b, double c);

/// Gradient and Hessian of the per-triangle energy building block.
struct TriangleDerivatives {
    Eigen::Vector3d grad;
    Eigen::Matrix3d hess;          // symmetric PSD, kernel contains (1,1,1)
    Eigen::Vector3d cot;           // cot of the three angles (0 when broken)
    bool broken = false;
};

/// f(x,y,z) = αx + βy + γz + Л(α) + Л(β) + Л(γ) for a triangle with sides
/// (eˣ, eʸ, eᶻ), extended linearly outside the triangle-inequality region.
/// grad = (α, β, γ); the Hessian is the cotangent quadratic form
///   cot α (dy−dz)² + cot β (dz−dx)² + cot γ (dx−dy)²
/// and vanishes on broken triangles.
double f_value_grad_hess(double x, double y, double z, TriangleDerivatives& d);

/// Derivative matrix M of euclidean triangle angles with respect to the
/// logarithmic side lengths: dα_i = Σ_j M(i,j) ds_j, with α_i opposite
/// side i. Zero for broken triangles.
Eigen::Matrix3d euclidean_angle_log_derivatives(const TriangleAngles& ang);

/// Per-face data of the right-angled hyperbolic prism with three ideal
/// vertices: the building block of the hyperbolic conformal energy.
struct PrismData {
    double value = 0;                     // 2·V̂_h
    std::array<double, 3> alpha{};        // dihedral angles at the finite rays
    std::array<double, 3> alpha_edge{};   // dihedral angles at the ideal edges
    std::array<double, 3> ell{};          // finite edge lengths ℓ̃
    bool broken = false;
    int broken_index = -1;
};

/// Evaluate 2·V̂_h for truncated-edge lengths (λ12, λ23, λ31) and
/// (λ1, λ2, λ3). The finite edges are ℓ̃_ij = 2 arsinh(e^{(λij−λi−λj)/2});
/// alpha[i-1] sits at the ray through the base vertex i, opposite ℓ̃_jk.
PrismData prism_data(double l12, double l23, double l31, double l1, double l2,
                     double l3);

/// Decorated ideal tetrahedron quantities: value of V̂ and its six dihedral
/// angles, from the six signed horosphere distances.
struct IdealTetData {
    double value = 0;                    // V̂
    double volume = 0;                   // hyperbolic volume V
    std::array<double, 3> angle{};       // α12=α34, α23=α14, α31=α24
    std::array<double, 3> horo_sides{};  // c12, c23, c31 at vertex 4
    bool broken = false;
};

/// V̂(λ12, λ23, λ31, λ14, λ24, λ34) with V Milnor's ideal-tetrahedron volume.
/// dV̂ = ½ Σ α_ij dλ_ij. Horospheric side c_ij = e^{(λij − λi4 − λj4)/2};
/// angle[k] (k=0,1,2 for edges 12,23,31) is opposite the side c with the
/// same index in the horospheric triangle at vertex 4.
IdealTetData ideal_tet_vhat(double l12, double l23, double l31, double l14,
                            double l24, double l34);

/// Gradient/Hessian of 2·V̂ in the six λ slots (λ12, λ23, λ31, λ14, λ24, λ34).
struct IdealTetDerivatives {
    double value2 = 0;  // 2·V̂
    Eigen::Matrix<double, 6, 1> grad;
    Eigen::Matrix<double, 6, 6> hess;
    std::array<double, 3> angle{};  // as in IdealTetData
    bool broken = false;
};

IdealTetDerivatives ideal_tet_vhat2_grad_hess(double l12, double l23,
                                              double l31, double l14,
                                              double l24, double l34);

/// Derivatives of hyperbolic triangle angles with respect to side lengths:
/// dα_i = Σ_j M(i,j) da_j, α_i opposite side i. Zero for broken triangles.
Eigen::Matrix3d hyperbolic_angle_derivatives(double a, double b, double c,
                                             const TriangleAngles& ang);

}  // namespace dcp
