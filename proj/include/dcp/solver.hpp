#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "dcp/energy.hpp"
#include "dcp/mesh.hpp"

namespace dcp {

struct SolverConfig {
    double grad_tol = 1e-10;  // max-norm over free gradient entries
    int max_iterations = 100;
    double armijo_slope = 1e-4;
    double backtrack = 0.5;
    double tikhonov_floor = 1e-12;  // grown ×10 on factorization failure
    enum class Gauge { FixOneVertex, ProjectOutConstants, None } gauge = Gauge::None;
};

enum class SolveStatus { Converged, MaxIterations, UnboundedSuspected };

struct IterationRecord {
    double value;
    double step;
    double grad_norm;
    int broken_count;
};

struct SolveReport {
    Eigen::VectorXd x;  // full variable vector, fixed entries untouched
    int iterations = 0;
    double grad_norm = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::vector<IterationRecord> trace;
    std::vector<int> broken_faces;  // at the final point
    Eigen::VectorXd angle_sums;     // at the final point
};

using EnergyCallback = std::function<EnergyEval(const Eigen::VectorXd&)>;

/// Damped Newton minimization of a convex C¹ (piecewise C²) energy over the
/// variables marked free. Throws LinearSolveFailureError and
/// NonDescentDirectionError.
SolveReport minimize(const EnergyCallback& energy, Eigen::VectorXd x0,
                     const std::vector<bool>& free_mask,
                     const SolverConfig& config = {});

/// Solve the prescribed-Θ / prescribed-u problem for the metric's flavor and
/// return the conformally rescaled metric. Throws InfeasibleError before
/// solving and BrokenAtOptimumError when the minimizer has broken faces.
std::pair<DiscreteMetric, SolveReport> solve_problem(const Triangulation& T,
                                                     const DiscreteMetric& metric,
                                                     const BoundaryConditions& bc,
                                                     const SolverConfig& config = {});

}  // namespace dcp
