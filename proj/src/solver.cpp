#include "dcp/solver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>

#include "dcp/errors.hpp"

namespace dcp {

namespace {

Eigen::SparseMatrix<double> restrict_matrix(const Eigen::SparseMatrix<double>& H,
                                            const std::vector<int>& idx,
                                            const std::vector<int>& pos) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < H.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(H, k); it; ++it) {
            int r = pos[it.row()], c = pos[it.col()];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    Eigen::SparseMatrix<double> R(int(idx.size()), int(idx.size()));
    R.setFromTriplets(trip.begin(), trip.end());
    return R;
}

}  // namespace

SolveReport minimize(const EnergyCallback& energy, Eigen::VectorXd x0,
                     const std::vector<bool>& free_mask,
                     const SolverConfig& config) {
    std::vector<bool> mask = free_mask;
    if (config.gauge == SolverConfig::Gauge::FixOneVertex) {
        for (int i = 0; i < int(mask.size()); ++i)
            if (mask[i]) {
                mask[i] = false;
                break;
            }
    }
    std::vector<int> idx;
    std::vector<int> pos(mask.size(), -1);
    for (int i = 0; i < int(mask.size()); ++i)
        if (mask[i]) {
            pos[i] = int(idx.size());
            idx.push_back(i);
        }
    const int n = int(idx.size());

    SolveReport rep;
    rep.x = std::move(x0);
    EnergyEval ev = energy(rep.x);
    int stall_count = 0;

    for (int it = 0; it <= config.max_iterations; ++it) {
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) g[i] = ev.grad[idx[i]];
        rep.grad_norm = n ? g.cwiseAbs().maxCoeff() : 0.0;
        rep.broken_faces = ev.broken_faces;
        rep.angle_sums = ev.angle_sums;
        if (rep.grad_norm <= config.grad_tol) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        if (it == config.max_iterations) break;

        Eigen::SparseMatrix<double> H = restrict_matrix(ev.hess, idx, pos);
        Eigen::VectorXd d;
        double tau = 0.0;
        bool ok = false;
        for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
            Eigen::SparseMatrix<double> Hreg = H;
            if (tau > 0) {
                Eigen::SparseMatrix<double> I(n, n);
                I.setIdentity();
                Hreg = H + tau * I;
            }
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hreg);
            if (ldlt.info() == Eigen::Success) {
                d = ldlt.solve(-g);
                if (ldlt.info() == Eigen::Success && d.allFinite() &&
                    g.dot(d) < 0) {
                    ok = true;
                    break;
                }
            }
            tau = (tau == 0.0) ? config.tikhonov_floor : tau * 10.0;
            if (tau > 1e10)
                throw LinearSolveFailureError(
                    "Hessian factorization failed after regularization");
        }
        if (!ok) throw NonDescentDirectionError("no descent direction found");
        if (config.gauge == SolverConfig::Gauge::ProjectOutConstants && n > 0)
            d.array() -= d.mean();

        double slope = g.dot(d);
        double t = 1.0;
        double E0 = ev.value;
        Eigen::VectorXd x_trial = rep.x;
        EnergyEval ev_trial;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < n; ++i) x_trial[idx[i]] = rep.x[idx[i]] + t * d[i];
            ev_trial = energy(x_trial);
            // the additive term is a floating-point noise floor: near the
            // optimum the true decrease drops below the rounding error of
            // the energy sum and the Armijo test would reject every step
            if (std::isfinite(ev_trial.value) &&
                ev_trial.value <= E0 + config.armijo_slope * t * slope +
                                      1e-13 * (1.0 + std::abs(E0))) {
                accepted = true;
                break;
            }
            t *= config.backtrack;
        }
        if (!accepted) break;  // cannot make progress; report current point

        rep.x = x_trial;
        double decrease = E0 - ev_trial.value;
        ev = std::move(ev_trial);
        ++rep.iterations;
        rep.trace.push_back({ev.value, t, rep.grad_norm, int(ev.broken_faces.size())});

        double xnorm = 0;
        for (int i = 0; i < n; ++i) xnorm = std::max(xnorm, std::abs(rep.x[idx[i]]));
        stall_count = (decrease < 1e-14 && xnorm > 1e3) ? stall_count + 1 : 0;
        if (stall_count >= 25) {
            rep.status = SolveStatus::UnboundedSuspected;
            rep.broken_faces = ev.broken_faces;
            rep.angle_sums = ev.angle_sums;
            return rep;
        }
    }
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

std::pair<DiscreteMetric, SolveReport> solve_problem(const Triangulation& T,
                                                     const DiscreteMetric& metric,
                                                     const BoundaryConditions& bc,
                                                     const SolverConfig& config) {
    const int V = T.n_vertices;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(V);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(V);
    std::vector<bool> free_mask(V, true);
    bool any_fixed = false;
    for (int v = 0; v < V; ++v) {
        if (v < int(bc.u_fixed.size()) && bc.u_fixed[v]) {
            free_mask[v] = false;
            u0[v] = bc.u_values[v];
            any_fixed = true;
        } else {
            theta[v] = bc.theta[v];
        }
    }

    SolverConfig cfg = config;
    if (!any_fixed) {
        if (metric.flavor == Flavor::Euclidean) {
            ConditionReport cr = check_conditions(T, theta);
            if (!cr.condition1 || !cr.condition2)
                throw InfeasibleError(!cr.condition1
                                          ? "total angle condition violated"
                                          : "no positive angle system exists");
            if (cfg.gauge == SolverConfig::Gauge::None)
                cfg.gauge = SolverConfig::Gauge::FixOneVertex;
        }
    }

    EnergyCallback cb;
    if (metric.flavor == Flavor::Euclidean)
        cb = [&](const Eigen::VectorXd& u) {
            return energy_euclidean(T, metric.lambda, theta, u);
        };
    else
        cb = [&](const Eigen::VectorXd& u) {
            return energy_hyperbolic(T, metric.lambda, theta, u);
        };

    SolveReport rep = minimize(cb, u0, free_mask, cfg);
    if (rep.status == SolveStatus::Converged && !rep.broken_faces.empty())
        throw BrokenAtOptimumError("minimizer lies outside the triangle-inequality domain");

    Eigen::VectorXd lam(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e)
        lam[e] = metric.lambda[e] + rep.x[T.edges[e].v[0]] + rep.x[T.edges[e].v[1]];
    return {DiscreteMetric::from_lambda(metric.flavor, lam), rep};
}

}  // namespace dcp
