#include "dcp/hypgeom.hpp"

#include <cmath>
#include <vector>

#include "dcp/errors.hpp"
#include "dcp/kernel.hpp"
#include "dcp/layout.hpp"

namespace dcp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double horo_arc(double lam_opp, double lam_a, double lam_b) {
    return std::exp(0.5 * (lam_opp - lam_a - lam_b));
}

/// u with e^{(u_i+u_i)/2} = e^{-λ_ik} on the neighbors of k, 0 elsewhere.
Eigen::VectorXd apex_scale_factors(const Triangulation& T,
                                   const Eigen::VectorXd& lambda, int k) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(T.n_vertices);
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        if (ed.v[0] == k)
            u[ed.v[1]] = -lambda[e];
        else if (ed.v[1] == k)
            u[ed.v[0]] = -lambda[e];
    }
    return u;
}

bool is_connected(const Triangulation& T) {
    if (T.n_faces() == 0) return true;
    std::vector<bool> seen(T.n_faces(), false);
    std::vector<int> stack = {0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        for (int s = 0; s < 3; ++s) {
            const auto& ed = T.edges[T.face_edges[f][s]];
            for (int side = 0; side < 2; ++side) {
                int g = ed.face[side];
                if (g >= 0 && !seen[g]) {
                    seen[g] = true;
                    ++count;
                    stack.push_back(g);
                }
            }
        }
    }
    return count == T.n_faces();
}

}  // namespace

double DecoratedIdealTriangle::c_ij_k() const {
    return horo_arc(lambda_ij, lambda_jk, lambda_ki);
}
double DecoratedIdealTriangle::c_jk_i() const {
    return horo_arc(lambda_jk, lambda_ki, lambda_ij);
}
double DecoratedIdealTriangle::c_ki_j() const {
    return horo_arc(lambda_ki, lambda_ij, lambda_jk);
}

bool DecoratedIdealTetrahedron::exists() const {
    auto c = horo_sides(3);
    return c[0] < c[1] + c[2] && c[1] < c[2] + c[0] && c[2] < c[0] + c[1];
}

std::array<double, 3> DecoratedIdealTetrahedron::horo_sides(int vertex) const {
    // λ indexed by the vertex pair it joins, vertices numbered i,j,k,l = 0..3
    auto lam = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        if (b == 3) return lambda[3 + a];
        if (a == 0 && b == 1) return lambda[0];
        if (a == 1 && b == 2) return lambda[1];
        return lambda[2];  // (0,2)
    };
    std::array<int, 3> others{};
    for (int m = 0, t = 0; m < 4; ++m)
        if (m != vertex) others[t++] = m;
    // cyclic sides (ab, bc, ca) of the horospheric triangle at `vertex`
    std::array<double, 3> c{};
    for (int m = 0; m < 3; ++m) {
        int a = others[m], b = others[(m + 1) % 3];
        c[m] = horo_arc(lam(a, b), lam(vertex, a), lam(vertex, b));
    }
    return c;
}

std::array<double, 3> DecoratedIdealTetrahedron::dihedral() const {
    IdealTetData d = ideal_tet_vhat(lambda[0], lambda[1], lambda[2], lambda[3],
                                    lambda[4], lambda[5]);
    return d.angle;
}

Eigen::VectorXd penner_to_shear(const Triangulation& T,
                                const Eigen::VectorXd& lambda) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        if (ed.face[0] < 0 || ed.face[1] < 0) continue;
        int i = ed.v[0], j = ed.v[1], k = ed.opp[0], l = ed.opp[1];
        z[e] = 0.5 * (lambda[T.edge_index(i, l)] - lambda[T.edge_index(l, j)] +
                      lambda[T.edge_index(j, k)] - lambda[T.edge_index(k, i)]);
    }
    return z;
}

CuspMetricSignature cusp_metric_signature(const Triangulation& T,
                                          const DiscreteMetric& metric) {
    if (metric.flavor != Flavor::Euclidean)
        throw FlavorMismatchError("cusp_metric_signature expects a euclidean metric");
    CuspMetricSignature sig;
    sig.shear = penner_to_shear(T, metric.lambda);
    sig.vertex_log_products = Eigen::VectorXd::Zero(T.n_vertices);
    for (int e = 0; e < T.n_edges(); ++e) {
        sig.vertex_log_products[T.edges[e].v[0]] += sig.shear[e];
        sig.vertex_log_products[T.edges[e].v[1]] += sig.shear[e];
    }
    return sig;
}

IdealPolyhedron realize_ideal_polyhedron(const Triangulation& T,
                                         const Eigen::VectorXd& lambda, int apex,
                                         const SolverConfig& config) {
    if (!T.is_closed() || T.euler_characteristic() != 2)
        throw ValidationError("realize_ideal_polyhedron expects a triangulated sphere");
    if (apex < 0 || apex >= T.n_vertices)
        throw ValidationError("apex out of range");
    if (lambda.size() != T.n_edges())
        throw ValidationError("lambda must have one entry per edge");

    Eigen::VectorXd ufold = apex_scale_factors(T, lambda, apex);
    std::vector<int> keep;
    for (int f = 0; f < T.n_faces(); ++f)
        if (T.faces[f][0] != apex && T.faces[f][1] != apex && T.faces[f][2] != apex)
            keep.push_back(f);
    std::vector<int> vmap;
    auto sub = submesh(T, keep, vmap);
    if (sub.n_faces() == 0 || sub.euler_characteristic() != 1 ||
        sub.boundary_loops().size() != 1 || !is_connected(sub))
        throw ValidationError(
            "realize_ideal_polyhedron: apex star complement is not a disk");
    std::vector<int> old_of(sub.n_vertices, -1);
    for (int v = 0; v < int(vmap.size()); ++v)
        if (vmap[v] >= 0) old_of[vmap[v]] = v;

    Eigen::VectorXd lam(sub.n_edges());
    for (int e = 0; e < sub.n_edges(); ++e) {
        int i = old_of[sub.edges[e].v[0]], j = old_of[sub.edges[e].v[1]];
        lam[e] = lambda[T.edge_index(i, j)] + ufold[i] + ufold[j];
    }

    BoundaryConditions bc;
    bc.u_fixed.assign(sub.n_vertices, false);
    bc.u_values = Eigen::VectorXd::Zero(sub.n_vertices);
    bc.theta = Eigen::VectorXd::Constant(sub.n_vertices, 2 * kPi);
    for (int v = 0; v < sub.n_vertices; ++v) bc.u_fixed[v] = sub.vertex_boundary[v];

    IdealPolyhedron out;
    DiscreteMetric flat;
    std::tie(flat, out.report) = solve_problem(
        sub, DiscreteMetric::from_lambda(Flavor::Euclidean, lam), bc, config);
    Eigen::MatrixXd X = layout_euclidean(sub, flat).vertex_positions(sub);

    out.u = ufold;
    for (int v = 0; v < sub.n_vertices; ++v) out.u[old_of[v]] += out.report.x[v];
    out.u[apex] = 0.0;

    out.positions.resize(T.n_vertices, 3);
    for (int v = 0; v < sub.n_vertices; ++v) {
        double x = X(v, 0), y = X(v, 1);
        double d = x * x + y * y + 1.0;
        out.positions.row(old_of[v]) << 2 * x / d, 2 * y / d,
            (x * x + y * y - 1.0) / d;
    }
    out.positions.row(apex) << 0, 0, 1;

    for (int f = 0; f < sub.n_faces(); ++f) {
        IdealTetRecord rec;
        int i = old_of[sub.faces[f][0]], j = old_of[sub.faces[f][1]],
            k = old_of[sub.faces[f][2]];
        rec.vertices = {i, j, k, apex};
        rec.tet.lambda = {lambda[T.edge_index(i, j)], lambda[T.edge_index(j, k)],
                          lambda[T.edge_index(k, i)], -out.u[i], -out.u[j],
                          -out.u[k]};
        rec.dihedral = rec.tet.dihedral();
        for (int s = 0; s < 3; ++s)
            rec.positions.row(s) = out.positions.row(rec.vertices[s]);
        rec.positions.row(3) = out.positions.row(apex);
        out.tetrahedra.push_back(std::move(rec));
    }
    return out;
}

MixedEquivalenceResult mixed_equivalence_check(const Triangulation& T,
                                               const DiscreteMetric& euclidean,
                                               const DiscreteMetric& hyperbolic,
                                               double tol) {
    if (euclidean.flavor != Flavor::Euclidean ||
        hyperbolic.flavor != Flavor::Hyperbolic)
        throw FlavorMismatchError(
            "mixed_equivalence_check expects a euclidean and a hyperbolic metric");
    // sinh(ℓ̃/2) = e^{(u_i+u_j)/2} ℓ means the hyperbolic λ (2 log sinh(ℓ̃/2))
    // is the conformal rescale of the euclidean λ (2 log ℓ)
    DiscreteMetric secant =
        DiscreteMetric::from_lambda(Flavor::Euclidean, hyperbolic.lambda);
    EquivalenceResult r = verify_conformal_equivalence(T, euclidean, secant, tol);
    MixedEquivalenceResult out;
    out.equivalent = r.equivalent;
    out.u = r.u;
    return out;
}

}  // namespace dcp
