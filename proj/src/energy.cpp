#include "dcp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "dcp/errors.hpp"
#include "dcp/kernel.hpp"

namespace dcp {

namespace {

constexpr double kPi = 3.14159265358979323846;

int slot_of(const std::array<int, 3>& f, int v) {
    for (int s = 0; s < 3; ++s)
        if (f[s] == v) return s;
    return -1;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_edge_quadratic(Triplets& t, int i, int j, double w, double sign) {
    // w·(du_i + sign·du_j)²
    t.emplace_back(i, i, w);
    t.emplace_back(j, j, w);
    t.emplace_back(i, j, sign * w);
    t.emplace_back(j, i, sign * w);
}

}  // namespace

EnergyEval energy_euclidean(const Triangulation& T, const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& theta, const Eigen::VectorXd& u) {
    const int V = T.n_vertices;
    EnergyEval ev;
    ev.grad = Eigen::VectorXd::Zero(V);
    ev.angle_sums = Eigen::VectorXd::Zero(V);
    Triplets trip;
    for (int f = 0; f < T.n_faces(); ++f) {
        const auto& fv = T.faces[f];
        double x[3];
        for (int s = 0; s < 3; ++s) {
            int e = T.face_edges[f][s];
            int p = fv[(s + 1) % 3], q = fv[(s + 2) % 3];
            x[s] = 0.5 * (lambda[e] + u[p] + u[q]);
        }
        TriangleDerivatives d;
        double fv_val = f_value_grad_hess(x[0], x[1], x[2], d);
        ev.value += 2.0 * fv_val - kPi * (x[0] + x[1] + x[2]);
        if (d.broken) ev.broken_faces.push_back(f);
        for (int s = 0; s < 3; ++s) {
            ev.grad[fv[s]] -= d.grad[s];
            ev.angle_sums[fv[s]] += d.grad[s];
            double w = 0.5 * d.cot[s];
            if (w != 0.0)
                add_edge_quadratic(trip, fv[(s + 1) % 3], fv[(s + 2) % 3], w, -1.0);
        }
    }
    ev.value += theta.dot(u);
    ev.grad += theta;
    ev.hess.resize(V, V);
    ev.hess.setFromTriplets(trip.begin(), trip.end());
    return ev;
}

Eigen::SparseMatrix<double> euclidean_hessian_edge_formula(
    const Triangulation& T, const Eigen::VectorXd& lambda, const Eigen::VectorXd& u) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(T.n_edges());
    for (int f = 0; f < T.n_faces(); ++f) {
        const auto& fv = T.faces[f];
        double x[3];
        for (int s = 0; s < 3; ++s) {
            int e = T.face_edges[f][s];
            x[s] = 0.5 * (lambda[e] + u[fv[(s + 1) % 3]] + u[fv[(s + 2) % 3]]);
        }
        TriangleDerivatives d;
        f_value_grad_hess(x[0], x[1], x[2], d);
        for (int s = 0; s < 3; ++s) w[T.face_edges[f][s]] += 0.5 * d.cot[s];
    }
    Triplets trip;
    for (int e = 0; e < T.n_edges(); ++e)
        if (w[e] != 0.0)
            add_edge_quadratic(trip, T.edges[e].v[0], T.edges[e].v[1], w[e], -1.0);
    Eigen::SparseMatrix<double> H(T.n_vertices, T.n_vertices);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

namespace {

// per-face prism evaluation shared by the hyperbolic energy and its
// edge-formula Hessian; sides[s] is the rescaled length opposite vertex s
struct FacePrism {
    PrismData p;
    std::array<double, 3> side;  // ℓ̃ opposite local vertex 0,1,2
};

FacePrism face_prism(const Triangulation& T, const Eigen::VectorXd& lambda,
                     const Eigen::VectorXd& u, int f) {
    const auto& fv = T.faces[f];
    double l12 = lambda[T.face_edges[f][2]];
    double l23 = lambda[T.face_edges[f][0]];
    double l31 = lambda[T.face_edges[f][1]];
    FacePrism fp;
    fp.p = prism_data(l12, l23, l31, -u[fv[0]], -u[fv[1]], -u[fv[2]]);
    fp.side = {fp.p.ell[1], fp.p.ell[2], fp.p.ell[0]};
    return fp;
}

}  // namespace

EnergyEval energy_hyperbolic(const Triangulation& T, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& theta, const Eigen::VectorXd& u) {
    const int V = T.n_vertices;
    EnergyEval ev;
    ev.grad = Eigen::VectorXd::Zero(V);
    ev.angle_sums = Eigen::VectorXd::Zero(V);
    Triplets trip;
    for (int f = 0; f < T.n_faces(); ++f) {
        const auto& fv = T.faces[f];
        FacePrism fp = face_prism(T, lambda, u, f);
        ev.value += fp.p.value;
        if (fp.p.broken) ev.broken_faces.push_back(f);
        for (int s = 0; s < 3; ++s) {
            ev.grad[fv[s]] -= fp.p.alpha[s];
            ev.angle_sums[fv[s]] += fp.p.alpha[s];
        }
        if (!fp.p.broken) {
            TriangleAngles ang;
            ang.alpha = fp.p.alpha;
            Eigen::Matrix3d M = hyperbolic_angle_derivatives(
                fp.side[0], fp.side[1], fp.side[2], ang);
            Eigen::Vector3d t;
            for (int e = 0; e < 3; ++e) t[e] = std::tanh(0.5 * fp.side[e]);
            Eigen::Matrix3d H;
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n) {
                    double s = 0;
                    for (int e = 0; e < 3; ++e)
                        if (e != n) s += M(m, e) * t[e];
                    H(m, n) = -s;
                }
            H = 0.5 * (H + H.transpose()).eval();
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n)
                    trip.emplace_back(fv[m], fv[n], H(m, n));
        }
    }
    ev.value += theta.dot(u);
    ev.grad += theta;
    ev.hess.resize(V, V);
    ev.hess.setFromTriplets(trip.begin(), trip.end());
    return ev;
}

Eigen::SparseMatrix<double> hyperbolic_hessian_edge_formula(
    const Triangulation& T, const Eigen::VectorXd& lambda, const Eigen::VectorXd& u) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(T.n_edges());
    Eigen::VectorXd tl = Eigen::VectorXd::Zero(T.n_edges());
    for (int f = 0; f < T.n_faces(); ++f) {
        FacePrism fp = face_prism(T, lambda, u, f);
        // alpha_edge[0] sits at edge v0v1 = face_edges[f][2], etc.
        const int emap[3] = {T.face_edges[f][2], T.face_edges[f][0],
                             T.face_edges[f][1]};
        const double lmap[3] = {fp.p.ell[0], fp.p.ell[1], fp.p.ell[2]};
        for (int s = 0; s < 3; ++s) {
            tl[emap[s]] = std::tanh(0.5 * lmap[s]);
            if (!fp.p.broken)
                w[emap[s]] += 0.5 / std::tan(fp.p.alpha_edge[s]);
        }
    }
    Triplets trip;
    for (int e = 0; e < T.n_edges(); ++e) {
        if (w[e] == 0.0) continue;
        int i = T.edges[e].v[0], j = T.edges[e].v[1];
        add_edge_quadratic(trip, i, j, w[e], -1.0);
        add_edge_quadratic(trip, i, j, w[e] * tl[e] * tl[e], 1.0);
    }
    Eigen::SparseMatrix<double> H(T.n_vertices, T.n_vertices);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

Eigen::VectorXd default_phi(const Triangulation& T) {
    Eigen::VectorXd phi(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e)
        phi[e] = T.edge_is_boundary(e) ? 0.5 * kPi : kPi;
    return phi;
}

EnergyEval energy_circle_pattern(const Triangulation& T, const Eigen::VectorXd& lambda,
                                 const Eigen::VectorXd& phi,
                                 const Eigen::VectorXd& theta,
                                 const Eigen::VectorXd& u) {
    const int V = T.n_vertices, E = T.n_edges();
    EnergyEval ev;
    ev.grad = Eigen::VectorXd::Zero(V + E);
    ev.angle_sums = Eigen::VectorXd::Zero(V);
    Triplets trip;
    for (int f = 0; f < T.n_faces(); ++f) {
        const auto& fv = T.faces[f];
        int e12 = T.face_edges[f][2], e23 = T.face_edges[f][0], e31 = T.face_edges[f][1];
        IdealTetDerivatives d = ideal_tet_vhat2_grad_hess(
            lambda[e12], lambda[e23], lambda[e31], -u[fv[0]], -u[fv[1]], -u[fv[2]]);
        ev.value += d.value2;
        if (d.broken) ev.broken_faces.push_back(f);
        // global variable index and sign per slot
        const int gidx[6] = {V + e12, V + e23, V + e31, fv[0], fv[1], fv[2]};
        const double gsgn[6] = {1, 1, 1, -1, -1, -1};
        for (int a = 0; a < 6; ++a) ev.grad[gidx[a]] += gsgn[a] * d.grad[a];
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                double h = gsgn[a] * gsgn[b] * d.hess(a, b);
                if (h != 0.0) trip.emplace_back(gidx[a], gidx[b], h);
            }
        ev.angle_sums[fv[0]] += d.angle[1];
        ev.angle_sums[fv[1]] += d.angle[2];
        ev.angle_sums[fv[2]] += d.angle[0];
    }
    for (int e = 0; e < E; ++e) {
        ev.value -= phi[e] * lambda[e];
        ev.grad[V + e] -= phi[e];
    }
    ev.value += theta.dot(u);
    ev.grad.head(V) += theta;
    ev.hess.resize(V + E, V + E);
    ev.hess.setFromTriplets(trip.begin(), trip.end());
    return ev;
}

std::pair<double, Eigen::VectorXd> s_functional(const Triangulation& T,
                                                const Eigen::VectorXd& lambda,
                                                const Eigen::VectorXd& alpha) {
    double value = 0;
    Eigen::VectorXd grad(3 * T.n_faces());
    for (int f = 0; f < T.n_faces(); ++f) {
        for (int s = 0; s < 3; ++s) {
            double a = alpha[3 * f + s];
            if (!(a > 0.0 && a < kPi))
                throw AngleOutOfRangeError("corner angle outside (0, pi)");
            double lam = lambda[T.face_edges[f][s]];
            value += lobachevsky(a) + 0.5 * a * lam;
            grad[3 * f + s] = 0.5 * lam - std::log(2.0 * std::sin(a));
        }
    }
    return {value, grad};
}

Eigen::VectorXd s_cycle_derivatives(const Triangulation& T,
                                    const Eigen::VectorXd& lambda,
                                    const Eigen::VectorXd& alpha) {
    auto g = [&](int f, int s) {
        return 0.5 * lambda[T.face_edges[f][s]] -
               std::log(2.0 * std::sin(alpha[3 * f + s]));
    };
    Eigen::VectorXd out = Eigen::VectorXd::Zero(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        if (ed.face[0] < 0 || ed.face[1] < 0) continue;
        int f0 = ed.face[0], f1 = ed.face[1];
        int i = ed.v[0], j = ed.v[1];
        out[e] = g(f1, slot_of(T.faces[f1], j)) - g(f1, slot_of(T.faces[f1], i)) +
                 g(f0, slot_of(T.faces[f0], i)) - g(f0, slot_of(T.faces[f0], j));
    }
    return out;
}

namespace {

// max flow (Edmonds–Karp) on a small graph with double capacities
struct FlowGraph {
    struct Arc {
        int to;
        double cap;
        int rev;
    };
    std::vector<std::vector<Arc>> adj;
    explicit FlowGraph(int n) : adj(n) {}
    int add(int a, int b, double cap) {
        adj[a].push_back({b, cap, int(adj[b].size())});
        adj[b].push_back({a, 0.0, int(adj[a].size()) - 1});
        return int(adj[a].size()) - 1;
    }
    double max_flow(int s, int t) {
        double total = 0;
        while (true) {
            std::vector<std::pair<int, int>> pred(adj.size(), {-1, -1});
            std::queue<int> q;
            q.push(s);
            pred[s] = {s, 0};
            while (!q.empty() && pred[t].first < 0) {
                int n = q.front();
                q.pop();
                for (int a = 0; a < int(adj[n].size()); ++a) {
                    const Arc& arc = adj[n][a];
                    if (arc.cap > 1e-13 && pred[arc.to].first < 0) {
                        pred[arc.to] = {n, a};
                        q.push(arc.to);
                    }
                }
            }
            if (pred[t].first < 0) break;
            double aug = std::numeric_limits<double>::infinity();
            for (int n = t; n != s;) {
                auto [p, a] = pred[n];
                aug = std::min(aug, adj[p][a].cap);
                n = p;
            }
            for (int n = t; n != s;) {
                auto [p, a] = pred[n];
                adj[p][a].cap -= aug;
                adj[adj[p][a].to][adj[p][a].rev].cap += aug;
                n = p;
            }
            total += aug;
        }
        return total;
    }
};

}  // namespace

ConditionReport check_conditions(const Triangulation& T, const Eigen::VectorXd& theta,
                                 double eps) {
    ConditionReport r;
    const int F = T.n_faces(), V = T.n_vertices;
    double theta_sum = 0;
    for (int v = 0; v < V; ++v)
        if (!T.vertex_corners[v].empty()) theta_sum += theta[v];
    r.condition1_residual = theta_sum - kPi * F;
    r.condition1 = std::abs(r.condition1_residual) <= 1e-9;

    // feasible flow with lower bounds: source→face [π,π], face→corner-vertex
    // [eps, π], vertex→sink [Θ,Θ]; reduced to plain max flow
    const int S = F + V, Tk = F + V + 1, SS = F + V + 2, TT = F + V + 3;
    FlowGraph g(F + V + 4);
    std::vector<double> excess(F + V + 4, 0.0);
    excess[S] -= kPi * F;
    std::vector<std::array<int, 3>> corner_arc(F);
    for (int f = 0; f < F; ++f) {
        excess[f] += kPi;
        for (int s = 0; s < 3; ++s) {
            int v = T.faces[f][s];
            corner_arc[f][s] = g.add(f, F + v, kPi - eps);
            excess[f] -= eps;
            excess[F + v] += eps;
        }
    }
    for (int v = 0; v < V; ++v) {
        if (T.vertex_corners[v].empty()) continue;
        excess[F + v] -= theta[v];
        excess[Tk] += theta[v];
    }
    g.add(Tk, S, std::numeric_limits<double>::infinity());
    double need = 0;
    for (int n = 0; n < F + V + 2; ++n) {
        if (excess[n] > 0) {
            g.add(SS, n, excess[n]);
            need += excess[n];
        } else if (excess[n] < 0) {
            g.add(n, TT, -excess[n]);
        }
    }
    double flow = g.max_flow(SS, TT);
    r.condition2 = (need - flow) <= 1e-9;
    r.condition3 = r.condition2;
    if (r.condition2) {
        r.alpha_witness.resize(3 * F);
        for (int f = 0; f < F; ++f)
            for (int s = 0; s < 3; ++s) {
                const auto& arc = g.adj[f][corner_arc[f][s]];
                // residual of the reverse arc is the shipped flow
                double shipped = g.adj[arc.to][arc.rev].cap;
                r.alpha_witness[3 * f + s] = eps + shipped;
            }
    }
    return r;
}

CoercivityReport coercivity_probe(const Triangulation& T, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd& theta,
                                  const std::vector<Eigen::VectorXd>& directions,
                                  int t_max) {
    CoercivityReport rep;
    for (const auto& d : directions) {
        std::vector<double> vals;
        for (int t = 1; t <= t_max; ++t) {
            Eigen::VectorXd u = double(t) * d;
            vals.push_back(energy_euclidean(T, lambda, theta, u).value);
        }
        int n = int(vals.size());
        rep.eventually_increasing.push_back(
            n >= 3 && vals[n - 1] > vals[n - 2] && vals[n - 2] > vals[n - 3]);
        rep.samples.push_back(std::move(vals));
    }
    return rep;
}

}  // namespace dcp
