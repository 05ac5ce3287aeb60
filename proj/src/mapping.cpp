#include "dcp/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "dcp/energy.hpp"
#include "dcp/errors.hpp"

namespace dcp {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Straight-triangle layout of embedded vertex positions (V×2 rows).
PlanarLayout layout_from_positions(const Triangulation& T, const Eigen::MatrixXd& pos) {
    PlanarLayout L;
    L.corner_pos.resize(3 * T.n_faces(), 2);
    L.face_order.resize(T.n_faces());
    for (int f = 0; f < T.n_faces(); ++f) {
        L.face_order[f] = f;
        for (int s = 0; s < 3; ++s) L.corner_pos.row(3 * f + s) = pos.row(T.faces[f][s]);
    }
    return L;
}

/// u with e^{u_i/2} = 1/ℓ_ki on the neighbors of k, 0 elsewhere.
Eigen::VectorXd apex_scale_factors(const Triangulation& T, const DiscreteMetric& m,
                                   int k) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(T.n_vertices);
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        if (ed.v[0] == k)
            u[ed.v[1]] = -m.lambda[e];
        else if (ed.v[1] == k)
            u[ed.v[0]] = -m.lambda[e];
    }
    return u;
}

std::vector<int> faces_avoiding(const Triangulation& T, int k) {
    std::vector<int> keep;
    for (int f = 0; f < T.n_faces(); ++f)
        if (T.faces[f][0] != k && T.faces[f][1] != k && T.faces[f][2] != k)
            keep.push_back(f);
    return keep;
}

std::vector<int> old_vertex_ids(const std::vector<int>& vertex_map, int n_sub) {
    std::vector<int> old_of(n_sub, -1);
    for (int v = 0; v < int(vertex_map.size()); ++v)
        if (vertex_map[v] >= 0) old_of[vertex_map[v]] = v;
    return old_of;
}

Eigen::VectorXd restrict_lambda(const Triangulation& sub, const std::vector<int>& old_of,
                                const Triangulation& T, const Eigen::VectorXd& lambda) {
    Eigen::VectorXd lam(sub.n_edges());
    for (int e = 0; e < sub.n_edges(); ++e) {
        int old_e = T.edge_index(old_of[sub.edges[e].v[0]], old_of[sub.edges[e].v[1]]);
        lam[e] = lambda[old_e];
    }
    return lam;
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

void require_disk(const Triangulation& sub, const char* what) {
    if (sub.n_faces() == 0 || sub.euler_characteristic() != 1 ||
        sub.boundary_loops().size() != 1 || !is_connected(sub))
        throw EarDetectedError(std::string(what) +
                               ": removing the apex star does not leave a disk");
}

/// The two neighbors of k along the boundary loop containing it.
std::pair<int, int> boundary_neighbors(const Triangulation& T, int k) {
    for (const auto& loop : T.boundary_loops()) {
        int n = int(loop.size());
        for (int i = 0; i < n; ++i)
            if (loop[i] == k) return {loop[(i + n - 1) % n], loop[(i + 1) % n]};
    }
    throw ValidationError("vertex is not on the boundary");
}

/// Möbius step of the disk pipeline: the line through a and b goes to the
/// unit circle, the half-plane containing the interior goes inside, and
/// infinity (the reinserted apex) goes to (1,0).
Eigen::MatrixXd line_to_circle(const Eigen::MatrixXd& pos, const Eigen::Vector2d& a,
                               const Eigen::Vector2d& b) {
    using C = std::complex<double>;
    C ca(a.x(), a.y()), cb(b.x(), b.y());
    C dir = cb - ca;
    if (std::abs(dir) == 0.0) throw DegenerateFaceError("boundary line is degenerate");

    double best = 0;
    double side = 1.0;
    Eigen::MatrixXd out(pos.rows() + 1, 2);
    std::vector<C> w(pos.rows());
    for (int v = 0; v < pos.rows(); ++v) {
        w[v] = (C(pos(v, 0), pos(v, 1)) - ca) / dir;
        if (std::abs(w[v].imag()) > best) {
            best = std::abs(w[v].imag());
            side = w[v].imag() > 0 ? 1.0 : -1.0;
        }
    }
    const C i(0, 1);
    for (int v = 0; v < pos.rows(); ++v) {
        C z(w[v].real(), side * w[v].imag());
        C zeta = (z - i) / (z + i);
        out(v, 0) = zeta.real();
        out(v, 1) = zeta.imag();
    }
    out(pos.rows(), 0) = 1.0;  // image of infinity
    out(pos.rows(), 1) = 0.0;
    return out;
}

Eigen::Vector3d inverse_stereographic(double x, double y) {
    double d = x * x + y * y + 1.0;
    return {2.0 * x / d, 2.0 * y / d, (x * x + y * y - 1.0) / d};
}

/// Normalize the planar layout by the similarity z → s(z − c) so that the
/// inverse stereographic images of the points, together with the north pole
/// (the apex image), have vanishing barycenter. This conformal-barycenter
/// normalization is Möbius-equivariant, so symmetric inputs give symmetric
/// polyhedra.
void balance_on_sphere(Eigen::MatrixXd& X) {
    auto residual = [&](const Eigen::Vector3d& p) {
        double c1 = p[0], c2 = p[1], s = std::exp(p[2]);
        Eigen::Vector3d r(0, 0, 1);  // north pole contribution
        for (int v = 0; v < X.rows(); ++v)
            r += inverse_stereographic(s * (X(v, 0) - c1), s * (X(v, 1) - c2));
        return r;
    };
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Vector3d r = residual(p);
    for (int it = 0; it < 100 && r.norm() > 1e-13; ++it) {
        Eigen::Matrix3d J;
        const double h = 1e-6;
        for (int c = 0; c < 3; ++c) {
            Eigen::Vector3d pp = p, pm = p;
            pp[c] += h;
            pm[c] -= h;
            J.col(c) = (residual(pp) - residual(pm)) / (2.0 * h);
        }
        Eigen::Vector3d step = J.colPivHouseholderQr().solve(-r);
        if (!step.allFinite()) break;
        double t = 1.0;
        Eigen::Vector3d pn;
        Eigen::Vector3d rn;
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls) {
            pn = p + t * step;
            rn = residual(pn);
            if (rn.norm() < r.norm()) {
                ok = true;
                break;
            }
            t *= 0.5;
        }
        if (!ok) break;
        p = pn;
        r = rn;
    }
    double c1 = p[0], c2 = p[1], s = std::exp(p[2]);
    for (int v = 0; v < X.rows(); ++v) {
        X(v, 0) = s * (X(v, 0) - c1);
        X(v, 1) = s * (X(v, 1) - c2);
    }
}

/// Normalize positions in the closed unit disk by the automorphism
/// z → e^{iφ}(z − a)/(1 − ā z): a balances the listed boundary vertices
/// (Σ of their images = 0) and φ turns the anchor vertex to (1, 0). The
/// balance point is equivariant under disk automorphisms, so symmetric
/// inputs give symmetric images.
void balance_in_disk(Eigen::MatrixXd& pos, const std::vector<int>& boundary,
                     int anchor) {
    using C = std::complex<double>;
    auto residual = [&](C a) {
        C r = 0;
        for (int v : boundary) {
            C b(pos(v, 0), pos(v, 1));
            r += (b - a) / (1.0 - std::conj(a) * b);
        }
        return r;
    };
    C a = 0;
    C r = residual(a);
    for (int it = 0; it < 100 && std::abs(r) > 1e-13; ++it) {
        const double h = 1e-7;
        C rx = (residual(a + h) - residual(a - h)) / (2.0 * h);
        C ry = (residual(a + C(0, h)) - residual(a - C(0, h))) / (2.0 * h);
        Eigen::Matrix2d J;
        J << rx.real(), ry.real(), rx.imag(), ry.imag();
        Eigen::Vector2d step = J.colPivHouseholderQr().solve(
            Eigen::Vector2d(-r.real(), -r.imag()));
        if (!step.allFinite()) break;
        double t = 1.0;
        bool ok = false;
        C an;
        C rn;
        for (int ls = 0; ls < 40; ++ls) {
            an = a + t * C(step[0], step[1]);
            if (std::abs(an) < 1.0 - 1e-12) {
                rn = residual(an);
                if (std::abs(rn) < std::abs(r)) {
                    ok = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!ok) break;
        a = an;
        r = rn;
    }
    C zk(pos(anchor, 0), pos(anchor, 1));
    C zk_moved = (zk - a) / (1.0 - std::conj(a) * zk);
    C phase = std::abs(zk_moved) > 0 ? std::conj(zk_moved) / std::abs(zk_moved) : C(1);
    for (int v = 0; v < pos.rows(); ++v) {
        C z(pos(v, 0), pos(v, 1));
        C w = phase * (z - a) / (1.0 - std::conj(a) * z);
        pos(v, 0) = w.real();
        pos(v, 1) = w.imag();
    }
}

/// Joint (u, λ) minimization of the circle-pattern energy with the given
/// per-variable masks; returns the rescaled metric λ̃ = λ + u_i + u_j.
std::pair<DiscreteMetric, SolveReport> minimize_circle_pattern(
    const Triangulation& T, const Eigen::VectorXd& lambda0, const Eigen::VectorXd& phi,
    const Eigen::VectorXd& theta, const Eigen::VectorXd& u0,
    const std::vector<bool>& free_mask, const SolverConfig& config) {
    const int V = T.n_vertices, E = T.n_edges();
    Eigen::VectorXd x0(V + E);
    x0.head(V) = u0;
    x0.tail(E) = lambda0;

    EnergyCallback cb = [&](const Eigen::VectorXd& x) {
        return energy_circle_pattern(T, x.tail(E), phi, theta, x.head(V));
    };
    SolveReport rep = minimize(cb, x0, free_mask, config);
    if (rep.status == SolveStatus::Converged && !rep.broken_faces.empty())
        throw BrokenAtOptimumError(
            "minimizer lies outside the triangle-inequality domain");

    Eigen::VectorXd lam(E);
    for (int e = 0; e < E; ++e)
        lam[e] = rep.x[V + e] + rep.x[T.edges[e].v[0]] + rep.x[T.edges[e].v[1]];
    return {DiscreteMetric::from_lambda(Flavor::Euclidean, lam), rep};
}

}  // namespace

FlattenResult flatten(const Triangulation& T, const DiscreteMetric& metric,
                      const Eigen::VectorXd& boundary_theta, const SolverConfig& config) {
    if (T.is_closed() || T.boundary_loops().size() != 1 ||
        T.euler_characteristic() != 1)
        throw ValidationError("flatten expects a triangulated disk");
    if (metric.flavor != Flavor::Euclidean)
        throw FlavorMismatchError("flatten expects a euclidean metric");

    BoundaryConditions bc;
    bc.theta.resize(T.n_vertices);
    for (int v = 0; v < T.n_vertices; ++v)
        bc.theta[v] = T.vertex_boundary[v] ? boundary_theta[v] : 2 * kPi;

    FlattenResult res;
    std::tie(res.metric, res.report) = solve_problem(T, metric, bc, config);
    res.layout = layout_euclidean(T, res.metric);
    return res;
}

Eigen::VectorXd rectangle_theta(const Triangulation& T, const std::array<int, 4>& corners) {
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(T.n_vertices, 2 * kPi);
    for (int v = 0; v < T.n_vertices; ++v)
        if (T.vertex_boundary[v]) theta[v] = kPi;
    for (int c : corners) {
        if (c < 0 || c >= T.n_vertices || !T.vertex_boundary[c])
            throw ValidationError("rectangle corner is not a boundary vertex");
        theta[c] = kPi / 2;
    }
    return theta;
}

SpherePolyhedron map_to_sphere(const Triangulation& T, const DiscreteMetric& metric,
                               int apex, const SolverConfig& config) {
    if (!T.is_closed() || T.euler_characteristic() != 2)
        throw ValidationError("map_to_sphere expects a triangulated sphere");
    if (apex < 0 || apex >= T.n_vertices) throw ValidationError("apex out of range");
    if (metric.flavor != Flavor::Euclidean)
        throw FlavorMismatchError("map_to_sphere expects a euclidean metric");

    Eigen::VectorXd u = apex_scale_factors(T, metric, apex);
    std::vector<int> vmap;
    auto sub = submesh(T, faces_avoiding(T, apex), vmap);
    require_disk(sub, "map_to_sphere");
    auto old_of = old_vertex_ids(vmap, sub.n_vertices);

    Eigen::VectorXd lam = restrict_lambda(sub, old_of, T, metric.lambda);
    for (int e = 0; e < sub.n_edges(); ++e)
        lam[e] += u[old_of[sub.edges[e].v[0]]] + u[old_of[sub.edges[e].v[1]]];

    BoundaryConditions bc;
    bc.u_fixed.assign(sub.n_vertices, false);
    bc.u_values = Eigen::VectorXd::Zero(sub.n_vertices);
    bc.theta = Eigen::VectorXd::Constant(sub.n_vertices, 2 * kPi);
    for (int v = 0; v < sub.n_vertices; ++v) bc.u_fixed[v] = sub.vertex_boundary[v];

    auto [flat, rep] = solve_problem(
        sub, DiscreteMetric::from_lambda(Flavor::Euclidean, lam), bc, config);
    Eigen::MatrixXd X = layout_euclidean(sub, flat).vertex_positions(sub);
    balance_on_sphere(X);

    SpherePolyhedron out;
    out.report = std::move(rep);
    out.positions.resize(T.n_vertices, 3);
    for (int v = 0; v < sub.n_vertices; ++v) {
        double x = X(v, 0), y = X(v, 1);
        double d = x * x + y * y + 1.0;
        out.positions.row(old_of[v]) << 2 * x / d, 2 * y / d, (x * x + y * y - 1.0) / d;
    }
    out.positions.row(apex) << 0, 0, 1;
    return out;
}

DiskMapResult map_to_disk(const Triangulation& T, const DiscreteMetric& metric,
                          int boundary_vertex, const SolverConfig& config) {
    if (T.is_closed() || T.boundary_loops().size() != 1 ||
        T.euler_characteristic() != 1)
        throw ValidationError("map_to_disk expects a triangulated disk");
    if (metric.flavor != Flavor::Euclidean)
        throw FlavorMismatchError("map_to_disk expects a euclidean metric");
    int k = boundary_vertex;
    if (k < 0 || k >= T.n_vertices || !T.vertex_boundary[k])
        throw ValidationError("map_to_disk expects a boundary vertex");
    for (int f = 0; f < T.n_faces(); ++f) {
        int bdry = 0;
        for (int s = 0; s < 3; ++s) bdry += T.edge_is_boundary(T.face_edges[f][s]);
        if (bdry >= 2) throw EarDetectedError("triangle with two boundary edges");
    }

    Eigen::VectorXd u = apex_scale_factors(T, metric, k);
    std::set<int> link;
    for (int n : T.ordered_neighbors(k)) link.insert(n);
    std::vector<int> vmap;
    auto sub = submesh(T, faces_avoiding(T, k), vmap);
    require_disk(sub, "map_to_disk");
    auto old_of = old_vertex_ids(vmap, sub.n_vertices);

    Eigen::VectorXd lam = restrict_lambda(sub, old_of, T, metric.lambda);
    for (int e = 0; e < sub.n_edges(); ++e)
        lam[e] += u[old_of[sub.edges[e].v[0]]] + u[old_of[sub.edges[e].v[1]]];

    BoundaryConditions bc;
    bc.u_fixed.assign(sub.n_vertices, false);
    bc.u_values = Eigen::VectorXd::Zero(sub.n_vertices);
    bc.theta = Eigen::VectorXd::Constant(sub.n_vertices, 2 * kPi);
    for (int v = 0; v < sub.n_vertices; ++v)
        if (sub.vertex_boundary[v]) {
            if (link.count(old_of[v]))
                bc.u_fixed[v] = true;
            else
                bc.theta[v] = kPi;
        }

    auto [flat, rep] = solve_problem(
        sub, DiscreteMetric::from_lambda(Flavor::Euclidean, lam), bc, config);
    Eigen::MatrixXd X = layout_euclidean(sub, flat).vertex_positions(sub);

    auto [n1, n2] = boundary_neighbors(T, k);
    Eigen::MatrixXd img =
        line_to_circle(X, X.row(vmap[n1]).transpose(), X.row(vmap[n2]).transpose());

    DiskMapResult res;
    res.report = std::move(rep);
    res.vertex_pos.resize(T.n_vertices, 2);
    for (int v = 0; v < sub.n_vertices; ++v) res.vertex_pos.row(old_of[v]) = img.row(v);
    res.vertex_pos.row(k) = img.row(sub.n_vertices);
    balance_in_disk(res.vertex_pos, T.boundary_loops()[0], k);
    res.metric = metric_from_positions(T, res.vertex_pos);
    res.layout = layout_from_positions(T, res.vertex_pos);
    return res;
}

std::pair<DiscreteMetric, SolveReport> solve_circle_pattern(const Triangulation& T,
                                                            const Eigen::VectorXd& phi,
                                                            const Eigen::VectorXd& theta,
                                                            const SolverConfig& config) {
    const int V = T.n_vertices, E = T.n_edges();
    if (phi.size() != E) throw ValidationError("phi must have one entry per edge");
    for (int e = 0; e < E; ++e)
        if (!(phi[e] > 0 && phi[e] <= kPi + 1e-12))
            throw AngleOutOfRangeError("phi entries must lie in (0, pi]");
    if (std::abs(phi.sum() - kPi * T.n_faces()) > 1e-8 * std::max(1.0, kPi * T.n_faces()))
        throw InfeasibleError("sum of phi must equal pi times the face count");

    std::vector<bool> mask(V + E, false);
    for (int e = 0; e < E; ++e) mask[V + e] = true;
    SolverConfig cfg = config;
    if (cfg.gauge == SolverConfig::Gauge::None)
        cfg.gauge = SolverConfig::Gauge::FixOneVertex;  // scale gauge on λ

    Eigen::VectorXd th = theta.size() == V ? theta : Eigen::VectorXd::Zero(V);
    return minimize_circle_pattern(T, Eigen::VectorXd::Zero(E), phi, th,
                                   Eigen::VectorXd::Zero(V), mask, cfg);
}

CircularMeshResult solve_circular_mesh(const CircularMesh& P,
                                       const BoundaryConditions& bc,
                                       const SolverConfig& config) {
    auto plen = [&](int a, int b) {
        auto it = P.lengths.find({std::min(a, b), std::max(a, b)});
        if (it == P.lengths.end())
            throw ValidationError("missing length for a polygon edge");
        if (!(it->second > 0)) throw NonPositiveLengthError("polygon edge length <= 0");
        return it->second;
    };

    CircularMeshResult res;
    std::vector<std::array<int, 3>> faces;
    std::vector<std::array<int, 2>> diag_pairs;
    std::vector<double> diag_init;
    for (const auto& poly : P.polygons) {
        const int m = int(poly.size());
        if (m < 3) throw ValidationError("polygon with fewer than 3 vertices");
        double total = 0, longest = 0;
        for (int i = 0; i < m; ++i) {
            double L = plen(poly[i], poly[(i + 1) % m]);
            total += L;
            longest = std::max(longest, L);
        }
        if (!(longest < total - longest))
            throw PolygonalInequalityError(
                "polygon edge at least as long as the sum of the others");
        double walk = plen(poly[0], poly[1]);
        for (int i = 1; i + 1 < m; ++i) {
            faces.push_back({poly[0], poly[i], poly[i + 1]});
            if (i + 2 < m) {
                walk += plen(poly[i], poly[i + 1]);
                diag_pairs.push_back({std::min(poly[0], poly[i + 1]),
                                      std::max(poly[0], poly[i + 1])});
                diag_init.push_back(std::min(walk, total - walk));
            }
        }
    }
    res.tri = build_triangulation(faces);
    const int V = res.tri.n_vertices, E = res.tri.n_edges();

    res.diagonal.assign(E, false);
    Eigen::VectorXd ell = Eigen::VectorXd::Zero(E);
    for (size_t d = 0; d < diag_pairs.size(); ++d) {
        int e = res.tri.edge_index(diag_pairs[d][0], diag_pairs[d][1]);
        res.diagonal[e] = true;
        ell[e] = diag_init[d];
    }
    for (int e = 0; e < E; ++e)
        if (!res.diagonal[e])
            ell[e] = plen(res.tri.edges[e].v[0], res.tri.edges[e].v[1]);
    Eigen::VectorXd lambda0 = 2.0 * ell.array().log();

    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(V);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(V);
    std::vector<bool> mask(V + E, false);
    bool any_fixed = false;
    for (int v = 0; v < V; ++v) {
        if (v < int(bc.u_fixed.size()) && bc.u_fixed[v]) {
            u0[v] = bc.u_values[v];
            any_fixed = true;
        } else {
            mask[v] = true;
            theta[v] = bc.theta[v];
        }
    }
    for (int e = 0; e < E; ++e) mask[V + e] = res.diagonal[e];

    SolverConfig cfg = config;
    if (!any_fixed) {
        if (std::abs(theta.sum() - kPi * res.tri.n_faces()) >
            1e-8 * std::max(1.0, kPi * res.tri.n_faces()))
            throw InfeasibleError("total angle condition violated");
        if (cfg.gauge == SolverConfig::Gauge::None)
            cfg.gauge = SolverConfig::Gauge::FixOneVertex;
    }

    std::tie(res.metric, res.report) = minimize_circle_pattern(
        res.tri, lambda0, default_phi(res.tri), theta, u0, mask, cfg);
    return res;
}

CircleDomainResult map_to_circle_domain(const Triangulation& T,
                                        const DiscreteMetric& metric,
                                        const SolverConfig& config) {
    if (metric.flavor != Flavor::Euclidean)
        throw FlavorMismatchError("map_to_circle_domain expects a euclidean metric");
    auto loops = T.boundary_loops();
    const int b = int(loops.size());
    if (b < 1 || T.euler_characteristic() != 2 - b)
        throw ValidationError("map_to_circle_domain expects genus 0 with boundary");

    std::sort(loops.begin(), loops.end(),
              [](const auto& a, const auto& c) { return a.size() > c.size(); });
    const auto& outer = loops[0];

    // ears on the outer boundary obstruct the Θ = π prescription
    std::set<int> outer_set(outer.begin(), outer.end());
    for (int f = 0; f < T.n_faces(); ++f) {
        int bdry = 0;
        for (int s = 0; s < 3; ++s) {
            const auto& ed = T.edges[T.face_edges[f][s]];
            if (T.edge_is_boundary(T.face_edges[f][s]) && outer_set.count(ed.v[0]) &&
                outer_set.count(ed.v[1]))
                ++bdry;
        }
        if (bdry >= 2) throw EarDetectedError("triangle with two outer boundary edges");
    }

    // fill the holes with fan-triangulated circular polygons
    std::vector<std::array<int, 3>> faces2(T.faces.begin(), T.faces.end());
    std::vector<std::array<int, 2>> diag_pairs;
    std::vector<double> diag_init;
    for (int h = 1; h < b; ++h) {
        const auto& loop = loops[h];
        const int m = int(loop.size());
        std::vector<double> side(m);
        double total = 0;
        for (int i = 0; i < m; ++i) {
            side[i] = metric.ell[T.edge_index(loop[i], loop[(i + 1) % m])];
            total += side[i];
        }
        double walk = side[0];
        for (int i = 1; i + 1 < m; ++i) {
            faces2.push_back({loop[0], loop[i], loop[i + 1]});
            if (i + 2 < m) {
                walk += side[i];
                diag_pairs.push_back(
                    {std::min(loop[0], loop[i + 1]), std::max(loop[0], loop[i + 1])});
                diag_init.push_back(std::min(walk, total - walk));
            }
        }
    }
    auto T2 = build_triangulation(faces2, T.n_vertices);

    std::vector<bool> diagonal(T2.n_edges(), false);
    Eigen::VectorXd ell2 = Eigen::VectorXd::Zero(T2.n_edges());
    for (size_t d = 0; d < diag_pairs.size(); ++d) {
        int e = T2.edge_index(diag_pairs[d][0], diag_pairs[d][1]);
        diagonal[e] = true;
        ell2[e] = diag_init[d];
    }
    for (int e = 0; e < T2.n_edges(); ++e)
        if (!diagonal[e])
            ell2[e] = metric.ell[T.edge_index(T2.edges[e].v[0], T2.edges[e].v[1])];
    DiscreteMetric m2(Flavor::Euclidean, ell2);

    // disk pipeline on the filled surface with the apex on the outer loop
    const int k = outer[0];
    Eigen::VectorXd u = apex_scale_factors(T2, m2, k);
    std::set<int> link;
    for (int n : T2.ordered_neighbors(k)) link.insert(n);
    std::vector<int> vmap;
    auto keep = faces_avoiding(T2, k);
    auto sub = submesh(T2, keep, vmap);
    require_disk(sub, "map_to_circle_domain");
    auto old_of = old_vertex_ids(vmap, sub.n_vertices);

    Eigen::VectorXd lam = restrict_lambda(sub, old_of, T2, m2.lambda);
    for (int e = 0; e < sub.n_edges(); ++e)
        lam[e] += u[old_of[sub.edges[e].v[0]]] + u[old_of[sub.edges[e].v[1]]];
    std::vector<bool> sub_diag(sub.n_edges(), false);
    for (int e = 0; e < sub.n_edges(); ++e) {
        int old_e = T2.edge_index(old_of[sub.edges[e].v[0]], old_of[sub.edges[e].v[1]]);
        sub_diag[e] = diagonal[old_e];
    }

    const int V = sub.n_vertices, E = sub.n_edges();
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(V);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(V);
    std::vector<bool> mask(V + E, false);
    for (int v = 0; v < V; ++v) {
        if (sub.vertex_boundary[v] && link.count(old_of[v])) {
            u0[v] = 0.0;  // already folded into lam
        } else {
            mask[v] = true;
            theta[v] = sub.vertex_boundary[v] ? kPi : 2 * kPi;
        }
    }
    for (int e = 0; e < E; ++e) mask[V + e] = sub_diag[e];

    CircleDomainResult res;
    DiscreteMetric flat;
    std::tie(flat, res.report) =
        minimize_circle_pattern(sub, lam, default_phi(sub), theta, u0, mask, config);
    Eigen::MatrixXd X = layout_euclidean(sub, flat).vertex_positions(sub);

    auto [n1, n2] = boundary_neighbors(T2, k);
    Eigen::MatrixXd img =
        line_to_circle(X, X.row(vmap[n1]).transpose(), X.row(vmap[n2]).transpose());

    res.vertex_pos.resize(T.n_vertices, 2);
    for (int v = 0; v < sub.n_vertices; ++v) res.vertex_pos.row(old_of[v]) = img.row(v);
    res.vertex_pos.row(k) = img.row(sub.n_vertices);
    balance_in_disk(res.vertex_pos, outer, k);
    res.metric = metric_from_positions(T, res.vertex_pos);
    res.layout = layout_from_positions(T, res.vertex_pos);
    res.hole_loops.assign(loops.begin() + 1, loops.end());
    return res;
}

UniformizationResult uniformize_hyperbolic(const Triangulation& T,
                                           const DiscreteMetric& metric,
                                           const SolverConfig& config) {
    if (metric.flavor != Flavor::Euclidean)
        throw FlavorMismatchError("uniformize_hyperbolic expects a euclidean metric");
    if (!T.is_closed() || T.euler_characteristic() >= 0)
        throw ValidationError("uniformize_hyperbolic expects a closed surface of genus >= 2");

    // reinterpreting the euclidean λ as hyperbolic λ realizes the mixed
    // equivalence sinh(ℓ̃/2) = e^{(u_i+u_j)/2} ℓ
    DiscreteMetric mixed = DiscreteMetric::from_lambda(Flavor::Hyperbolic, metric.lambda);
    BoundaryConditions bc;
    bc.theta = Eigen::VectorXd::Constant(T.n_vertices, 2 * kPi);

    UniformizationResult res;
    std::tie(res.metric, res.report) = solve_problem(T, mixed, bc, config);
    res.layout = layout_hyperbolic(T, res.metric);
    return res;
}

Eigen::Vector2d ProjectiveTriangleMap::apply(const Eigen::Vector2d& p) const {
    Eigen::Vector3d h = F * Eigen::Vector3d(p.x(), p.y(), 1.0);
    return {h.x() / h.z(), h.y() / h.z()};
}

ProjectiveTriangleMap projective_interpolation(const Eigen::Matrix<double, 3, 2>& src,
                                               const Eigen::Matrix<double, 3, 2>& dst,
                                               const Eigen::Vector3d& u) {
    Eigen::Matrix3d S, D;
    for (int i = 0; i < 3; ++i) {
        S.col(i) << src(i, 0), src(i, 1), 1.0;
        D.col(i) << dst(i, 0), dst(i, 1), 1.0;
    }
    auto scale2 = [](const Eigen::Matrix<double, 3, 2>& tri) {
        double s = 0;
        for (int i = 0; i < 3; ++i)
            s = std::max(s, (tri.row((i + 1) % 3) - tri.row(i)).squaredNorm());
        return s;
    };
    if (std::abs(S.determinant()) <= 1e-12 * scale2(src) ||
        std::abs(D.determinant()) <= 1e-12 * scale2(dst))
        throw DegenerateFaceError("degenerate triangle in projective_interpolation");

    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3;
        double l = (src.row(j) - src.row(i)).norm();
        double lt = (dst.row(j) - dst.row(i)).norm();
        double expect = std::exp(0.5 * (u[i] + u[j])) * l;
        if (std::abs(lt - expect) > 1e-8 * std::max(lt, expect))
            throw InconsistentUError("side lengths violate the conformal relation");
    }

    ProjectiveTriangleMap map;
    map.F = D * (-u.array()).exp().matrix().asDiagonal() * S.inverse();
    return map;
}

}  // namespace dcp
