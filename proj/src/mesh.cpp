#include "dcp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "dcp/errors.hpp"

namespace dcp {

namespace {

int local_slot(const std::array<int, 3>& f, int v) {
    for (int s = 0; s < 3; ++s)
        if (f[s] == v) return s;
    return -1;
}

}  // namespace

int Triangulation::edge_index(int i, int j) const {
    auto it = edge_lookup_.find({std::min(i, j), std::max(i, j)});
    return it == edge_lookup_.end() ? -1 : it->second;
}

bool Triangulation::is_closed() const {
    for (int e = 0; e < n_edges(); ++e)
        if (edge_is_boundary(e)) return false;
    return true;
}

int Triangulation::n_boundary_vertices() const {
    int n = 0;
    for (bool b : vertex_boundary) n += b ? 1 : 0;
    return n;
}

std::vector<int> Triangulation::ordered_neighbors(int v) const {
    // walk corners: in face (v, a, b) the link edge runs a -> b; the next
    // corner counterclockwise shares neighbor b
    std::map<int, std::pair<int, int>> succ;  // a -> (b, face)
    for (auto [f, s] : vertex_corners[v]) {
        int a = faces[f][(s + 1) % 3];
        int b = faces[f][(s + 2) % 3];
        succ[a] = {b, f};
    }
    if (succ.empty()) return {};
    int start = succ.begin()->first;
    if (vertex_boundary[v]) {
        // find the neighbor with no predecessor
        std::set<int> has_pred;
        for (auto& [a, bf] : succ) has_pred.insert(bf.first);
        for (auto& [a, bf] : succ)
            if (!has_pred.count(a)) start = a;
    }
    std::vector<int> out{start};
    int cur = start;
    while (true) {
        auto it = succ.find(cur);
        if (it == succ.end()) break;
        cur = it->second.first;
        if (cur == start) break;
        out.push_back(cur);
    }
    return out;
}

std::vector<std::vector<int>> Triangulation::boundary_loops() const {
    // boundary half-edge of face (..i,j..) with no partner runs j -> i in
    // the induced boundary orientation
    std::map<int, int> next;
    for (const auto& e : edges) {
        if (e.face[0] >= 0 && e.face[1] >= 0) continue;
        if (e.face[0] >= 0)
            next[e.v[1]] = e.v[0];
        else
            next[e.v[0]] = e.v[1];
    }
    std::vector<std::vector<int>> loops;
    std::set<int> seen;
    for (auto& [start, _] : next) {
        if (seen.count(start)) continue;
        std::vector<int> loop;
        int cur = start;
        do {
            loop.push_back(cur);
            seen.insert(cur);
            cur = next.at(cur);
        } while (cur != start);
        loops.push_back(std::move(loop));
    }
    return loops;
}

Triangulation build_triangulation(const std::vector<std::array<int, 3>>& faces,
                                  int n_vertices) {
    Triangulation T;
    T.faces = faces;
    int maxv = -1;
    for (const auto& f : faces) {
        if (f[0] == f[1] || f[1] == f[2] || f[2] == f[0])
            throw NonSimplicialError("face with repeated vertex");
        for (int v : f) {
            if (v < 0) throw ValidationError("negative vertex id");
            maxv = std::max(maxv, v);
        }
    }
    T.n_vertices = std::max(n_vertices, maxv + 1);

    // collect directed edge appearances
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> appearances;
    for (int f = 0; f < int(faces.size()); ++f) {
        for (int s = 0; s < 3; ++s) {
            int i = faces[f][(s + 1) % 3];
            int j = faces[f][(s + 2) % 3];
            appearances[{std::min(i, j), std::max(i, j)}].push_back({f, s});
        }
    }
    T.face_edges.assign(faces.size(), {-1, -1, -1});

    // no two faces share more than one edge (checked before orientation so
    // that a doubled face reports as non-simplicial)
    std::map<std::pair<int, int>, int> pair_count;
    for (auto& [key, apps] : appearances) {
        if (apps.size() == 2) {
            auto fp = std::minmax(apps[0].first, apps[1].first);
            if (++pair_count[{fp.first, fp.second}] > 1)
                throw NonSimplicialError("two faces share more than one edge");
        }
    }

    for (auto& [key, apps] : appearances) {
        if (apps.size() > 2)
            throw NonManifoldError("edge with more than two incident faces");
        Triangulation::Edge e;
        e.v = {key.first, key.second};
        e.face = {-1, -1};
        e.opp = {-1, -1};
        e.slot = {-1, -1};
        for (auto [f, s] : apps) {
            int i = faces[f][(s + 1) % 3];
            int side = (i == key.first) ? 0 : 1;
            if (e.face[side] >= 0)
                throw NonOrientableError("edge traversed twice in the same direction");
            e.face[side] = f;
            e.opp[side] = faces[f][s];
            e.slot[side] = s;
        }
        int idx = int(T.edges.size());
        T.edges.push_back(e);
        T.edge_lookup_[key] = idx;
        for (auto [f, s] : apps) T.face_edges[f][s] = idx;
    }

    // vertex corners and boundary flags
    T.vertex_corners.assign(T.n_vertices, {});
    for (int f = 0; f < int(faces.size()); ++f)
        for (int s = 0; s < 3; ++s) T.vertex_corners[faces[f][s]].push_back({f, s});
    T.vertex_boundary.assign(T.n_vertices, false);
    std::vector<int> bdry_edge_count(T.n_vertices, 0);
    for (const auto& e : T.edges) {
        if (e.face[0] < 0 || e.face[1] < 0) {
            T.vertex_boundary[e.v[0]] = true;
            T.vertex_boundary[e.v[1]] = true;
            ++bdry_edge_count[e.v[0]];
            ++bdry_edge_count[e.v[1]];
        }
    }

    // manifold vertex links: corners around each vertex form one connected
    // fan (boundary) or cycle (interior)
    for (int v = 0; v < T.n_vertices; ++v) {
        const auto& corners = T.vertex_corners[v];
        if (corners.empty()) continue;
        if (T.vertex_boundary[v] && bdry_edge_count[v] != 2)
            throw NonManifoldError("vertex with more than one boundary gap");
        std::map<int, int> cid;  // face -> index in corners
        for (int c = 0; c < int(corners.size()); ++c) cid[corners[c].first] = c;
        std::vector<int> comp(corners.size(), -1);
        std::queue<int> q;
        q.push(0);
        comp[0] = 0;
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            auto [f, s] = corners[c];
            // cross the two edges at v: those not opposite slot s
            for (int t = 0; t < 3; ++t) {
                if (t == s) continue;
                const auto& e = T.edges[T.face_edges[f][t]];
                int other = (e.face[0] == f) ? e.face[1] : e.face[0];
                if (other < 0) continue;
                int oc = cid.count(other) ? cid[other] : -1;
                if (oc >= 0 && comp[oc] < 0) {
                    comp[oc] = 0;
                    q.push(oc);
                }
            }
        }
        for (int c : comp)
            if (c < 0) throw NonManifoldError("disconnected vertex link");
    }
    return T;
}

DiscreteMetric::DiscreteMetric(Flavor fl, Eigen::VectorXd lengths)
    : flavor(fl), ell(std::move(lengths)) {
    lambda.resize(ell.size());
    for (int e = 0; e < ell.size(); ++e) {
        if (!(ell[e] > 0.0))
            throw NonPositiveLengthError("edge length must be positive");
        lambda[e] = (flavor == Flavor::Euclidean)
                        ? 2.0 * std::log(ell[e])
                        : 2.0 * std::log(std::sinh(0.5 * ell[e]));
    }
}

DiscreteMetric DiscreteMetric::from_lambda(Flavor fl, const Eigen::VectorXd& lam) {
    Eigen::VectorXd ell(lam.size());
    for (int e = 0; e < lam.size(); ++e) {
        double h = std::exp(0.5 * lam[e]);
        ell[e] = (fl == Flavor::Euclidean) ? h : 2.0 * std::asinh(h);
    }
    DiscreteMetric m(fl, ell);
    m.lambda = lam;  // avoid round-trip noise
    return m;
}

namespace {

// logarithmic secant lengths: log ℓ euclidean, log(2 sinh(ℓ/2)) hyperbolic
Eigen::VectorXd log_secant(const DiscreteMetric& m) {
    Eigen::VectorXd s(m.ell.size());
    for (int e = 0; e < m.ell.size(); ++e)
        s[e] = (m.flavor == Flavor::Euclidean)
                   ? std::log(m.ell[e])
                   : std::log(2.0 * std::sinh(0.5 * m.ell[e]));
    return s;
}

}  // namespace

ConformalClass length_cross_ratios(const Triangulation& T, const DiscreteMetric& m) {
    const Eigen::VectorXd ls = log_secant(m);
    ConformalClass cc;
    cc.log_lcr = Eigen::VectorXd::Zero(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        if (ed.face[0] < 0 || ed.face[1] < 0) continue;
        int i = ed.v[0], j = ed.v[1], k = ed.opp[0], l = ed.opp[1];
        cc.log_lcr[e] = ls[T.edge_index(i, l)] + ls[T.edge_index(j, k)] -
                        ls[T.edge_index(l, j)] - ls[T.edge_index(k, i)];
    }
    return cc;
}

std::pair<int, double> product_condition_violation(const Triangulation& T,
                                                   const ConformalClass& cc) {
    std::vector<double> sum(T.n_vertices, 0.0);
    for (int e = 0; e < T.n_edges(); ++e) {
        if (T.edge_is_boundary(e)) continue;
        sum[T.edges[e].v[0]] += cc.log_lcr[e];
        sum[T.edges[e].v[1]] += cc.log_lcr[e];
    }
    int worst = -1;
    double worst_val = 0.0;
    for (int v = 0; v < T.n_vertices; ++v) {
        if (T.vertex_boundary[v] || T.vertex_corners[v].empty()) continue;
        if (std::abs(sum[v]) > worst_val) {
            worst_val = std::abs(sum[v]);
            worst = v;
        }
    }
    return {worst, worst_val};
}

EquivalenceResult verify_conformal_equivalence(const Triangulation& T,
                                               const DiscreteMetric& m1,
                                               const DiscreteMetric& m2,
                                               double tol) {
    if (m1.flavor != m2.flavor)
        throw FlavorMismatchError("metrics have different flavors");
    EquivalenceResult r;
    const ConformalClass c1 = length_cross_ratios(T, m1);
    const ConformalClass c2 = length_cross_ratios(T, m2);
    for (int e = 0; e < T.n_edges(); ++e)
        if (std::abs(c1.log_lcr[e] - c2.log_lcr[e]) > tol) return r;

    // per-triangle recovery: u_i + u_j = λ2 − λ1 on each edge
    const Eigen::VectorXd d = m2.lambda - m1.lambda;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(T.n_vertices);
    std::vector<bool> have(T.n_vertices, false);
    for (int f = 0; f < T.n_faces(); ++f) {
        for (int s = 0; s < 3; ++s) {
            int i = T.faces[f][s];
            double dij = d[T.face_edges[f][(s + 2) % 3]];  // edge i,next
            double djk = d[T.face_edges[f][s]];            // opposite edge
            double dki = d[T.face_edges[f][(s + 1) % 3]];
            double ui = 0.5 * (dij - djk + dki);
            if (have[i]) {
                if (std::abs(ui - u[i]) > std::max(tol, 1e-8)) return r;
            } else {
                u[i] = ui;
                have[i] = true;
            }
        }
    }
    r.equivalent = true;
    r.u = u;
    return r;
}

DiscreteMetric metric_from_lcr(const Triangulation& T, const ConformalClass& cc,
                               double tol) {
    auto [worst, viol] = product_condition_violation(T, cc);
    if (viol > tol) {
        std::ostringstream os;
        os << "product condition violated at vertex " << worst << " by " << viol;
        throw ProductConditionViolatedError(os.str());
    }
    // log c per corner, one seed per vertex, propagated around the star:
    // crossing edge ij from the corner behind it multiplies c by lcr_ij
    std::vector<std::array<double, 3>> logc(T.n_faces(), {0.0, 0.0, 0.0});
    for (int v = 0; v < T.n_vertices; ++v) {
        const auto& corners = T.vertex_corners[v];
        if (corners.empty()) continue;
        std::map<int, int> cid;
        for (int c = 0; c < int(corners.size()); ++c) cid[corners[c].first] = c;
        std::vector<bool> set(corners.size(), false);
        std::queue<int> q;
        q.push(0);
        set[0] = true;
        logc[corners[0].first][corners[0].second] = 0.0;
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            auto [f, s] = corners[c];
            double cur = logc[f][s];
            for (int t = 0; t < 3; ++t) {
                if (t == s) continue;
                int ei = T.face_edges[f][t];
                const auto& e = T.edges[ei];
                int other = (e.face[0] == f) ? e.face[1] : e.face[0];
                if (other < 0) continue;
                int oc = cid.at(other);
                if (set[oc]) continue;
                // crossing edge vq: c^v_{q·} = lcr · c^v_{·q}, and the larger
                // corner sits in the face holding the directed edge (v,q)
                double z = cc.log_lcr[ei];
                int plus_face = e.face[v == e.v[0] ? 0 : 1];
                double nxt = (other == plus_face) ? cur + z : cur - z;
                auto [of, os_] = corners[oc];
                logc[of][os_] = nxt;
                set[oc] = true;
                q.push(oc);
            }
        }
    }
    // ℓ_ij = (c^i_{jk} c^j_{ki})^{-1/2} from either incident face
    Eigen::VectorXd lam(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        int side = ed.face[0] >= 0 ? 0 : 1;
        int f = ed.face[side];
        int si = local_slot(T.faces[f], side == 0 ? ed.v[0] : ed.v[1]);
        int sj = local_slot(T.faces[f], side == 0 ? ed.v[1] : ed.v[0]);
        lam[e] = -(logc[f][si] + logc[f][sj]);
    }
    return DiscreteMetric::from_lambda(Flavor::Euclidean, lam);
}

Eigen::MatrixXd MoebiusTransform::apply(const Eigen::MatrixXd& pts) const {
    Eigen::MatrixXd p = pts;
    for (const auto& st : steps) {
        if (st.kind == MoebiusStep::Inversion) {
            for (int r = 0; r < p.rows(); ++r) {
                double n2 = p.row(r).squaredNorm();
                if (n2 < 1e-28)
                    throw VertexAtCenterError("vertex at inversion center");
                p.row(r) /= n2;
            }
        } else {
            if (st.rotation.size() > 0) p = p * st.rotation.transpose();
            p *= st.scale;
            if (st.translation.size() > 0) p.rowwise() += st.translation.transpose();
        }
    }
    return p;
}

DiscreteMetric metric_from_positions(const Triangulation& T,
                                     const Eigen::MatrixXd& positions) {
    Eigen::VectorXd ell(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        ell[e] = (positions.row(ed.v[0]) - positions.row(ed.v[1])).norm();
        if (!(ell[e] > 0.0)) throw DegenerateFaceError("coincident vertex positions");
    }
    return DiscreteMetric(Flavor::Euclidean, ell);
}

DiscreteMetric mobius_image_metric(const Triangulation& T,
                                   const Eigen::MatrixXd& positions,
                                   const MoebiusTransform& transform) {
    Eigen::MatrixXd p = transform.apply(positions);
    DiscreteMetric m = metric_from_positions(T, p);
    for (int f = 0; f < T.n_faces(); ++f) {
        double a = m.ell[T.face_edges[f][0]];
        double b = m.ell[T.face_edges[f][1]];
        double c = m.ell[T.face_edges[f][2]];
        double mx = std::max({a, b, c});
        if (mx >= a + b + c - mx)
            throw DegenerateFaceError("transformed face is collinear");
    }
    return m;
}

Triangulation submesh(const Triangulation& T, const std::vector<int>& keep_faces,
                      std::vector<int>& vertex_map) {
    vertex_map.assign(T.n_vertices, -1);
    int nv = 0;
    std::vector<std::array<int, 3>> faces;
    faces.reserve(keep_faces.size());
    for (int f : keep_faces) {
        std::array<int, 3> nf;
        for (int s = 0; s < 3; ++s) {
            int v = T.faces[f][s];
            if (vertex_map[v] < 0) vertex_map[v] = nv++;
            nf[s] = vertex_map[v];
        }
        faces.push_back(nf);
    }
    return build_triangulation(faces, nv);
}

}  // namespace dcp
