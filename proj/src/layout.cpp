#include "dcp/layout.hpp"

#include <cmath>
#include <complex>
#include <queue>

#include "dcp/errors.hpp"
#include "dcp/kernel.hpp"

namespace dcp {

namespace {

int slot_of(const std::array<int, 3>& f, int v) {
    for (int s = 0; s < 3; ++s)
        if (f[s] == v) return s;
    return -1;
}

// angle at each local vertex of face f
std::array<double, 3> face_angles(const Triangulation& T, const DiscreteMetric& m,
                                  int f, bool hyperbolic) {
    double a = m.ell[T.face_edges[f][0]];
    double b = m.ell[T.face_edges[f][1]];
    double c = m.ell[T.face_edges[f][2]];
    TriangleAngles ang = hyperbolic ? hyperbolic_angles(a, b, c)
                                    : euclidean_angles(a, b, c);
    if (ang.broken) throw BrokenTriangleError("face violates the triangle inequality");
    return ang.alpha;
}

using cplx = std::complex<double>;

}  // namespace

Eigen::MatrixXd PlanarLayout::vertex_positions(const Triangulation& T) const {
    Eigen::MatrixXd p(T.n_vertices, 2);
    std::vector<bool> seen(T.n_vertices, false);
    for (int f = 0; f < T.n_faces(); ++f)
        for (int s = 0; s < 3; ++s) {
            int v = T.faces[f][s];
            if (!seen[v]) {
                p.row(v) = corner_pos.row(3 * f + s);
                seen[v] = true;
            }
        }
    return p;
}

PlanarLayout layout_euclidean(const Triangulation& T, const DiscreteMetric& metric,
                              int root_face) {
    PlanarLayout L;
    L.corner_pos.setZero(3 * T.n_faces(), 2);
    std::vector<bool> placed(T.n_faces(), false);

    auto ell = [&](int i, int j) { return metric.ell[T.edge_index(i, j)]; };

    {
        int f = root_face;
        auto ang = face_angles(T, metric, f, false);
        const auto& fv = T.faces[f];
        Eigen::Vector2d p0(0, 0);
        Eigen::Vector2d p1(ell(fv[0], fv[1]), 0);
        double r = ell(fv[0], fv[2]);
        Eigen::Vector2d p2(r * std::cos(ang[0]), r * std::sin(ang[0]));
        L.corner_pos.row(3 * f + 0) = p0;
        L.corner_pos.row(3 * f + 1) = p1;
        L.corner_pos.row(3 * f + 2) = p2;
        placed[f] = true;
        L.face_order.push_back(f);
    }

    std::queue<int> q;
    q.push(root_face);
    while (!q.empty()) {
        int g = q.front();
        q.pop();
        for (int s = 0; s < 3; ++s) {
            const auto& e = T.edges[T.face_edges[g][s]];
            int f = (e.face[0] == g) ? e.face[1] : e.face[0];
            if (f < 0 || placed[f]) continue;
            int side = (e.face[0] == f) ? 0 : 1;
            int x = e.v[side == 0 ? 0 : 1];
            int y = e.v[side == 0 ? 1 : 0];  // directed edge (x,y) lies in f
            Eigen::Vector2d px = L.corner_pos.row(3 * g + slot_of(T.faces[g], x));
            Eigen::Vector2d py = L.corner_pos.row(3 * g + slot_of(T.faces[g], y));
            auto ang = face_angles(T, metric, f, false);
            int sx = slot_of(T.faces[f], x);
            int sy = slot_of(T.faces[f], y);
            int sz = 3 - sx - sy;
            double ratio = ell(x, T.faces[f][sz]) / ell(x, y);
            double ca = std::cos(ang[sx]), sa = std::sin(ang[sx]);
            Eigen::Vector2d d = py - px;
            Eigen::Vector2d pz = px + ratio * Eigen::Vector2d(ca * d.x() - sa * d.y(),
                                                              sa * d.x() + ca * d.y());
            L.corner_pos.row(3 * f + sx) = px;
            L.corner_pos.row(3 * f + sy) = py;
            L.corner_pos.row(3 * f + sz) = pz;
            placed[f] = true;
            L.face_order.push_back(f);
            q.push(f);
        }
    }
    return L;
}

HyperbolicLayout layout_hyperbolic(const Triangulation& T,
                                   const DiscreteMetric& metric, int root_face,
                                   double drift_tol) {
    HyperbolicLayout L;
    L.corner_pos.setZero(3 * T.n_faces(), 2);
    std::vector<bool> placed(T.n_faces(), false);

    auto ell = [&](int i, int j) { return metric.ell[T.edge_index(i, j)]; };
    auto store = [&](int f, int s, cplx z) {
        L.corner_pos(3 * f + s, 0) = z.real();
        L.corner_pos(3 * f + s, 1) = z.imag();
    };
    auto load = [&](int f, int s) {
        return cplx(L.corner_pos(3 * f + s, 0), L.corner_pos(3 * f + s, 1));
    };
    // translate a to 0 and back
    auto to_origin = [](cplx z, cplx a) { return (z - a) / (1.0 - std::conj(a) * z); };
    auto from_origin = [](cplx z, cplx a) { return (z + a) / (1.0 + std::conj(a) * z); };

    {
        int f = root_face;
        auto ang = face_angles(T, metric, f, true);
        const auto& fv = T.faces[f];
        store(f, 0, 0.0);
        store(f, 1, std::tanh(0.5 * ell(fv[0], fv[1])));
        double r = std::tanh(0.5 * ell(fv[0], fv[2]));
        store(f, 2, r * std::exp(cplx(0, ang[0])));
        placed[f] = true;
        L.face_order.push_back(f);
    }

    std::queue<int> q;
    q.push(root_face);
    while (!q.empty()) {
        int g = q.front();
        q.pop();
        for (int s = 0; s < 3; ++s) {
            const auto& e = T.edges[T.face_edges[g][s]];
            int f = (e.face[0] == g) ? e.face[1] : e.face[0];
            if (f < 0 || placed[f]) continue;
            int side = (e.face[0] == f) ? 0 : 1;
            int x = e.v[side == 0 ? 0 : 1];
            int y = e.v[side == 0 ? 1 : 0];
            cplx a = load(g, slot_of(T.faces[g], x));
            cplx b = load(g, slot_of(T.faces[g], y));
            auto ang = face_angles(T, metric, f, true);
            int sx = slot_of(T.faces[f], x);
            int sy = slot_of(T.faces[f], y);
            int sz = 3 - sx - sy;
            cplx w = to_origin(b, a);
            double phi = std::arg(w);
            double r = std::tanh(0.5 * ell(x, T.faces[f][sz]));
            cplx wz = r * std::exp(cplx(0, phi + ang[sx]));
            store(f, sx, a);
            store(f, sy, b);
            store(f, sz, from_origin(wz, a));
            placed[f] = true;
            L.face_order.push_back(f);
            q.push(f);
        }
    }

    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        if (ed.face[0] < 0 || ed.face[1] < 0) continue;
        double drift = 0;
        for (int end = 0; end < 2; ++end) {
            int v = ed.v[end];
            cplx z0 = load(ed.face[0], slot_of(T.faces[ed.face[0]], v));
            cplx z1 = load(ed.face[1], slot_of(T.faces[ed.face[1]], v));
            drift = std::max(drift, std::abs(z0 - z1));
        }
        if (drift > drift_tol) L.cut_edges.push_back(e);
    }
    return L;
}

}  // namespace dcp
