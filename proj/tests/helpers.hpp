#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "dcp/mesh.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;

// ---- adaptive Simpson quadrature -----------------------------------------

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-14) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adapt(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 48);
}

// ---- independent quadrature oracle for the Lobachevsky function ----------
// For a in [0, pi/2]:
//   ∫₀^a log(2 sin t) dt = a·log(2a) − a + ∫₀^a log(sin t / t) dt,
// the remaining integrand being smooth. Extend by Л(π−x) = −Л(x),
// oddness, and π-periodicity.
inline double lobachevsky_quadrature(double x) {
    double r = x - kPi * std::floor(x / kPi);
    bool flip = false;
    if (r > 0.5 * kPi) {
        r = kPi - r;
        flip = true;
    }
    double val = 0.0;
    if (r > 0.0) {
        auto f = [](double t) {
            return t == 0.0 ? 0.0 : std::log(std::sin(t) / t);
        };
        val = -(r * std::log(2.0 * r) - r + integrate(f, 0.0, r));
    }
    return flip ? -val : val;
}

// ---- meshes --------------------------------------------------------------

// grid disk on (nx+1)×(ny+1) vertices, cells split by the same diagonal
inline std::vector<std::array<int, 3>> grid_faces(int nx, int ny) {
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> faces;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            faces.push_back({a, b, c});
            faces.push_back({a, c, d});
        }
    return faces;
}

inline Eigen::MatrixXd grid_positions(int nx, int ny) {
    Eigen::MatrixXd p((nx + 1) * (ny + 1), 2);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            p(j * (nx + 1) + i, 0) = i;
            p(j * (nx + 1) + i, 1) = j;
        }
    return p;
}

inline std::vector<std::array<int, 3>> octahedron_faces() {
    // vertices: 0..3 equatorial, 4 north, 5 south
    return {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4},
            {1, 0, 5}, {2, 1, 5}, {3, 2, 5}, {0, 3, 5}};
}

inline std::vector<std::array<int, 3>> tetrahedron_faces() {
    return {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
}

// vertex-minimal closed orientable genus-2 surface: 10 vertices, 36 edges,
// 24 faces, χ = −2 (found by bistellar reduction of a torus connected sum)
inline std::vector<std::array<int, 3>> genus2_faces() {
    return {{7, 0, 2}, {5, 1, 4}, {6, 2, 4}, {7, 2, 3}, {4, 2, 8}, {0, 8, 2},
            {5, 4, 0}, {6, 5, 2}, {0, 4, 3}, {3, 2, 1}, {5, 6, 1}, {8, 0, 6},
            {5, 9, 2}, {2, 9, 1}, {8, 6, 9}, {3, 9, 7}, {0, 3, 6}, {1, 6, 3},
            {7, 9, 0}, {5, 0, 9}, {9, 3, 8}, {4, 8, 3}, {1, 9, 4}, {6, 4, 9}};
}

// square n×n torus (closed, χ = 0)
inline std::vector<std::array<int, 3>> torus_faces(int n = 3) {
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int a = i * n + j, b = ((i + 1) % n) * n + j;
            int c = ((i + 1) % n) * n + (j + 1) % n, d = i * n + (j + 1) % n;
            faces.push_back({a, b, c});
            faces.push_back({a, c, d});
        }
    return faces;
}

// hexagonal patch of the unit triangular lattice, radius R in axial
// coordinates; ear-free disk with 6R² faces
struct HexDisk {
    std::vector<std::array<int, 3>> faces;
    Eigen::MatrixXd pos;
    std::map<std::pair<int, int>, int> id;  // axial (q,r) → vertex
};

inline HexDisk hex_disk(int R) {
    HexDisk H;
    std::vector<std::pair<int, int>> coords;
    for (int q = -R; q <= R; ++q)
        for (int r = -R; r <= R; ++r)
            if (std::abs(q + r) <= R) {
                H.id[{q, r}] = int(coords.size());
                coords.emplace_back(q, r);
            }
    H.pos.resize(int(coords.size()), 2);
    for (size_t i = 0; i < coords.size(); ++i) {
        H.pos(int(i), 0) = coords[i].first + 0.5 * coords[i].second;
        H.pos(int(i), 1) = coords[i].second * std::sqrt(3.0) / 2.0;
    }
    auto has = [&](int q, int r) { return H.id.count({q, r}) > 0; };
    for (int q = -R - 1; q <= R; ++q)
        for (int r = -R - 1; r <= R; ++r) {
            if (has(q, r) && has(q + 1, r) && has(q, r + 1))
                H.faces.push_back({H.id[{q, r}], H.id[{q + 1, r}], H.id[{q, r + 1}]});
            if (has(q + 1, r) && has(q + 1, r + 1) && has(q, r + 1))
                H.faces.push_back(
                    {H.id[{q + 1, r}], H.id[{q + 1, r + 1}], H.id[{q, r + 1}]});
        }
    return H;
}

// equilateral triangular-lattice positions for grid_faces(nx, ny)
inline Eigen::MatrixXd equilateral_positions(int nx, int ny) {
    Eigen::MatrixXd p((nx + 1) * (ny + 1), 2);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            p(j * (nx + 1) + i, 0) = i - 0.5 * j;
            p(j * (nx + 1) + i, 1) = j * std::sqrt(3.0) / 2.0;
        }
    return p;
}

// ---- geometric oracles ---------------------------------------------------

// per-vertex angle sums of a metric, computed independently from the law of
// cosines on the stored edge lengths
inline Eigen::VectorXd vertex_angle_sums(const dcp::Triangulation& T,
                                         const dcp::DiscreteMetric& m) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(T.n_vertices);
    for (int f = 0; f < T.n_faces(); ++f) {
        double a = m.ell[T.face_edges[f][0]];  // opposite slot 0
        double b = m.ell[T.face_edges[f][1]];
        double c = m.ell[T.face_edges[f][2]];
        auto ang = [](double opp, double s1, double s2) {
            double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
            return std::acos(std::min(1.0, std::max(-1.0, cosv)));
        };
        sums[T.faces[f][0]] += ang(a, b, c);
        sums[T.faces[f][1]] += ang(b, c, a);
        sums[T.faces[f][2]] += ang(c, a, b);
    }
    return sums;
}

// circumcircle through three points
inline void circumcircle(const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                         const Eigen::Vector2d& r, Eigen::Vector2d& center,
                         double& radius) {
    Eigen::Matrix2d A;
    A.row(0) = (q - p).transpose();
    A.row(1) = (r - p).transpose();
    Eigen::Vector2d rhs(0.5 * (q.squaredNorm() - p.squaredNorm()),
                        0.5 * (r.squaredNorm() - p.squaredNorm()));
    center = A.colPivHouseholderQr().solve(rhs);
    radius = (p - center).norm();
}

// worst distance-to-circle residual of a point set, circle fit through the
// first three points
inline double cocircularity_residual(const std::vector<Eigen::Vector2d>& pts) {
    Eigen::Vector2d c;
    double r;
    circumcircle(pts[0], pts[1], pts[2], c, r);
    double worst = 0;
    for (const auto& p : pts) worst = std::max(worst, std::abs((p - c).norm() - r));
    return worst;
}

// hyperbolic distance between two points of the Poincaré disk
inline double poincare_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    std::complex<double> za(a.x(), a.y()), zb(b.x(), b.y());
    double m = std::abs((za - zb) / (1.0 - std::conj(za) * zb));
    return 2.0 * std::atanh(m);
}

// ---- randomness ----------------------------------------------------------

inline Eigen::VectorXd random_vector(std::mt19937& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

// central finite-difference gradient of a scalar function
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (int i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        double fp = f(xp);
        xp[i] = x[i] - h;
        double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// central finite-difference Jacobian of a vector function (rows: outputs)
inline Eigen::MatrixXd fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd xp = x;
    xp[0] = x[0] + h;
    Eigen::VectorXd probe = f(x);
    Eigen::MatrixXd J(probe.size(), x.size());
    for (int i = 0; i < x.size(); ++i) {
        xp = x;
        xp[i] = x[i] + h;
        Eigen::VectorXd fp = f(xp);
        xp[i] = x[i] - h;
        Eigen::VectorXd fm = f(xp);
        J.col(i) = (fp - fm) / (2.0 * h);
    }
    return J;
}

}  // namespace testutil
