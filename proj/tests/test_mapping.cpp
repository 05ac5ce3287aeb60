#include "dcp/mapping.hpp"

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "dcp/energy.hpp"
#include "dcp/errors.hpp"
#include "helpers.hpp"

using namespace dcp;
using testutil::kPi;

namespace {

// independent corner angle from the law of cosines, at local slot s of face f
double corner_angle(const Triangulation& T, const Eigen::VectorXd& ell, int f, int s) {
    double opp = ell[T.face_edges[f][s]];
    double b = ell[T.face_edges[f][(s + 1) % 3]];
    double c = ell[T.face_edges[f][(s + 2) % 3]];
    double cv = (b * b + c * c - opp * opp) / (2.0 * b * c);
    return std::acos(std::min(1.0, std::max(-1.0, cv)));
}

// circumcircle intersection angles of a metric, per the per-edge definition
Eigen::VectorXd intersection_angles(const Triangulation& T, const DiscreteMetric& m) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e)
        for (int side = 0; side < 2; ++side) {
            const auto& ed = T.edges[e];
            if (ed.face[side] >= 0)
                phi[e] += corner_angle(T, m.ell, ed.face[side], ed.slot[side]);
        }
    return phi;
}

Eigen::MatrixXd jittered_grid(std::mt19937& rng, int nx, int ny, double amp) {
    Eigen::MatrixXd pos = testutil::grid_positions(nx, ny);
    std::uniform_real_distribution<double> d(-amp, amp);
    for (int j = 1; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            pos(j * (nx + 1) + i, 0) += d(rng);
            pos(j * (nx + 1) + i, 1) += d(rng);
        }
    return pos;
}

double max_layout_length_error(const Triangulation& T, const PlanarLayout& L,
                               const Eigen::VectorXd& ell) {
    double worst = 0;
    for (int f = 0; f < T.n_faces(); ++f)
        for (int s = 0; s < 3; ++s) {
            int e = T.face_edges[f][s];
            double got = (L.corner_pos.row(3 * f + (s + 1) % 3) -
                          L.corner_pos.row(3 * f + (s + 2) % 3))
                             .norm();
            worst = std::max(worst, std::abs(got - ell[e]) / ell[e]);
        }
    return worst;
}

}  // namespace

TEST_CASE("flatten keeps an already-flat disk") {
    auto T = build_triangulation(testutil::grid_faces(4, 3));
    DiscreteMetric m = metric_from_positions(T, testutil::grid_positions(4, 3));
    Eigen::VectorXd theta = testutil::vertex_angle_sums(T, m);

    auto res = flatten(T, m, theta);
    CHECK(res.report.status == SolveStatus::Converged);
    CHECK((res.metric.ell - m.ell).cwiseAbs().maxCoeff() < 1e-9);
    // scale factors constant (gauge pins the first vertex at 0)
    CHECK(res.report.x.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(max_layout_length_error(T, res.layout, res.metric.ell) < 1e-10);
}

TEST_CASE("flatten to a rectangle: certificates") {
    std::mt19937 rng(71);
    const int nx = 11, ny = 11;  // 242 faces
    auto T = build_triangulation(testutil::grid_faces(nx, ny));
    DiscreteMetric m = metric_from_positions(T, jittered_grid(rng, nx, ny, 0.25));

    std::array<int, 4> corners = {0, nx, (ny + 1) * (nx + 1) - 1, ny * (nx + 1)};
    Eigen::VectorXd theta = rectangle_theta(T, corners);
    auto res = flatten(T, m, theta);
    CHECK(res.report.status == SolveStatus::Converged);

    // prescribed-angle certificate, via an independent law-of-cosines oracle
    Eigen::VectorXd sums = testutil::vertex_angle_sums(T, res.metric);
    for (int v = 0; v < T.n_vertices; ++v)
        CHECK(std::abs(sums[v] - (T.vertex_boundary[v] ? theta[v] : 2 * kPi)) < 1e-8);

    // layout isometry and conformality certificates
    CHECK(max_layout_length_error(T, res.layout, res.metric.ell) < 1e-8);
    CHECK(verify_conformal_equivalence(T, m, res.metric, 1e-8).equivalent);

    // second variational principle: S is stationary along edge cycles at the
    // solution (angles of the solved metric, parameter λ of the input)
    Eigen::VectorXd alpha(3 * T.n_faces());
    for (int f = 0; f < T.n_faces(); ++f)
        for (int s = 0; s < 3; ++s)
            alpha[3 * f + s] = corner_angle(T, res.metric.ell, f, s);
    CHECK(s_cycle_derivatives(T, m.lambda, alpha).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("flatten rejects a total-angle violation") {
    auto T = build_triangulation(testutil::grid_faces(3, 3));
    DiscreteMetric m = metric_from_positions(T, testutil::grid_positions(3, 3));
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(T.n_vertices, kPi);  // no corners
    CHECK_THROWS_AS(flatten(T, m, theta), InfeasibleError);
}

TEST_CASE("map_to_sphere: octahedron") {
    auto T = build_triangulation(testutil::octahedron_faces());
    DiscreteMetric m(Flavor::Euclidean, Eigen::VectorXd::Ones(T.n_edges()));
    auto cc = length_cross_ratios(T, m);

    for (int apex : {0, 4}) {
        auto sp = map_to_sphere(T, m, apex);
        CHECK(sp.report.status == SolveStatus::Converged);
        for (int v = 0; v < T.n_vertices; ++v)
            CHECK(std::abs(sp.positions.row(v).norm() - 1.0) < 1e-10);
        DiscreteMetric chordal = metric_from_positions(T, sp.positions);
        CHECK((length_cross_ratios(T, chordal).log_lcr - cc.log_lcr)
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
    }
}

TEST_CASE("map_to_sphere: regular tetrahedron is symmetric") {
    auto T = build_triangulation(testutil::tetrahedron_faces());
    DiscreteMetric m(Flavor::Euclidean, Eigen::VectorXd::Ones(T.n_edges()));
    auto sp = map_to_sphere(T, m, 3);
    std::vector<double> dists;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            dists.push_back((sp.positions.row(i) - sp.positions.row(j)).norm());
    for (double d : dists) CHECK(d == doctest::Approx(dists[0]).epsilon(1e-8));
}

TEST_CASE("map_to_sphere rejects non-spheres") {
    auto disk = build_triangulation(testutil::grid_faces(2, 2));
    DiscreteMetric md = metric_from_positions(disk, testutil::grid_positions(2, 2));
    CHECK_THROWS_AS(map_to_sphere(disk, md, 0), ValidationError);

    auto torus = build_triangulation(testutil::torus_faces(3));
    DiscreteMetric mt(Flavor::Euclidean, Eigen::VectorXd::Ones(torus.n_edges()));
    CHECK_THROWS_AS(map_to_sphere(torus, mt, 0), ValidationError);
}

TEST_CASE("map_to_disk: coarse disk becomes inscribed in the unit circle") {
    auto H = testutil::hex_disk(2);
    auto T = build_triangulation(H.faces);
    DiscreteMetric m = metric_from_positions(T, H.pos);
    int k = H.id[{2, 0}];
    REQUIRE(T.vertex_boundary[k]);

    auto res = map_to_disk(T, m, k);
    CHECK(res.report.status == SolveStatus::Converged);
    for (int v = 0; v < T.n_vertices; ++v)
        if (T.vertex_boundary[v])
            CHECK(std::abs(res.vertex_pos.row(v).norm() - 1.0) < 1e-8);

    Eigen::VectorXd sums = testutil::vertex_angle_sums(T, res.metric);
    for (int v = 0; v < T.n_vertices; ++v)
        if (!T.vertex_boundary[v]) CHECK(std::abs(sums[v] - 2 * kPi) < 1e-8);

    CHECK(verify_conformal_equivalence(T, m, res.metric, 1e-8).equivalent);
}

TEST_CASE("map_to_disk rejects ears") {
    auto T = build_triangulation({{0, 1, 2}, {0, 2, 3}});
    Eigen::VectorXd ell(5);
    ell << 1, 1, std::sqrt(2.0), 1, 1;
    DiscreteMetric m = metric_from_positions(
        T, (Eigen::MatrixXd(4, 2) << 0, 0, 1, 0, 1, 1, 0, 1).finished());
    CHECK_THROWS_AS(map_to_disk(T, m, 0), EarDetectedError);
}

TEST_CASE("map_to_disk: symmetric pentagon fan stays symmetric") {
    // center 5, boundary pentagon 0..4; reflection fixes 0 and 5,
    // swaps 1↔4 and 2↔3
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < 5; ++i) faces.push_back({5, i, (i + 1) % 5});
    auto T = build_triangulation(faces);
    Eigen::MatrixXd pos(6, 2);
    for (int i = 0; i < 5; ++i) {
        double a = kPi / 2 + 2 * kPi * i / 5;
        pos.row(i) << std::cos(a), std::sin(a);
    }
    pos.row(5) << 0, 0;
    DiscreteMetric m = metric_from_positions(T, pos);

    auto res = map_to_disk(T, m, 0);
    CHECK(res.report.status == SolveStatus::Converged);
    std::array<int, 6> sigma = {0, 4, 3, 2, 1, 5};
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        int e2 = T.edge_index(sigma[ed.v[0]], sigma[ed.v[1]]);
        CHECK(res.metric.ell[e] == doctest::Approx(res.metric.ell[e2]).epsilon(1e-8));
    }
}

TEST_CASE("solve_circle_pattern: round trip from known patterns") {
    std::mt19937 rng(73);
    auto T = build_triangulation(testutil::grid_faces(3, 2));

    Eigen::MatrixXd equil = testutil::equilateral_positions(3, 2);
    // small jitter keeps every intersection angle inside (0, π]
    Eigen::MatrixXd jitter = equil;
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    for (int v = 0; v < jitter.rows(); ++v) {
        jitter(v, 0) += d(rng);
        jitter(v, 1) += d(rng);
    }
    for (const auto& pos : {equil, jitter}) {
        DiscreteMetric m = metric_from_positions(T, pos);
        Eigen::VectorXd phi = intersection_angles(T, m);
        Eigen::VectorXd theta = testutil::vertex_angle_sums(T, m);

        auto [sol, rep] = solve_circle_pattern(T, phi, theta);
        CHECK(rep.status == SolveStatus::Converged);
        CHECK((intersection_angles(T, sol) - phi).cwiseAbs().maxCoeff() < 1e-8);
        // angles per corner match the source pattern
        for (int f = 0; f < T.n_faces(); ++f)
            for (int s = 0; s < 3; ++s)
                CHECK(std::abs(corner_angle(T, sol.ell, f, s) -
                               corner_angle(T, m.ell, f, s)) < 1e-8);
    }
}

TEST_CASE("solve_circle_pattern input validation") {
    auto T = build_triangulation(testutil::grid_faces(2, 2));
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(T.n_vertices);
    Eigen::VectorXd bad = Eigen::VectorXd::Constant(T.n_edges(), -0.5);
    CHECK_THROWS_AS(solve_circle_pattern(T, bad, theta), AngleOutOfRangeError);
    Eigen::VectorXd wrong_sum = Eigen::VectorXd::Constant(T.n_edges(), 0.6 * kPi);
    CHECK_THROWS_AS(solve_circle_pattern(T, wrong_sum, theta), InfeasibleError);
}

TEST_CASE("solve_circular_mesh: unit square gets a cocircular diagonal") {
    CircularMesh P;
    P.polygons = {{0, 1, 2, 3}};
    for (auto [a, b] : {std::pair{0, 1}, {1, 2}, {2, 3}, {0, 3}}) P.lengths[{a, b}] = 1.0;
    BoundaryConditions bc;
    bc.theta = Eigen::VectorXd::Constant(4, kPi / 2);

    auto res = solve_circular_mesh(P, bc);
    CHECK(res.report.status == SolveStatus::Converged);
    int diag = res.tri.edge_index(0, 2);
    CHECK(res.diagonal[diag]);
    double side = res.metric.ell[res.tri.edge_index(0, 1)];
    CHECK(res.metric.ell[diag] == doctest::Approx(std::sqrt(2.0) * side).epsilon(1e-8));
}

TEST_CASE("solve_circular_mesh: 2×2 square grid, cocircular polygons") {
    CircularMesh P;
    auto id = [](int i, int j) { return j * 3 + i; };
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            P.polygons.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    for (const auto& poly : P.polygons)
        for (int s = 0; s < 4; ++s) {
            int a = poly[s], b = poly[(s + 1) % 4];
            P.lengths[{std::min(a, b), std::max(a, b)}] = 1.0;
        }
    BoundaryConditions bc;
    bc.theta.resize(9);
    Eigen::MatrixXd pos = testutil::grid_positions(2, 2);
    auto Tref = build_triangulation(testutil::grid_faces(2, 2));
    bc.theta = testutil::vertex_angle_sums(Tref, metric_from_positions(Tref, pos));

    auto res = solve_circular_mesh(P, bc);
    CHECK(res.report.status == SolveStatus::Converged);

    auto L = layout_euclidean(res.tri, res.metric);
    Eigen::MatrixXd X = L.vertex_positions(res.tri);
    for (const auto& poly : P.polygons) {
        std::vector<Eigen::Vector2d> pts;
        for (int v : poly) pts.push_back(X.row(v).transpose());
        CHECK(testutil::cocircularity_residual(pts) < 1e-8);
    }
    // lengths transform by the conformal rule against the flat reference
    DiscreteMetric ref = metric_from_positions(res.tri, pos);
    CHECK(verify_conformal_equivalence(res.tri, ref, res.metric, 1e-8).equivalent);
}

TEST_CASE("solve_circular_mesh: already-triangular input matches solve_problem") {
    CircularMesh P;
    P.polygons = {{0, 1, 2}, {0, 2, 3}};
    P.lengths[{0, 1}] = P.lengths[{1, 2}] = P.lengths[{2, 3}] = P.lengths[{0, 3}] = 1.0;
    P.lengths[{0, 2}] = std::sqrt(2.0);
    auto T = build_triangulation({{0, 1, 2}, {0, 2, 3}});
    Eigen::VectorXd ell(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e)
        ell[e] = P.lengths[{T.edges[e].v[0], T.edges[e].v[1]}];
    DiscreteMetric m(Flavor::Euclidean, ell);

    BoundaryConditions bc;
    bc.theta = testutil::vertex_angle_sums(T, m);
    bc.theta[2] += 0.2;  // ask for a genuinely different shape
    bc.theta[0] -= 0.2;

    auto res = solve_circular_mesh(P, bc);
    auto [direct, rep] = solve_problem(T, m, bc);
    CHECK(rep.status == SolveStatus::Converged);
    CHECK((res.metric.ell - direct.ell).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solve_circular_mesh rejects polygonal-inequality violations") {
    CircularMesh P;
    P.polygons = {{0, 1, 2, 3}};
    P.lengths[{0, 1}] = 10.0;
    P.lengths[{1, 2}] = P.lengths[{2, 3}] = P.lengths[{0, 3}] = 1.0;
    BoundaryConditions bc;
    bc.theta = Eigen::VectorXd::Constant(4, kPi / 2);
    CHECK_THROWS_AS(solve_circular_mesh(P, bc), PolygonalInequalityError);
}

namespace {

// hex disk with the two faces on either side of one lattice edge removed,
// leaving a quadrilateral hole
std::pair<Triangulation, Eigen::MatrixXd> holed_hex(
    int R, const std::vector<std::array<int, 2>>& hole_cells, testutil::HexDisk& H) {
    H = testutil::hex_disk(R);
    std::set<int> drop;
    for (auto [q, r] : hole_cells) {
        std::set<int> up = {H.id[{q, r}], H.id[{q + 1, r}], H.id[{q, r + 1}]};
        std::set<int> dn = {H.id[{q + 1, r}], H.id[{q + 1, r + 1}], H.id[{q, r + 1}]};
        for (int f = 0; f < int(H.faces.size()); ++f) {
            std::set<int> fs(H.faces[f].begin(), H.faces[f].end());
            if (fs == up || fs == dn) drop.insert(f);
        }
    }
    std::vector<std::array<int, 3>> faces;
    for (int f = 0; f < int(H.faces.size()); ++f)
        if (!drop.count(f)) faces.push_back(H.faces[f]);
    return {build_triangulation(faces), H.pos};
}

}  // namespace

TEST_CASE("map_to_circle_domain: annulus") {
    testutil::HexDisk H;
    auto [T, pos] = holed_hex(2, {{{-1, 0}}}, H);
    REQUIRE(T.boundary_loops().size() == 2);
    DiscreteMetric m = metric_from_positions(T, pos);

    auto res = map_to_circle_domain(T, m);
    CHECK(res.report.status == SolveStatus::Converged);
    REQUIRE(res.hole_loops.size() == 1);

    auto loops = T.boundary_loops();
    std::sort(loops.begin(), loops.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (int v : loops[0]) CHECK(std::abs(res.vertex_pos.row(v).norm() - 1.0) < 1e-7);

    std::vector<Eigen::Vector2d> hole;
    for (int v : loops[1]) hole.push_back(res.vertex_pos.row(v).transpose());
    CHECK(testutil::cocircularity_residual(hole) < 1e-7);

    // the hole circle nests strictly inside the unit circle
    Eigen::Vector2d c;
    double r;
    testutil::circumcircle(hole[0], hole[1], hole[2], c, r);
    CHECK(c.norm() + r < 1.0);

    CHECK(verify_conformal_equivalence(T, m, res.metric, 1e-7).equivalent);
}

TEST_CASE("map_to_circle_domain: two holes") {
    testutil::HexDisk H;
    auto [T, pos] = holed_hex(3, {{{1, -1}, {-2, 1}}}, H);
    REQUIRE(T.boundary_loops().size() == 3);
    DiscreteMetric m = metric_from_positions(T, pos);

    auto res = map_to_circle_domain(T, m);
    CHECK(res.report.status == SolveStatus::Converged);
    auto loops = T.boundary_loops();
    std::sort(loops.begin(), loops.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (int v : loops[0]) CHECK(std::abs(res.vertex_pos.row(v).norm() - 1.0) < 1e-7);
    for (int h = 1; h < 3; ++h) {
        std::vector<Eigen::Vector2d> hole;
        for (int v : loops[h]) hole.push_back(res.vertex_pos.row(v).transpose());
        CHECK(testutil::cocircularity_residual(hole) < 1e-7);
    }
}

TEST_CASE("map_to_circle_domain: no holes agrees with the disk pipeline") {
    auto H = testutil::hex_disk(2);
    auto T = build_triangulation(H.faces);
    DiscreteMetric m = metric_from_positions(T, H.pos);

    auto dom = map_to_circle_domain(T, m);
    auto disk = map_to_disk(T, m, T.boundary_loops()[0][0]);
    for (int v = 0; v < T.n_vertices; ++v)
        if (T.vertex_boundary[v]) {
            CHECK(std::abs(dom.vertex_pos.row(v).norm() - 1.0) < 1e-8);
            CHECK(std::abs(disk.vertex_pos.row(v).norm() - 1.0) < 1e-8);
        }
    CHECK(verify_conformal_equivalence(T, dom.metric, disk.metric, 1e-7).equivalent);
}

TEST_CASE("uniformize_hyperbolic: genus-2 surface") {
    auto T = build_triangulation(testutil::genus2_faces());
    REQUIRE(T.euler_characteristic() == -2);
    DiscreteMetric m(Flavor::Euclidean, Eigen::VectorXd::Ones(T.n_edges()));

    auto res = uniformize_hyperbolic(T, m);
    CHECK(res.report.status == SolveStatus::Converged);
    CHECK(res.metric.flavor == Flavor::Hyperbolic);

    // independent hyperbolic law-of-cosines oracle for angle sums and area
    auto hyp_angle = [&](int f, int s) {
        double a = res.metric.ell[T.face_edges[f][s]];
        double b = res.metric.ell[T.face_edges[f][(s + 1) % 3]];
        double c = res.metric.ell[T.face_edges[f][(s + 2) % 3]];
        double cv = (std::cosh(b) * std::cosh(c) - std::cosh(a)) /
                    (std::sinh(b) * std::sinh(c));
        return std::acos(std::min(1.0, std::max(-1.0, cv)));
    };
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(T.n_vertices);
    double area = 0;
    for (int f = 0; f < T.n_faces(); ++f) {
        double excess = kPi;
        for (int s = 0; s < 3; ++s) {
            double ang = hyp_angle(f, s);
            sums[T.faces[f][s]] += ang;
            excess -= ang;
        }
        area += excess;
    }
    CHECK((sums.array() - 2 * kPi).abs().maxCoeff() < 1e-8);
    CHECK(std::abs(area - 4 * kPi) < 1e-6);

    // mixed conformal relation sinh(ℓ̃/2) = e^{(u_i+u_j)/2} ℓ
    const Eigen::VectorXd& u = res.report.x;
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        double expect = std::exp(0.5 * (u[ed.v[0]] + u[ed.v[1]])) * m.ell[e];
        CHECK(std::sinh(0.5 * res.metric.ell[e]) ==
              doctest::Approx(expect).epsilon(1e-10));
    }

    // layout realizes the metric: per-face hyperbolic side lengths
    for (int f = 0; f < T.n_faces(); ++f)
        for (int s = 0; s < 3; ++s) {
            double got = testutil::poincare_distance(
                res.layout.corner_pos.row(3 * f + (s + 1) % 3).transpose(),
                res.layout.corner_pos.row(3 * f + (s + 2) % 3).transpose());
            CHECK(got == doctest::Approx(res.metric.ell[T.face_edges[f][s]])
                             .epsilon(1e-8));
        }

    // strict convexity: two random starts land on the same scale factors
    std::mt19937 rng(79);
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(T.n_vertices, 2 * kPi);
    EnergyCallback cb = [&](const Eigen::VectorXd& x) {
        return energy_hyperbolic(T, m.lambda, theta, x);
    };
    std::vector<bool> mask(T.n_vertices, true);
    auto r1 = minimize(cb, testutil::random_vector(rng, T.n_vertices, -0.3, 0.3), mask);
    auto r2 = minimize(cb, testutil::random_vector(rng, T.n_vertices, -0.3, 0.3), mask);
    CHECK(r1.status == SolveStatus::Converged);
    CHECK(r2.status == SolveStatus::Converged);
    CHECK((r1.x - r2.x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("uniformize_hyperbolic rejects non-hyperbolic topology") {
    auto torus = build_triangulation(testutil::torus_faces(3));
    DiscreteMetric mt(Flavor::Euclidean, Eigen::VectorXd::Ones(torus.n_edges()));
    CHECK_THROWS_AS(uniformize_hyperbolic(torus, mt), ValidationError);

    auto sphere = build_triangulation(testutil::octahedron_faces());
    DiscreteMetric ms(Flavor::Euclidean, Eigen::VectorXd::Ones(sphere.n_edges()));
    CHECK_THROWS_AS(uniformize_hyperbolic(sphere, ms), ValidationError);
}

TEST_CASE("projective_interpolation: identity and similarity") {
    Eigen::Matrix<double, 3, 2> tri;
    tri << 0, 0, 2, 0, 0.7, 1.4;
    auto id = projective_interpolation(tri, tri, Eigen::Vector3d::Zero());
    for (int i = 0; i < 3; ++i)
        CHECK((id.apply(tri.row(i).transpose()) - tri.row(i).transpose()).norm() <
              1e-12);
    CHECK((id.apply({0.5, 0.3}) - Eigen::Vector2d(0.5, 0.3)).norm() < 1e-12);

    double s = 2.5;
    Eigen::Matrix<double, 3, 2> scaled = s * tri;
    Eigen::Vector3d u = Eigen::Vector3d::Constant(std::log(s));  // e^{(u+u)/2} = s
    auto sim = projective_interpolation(tri, scaled, u);
    CHECK((sim.apply({0.5, 0.3}) - Eigen::Vector2d(s * 0.5, s * 0.3)).norm() < 1e-10);
}

TEST_CASE("projective_interpolation maps circumcircle to circumcircle") {
    std::mt19937 rng(83);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::Matrix<double, 3, 2> src;
        Eigen::Vector3d u;
        double l01 = 0, l02 = 0, l12 = 0;
        bool ok = false;
        // resample until both the source triangle and its conformal rescale
        // are comfortably non-degenerate
        do {
            Eigen::VectorXd r = testutil::random_vector(rng, 6, -1.0, 1.0);
            src << r[0], r[1], r[2], r[3], r[4], r[5];
            Eigen::Vector2d e1 = src.row(1) - src.row(0);
            Eigen::Vector2d e2 = src.row(2) - src.row(0);
            double twice_area = e1.x() * e2.y() - e1.y() * e2.x();
            u = testutil::random_vector(rng, 3, -0.4, 0.4);
            auto len = [&](int i, int j) {
                return std::exp(0.5 * (u[i] + u[j])) * (src.row(j) - src.row(i)).norm();
            };
            l01 = len(0, 1);
            l02 = len(0, 2);
            l12 = len(1, 2);
            double slack = std::min({l01 + l02 - l12, l02 + l12 - l01,
                                     l12 + l01 - l02});
            ok = std::abs(twice_area) > 0.3 &&
                 slack > 0.1 * std::max({l01, l02, l12});
        } while (!ok);
        double x = (l01 * l01 + l02 * l02 - l12 * l12) / (2 * l01);
        Eigen::Matrix<double, 3, 2> dst;
        dst << 0, 0, l01, 0, x, std::sqrt(std::max(0.0, l02 * l02 - x * x));

        auto map = projective_interpolation(src, dst, u);
        Eigen::Vector2d c0, c1;
        double r0, r1;
        testutil::circumcircle(src.row(0), src.row(1), src.row(2), c0, r0);
        testutil::circumcircle(dst.row(0), dst.row(1), dst.row(2), c1, r1);
        for (int t = 0; t < 64; ++t) {
            double a = 2 * kPi * t / 64;
            Eigen::Vector2d p = c0 + r0 * Eigen::Vector2d(std::cos(a), std::sin(a));
            Eigen::Vector2d q = map.apply(p);
            CHECK(std::abs((q - c1).norm() - r1) < 1e-8 * std::max(1.0, r1));
        }
    }
}

TEST_CASE("projective_interpolation: continuity across shared edges") {
    std::mt19937 rng(89);
    const int nx = 3, ny = 3;
    auto T = build_triangulation(testutil::grid_faces(nx, ny));
    Eigen::MatrixXd src_pos = jittered_grid(rng, nx, ny, 0.2);
    DiscreteMetric m = metric_from_positions(T, src_pos);

    std::array<int, 4> corners = {0, nx, (ny + 1) * (nx + 1) - 1, ny * (nx + 1)};
    auto res = flatten(T, m, rectangle_theta(T, corners));
    Eigen::MatrixXd dst_pos = res.layout.vertex_positions(T);
    const Eigen::VectorXd& u = res.report.x;

    auto face_map = [&](int f) {
        Eigen::Matrix<double, 3, 2> s, d;
        Eigen::Vector3d uu;
        for (int i = 0; i < 3; ++i) {
            s.row(i) = src_pos.row(T.faces[f][i]);
            d.row(i) = dst_pos.row(T.faces[f][i]);
            uu[i] = u[T.faces[f][i]];
        }
        return projective_interpolation(s, d, uu);
    };
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        if (T.edge_is_boundary(e)) continue;
        auto m0 = face_map(ed.face[0]);
        auto m1 = face_map(ed.face[1]);
        for (double t : {0.2, 0.5, 0.8}) {
            Eigen::Vector2d p = (1 - t) * src_pos.row(ed.v[0]).transpose() +
                                t * src_pos.row(ed.v[1]).transpose();
            CHECK((m0.apply(p) - m1.apply(p)).norm() < 1e-9);
        }
    }
}

TEST_CASE("projective_interpolation input validation") {
    Eigen::Matrix<double, 3, 2> tri, degen;
    tri << 0, 0, 1, 0, 0, 1;
    degen << 0, 0, 1, 0, 2, 0;
    CHECK_THROWS_AS(projective_interpolation(tri, degen, Eigen::Vector3d::Zero()),
                    DegenerateFaceError);
    Eigen::Matrix<double, 3, 2> other = 2.0 * tri;
    CHECK_THROWS_AS(projective_interpolation(tri, other, Eigen::Vector3d::Zero()),
                    InconsistentUError);
}
