#include "dcp/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dcp/energy.hpp"
#include "dcp/errors.hpp"
#include "dcp/hypgeom.hpp"
#include "dcp/layout.hpp"
#include "dcp/mapping.hpp"

namespace dcp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCertTol = 1e-7;  // post-hoc certificate tolerance

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& s) {
    size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ValidationError("trailing characters in '" + s + "'");
    return v;
}

// ---- OBJ -----------------------------------------------------------------

int parse_obj_index(const std::string& token, int count) {
    size_t slash = token.find('/');
    std::string first = slash == std::string::npos ? token : token.substr(0, slash);
    int idx = 0;
    try {
        idx = std::stoi(first);
    } catch (const std::exception&) {
        throw IoError("bad face index '" + token + "'");
    }
    if (idx < 0) idx = count + 1 + idx;  // relative indexing
    if (idx < 1 || idx > count) throw IoError("face index out of range: " + token);
    return idx - 1;
}

// ---- CSV -----------------------------------------------------------------

std::map<std::pair<int, int>, double> read_length_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::map<std::pair<int, int>, double> lengths;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        int i, j;
        double len;
        if (!(row >> i >> j >> len))
            throw IoError(path + ":" + std::to_string(lineno) + ": expected 'i,j,length'");
        if (!(len > 0))
            throw NonPositiveLengthError(path + ":" + std::to_string(lineno) +
                                         ": non-positive length");
        lengths[{std::min(i, j), std::max(i, j)}] = len;
    }
    return lengths;
}

// ---- report helpers ------------------------------------------------------

double corner_angle(Flavor flavor, double opp, double b, double c) {
    double cosv;
    if (flavor == Flavor::Euclidean)
        cosv = (b * b + c * c - opp * opp) / (2.0 * b * c);
    else
        cosv = (std::cosh(b) * std::cosh(c) - std::cosh(opp)) /
               (std::sinh(b) * std::sinh(c));
    return std::acos(std::min(1.0, std::max(-1.0, cosv)));
}

Eigen::VectorXd angle_sums_of(const Triangulation& T, const DiscreteMetric& m) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(T.n_vertices);
    for (int f = 0; f < T.n_faces(); ++f) {
        double a = m.ell[T.face_edges[f][0]];
        double b = m.ell[T.face_edges[f][1]];
        double c = m.ell[T.face_edges[f][2]];
        sums[T.faces[f][0]] += corner_angle(m.flavor, a, b, c);
        sums[T.faces[f][1]] += corner_angle(m.flavor, b, c, a);
        sums[T.faces[f][2]] += corner_angle(m.flavor, c, a, b);
    }
    return sums;
}

double lcr_residual(const Triangulation& T, const DiscreteMetric& a,
                    const DiscreteMetric& b) {
    Eigen::VectorXd la = length_cross_ratios(T, a).log_lcr;
    Eigen::VectorXd lb = length_cross_ratios(T, b).log_lcr;
    return (la - lb).cwiseAbs().maxCoeff();
}

json report_of(const SolveReport& rep) {
    json j;
    j["status"] = rep.status == SolveStatus::Converged          ? "converged"
                  : rep.status == SolveStatus::MaxIterations    ? "max-iterations"
                                                                : "unbounded-suspected";
    j["iterations"] = rep.iterations;
    j["grad_norm"] = rep.grad_norm;
    j["broken_faces"] = rep.broken_faces;
    return j;
}

void write_layout_obj(const std::string& path, const Triangulation& T,
                      const Eigen::MatrixXd& input_positions,
                      const Eigen::MatrixXd& layout_xy) {
    if (path.empty()) return;
    std::vector<std::vector<int>> faces;
    for (const auto& f : T.faces) faces.push_back({f[0], f[1], f[2]});
    Eigen::MatrixXd pos;
    if (input_positions.rows() == T.n_vertices) {
        pos = input_positions;
    } else {
        pos = Eigen::MatrixXd::Zero(T.n_vertices, 3);
        pos.leftCols(2) = layout_xy;
    }
    write_obj(path, faces, pos, layout_xy);
}

// per-vertex boundary conditions from the spec tables; Θ defaults to 2π
// inside and π on the boundary
BoundaryConditions build_bc(const Triangulation& T, const ProblemSpec& spec) {
    BoundaryConditions bc;
    bc.theta.resize(T.n_vertices);
    bc.u_fixed.assign(T.n_vertices, false);
    bc.u_values = Eigen::VectorXd::Zero(T.n_vertices);
    for (int v = 0; v < T.n_vertices; ++v)
        bc.theta[v] = T.vertex_boundary[v] ? kPi : 2 * kPi;
    for (const auto& [v, th] : spec.theta) {
        if (v < 0 || v >= T.n_vertices)
            throw ValidationError("theta for unknown vertex " + std::to_string(v));
        bc.theta[v] = th;
    }
    for (const auto& [v, uv] : spec.u_fixed) {
        if (v < 0 || v >= T.n_vertices)
            throw ValidationError("u for unknown vertex " + std::to_string(v));
        bc.u_fixed[v] = true;
        bc.u_values[v] = uv;
    }
    return bc;
}

struct RunOutcome {
    json report;
    bool certified = true;
    bool converged = true;
};

RunOutcome run_impl(const ProblemSpec& spec) {
    for (const auto& [v, th] : spec.theta)
        if (spec.u_fixed.count(v))
            throw ValidationError("vertex " + std::to_string(v) +
                                  " has both theta and u prescribed");

    RunOutcome out;
    json& rep = out.report;
    auto note_solve = [&](const SolveReport& r) {
        rep["solve"] = report_of(r);
        out.converged = r.status == SolveStatus::Converged;
    };
    auto cert = [&](const char* name, double residual) {
        rep["certificates"][name] = residual;
        if (!(residual <= kCertTol)) out.certified = false;
    };

    if (spec.command == "circular-mesh") {
        MeshData mesh = read_obj(spec.mesh_path);
        CircularMesh P;
        P.polygons = mesh.faces;
        if (spec.metric_source == MetricSource::EdgeLengthTable) {
            P.lengths = read_length_map(spec.length_table_path);
        } else {
            if (mesh.positions.rows() == 0)
                throw ValidationError("circular-mesh needs positions or a length table");
            for (const auto& poly : P.polygons)
                for (size_t s = 0; s < poly.size(); ++s) {
                    int a = poly[s], b = poly[(s + 1) % poly.size()];
                    P.lengths[{std::min(a, b), std::max(a, b)}] =
                        (mesh.positions.row(a) - mesh.positions.row(b)).norm();
                }
        }
        // provisional fan triangulation only to learn the boundary flags
        std::vector<std::array<int, 3>> fan;
        for (const auto& poly : P.polygons)
            for (size_t s = 1; s + 1 < poly.size(); ++s)
                fan.push_back({poly[0], poly[s], poly[s + 1]});
        auto pre = build_triangulation(fan);
        auto bc = build_bc(pre, spec);
        auto res = solve_circular_mesh(P, bc, spec.solver);
        note_solve(res.report);
        // cocircularity across every diagonal: the two angles opposite it
        // must sum to Φ = π
        double phi_res = 0;
        for (int e = 0; e < res.tri.n_edges(); ++e) {
            if (!res.diagonal[e]) continue;
            const auto& ed = res.tri.edges[e];
            double sum = 0;
            for (int side = 0; side < 2; ++side) {
                if (ed.face[side] < 0) continue;
                int f = ed.face[side], s = ed.slot[side];
                sum += corner_angle(Flavor::Euclidean, res.metric.ell[e],
                                    res.metric.ell[res.tri.face_edges[f][(s + 1) % 3]],
                                    res.metric.ell[res.tri.face_edges[f][(s + 2) % 3]]);
            }
            phi_res = std::max(phi_res, std::abs(kPi - sum));
        }
        cert("diagonal_circumcircle_residual", phi_res);
        if (!spec.output_mesh_path.empty())
            write_edge_lengths_csv(spec.output_mesh_path, res.tri, res.metric.ell);
        return out;
    }

    IngestResult in = ingest_metric(spec.mesh_path, spec.metric_source,
                                    spec.length_table_path);
    const Triangulation& T = in.tri;
    rep["mesh"] = {{"vertices", T.n_vertices},
                   {"edges", T.n_edges()},
                   {"faces", T.n_faces()},
                   {"euler_characteristic", T.euler_characteristic()},
                   {"boundary_loops", int(T.boundary_loops().size())},
                   {"broken_faces", in.broken_faces}};

    if (spec.command == "verify") {
        auto bc = build_bc(T, spec);
        auto cr = check_conditions(T, bc.theta);
        rep["conditions"] = {{"condition1", cr.condition1},
                             {"condition1_residual", cr.condition1_residual},
                             {"condition2", cr.condition2},
                             {"condition3", cr.condition3}};
        auto [worst, viol] = product_condition_violation(
            T, length_cross_ratios(T, in.metric));
        rep["product_condition"] = {{"worst_vertex", worst}, {"violation", viol}};
        if (!cr.condition1 || !cr.condition2)
            throw InfeasibleError("prescribed angles are infeasible");
        return out;
    }

    if (spec.command == "flatten" || spec.command == "rectangle") {
        auto bc = build_bc(T, spec);
        if (spec.command == "rectangle") {
            if (spec.corners.size() != 4)
                throw ValidationError("rectangle needs exactly 4 corners");
            std::array<int, 4> c{spec.corners[0], spec.corners[1], spec.corners[2],
                                 spec.corners[3]};
            bc.theta = rectangle_theta(T, c);
        }
        auto [flat, srep] = solve_problem(T, in.metric, bc, spec.solver);
        note_solve(srep);
        PlanarLayout layout = layout_euclidean(T, flat);

        Eigen::VectorXd sums = angle_sums_of(T, flat);
        double ang = 0;
        for (int v = 0; v < T.n_vertices; ++v)
            if (!bc.u_fixed[v]) ang = std::max(ang, std::abs(sums[v] - bc.theta[v]));
        cert("angle_residual", ang);
        double lay = 0;
        for (int f = 0; f < T.n_faces(); ++f)
            for (int s = 0; s < 3; ++s) {
                double d = (layout.corner_pos.row(3 * f + (s + 1) % 3) -
                            layout.corner_pos.row(3 * f + (s + 2) % 3))
                               .norm();
                lay = std::max(lay,
                               std::abs(d - flat.ell[T.face_edges[f][s]]) /
                                   std::max(1.0, flat.ell[T.face_edges[f][s]]));
            }
        cert("layout_residual", lay);
        cert("lcr_residual", lcr_residual(T, in.metric, flat));
        write_layout_obj(spec.output_mesh_path, T, in.positions,
                         layout.vertex_positions(T));
        return out;
    }

    if (spec.command == "disk") {
        int k = spec.apex;
        if (k < 0) k = T.boundary_loops().at(0).at(0);
        auto res = map_to_disk(T, in.metric, k, spec.solver);
        note_solve(res.report);
        double radius = 0;
        for (int v = 0; v < T.n_vertices; ++v)
            if (T.vertex_boundary[v])
                radius = std::max(radius,
                                  std::abs(res.vertex_pos.row(v).norm() - 1.0));
        cert("boundary_circle_residual", radius);
        Eigen::VectorXd sums = angle_sums_of(T, res.metric);
        double ang = 0;
        for (int v = 0; v < T.n_vertices; ++v)
            if (!T.vertex_boundary[v]) ang = std::max(ang, std::abs(sums[v] - 2 * kPi));
        cert("interior_angle_residual", ang);
        cert("lcr_residual", lcr_residual(T, in.metric, res.metric));
        write_layout_obj(spec.output_mesh_path, T, in.positions, res.vertex_pos);
        return out;
    }

    if (spec.command == "sphere") {
        int k = spec.apex < 0 ? 0 : spec.apex;
        auto res = map_to_sphere(T, in.metric, k, spec.solver);
        note_solve(res.report);
        double norm_res = 0;
        for (int v = 0; v < T.n_vertices; ++v)
            norm_res = std::max(norm_res,
                                std::abs(res.positions.row(v).norm() - 1.0));
        cert("unit_norm_residual", norm_res);
        cert("lcr_residual",
             lcr_residual(T, in.metric, metric_from_positions(T, res.positions)));
        if (!spec.output_mesh_path.empty()) {
            std::vector<std::vector<int>> faces;
            for (const auto& f : T.faces) faces.push_back({f[0], f[1], f[2]});
            write_obj(spec.output_mesh_path, faces, res.positions, {});
        }
        return out;
    }

    if (spec.command == "uniformize") {
        auto res = uniformize_hyperbolic(T, in.metric, spec.solver);
        note_solve(res.report);
        Eigen::VectorXd sums = angle_sums_of(T, res.metric);
        cert("angle_residual", (sums.array() - 2 * kPi).abs().maxCoeff());
        double area = kPi * T.n_faces() - sums.sum();
        rep["hyperbolic_area"] = area;
        cert("gauss_bonnet_residual",
             std::abs(area + 2 * kPi * T.euler_characteristic()) /
                 (2 * kPi * std::abs(T.euler_characteristic())));
        // one Poincaré-disk position per vertex (first developed corner copy)
        Eigen::MatrixXd pos = Eigen::MatrixXd::Zero(T.n_vertices, 2);
        std::vector<bool> seen(T.n_vertices, false);
        for (int f = 0; f < T.n_faces(); ++f)
            for (int s = 0; s < 3; ++s) {
                int v = T.faces[f][s];
                if (seen[v]) continue;
                seen[v] = true;
                pos.row(v) = res.layout.corner_pos.row(3 * f + s);
            }
        write_layout_obj(spec.output_mesh_path, T, in.positions, pos);
        return out;
    }

    if (spec.command == "circle-pattern") {
        Eigen::VectorXd phi = default_phi(T);
        for (const auto& [key, value] : spec.phi) {
            int e = T.edge_index(key.first, key.second);
            if (e < 0)
                throw ValidationError("phi for unknown edge (" +
                                      std::to_string(key.first) + ", " +
                                      std::to_string(key.second) + ")");
            phi[e] = value;
        }
        Eigen::VectorXd theta = build_bc(T, spec).theta;
        auto [sol, srep] = solve_circle_pattern(T, phi, theta, spec.solver);
        note_solve(srep);
        // Φ_ij is the sum of the angles opposite the edge in the solved metric
        double phi_res = 0;
        for (int e = 0; e < T.n_edges(); ++e) {
            const auto& ed = T.edges[e];
            double sum = 0;
            for (int side = 0; side < 2; ++side) {
                if (ed.face[side] < 0) continue;
                int f = ed.face[side], s = ed.slot[side];
                sum += corner_angle(Flavor::Euclidean, sol.ell[e],
                                    sol.ell[T.face_edges[f][(s + 1) % 3]],
                                    sol.ell[T.face_edges[f][(s + 2) % 3]]);
            }
            phi_res = std::max(phi_res, std::abs(phi[e] - sum));
        }
        cert("intersection_angle_residual", phi_res);
        if (!spec.output_mesh_path.empty())
            write_edge_lengths_csv(spec.output_mesh_path, T, sol.ell);
        return out;
    }

    if (spec.command == "circle-domain") {
        auto res = map_to_circle_domain(T, in.metric, spec.solver);
        note_solve(res.report);
        auto loops = T.boundary_loops();
        std::sort(loops.begin(), loops.end(),
                  [](const auto& a, const auto& b) { return a.size() > b.size(); });
        double outer = 0;
        for (int v : loops[0])
            outer = std::max(outer, std::abs(res.vertex_pos.row(v).norm() - 1.0));
        cert("outer_circle_residual", outer);
        double hole_res = 0;
        for (size_t h = 1; h < loops.size(); ++h) {
            // circle fit through the first three vertices, worst deviation
            Eigen::Vector2d p0 = res.vertex_pos.row(loops[h][0]);
            Eigen::Vector2d p1 = res.vertex_pos.row(loops[h][1]);
            Eigen::Vector2d p2 = res.vertex_pos.row(loops[h][2]);
            Eigen::Matrix2d A;
            A.row(0) = (p1 - p0).transpose();
            A.row(1) = (p2 - p0).transpose();
            Eigen::Vector2d rhs(0.5 * (p1.squaredNorm() - p0.squaredNorm()),
                                0.5 * (p2.squaredNorm() - p0.squaredNorm()));
            Eigen::Vector2d c = A.colPivHouseholderQr().solve(rhs);
            double r = (p0 - c).norm();
            for (int v : loops[h])
                hole_res = std::max(
                    hole_res,
                    std::abs((res.vertex_pos.row(v).transpose() - c).norm() - r));
        }
        cert("hole_circle_residual", hole_res);
        cert("lcr_residual", lcr_residual(T, in.metric, res.metric));
        write_layout_obj(spec.output_mesh_path, T, in.positions, res.vertex_pos);
        return out;
    }

    if (spec.command == "realize-polyhedron") {
        int k = spec.apex < 0 ? 0 : spec.apex;
        auto poly = realize_ideal_polyhedron(T, in.metric.lambda, k, spec.solver);
        note_solve(poly.report);
        double norm_res = 0, vertex_sum_res = 0;
        json tets = json::array();
        for (const auto& t : poly.tetrahedra) {
            json jt;
            jt["vertices"] = t.vertices;
            jt["lambda"] = t.tet.lambda;
            jt["dihedral"] = t.dihedral;
            json pos = json::array();
            for (int s = 0; s < 4; ++s)
                pos.push_back({t.positions(s, 0), t.positions(s, 1),
                               t.positions(s, 2)});
            jt["positions"] = pos;
            tets.push_back(std::move(jt));
            vertex_sum_res = std::max(
                vertex_sum_res,
                std::abs(t.dihedral[0] + t.dihedral[1] + t.dihedral[2] - kPi));
        }
        rep["tetrahedra"] = std::move(tets);
        for (int v = 0; v < T.n_vertices; ++v)
            norm_res =
                std::max(norm_res, std::abs(poly.positions.row(v).norm() - 1.0));
        cert("unit_norm_residual", norm_res);
        cert("dihedral_sum_residual", vertex_sum_res);
        if (!spec.output_mesh_path.empty()) {
            std::vector<std::vector<int>> faces;
            for (const auto& f : T.faces) faces.push_back({f[0], f[1], f[2]});
            write_obj(spec.output_mesh_path, faces, poly.positions, {});
        }
        return out;
    }

    throw ValidationError("unknown command '" + spec.command + "'");
}

}  // namespace

MeshData read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    MeshData mesh;
    std::vector<Eigen::Vector3d> vs;
    std::vector<Eigen::Vector2d> vts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string tag;
        row >> tag;
        if (tag == "v") {
            double x, y, z = 0;
            if (!(row >> x >> y)) throw IoError(path + ":" + std::to_string(lineno) + ": bad vertex");
            row >> z;
            vs.emplace_back(x, y, z);
        } else if (tag == "vt") {
            double u, v;
            if (!(row >> u >> v)) throw IoError(path + ":" + std::to_string(lineno) + ": bad texcoord");
            vts.emplace_back(u, v);
        } else if (tag == "f") {
            std::vector<int> face;
            std::string tok;
            while (row >> tok) face.push_back(parse_obj_index(tok, int(vs.size())));
            if (face.size() < 3)
                throw IoError(path + ":" + std::to_string(lineno) + ": face with fewer than 3 vertices");
            mesh.faces.push_back(std::move(face));
        }
        // other records (vn, o, g, s, usemtl, ...) are ignored
    }
    mesh.positions.resize(int(vs.size()), 3);
    for (size_t i = 0; i < vs.size(); ++i) mesh.positions.row(int(i)) = vs[i];
    mesh.texcoords.resize(int(vts.size()), 2);
    for (size_t i = 0; i < vts.size(); ++i) mesh.texcoords.row(int(i)) = vts[i];
    return mesh;
}

void write_obj(const std::string& path, const std::vector<std::vector<int>>& faces,
               const Eigen::MatrixXd& positions, const Eigen::MatrixXd& texcoords) {
    std::ofstream outf(path);
    if (!outf) throw IoError("cannot write '" + path + "'");
    for (int v = 0; v < positions.rows(); ++v)
        outf << "v " << fmt17(positions(v, 0)) << ' ' << fmt17(positions(v, 1)) << ' '
             << fmt17(positions.cols() > 2 ? positions(v, 2) : 0.0) << '\n';
    for (int v = 0; v < texcoords.rows(); ++v)
        outf << "vt " << fmt17(texcoords(v, 0)) << ' ' << fmt17(texcoords(v, 1))
             << '\n';
    const bool with_vt = texcoords.rows() == positions.rows();
    for (const auto& f : faces) {
        outf << 'f';
        for (int v : f) {
            outf << ' ' << v + 1;
            if (with_vt) outf << '/' << v + 1;
        }
        outf << '\n';
    }
    if (!outf) throw IoError("write failed for '" + path + "'");
}

std::vector<std::array<int, 3>> triangle_faces(const MeshData& mesh) {
    std::vector<std::array<int, 3>> tris;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        if (mesh.faces[f].size() != 3)
            throw NonTriangleFaceError("face " + std::to_string(f) + " has " +
                                       std::to_string(mesh.faces[f].size()) +
                                       " vertices");
        tris.push_back({mesh.faces[f][0], mesh.faces[f][1], mesh.faces[f][2]});
    }
    return tris;
}

Eigen::VectorXd read_edge_lengths_csv(const std::string& path,
                                      const Triangulation& T) {
    auto lengths = read_length_map(path);
    Eigen::VectorXd ell(T.n_edges());
    for (int e = 0; e < T.n_edges(); ++e) {
        const auto& ed = T.edges[e];
        auto it = lengths.find({ed.v[0], ed.v[1]});
        if (it == lengths.end())
            throw MissingEdgeLengthError("no length for edge (" +
                                         std::to_string(ed.v[0]) + ", " +
                                         std::to_string(ed.v[1]) + ")");
        ell[e] = it->second;
    }
    return ell;
}

void write_edge_lengths_csv(const std::string& path, const Triangulation& T,
                            const Eigen::VectorXd& ell) {
    std::ofstream outf(path);
    if (!outf) throw IoError("cannot write '" + path + "'");
    for (int e = 0; e < T.n_edges(); ++e)
        outf << T.edges[e].v[0] << ',' << T.edges[e].v[1] << ',' << fmt17(ell[e])
             << '\n';
    if (!outf) throw IoError("write failed for '" + path + "'");
}

IngestResult ingest_metric(const std::string& mesh_path, MetricSource source,
                           const std::string& table_path) {
    MeshData mesh = read_obj(mesh_path);
    IngestResult res;
    res.tri = build_triangulation(triangle_faces(mesh));
    res.positions = mesh.positions;
    if (source == MetricSource::EmbeddedPositions) {
        if (mesh.positions.rows() != res.tri.n_vertices)
            throw IoError("OBJ has no usable positions for the embedded metric");
        res.metric = metric_from_positions(res.tri, mesh.positions);
    } else {
        res.metric = DiscreteMetric(Flavor::Euclidean,
                                    read_edge_lengths_csv(table_path, res.tri));
    }
    for (int f = 0; f < res.tri.n_faces(); ++f) {
        double a = res.metric.ell[res.tri.face_edges[f][0]];
        double b = res.metric.ell[res.tri.face_edges[f][1]];
        double c = res.metric.ell[res.tri.face_edges[f][2]];
        if (a >= b + c || b >= c + a || c >= a + b) res.broken_faces.push_back(f);
    }
    return res;
}

double parse_angle(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) throw ValidationError("empty angle");
    size_t pos = s.find("pi");
    if (pos == std::string::npos) return parse_number(s);
    std::string coef = trim(s.substr(0, pos));
    std::string rest = trim(s.substr(pos + 2));
    double c = 1.0;
    if (coef == "-")
        c = -1.0;
    else if (!coef.empty())
        c = parse_number(coef);
    double d = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/') throw ValidationError("bad angle '" + text + "'");
        d = parse_number(trim(rest.substr(1)));
        if (d == 0) throw ValidationError("division by zero in '" + text + "'");
    }
    return c * kPi / d;
}

ProblemSpec read_problem_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }

    static const std::set<std::string> known = {
        "schema_version", "command", "mesh",    "metric_source", "length_table",
        "theta",          "u",       "phi",     "corners",       "apex",
        "solver",         "seed",    "output",  "report"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ValidationError("unknown key '" + it.key() + "' in " + path);

    ProblemSpec spec;
    spec.schema_version = j.value("schema_version", 0);
    if (spec.schema_version != 1)
        throw ValidationError("unsupported schema_version in " + path);
    spec.command = j.value("command", "");
    spec.mesh_path = j.value("mesh", "");
    std::string source = j.value("metric_source", "embedded");
    if (source == "embedded")
        spec.metric_source = MetricSource::EmbeddedPositions;
    else if (source == "table")
        spec.metric_source = MetricSource::EdgeLengthTable;
    else
        throw ValidationError("metric_source must be 'embedded' or 'table'");
    spec.length_table_path = j.value("length_table", "");
    spec.apex = j.value("apex", -1);
    spec.seed = j.value("seed", 0u);
    spec.output_mesh_path = j.value("output", "");
    spec.report_path = j.value("report", "");
    if (j.contains("corners")) spec.corners = j["corners"].get<std::vector<int>>();

    auto angle_of = [](const json& v) {
        return v.is_string() ? parse_angle(v.get<std::string>()) : v.get<double>();
    };
    if (j.contains("theta"))
        for (auto it = j["theta"].begin(); it != j["theta"].end(); ++it)
            spec.theta[std::stoi(it.key())] = angle_of(it.value());
    if (j.contains("u"))
        for (auto it = j["u"].begin(); it != j["u"].end(); ++it)
            spec.u_fixed[std::stoi(it.key())] = it.value().get<double>();
    if (j.contains("phi"))
        for (auto it = j["phi"].begin(); it != j["phi"].end(); ++it) {
            std::string key = it.key();
            size_t comma = key.find(',');
            if (comma == std::string::npos)
                throw ValidationError("phi keys must be 'i,j' pairs");
            int a = std::stoi(key.substr(0, comma));
            int b = std::stoi(key.substr(comma + 1));
            spec.phi[{std::min(a, b), std::max(a, b)}] = angle_of(it.value());
        }

    if (j.contains("solver")) {
        static const std::set<std::string> solver_known = {"tol", "max_iter", "gauge"};
        for (auto it = j["solver"].begin(); it != j["solver"].end(); ++it)
            if (!solver_known.count(it.key()))
                throw ValidationError("unknown solver key '" + it.key() + "'");
        spec.solver.grad_tol = j["solver"].value("tol", spec.solver.grad_tol);
        spec.solver.max_iterations =
            j["solver"].value("max_iter", spec.solver.max_iterations);
        std::string gauge = j["solver"].value("gauge", "default");
        if (gauge == "fix-one")
            spec.solver.gauge = SolverConfig::Gauge::FixOneVertex;
        else if (gauge == "project")
            spec.solver.gauge = SolverConfig::Gauge::ProjectOutConstants;
        else if (gauge != "default" && gauge != "none")
            throw ValidationError("gauge must be fix-one, project, or default");
    }
    return spec;
}

RunArtifacts run(const ProblemSpec& spec) {
    RunArtifacts art;
    json rep;
    rep["schema_version"] = 1;
    rep["command"] = spec.command;
    rep["seed"] = spec.seed;
    try {
        RunOutcome outcome = run_impl(spec);
        rep.update(outcome.report);
        if (!outcome.converged || !outcome.certified) {
            art.exit_code = 2;
            rep["error"] = {{"type", "NotCertified"},
                            {"message", outcome.converged
                                            ? "certificates exceed tolerance"
                                            : "solver did not converge"}};
        }
    } catch (const InfeasibleError& e) {
        art.exit_code = 2;
        rep["error"] = {{"type", "Infeasible"}, {"message", e.what()}};
    } catch (const BrokenAtOptimumError& e) {
        art.exit_code = 2;
        rep["error"] = {{"type", "BrokenAtOptimum"}, {"message", e.what()}};
    } catch (const Error& e) {
        art.exit_code = 1;
        rep["error"] = {{"type", "Validation"}, {"message", e.what()}};
    } catch (const std::exception& e) {
        art.exit_code = 1;
        rep["error"] = {{"type", "Internal"}, {"message", e.what()}};
    }
    art.report = rep.dump(2);
    if (!spec.report_path.empty()) {
        std::ofstream outf(spec.report_path);
        outf << art.report << '\n';
    }
    return art;
}

}  // namespace dcp
