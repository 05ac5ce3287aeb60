#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "dcp/mesh.hpp"
#include "dcp/solver.hpp"

namespace dcp {

/// Raw OBJ contents: polygonal faces, optional positions and texture
/// coordinates (row per vertex; zero rows when the file has none).
struct MeshData {
    std::vector<std::vector<int>> faces;
    Eigen::MatrixXd positions;  // V×3
    Eigen::MatrixXd texcoords;  // V×2
};

/// Read an OBJ file (v / vt / f records). Throws IoError on unreadable or
/// malformed input.
MeshData read_obj(const std::string& path);

/// Write an OBJ file with 17-significant-digit coordinates; texcoords may be
/// empty. Planar layouts travel as vt records next to the original positions.
void write_obj(const std::string& path, const std::vector<std::vector<int>>& faces,
               const Eigen::MatrixXd& positions, const Eigen::MatrixXd& texcoords);

/// Triangle faces of a MeshData; throws NonTriangleFaceError.
std::vector<std::array<int, 3>> triangle_faces(const MeshData& mesh);

/// Read a CSV edge-length table with rows `i,j,length`. Every edge of T must
/// appear; throws MissingEdgeLengthError naming the first absent edge and
/// NonPositiveLengthError on bad values.
Eigen::VectorXd read_edge_lengths_csv(const std::string& path,
                                      const Triangulation& T);

/// Write the edge-length table of T with 17 significant digits.
void write_edge_lengths_csv(const std::string& path, const Triangulation& T,
                            const Eigen::VectorXd& ell);

enum class MetricSource { EmbeddedPositions, EdgeLengthTable };

struct IngestResult {
    Triangulation tri;
    DiscreteMetric metric;
    Eigen::MatrixXd positions;      // from the OBJ (may have zero rows)
    std::vector<int> broken_faces;  // triangle-inequality violations (table mode)
};

/// Load a triangulated mesh plus its metric: embedded mode measures edge
/// lengths from the OBJ positions, table mode reads them from a CSV. Broken
/// faces are flagged, not rejected — the energy extends past the
/// triangle-inequality region.
IngestResult ingest_metric(const std::string& mesh_path, MetricSource source,
                           const std::string& table_path = "");

/// Parse an angle in radians; π-literals are accepted: "pi", "2pi", "pi/2",
/// "3pi/4", "0.5pi", plain decimals. Throws ValidationError.
double parse_angle(const std::string& text);

/// Declarative description of one solve, readable from JSON.
struct ProblemSpec {
    int schema_version = 1;
    std::string command;  // flatten | rectangle | disk | sphere | uniformize |
                          // circle-pattern | circular-mesh | circle-domain |
                          // realize-polyhedron | verify
    std::string mesh_path;
    MetricSource metric_source = MetricSource::EmbeddedPositions;
    std::string length_table_path;

    std::map<int, double> theta;               // vertex → Θ
    std::map<int, double> u_fixed;             // vertex → u
    std::map<std::pair<int, int>, double> phi; // edge → Φ
    std::vector<int> corners;                  // rectangle corners
    int apex = -1;

    SolverConfig solver;
    unsigned seed = 0;
    std::string output_mesh_path;
    std::string report_path;
};

/// Read a ProblemSpec from versioned JSON; unknown keys are rejected.
/// Throws IoError / ValidationError.
ProblemSpec read_problem_spec(const std::string& path);

struct RunArtifacts {
    int exit_code = 0;      // 0 converged+certified, 2 infeasible/broken, 1 invalid
    std::string report;     // JSON text (also written to spec.report_path)
};

/// Execute a ProblemSpec end to end: ingest, solve, write artifacts, and
/// produce a certificate report with post-hoc residuals. Never throws; all
/// failures are encoded in the exit code and a machine-readable error JSON.
RunArtifacts run(const ProblemSpec& spec);

}  // namespace dcp
