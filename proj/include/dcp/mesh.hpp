#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <vector>

namespace dcp {

/// Simplicial oriented triangulated surface, possibly with boundary.
/// Faces are ordered vertex triples; the common orientation of the faces
/// orients the surface. Construction validates that the complex is a
/// simplicial oriented manifold.
class Triangulation {
  public:
    struct Edge {
        std::array<int, 2> v;     // endpoint ids, v[0] < v[1]
        std::array<int, 2> face;  // face[0] holds directed (v0,v1), face[1] (v1,v0); -1 if absent
        std::array<int, 2> opp;   // opposite vertex in face[s]
        std::array<int, 2> slot;  // local slot of opp[s] in face[s]
    };

    Triangulation() = default;

    int n_vertices = 0;
    std::vector<std::array<int, 3>> faces;
    std::vector<Edge> edges;
    /// face_edges[f][s] = edge opposite local slot s of face f
    std::vector<std::array<int, 3>> face_edges;
    std::vector<bool> vertex_boundary;
    std::vector<std::vector<std::pair<int, int>>> vertex_corners;  // (face, slot)

    int n_faces() const { return int(faces.size()); }
    int n_edges() const { return int(edges.size()); }
    bool edge_is_boundary(int e) const { return edges[e].face[1] < 0 || edges[e].face[0] < 0; }
    int edge_index(int i, int j) const;
    int euler_characteristic() const { return n_vertices - n_edges() + n_faces(); }
    bool is_closed() const;
    int n_boundary_vertices() const;

    /// Link of v in cyclic order; for boundary vertices the walk starts and
    /// ends at the two boundary edges.
    std::vector<int> ordered_neighbors(int v) const;

    /// Boundary loops as cyclic vertex sequences, oriented with the surface.
    std::vector<std::vector<int>> boundary_loops() const;

  private:
    std::map<std::pair<int, int>, int> edge_lookup_;
    friend Triangulation build_triangulation(const std::vector<std::array<int, 3>>&, int);
};

/// Build and validate a triangulation. Throws NonSimplicialError,
/// NonManifoldError, or NonOrientableError. Vertex count is inferred from
/// the face list unless a larger n_vertices is given.
Triangulation build_triangulation(const std::vector<std::array<int, 3>>& faces,
                                  int n_vertices = -1);

enum class Flavor { Euclidean, Hyperbolic };

/// Positive edge lengths with their cached logarithmic lengths:
/// λ = 2 log ℓ (euclidean) or λ = 2 log sinh(ℓ/2) (hyperbolic).
struct DiscreteMetric {
    Flavor flavor = Flavor::Euclidean;
    Eigen::VectorXd ell;
    Eigen::VectorXd lambda;

    DiscreteMetric() = default;
    DiscreteMetric(Flavor fl, Eigen::VectorXd lengths);

    /// Metric with the same flavor recovered from logarithmic lengths.
    static DiscreteMetric from_lambda(Flavor fl, const Eigen::VectorXd& lambda);
};

/// Length-cross-ratios in log form, indexed by edge; boundary entries are 0.
struct ConformalClass {
    Eigen::VectorXd log_lcr;
};

/// lcr_ij = (ℓ_il ℓ_jk)/(ℓ_lj ℓ_ki) per interior edge, with k opposite the
/// directed edge (i,j) and l opposite (j,i). Hyperbolic metrics use the
/// secant lengths 2 sinh(ℓ/2).
ConformalClass length_cross_ratios(const Triangulation& T, const DiscreteMetric& m);

/// Worst interior-vertex violation of the product condition
/// Σ log lcr = 0; returns (vertex, |Σ log lcr|).
std::pair<int, double> product_condition_violation(const Triangulation& T,
                                                   const ConformalClass& cc);

struct EquivalenceResult {
    bool equivalent = false;
    Eigen::VectorXd u;  // valid when equivalent
};

/// True iff m1 and m2 induce equal length-cross-ratios within tol; recovers
/// the per-vertex scale factors u when they do. Throws FlavorMismatchError.
EquivalenceResult verify_conformal_equivalence(const Triangulation& T,
                                               const DiscreteMetric& m1,
                                               const DiscreteMetric& m2,
                                               double tol = 1e-8);

/// Reconstruct a euclidean metric inducing the given conformal class.
/// Throws ProductConditionViolatedError when Eq-(6)-type closure fails.
DiscreteMetric metric_from_lcr(const Triangulation& T, const ConformalClass& cc,
                               double tol = 1e-10);

/// Möbius transformation of ℝⁿ as a composition of similarities and
/// unit-sphere inversions, applied in order.
struct MoebiusStep {
    enum Kind { Similarity, Inversion } kind = Similarity;
    double scale = 1.0;
    Eigen::MatrixXd rotation;      // orthogonal; empty means identity
    Eigen::VectorXd translation;   // empty means zero
};

struct MoebiusTransform {
    std::vector<MoebiusStep> steps;
    /// Positions are rows of pts.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& pts) const;
};

/// Chordal-distance metric of transformed vertex positions (rows of
/// positions). Throws VertexAtCenterError and DegenerateFaceError.
DiscreteMetric mobius_image_metric(const Triangulation& T,
                                   const Eigen::MatrixXd& positions,
                                   const MoebiusTransform& transform);

/// Euclidean edge lengths of embedded positions (rows).
DiscreteMetric metric_from_positions(const Triangulation& T,
                                     const Eigen::MatrixXd& positions);

/// Keep the listed faces; compact vertices. vertex_map maps old vertex ids
/// to new ids (-1 when dropped).
Triangulation submesh(const Triangulation& T, const std::vector<int>& keep_faces,
                      std::vector<int>& vertex_map);

}  // namespace dcp
