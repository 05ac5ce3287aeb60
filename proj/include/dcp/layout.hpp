#pragma once

#include <Eigen/Dense>

#include <vector>

#include "dcp/mesh.hpp"

namespace dcp {

/// Development of a triangulated surface in the plane, corner-based so that
/// cone vertices may carry several copies of a position.
struct PlanarLayout {
    Eigen::MatrixXd corner_pos;   // (3F)×2, row 3f+s is corner s of face f
    std::vector<int> face_order;  // breadth-first development order

    /// One position per vertex (the first corner copy encountered).
    Eigen::MatrixXd vertex_positions(const Triangulation& T) const;
};

/// Lay out the faces by breadth-first development from the root face; the
/// root's first edge goes on the positive x-axis starting at the origin.
/// Throws BrokenTriangleError when a face violates the triangle inequality.
PlanarLayout layout_euclidean(const Triangulation& T, const DiscreteMetric& metric,
                              int root_face = 0);

/// Development of a hyperbolic metric in the Poincaré disk. Interior edges
/// whose two developed copies disagree beyond drift_tol (the cut locus of
/// the development on non-simply-connected surfaces) are listed as cuts.
struct HyperbolicLayout {
    Eigen::MatrixXd corner_pos;  // (3F)×2 inside the unit disk
    std::vector<int> face_order;
    std::vector<int> cut_edges;
};

HyperbolicLayout layout_hyperbolic(const Triangulation& T,
                                   const DiscreteMetric& metric, int root_face = 0,
                                   double drift_tol = 1e-6);

}  // namespace dcp
