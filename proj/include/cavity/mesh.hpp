#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "cavity/types.hpp"

namespace cavity {

/**
 * Tetrahedral mesh: node coordinates (meters) and 4-node connectivity.
 *
 * Node and tet indices are 0-based internally, 1-based in mesh files.
 * Every tet is stored with positive signed volume (generators and the
 * parser fix the vertex order). Instances are immutable after
 * construction and safe to share across threads.
 */
struct TetMesh {
    std::vector<Vec3> nodes;
    std::vector<std::array<int, 4>> tets;
    std::string label;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int tet_count() const { return static_cast<int>(tets.size()); }

    /// Signed volume of tet `t` (positive for a valid mesh).
    double tet_volume(int t) const;
    /// Sum of all tet volumes.
    double total_volume() const;
    /// Length of the longest edge over all tets (the mesh parameter h).
    double longest_edge() const;
};

/// Local edge endpoints (0-based vertex indices) defining the six
/// lowest-order edge functions on a tet: (1,2),(2,3),(1,3),(3,4),(1,4),(2,4)
/// in 1-based notation.
inline constexpr std::array<std::pair<int, int>, 6> kLocalEdgePairs{
    {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {0, 3}, {1, 3}}};

/**
 * Global edge numbering with per-tet orientation signs.
 *
 * Edges are node pairs (i1, i2), i1 < i2, sorted lexicographically.
 * The global reference direction runs from the low to the high node
 * index. For each tet, `tet_edges` maps the six local edges to their
 * global ids together with the sign relating the local direction
 * (first to second node of the local pair) to the global one.
 */
struct EdgeNumbering {
    struct LocalEdge {
        int gid;
        double sign;  // +1 or -1
    };
    std::vector<std::pair<int, int>> edges;
    std::vector<std::array<LocalEdge, 6>> tet_edges;

    int edge_count() const { return static_cast<int>(edges.size()); }
};

/// Parse the text mesh format (see README). Throws std::runtime_error
/// with a line number on malformed input, out-of-range node indices,
/// or zero-volume tets.
TetMesh parse_mesh(const std::string& text);

/// Serialize a mesh in the same format with 17-significant-digit floats.
std::string write_mesh(const TetMesh& mesh);

/// Structured box mesh: nx*ny*nz cubes, each split into 6 tets along
/// the main diagonal (Kuhn split). Node count (nx+1)(ny+1)(nz+1).
TetMesh generate_box_mesh(double a, double b, double c, int nx, int ny, int nz);

/// Ball mesh of radius r: box mesh on [-1,1]^3 with 2*level divisions
/// per axis, mapped radially p -> p * (r*|p|_inf / |p|_2) so boundary
/// nodes land on the sphere. Throws if a mapped tet degenerates.
TetMesh generate_ball_mesh(double r, int level);

/// Cylinder mesh (radius r, height along z): square cross-section
/// mapped to the disk the same way, z-coordinates untouched.
TetMesh generate_cylinder_mesh(double r, double height, int level);

/// Global edge extraction. Deterministic: depends only on the node
/// pairs present, not on tet order.
EdgeNumbering extract_edges(const TetMesh& mesh);

/// Signed node-edge incidence matrix Y (m x n): column k has -1 at the
/// low-index endpoint of edge k and +1 at the high-index endpoint.
/// Encodes the discrete gradients: grad L_i = sum_k Y(i,k) N_k.
SparseR build_connectivity_matrix(const EdgeNumbering& edges, int node_count);

/// Full conformity check (face-hash pairing): every interior face is
/// shared by exactly two tets, boundary faces by one. O(#faces).
bool check_conformity(const TetMesh& mesh, std::string* diagnostic = nullptr);

}  // namespace cavity
