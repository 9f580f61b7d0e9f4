#include "cavity/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <Eigen/Geometry>

namespace cavity {

namespace {

double signed_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    return (p1 - p0).cross(p2 - p0).dot(p3 - p0) / 6.0;
}

/// Swap the last two vertices if the signed volume is negative.
void fix_orientation(const std::vector<Vec3>& nodes, std::array<int, 4>& tet) {
    if (signed_volume(nodes[tet[0]], nodes[tet[1]], nodes[tet[2]], nodes[tet[3]]) < 0.0) {
        std::swap(tet[2], tet[3]);
    }
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("mesh parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace

double TetMesh::tet_volume(int t) const {
    const auto& e = tets[t];
    return signed_volume(nodes[e[0]], nodes[e[1]], nodes[e[2]], nodes[e[3]]);
}

double TetMesh::total_volume() const {
    double v = 0.0;
    for (int t = 0; t < tet_count(); ++t) v += tet_volume(t);
    return v;
}

double TetMesh::longest_edge() const {
    double h = 0.0;
    for (const auto& tet : tets) {
        for (const auto& [a, b] : kLocalEdgePairs) {
            h = std::max(h, (nodes[tet[a]] - nodes[tet[b]]).norm());
        }
    }
    return h;
}

TetMesh parse_mesh(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;

    auto next_line = [&](std::string& out) -> bool {
        while (std::getline(in, raw)) {
            ++lineno;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            // skip blank lines
            if (raw.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            out = raw;
            return true;
        }
        return false;
    };

    TetMesh mesh;
    std::string line;
    if (!next_line(line)) parse_fail(lineno, "missing 'nodes' header");
    long node_count = -1;
    {
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw >> node_count) || kw != "nodes" || node_count < 0)
            parse_fail(lineno, "expected 'nodes <count>'");
    }
    mesh.nodes.reserve(static_cast<size_t>(node_count));
    for (long i = 0; i < node_count; ++i) {
        if (!next_line(line)) parse_fail(lineno, "unexpected end of file in node list");
        std::istringstream ls(line);
        long id;
        double x, y, z;
        if (!(ls >> id >> x >> y >> z)) parse_fail(lineno, "expected '<id> <x> <y> <z>'");
        if (id != i + 1) parse_fail(lineno, "node ids must be 1..m in order");
        mesh.nodes.emplace_back(x, y, z);
    }

    if (!next_line(line)) parse_fail(lineno, "missing 'tets' header");
    long tet_count = -1;
    {
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw >> tet_count) || kw != "tets" || tet_count < 0)
            parse_fail(lineno, "expected 'tets <count>'");
    }
    mesh.tets.reserve(static_cast<size_t>(tet_count));
    for (long t = 0; t < tet_count; ++t) {
        if (!next_line(line)) parse_fail(lineno, "unexpected end of file in tet list");
        std::istringstream ls(line);
        long id, n1, n2, n3, n4;
        if (!(ls >> id >> n1 >> n2 >> n3 >> n4))
            parse_fail(lineno, "expected '<id> <n1> <n2> <n3> <n4>'");
        std::array<int, 4> tet{};
        const long ids[4] = {n1, n2, n3, n4};
        for (int j = 0; j < 4; ++j) {
            if (ids[j] < 1 || ids[j] > node_count) parse_fail(lineno, "node index out of range");
            tet[j] = static_cast<int>(ids[j] - 1);
        }
        std::set<int> distinct(tet.begin(), tet.end());
        if (distinct.size() != 4) parse_fail(lineno, "tet vertices must be distinct");
        fix_orientation(mesh.nodes, tet);
        if (signed_volume(mesh.nodes[tet[0]], mesh.nodes[tet[1]], mesh.nodes[tet[2]],
                          mesh.nodes[tet[3]]) <= 0.0)
            parse_fail(lineno, "zero-volume tet");
        mesh.tets.push_back(tet);
    }
    return mesh;
}

std::string write_mesh(const TetMesh& mesh) {
    std::string out;
    char buf[128];
    if (!mesh.label.empty()) out += "# " + mesh.label + "\n";
    std::snprintf(buf, sizeof buf, "nodes %d\n", mesh.node_count());
    out += buf;
    for (int i = 0; i < mesh.node_count(); ++i) {
        const Vec3& p = mesh.nodes[i];
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", i + 1, p.x(), p.y(), p.z());
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "tets %d\n", mesh.tet_count());
    out += buf;
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& e = mesh.tets[t];
        std::snprintf(buf, sizeof buf, "%d %d %d %d %d\n", t + 1, e[0] + 1, e[1] + 1, e[2] + 1,
                      e[3] + 1);
        out += buf;
    }
    return out;
}

namespace {

TetMesh kuhn_box(double x0, double y0, double z0, double a, double b, double c, int nx,
                 int ny, int nz) {
    TetMesh mesh;
    const auto nid = [&](int i, int j, int k) { return i + j * (nx + 1) + k * (nx + 1) * (ny + 1); };
    mesh.nodes.resize(static_cast<size_t>((nx + 1) * (ny + 1) * (nz + 1)));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                mesh.nodes[nid(i, j, k)] =
                    Vec3(x0 + a * i / nx, y0 + b * j / ny, z0 + c * k / nz);

    // Six tets per cube, one per axis permutation along the main
    // diagonal; the split is uniform so faces of adjacent cubes match.
    static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                        {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    mesh.tets.reserve(static_cast<size_t>(6 * nx * ny * nz));
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                for (const auto& p : perms) {
                    int v[3] = {i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = nid(v[0], v[1], v[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++v[p[s]];
                        tet[s + 1] = nid(v[0], v[1], v[2]);
                    }
                    fix_orientation(mesh.nodes, tet);
                    mesh.tets.push_back(tet);
                }
    return mesh;
}

void require_positive_volumes(const TetMesh& mesh, const char* what) {
    for (int t = 0; t < mesh.tet_count(); ++t) {
        if (mesh.tet_volume(t) <= 0.0)
            throw std::runtime_error(std::string(what) +
                                     ": degenerate mapped tet (retry at higher level)");
    }
}

}  // namespace

TetMesh generate_box_mesh(double a, double b, double c, int nx, int ny, int nz) {
    if (a <= 0 || b <= 0 || c <= 0) throw std::invalid_argument("box dimensions must be positive");
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("box divisions must be >= 1");
    TetMesh mesh = kuhn_box(0, 0, 0, a, b, c, nx, ny, nz);
    mesh.label = "box";
    return mesh;
}

TetMesh generate_ball_mesh(double r, int level) {
    if (r <= 0) throw std::invalid_argument("ball radius must be positive");
    if (level < 1) throw std::invalid_argument("ball level must be >= 1");
    const int d = 2 * level;
    TetMesh mesh = kuhn_box(-1, -1, -1, 2, 2, 2, d, d, d);
    for (auto& p : mesh.nodes) {
        const double linf = p.cwiseAbs().maxCoeff();
        const double l2 = p.norm();
        if (l2 > 0.0) p *= r * linf / l2;
    }
    require_positive_volumes(mesh, "generate_ball_mesh");
    mesh.label = "ball";
    return mesh;
}

TetMesh generate_cylinder_mesh(double r, double height, int level) {
    if (r <= 0 || height <= 0) throw std::invalid_argument("cylinder dimensions must be positive");
    if (level < 1) throw std::invalid_argument("cylinder level must be >= 1");
    const int d = 2 * level;
    const int nz = std::max(1, static_cast<int>(std::lround(height * level / r)));
    TetMesh mesh = kuhn_box(-r, -r, 0, 2 * r, 2 * r, height, d, d, nz);
    for (auto& p : mesh.nodes) {
        const double linf = std::max(std::abs(p.x()), std::abs(p.y()));
        const double l2 = std::hypot(p.x(), p.y());
        if (l2 > 0.0) {
            p.x() *= linf / l2;
            p.y() *= linf / l2;
        }
    }
    require_positive_volumes(mesh, "generate_cylinder_mesh");
    mesh.label = "cylinder";
    return mesh;
}

EdgeNumbering extract_edges(const TetMesh& mesh) {
    std::set<std::pair<int, int>> pairs;
    for (const auto& tet : mesh.tets) {
        for (const auto& [a, b] : kLocalEdgePairs) {
            pairs.insert(std::minmax(tet[a], tet[b]));
        }
    }
    EdgeNumbering en;
    en.edges.assign(pairs.begin(), pairs.end());  // already lexicographic
    std::map<std::pair<int, int>, int> gid;
    for (int k = 0; k < en.edge_count(); ++k) gid[en.edges[k]] = k;

    en.tet_edges.resize(mesh.tets.size());
    for (size_t t = 0; t < mesh.tets.size(); ++t) {
        const auto& tet = mesh.tets[t];
        for (int e = 0; e < 6; ++e) {
            const int i = tet[kLocalEdgePairs[e].first];
            const int j = tet[kLocalEdgePairs[e].second];
            en.tet_edges[t][e] = {gid[std::minmax(i, j)], i < j ? 1.0 : -1.0};
        }
    }
    return en;
}

SparseR build_connectivity_matrix(const EdgeNumbering& edges, int node_count) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges.edges.size() * 2);
    for (int k = 0; k < edges.edge_count(); ++k) {
        const auto& [i1, i2] = edges.edges[k];
        trips.emplace_back(i1, k, -1.0);  // initial (low-index) vertex
        trips.emplace_back(i2, k, 1.0);   // terminal vertex
    }
    SparseR y(node_count, edges.edge_count());
    y.setFromTriplets(trips.begin(), trips.end());
    y.makeCompressed();
    return y;
}

bool check_conformity(const TetMesh& mesh, std::string* diagnostic) {
    std::map<std::tuple<int, int, int>, int> face_count;
    for (const auto& tet : mesh.tets) {
        static constexpr int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
        for (const auto& f : faces) {
            std::array<int, 3> v{tet[f[0]], tet[f[1]], tet[f[2]]};
            std::sort(v.begin(), v.end());
            ++face_count[{v[0], v[1], v[2]}];
        }
    }
    for (const auto& [face, count] : face_count) {
        if (count > 2) {
            if (diagnostic)
                *diagnostic = "face shared by " + std::to_string(count) + " tets";
            return false;
        }
    }
    return true;
}

}  // namespace cavity
