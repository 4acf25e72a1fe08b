#include "efie/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace efie {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Refinement tree over the input triangles. Leaves in depth-first order form
// the output mesh, so children of input triangle i stay contiguous.
class Refiner {
public:
    explicit Refiner(const SurfaceMesh& mesh) : mesh_(mesh), vertices_(mesh.vertices()) {
        const int nt = mesh.num_triangles();
        nodes_.reserve(4 * nt);
        for (int t = 0; t < nt; ++t) {
            Node n;
            n.tri = mesh.triangle(t);
            n.face = mesh.face_id(t);
            n.level = mesh.level(t);
            n.group = mesh.green(t);
            n.source = t;
            nodes_.push_back(n);
        }
        groups_ = mesh.green_groups();
        group_children_.assign(groups_.size(), {});
        group_alive_.assign(groups_.size(), 1);
        for (int t = 0; t < nt; ++t)
            if (mesh.green(t) >= 0) group_children_[mesh.green(t)].push_back(t);
        for (const auto& g : groups_) midpoints_[key(g.parent[1], g.parent[2])] = g.midpoint;
    }

    void refine(std::span<const int> marked) {
        std::vector<int> sorted(marked.begin(), marked.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (int t : sorted) {
            if (t < 0 || t >= mesh_.num_triangles()) throw InputError("marked triangle index out of range");
            Node& n = nodes_[t];
            if (n.dead || !n.children.empty()) continue;  // already merged into a parent
            if (n.group >= 0) {
                red(merge(n.group));
            } else {
                red(t);
            }
        }
        close();
    }

    RefinementResult finish(const MeshOptions& opts) {
        MeshData out;
        out.vertices = vertices_;
        std::vector<int> leaves;
        for (int t = 0; t < mesh_.num_triangles(); ++t) collect(t, leaves);

        std::vector<int> new_group(groups_.size(), -1);
        std::vector<int> out_index(nodes_.size(), -1);
        for (std::size_t i = 0; i < leaves.size(); ++i) out_index[leaves[i]] = static_cast<int>(i);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (!group_alive_[g]) continue;
            new_group[g] = static_cast<int>(out.green_groups.size());
            out.green_groups.push_back(groups_[g]);
        }

        std::vector<int> source;
        for (int leaf : leaves) {
            const Node& n = nodes_[leaf];
            out.triangles.push_back(n.tri);
            out.face_id.push_back(n.face);
            out.level.push_back(n.level);
            out.green.push_back(n.group >= 0 ? new_group[n.group] : -1);
            source.push_back(n.source);
        }
        auto records = records_;
        for (int leaf : leaves) {
            const Node& n = nodes_[leaf];
            if (n.origin >= 0) records[n.origin].children.push_back(out_index[leaf]);
        }
        return RefinementResult{SurfaceMesh::build(std::move(out), opts), std::move(records), std::move(source)};
    }

private:
    struct Node {
        Triangle tri{};
        int face = 0;
        int level = 0;
        int group = -1;   // green group this leaf belongs to
        int origin = -1;  // refinement record
        int source = -1;  // input triangle containing this node
        bool dead = false;
        std::vector<int> children;
    };

    int midpoint(int a, int b) {
        auto [it, inserted] = midpoints_.try_emplace(key(a, b), static_cast<int>(vertices_.size()));
        if (inserted) vertices_.push_back(0.5 * (vertices_[a] + vertices_[b]));
        return it->second;
    }

    void open_record(Node& n, std::vector<int> parents) {
        if (n.origin >= 0) return;
        n.origin = static_cast<int>(records_.size());
        records_.push_back({std::move(parents), {}, n.level + 1});
    }

    int add_child(const Node& parent, const Triangle& tri, int group) {
        Node c;
        c.tri = tri;
        c.face = parent.face;
        c.level = parent.level + 1;
        c.group = group;
        c.origin = parent.origin;
        c.source = parent.source;
        nodes_.push_back(std::move(c));
        return static_cast<int>(nodes_.size()) - 1;
    }

    void red(int id) {
        if (nodes_[id].source >= 0 && nodes_[id].origin < 0) open_record(nodes_[id], {nodes_[id].source});
        const auto [a, b, c] = nodes_[id].tri;
        const int mab = midpoint(a, b);
        const int mbc = midpoint(b, c);
        const int mca = midpoint(c, a);
        const Node parent = nodes_[id];
        std::vector<int> kids{add_child(parent, {a, mab, mca}, -1), add_child(parent, {mab, b, mbc}, -1),
                              add_child(parent, {mca, mbc, c}, -1), add_child(parent, {mab, mbc, mca}, -1)};
        nodes_[id].children = std::move(kids);
    }

    // split across the edge opposite local vertex `apex`
    void green(int id, int apex) {
        if (nodes_[id].source >= 0 && nodes_[id].origin < 0) open_record(nodes_[id], {nodes_[id].source});
        const Triangle& t = nodes_[id].tri;
        const int a = t[apex], b = t[(apex + 1) % 3], c = t[(apex + 2) % 3];
        const int m = midpoint(b, c);
        const int g = static_cast<int>(groups_.size());
        groups_.push_back({{a, b, c}, m, nodes_[id].face, nodes_[id].level});
        group_alive_.push_back(1);
        const Node parent = nodes_[id];
        std::vector<int> kids{add_child(parent, {a, b, m}, g), add_child(parent, {a, m, c}, g)};
        group_children_.push_back(kids);
        nodes_[id].children = std::move(kids);
    }

    // Replace a green pair by its parent; returns the parent's node id.
    int merge(int g) {
        const auto& kids = group_children_[g];
        const GreenGroup& grp = groups_[g];
        Node p;
        p.tri = grp.parent;
        p.face = grp.face;
        p.level = grp.level;
        std::vector<int> parents;
        for (int k : kids) parents.push_back(nodes_[k].source);
        std::sort(parents.begin(), parents.end());
        nodes_.push_back(p);
        const int pid = static_cast<int>(nodes_.size()) - 1;
        open_record(nodes_[pid], parents);
        records_[nodes_[pid].origin].level = grp.level + 1;
        const int first = std::min(kids[0], kids[1]);
        const int second = std::max(kids[0], kids[1]);
        nodes_[first].children = {pid};
        nodes_[second].dead = true;
        group_alive_[g] = 0;
        return pid;
    }

    void collect(int id, std::vector<int>& leaves) const {
        const Node& n = nodes_[id];
        if (n.dead) return;
        if (n.children.empty()) {
            leaves.push_back(id);
            return;
        }
        for (int c : n.children) collect(c, leaves);
    }

    std::vector<int> leaves() const {
        std::vector<int> out;
        for (int t = 0; t < mesh_.num_triangles(); ++t) collect(t, out);
        return out;
    }

    std::map<EdgeKey, int> edge_counts(const std::vector<int>& leaves) const {
        std::map<EdgeKey, int> count;
        for (int l : leaves) {
            const Triangle& t = nodes_[l].tri;
            for (int a = 0; a < 3; ++a) ++count[key(t[(a + 1) % 3], t[(a + 2) % 3])];
        }
        return count;
    }

    // local indices of the vertices opposite to edges whose midpoint is
    // already a vertex of the neighbouring leaves
    std::vector<int> hanging(const Node& n, const std::map<EdgeKey, int>& count) const {
        std::vector<int> h;
        for (int a = 0; a < 3; ++a) {
            const int u = n.tri[(a + 1) % 3], v = n.tri[(a + 2) % 3];
            const auto mid = midpoints_.find(key(u, v));
            if (mid == midpoints_.end()) continue;
            if (count.contains(key(u, mid->second)) && count.contains(key(mid->second, v))) h.push_back(a);
        }
        return h;
    }

    void close() {
        for (;;) {
            bool changed = false;
            const auto ls = leaves();
            const auto count = edge_counts(ls);
            for (int l : ls) {
                const Node& n = nodes_[l];
                if (n.dead || !n.children.empty()) continue;
                const auto h = hanging(n, count);
                if (h.empty()) continue;
                if (n.group >= 0) {
                    red(merge(n.group));
                    changed = true;
                } else if (h.size() >= 2) {
                    red(l);
                    changed = true;
                }
            }
            if (changed) continue;
            for (int l : ls) {
                const auto h = hanging(nodes_[l], count);
                if (h.size() == 1) green(l, h[0]);
            }
            break;
        }
    }

    const SurfaceMesh& mesh_;
    std::vector<Vec3> vertices_;
    std::vector<Node> nodes_;
    std::vector<GreenGroup> groups_;
    std::vector<std::vector<int>> group_children_;
    std::vector<char> group_alive_;
    std::map<EdgeKey, int> midpoints_;
    std::vector<RefinementRecord> records_;
};

}  // namespace

RefinementResult refine_uniform(const SurfaceMesh& mesh) {
    MeshData d;
    d.vertices = mesh.vertices();
    std::map<EdgeKey, int> mids;
    auto midpoint = [&](int a, int b) {
        auto [it, inserted] = mids.try_emplace(key(a, b), static_cast<int>(d.vertices.size()));
        if (inserted) d.vertices.push_back(0.5 * (d.vertices[a] + d.vertices[b]));
        return it->second;
    };
    std::vector<RefinementRecord> records;
    std::vector<int> source;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto [a, b, c] = mesh.triangle(t);
        const int mab = midpoint(a, b);
        const int mbc = midpoint(b, c);
        const int mca = midpoint(c, a);
        const Triangle kids[4] = {{a, mab, mca}, {mab, b, mbc}, {mca, mbc, c}, {mab, mbc, mca}};
        RefinementRecord rec{{t}, {}, mesh.level(t) + 1};
        for (const auto& k : kids) {
            rec.children.push_back(static_cast<int>(d.triangles.size()));
            source.push_back(t);
            d.triangles.push_back(k);
            d.face_id.push_back(mesh.face_id(t));
            d.level.push_back(mesh.level(t) + 1);
        }
        records.push_back(std::move(rec));
    }
    return RefinementResult{SurfaceMesh::build(std::move(d), MeshOptions{mesh.rho_max()}), std::move(records),
                            std::move(source)};
}

RefinementResult refine_marked(const SurfaceMesh& mesh, std::span<const int> marked) {
    Refiner r(mesh);
    r.refine(marked);
    return r.finish(MeshOptions{mesh.rho_max()});
}

}  // namespace efie
