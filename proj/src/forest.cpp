#include "hemd/forest.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace hemd {

namespace {

// Visits the 4- or 8-neighbors of a linear pixel index.
template <typename Fn>
void for_each_neighbor(int pixel, int height, int width, Connectivity conn,
                       Fn&& fn) {
    const int r = pixel / width;
    const int c = pixel % width;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (conn == Connectivity::four && dr != 0 && dc != 0) continue;
            const int nr = r + dr;
            const int nc = c + dc;
            if (nr < 0 || nr >= height || nc < 0 || nc >= width) continue;
            fn(nr * width + nc);
        }
    }
}

struct CompSlot {
    std::vector<std::int32_t> pixels;
    std::vector<int> pending_children;
    int freeze_stamp = -1;
    bool dead = false;
};

int uf_find(std::vector<std::int32_t>& uf, int x) {
    while (uf[x] != x) {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    return x;
}

}  // namespace

CandidateForest::CandidateForest(std::vector<CandidateNode> nodes,
                                 int tau_level)
    : nodes_(std::move(nodes)), tau_level_(tau_level) {
    const int n = static_cast<int>(nodes_.size());
    for (int i = 0; i < n; ++i) {
        const CandidateNode& node = nodes_[i];
        if (node.id != i) throw Error("forest node ids must equal positions");
        if (node.parent != -1) {
            if (node.parent < 0 || node.parent >= n) {
                throw Error("forest parent id out of range");
            }
            const CandidateNode& parent = nodes_[node.parent];
            if (parent.level >= node.level) {
                throw Error("child level must exceed parent level");
            }
        }
        for (int child : node.children) {
            if (child < 0 || child >= n || nodes_[child].parent != i) {
                throw Error("forest child links inconsistent");
            }
        }
        if (node.parent == -1) roots_.push_back(i);
        if (node.children.empty()) leaves_.push_back(i);
    }
}

const CandidateNode& CandidateForest::node(int id) const {
    if (!valid_id(id)) {
        throw UnknownNodeError("unknown node id " + std::to_string(id));
    }
    return nodes_[static_cast<std::size_t>(id)];
}

int CandidateForest::tree_root(int id) const {
    const CandidateNode* cur = &node(id);
    while (cur->parent != -1) cur = &nodes_[static_cast<std::size_t>(cur->parent)];
    return cur->id;
}

std::vector<int> distinct_levels(const ProbMap& p, int tau_level) {
    std::array<bool, ProbMap::kLevels> present{};
    for (std::uint8_t level : p.levels()) present[level] = true;
    std::vector<int> out;
    for (int level = std::max(tau_level, 0); level < ProbMap::kLevels; ++level) {
        if (present[static_cast<std::size_t>(level)]) out.push_back(level);
    }
    return out;
}

std::vector<double> distinct_thresholds(const ProbMap& p, double tau) {
    std::vector<double> out;
    for (int level : distinct_levels(p, prob_to_level(tau))) {
        out.push_back(level / 100.0);
    }
    return out;
}

std::vector<Region> components_at_level(const ProbMap& p, int level,
                                        Connectivity conn) {
    const int height = p.height();
    const int width = p.width();
    const int n = static_cast<int>(p.pixel_count());
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Region> regions;
    std::vector<std::int32_t> stack;
    for (int start = 0; start < n; ++start) {
        if (seen[start] || p.level(start) < level) continue;
        std::vector<std::int32_t> pixels;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const int px = stack.back();
            stack.pop_back();
            pixels.push_back(px);
            for_each_neighbor(px, height, width, conn, [&](int nb) {
                if (!seen[nb] && p.level(nb) >= level) {
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
            });
        }
        regions.push_back(Region::from_unsorted(std::move(pixels)));
    }
    // Scan order already yields ascending smallest-pixel order.
    return regions;
}

std::vector<Region> components_at(const ProbMap& p, double v,
                                  Connectivity conn) {
    return components_at_level(p, prob_to_level(v), conn);
}

CandidateForest build_forest_level(const ProbMap& p, int tau_level,
                                   Connectivity conn) {
    const int height = p.height();
    const int width = p.width();
    const int n = static_cast<int>(p.pixel_count());
    tau_level = std::max(tau_level, 0);

    std::vector<std::vector<std::int32_t>> buckets(ProbMap::kLevels);
    for (int px = 0; px < n; ++px) {
        const int level = p.level(px);
        if (level >= tau_level) buckets[static_cast<std::size_t>(level)].push_back(px);
    }

    std::vector<std::int32_t> uf(static_cast<std::size_t>(n), -1);
    std::vector<std::int32_t> slot_of(static_cast<std::size_t>(n), -1);
    std::vector<char> active(static_cast<std::size_t>(n), 0);
    std::vector<CompSlot> slots;
    std::vector<CandidateNode> raw;

    // Turns a component's current pixel set into a node induced at `level`
    // (the lowest level of the run over which the set stayed unchanged).
    auto freeze = [&](CompSlot& slot, int level) {
        const int id = static_cast<int>(raw.size());
        std::vector<std::int32_t> pixels = slot.pixels;  // keep slot growable
        std::sort(pixels.begin(), pixels.end());
        std::vector<int> children = std::move(slot.pending_children);
        for (int child : children) raw[static_cast<std::size_t>(child)].parent = id;
        raw.push_back(CandidateNode{id, Region(std::move(pixels)), level, -1,
                                    std::move(children)});
        slot.pending_children = {id};
    };

    auto unite = [&](int a, int b) {
        int ra = uf_find(uf, a);
        int rb = uf_find(uf, b);
        if (ra == rb) return;
        int sa = slot_of[static_cast<std::size_t>(ra)];
        int sb = slot_of[static_cast<std::size_t>(rb)];
        if (slots[static_cast<std::size_t>(sa)].pixels.size() <
            slots[static_cast<std::size_t>(sb)].pixels.size()) {
            std::swap(ra, rb);
            std::swap(sa, sb);
        }
        uf[static_cast<std::size_t>(rb)] = ra;
        CompSlot& keep = slots[static_cast<std::size_t>(sa)];
        CompSlot& drop = slots[static_cast<std::size_t>(sb)];
        keep.pixels.insert(keep.pixels.end(), drop.pixels.begin(),
                           drop.pixels.end());
        keep.pending_children.insert(keep.pending_children.end(),
                                     drop.pending_children.begin(),
                                     drop.pending_children.end());
        drop.pixels.clear();
        drop.pixels.shrink_to_fit();
        drop.pending_children.clear();
        drop.dead = true;
    };

    int last_level = -1;
    for (int level = ProbMap::kLevels - 1; level >= tau_level; --level) {
        const auto& bucket = buckets[static_cast<std::size_t>(level)];
        if (bucket.empty()) continue;

        // Pre-existing components adjacent to this level's pixels are about
        // to change: snapshot each one as a node first. Its region was the
        // component for every retained level down to `last_level`.
        for (int px : bucket) {
            for_each_neighbor(px, height, width, conn, [&](int nb) {
                if (!active[static_cast<std::size_t>(nb)]) return;
                const int root = uf_find(uf, nb);
                CompSlot& slot =
                    slots[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(root)])];
                if (slot.freeze_stamp != level) {
                    freeze(slot, last_level);
                    slot.freeze_stamp = level;
                }
            });
        }
        for (int px : bucket) {
            uf[static_cast<std::size_t>(px)] = px;
            slot_of[static_cast<std::size_t>(px)] =
                static_cast<std::int32_t>(slots.size());
            slots.push_back(CompSlot{{px}, {}, -1, false});
            active[static_cast<std::size_t>(px)] = 1;
        }
        for (int px : bucket) {
            for_each_neighbor(px, height, width, conn, [&](int nb) {
                if (active[static_cast<std::size_t>(nb)]) unite(px, nb);
            });
        }
        last_level = level;
    }

    // Surviving components are the forest roots, induced at the lowest
    // retained level.
    for (CompSlot& slot : slots) {
        if (!slot.dead && !slot.pixels.empty()) freeze(slot, last_level);
    }

    // Deterministic ids: (level descending, smallest pixel ascending).
    std::vector<int> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&raw](int a, int b) {
        const auto& na = raw[static_cast<std::size_t>(a)];
        const auto& nb = raw[static_cast<std::size_t>(b)];
        if (na.level != nb.level) return na.level > nb.level;
        return na.region.min_pixel() < nb.region.min_pixel();
    });
    std::vector<int> new_id(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        new_id[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    }
    std::vector<CandidateNode> nodes;
    nodes.reserve(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        CandidateNode node = std::move(raw[static_cast<std::size_t>(order[i])]);
        node.id = static_cast<int>(i);
        if (node.parent != -1) node.parent = new_id[static_cast<std::size_t>(node.parent)];
        for (int& child : node.children) child = new_id[static_cast<std::size_t>(child)];
        std::sort(node.children.begin(), node.children.end());
        nodes.push_back(std::move(node));
    }
    return CandidateForest(std::move(nodes), tau_level);
}

CandidateForest build_forest(const ProbMap& p, double tau, Connectivity conn) {
    return build_forest_level(p, prob_to_level(tau), conn);
}

std::vector<std::vector<int>> leaf_to_root_paths(const CandidateForest& f) {
    std::vector<std::vector<int>> paths;
    paths.reserve(f.leaves().size());
    for (int leaf : f.leaves()) {
        std::vector<int> path;
        for (int cur = leaf; cur != -1; cur = f.node(cur).parent) {
            path.push_back(cur);
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

std::vector<int> path_closure(const CandidateForest& f, int node_id) {
    const CandidateNode& start = f.node(node_id);  // throws UnknownNodeError
    std::vector<int> out;
    for (int cur = start.parent; cur != -1; cur = f.node(cur).parent) {
        out.push_back(cur);
    }
    std::vector<int> stack{node_id};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        for (int child : f.node(cur).children) stack.push_back(child);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> single_path_roots(const CandidateForest& f) {
    std::vector<int> leaf_count(f.nodes().size(), 0);
    for (int leaf : f.leaves()) {
        ++leaf_count[static_cast<std::size_t>(f.tree_root(leaf))];
    }
    std::vector<int> out;
    for (int root : f.roots()) {
        if (leaf_count[static_cast<std::size_t>(root)] == 1) out.push_back(root);
    }
    return out;
}

ResidualForest::ResidualForest(std::shared_ptr<const CandidateForest> forest)
    : forest_(std::move(forest)),
      alive_(forest_->nodes().size(), 1),
      alive_count_(forest_->size()) {}

std::vector<int> ResidualForest::alive_ids() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(alive_count_));
    for (int id = 0; id < forest_->size(); ++id) {
        if (alive(id)) out.push_back(id);
    }
    return out;
}

std::vector<int> ResidualForest::residual_roots() const {
    std::vector<int> out;
    for (int id = 0; id < forest_->size(); ++id) {
        if (!alive(id)) continue;
        const int parent = forest_->node(id).parent;
        if (parent == -1 || !alive(parent)) out.push_back(id);
    }
    return out;
}

std::vector<int> ResidualForest::residual_leaves() const {
    std::vector<int> out;
    for (int id = 0; id < forest_->size(); ++id) {
        if (!alive(id)) continue;
        bool has_alive_child = false;
        for (int child : forest_->node(id).children) {
            if (alive(child)) {
                has_alive_child = true;
                break;
            }
        }
        if (!has_alive_child) out.push_back(id);
    }
    return out;
}

std::vector<std::vector<int>> ResidualForest::residual_paths() const {
    std::vector<std::vector<int>> paths;
    for (int leaf : residual_leaves()) {
        std::vector<int> path;
        int cur = leaf;
        while (cur != -1 && alive(cur)) {
            path.push_back(cur);
            cur = forest_->node(cur).parent;
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

int ResidualForest::residual_tree_root(int id) const {
    if (!forest_->valid_id(id) || !alive(id)) {
        throw UnknownNodeError("node " + std::to_string(id) +
                               " is not in the residual forest");
    }
    int cur = id;
    while (true) {
        const int parent = forest_->node(cur).parent;
        if (parent == -1 || !alive(parent)) return cur;
        cur = parent;
    }
}

void ResidualForest::remove_closure(int node_id) {
    if (!forest_->valid_id(node_id) || !alive(node_id)) {
        throw UnknownNodeError("node " + std::to_string(node_id) +
                               " is not in the residual forest");
    }
    auto kill = [this](int id) {
        auto& flag = alive_[static_cast<std::size_t>(id)];
        if (flag) {
            flag = 0;
            --alive_count_;
        }
    };
    for (int cur = forest_->node(node_id).parent; cur != -1;
         cur = forest_->node(cur).parent) {
        kill(cur);
    }
    std::vector<int> stack{node_id};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        kill(cur);
        for (int child : forest_->node(cur).children) stack.push_back(child);
    }
}

}  // namespace hemd
