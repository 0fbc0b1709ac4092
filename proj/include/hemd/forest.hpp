#pragma once

#include <memory>
#include <vector>

#include "hemd/core.hpp"
#include "hemd/probmap.hpp"

namespace hemd {

// Pixel neighborhood used for connected components.
enum class Connectivity { four = 4, eight = 8 };

// One instance candidate: a connected component of a super-level set,
// annotated with the lowest quantization level that induces exactly this
// pixel set. Parent is the containing component at the next lower retained
// level (-1 for roots).
struct CandidateNode {
    int id = -1;
    Region region;
    int level = 0;  // inducing threshold, in hundredths
    int parent = -1;
    std::vector<int> children;

    double threshold() const { return level / 100.0; }
};

// The laminar forest of all instance candidates of one frame at
// quantization levels >= tau. Runs of identical regions across consecutive
// levels are collapsed into a single node keeping the lowest level, so for
// any two nodes either the regions are disjoint or one strictly contains
// the other. Node ids are assigned by (level descending, smallest pixel
// ascending) and equal vector positions.
class CandidateForest {
public:
    CandidateForest() = default;
    CandidateForest(std::vector<CandidateNode> nodes, int tau_level);

    const std::vector<CandidateNode>& nodes() const { return nodes_; }
    const CandidateNode& node(int id) const;  // UnknownNodeError
    const std::vector<int>& roots() const { return roots_; }
    const std::vector<int>& leaves() const { return leaves_; }
    int tau_level() const { return tau_level_; }

    int size() const { return static_cast<int>(nodes_.size()); }
    bool empty() const { return nodes_.empty(); }
    bool valid_id(int id) const {
        return id >= 0 && id < static_cast<int>(nodes_.size());
    }

    // Root of the tree containing the node.
    int tree_root(int id) const;

private:
    std::vector<CandidateNode> nodes_;
    std::vector<int> roots_;
    std::vector<int> leaves_;
    int tau_level_ = 0;
};

// Strictly increasing distinct quantized values of the map that are >= tau
// and attained by at least one pixel.
std::vector<int> distinct_levels(const ProbMap& p, int tau_level);
std::vector<double> distinct_thresholds(const ProbMap& p, double tau);

// Maximal connected components of {pixel : p(pixel) >= v}, ordered by
// smallest pixel index.
std::vector<Region> components_at_level(const ProbMap& p, int level,
                                        Connectivity conn = Connectivity::eight);
std::vector<Region> components_at(const ProbMap& p, double v,
                                  Connectivity conn = Connectivity::eight);

// Builds the candidate forest of one frame (max-tree style: pixels sorted
// by descending level, components grown with union-find, nodes emitted at
// level changes).
CandidateForest build_forest_level(const ProbMap& p, int tau_level,
                                   Connectivity conn = Connectivity::eight);
CandidateForest build_forest(const ProbMap& p, double tau,
                             Connectivity conn = Connectivity::eight);

// One node-id path per leaf, ordered leaf -> root; leaves in id order.
std::vector<std::vector<int>> leaf_to_root_paths(const CandidateForest& f);

// ancestors(n) + subtree(n) + {n}: the union of all leaf-to-root paths
// through n. Sorted by id. Throws UnknownNodeError.
std::vector<int> path_closure(const CandidateForest& f, int node_id);

// Roots whose tree is a single chain (exactly one leaf).
std::vector<int> single_path_roots(const CandidateForest& f);

// The surviving part of a forest after candidates were consumed. Alive
// nodes keep their original ids and parent links; a node whose parent was
// removed acts as a root of the residual forest. Removal always happens in
// path closures, so survivors form whole subtrees.
class ResidualForest {
public:
    ResidualForest() = default;
    explicit ResidualForest(std::shared_ptr<const CandidateForest> forest);

    const CandidateForest& forest() const { return *forest_; }
    bool alive(int id) const { return alive_[static_cast<std::size_t>(id)] != 0; }
    int alive_count() const { return alive_count_; }
    bool empty() const { return alive_count_ == 0; }

    std::vector<int> alive_ids() const;
    // Alive nodes with no alive parent.
    std::vector<int> residual_roots() const;
    // Alive nodes with no alive children.
    std::vector<int> residual_leaves() const;
    // Leaf-to-root paths of the residual forest, leaves in id order.
    std::vector<std::vector<int>> residual_paths() const;
    // Topmost alive ancestor of an alive node.
    int residual_tree_root(int id) const;

    // Removes ancestors(n), subtree(n) and n itself from the residual
    // forest (every leaf-to-root path through n). Requires n alive.
    void remove_closure(int node_id);

private:
    std::shared_ptr<const CandidateForest> forest_;
    std::vector<char> alive_;
    int alive_count_ = 0;
};

}  // namespace hemd
