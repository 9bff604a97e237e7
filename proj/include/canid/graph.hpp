#pragma once

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace canid {

struct NodeId {
    int index = -1;
    bool valid() const { return index >= 0; }
    friend bool operator==(NodeId a, NodeId b) { return a.index == b.index; }
    friend bool operator!=(NodeId a, NodeId b) { return a.index != b.index; }
    friend bool operator<(NodeId a, NodeId b) { return a.index < b.index; }
};

using NodeSet = std::set<NodeId>;

struct NodeDecl {
    std::string name;
    bool observed = true;
};

struct Relatives {
    NodeSet parents;
    NodeSet descendants;      // proper descendants, excluding the node
    NodeSet non_descendants;  // complement, including the node itself
};

// Directed acyclic causal graph with observability flags. Immutable after
// construction; all queries are const and safe to run concurrently.
class CausalGraph {
public:
    CausalGraph() = default;

    CausalGraph(std::vector<NodeDecl> nodes, const std::vector<std::pair<std::string, std::string>>& edges)
        : nodes_(std::move(nodes)) {
        const int n = static_cast<int>(nodes_.size());
        parents_.assign(n, {});
        children_.assign(n, {});
        for (int i = 0; i < n; ++i) {
            if (nodes_[i].name.empty()) throw std::invalid_argument("graph: empty node name");
            for (int j = 0; j < i; ++j)
                if (nodes_[j].name == nodes_[i].name)
                    throw std::invalid_argument("graph: duplicate node name '" + nodes_[i].name + "'");
        }
        for (const auto& [from, to] : edges) add_edge(id_of(from), id_of(to));
        check_acyclic();
    }

    static CausalGraph from_index_edges(std::vector<NodeDecl> nodes,
                                        const std::vector<std::pair<int, int>>& edges) {
        CausalGraph g;
        g.nodes_ = std::move(nodes);
        const int n = static_cast<int>(g.nodes_.size());
        g.parents_.assign(n, {});
        g.children_.assign(n, {});
        for (auto [a, b] : edges) g.add_edge(NodeId{a}, NodeId{b});
        g.check_acyclic();
        return g;
    }

    int node_count() const { return static_cast<int>(nodes_.size()); }

    NodeId id_of(const std::string& name) const {
        for (int i = 0; i < node_count(); ++i)
            if (nodes_[i].name == name) return NodeId{i};
        throw std::invalid_argument("graph: unknown node '" + name + "'");
    }

    const std::string& name(NodeId v) const { return nodes_[checked(v)].name; }
    bool observed(NodeId v) const { return nodes_[checked(v)].observed; }

    const std::vector<NodeId>& parents(NodeId v) const { return parents_[checked(v)]; }
    const std::vector<NodeId>& children(NodeId v) const { return children_[checked(v)]; }

    bool has_edge(NodeId a, NodeId b) const {
        checked(a);
        const auto& ch = children_[checked(a)];
        return std::find(ch.begin(), ch.end(), b) != ch.end();
    }

    std::vector<NodeId> all_nodes() const {
        std::vector<NodeId> out;
        for (int i = 0; i < node_count(); ++i) out.push_back(NodeId{i});
        return out;
    }

    std::vector<NodeId> observed_nodes() const {
        std::vector<NodeId> out;
        for (int i = 0; i < node_count(); ++i)
            if (nodes_[i].observed) out.push_back(NodeId{i});
        return out;
    }

    Relatives relatives(NodeId v) const {
        checked(v);
        Relatives r;
        for (NodeId p : parents_[v.index]) r.parents.insert(p);
        std::vector<char> seen(node_count(), 0);
        std::deque<NodeId> queue{v};
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            for (NodeId c : children_[u.index]) {
                if (!seen[c.index]) {
                    seen[c.index] = 1;
                    r.descendants.insert(c);
                    queue.push_back(c);
                }
            }
        }
        for (int i = 0; i < node_count(); ++i)
            if (!r.descendants.count(NodeId{i})) r.non_descendants.insert(NodeId{i});
        return r;
    }

    // Adjacent if directly connected in either direction or sharing a
    // hidden common parent (length-1 edges from the hidden node only).
    bool is_adjacent(NodeId a, NodeId b) const {
        checked(a);
        checked(b);
        if (a == b) throw std::invalid_argument("is_adjacent: identical nodes");
        if (has_edge(a, b) || has_edge(b, a)) return true;
        for (int k = 0; k < node_count(); ++k) {
            if (nodes_[k].observed) continue;
            const NodeId h{k};
            if (has_edge(h, a) && has_edge(h, b)) return true;
        }
        return false;
    }

    // Reachability-based d-separation: a and b are d-separated given s iff
    // no s-active trail connects them. Colliders pass the trail when they
    // or one of their descendants is in s; noncolliders block when in s.
    bool d_separated(NodeId a, NodeId b, const NodeSet& s) const {
        checked(a);
        checked(b);
        if (a == b) throw std::invalid_argument("d_separated: identical endpoints");
        if (s.count(a) || s.count(b)) throw std::invalid_argument("d_separated: endpoint inside conditioning set");
        for (NodeId v : s) checked(v);

        const int n = node_count();
        // ancestors of s, including s
        std::vector<char> anc(n, 0);
        {
            std::deque<NodeId> queue;
            for (NodeId v : s) {
                anc[v.index] = 1;
                queue.push_back(v);
            }
            while (!queue.empty()) {
                const NodeId u = queue.front();
                queue.pop_front();
                for (NodeId p : parents_[u.index])
                    if (!anc[p.index]) {
                        anc[p.index] = 1;
                        queue.push_back(p);
                    }
            }
        }
        std::vector<char> in_s(n, 0);
        for (NodeId v : s) in_s[v.index] = 1;

        // state: (node, arrived-from-child?) pairs
        std::vector<char> visited_up(n, 0), visited_down(n, 0);
        std::deque<std::pair<int, bool>> queue{{a.index, true}};  // true = moving "up" (from a child)
        visited_up[a.index] = 1;
        while (!queue.empty()) {
            const auto [v, up] = queue.front();
            queue.pop_front();
            if (v == b.index && !in_s[v]) return false;  // active trail reaches b
            if (up) {
                if (in_s[v]) continue;
                for (NodeId p : parents_[v])
                    if (!visited_up[p.index]) {
                        visited_up[p.index] = 1;
                        queue.emplace_back(p.index, true);
                    }
                for (NodeId c : children_[v])
                    if (!visited_down[c.index]) {
                        visited_down[c.index] = 1;
                        queue.emplace_back(c.index, false);
                    }
            } else {
                if (!in_s[v]) {
                    for (NodeId c : children_[v])
                        if (!visited_down[c.index]) {
                            visited_down[c.index] = 1;
                            queue.emplace_back(c.index, false);
                        }
                }
                if (anc[v]) {  // collider with (descendant in) s: bounce back up
                    for (NodeId p : parents_[v])
                        if (!visited_up[p.index]) {
                            visited_up[p.index] = 1;
                            queue.emplace_back(p.index, true);
                        }
                }
            }
        }
        return true;
    }

    std::vector<NodeId> topological_order() const {
        const int n = node_count();
        std::vector<int> indeg(n, 0);
        for (int v = 0; v < n; ++v) indeg[v] = static_cast<int>(parents_[v].size());
        std::deque<int> ready;
        for (int v = 0; v < n; ++v)
            if (indeg[v] == 0) ready.push_back(v);
        std::vector<NodeId> order;
        while (!ready.empty()) {
            const int v = ready.front();
            ready.pop_front();
            order.push_back(NodeId{v});
            for (NodeId c : children_[v])
                if (--indeg[c.index] == 0) ready.push_back(c.index);
        }
        if (static_cast<int>(order.size()) != n) throw std::invalid_argument("graph: cycle detected");
        return order;
    }

private:
    int checked(NodeId v) const {
        if (v.index < 0 || v.index >= node_count())
            throw std::invalid_argument("graph: node id " + std::to_string(v.index) + " out of range");
        return v.index;
    }

    void add_edge(NodeId a, NodeId b) {
        checked(a);
        checked(b);
        if (a == b) throw std::invalid_argument("graph: self-edge on '" + nodes_[a.index].name + "'");
        if (has_edge(a, b)) return;
        children_[a.index].push_back(b);
        parents_[b.index].push_back(a);
    }

    void check_acyclic() const {
        (void)topological_order();  // throws on cycles
    }

    std::vector<NodeDecl> nodes_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
};

}  // namespace canid
