#ifndef WCOH_WAVELET_PACKET_HPP
#define WCOH_WAVELET_PACKET_HPP

#include "error.hpp"
#include "filter_bank.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wcoh {

/// Binary node path, one character per level: '0' = lowpass branch,
/// '1' = highpass branch. "0000" is the repeated-lowpass (trend) node.
using NodePath = std::string;

enum class NodeOrder { natural, frequency };

/// "{0,0,0,1}" style label for a path.
inline std::string node_label(std::string_view path)
{
    std::string out = "{";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += ',';
        out += path[i];
    }
    return out + "}";
}

/// Accepts "0001", "{0,0,0,1}" or "0,0,0,1".
inline NodePath parse_node_path(std::string_view text)
{
    NodePath out;
    for (char c : text) {
        if (c == '0' || c == '1') out += c;
        else if (c != '{' && c != '}' && c != ',' && c != ' ') throw UsageError("invalid node path '" + std::string(text) + "'");
    }
    if (out.empty()) throw UsageError("empty node path");
    return out;
}

/// Leaf paths at `depth`, in natural (Paley) or frequency (Gray-code) order.
inline std::vector<NodePath> leaf_paths(std::size_t depth, NodeOrder order = NodeOrder::natural)
{
    std::vector<NodePath> out;
    const std::size_t count = std::size_t{1} << depth;
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t idx = order == NodeOrder::natural ? r : (r ^ (r >> 1));
        NodePath p(depth, '0');
        for (std::size_t b = 0; b < depth; ++b)
            if (idx & (std::size_t{1} << (depth - 1 - b))) p[b] = '1';
        out.push_back(std::move(p));
    }
    return out;
}

/// Full wavelet-packet tree with periodic boundary handling. Every node from
/// the root ("") down to `level` is kept.
struct PacketTree {
    std::size_t level = 0;
    std::size_t original_length = 0;
    std::size_t padded_length = 0;
    OrthoFilter filter;
    std::map<NodePath, std::vector<double>> nodes;

    [[nodiscard]] const std::vector<double>& node(const NodePath& path) const
    {
        const auto it = nodes.find(path);
        if (it == nodes.end()) throw UsageError("unknown node path " + node_label(path));
        return it->second;
    }
};

inline PacketTree wpt_forward(std::span<const double> x, std::size_t level, const OrthoFilter& f = OrthoFilter::db3())
{
    detail::require(level >= 1, "packet level must be >= 1");
    const std::size_t block = std::size_t{1} << level;
    detail::require(x.size() >= block, "series shorter than 2^level");

    PacketTree tree;
    tree.level = level;
    tree.original_length = x.size();
    tree.filter = f;
    auto root = periodic_pad(x, block);
    tree.padded_length = root.size();
    tree.nodes.emplace("", std::move(root));

    std::vector<NodePath> frontier{""};
    for (std::size_t l = 0; l < level; ++l) {
        std::vector<NodePath> next;
        for (const auto& path : frontier) {
            auto [a, d] = analysis_step(tree.nodes.at(path), f);
            tree.nodes.emplace(path + '0', std::move(a));
            tree.nodes.emplace(path + '1', std::move(d));
            next.push_back(path + '0');
            next.push_back(path + '1');
        }
        frontier = std::move(next);
    }
    return tree;
}

/// Rebuilds the signal from the leaves.
inline std::vector<double> wpt_inverse(const PacketTree& tree)
{
    std::map<NodePath, std::vector<double>> cur;
    for (const auto& p : leaf_paths(tree.level)) cur.emplace(p, tree.node(p));
    for (std::size_t l = tree.level; l > 0; --l) {
        std::map<NodePath, std::vector<double>> up;
        for (const auto& p : leaf_paths(l - 1)) up.emplace(p, synthesis_step(cur.at(p + '0'), cur.at(p + '1'), tree.filter));
        cur = std::move(up);
    }
    auto out = std::move(cur.at(""));
    out.resize(tree.original_length);
    return out;
}

/// Inverse transform of a single node with every other node zeroed. Any
/// node of the tree may be used, not only leaves.
inline std::vector<double> reconstruct_node(const PacketTree& tree, const NodePath& path)
{
    detail::require(!path.empty() && path.size() <= tree.level, "node path depth outside the tree");
    auto cur = tree.node(path);
    for (std::size_t d = path.size(); d > 0; --d) {
        const std::vector<double> zeros(cur.size(), 0.0);
        cur = path[d - 1] == '0' ? synthesis_step(cur, zeros, tree.filter) : synthesis_step(zeros, cur, tree.filter);
    }
    cur.resize(tree.original_length);
    return cur;
}

/// Leaf energy divided by total leaf energy.
inline std::map<NodePath, double> energy_fractions(const PacketTree& tree)
{
    if (tree.nodes.empty() || tree.level == 0) throw UsageError("empty packet tree");
    std::map<NodePath, double> energy;
    double total = 0.0;
    for (const auto& p : leaf_paths(tree.level)) {
        const auto& c = tree.node(p);
        const double e = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
        energy[p] = e;
        total += e;
    }
    if (!(total > 0.0)) throw DataError("packet tree has zero energy");
    for (auto& [p, e] : energy) e /= total;
    return energy;
}

} // namespace wcoh

#endif // WCOH_WAVELET_PACKET_HPP
