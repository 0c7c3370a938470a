#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace engineir {

using ClassId = std::uint32_t;

/// Arbitrary-precision count; design spaces overflow 64 bits quickly.
using BigCount = boost::multiprecision::cpp_int;

/// What an EGraph needs from the term language it stores.
///
///   Label  - operator tag plus embedded scalars; totally ordered.
///   Data   - per-class analysis value.
///   hash   - hash of a label.
///   make   - analysis of a new node from its children's data. May throw to
///            reject an ill-formed node before anything is inserted.
///   join   - merge `from` into `into` when two classes are unioned. May
///            throw to reject the union.
template <typename L>
concept Language = requires(const L &lang, const typename L::Label &label,
                            std::span<const typename L::Data *const> kids,
                            typename L::Data &into, const typename L::Data &from) {
  { L::hash(label) } -> std::convertible_to<std::size_t>;
  { lang.make(label, kids) } -> std::same_as<typename L::Data>;
  lang.join(into, from);
  { label < label } -> std::convertible_to<bool>;
};

/// Hashconsed e-nodes over a union-find of e-classes, with deferred
/// congruence repair: merge() only records work, rebuild() restores the
/// congruence and hashcons invariants.
///
/// Single writer. After rebuild() every parent pointer is compressed, so the
/// const queries (find, eclass, lookup) do not mutate and may run
/// concurrently with each other.
template <Language Lang>
class EGraph {
 public:
  using Label = typename Lang::Label;
  using Data = typename Lang::Data;

  struct ENode {
    Label label;
    std::vector<ClassId> children;

    friend bool operator==(const ENode &, const ENode &) = default;
    friend bool operator<(const ENode &a, const ENode &b) {
      if (a.label < b.label) return true;
      if (b.label < a.label) return false;
      return a.children < b.children;
    }
  };

  struct EClass {
    ClassId id;
    std::vector<ENode> nodes;
    Data data;
    std::vector<std::pair<ENode, ClassId>> parents;
  };

  explicit EGraph(Lang lang = Lang{}) : lang_(std::move(lang)) {}

  const Lang &lang() const { return lang_; }

  ClassId find(ClassId id) const {
    while (parent_[id] != id) id = parent_[id];
    return id;
  }

  ENode canonicalize(ENode node) const {
    for (auto &c : node.children) c = find(c);
    return node;
  }

  std::optional<ClassId> lookup(const ENode &node) const {
    auto it = memo_.find(canonicalize(node));
    if (it == memo_.end()) return std::nullopt;
    return find(it->second);
  }

  /// Returns the class of an identical canonical node if one exists,
  /// otherwise a fresh singleton class.
  ClassId add(ENode node) {
    node = canonicalize(std::move(node));
    if (auto it = memo_.find(node); it != memo_.end()) return find_mut(it->second);
    std::vector<const Data *> kids;
    kids.reserve(node.children.size());
    for (auto c : node.children) kids.push_back(&eclass(c).data);
    Data data = lang_.make(node.label, kids);

    auto id = static_cast<ClassId>(parent_.size());
    parent_.push_back(id);
    for (auto c : node.children) classes_[c]->parents.emplace_back(node, id);
    memo_.emplace(node, id);
    classes_.push_back(EClass{id, {node}, std::move(data), {}});
    return id;
  }

  /// Unions two classes. The smaller id survives, so ids are stable under
  /// any merge order. Returns the surviving id and whether anything changed.
  std::pair<ClassId, bool> merge(ClassId a, ClassId b) {
    a = find_mut(a);
    b = find_mut(b);
    if (a == b) return {a, false};
    if (b < a) std::swap(a, b);
    Data joined = classes_[a]->data;
    lang_.join(joined, classes_[b]->data);

    parent_[b] = a;
    EClass absorbed = std::move(*classes_[b]);
    classes_[b].reset();
    auto &root = *classes_[a];
    root.data = std::move(joined);
    root.nodes.insert(root.nodes.end(), std::make_move_iterator(absorbed.nodes.begin()),
                      std::make_move_iterator(absorbed.nodes.end()));
    root.parents.insert(root.parents.end(), std::make_move_iterator(absorbed.parents.begin()),
                        std::make_move_iterator(absorbed.parents.end()));
    pending_.push_back(a);
    return {a, true};
  }

  /// Restores congruence: any two nodes with equal labels and equal
  /// canonical children end up in one class. Returns the number of class
  /// repairs performed; 0 when there was nothing to do.
  std::size_t rebuild() {
    std::size_t repairs = 0;
    while (!pending_.empty()) {
      auto todo = std::exchange(pending_, {});
      for (auto &id : todo) id = find_mut(id);
      std::sort(todo.begin(), todo.end());
      todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
      for (auto id : todo) {
        repair(id);
        ++repairs;
      }
    }
    if (repairs > 0 || !compressed_) {
      for (ClassId i = 0; i < parent_.size(); ++i) parent_[i] = find(parent_[i]);
      // Parent lists can hold outdated copies of a node, so repair() may
      // leave stale hashcons keys behind; rebuild the table from the classes.
      memo_.clear();
      for (auto &slot : classes_) {
        if (!slot) continue;
        for (auto &n : slot->nodes) n = canonicalize(std::move(n));
        std::sort(slot->nodes.begin(), slot->nodes.end());
        slot->nodes.erase(std::unique(slot->nodes.begin(), slot->nodes.end()), slot->nodes.end());
        for (const auto &n : slot->nodes) memo_.emplace(n, slot->id);
      }
      compressed_ = true;
    }
    return repairs;
  }

  bool clean() const { return pending_.empty(); }

  const EClass &eclass(ClassId id) const { return *classes_[find(id)]; }

  /// Canonical class ids in increasing order.
  std::vector<ClassId> class_ids() const {
    std::vector<ClassId> out;
    for (const auto &slot : classes_)
      if (slot) out.push_back(slot->id);
    return out;
  }

  std::size_t num_classes() const {
    return static_cast<std::size_t>(
        std::count_if(classes_.begin(), classes_.end(), [](const auto &s) { return s.has_value(); }));
  }

  std::size_t num_nodes() const {
    std::size_t n = 0;
    for (const auto &slot : classes_)
      if (slot) n += slot->nodes.size();
    return n;
  }

  /// Number of hashcons entries; equals num_nodes() after rebuild() and is
  /// O(1), so it is the cheap size estimate for limit checks.
  std::size_t hashcons_size() const { return memo_.size(); }

  /// Upper bound (exclusive) on class ids ever allocated.
  std::size_t id_bound() const { return parent_.size(); }

 private:
  struct NodeHash {
    std::size_t operator()(const ENode &n) const {
      std::size_t h = Lang::hash(n.label);
      for (auto c : n.children) h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  ClassId find_mut(ClassId id) {
    ClassId root = find(id);
    while (parent_[id] != root) id = std::exchange(parent_[id], root);
    compressed_ = false;
    return root;
  }

  void repair(ClassId id) {
    id = find_mut(id);
    auto parents = std::move(classes_[id]->parents);
    classes_[id]->parents.clear();
    for (auto &[node, cls] : parents) {
      memo_.erase(node);
      node = canonicalize(std::move(node));
      memo_[node] = find_mut(cls);
    }
    std::vector<std::pair<ENode, ClassId>> kept;
    std::unordered_map<ENode, std::size_t, NodeHash> seen;
    for (auto &[node, cls] : parents) {
      node = canonicalize(std::move(node));
      auto [it, fresh] = seen.emplace(node, kept.size());
      if (fresh) {
        kept.emplace_back(node, find_mut(cls));
      } else {
        auto [root, changed] = merge(kept[it->second].second, cls);
        kept[it->second].second = root;
        if (changed) memo_[node] = root;
      }
    }
    auto &target = *classes_[find_mut(id)];
    target.parents.insert(target.parents.end(), std::make_move_iterator(kept.begin()),
                          std::make_move_iterator(kept.end()));
  }

  Lang lang_;
  std::vector<ClassId> parent_;
  std::vector<std::optional<EClass>> classes_;
  std::unordered_map<ENode, ClassId, NodeHash> memo_;
  std::vector<ClassId> pending_;
  bool compressed_ = true;
};

/// Exact number of distinct terms of depth <= d rooted at each class, for
/// every d up to `max_depth`. A leaf node has depth 1. Levels are computed
/// bottom-up (sum over a class's nodes of the product of child counts at
/// depth d-1); once a level equals the previous one every deeper level is
/// the same, so only levels up to that fixpoint are stored.
///
/// Requires a rebuilt graph.
template <typename Graph>
class TermCounter {
 public:
  using ENode = typename Graph::ENode;

  TermCounter(const Graph &g, std::size_t max_depth) : g_(g), max_depth_(max_depth) {
    levels_.emplace_back(g.id_bound());
    for (std::size_t d = 1; d <= max_depth; ++d) {
      std::vector<BigCount> next(g.id_bound());
      const auto &prev = levels_.back();
      for (auto c : g.class_ids()) {
        BigCount total = 0;
        for (const auto &n : g.eclass(c).nodes) total += product(n, prev);
        next[c] = std::move(total);
      }
      bool fixpoint = next == prev;
      levels_.push_back(std::move(next));
      if (fixpoint) break;
    }
  }

  std::size_t max_depth() const { return max_depth_; }

  const BigCount &count(ClassId c, std::size_t depth) const {
    return level(depth)[g_.find(c)];
  }

  /// Terms of depth <= `depth` whose root is `node`.
  BigCount node_count(const ENode &node, std::size_t depth) const {
    if (depth == 0) return 0;
    return product(node, level(depth - 1));
  }

  /// Builds the term of the given rank (0 <= rank < count(c, depth)).
  /// Ranks enumerate nodes in class order; within a node, child ranks are
  /// decoded in mixed radix with the first child least significant.
  /// `build(label, children)` assembles one term node.
  template <typename Result, typename Build>
  Result unrank(ClassId c, std::size_t depth, BigCount rank, Build &&build) const {
    return unrank_impl<Result>(c, depth, std::move(rank), build);
  }

 private:
  const std::vector<BigCount> &level(std::size_t depth) const {
    return levels_[std::min(depth, levels_.size() - 1)];
  }

  static BigCount product(const ENode &n, const std::vector<BigCount> &prev) {
    BigCount p = 1;
    for (auto child : n.children) {
      p *= prev[child];
      if (p == 0) break;
    }
    return p;
  }

  template <typename Result, typename Build>
  Result unrank_impl(ClassId c, std::size_t depth, BigCount rank, Build &build) const {
    for (const auto &n : g_.eclass(c).nodes) {
      BigCount here = node_count(n, depth);
      if (rank >= here) {
        rank -= here;
        continue;
      }
      std::vector<Result> kids;
      kids.reserve(n.children.size());
      for (auto child : n.children) {
        const auto &radix = count(child, depth - 1);
        BigCount digit = rank % radix;
        rank /= radix;
        kids.push_back(unrank_impl<Result>(child, depth - 1, std::move(digit), build));
      }
      return build(n.label, std::move(kids));
    }
    throw std::out_of_range("term rank exceeds class count");
  }

  const Graph &g_;
  std::size_t max_depth_;
  std::vector<std::vector<BigCount>> levels_;
};

template <typename Graph>
BigCount count_terms(const Graph &g, ClassId root, std::size_t max_depth) {
  return TermCounter<Graph>(g, max_depth).count(root, max_depth);
}

}  // namespace engineir
