#include "bspace/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace bspace {

std::uint64_t partition_class(Node n) {
  if (n == 0) throw std::invalid_argument("partition_class: node 0 is not a natural number");
  while ((n & 1U) == 0) n >>= 1U;
  return (n - 1) / 2;
}

Node next_in_class(std::uint64_t j, Node above) {
  Node v = 2 * j + 1;
  while (v <= above) v <<= 1U;
  return v;
}

namespace {

// Class indices 2^k - 1 with k >= 12 stay free for sets phi does not register.
bool reserved_class(std::uint64_t j) {
  const std::uint64_t v = j + 1;
  return j >= 4095 && (v & (v - 1)) == 0;
}

std::uint64_t next_free_class(std::uint64_t j) {
  do {
    ++j;
  } while (reserved_class(j));
  return j;
}

bool extendable(const std::vector<Node>& chain, SchreierRank xi) {
  std::vector<Node> probe(chain);
  probe.push_back(chain.back() + 1);
  return schreier_member(probe, xi);
}

}  // namespace

bool Segment::contains(Node n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

TreeXi TreeXi::build(const TreeSpec& spec) {
  if (spec.n_max == 0) throw std::invalid_argument("build_tree: n_max must be positive");
  if (spec.partition_id != kPartitionOddPart)
    throw std::invalid_argument("build_tree: unknown partition_id '" + spec.partition_id + "'");
  if (spec.phi_id != kPhiChainCounter)
    throw std::invalid_argument("build_tree: unknown phi_id '" + spec.phi_id + "'");

  TreeXi t;
  t.spec_ = spec;
  const auto size = static_cast<std::size_t>(spec.n_max) + 1;
  t.parent_.assign(size, 0);
  t.kind_.assign(size, 0);
  t.depth_.assign(size, 0);
  t.phi_.assign(size, 0);

  std::vector<Node> owner;  // class index -> node
  std::uint64_t counter = next_free_class(0);
  std::vector<Node> chain;
  for (Node n = 1; n <= spec.n_max; ++n) {
    const std::uint64_t j = partition_class(n);
    chain.clear();
    if (j == 0) {
      t.kind_[n] = 1;
      t.roots_.push_back(n);
      chain.push_back(n);
    } else if (j < owner.size() && owner[j] != 0) {
      chain = t.chain(owner[j]);
      chain.push_back(n);
      if (schreier_member(chain, spec.xi)) {
        t.kind_[n] = 2;
        t.parent_[n] = owner[j];
        t.depth_[n] = t.depth_[owner[j]] + 1;
      }
    }
    if (t.kind_[n] == 0) {
      t.detached_.push_back(n);
      continue;
    }
    if (extendable(chain, spec.xi)) {
      t.phi_[n] = counter;
      if (owner.size() <= counter) owner.resize(counter + 1, 0);
      owner[counter] = n;
      counter = next_free_class(counter);
    }
  }

  t.child_start_.assign(size + 1, 0);
  for (Node n = 1; n <= spec.n_max; ++n)
    if (t.parent_[n] != 0) ++t.child_start_[t.parent_[n] + 1];
  for (std::size_t i = 1; i <= size; ++i) t.child_start_[i] += t.child_start_[i - 1];
  t.child_list_.assign(t.child_start_[size], 0);
  std::vector<Node> fill(t.child_start_.begin(), t.child_start_.end() - 1);
  for (Node n = 1; n <= spec.n_max; ++n)
    if (t.parent_[n] != 0) t.child_list_[fill[t.parent_[n]]++] = n;
  return t;
}

void TreeXi::check(Node n) const {
  if (!has_node(n))
    throw std::out_of_range("node " + std::to_string(n) + " outside truncation {1.." +
                            std::to_string(spec_.n_max) + "}");
}

bool TreeXi::is_root(Node n) const {
  check(n);
  return kind_[n] == 1;
}

bool TreeXi::is_detached(Node n) const {
  check(n);
  return kind_[n] == 0;
}

std::optional<Node> TreeXi::parent(Node n) const {
  check(n);
  if (parent_[n] == 0) return std::nullopt;
  return parent_[n];
}

std::span<const Node> TreeXi::children(Node n) const {
  check(n);
  return std::span<const Node>(child_list_.data() + child_start_[n], child_start_[n + 1] - child_start_[n]);
}

std::vector<Node> TreeXi::chain(Node n) const {
  check(n);
  std::vector<Node> out(depth_[n] + 1);
  for (std::size_t i = out.size(); i-- > 0; n = parent_[n]) out[i] = n;
  return out;
}

std::size_t TreeXi::depth(Node n) const {
  check(n);
  return depth_[n];
}

std::optional<std::uint64_t> TreeXi::phi_class(Node n) const {
  check(n);
  if (phi_[n] == 0) return std::nullopt;
  return phi_[n];
}

std::optional<std::uint64_t> TreeXi::phi(const FinSet& prefix) const {
  if (prefix.empty() || !has_node(prefix.max()) || kind_[prefix.max()] == 0) return std::nullopt;
  const auto c = chain(prefix.max());
  if (!std::equal(c.begin(), c.end(), prefix.begin(), prefix.end())) return std::nullopt;
  return phi_class(prefix.max());
}

bool TreeXi::precedes(Node a, Node b) const {
  check(a);
  check(b);
  while (b > a) b = parent_[b];
  return a == b;
}

bool TreeXi::comparable(Node a, Node b) const { return precedes(a, b) || precedes(b, a); }

Segment TreeXi::segment(Node top, Node bottom) const {
  if (!precedes(top, bottom))
    throw std::invalid_argument("segment: " + std::to_string(top) + " does not precede " +
                                std::to_string(bottom));
  std::vector<Node> nodes;
  for (Node n = bottom; n >= top && n != 0; n = parent_[n]) nodes.push_back(n);
  std::reverse(nodes.begin(), nodes.end());
  return Segment{std::move(nodes)};
}

bool TreeXi::is_segment(const Segment& s) const {
  if (s.nodes.empty()) return false;
  for (Node n : s.nodes)
    if (!has_node(n)) return false;
  if (!precedes(s.top(), s.bottom())) return false;
  return segment(s.top(), s.bottom()) == s;
}

std::vector<std::pair<Node, Node>> TreeXi::edges() const {
  std::vector<std::pair<Node, Node>> out;
  for (Node n = 1; n <= spec_.n_max; ++n)
    if (parent_[n] != 0) out.emplace_back(parent_[n], n);
  return out;
}

std::size_t TreeXi::guaranteed_branch_length(Node root) const {
  std::vector<Node> probe{root};
  while (schreier_member(probe, spec_.xi)) probe.push_back(probe.back() + 1);
  return probe.size() - 1;
}

bool comparable(const TreeXi& tree, Node a, Node b) { return tree.comparable(a, b); }

std::vector<Segment> enumerate_segments(const TreeXi& tree, const FinSet& within) {
  std::vector<Segment> out;
  for (Node top : within)
    for (Node bottom : within)
      if (top <= bottom && tree.precedes(top, bottom)) out.push_back(tree.segment(top, bottom));
  return out;
}

bool segments_incomparable(const TreeXi& tree, const Segment& s1, const Segment& s2) {
  for (Node a : s1.nodes)
    for (Node b : s2.nodes)
      if (tree.comparable(a, b)) return false;
  return true;
}

nlohmann::json tree_to_json(const TreeXi& tree) {
  const auto& s = tree.spec();
  nlohmann::json edges = nlohmann::json::array();
  for (auto [p, c] : tree.edges()) edges.push_back({p, c});
  return nlohmann::json{
      {"spec",
       {{"xi", s.xi.value}, {"n_max", s.n_max}, {"partition_id", s.partition_id}, {"phi_id", s.phi_id}}},
      {"edges", std::move(edges)},
      {"roots", std::vector<Node>(tree.roots().begin(), tree.roots().end())}};
}

TreeXi tree_from_json(const nlohmann::json& j) {
  TreeSpec spec;
  try {
    const auto& js = j.at("spec");
    spec.xi = SchreierRank{js.at("xi").get<unsigned>()};
    spec.n_max = js.at("n_max").get<Node>();
    spec.partition_id = js.at("partition_id").get<std::string>();
    spec.phi_id = js.at("phi_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("tree JSON: ") + e.what());
  }
  TreeXi t = TreeXi::build(spec);
  const auto rebuilt = tree_to_json(t);
  if (j.contains("edges") && j.at("edges") != rebuilt.at("edges"))
    throw std::invalid_argument("tree JSON: edges do not match the spec's construction");
  if (j.contains("roots") && j.at("roots") != rebuilt.at("roots"))
    throw std::invalid_argument("tree JSON: roots do not match the spec's construction");
  return t;
}

}  // namespace bspace
