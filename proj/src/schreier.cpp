#include "bspace/schreier.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace bspace {

FinSet::FinSet(std::initializer_list<Node> elements) : FinSet(std::vector<Node>(elements)) {}

FinSet::FinSet(std::vector<Node> elements) : elements_(std::move(elements)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i] == 0) throw std::invalid_argument("FinSet elements must be >= 1");
    if (i > 0 && elements_[i] <= elements_[i - 1]) {
      throw std::invalid_argument("FinSet elements must be strictly increasing");
    }
  }
}

FinSet FinSet::from_unsorted(std::vector<Node> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  return FinSet(std::move(elements));
}

bool FinSet::contains(Node n) const {
  return std::binary_search(elements_.begin(), elements_.end(), n);
}

FinSet FinSet::with(Node n) const {
  std::vector<Node> out = elements_;
  out.push_back(n);
  return from_unsorted(std::move(out));
}

bool FinSet::is_subset_of(const FinSet& other) const {
  return std::includes(other.begin(), other.end(), begin(), end());
}

bool successive(const FinSet& s, const FinSet& t) {
  return s.empty() || t.empty() || s.max() < t.min();
}

namespace {

// Greedy decomposition: cutting the longest S_{r-1} prefix each time gives
// the fewest pieces because S_{r-1} is hereditary.
class MembershipSolver {
 public:
  explicit MembershipSolver(std::span<const Node> elements) : elems_(elements) {}

  bool member(std::size_t begin, std::size_t end, unsigned rank) {
    std::size_t len = end - begin;
    if (len == 0) return true;
    if (len == 1) return true;
    if (rank == 0) return false;
    if (len <= elems_[begin]) return true;  // already in S_1
    auto key = std::make_tuple(begin, end, rank);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    Node budget = elems_[begin];
    Node pieces = 0;
    std::size_t i = begin;
    bool ok = true;
    while (i < end) {
      std::size_t j = i + 1;
      while (j < end && member(i, j + 1, rank - 1)) ++j;
      ++pieces;
      if (pieces > budget) {
        ok = false;
        break;
      }
      i = j;
    }
    memo_.emplace(key, ok);
    return ok;
  }

 private:
  std::span<const Node> elems_;
  std::map<std::tuple<std::size_t, std::size_t, unsigned>, bool> memo_;
};

}  // namespace

bool schreier_member(std::span<const Node> elements, SchreierRank rank) {
  MembershipSolver solver(elements);
  return solver.member(0, elements.size(), rank.value);
}

bool schreier_maximal(const FinSet& set, SchreierRank rank) {
  if (!schreier_member(set, rank)) {
    throw std::invalid_argument("schreier_maximal: set is not a member of S_" +
                                std::to_string(rank.value));
  }
  // Membership of F u {k} for k > max F does not depend on k, and any larger
  // extension contains a one-point extension.
  Node next = set.empty() ? 1 : set.max() + 1;
  std::vector<Node> extended = set.elements();
  extended.push_back(next);
  return !schreier_member(std::span<const Node>(extended), rank);
}

std::optional<unsigned> schreier_rank_of(const FinSet& set, unsigned max_rank) {
  for (unsigned r = 0; r <= max_rank; ++r) {
    if (schreier_member(set, SchreierRank(r))) return r;
  }
  return std::nullopt;
}

namespace {

class MaxMassSolver {
 public:
  MaxMassSolver(std::vector<Node> nodes, std::vector<Rational> weights)
      : nodes_(std::move(nodes)), weights_(std::move(weights)) {}

  struct Best {
    Rational mass;
    std::vector<std::size_t> picks;
  };

  // Best S_rank subset of positions [i, e).
  const Best& single(unsigned rank, std::size_t i, std::size_t e) {
    auto key = std::make_tuple(rank, i, e);
    if (auto it = single_memo_.find(key); it != single_memo_.end()) return it->second;
    Best best{Rational(0), {}};
    if (rank == 0) {
      for (std::size_t a = i; a < e; ++a) {
        if (weights_[a] > best.mass) best = Best{weights_[a], {a}};
      }
    } else {
      for (std::size_t a = i; a < e; ++a) {
        std::size_t budget = static_cast<std::size_t>(std::min<Node>(nodes_[a], e - a));
        const Best& cand = blocks(rank - 1, a, e, budget);
        if (cand.mass > best.mass) best = cand;
      }
    }
    return single_memo_.emplace(key, std::move(best)).first->second;
  }

  // Best union of at most k successive S_rank sets inside [a, e).
  const Best& blocks(unsigned rank, std::size_t a, std::size_t e, std::size_t k) {
    auto key = std::make_tuple(rank, a, e, k);
    if (auto it = block_memo_.find(key); it != block_memo_.end()) return it->second;
    Best best{Rational(0), {}};
    if (k > 0 && a < e) {
      for (std::size_t b = a + 1; b <= e; ++b) {
        const Best& head = single(rank, a, b);
        if (head.mass == 0) continue;
        const Best& tail = blocks(rank, b, e, std::min(k - 1, e - b));
        Rational total = head.mass + tail.mass;
        if (total > best.mass) {
          best.mass = total;
          best.picks = head.picks;
          best.picks.insert(best.picks.end(), tail.picks.begin(), tail.picks.end());
        }
      }
    }
    return block_memo_.emplace(key, std::move(best)).first->second;
  }

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
  std::vector<Rational> weights_;
  std::map<std::tuple<unsigned, std::size_t, std::size_t>, Best> single_memo_;
  std::map<std::tuple<unsigned, std::size_t, std::size_t, std::size_t>, Best> block_memo_;
};

}  // namespace

MassSelection max_mass_selection(const Weights& weights, SchreierRank rank) {
  std::vector<Node> nodes;
  std::vector<Rational> values;
  for (const auto& [n, w] : weights) {
    if (w < 0) throw std::invalid_argument("max_mass: negative weight");
    if (w == 0) continue;
    nodes.push_back(n);
    values.push_back(w);
  }
  if (rank.value == 1) {
    // min element a, then the a - 1 heaviest weights after it
    Rational best_mass = 0;
    std::vector<Node> best_set;
    std::vector<std::size_t> order;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      order.clear();
      for (std::size_t b = a + 1; b < nodes.size(); ++b) order.push_back(b);
      const std::size_t take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(nodes[a] - 1));
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                        [&](std::size_t x, std::size_t y) { return values[x] > values[y] || (values[x] == values[y] && x < y); });
      Rational mass = values[a];
      for (std::size_t t = 0; t < take; ++t) mass += values[order[t]];
      if (mass > best_mass) {
        best_mass = mass;
        best_set = {nodes[a]};
        for (std::size_t t = 0; t < take; ++t) best_set.push_back(nodes[order[t]]);
      }
    }
    return MassSelection{best_mass, FinSet::from_unsorted(std::move(best_set))};
  }
  MaxMassSolver solver(nodes, values);
  const auto& best = solver.single(rank.value, 0, nodes.size());
  std::vector<Node> picked;
  for (std::size_t p : best.picks) picked.push_back(nodes[p]);
  return MassSelection{best.mass, FinSet(std::move(picked))};
}

}  // namespace bspace
