#include "bspace/experiments.hpp"

#include <algorithm>
#include <stdexcept>

namespace bspace {

namespace {

Node smallest_long_root(const TreeXi& tree, Node above, unsigned n) {
  // roots are the powers of two
  Node r = 1;
  while (r <= above || tree.guaranteed_branch_length(r) < n) {
    if (r > (Node{1} << 62)) throw std::overflow_error("no root found below 2^63");
    r <<= 1U;
  }
  return r;
}

Node smallest_child_above(const TreeXi& tree, Node node, Node cutoff) {
  for (Node c : tree.children(node))
    if (c > cutoff) return c;
  auto cls = tree.phi_class(node);
  if (!cls) throw std::logic_error("segment-follower: branch ended before n turns");
  const Node need = next_in_class(*cls, std::max(node, cutoff));
  throw TruncationTooSmall("truncation too small: V needs node " + std::to_string(need) + ", rerun with n_max >= " +
                               std::to_string(need),
                           need);
}

}  // namespace

GameTranscript simulate_game(unsigned n, const TreeXi& tree, const GameOptions& options) {
  if (n == 0) throw std::invalid_argument("game: n must be positive");
  if (options.strategy_s != "tail-subspace")
    throw std::invalid_argument("game: unknown strategy for S '" + options.strategy_s + "'");
  if (options.strategy_v != "segment-follower")
    throw std::invalid_argument("game: unknown strategy for V '" + options.strategy_v + "'");
  if (options.space == GameSpace::Jt && (!options.p || *options.p <= 1))
    throw std::invalid_argument("game: JT needs p > 1");

  GameTranscript t;
  t.space = options.space;
  t.n = n;
  t.p = options.space == GameSpace::Jt ? options.p : std::nullopt;
  t.claimed_c = options.claimed_c;
  t.strategy_s = options.strategy_s;
  t.strategy_v = options.strategy_v;

  Node cutoff = n;
  for (unsigned k = 0; k < n; ++k) {
    Node pick = 0;
    if (k == 0) {
      pick = smallest_long_root(tree, cutoff, n);
      if (!tree.has_node(pick))
        throw TruncationTooSmall("truncation too small: V needs root " + std::to_string(pick) +
                                     ", rerun with n_max >= " + std::to_string(pick),
                                 pick);
    } else {
      pick = smallest_child_above(tree, t.turns.back().node, cutoff);
    }
    t.turns.push_back(GameTurn{cutoff, pick});
    cutoff = pick;
  }

  Segment seg;
  FinVec sum;
  for (const auto& turn : t.turns) {
    seg.nodes.push_back(turn.node);
    sum.set(turn.node, 1);
  }
  t.is_segment = tree.is_segment(seg);

  const Rational nn(n);
  if (options.space == GameSpace::Tinc) {
    Rational inv = Rational(1) / nn;
    t.value = tinc_norm(sum * inv, tree).value;
    t.predicted = NormValue::of(Surd::sqrt(inv));
  } else {
    const Rational& p = *options.p;
    auto jt = jt_norm(sum, tree, Rational(1), p);
    Rational inv_p = Rational(1) / p;
    Rational inv_q = 1 - inv_p;
    if (p == 2 && jt.value.exact) {
      t.value = NormValue::of(*jt.value.exact * Surd::sqrt(Rational(1) / nn));
      t.predicted = NormValue::of(Surd::sqrt(nn));
    } else {
      t.value = NormValue::of(jt.value.enclosure * Interval(Rational(1) / nn).pow(inv_p));
      t.predicted = NormValue::of(Interval(nn).pow(inv_q));
    }
  }
  if (t.value.exact && t.predicted.exact)
    t.matches_prediction = *t.value.exact == *t.predicted.exact;
  else
    t.matches_prediction = t.value.enclosure.overlaps(t.predicted.enclosure);
  if (options.claimed_c) {
    const Interval c(*options.claimed_c);
    if (t.value.exact)
      t.s_wins = *t.value.exact > Surd(*options.claimed_c);
    else if (c.certainly_less(t.value.enclosure))
      t.s_wins = true;
    else if (t.value.enclosure.certainly_leq(c))
      t.s_wins = false;
  }
  return t;
}

nlohmann::json game_to_json(const GameTranscript& t) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& turn : t.turns) turns.push_back({{"cutoff", turn.cutoff}, {"node", turn.node}});
  nlohmann::json j{{"space", t.space == GameSpace::Tinc ? "tinc" : "jt"},
                   {"n", t.n},
                   {"strategy_s", t.strategy_s},
                   {"strategy_v", t.strategy_v},
                   {"turns", std::move(turns)},
                   {"is_segment", t.is_segment},
                   {"value", t.value.to_json()},
                   {"predicted", t.predicted.to_json()},
                   {"matches_prediction", t.matches_prediction}};
  if (t.p) j["p"] = to_string(*t.p);
  if (t.claimed_c) j["claimed_c"] = to_string(*t.claimed_c);
  if (t.s_wins) j["s_wins"] = *t.s_wins;
  return j;
}

BlockFamilyCheck check_block_family(const std::vector<std::vector<FinVec>>& blocks, const TreeXi& tree,
                                    const Rational& p, const Rational& eps, const std::vector<Rational>& eps_seq) {
  if (eps_seq.size() != blocks.size())
    throw std::invalid_argument("block family: eps_seq needs one entry per family (" +
                                std::to_string(blocks.size()) + ")");
  for (std::size_t j = 0; j < eps_seq.size(); ++j) {
    if (eps_seq[j] <= 0) throw std::invalid_argument("block family: eps_seq must be positive");
    if (j > 0 && eps_seq[j] > eps_seq[j - 1]) throw std::invalid_argument("block family: eps_seq must decrease");
  }

  BlockFamilyCheck out;
  Node prev_max = 0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].empty()) throw std::invalid_argument("block family: F_" + std::to_string(j + 1) + " is empty");
    Node lo = 0;
    Node hi = 0;
    for (const auto& x : blocks[j]) {
      if (x.empty()) throw std::invalid_argument("block family: zero vector in F_" + std::to_string(j + 1));
      auto v = jt_norm(x, tree, Rational(1), p).value;
      const bool one = v.exact ? *v.exact == Surd(1) : v.enclosure.contains(Rational(1)) && v.enclosure.width() < 1e-30;
      if (!one) throw std::invalid_argument("block family: non-normalized vector in F_" + std::to_string(j + 1));
      auto s = x.support();
      lo = lo == 0 ? s.min() : std::min(lo, s.min());
      hi = std::max(hi, s.max());
    }
    if (lo <= prev_max) throw std::invalid_argument("block family: F_" + std::to_string(j + 1) + " is not past F_" + std::to_string(j));
    out.maxima.push_back(hi);
    prev_max = hi;
  }

  // (ii), with r(F_j) = M(F_j) - M(F_{j-1})
  Rational total = 0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    Rational tail = 0;
    for (std::size_t i = j; i < blocks.size(); ++i) tail += Rational(static_cast<long>(i + 2)) * eps_seq[i];
    const Node r = out.maxima[j] - (j == 0 ? 0 : out.maxima[j - 1]);
    total += Rational(static_cast<unsigned long>(r)) * tail;
  }
  out.tail_sum = total;
  out.item_ii = total < eps;

  // (i): sup over f in G_1 with supp f = S of |f(x)| is ||x|_S||_1 and grows
  // with S, so the root-to-b chains through support nodes b are the only
  // segments to inspect.
  std::vector<Node> bottoms;
  for (const auto& fam : blocks)
    for (const auto& x : fam)
      for (const auto& [node, v] : x.coords()) bottoms.push_back(node);
  std::sort(bottoms.begin(), bottoms.end());
  bottoms.erase(std::unique(bottoms.begin(), bottoms.end()), bottoms.end());

  for (std::size_t j = 0; j < blocks.size() && out.item_i; ++j) {
    for (Node b : bottoms) {
      auto chain = tree.chain(b);
      if (chain.front() > out.maxima[j]) continue;
      std::size_t hits = 0;
      for (std::size_t k = j + 1; k < blocks.size(); ++k) {
        bool hit = false;
        for (const auto& x : blocks[k]) {
          Rational mass = 0;
          for (Node c : chain) mass += abs(x[c]);
          if (mass >= eps_seq[j]) {
            hit = true;
            break;
          }
        }
        hits += hit ? 1 : 0;
      }
      if (hits > 1) {
        out.item_i = false;
        out.failing_block = j + 1;
        out.failing_segment = Segment{std::vector<Node>(chain.begin(), chain.end())};
        break;
      }
    }
  }
  return out;
}

}  // namespace bspace
