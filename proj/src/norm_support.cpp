#include "norm_support.hpp"

#include <algorithm>

namespace bspace::detail {

Rational dyadic(std::size_t k) {
  Rational r(1);
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  return r;
}

template <>
Interval leaf_value<Interval>(const CandLeaf& c, const Rational&) {
  if (c.enclosure) return *c.enclosure;
  if (c.tag == GroundTag::G2) return Interval(c.score).sqrt();
  return Interval(c.score);
}

Support::Support(const FinVec& v, const TreeXi* tree) {
  for (const auto& [n, val] : v.coords()) {
    if (tree != nullptr && !tree->has_node(n))
      throw std::out_of_range("vector coordinate " + std::to_string(n) + " outside the tree truncation");
    nodes.push_back(n);
    x.push_back(val);
    ax.push_back(abs(val));
  }
  const std::size_t n = nodes.size();
  prec.assign(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      if (a == b)
        prec[a][b] = 1;
      else if (tree != nullptr)
        prec[a][b] = tree->precedes(nodes[a], nodes[b]) ? 1 : 0;
    }
}

bool Support::is_chain() const {
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b = a + 1; b < size(); ++b)
      if (!prec[a][b]) return false;
  return true;
}

LeafFinder::LeafFinder(const Support& s, const GroundKind& kind, const TreeXi* tree)
    : s_(s), kind_(kind), tree_(tree) {
  if (kind.needs_tree() && tree == nullptr)
    throw std::invalid_argument("ground kind " + ground_tag_name(kind.tag) + " needs a tree");
  if (kind.tag == GroundTag::Gp) {
    p_dual_ = kind.q / (kind.q - 1);
    p_dual_.canonicalize();
  }
  if (kind.tag == GroundTag::G1Weighted) {
    params_ = &*kind_.params;
    with_g0_ = false;
  }
}

bool LeafFinder::better(const CandLeaf& a, const CandLeaf& b) const {
  if (a.enclosure && b.enclosure) return a.enclosure->midpoint() > b.enclosure->midpoint();
  // G2 scores are squared values; mixing them with plain values compares v^2
  auto val2 = [](const CandLeaf& c) { return c.tag == GroundTag::G2 ? c.score : Rational(c.score * c.score); };
  return val2(a) > val2(b);
}

std::optional<CandLeaf> LeafFinder::best(std::size_t i, std::size_t j) const {
  std::optional<CandLeaf> out;
  auto offer = [&](std::optional<CandLeaf> c) {
    if (c && (!out || better(*c, *out))) out = std::move(c);
  };
  switch (kind_.tag) {
    case GroundTag::G0: offer(best_g0(i, j)); break;
    case GroundTag::G1Signs:
    case GroundTag::G2:
    case GroundTag::Gp: offer(best_chain(i, j, kind_.tag)); break;
    case GroundTag::Gsum: offer(best_sum(i, j)); break;
    case GroundTag::G1Weighted: break;
  }
  if (params_ != nullptr) {
    if (with_g0_) offer(best_g0(i, j));
    offer(best_weighted(i, j));
  }
  return out;
}

std::optional<CandLeaf> LeafFinder::best_g0(std::size_t i, std::size_t j) const {
  std::optional<CandLeaf> out;
  for (std::size_t p = i; p <= j; ++p) {
    if (constraints_ && !constraints_->excluded.empty() && constraints_->excluded[p]) continue;
    if (!out || s_.ax[p] > out->score) {
      out = CandLeaf{};
      out->tag = GroundTag::G0;
      out->pos = {p};
      out->score = s_.ax[p];
    }
  }
  return out;
}

std::optional<CandLeaf> LeafFinder::best_chain(std::size_t i, std::size_t j, GroundTag tag) const {
  std::optional<CandLeaf> out;
  const bool constrained = constraints_ != nullptr && !constraints_->excluded.empty();
  std::vector<char> in(s_.size(), 0);
  for (std::size_t b = i; b <= j; ++b) {
    if (constrained && constraints_->excluded[b]) continue;
    std::fill(in.begin(), in.end(), 0);
    for (std::size_t p = i; p <= b; ++p)
      if (s_.prec[p][b] && !(constrained && constraints_->excluded[p])) in[p] = 1;
    if (constrained) {
      for (std::size_t u = 0; u < s_.size(); ++u) {
        if (!constraints_->anchored[u] || in[u]) continue;
        for (std::size_t p = i; p <= b; ++p)
          if (in[p] && s_.comparable(p, u)) in[p] = 0;
      }
    }
    CandLeaf c;
    c.tag = tag;
    Rational score = 0;
    for (std::size_t p = i; p <= b; ++p)
      if (in[p]) {
        c.pos.push_back(p);
        score += tag == GroundTag::G2 ? Rational(s_.x[p] * s_.x[p]) : s_.ax[p];
      }
    if (c.pos.empty()) continue;
    if (tag == GroundTag::Gp) {
      Interval sum(Rational(0));
      for (std::size_t p : c.pos) sum = sum + Interval(s_.ax[p]).pow(p_dual_);
      Rational inv = 1 / p_dual_;
      inv.canonicalize();
      c.enclosure = sum.pow(inv);
    }
    c.score = score;
    if (!out || better(c, *out)) out = std::move(c);
  }
  return out;
}

std::optional<CandLeaf> LeafFinder::best_sum(std::size_t i, std::size_t j) const {
  std::optional<CandLeaf> out;
  for (std::size_t t = i; t <= j; ++t)
    for (std::size_t b = t; b <= j; ++b) {
      if (!s_.prec[t][b]) continue;
      CandLeaf c;
      c.tag = GroundTag::Gsum;
      Rational sum = 0;
      for (std::size_t p = t; p <= b; ++p)
        if (s_.prec[t][p] && s_.prec[p][b]) {
          c.pos.push_back(p);
          sum += s_.x[p];
        }
      c.negative = sum < 0;
      c.score = abs(sum);
      if (c.score != 0 && (!out || c.score > out->score)) out = std::move(c);
    }
  return out;
}

std::optional<CandLeaf> LeafFinder::best_weighted(std::size_t i, std::size_t j) const {
  std::optional<CandLeaf> out;
  for (std::size_t w = 0; w < params_->size(); ++w) {
    Node floor = 0;
    if (constraints_ != nullptr) {
      if (constraints_->banned_weights.count(w)) continue;
      if (auto it = constraints_->weight_floor.find(w); it != constraints_->weight_floor.end()) floor = it->second;
    }
    Weights weights;
    for (std::size_t p = i; p <= j; ++p)
      if (s_.nodes[p] > floor) weights[s_.nodes[p]] = s_.ax[p];
    if (weights.empty()) continue;
    auto sel = max_mass_selection(weights, SchreierRank{params_->n[w]});
    if (sel.set.empty()) continue;
    CandLeaf c;
    c.tag = GroundTag::G1Weighted;
    c.weight = w;
    c.score = sel.mass * params_->inv_m(w);
    for (Node n : sel.set)
      c.pos.push_back(static_cast<std::size_t>(std::lower_bound(s_.nodes.begin(), s_.nodes.end(), n) - s_.nodes.begin()));
    if (!out || c.score > out->score) out = std::move(c);
  }
  return out;
}

namespace {
Surd sign_of(const Rational& v) { return Surd(v < 0 ? -1 : 1); }
}  // namespace

Leaf make_leaf(const CandLeaf& c, const Support& s, const TreeXi* tree, const EssParams* params,
               const Rational& q) {
  Leaf leaf;
  leaf.tag = c.tag;
  std::vector<Node> nodes;
  for (std::size_t p : c.pos) nodes.push_back(s.nodes[p]);
  switch (c.tag) {
    case GroundTag::G0:
      leaf.coeffs[nodes[0]] = sign_of(s.x[c.pos[0]]);
      leaf.support = FinSet{nodes[0]};
      if (tree) leaf.segment = Segment{{nodes[0]}};
      break;
    case GroundTag::G2: {
      const Surd root = Surd::sqrt(c.score);
      for (std::size_t p : c.pos) {
        Rational factor = s.x[p] / c.score;
        factor.canonicalize();
        leaf.coeffs[s.nodes[p]] = root * factor;
      }
      leaf.support = FinSet(nodes);
      leaf.segment = tree->segment(nodes.front(), nodes.back());
      break;
    }
    case GroundTag::Gp:
      leaf.support = FinSet(nodes);
      leaf.segment = tree->segment(nodes.front(), nodes.back());
      leaf.q = q;
      break;
    case GroundTag::G1Signs:
    case GroundTag::Gsum: {
      leaf.segment = tree->segment(nodes.front(), nodes.back());
      for (Node n : leaf.segment->nodes) {
        Surd e(1);
        if (c.tag == GroundTag::Gsum) {
          e = Surd(c.negative ? -1 : 1);
        } else {
          auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), n);
          if (it != s.nodes.end() && *it == n) e = sign_of(s.x[static_cast<std::size_t>(it - s.nodes.begin())]);
        }
        leaf.coeffs[n] = e;
      }
      leaf.support = FinSet::from_unsorted(leaf.segment->nodes);
      break;
    }
    case GroundTag::G1Weighted: {
      const Rational inv = params->inv_m(c.weight);
      for (std::size_t p : c.pos) leaf.coeffs[s.nodes[p]] = Surd(s.x[p] < 0 ? Rational(-inv) : inv);
      leaf.support = FinSet(nodes);
      leaf.weight = c.weight;
      break;
    }
  }
  return leaf;
}

void shape_leaves(const AnalysisNode& shape, std::vector<std::size_t>& out) {
  if (shape.leaf) {
    out.push_back(*shape.leaf);
    return;
  }
  for (const auto& c : shape.children) shape_leaves(c, out);
}

namespace {
AnalysisNode renumber(const AnalysisNode& shape, std::size_t& next) {
  if (shape.leaf) return AnalysisNode{next++, {}};
  AnalysisNode out;
  for (const auto& c : shape.children) out.children.push_back(renumber(c, next));
  return out;
}
}  // namespace

Functional to_functional(const AnalysisNode& shape, const std::vector<CandLeaf>& table, const Support& s,
                         const TreeXi* tree, const EssParams* params, const Rational& q) {
  Functional f;
  std::vector<std::size_t> ids;
  shape_leaves(shape, ids);
  for (std::size_t id : ids) f.leaves.push_back(make_leaf(table[id], s, tree, params, q));
  std::size_t next = 0;
  f.analysis = renumber(shape, next);
  return f;
}

}  // namespace bspace::detail
