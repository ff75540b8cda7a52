#include "bspace/functional.hpp"

#include <functional>
#include <set>

namespace bspace {

std::string ground_tag_name(GroundTag tag) {
  switch (tag) {
    case GroundTag::G0: return "G0";
    case GroundTag::G1Signs: return "G1";
    case GroundTag::G2: return "G2";
    case GroundTag::Gp: return "Gp";
    case GroundTag::Gsum: return "Gsum";
    case GroundTag::G1Weighted: return "G1w";
  }
  return "?";
}

GroundTag ground_tag_from_name(const std::string& name) {
  for (auto t : {GroundTag::G0, GroundTag::G1Signs, GroundTag::G2, GroundTag::Gp, GroundTag::Gsum,
                 GroundTag::G1Weighted})
    if (ground_tag_name(t) == name) return t;
  throw std::invalid_argument("unknown ground kind '" + name + "'");
}

GroundKind GroundKind::gp(const Rational& q) {
  if (q <= 1) throw std::invalid_argument("Gp: q must exceed 1");
  return {GroundTag::Gp, q, std::nullopt};
}

GroundKind GroundKind::g1_weighted(EssParams params) {
  params.validate();
  return {GroundTag::G1Weighted, {}, std::move(params)};
}

bool GroundKind::needs_tree() const {
  return tag == GroundTag::G1Signs || tag == GroundTag::G2 || tag == GroundTag::Gp || tag == GroundTag::Gsum;
}

namespace {

void collect_depths(const AnalysisNode& node, std::size_t depth, std::vector<std::size_t>& out) {
  if (node.leaf) {
    if (*node.leaf < out.size()) out[*node.leaf] = depth;
    return;
  }
  for (const auto& c : node.children) collect_depths(c, depth + 1, out);
}

Rational dyadic(std::size_t k) {
  Rational r(1);
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  return r;
}

Surd leaf_value(const Leaf& leaf, const FinVec& x) {
  if (leaf.tag == GroundTag::Gp) throw std::logic_error("Gp leaves have no exact value; use evaluate_enclosure");
  Surd s;
  for (const auto& [n, c] : leaf.coeffs) {
    const Rational v = x[n];
    if (v != 0) s += c * v;
  }
  return s;
}

Interval leaf_enclosure(const Leaf& leaf, const FinVec& x) {
  if (leaf.tag != GroundTag::Gp) return leaf_value(leaf, x).enclose();
  const Rational p = leaf.q / (leaf.q - 1);
  Interval sum(Rational(0));
  for (Node n : leaf.support) {
    const Rational v = abs(x[n]);
    if (v != 0) sum = sum + Interval(v).pow(p);
  }
  if (sum.upper() == 0) return sum;
  Rational inv = 1 / p;
  inv.canonicalize();
  return sum.pow(inv);
}

}  // namespace

std::vector<std::size_t> Functional::depths() const {
  std::vector<std::size_t> d(leaves.size(), 0);
  if (analysis) collect_depths(*analysis, 0, d);
  return d;
}

FinSet Functional::support() const {
  std::vector<Node> all;
  for (const auto& l : leaves) all.insert(all.end(), l.support.begin(), l.support.end());
  return FinSet::from_unsorted(std::move(all));
}

Surd evaluate(const Functional& f, const FinVec& x) {
  const auto d = f.depths();
  Surd total;
  for (std::size_t i = 0; i < f.leaves.size(); ++i) {
    Surd v = leaf_value(f.leaves[i], x) * dyadic(d[i]);
    if (!f.scalars.empty()) v = v * f.scalars.at(i);
    total += v;
  }
  return total;
}

Interval evaluate_enclosure(const Functional& f, const FinVec& x) {
  const auto d = f.depths();
  Interval total(Rational(0));
  for (std::size_t i = 0; i < f.leaves.size(); ++i) {
    Interval v = leaf_enclosure(f.leaves[i], x) * Interval(dyadic(d[i]));
    if (!f.scalars.empty()) v = v * f.scalars.at(i).enclose();
    total = total + v;
  }
  return total;
}

namespace {

bool is_unit(const Surd& c) { return c == Surd(1) || c == Surd(-1); }

struct Verifier {
  const Functional& f;
  const NormingSpec& spec;
  VerifyReport report;

  void fail(const std::string& what) {
    report.ok = false;
    report.violations.push_back(what);
  }

  bool tree_ground(GroundTag t) const {
    return t == GroundTag::G1Signs || t == GroundTag::G2 || t == GroundTag::Gp || t == GroundTag::Gsum;
  }

  bool allowed_tag(GroundTag t) const {
    switch (spec.kind) {
      case NormingSetKind::Tinc: return t == GroundTag::G2 || t == GroundTag::G0;
      case NormingSetKind::Essinc: return t == GroundTag::G0 || t == GroundTag::G1Weighted;
      case NormingSetKind::JT: return t == GroundTag::G1Signs || t == GroundTag::Gsum || t == GroundTag::G0;
      case NormingSetKind::Ground:
      case NormingSetKind::WG:
        if (t == spec.ground.tag) return true;
        // e_n^* lies in every ground set built from segments
        return t == GroundTag::G0 && spec.ground.tag != GroundTag::G1Weighted;
    }
    return false;
  }

  void check_leaf(std::size_t i, const Leaf& leaf) {
    const std::string where = "leaf " + std::to_string(i) + ": ";
    if (!allowed_tag(leaf.tag)) {
      fail(where + "ground kind " + ground_tag_name(leaf.tag) + " not allowed here");
      return;
    }
    if (leaf.support.empty()) fail(where + "empty support");
    if (leaf.tag != GroundTag::Gp) {
      std::vector<Node> keys;
      for (const auto& kv : leaf.coeffs) {
        if (kv.second.is_zero()) fail(where + "zero coefficient stored");
        keys.push_back(kv.first);
      }
      if (FinSet(keys) != leaf.support) fail(where + "coefficients do not match the support");
    }
    if (tree_ground(leaf.tag)) {
      if (spec.tree == nullptr) {
        fail(where + "segment ground functional without a tree");
        return;
      }
      if (!leaf.segment || !spec.tree->is_segment(*leaf.segment)) {
        fail(where + "missing or invalid segment");
        return;
      }
      for (Node n : leaf.support)
        if (!leaf.segment->contains(n)) fail(where + "support leaves its segment");
    }
    switch (leaf.tag) {
      case GroundTag::G0:
        if (leaf.support.size() != 1 || !is_unit(leaf.coeffs.begin()->second)) fail(where + "not of the form +-e_n^*");
        break;
      case GroundTag::G1Signs:
      case GroundTag::Gsum: {
        if (leaf.segment && FinSet::from_unsorted(leaf.segment->nodes) != leaf.support)
          fail(where + "support must be the whole segment");
        std::set<int> signs;
        for (const auto& kv : leaf.coeffs) {
          if (!is_unit(kv.second)) fail(where + "coefficients must be +-1");
          signs.insert(kv.second.sign());
        }
        if (leaf.tag == GroundTag::Gsum && signs.size() > 1) fail(where + "Gsum coefficients must share one sign");
        break;
      }
      case GroundTag::G2: {
        Surd sq;
        for (const auto& kv : leaf.coeffs) sq += kv.second * kv.second;
        if (sq > Surd(1)) fail(where + "sum of squared coefficients exceeds 1");
        break;
      }
      case GroundTag::Gp:
        if (leaf.q <= 1) fail(where + "q must exceed 1");
        break;
      case GroundTag::G1Weighted: {
        const EssParams* params = nullptr;
        if (spec.sigma) params = &spec.sigma->params();
        else if (spec.ground.params) params = &*spec.ground.params;
        if (params == nullptr || leaf.weight >= params->size()) {
          fail(where + "weight index outside the parameter prefix");
          break;
        }
        const Surd w(params->inv_m(leaf.weight));
        for (const auto& kv : leaf.coeffs)
          if (kv.second != w && kv.second != -w) fail(where + "coefficients must be +-1/m_j");
        if (!schreier_member(leaf.support, SchreierRank{params->n[leaf.weight]}))
          fail(where + "support not in S_{n_j}");
        break;
      }
    }
  }

  // Returns the support of the subtree; records admissibility failures.
  FinSet check_analysis(const AnalysisNode& node, std::vector<int>& seen) {
    if (node.leaf) {
      if (*node.leaf >= f.leaves.size()) {
        fail("analysis references a missing leaf");
        return {};
      }
      ++seen[*node.leaf];
      return f.leaves[*node.leaf].support;
    }
    if (node.children.empty()) {
      fail("operation node without children");
      return {};
    }
    std::vector<FinSet> parts;
    for (const auto& c : node.children) parts.push_back(check_analysis(c, seen));
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
      if (!parts[i].empty() && !parts[i + 1].empty() && !(parts[i].max() < parts[i + 1].min()))
        fail("sibling supports are not successive");
    if (!parts.front().empty() && parts.size() > parts.front().min())
      fail("admissibility n <= min supp f_1 violated (n=" + std::to_string(parts.size()) + ")");
    std::vector<Node> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return FinSet::from_unsorted(std::move(all));
  }

  void check_constraint() {
    const auto& L = f.leaves;
    if (spec.kind == NormingSetKind::Tinc) {
      for (std::size_t a = 0; a < L.size(); ++a)
        for (std::size_t b = a + 1; b < L.size(); ++b) {
          if (!L[a].segment || !L[b].segment) continue;
          if (!segments_incomparable(*spec.tree, *L[a].segment, *L[b].segment))
            fail("leaf segments " + std::to_string(a) + " and " + std::to_string(b) + " are comparable");
        }
    } else if (spec.kind == NormingSetKind::Essinc) {
      if (spec.sigma == nullptr) {
        fail("essential incomparability needs the sigma registry");
        return;
      }
      for (std::size_t a = 0; a < L.size(); ++a)
        for (std::size_t b = 0; b < L.size(); ++b) {
          if (L[a].tag != GroundTag::G1Weighted || L[b].tag != GroundTag::G1Weighted) continue;
          if (!spec.sigma->weight_precedes(L[a].weight, L[b].weight)) continue;
          const SignFn* g = spec.sigma->ancestor_sign(L[a].weight, L[b].weight);
          if (g != nullptr && !g->empty() && !(g->max_support() < L[a].support.min()))
            fail("leaves " + std::to_string(a) + " and " + std::to_string(b) + " are not essentially incomparable");
        }
    } else if (spec.kind == NormingSetKind::JT) {
      std::set<Node> used;
      for (const auto& l : L)
        for (Node n : l.segment ? FinSet::from_unsorted(l.segment->nodes) : l.support)
          if (!used.insert(n).second) fail("JT segments are not pairwise disjoint");
      if (f.scalars.size() != L.size()) {
        fail("JT functional needs one scalar per leaf");
        return;
      }
      const Rational q = spec.p / (spec.p - 1);
      if (q == 2) {
        Surd s;
        for (const auto& b : f.scalars) s += b * b;
        if (s > Surd(1)) fail("sum |b_i|^q exceeds 1");
      } else {
        Interval s(Rational(0));
        for (const auto& b : f.scalars) {
          Interval e = b.enclose().abs();
          if (e.upper() > 0) s = s + e.pow(q);
        }
        if (Interval(Rational(1)).certainly_less(s)) fail("sum |b_i|^q exceeds 1");
      }
    }
  }

  void run() {
    for (std::size_t i = 0; i < f.leaves.size(); ++i) check_leaf(i, f.leaves[i]);
    const bool needs_analysis = spec.kind == NormingSetKind::WG || spec.kind == NormingSetKind::Tinc ||
                                spec.kind == NormingSetKind::Essinc;
    if (needs_analysis) {
      if (!f.analysis) {
        if (f.leaves.size() > 1) fail("several leaves without a tree analysis");
      } else {
        std::vector<int> seen(f.leaves.size(), 0);
        check_analysis(*f.analysis, seen);
        for (std::size_t i = 0; i < seen.size(); ++i)
          if (seen[i] != 1) fail("leaf " + std::to_string(i) + " appears " + std::to_string(seen[i]) + " times in the analysis");
      }
      if (!f.scalars.empty()) fail("scalars are only meaningful for JT functionals");
    } else if (spec.kind == NormingSetKind::Ground && f.leaves.size() != 1) {
      fail("a ground functional has exactly one leaf");
    }
    check_constraint();
  }
};

}  // namespace

VerifyReport verify_functional(const Functional& f, const NormingSpec& spec) {
  Verifier v{f, spec, {}};
  v.run();
  return v.report;
}

HeightWeight functional_height_weight(const Functional& f) {
  if (!f.analysis) {
    if (f.leaves.size() != 1) throw std::invalid_argument("functional_height_weight: no tree-analysis certificate");
  }
  HeightWeight hw;
  const auto d = f.depths();
  for (std::size_t i = 0; i < f.leaves.size(); ++i) {
    hw.height = std::max(hw.height, d[i]);
    if (f.leaves[i].tag == GroundTag::G1Weighted)
      hw.weights.emplace_back(f.leaves[i].weight);
    else
      hw.weights.emplace_back(std::nullopt);
  }
  return hw;
}

namespace {

std::optional<AnalysisNode> prune(const AnalysisNode& node, const std::vector<long>& remap) {
  if (node.leaf) {
    if (remap[*node.leaf] < 0) return std::nullopt;
    return AnalysisNode{static_cast<std::size_t>(remap[*node.leaf]), {}};
  }
  AnalysisNode out;
  for (const auto& c : node.children)
    if (auto p = prune(c, remap)) out.children.push_back(std::move(*p));
  if (out.children.empty()) return std::nullopt;
  return out;
}

void shift(AnalysisNode& node, std::size_t offset) {
  if (node.leaf) *node.leaf += offset;
  for (auto& c : node.children) shift(c, offset);
}

}  // namespace

Functional restrict_leaves(const Functional& f, const std::vector<std::size_t>& keep) {
  std::vector<long> remap(f.leaves.size(), -1);
  Functional out;
  for (std::size_t i : std::set<std::size_t>(keep.begin(), keep.end())) {
    if (i >= f.leaves.size()) throw std::out_of_range("restrict_leaves: leaf index");
    remap[i] = static_cast<long>(out.leaves.size());
    out.leaves.push_back(f.leaves[i]);
    if (!f.scalars.empty()) out.scalars.push_back(f.scalars[i]);
  }
  if (f.analysis) out.analysis = prune(*f.analysis, remap);
  return out;
}

Functional half_sum(const std::vector<Functional>& parts) {
  Functional out;
  AnalysisNode root;
  for (const auto& part : parts) {
    const std::size_t offset = out.leaves.size();
    out.leaves.insert(out.leaves.end(), part.leaves.begin(), part.leaves.end());
    AnalysisNode child;
    if (part.analysis)
      child = *part.analysis;
    else if (part.leaves.size() == 1)
      child.leaf = 0;
    else
      throw std::invalid_argument("half_sum: part without a certificate");
    shift(child, offset);
    root.children.push_back(std::move(child));
  }
  out.analysis = std::move(root);
  return out;
}

Functional unit_functional(Node n) {
  Functional f;
  Leaf l;
  l.tag = GroundTag::G0;
  l.coeffs[n] = Surd(1);
  l.support = FinSet{n};
  l.segment = Segment{{n}};
  f.leaves.push_back(std::move(l));
  f.analysis = AnalysisNode{0, {}};
  return f;
}

namespace {

nlohmann::json analysis_to_json(const AnalysisNode& node) {
  if (node.leaf) return *node.leaf;
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : node.children) a.push_back(analysis_to_json(c));
  return a;
}

}  // namespace

nlohmann::json functional_to_json(const Functional& f) {
  nlohmann::json leaves = nlohmann::json::array();
  const auto d = f.depths();
  for (std::size_t i = 0; i < f.leaves.size(); ++i) {
    const auto& l = f.leaves[i];
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& [n, c] : l.coeffs) coeffs.push_back({n, c.to_string()});
    nlohmann::json jl{{"kind", ground_tag_name(l.tag)},
                      {"support", l.support.elements()},
                      {"coeffs", coeffs},
                      {"depth", d[i]}};
    if (l.segment) jl["segment"] = l.segment->nodes;
    if (l.tag == GroundTag::G1Weighted) jl["weight_index"] = l.weight;
    if (l.tag == GroundTag::Gp) jl["q"] = to_string(l.q);
    if (!f.scalars.empty()) jl["scalar"] = f.scalars[i].to_string();
    leaves.push_back(std::move(jl));
  }
  nlohmann::json out{{"leaves", leaves}};
  out["analysis"] = f.analysis ? analysis_to_json(*f.analysis) : nlohmann::json(nullptr);
  return out;
}

}  // namespace bspace
