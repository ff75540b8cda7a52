#pragma once

#include "bspace/ess_tree.hpp"
#include "bspace/finvec.hpp"
#include "bspace/interval.hpp"
#include "bspace/surd.hpp"
#include "bspace/tree.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bspace {

enum class GroundTag { G0, G1Signs, G2, Gp, Gsum, G1Weighted };

std::string ground_tag_name(GroundTag tag);
GroundTag ground_tag_from_name(const std::string& name);

// G0 = {+-e_n^*}; G1Signs, G2, Gp, Gsum live on segments of a TreeXi;
// G1Weighted = {m_j^{-1} sum g(n) e_n^* : supp g in S_{n_j}}.
struct GroundKind {
  GroundTag tag = GroundTag::G0;
  Rational q;                       // Gp: sum |b_i|^q <= 1, q > 1
  std::optional<EssParams> params;  // G1Weighted

  static GroundKind g0() { return {GroundTag::G0, {}, std::nullopt}; }
  static GroundKind g1_signs() { return {GroundTag::G1Signs, {}, std::nullopt}; }
  static GroundKind g2() { return {GroundTag::G2, {}, std::nullopt}; }
  static GroundKind gp(const Rational& q);
  static GroundKind gsum() { return {GroundTag::Gsum, {}, std::nullopt}; }
  static GroundKind g1_weighted(EssParams params);

  bool needs_tree() const;
};

// One ground functional of a tree analysis.
struct Leaf {
  GroundTag tag = GroundTag::G0;
  // Coefficients of the ground functional. Gp leaves keep them empty: such a
  // leaf is the functional norming x on `support` (see `q`).
  std::map<Node, Surd> coeffs;
  FinSet support;
  std::optional<Segment> segment;  // certificate segment for tree grounds
  std::size_t weight = 0;          // G1Weighted: index j of m_j
  Rational q;                      // Gp
};

// Tree analysis: maximal nodes point at a leaf, the others are
// (S,1/2)-operations over their children listed in increasing support order.
struct AnalysisNode {
  std::optional<std::size_t> leaf;
  std::vector<AnalysisNode> children;
};

struct Functional {
  std::vector<Leaf> leaves;
  std::optional<AnalysisNode> analysis;
  // Scalars b_i for combinations sum b_i f_i (JT norming sets); empty means
  // the tree-analysis form sum f_alpha / 2^{k_alpha}.
  std::vector<Surd> scalars;

  // k_alpha for every leaf (0 without a certificate).
  std::vector<std::size_t> depths() const;
  FinSet support() const;
};

// Exact value f(x); throws std::logic_error for Gp leaves (use evaluate_enclosure).
Surd evaluate(const Functional& f, const FinVec& x);
Interval evaluate_enclosure(const Functional& f, const FinVec& x);

enum class NormingSetKind { Ground, WG, Tinc, Essinc, JT };

struct NormingSpec {
  NormingSetKind kind = NormingSetKind::WG;
  GroundKind ground;
  const TreeXi* tree = nullptr;
  const SigmaRegistry* sigma = nullptr;  // Essinc
  Rational p;                             // JT: exponent; q = p/(p-1)
};

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> violations;
  explicit operator bool() const { return ok; }
};

VerifyReport verify_functional(const Functional& f, const NormingSpec& spec);

struct HeightWeight {
  std::size_t height = 0;
  std::vector<std::optional<std::size_t>> weights;  // per leaf; nullopt for unweighted leaves
};
// Throws std::invalid_argument without a certificate.
HeightWeight functional_height_weight(const Functional& f);

// Keeps only the listed leaves (by index), preserving their depths.
Functional restrict_leaves(const Functional& f, const std::vector<std::size_t>& keep);

// The functional (1/2)(g_1 + ... + g_n) with certificates combined.
Functional half_sum(const std::vector<Functional>& parts);

// Ground functional e_n^*.
Functional unit_functional(Node n);

nlohmann::json functional_to_json(const Functional& f);

}  // namespace bspace
