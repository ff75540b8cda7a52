#pragma once

#include "bspace/ess_tree.hpp"
#include "bspace/finvec.hpp"
#include "bspace/functional.hpp"
#include "bspace/interval.hpp"
#include "bspace/surd.hpp"
#include "bspace/tree.hpp"

#include <json.hpp>

#include <optional>
#include <set>

namespace bspace {

// Exact value when available, always with a certified enclosure.
struct NormValue {
  std::optional<Surd> exact;
  Interval enclosure;

  static NormValue of(const Surd& v);
  static NormValue of(const Interval& v);
  double approx() const { return enclosure.midpoint(); }
  nlohmann::json to_json() const;
};

struct NormStats {
  std::uint64_t nodes_explored = 0;
  std::uint64_t relaxations = 0;
  std::string method;
};

struct NormResult {
  NormValue value;
  Functional witness;
  NormStats stats;
};

nlohmann::json norm_result_to_json(const NormResult& r);

// sup over the ground set. Segment-based kinds need `tree`.
NormResult ground_norm(const FinVec& x, const GroundKind& kind, const TreeXi* tree = nullptr);

// Norm of the Tsirelson extension W_G of the ground set (no constraint on leaves).
NormResult wg_norm(const FinVec& x, const GroundKind& kind, const TreeXi* tree = nullptr);

struct TincOptions {
  // Supports that form a chain admit a single leaf only; answer directly.
  bool chain_shortcut = true;
};
NormResult tinc_norm(const FinVec& x, const TreeXi& tree, const TincOptions& options = {});

struct EssincOptions {
  // Weight indices that weighted leaves may not carry.
  std::set<std::size_t> excluded_weights;
};
NormResult essinc_norm(const FinVec& x, const SigmaRegistry& sigma, const EssincOptions& options = {});

enum class JtVariant { Signs, Sum };

// (sum_i ||S_i x||_r^p)^{1/p} maximized over pairwise disjoint segments;
// p = nullopt means p = infinity. 1 <= r <= p.
struct JtResult {
  NormValue value;
  std::optional<Rational> pth_power;  // exact sum_i ||S_i x||_r^p when rational
  std::vector<Segment> segments;
  Functional witness;                 // exact functional for r = 1, p = 2
  NormStats stats;
};
JtResult jt_norm(const FinVec& x, const TreeXi& tree, const Rational& r, const std::optional<Rational>& p,
                 JtVariant variant = JtVariant::Signs);
nlohmann::json jt_result_to_json(const JtResult& r);

}  // namespace bspace
