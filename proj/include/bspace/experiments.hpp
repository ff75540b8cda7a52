#pragma once

#include "bspace/measures.hpp"
#include "bspace/norms.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bspace {

// ---- the game G(n, p, C) ----

enum class GameSpace { Tinc, Jt };

// V cannot answer inside the truncation.
class TruncationTooSmall : public Infeasible {
 public:
  TruncationTooSmall(const std::string& what, Node required) : Infeasible(what), required_(required) {}
  Node required_n_max() const { return required_; }

 private:
  Node required_;
};

struct GameTurn {
  Node cutoff = 0;  // S: the tail subspace [e_k : k > cutoff]
  Node node = 0;    // V: the unit vector e_node
};

struct GameTranscript {
  GameSpace space = GameSpace::Tinc;
  unsigned n = 0;
  std::optional<Rational> p;            // JT only
  std::optional<Rational> claimed_c;
  std::string strategy_s;
  std::string strategy_v;
  std::vector<GameTurn> turns;
  bool is_segment = false;
  // Tinc: ||(1/n) sum e_{j_k}||.  JT: ||n^{-1/p} sum e_{j_k}||.
  NormValue value;
  NormValue predicted;                  // n^{-1/2} or n^{1/q}
  bool matches_prediction = false;
  std::optional<bool> s_wins;           // value > C, when C is given
};

struct GameOptions {
  GameSpace space = GameSpace::Tinc;
  std::optional<Rational> p;  // required for JT, p > 1
  std::optional<Rational> claimed_c;
  std::string strategy_s = "tail-subspace";
  std::string strategy_v = "segment-follower";
};

// Throws std::invalid_argument for unknown strategies or bad parameters and
// TruncationTooSmall when V runs out of nodes.
GameTranscript simulate_game(unsigned n, const TreeXi& tree, const GameOptions& options = {});
nlohmann::json game_to_json(const GameTranscript& t);

// ---- block families in JT ----

struct BlockFamilyCheck {
  bool item_i = true;
  bool item_ii = true;
  Rational tail_sum;                    // sum_j r(F_j) sum_{i>=j} (i+1) eps_i
  std::vector<Node> maxima;             // M(F_j)
  // First failure of (i): block index j (1-based) and the offending segment.
  std::optional<std::size_t> failing_block;
  std::optional<Segment> failing_segment;

  bool holds() const { return item_i && item_ii; }
};

// Families are F_1, F_2, ...; eps_seq has one entry per family. Throws
// std::invalid_argument unless every member has jt_norm (r = 1, exponent p)
// equal to 1, the family is block and eps_seq is positive and decreasing.
BlockFamilyCheck check_block_family(const std::vector<std::vector<FinVec>>& blocks, const TreeXi& tree,
                                    const Rational& p, const Rational& eps, const std::vector<Rational>& eps_seq);

// ---- experiment registry ----

struct Claim {
  std::string name;
  std::string tag;        // PAPER, DERIVED or TRIVIAL
  std::string value;
  std::string expected;
  std::string tolerance;  // "exact" or a bound
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json params;
  bool toy = false;
  std::vector<Claim> claims;
  double runtime_ms = 0;

  bool pass() const;
};

// Runtime is left out unless asked for, so reports compare bit for bit.
nlohmann::json report_to_json(const ExperimentReport& r, bool with_runtime = false);
std::string report_to_csv(const ExperimentReport& r);

std::vector<std::string> experiment_names();
// Throws std::invalid_argument for unknown names and Infeasible for
// parameters beyond what the experiment can run.
ExperimentReport run_experiment(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

}  // namespace bspace
