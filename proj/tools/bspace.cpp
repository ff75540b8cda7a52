// Command-line front end. Talks to the library only through bspace.h.
#include "bspace/bspace.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kPass = 0;
constexpr int kClaimFailed = 1;
constexpr int kUsage = 2;
constexpr int kInfeasible = 3;

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Failure{kUsage, "cannot write " + path};
  out << text;
}

void check(bspace_status s) {
  if (s == BSPACE_OK) return;
  std::string msg = bspace_last_error();
  if (s == BSPACE_ERR_INFEASIBLE) {
    if (bspace_last_required() != 0) msg += " (required: " + std::to_string(bspace_last_required()) + ")";
    throw Failure{kInfeasible, msg};
  }
  throw Failure{s == BSPACE_ERR_INTERNAL ? kClaimFailed : kUsage, msg};
}

std::string take(char* s) {
  std::string out(s);
  bspace_string_free(s);
  return out;
}

// "1,2,5", "3..40" or a JSON array.
std::string m_set_json(const std::string& text) {
  if (!text.empty() && text.front() == '[') return text;
  nlohmann::json out = nlohmann::json::array();
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      auto dots = part.find("..");
      if (dots == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dots));
        const auto hi = std::stoull(part.substr(dots + 2));
        if (hi - lo > 100000) throw Failure{kUsage, "--m-set range too long"};
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw Failure{kUsage, "bad --m-set entry '" + part + "'"};
    }
  }
  return out.dump();
}

struct TreeHandle {
  bspace_tree* t = nullptr;
  ~TreeHandle() { bspace_tree_free(t); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norms, trees and experiments for Tsirelson-type and James-tree-type spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bspace_version()));

  // tree build
  auto* tree_cmd = app.add_subcommand("tree", "Coded trees");
  tree_cmd->require_subcommand(1);
  auto* build_cmd = tree_cmd->add_subcommand("build", "Build the truncation {1..N} of the tree");
  unsigned xi = 1;
  std::uint64_t n_max = 0;
  std::string out_path;
  build_cmd->add_option("--xi", xi, "Schreier order")->default_val(1);
  build_cmd->add_option("--nmax", n_max, "Truncation size")->required();
  build_cmd->add_option("--out", out_path, "Output file (stdout if omitted)");

  // norm
  auto* norm_cmd = app.add_subcommand("norm", "Compute a norm with a witness functional");
  std::string space, tree_path, vec_path, r_text, p_text, ground, params_path;
  bool toy = false;
  norm_cmd->add_option("--space", space, "tinc, essinc, jt, ground or wg")
      ->required()
      ->check(CLI::IsMember({"tinc", "essinc", "jt", "ground", "wg"}));
  norm_cmd->add_option("--tree", tree_path, "Tree JSON");
  norm_cmd->add_option("--vec", vec_path, "Vector JSON {coords: [[node, \"p/q\"], ...]}")->required();
  norm_cmd->add_option("--r", r_text, "JT inner exponent (default 1)");
  norm_cmd->add_option("--p", p_text, "JT outer exponent (default infinity) or q of Gp");
  norm_cmd->add_option("--ground", ground, "Ground set for ground/wg: G0, G1, G2, Gp, Gsum, G1w")->default_val("G2");
  norm_cmd->add_option("--params", params_path, "Weight parameters JSON for essinc");
  norm_cmd->add_flag("--toy", toy, "Desk-scale parameters (defaults when --params is absent)");
  norm_cmd->add_option("--out", out_path, "Output file");

  // scc
  auto* scc_cmd = app.add_subcommand("scc", "Repeated average along {from, from+1, ...}");
  unsigned order = 1;
  std::string eps_text;
  std::uint64_t from = 1;
  scc_cmd->add_option("--order", order, "Order n")->required();
  scc_cmd->add_option("--eps", eps_text, "Tolerance p/q")->required();
  scc_cmd->add_option("--from", from, "First element of L")->default_val(1);
  scc_cmd->add_option("--out", out_path, "Output file");

  // plegma
  auto* plegma_cmd = app.add_subcommand("plegma", "Enumerate plegma families");
  std::size_t l = 1, k = 1, limit = 1000;
  std::string m_set;
  bool strict = false;
  plegma_cmd->add_option("--l", l, "Number of sets")->required();
  plegma_cmd->add_option("--k", k, "Size of each set")->required();
  plegma_cmd->add_option("--m-set", m_set, "Ground set: 1,2,5 or 3..40 or a JSON array")->required();
  plegma_cmd->add_flag("--strict", strict, "Strict plegma families");
  plegma_cmd->add_option("--limit", limit, "Families listed in full")->default_val(1000);
  plegma_cmd->add_option("--out", out_path, "Output file");

  // game
  auto* game_cmd = app.add_subcommand("game", "Simulate the n-turn game with the built-in strategies");
  unsigned n = 1;
  std::string c_text;
  std::uint64_t game_nmax = 4096;
  game_cmd->add_option("--n", n, "Number of turns")->required();
  game_cmd->add_option("--p", p_text, "Play on JT with this p (T_inc when omitted)");
  game_cmd->add_option("--c", c_text, "Claimed constant C");
  game_cmd->add_option("--nmax", game_nmax, "Tree truncation")->default_val(4096);
  game_cmd->add_option("--xi", xi, "Schreier order")->default_val(1);
  game_cmd->add_option("--out", out_path, "Output file");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run a registered experiment ('list' shows them)");
  std::string exp_name, json_out, csv_out, exp_params;
  bool timing = false;
  exp_cmd->add_option("name", exp_name, "Experiment name")->required();
  exp_cmd->add_option("--params", exp_params, "Parameters as a JSON object");
  auto* json_opt = exp_cmd->add_option("--json", json_out, "Write the JSON report here ('-' for stdout)");
  auto* csv_opt = exp_cmd->add_option("--csv", csv_out, "Write a CSV report here ('-' for stdout)");
  json_opt->excludes(csv_opt);
  exp_cmd->add_flag("--timing", timing, "Include the runtime in the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (build_cmd->parsed()) {
      TreeHandle t;
      check(bspace_tree_build(xi, n_max, &t.t));
      char* s = nullptr;
      check(bspace_tree_to_json(t.t, &s));
      emit(take(s), out_path);
      return kPass;
    }

    if (norm_cmd->parsed()) {
      TreeHandle t;
      if (!tree_path.empty()) check(bspace_tree_from_json(read_file(tree_path).c_str(), &t.t));
      bspace_vec* v = nullptr;
      check(bspace_vec_from_json(read_file(vec_path).c_str(), &v));
      bspace_params* params = nullptr;
      if (space == "essinc" || ground == "G1w") {
        if (params_path.empty() && !toy) throw Failure{kUsage, "essinc needs --params or --toy"};
        const std::string text = params_path.empty() ? std::string() : read_file(params_path);
        check(bspace_params_from_json(params_path.empty() ? nullptr : text.c_str(), toy ? 1 : 0, &params));
      }
      char* s = nullptr;
      const bspace_status st = bspace_norm(space.c_str(), ground.c_str(), v, t.t, params,
                                           r_text.empty() ? nullptr : r_text.c_str(),
                                           p_text.empty() ? nullptr : p_text.c_str(), &s);
      bspace_vec_free(v);
      bspace_params_free(params);
      check(st);
      emit(take(s), out_path);
      return kPass;
    }

    if (scc_cmd->parsed()) {
      int pass = 0;
      char* s = nullptr;
      check(bspace_scc(order, eps_text.c_str(), from, &pass, &s));
      emit(take(s), out_path);
      return pass ? kPass : kClaimFailed;
    }

    if (plegma_cmd->parsed()) {
      char* s = nullptr;
      check(bspace_plegma(l, k, m_set_json(m_set).c_str(), strict ? 1 : 0, limit, &s));
      emit(take(s), out_path);
      return kPass;
    }

    if (game_cmd->parsed()) {
      TreeHandle t;
      check(bspace_tree_build(xi, game_nmax, &t.t));
      char* s = nullptr;
      check(bspace_game(n, p_text.empty() ? nullptr : p_text.c_str(), c_text.empty() ? nullptr : c_text.c_str(), t.t,
                        &s));
      const std::string text = take(s);
      emit(text, out_path);
      const auto j = nlohmann::json::parse(text);
      return j.at("matches_prediction").get<bool>() && j.at("is_segment").get<bool>() ? kPass : kClaimFailed;
    }

    if (exp_cmd->parsed()) {
      if (exp_name == "list") {
        char* s = nullptr;
        check(bspace_experiment_names(&s));
        for (const auto& name : nlohmann::json::parse(take(s))) std::cout << name.get<std::string>() << '\n';
        return kPass;
      }
      const bool csv = !csv_out.empty();
      int pass = 0;
      char* s = nullptr;
      check(bspace_experiment(exp_name.c_str(), exp_params.empty() ? nullptr : exp_params.c_str(),
                              csv ? "csv" : "json", timing ? 1 : 0, &pass, &s));
      emit(take(s), csv ? csv_out : json_out);
      return pass ? kPass : kClaimFailed;
    }
  } catch (const Failure& f) {
    std::cerr << "bspace: " << f.message << '\n';
    return f.code;
  }
  return kUsage;
}
