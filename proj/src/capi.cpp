#include "bspace/bspace.h"

#include "bspace/experiments.hpp"
#include "bspace/scc.hpp"

#include <cstring>
#include <string>

struct bspace_tree {
  bspace::TreeXi tree;
};

struct bspace_vec {
  bspace::FinVec vec;
};

struct bspace_params {
  bspace::SigmaRegistry sigma;
};

namespace {

using json = nlohmann::json;

thread_local std::string last_error;
thread_local std::uint64_t last_required = 0;

bspace_status fail(bspace_status s, const std::string& what, std::uint64_t required = 0) {
  last_error = what;
  last_required = required;
  return s;
}

template <typename F>
bspace_status guard(F&& body) {
  last_error.clear();
  last_required = 0;
  try {
    body();
    return BSPACE_OK;
  } catch (const bspace::TruncationTooSmall& e) {
    return fail(BSPACE_ERR_INFEASIBLE, e.what(), e.required_n_max());
  } catch (const bspace::LExhausted& e) {
    return fail(BSPACE_ERR_INFEASIBLE, e.what(), e.deficit().fits_ulong_p() ? e.deficit().get_ui() : 0);
  } catch (const bspace::Infeasible& e) {
    return fail(BSPACE_ERR_INFEASIBLE, e.what());
  } catch (const bspace::PrefixExhausted& e) {
    return fail(BSPACE_ERR_INFEASIBLE, e.what());
  } catch (const std::out_of_range& e) {
    return fail(BSPACE_ERR_RANGE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BSPACE_ERR_INVALID, e.what());
  } catch (const std::domain_error& e) {
    return fail(BSPACE_ERR_INVALID, e.what());
  } catch (const json::exception& e) {
    return fail(BSPACE_ERR_INVALID, std::string("JSON: ") + e.what());
  } catch (const std::exception& e) {
    return fail(BSPACE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BSPACE_ERR_INTERNAL, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw std::invalid_argument(std::string(what) + " is NULL");
}

bspace::Rational rational_arg(const char* text, const char* what) {
  need(text, what);
  return bspace::parse_rational(text);
}

bspace::FinSet finset_from_json(const json& j) {
  std::vector<bspace::Node> nodes;
  for (const auto& v : j) {
    if (!v.is_number_unsigned() || v.get<bspace::Node>() == 0)
      throw std::invalid_argument("expected an array of positive integers");
    nodes.push_back(v.get<bspace::Node>());
  }
  return bspace::FinSet(std::move(nodes));
}

}  // namespace

extern "C" {

const char* bspace_last_error(void) { return last_error.c_str(); }
uint64_t bspace_last_required(void) { return last_required; }
const char* bspace_version(void) { return "1.0.0"; }
void bspace_string_free(char* s) { std::free(s); }

bspace_status bspace_tree_build(unsigned xi, uint64_t n_max, bspace_tree** out) {
  return guard([&] {
    need(out, "out");
    *out = new bspace_tree{bspace::TreeXi::build(bspace::TreeSpec{bspace::SchreierRank{xi}, n_max})};
  });
}

bspace_status bspace_tree_from_json(const char* text, bspace_tree** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = new bspace_tree{bspace::tree_from_json(json::parse(text))};
  });
}

bspace_status bspace_tree_to_json(const bspace_tree* tree, char** out) {
  return guard([&] {
    need(tree, "tree");
    need(out, "out");
    *out = dup(bspace::tree_to_json(tree->tree).dump());
  });
}

bspace_status bspace_tree_precedes(const bspace_tree* tree, uint64_t a, uint64_t b, int* out) {
  return guard([&] {
    need(tree, "tree");
    need(out, "out");
    *out = tree->tree.precedes(a, b) ? 1 : 0;
  });
}

uint64_t bspace_tree_n_max(const bspace_tree* tree) { return tree == nullptr ? 0 : tree->tree.n_max(); }
void bspace_tree_free(bspace_tree* tree) { delete tree; }

bspace_status bspace_vec_from_json(const char* text, bspace_vec** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = new bspace_vec{bspace::finvec_from_json(json::parse(text))};
  });
}

bspace_status bspace_vec_to_json(const bspace_vec* vec, char** out) {
  return guard([&] {
    need(vec, "vec");
    need(out, "out");
    *out = dup(bspace::finvec_to_json(vec->vec).dump());
  });
}

void bspace_vec_free(bspace_vec* vec) { delete vec; }

bspace_status bspace_params_from_json(const char* text, int toy, bspace_params** out) {
  return guard([&] {
    need(out, "out");
    bspace::EssParams p;
    if (text == nullptr) {
      p = bspace::EssParams::toy_default();
    } else {
      json j = json::parse(text);
      if (toy != 0 && j.is_object()) j["toy"] = true;
      p = bspace::params_from_json(j);
    }
    *out = new bspace_params{bspace::SigmaRegistry(std::move(p))};
  });
}

bspace_status bspace_params_to_json(const bspace_params* params, char** out) {
  return guard([&] {
    need(params, "params");
    need(out, "out");
    *out = dup(bspace::params_to_json(params->sigma.params()).dump());
  });
}

void bspace_params_free(bspace_params* params) { delete params; }

bspace_status bspace_norm(const char* space, const char* ground, const bspace_vec* x, const bspace_tree* tree,
                          const bspace_params* params, const char* r, const char* p, char** out_json) {
  return guard([&] {
    need(space, "space");
    need(x, "vector");
    need(out_json, "out");
    const std::string s(space);
    const bspace::TreeXi* t = tree == nullptr ? nullptr : &tree->tree;
    json result;
    if (s == "tinc") {
      need(tree, "tree");
      result = bspace::norm_result_to_json(bspace::tinc_norm(x->vec, *t));
    } else if (s == "essinc") {
      need(params, "params");
      result = bspace::norm_result_to_json(bspace::essinc_norm(x->vec, params->sigma));
      result["toy"] = params->sigma.params().toy;
    } else if (s == "jt") {
      need(tree, "tree");
      const bspace::Rational rr = r == nullptr ? bspace::Rational(1) : bspace::parse_rational(r);
      std::optional<bspace::Rational> pp;
      if (p != nullptr) pp = bspace::parse_rational(p);
      result = bspace::jt_result_to_json(bspace::jt_norm(x->vec, *t, rr, pp));
    } else if (s == "ground" || s == "wg") {
      const bspace::GroundTag tag = bspace::ground_tag_from_name(ground == nullptr ? "G2" : ground);
      bspace::GroundKind kind;
      switch (tag) {
        case bspace::GroundTag::Gp: kind = bspace::GroundKind::gp(rational_arg(p, "q (pass it as p)")); break;
        case bspace::GroundTag::G1Weighted:
          need(params, "params");
          kind = bspace::GroundKind::g1_weighted(params->sigma.params());
          break;
        default: kind = bspace::GroundKind{tag, {}, std::nullopt};
      }
      result = bspace::norm_result_to_json(s == "ground" ? bspace::ground_norm(x->vec, kind, t)
                                                         : bspace::wg_norm(x->vec, kind, t));
      result["ground"] = bspace::ground_tag_name(tag);
    } else {
      throw std::invalid_argument("unknown space '" + s + "' (tinc, essinc, jt, ground, wg)");
    }
    result["space"] = s;
    *out_json = dup(result.dump());
  });
}

bspace_status bspace_scc(unsigned order, const char* eps, uint64_t start, int* pass, char** out_json) {
  return guard([&] {
    need(pass, "pass");
    need(out_json, "out");
    const bspace::Rational e = rational_arg(eps, "eps");
    if (start == 0) throw std::invalid_argument("scc: start must be positive");
    bspace::SCC x = bspace::repeated_average_from(bspace::SchreierRank{order}, start);
    x.eps = e;
    const bool ok = bspace::verify_scc(x.coeffs, x.order, e);
    json j = bspace::scc_to_json(x);
    j["lower_mass"] = bspace::to_string(bspace::scc_lower_mass(x.coeffs, x.order));
    j["pass"] = ok;
    *pass = ok ? 1 : 0;
    *out_json = dup(j.dump());
  });
}

bspace_status bspace_plegma(size_t l, size_t k, const char* m_set, int strict, size_t limit, char** out_json) {
  return guard([&] {
    need(m_set, "m_set");
    need(out_json, "out");
    const bspace::FinSet M = finset_from_json(json::parse(m_set));
    json families = json::array();
    std::uint64_t count = 0;
    bspace::plegma_for_each(l, k, M, strict != 0, [&](const bspace::PlegmaFamily& fam) {
      if (families.size() < limit) families.push_back(fam);
      ++count;
      return true;
    });
    *out_json = dup(json{{"l", l},
                         {"k", k},
                         {"strict", strict != 0},
                         {"count", count},
                         {"listed", families.size()},
                         {"families", std::move(families)}}
                        .dump());
  });
}

bspace_status bspace_plegma_check(const char* family_json, int strict, int* out) {
  return guard([&] {
    need(family_json, "family");
    need(out, "out");
    auto fam = json::parse(family_json).get<bspace::PlegmaFamily>();
    *out = bspace::plegma_check(fam, strict != 0) ? 1 : 0;
  });
}

bspace_status bspace_game(unsigned n, const char* p, const char* claimed_c, const bspace_tree* tree,
                          char** out_json) {
  return guard([&] {
    need(tree, "tree");
    need(out_json, "out");
    bspace::GameOptions o;
    if (p != nullptr) {
      o.space = bspace::GameSpace::Jt;
      o.p = bspace::parse_rational(p);
    }
    if (claimed_c != nullptr) o.claimed_c = bspace::parse_rational(claimed_c);
    *out_json = dup(bspace::game_to_json(bspace::simulate_game(n, tree->tree, o)).dump());
  });
}

bspace_status bspace_experiment_names(char** out_json) {
  return guard([&] {
    need(out_json, "out");
    *out_json = dup(json(bspace::experiment_names()).dump());
  });
}

bspace_status bspace_experiment(const char* name, const char* params_json, const char* format, int with_runtime,
                                int* pass, char** out) {
  return guard([&] {
    need(name, "name");
    need(pass, "pass");
    need(out, "out");
    const std::string fmt = format == nullptr ? "json" : format;
    if (fmt != "json" && fmt != "csv") throw std::invalid_argument("format must be json or csv");
    const json params = params_json == nullptr ? json::object() : json::parse(params_json);
    const auto report = bspace::run_experiment(name, params);
    *pass = report.pass() ? 1 : 0;
    *out = dup(fmt == "json" ? bspace::report_to_json(report, with_runtime != 0).dump(2) + "\n"
                             : bspace::report_to_csv(report));
  });
}

}  // extern "C"
