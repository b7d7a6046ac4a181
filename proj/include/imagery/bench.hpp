#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imagery/embedding.hpp"
#include "imagery/json_util.hpp"
#include "imagery/prompt.hpp"

namespace imagery {

struct ConceptCatalog {
  std::vector<std::string> objects;  // normalized, deduped, input order
  std::vector<std::string> actions;
  std::string provenance;
};

// JSON {"objects": [...], "actions": [...], "provenance": str}; entries are
// normalized and deduplicated keeping first occurrence.
ConceptCatalog load_catalog(const std::string& path);

enum class PairKind { ObjectAction, ActionAction };
const char* to_string(PairKind k);

struct ConceptPair {
  std::string a;
  std::string b;
  PairKind kind = PairKind::ObjectAction;
  double distance = 0.0;  // PCA-plane Euclidean distance
};

struct DistantPairs {
  std::vector<ConceptPair> pairs;  // distance desc, ties lex by (a, b)
  bool short_of_top_k = false;     // top_k exceeded the candidate count
};

// Joint PCA over the deduplicated concept union, then object-action: each
// object paired with its most distant action (ties: lexicographically
// smaller action); action-action: each action with its most distant other
// action, unordered duplicates removed keeping the lex-smaller ordering.
DistantPairs build_distant_pairs(const ConceptCatalog& catalog,
                                 const EmbeddingTable& table, PairKind kind,
                                 std::size_t top_k);

struct DistanceStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  struct Bin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
  };
  std::vector<Bin> bins;
};

struct SuiteManifest {
  std::vector<ConceptPair> pairs;
  std::vector<PromptSpec> prompts;  // one per pair, annotated-pairs policy
  std::string template_id;
  DistanceStats stats;
  bool short_of_top_k = false;
};

// Deterministic template fill; template_id "default-v1" renders
// object-action as "The {object} is {action}." and action-action as
// "A person {action_a}, then {action_b}.".
SuiteManifest render_prompts(const std::vector<ConceptPair>& pairs,
                             const std::string& template_id);

json manifest_to_json(const SuiteManifest& m);
void save_manifest(const std::string& path, const SuiteManifest& m);

}  // namespace imagery
