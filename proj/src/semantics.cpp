#include "imagery/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "imagery/error.hpp"
#include "imagery/kernels.hpp"
#include "imagery/pca.hpp"

namespace imagery {

const char* to_string(PairPolicy p) {
  return p == PairPolicy::AllPairs ? "all-pairs" : "annotated-pairs";
}

PairPolicy pair_policy_from_string(const std::string& s) {
  if (s == "all-pairs") return PairPolicy::AllPairs;
  if (s == "annotated-pairs") return PairPolicy::AnnotatedPairs;
  throw Error(ErrorKind::Parse, "unknown pair_policy: " + s);
}

void PromptSpec::validate() const {
  if (entities.empty())
    throw Error(ErrorKind::InvalidInput, "prompt has no entities");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [i, j] : pairs) {
    if (i >= entities.size() || j >= entities.size())
      throw Error(ErrorKind::InvalidInput, "pair index out of range");
    if (i == j) throw Error(ErrorKind::InvalidInput, "pair with i == j");
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second)
      throw Error(ErrorKind::InvalidInput, "duplicate pair");
  }
}

json prompt_to_json(const PromptSpec& p) {
  json j;
  j["text"] = p.text;
  j["entities"] = p.entities;
  j["pair_policy"] = to_string(p.pair_policy);
  if (!p.pairs.empty()) {
    json arr = json::array();
    for (const auto& [i, j2] : p.pairs) arr.push_back(json::array({i, j2}));
    j["pairs"] = arr;
  }
  if (p.d_sem) j["d_sem"] = *p.d_sem;
  return j;
}

PromptSpec prompt_from_json(const json& j) {
  if (!j.is_object())
    throw Error(ErrorKind::Parse, "prompt: expected a JSON object");
  PromptSpec p;
  p.text = require_field(j, "text", "prompt").get<std::string>();
  for (const auto& e : require_field(j, "entities", "prompt"))
    p.entities.push_back(e.get<std::string>());
  if (j.contains("pairs")) {
    for (const auto& pr : j["pairs"]) {
      if (!pr.is_array() || pr.size() != 2)
        throw Error(ErrorKind::Parse, "prompt: pairs must be [i, j] arrays");
      p.pairs.emplace_back(pr[0].get<std::size_t>(),
                           pr[1].get<std::size_t>());
    }
  }
  if (j.contains("pair_policy"))
    p.pair_policy = pair_policy_from_string(j["pair_policy"].get<std::string>());
  if (j.contains("d_sem")) p.d_sem = j["d_sem"].get<double>();
  p.validate();
  return p;
}

PromptSpec load_prompt(const std::string& path) {
  return prompt_from_json(read_json_file(path));
}

void save_prompt(const std::string& path, const PromptSpec& p) {
  write_json_file(path, prompt_to_json(p));
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> effective_pairs(
    const PromptSpec& prompt) {
  if (prompt.pair_policy == PairPolicy::AnnotatedPairs) return prompt.pairs;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < prompt.entities.size(); ++i)
    for (std::size_t j = i + 1; j < prompt.entities.size(); ++j)
      out.emplace_back(i, j);
  return out;
}

}  // namespace

SemanticDistance semantic_distance(PromptSpec& prompt,
                                   const EmbeddingTable& table,
                                   std::size_t fallback_dim) {
  prompt.validate();
  auto pairs = effective_pairs(prompt);
  if (pairs.empty())
    throw Error(ErrorKind::NotComputable,
                "semantic_distance: fewer than 2 entities and no pairs");

  SemanticDistance out;
  std::vector<Vec> phi(prompt.entities.size());
  std::vector<bool> resolved(prompt.entities.size(), false);
  auto embed = [&](std::size_t idx) -> const Vec& {
    if (!resolved[idx]) {
      Embedding e = resolve_embedding(table, prompt.entities[idx], fallback_dim);
      out.any_fallback = out.any_fallback || e.fallback;
      phi[idx] = std::move(e.values);
      resolved[idx] = true;
    }
    return phi[idx];
  };

  double total = 0.0;
  for (const auto& [i, j] : pairs) {
    const Vec& a = embed(i);
    const Vec& b = embed(j);
    total += std::sqrt(kern::sq_dist(a.data(), b.data(), a.size()));
  }
  out.value = total / static_cast<double>(pairs.size());
  out.pair_count = pairs.size();
  prompt.d_sem = out.value;
  return out;
}

SemanticDistance semantic_distance_or_zero(PromptSpec& prompt,
                                           const EmbeddingTable& table,
                                           std::size_t fallback_dim) {
  prompt.validate();
  if (effective_pairs(prompt).empty()) {
    SemanticDistance out;
    out.degenerate = true;
    prompt.d_sem = 0.0;
    return out;
  }
  return semantic_distance(prompt, table, fallback_dim);
}

std::vector<ProjectedPoint> project_texts(const std::vector<std::string>& texts,
                                          const EmbeddingTable& table,
                                          std::size_t fallback_dim) {
  std::vector<Vec> rows;
  rows.reserve(texts.size());
  for (const std::string& t : texts)
    rows.push_back(resolve_embedding(table, t, fallback_dim).values);
  std::vector<Vec> proj = pca_project(rows, 2);
  std::vector<ProjectedPoint> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i)
    out[i] = {proj[i][0], proj[i][1], texts[i]};
  return out;
}

}  // namespace imagery
