#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imagery/json_util.hpp"

namespace imagery {

enum class PairPolicy { AllPairs, AnnotatedPairs };

const char* to_string(PairPolicy p);
PairPolicy pair_policy_from_string(const std::string& s);

struct PromptSpec {
  std::string text;
  std::vector<std::string> entities;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // explicit list
  PairPolicy pair_policy = PairPolicy::AllPairs;
  std::optional<double> d_sem;  // cached Eq. 2 value

  // Throws InvalidInput on violated invariants (no entities, bad pair
  // indices, i == j, unordered duplicates).
  void validate() const;
};

json prompt_to_json(const PromptSpec& p);
// Accepts {"text", "entities", "pairs"?, "pair_policy"?, "d_sem"?};
// pair_policy defaults to all-pairs; unknown keys are ignored.
PromptSpec prompt_from_json(const json& j);

PromptSpec load_prompt(const std::string& path);
void save_prompt(const std::string& path, const PromptSpec& p);

}  // namespace imagery
