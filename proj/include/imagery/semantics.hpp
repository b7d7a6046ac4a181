#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imagery/embedding.hpp"
#include "imagery/prompt.hpp"

namespace imagery {

// Toy-embedder dimension used whenever no table vector pins one.
inline constexpr std::size_t kDefaultToyDim = 16;

struct SemanticDistance {
  double value = 0.0;
  std::size_t pair_count = 0;
  bool any_fallback = false;  // at least one entity missing from the table
  bool degenerate = false;    // single-entity search-path fallback (value 0)
};

// Eq. 2: mean pairwise Euclidean distance between entity embeddings, taken
// on raw embeddings (the PCA plane is used only for bench pair selection).
// E = all unordered entity pairs under all-pairs policy, else the explicit
// list. Caches the value into prompt.d_sem. Throws NotComputable when no
// pair set exists, InvalidInput for empty entities.
SemanticDistance semantic_distance(PromptSpec& prompt,
                                   const EmbeddingTable& table,
                                   std::size_t fallback_dim = kDefaultToyDim);

// Search-path variant: a prompt without a pair set yields value 0 flagged
// degenerate instead of an error, so search still runs.
SemanticDistance semantic_distance_or_zero(
    PromptSpec& prompt, const EmbeddingTable& table,
    std::size_t fallback_dim = kDefaultToyDim);

struct ProjectedPoint {
  double x = 0.0;
  double y = 0.0;
  std::string source_text;
};

// Embed texts (table lookup with toy fallback) and PCA-project into the
// shared 2D plane (Eq. 5), in input order. Propagates DegenerateRank.
std::vector<ProjectedPoint> project_texts(
    const std::vector<std::string>& texts, const EmbeddingTable& table,
    std::size_t fallback_dim = kDefaultToyDim);

}  // namespace imagery
