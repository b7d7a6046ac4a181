#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace imagery {

using Vec = std::vector<double>;

struct Embedding {
  Vec values;
  bool fallback = false;  // synthesized by the toy embedder, not table-backed
};

// Keys are normalized entity text; all vectors share one dim.
struct EmbeddingTable {
  std::map<std::string, Vec> entries;
  std::size_t dim = 0;  // 0 when the table is empty
  std::string source_tag;
};

// Deterministic character-trigram hash embedding, unit Euclidean norm.
// Same (text, dim) always yields the identical vector.
Vec embed_toy(std::string_view text, std::size_t dim);

// Table lookup after normalization; falls back to embed_toy at the table's
// dim (or fallback_dim when the table is empty) and flags the result.
Embedding resolve_embedding(const EmbeddingTable& table, std::string_view text,
                            std::size_t fallback_dim);

// JSON Lines, one record per line, exactly {"text": str, "vec": [num,...]}.
// Rejects mixed dims, non-finite values, and unexpected keys; later
// duplicates of a normalized key overwrite earlier ones.
EmbeddingTable load_embedding_table(const std::string& path);

}  // namespace imagery
