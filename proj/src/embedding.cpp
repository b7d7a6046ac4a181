#include "imagery/embedding.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "imagery/error.hpp"
#include "imagery/kernels.hpp"
#include "imagery/text.hpp"

namespace imagery {

using nlohmann::json;

Vec embed_toy(std::string_view text, std::size_t dim) {
  std::string norm = normalize_text(text);
  if (norm.empty())
    throw Error(ErrorKind::InvalidInput, "embed_toy: empty text");
  if (dim < 2) throw Error(ErrorKind::InvalidConfig, "embed_toy: dim < 2");

  Vec v(dim, 0.0);
  auto add_gram = [&](std::string_view gram) {
    std::uint64_t h = fnv1a64(gram);
    double w = static_cast<double>(h >> 32) * 0x1.0p-32 * 2.0 - 1.0;
    v[h % dim] += w;
  };
  if (norm.size() < 3) {
    add_gram(norm);
  } else {
    std::string_view sv(norm);
    for (std::size_t i = 0; i + 3 <= sv.size(); ++i) add_gram(sv.substr(i, 3));
  }

  double n2 = kern::sq_norm(v.data(), v.size());
  if (n2 <= 1e-24) {
    // Gram weights cancelled; deterministic unit basis vector instead.
    v.assign(dim, 0.0);
    v[fnv1a64(norm) % dim] = 1.0;
    return v;
  }
  kern::scale(v.data(), 1.0 / std::sqrt(n2), v.data(), v.size());
  return v;
}

Embedding resolve_embedding(const EmbeddingTable& table, std::string_view text,
                            std::size_t fallback_dim) {
  std::string key = normalize_text(text);
  if (key.empty())
    throw Error(ErrorKind::InvalidInput, "resolve_embedding: empty text");
  if (auto it = table.entries.find(key); it != table.entries.end())
    return {it->second, false};
  std::size_t dim = table.dim > 0 ? table.dim : fallback_dim;
  return {embed_toy(key, dim), true};
}

EmbeddingTable load_embedding_table(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open embedding table: " + path);

  EmbeddingTable table;
  table.source_tag = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    auto bad = [&](const std::string& what) {
      return Error(ErrorKind::Parse, path + ":" + std::to_string(lineno) +
                                         ": " + what);
    };
    if (rec.is_discarded()) throw bad("invalid JSON");
    if (!rec.is_object() || rec.size() != 2 || !rec.contains("text") ||
        !rec.contains("vec"))
      throw bad("record must be exactly {\"text\", \"vec\"}");
    if (!rec["text"].is_string() || !rec["vec"].is_array())
      throw bad("wrong field types");

    std::string key = normalize_text(rec["text"].get<std::string>());
    if (key.empty()) throw bad("empty text");
    Vec vec;
    vec.reserve(rec["vec"].size());
    for (const auto& x : rec["vec"]) {
      if (!x.is_number()) throw bad("vec entries must be numbers");
      double d = x.get<double>();
      if (!std::isfinite(d)) throw bad("non-finite vec entry");
      vec.push_back(d);
    }
    if (vec.empty()) throw bad("empty vec");
    if (table.dim == 0)
      table.dim = vec.size();
    else if (vec.size() != table.dim)
      throw bad("mixed vector dims (" + std::to_string(vec.size()) + " vs " +
                std::to_string(table.dim) + ")");
    table.entries[key] = std::move(vec);
  }
  return table;
}

}  // namespace imagery
