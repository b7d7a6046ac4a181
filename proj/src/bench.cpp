#include "imagery/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "imagery/error.hpp"
#include "imagery/semantics.hpp"
#include "imagery/text.hpp"

namespace imagery {

const char* to_string(PairKind k) {
  return k == PairKind::ObjectAction ? "object-action" : "action-action";
}

namespace {

std::vector<std::string> normalize_dedup(const json& arr,
                                         const std::string& ctx) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : arr) {
    if (!e.is_string())
      throw Error(ErrorKind::Parse, ctx + ": entries must be strings");
    std::string norm = normalize_text(e.get<std::string>());
    if (norm.empty())
      throw Error(ErrorKind::Parse, ctx + ": empty entry after normalization");
    if (seen.insert(norm).second) out.push_back(std::move(norm));
  }
  return out;
}

}  // namespace

ConceptCatalog load_catalog(const std::string& path) {
  json j = read_json_file(path);
  ConceptCatalog cat;
  cat.objects =
      normalize_dedup(require_field(j, "objects", "catalog"), "objects");
  cat.actions =
      normalize_dedup(require_field(j, "actions", "catalog"), "actions");
  cat.provenance = require_field(j, "provenance", "catalog").get<std::string>();
  if (cat.objects.empty() && cat.actions.empty())
    throw Error(ErrorKind::InvalidInput, "catalog: both lists empty");
  return cat;
}

DistantPairs build_distant_pairs(const ConceptCatalog& catalog,
                                 const EmbeddingTable& table, PairKind kind,
                                 std::size_t top_k) {
  if (top_k < 1)
    throw Error(ErrorKind::InvalidInput, "build_distant_pairs: top_k < 1");
  if (kind == PairKind::ObjectAction &&
      (catalog.objects.empty() || catalog.actions.empty()))
    throw Error(ErrorKind::InvalidInput,
                "object-action pairing needs both concept lists");
  if (kind == PairKind::ActionAction && catalog.actions.empty())
    throw Error(ErrorKind::InvalidInput, "action-action pairing needs actions");

  // One shared 2D plane over the deduplicated union of all concepts.
  std::vector<std::string> universe;
  std::set<std::string> seen;
  for (const auto& list : {catalog.objects, catalog.actions})
    for (const std::string& c : list)
      if (seen.insert(c).second) universe.push_back(c);

  std::vector<ProjectedPoint> points = project_texts(universe, table);
  std::map<std::string, std::pair<double, double>> pos;
  for (const ProjectedPoint& p : points) pos[p.source_text] = {p.x, p.y};

  auto dist2d = [&](const std::string& a, const std::string& b) {
    auto [ax, ay] = pos.at(a);
    auto [bx, by] = pos.at(b);
    return std::hypot(ax - bx, ay - by);
  };

  std::vector<ConceptPair> candidates;
  if (kind == PairKind::ObjectAction) {
    for (const std::string& obj : catalog.objects) {
      const std::string* best = nullptr;
      double best_d = -1.0;
      for (const std::string& act : catalog.actions) {
        if (act == obj) continue;
        double d = dist2d(obj, act);
        if (d > best_d || (d == best_d && best && act < *best)) {
          best = &act;
          best_d = d;
        }
      }
      if (best) candidates.push_back({obj, *best, kind, best_d});
    }
  } else {
    std::set<std::pair<std::string, std::string>> dedup;
    for (const std::string& a : catalog.actions) {
      const std::string* best = nullptr;
      double best_d = -1.0;
      for (const std::string& b : catalog.actions) {
        if (b == a) continue;
        double d = dist2d(a, b);
        if (d > best_d || (d == best_d && best && b < *best)) {
          best = &b;
          best_d = d;
        }
      }
      if (!best) continue;
      auto key = std::minmax(a, *best);
      if (dedup.insert(key).second)
        candidates.push_back({key.first, key.second, kind, best_d});
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const ConceptPair& l, const ConceptPair& r) {
              if (l.distance != r.distance) return l.distance > r.distance;
              if (l.a != r.a) return l.a < r.a;
              return l.b < r.b;
            });

  DistantPairs out;
  if (top_k >= candidates.size()) {
    out.short_of_top_k = top_k > candidates.size();
    out.pairs = std::move(candidates);
  } else {
    out.pairs.assign(candidates.begin(),
                     candidates.begin() + static_cast<std::ptrdiff_t>(top_k));
  }
  return out;
}

SuiteManifest render_prompts(const std::vector<ConceptPair>& pairs,
                             const std::string& template_id) {
  if (template_id != "default-v1")
    throw Error(ErrorKind::InvalidConfig,
                "unknown template_id: " + template_id);

  SuiteManifest m;
  m.template_id = template_id;
  m.pairs = pairs;
  m.prompts.reserve(pairs.size());
  for (const ConceptPair& p : pairs) {
    PromptSpec spec;
    spec.text = p.kind == PairKind::ObjectAction
                    ? "The " + p.a + " is " + p.b + "."
                    : "A person " + p.a + ", then " + p.b + ".";
    spec.entities = {p.a, p.b};
    spec.pairs = {{0, 1}};
    spec.pair_policy = PairPolicy::AnnotatedPairs;
    m.prompts.push_back(std::move(spec));
  }

  DistanceStats& st = m.stats;
  st.count = pairs.size();
  if (!pairs.empty()) {
    double total = 0.0;
    st.min = st.max = pairs[0].distance;
    for (const ConceptPair& p : pairs) {
      total += p.distance;
      st.min = std::min(st.min, p.distance);
      st.max = std::max(st.max, p.distance);
    }
    st.mean = total / static_cast<double>(pairs.size());
    const std::size_t nbins = st.max > st.min ? 8 : 1;
    const double width = (st.max - st.min) / static_cast<double>(nbins);
    st.bins.resize(nbins);
    for (std::size_t b = 0; b < nbins; ++b) {
      st.bins[b].lo = st.min + width * static_cast<double>(b);
      st.bins[b].hi = b + 1 == nbins ? st.max : st.min + width * (b + 1.0);
    }
    for (const ConceptPair& p : pairs) {
      std::size_t b =
          width > 0.0
              ? std::min(static_cast<std::size_t>((p.distance - st.min) / width),
                         nbins - 1)
              : 0;
      ++st.bins[b].count;
    }
  }
  return m;
}

json manifest_to_json(const SuiteManifest& m) {
  json j;
  j["template_id"] = m.template_id;
  j["pairs"] = json::array();
  for (const ConceptPair& p : m.pairs)
    j["pairs"].push_back({{"a", p.a},
                          {"b", p.b},
                          {"kind", to_string(p.kind)},
                          {"distance", p.distance}});
  j["prompts"] = json::array();
  for (const PromptSpec& p : m.prompts) j["prompts"].push_back(prompt_to_json(p));
  json bins = json::array();
  for (const auto& b : m.stats.bins)
    bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  j["stats"] = {{"count", m.stats.count},
                {"mean", m.stats.mean},
                {"min", m.stats.min},
                {"max", m.stats.max},
                {"bins", bins}};
  if (m.short_of_top_k)
    j["warning"] = "top_k exceeded the candidate count; returning all";
  return j;
}

void save_manifest(const std::string& path, const SuiteManifest& m) {
  write_json_file(path, manifest_to_json(m));
}

}  // namespace imagery
