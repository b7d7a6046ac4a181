// Acceptance gate: ten end-to-end checks, one PASS/FAIL line each.
// Exit status is the number of failed checks, so 0 means fully green.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "imagery/bench.hpp"
#include "imagery/csv.hpp"
#include "imagery/diffusion.hpp"
#include "imagery/embedding.hpp"
#include "imagery/error.hpp"
#include "imagery/prompt.hpp"
#include "imagery/rewards.hpp"
#include "imagery/rng.hpp"
#include "imagery/schedule.hpp"
#include "imagery/search.hpp"
#include "imagery/semantics.hpp"
#include "imagery/sweep.hpp"
#include "oracle_helpers.hpp"

namespace fs = std::filesystem;
using namespace imagery;

namespace {

struct CheckFail {
  std::string msg;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw CheckFail{msg};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Shared testbed pieces.
// ---------------------------------------------------------------------------

GaussianMixtureTarget four_modes() {
  GaussianMixtureTarget t;
  t.dim = 2;
  t.components = {{0.25, {3.0, 3.0}, 0.4},
                  {0.25, {3.0, -3.0}, 0.4},
                  {0.25, {-3.0, 3.0}, 0.4},
                  {0.25, {-3.0, -3.0}, 0.4}};
  return t;
}

PromptSpec pinned_prompt(double d_sem) {
  PromptSpec p;
  p.text = "testbed prompt";
  p.entities = {"a", "b"};
  p.d_sem = d_sem;
  return p;
}

struct Bed {
  NoiseSchedule schedule;
  GmDenoiser model;
  AnalyticReward reward;
  SearchContext ctx;

  Bed(const GaussianMixtureTarget& target, std::size_t T, double d_sem,
      const RewardConfig& weights = RewardConfig{})
      : schedule(make_schedule(T, ScheduleKind::LinearAlphaBar)),
        model(target, &schedule),
        reward(target, 0) {
    ctx.model = &model;
    ctx.schedule = &schedule;
    ctx.reward = &reward;
    ctx.reward_config = weights;
    ctx.prompt = pinned_prompt(d_sem);
    ctx.d_sem = d_sem;
    ctx.workers = 1;
  }
};

class CountingModel : public DenoiserModel {
 public:
  explicit CountingModel(const DenoiserModel& inner) : inner_(inner) {}
  Vec predict_noise(const Vec& x, std::size_t t,
                    const PromptSpec& p) const override {
    ++calls;
    return inner_.predict_noise(x, t, p);
  }
  std::size_t dim() const override { return inner_.dim(); }
  mutable std::uint64_t calls = 0;

 private:
  const DenoiserModel& inner_;
};

// ---------------------------------------------------------------------------
// 1. Eq. 1 identity on randomized tuples.
// ---------------------------------------------------------------------------
std::string c1_eq1_identity() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  double max_err = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t T = 2 + rng() % 63;
    const ScheduleKind kind =
        rep % 2 ? ScheduleKind::CosineAlphaBar : ScheduleKind::LinearAlphaBar;
    const NoiseSchedule sched = make_schedule(T, kind);
    const std::size_t t = 1 + rng() % T;
    const std::size_t dim = 1 + rng() % 8;
    Vec x(dim), eps(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = ux(rng);
      eps[i] = ux(rng);
    }
    const DiffusionState out = ddim_step({x, t, 0}, eps, sched, 0.0);
    require(out.t == t - 1, "ddim_step must decrement t");
    for (std::size_t i = 0; i < dim; ++i) {
      const double x0 = (x[i] - sched.sigma[t] * eps[i]) / sched.zeta[t];
      const double want = sched.zeta[t - 1] * x0 + sched.sigma[t - 1] * eps[i];
      max_err = std::max(max_err, std::fabs(out.x[i] - want));
    }
  }
  require(max_err <= 1e-12,
          "Eq. 1 mismatch: max err " + fmt(max_err) + " > 1e-12");
  return "1000 tuples, max err " + fmt(max_err);
}

// ---------------------------------------------------------------------------
// 2. Eq. 2 / Eq. 3 hand-computed fixtures, exact.
// ---------------------------------------------------------------------------
std::string c2_arithmetic_fixtures() {
  std::size_t checked = 0;
  auto cc = [&](std::size_t n, double l, double d, std::size_t want) {
    require(candidate_count(n, l, d) == want,
            "candidate_count(" + std::to_string(n) + "," + fmt(l) + "," +
                fmt(d) + ") != " + std::to_string(want));
    ++checked;
  };
  cc(10, 1.0, 0.5, 15);  // the published example
  cc(10, 1.0, 0.0, 10);  // lambda = 1 default, zero distance
  cc(10, 1.0, 1.0, 20);
  cc(10, 0.1, 1.0, 11);
  cc(3, 0.5, 0.8, 5);
  cc(1, 1.0, 0.2, 2);
  cc(7, 2.0, 0.3, 12);
  cc(4, 0.0, 3.0, 4);
  cc(5, 1.0, 0.2, 6);
  cc(5, 1.0, 0.6, 8);
  cc(5, 1.0, 1.2, 11);
  cc(2, 1.0, 1.0, 4);

  EmbeddingTable table;
  table.dim = 2;
  table.entries = {{"a", {0.0, 0.0}},
                   {"b", {3.0, 4.0}},
                   {"c", {6.0, 8.0}},
                   {"d", {-3.0, 4.0}}};
  auto dsem = [&](std::vector<std::string> ents,
                  std::vector<std::pair<std::size_t, std::size_t>> pairs,
                  double want) {
    PromptSpec p;
    p.text = "fixture";
    p.entities = std::move(ents);
    if (!pairs.empty()) {
      p.pairs = std::move(pairs);
      p.pair_policy = PairPolicy::AnnotatedPairs;
    }
    const double got = semantic_distance(p, table).value;
    require(got == want, "d_sem fixture mismatch: got " + fmt(got) +
                             ", want " + fmt(want));
    ++checked;
  };
  dsem({"a", "b"}, {}, 5.0);
  dsem({"a", "c"}, {}, 10.0);
  dsem({"b", "c"}, {}, 5.0);
  dsem({"b", "d"}, {}, 6.0);
  dsem({"a", "b", "c"}, {}, 20.0 / 3.0);
  dsem({"a", "b", "d"}, {}, 16.0 / 3.0);
  dsem({"a", "b", "c"}, {{0, 1}}, 5.0);
  dsem({"a", "b", "c"}, {{0, 2}, {1, 2}}, 7.5);
  dsem({"c", "d"}, {{0, 1}}, std::sqrt(97.0));
  dsem({"  A ", "B"}, {}, 5.0);  // normalization before lookup

  require(checked >= 20, "fewer than 20 fixtures ran");
  return std::to_string(checked) + " fixtures, all exact";
}

// ---------------------------------------------------------------------------
// 3. Sampler moments on a single-Gaussian target.
// ---------------------------------------------------------------------------
std::string c3_sampler_moments() {
  GaussianMixtureTarget target;
  target.dim = 2;
  const Vec mu = {1.0, -2.0};
  target.components = {{1.0, mu, 0.5}};
  // Cosine schedule: sigma_T > 0.999, so N(0, I) initial noise matches the
  // terminal marginal and the rollout is unbiased.
  const NoiseSchedule sched = make_schedule(50, ScheduleKind::CosineAlphaBar);
  const GmDenoiser model(target, &sched);
  const PromptSpec prompt = pinned_prompt(1.0);

  const std::size_t n = 200;
  std::vector<Vec> samples;
  NfeCounter counter;
  for (std::size_t i = 1; i <= n; ++i) {
    Rng rng(mix_seed(i, 0, 0, 0));
    Vec x(2);
    rng.fill_normal(x.data(), 2);
    samples.push_back(
        rollout_to_x0({x, 50, 0}, model, sched, prompt, counter).first);
  }
  std::string detail;
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (const Vec& s : samples) mean += s[j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const Vec& s : samples) ss += (s[j] - mean) * (s[j] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    require(std::fabs(mean - mu[j]) <= 0.1,
            "coord " + std::to_string(j) + " mean " + fmt(mean) +
                " not within 0.1 of " + fmt(mu[j]));
    require(std::fabs(sd - 0.5) <= 0.15,
            "coord " + std::to_string(j) + " std " + fmt(sd) +
                " not within 0.15 of 0.5");
    detail += (j ? "; " : "") + std::string("coord") + std::to_string(j) +
              " mean " + fmt(mean) + " std " + fmt(sd);
  }
  return "200 seeds: " + detail;
}

// ---------------------------------------------------------------------------
// 4. Posterior-mean oracle vs Gauss-Hermite quadrature.
// ---------------------------------------------------------------------------
std::string c4_posterior_mean_oracle() {
  GaussianMixtureTarget target;
  target.dim = 1;
  target.components = {{0.3, {-2.0}, 0.35}, {0.7, {1.5}, 0.7}};
  const std::vector<oracle::Gm1dComponent> comps = {{0.3, -2.0, 0.35},
                                                    {0.7, 1.5, 0.7}};
  const NoiseSchedule sched = make_schedule(50, ScheduleKind::LinearAlphaBar);
  double max_err = 0.0;
  std::size_t probes = 0;
  for (double x : {-3.0, -1.5, 0.0, 1.5, 3.0})
    for (std::size_t t : {5u, 15u, 25u, 35u, 45u}) {
      const Vec got = gm_predict_noise(target, sched, {x}, t);
      const double want = oracle::gh_predict_noise_1d(
          comps, sched.zeta[t], sched.sigma[t], x);
      max_err = std::max(max_err, std::fabs(got[0] - want));
      ++probes;
    }
  require(probes == 25, "expected 25 probes");
  require(max_err <= 1e-6,
          "posterior mean mismatch: max err " + fmt(max_err) + " > 1e-6");
  return "25 probes, max err vs 96-node GH " + fmt(max_err);
}

// ---------------------------------------------------------------------------
// 5. Baseline equivalences, exact.
// ---------------------------------------------------------------------------
std::string c5_baseline_equivalences() {
  GaussianMixtureTarget target;
  target.dim = 2;
  target.components = {{0.5, {3.0, 3.0}, 0.5}, {0.5, {-3.0, -3.0}, 0.5}};

  Bed bed(target, 50, 1.0);
  SearchConfig tmpl;
  tmpl.T = 50;
  tmpl.lambda = 0.0;
  tmpl.seed = 99;

  // imagery with an empty schedule and pool N == best_of_n(N).
  SearchConfig img = tmpl;
  img.strategy = Strategy::Imagery;
  img.size_schedule = {5};
  const RunRecord a = run_search(img, bed.ctx);
  SearchConfig bon = tmpl;
  bon.strategy = Strategy::BestOfN;
  bon.n_base = 5;
  const RunRecord b = run_search(bon, bed.ctx);
  require(a.winner.id == b.winner.id && a.winner.reward == b.winner.reward &&
              a.winner.x0 == b.winner.x0,
          "imagery(empty schedule, pool 5) != best_of_n(5)");

  // beam_search(width k, factor 1) == best_of_n(k).
  SearchConfig beam = tmpl;
  beam.strategy = Strategy::Beam;
  beam.n_base = 4;
  beam.branch_factor = 1;
  beam.imagery_schedule = {20, 40};
  const RunRecord w = run_search(beam, bed.ctx);
  SearchConfig bon4 = tmpl;
  bon4.strategy = Strategy::BestOfN;
  bon4.n_base = 4;
  const RunRecord b4 = run_search(bon4, bed.ctx);
  require(w.winner.id == b4.winner.id && w.winner.reward == b4.winner.reward &&
              w.winner.x0 == b4.winner.x0 && w.nfe_total == b4.nfe_total,
          "beam(width 4, factor 1) != best_of_n(4)");

  // n=1 / width=1 / particles=1 all equal one plain DDIM rollout.
  Rng rng(mix_seed(tmpl.seed, 0, 0, 0));
  Vec x(2);
  rng.fill_normal(x.data(), 2);
  NfeCounter counter;
  const Vec plain =
      rollout_to_x0({x, 50, 0}, bed.model, bed.schedule, bed.ctx.prompt,
                    counter)
          .first;
  SearchConfig one = tmpl;
  one.strategy = Strategy::Imagery;
  one.imagery_schedule = {10, 30};
  one.size_schedule = {1, 1, 1};
  require(run_search(one, bed.ctx).winner.x0 == plain,
          "imagery all-1 sizes != plain rollout");
  one = tmpl;
  one.strategy = Strategy::BestOfN;
  one.n_base = 1;
  require(run_search(one, bed.ctx).winner.x0 == plain,
          "best_of_n(1) != plain rollout");
  one = tmpl;
  one.strategy = Strategy::Particle;
  one.n_base = 1;
  one.imagery_schedule = {10, 30};
  require(run_search(one, bed.ctx).winner.x0 == plain,
          "particle(1) != plain rollout");
  one = tmpl;
  one.strategy = Strategy::Beam;
  one.n_base = 1;
  one.branch_factor = 1;
  one.imagery_schedule = {10, 30};
  require(run_search(one, bed.ctx).winner.x0 == plain,
          "beam(1, factor 1) != plain rollout");
  return "pool/width/particle collapses all bitwise-equal";
}

// ---------------------------------------------------------------------------
// 6. Scaling-law analogue on the 4-mode testbed.
// ---------------------------------------------------------------------------
std::string c6_scaling_law() {
  const GaussianMixtureTarget target = four_modes();
  RewardConfig weights;  // ta-only: isolate target alignment
  weights.alpha_base = 0.0;
  weights.kappa = 0.0;
  weights.beta = 1.0;
  weights.gamma = 0.0;
  weights.omega = 0.0;

  SearchConfig img_tmpl;
  img_tmpl.strategy = Strategy::Imagery;
  img_tmpl.T = 50;
  img_tmpl.lambda = 0.0;
  img_tmpl.imagery_schedule = {40, 45};
  img_tmpl.size_schedule = {2, 1, 1};
  img_tmpl.eta_branch = 1.0;
  SearchConfig bon_tmpl;
  bon_tmpl.strategy = Strategy::BestOfN;
  bon_tmpl.T = 50;

  const std::vector<std::uint64_t> budgets = {50, 100, 200, 400};
  const std::size_t n_seeds = 50;
  std::vector<double> img_means;
  std::vector<double> img_at_8x, bon_at_8x;

  for (std::uint64_t budget : budgets) {
    const SearchConfig img_fit = fit_to_budget(img_tmpl, budget);
    const SearchConfig bon_fit = fit_to_budget(bon_tmpl, budget);
    double img_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
      Bed bed(target, 50, 1.0, weights);
      SearchConfig ic = img_fit;
      ic.seed = seed;
      const RunRecord ir = run_search(ic, bed.ctx);
      require(ir.nfe_total * 20 <= budget * 21,
              "imagery NFE " + std::to_string(ir.nfe_total) +
                  " above 1.05x budget " + std::to_string(budget));
      img_sum += ir.winner.reward;
      SearchConfig bc = bon_fit;
      bc.seed = seed;
      const RunRecord br = run_search(bc, bed.ctx);
      require(br.nfe_total * 20 <= budget * 21,
              "best-of-n NFE above 1.05x budget");
      if (budget == budgets.back()) {
        img_at_8x.push_back(ir.winner.reward);
        bon_at_8x.push_back(br.winner.reward);
      }
    }
    img_means.push_back(img_sum / static_cast<double>(n_seeds));
  }

  for (std::size_t i = 1; i < img_means.size(); ++i)
    require(img_means[i] >= img_means[i - 1] - 1e-12,
            "imagery mean reward decreased from budget " +
                std::to_string(budgets[i - 1]) + " to " +
                std::to_string(budgets[i]));

  // One-sided paired bootstrap on the 8x margins.
  std::vector<double> margins(n_seeds);
  for (std::size_t i = 0; i < n_seeds; ++i)
    margins[i] = img_at_8x[i] - bon_at_8x[i];
  std::mt19937_64 boot_rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, n_seeds - 1);
  std::vector<double> boots(4000);
  for (double& bmean : boots) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_seeds; ++i) s += margins[pick(boot_rng)];
    bmean = s / static_cast<double>(n_seeds);
  }
  std::sort(boots.begin(), boots.end());
  const double lb95 = boots[boots.size() / 20];  // 5th percentile
  require(lb95 >= 0.0,
          "8x-budget margin lb95 " + fmt(lb95) + " below zero");

  std::string means;
  for (double m : img_means) means += (means.empty() ? "" : "/") + fmt(m);
  return "imagery means " + means + ", 8x margin lb95 " + fmt(lb95);
}

// ---------------------------------------------------------------------------
// 7. SaDSS robustness across semantic distances.
// ---------------------------------------------------------------------------
std::string c7_sadss_robustness() {
  const GaussianMixtureTarget target = four_modes();
  RewardConfig weights;
  weights.alpha_base = 1.0;
  weights.kappa = 0.0;
  weights.beta = 1.0;
  weights.gamma = 1.0;
  weights.omega = 0.0;

  SearchConfig img;
  img.strategy = Strategy::Imagery;
  img.T = 50;
  img.lambda = 1.0;  // SaDSS on
  img.imagery_schedule = {48};
  img.size_schedule = {5, 3};
  SearchConfig bon;
  bon.strategy = Strategy::BestOfN;
  bon.T = 50;
  bon.n_base = 12;

  const std::vector<double> dsems = {0.2, 0.6, 1.2};
  const std::size_t n_seeds = 50;
  std::vector<double> img_means, bon_means;
  for (double d : dsems) {
    double img_sum = 0.0, bon_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
      Bed bed(target, 50, d, weights);
      SearchConfig ic = img;
      ic.seed = seed;
      img_sum += run_search(ic, bed.ctx).winner.reward;
      SearchConfig bc = bon;
      bc.seed = seed;
      bon_sum += run_search(bc, bed.ctx).winner.reward;
    }
    img_means.push_back(img_sum / static_cast<double>(n_seeds));
    bon_means.push_back(bon_sum / static_cast<double>(n_seeds));
  }
  auto variance = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size());
  };
  const double iv = variance(img_means);
  const double bv = variance(bon_means);
  require(iv <= bv, "imagery cross-prompt variance " + fmt(iv) +
                        " exceeds best-of-n's " + fmt(bv));
  return "cross-prompt variance " + fmt(iv) + " (imagery) vs " + fmt(bv) +
         " (best-of-n)";
}

// ---------------------------------------------------------------------------
// 8. Bench builder vs brute force on random catalogs.
// ---------------------------------------------------------------------------
std::string c8_bench_brute_force() {
  std::mt19937_64 rng(808);
  const EmbeddingTable table;  // toy-embedder path

  auto word = [&] {
    static const char* pool[] = {"run", "sit", "fly", "arc", "bolt"};
    if (rng() % 6 == 0) return std::string(pool[rng() % 5]);
    const std::size_t len = 3 + rng() % 6;
    std::string w;
    for (std::size_t i = 0; i < len; ++i)
      w.push_back(static_cast<char>('a' + rng() % 26));
    return w;
  };
  auto unique_words = [&](std::size_t n) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    while (out.size() < n) {
      std::string w = word();
      if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
  };

  for (int rep = 0; rep < 100; ++rep) {
    const PairKind kind =
        rep % 2 ? PairKind::ActionAction : PairKind::ObjectAction;
    ConceptCatalog cat;
    cat.provenance = "random";
    while (true) {
      const std::size_t n_obj =
          kind == PairKind::ObjectAction ? 1 + rng() % 25 : rng() % 10;
      const std::size_t n_act = 2 + rng() % std::min<std::size_t>(
                                                24, 48 - n_obj);
      cat.objects = unique_words(n_obj);
      cat.actions = unique_words(n_act);
      std::set<std::string> universe(cat.objects.begin(), cat.objects.end());
      universe.insert(cat.actions.begin(), cat.actions.end());
      if (universe.size() >= 3) break;
    }

    // Brute force, written independently of bench.cpp: positions straight
    // from the shared plane, argmax scans, lexicographic tie rules, dedup,
    // sort, truncate.
    std::vector<std::string> universe;
    std::set<std::string> seen;
    for (const auto& list : {cat.objects, cat.actions})
      for (const std::string& c : list)
        if (seen.insert(c).second) universe.push_back(c);
    const std::vector<ProjectedPoint> pts = project_texts(universe, table);
    std::map<std::string, std::pair<double, double>> pos;
    for (const ProjectedPoint& p : pts) pos[p.source_text] = {p.x, p.y};
    auto dist = [&](const std::string& a, const std::string& b) {
      return std::hypot(pos.at(a).first - pos.at(b).first,
                        pos.at(a).second - pos.at(b).second);
    };
    std::vector<ConceptPair> expect;
    if (kind == PairKind::ObjectAction) {
      for (const std::string& o : cat.objects) {
        std::string best;
        double best_d = -1.0;
        for (const std::string& act : cat.actions) {
          if (act == o) continue;
          const double d = dist(o, act);
          if (d > best_d || (d == best_d && !best.empty() && act < best)) {
            best = act;
            best_d = d;
          }
        }
        if (!best.empty()) expect.push_back({o, best, kind, best_d});
      }
    } else {
      std::set<std::pair<std::string, std::string>> dedup;
      for (const std::string& a1 : cat.actions) {
        std::string best;
        double best_d = -1.0;
        for (const std::string& a2 : cat.actions) {
          if (a1 == a2) continue;
          const double d = dist(a1, a2);
          if (d > best_d || (d == best_d && !best.empty() && a2 < best)) {
            best = a2;
            best_d = d;
          }
        }
        if (best.empty()) continue;
        const auto key = std::minmax(a1, best);
        if (dedup.insert(key).second)
          expect.push_back({key.first, key.second, kind, best_d});
      }
    }
    std::sort(expect.begin(), expect.end(),
              [](const ConceptPair& l, const ConceptPair& r) {
                if (l.distance != r.distance) return l.distance > r.distance;
                if (l.a != r.a) return l.a < r.a;
                return l.b < r.b;
              });
    const std::size_t top_k = 1 + rng() % (expect.size() + 2);
    const bool expect_short = top_k > expect.size();
    if (top_k < expect.size()) expect.resize(top_k);

    const DistantPairs got = build_distant_pairs(cat, table, kind, top_k);
    require(got.short_of_top_k == expect_short,
            "short_of_top_k flag mismatch at rep " + std::to_string(rep));
    require(got.pairs.size() == expect.size(),
            "pair count mismatch at rep " + std::to_string(rep));
    for (std::size_t i = 0; i < expect.size(); ++i) {
      const ConceptPair& e = expect[i];
      const ConceptPair& g = got.pairs[i];
      require(g.a == e.a && g.b == e.b && g.kind == e.kind &&
                  g.distance == e.distance,
              "pair " + std::to_string(i) + " mismatch at rep " +
                  std::to_string(rep) + ": got (" + g.a + ", " + g.b +
                  "), want (" + e.a + ", " + e.b + ")");
    }
  }
  return "100 random catalogs, selection identical";
}

// ---------------------------------------------------------------------------
// 9. CLI determinism at worker counts 1 and 8.
// ---------------------------------------------------------------------------
std::string c9_cli_determinism() {
  std::string cli;
  if (const char* env = std::getenv("IMAGERY_CLI"); env && *env) cli = env;
  require(!cli.empty() && fs::exists(cli),
          "IMAGERY_CLI not set or missing; cannot drive the CLI");

  const fs::path dir = oracle::make_temp_dir("acceptance_cli");
  oracle::write_file((dir / "target.json").string(),
                     R"({"dim": 2, "components": [
    {"w": 0.5, "mu": [3.0, 3.0], "s": 0.5},
    {"w": 0.5, "mu": [-3.0, -3.0], "s": 0.5}]})");
  oracle::write_file((dir / "prompt.json").string(),
                     R"({"text": "a cat on a mat", "entities": ["cat", "mat"],
    "d_sem": 0.8})");
  oracle::write_file((dir / "search.json").string(), R"({
    "search": {"strategy": "imagery", "T": 50, "lambda": 1.0,
               "imagery_schedule": [30, 45], "size_schedule": [5, 3, 2],
               "seed": 11},
    "target_path": "target.json"})");
  oracle::write_file((dir / "sweep.json").string(), R"({
    "prompts": [{"text": "a cat on a mat", "entities": ["cat", "mat"],
                 "d_sem": 0.8}],
    "target_path": "target.json",
    "configs": [
      {"label": "bon", "search": {"strategy": "best-of-n", "T": 50}},
      {"label": "img", "search": {"strategy": "imagery", "T": 50,
        "imagery_schedule": [40, 45], "size_schedule": [2, 1, 1]}}],
    "budgets": [50, 100],
    "seeds": [1, 2]})");

  auto run = [&](const std::string& args) {
    const auto res =
        oracle::run_cmd("'" + cli + "' " + args + " 2>/dev/null");
    require(res.status == 0, "CLI exited " + std::to_string(res.status) +
                                 " for: " + args);
  };
  auto masked_record = [&](const fs::path& p) {
    std::ifstream in(p);
    require(static_cast<bool>(in), "missing run record " + p.string());
    json j = json::parse(in);
    j["wall_time"] = 0.0;
    return j.dump();
  };
  auto masked_rows = [&](const fs::path& p) {
    std::vector<SweepRow> rows = load_rows_csv(p.string());
    for (SweepRow& r : rows) r.wall_time = 0.0;
    return rows_to_csv(rows);
  };
  const std::string base = " --config '" + (dir / "search.json").string() +
                           "' --prompt '" + (dir / "prompt.json").string() +
                           "'";
  run("--workers 1 search run" + base + " --out '" +
      (dir / "r1.json").string() + "'");
  run("--workers 8 search run" + base + " --out '" +
      (dir / "r8.json").string() + "'");
  run("--workers 8 search run" + base + " --out '" +
      (dir / "r8b.json").string() + "'");
  const std::string rec1 = masked_record(dir / "r1.json");
  require(rec1 == masked_record(dir / "r8.json"),
          "search run differs between 1 and 8 workers");
  require(rec1 == masked_record(dir / "r8b.json"),
          "search run differs between repeats at 8 workers");

  const std::string sweep_base =
      " sweep run --config '" + (dir / "sweep.json").string() + "'";
  run("--workers 1" + sweep_base + " --out-dir '" + (dir / "s1").string() +
      "'");
  run("--workers 8" + sweep_base + " --out-dir '" + (dir / "s8").string() +
      "'");
  run("--workers 8" + sweep_base + " --out-dir '" + (dir / "s8b").string() +
      "'");
  const std::string rows1 = masked_rows(dir / "s1" / "rows.csv");
  require(rows1 == masked_rows(dir / "s8" / "rows.csv"),
          "sweep rows differ between 1 and 8 workers");
  require(rows1 == masked_rows(dir / "s8b" / "rows.csv"),
          "sweep rows differ between repeats at 8 workers");
  fs::remove_all(dir);
  return "search + sweep byte-identical across reruns and worker counts";
}

// ---------------------------------------------------------------------------
// 10. NFE accounting vs an instrumented denoiser.
// ---------------------------------------------------------------------------
std::string c10_nfe_accounting() {
  GaussianMixtureTarget target;
  target.dim = 2;
  target.components = {{0.5, {2.0, 2.0}, 0.5}, {0.5, {-2.0, -2.0}, 0.5}};
  std::mt19937_64 rng(1010);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t T = 20 + rng() % 30;
    NoiseSchedule sched = make_schedule(T, ScheduleKind::LinearAlphaBar);
    GmDenoiser inner(target, &sched);
    CountingModel counting(inner);
    AnalyticReward reward(target, 0);
    SearchContext ctx;
    ctx.model = &counting;
    ctx.schedule = &sched;
    ctx.reward = &reward;
    ctx.prompt = pinned_prompt(0.9);
    ctx.d_sem = 0.9;
    ctx.workers = 1;

    SearchConfig cfg;
    cfg.strategy = static_cast<Strategy>(rep % 4);
    cfg.T = T;
    cfg.seed = 5000 + rep;
    cfg.lambda = (rep % 3 == 0) ? 1.0 : 0.0;
    std::vector<std::size_t> steps;
    for (std::size_t s = 4 + rng() % 6; s < T; s += 6 + rng() % 6)
      steps.push_back(s);
    cfg.imagery_schedule = steps;
    cfg.n_base = 1 + rng() % 5;
    cfg.branch_factor = 1 + rng() % 3;
    if (cfg.strategy == Strategy::Imagery) {
      cfg.size_schedule.assign(steps.size() + 1, 0);
      cfg.size_schedule[0] = 2 + rng() % 5;
      for (std::size_t i = 1; i <= steps.size(); ++i)
        cfg.size_schedule[i] = 1 + rng() % cfg.size_schedule[0];
    }
    const RunRecord r = run_search(cfg, ctx);
    require(r.nfe_total == counting.calls,
            "rep " + std::to_string(rep) + " (" +
                std::string(to_string(cfg.strategy)) + "): recorded " +
                std::to_string(r.nfe_total) + " vs instrumented " +
                std::to_string(counting.calls));
  }
  return "20 randomized configs, recorded == instrumented";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<std::string()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"eq1-identity", c1_eq1_identity},
      {"eq2-eq3-fixtures", c2_arithmetic_fixtures},
      {"sampler-moments", c3_sampler_moments},
      {"posterior-mean-oracle", c4_posterior_mean_oracle},
      {"baseline-equivalences", c5_baseline_equivalences},
      {"scaling-law", c6_scaling_law},
      {"sadss-robustness", c7_sadss_robustness},
      {"bench-brute-force", c8_bench_brute_force},
      {"cli-determinism", c9_cli_determinism},
      {"nfe-accounting", c10_nfe_accounting},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = criteria[i].fn();
    } catch (const CheckFail& f) {
      ok = false;
      detail = f.msg;
    } catch (const Error& e) {
      ok = false;
      detail = std::string("unexpected error (") + to_string(e.kind()) +
               "): " + e.what();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("unexpected exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (ok ? "PASS" : "FAIL") << ": [" << i + 1 << "/10] "
              << criteria[i].name << " — " << detail << " (" << fmt(secs)
              << "s)" << std::endl;
    if (!ok) ++failures;
  }
  return failures;
}
