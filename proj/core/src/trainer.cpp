#include "nel/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace nel {

EdgeSets build_edge_sets(const Corpus& corpus, const FeatureVocab& vocab,
                         const CandidateDictionary& dict, const KnowledgeGraph& kg,
                         const std::vector<double>& tuple_weights) {
  if (!tuple_weights.empty() && tuple_weights.size() != corpus.tuples.size()) {
    throw std::invalid_argument("tuple_weights must match the tuple count");
  }
  EdgeSets sets;
  const auto& tuples = corpus.tuples;
  sets.mention_count = static_cast<int>(tuples.size());

  // Mention rows are addressed by mid, so mids must be dense and unique.
  std::vector<char> seen_mid(tuples.size(), 0);
  for (const auto& t : tuples) {
    auto mid = t.span.mid;
    if (mid < 0 || mid >= static_cast<std::int64_t>(tuples.size()) || seen_mid[mid]) {
      throw std::invalid_argument("tuples need dense unique mids 0..n-1; renumber first");
    }
    seen_mid[static_cast<std::size_t>(mid)] = 1;
  }

  // Deterministic entity interning: dictionary candidates by sorted surface,
  // then graph entities in file order, then tuple golds in corpus order.
  for (const auto& surface : dict.surfaces_sorted()) {
    for (const auto& c : candidates_for(surface, dict)) sets.entities.add(c.entity);
  }
  for (const auto& name : kg.entities().names()) sets.entities.add(name);
  for (const auto& name : kg.types().names()) sets.types.add(name);
  for (const auto& t : tuples) sets.entities.add(t.gold_entity);

  for (const auto& [key, weight] : vocab.pair_counts()) {
    sets.fe.push_back({key.first, sets.entities.add(key.second), weight});
  }

  for (const auto& t : tuples) {
    MyTrainItem item;
    item.mid = static_cast<int>(t.span.mid);
    item.gold = *sets.entities.find(t.gold_entity);
    auto cands = candidates_for(t.span.surface, dict);
    if (cands.empty()) {
      throw std::invalid_argument("tuple surface '" + t.span.surface +
                                  "' has no dictionary candidates; drop unlinkables first");
    }
    bool has_gold = false;
    for (const auto& c : cands) {
      int id = *sets.entities.find(c.entity);
      if (id == item.gold) has_gold = true;
      item.candidates.push_back(id);
    }
    if (!has_gold) {
      throw std::invalid_argument("gold entity '" + t.gold_entity +
                                  "' missing from candidates of '" + t.span.surface + "'");
    }
    sets.my.push_back(std::move(item));
  }

  for (const auto& e : kg.ee_edges()) {
    int a = *sets.entities.find(kg.entities().name(e.a));
    int b = *sets.entities.find(kg.entities().name(e.b));
    sets.ee.push_back({a, b, e.weight});
    sets.quad_ctx.add_ee_pair(a, b);
  }
  for (const auto& e : kg.et_edges()) {
    int entity = *sets.entities.find(kg.entities().name(e.entity));
    int type = *sets.types.find(kg.types().name(e.type));
    sets.et.push_back({entity, type, e.weight});
  }

  // Co-sentence mention pairs; sentence ordinals are first-seen order.
  sets.quad_ctx.mentions_of_entity.assign(static_cast<std::size_t>(sets.entities.size()),
                                          {});
  sets.quad_ctx.sentence_of_mid.assign(tuples.size(), -1);
  std::unordered_map<std::string, int> sentence_ordinal;
  std::vector<std::vector<int>> tuples_by_sentence;
  std::vector<int> gold_of_mid(tuples.size(), -1);
  for (const auto& t : tuples) {
    auto key = sentence_key(t.span.sentence);
    auto [it, inserted] =
        sentence_ordinal.emplace(key, static_cast<int>(tuples_by_sentence.size()));
    if (inserted) tuples_by_sentence.emplace_back();
    int mid = static_cast<int>(t.span.mid);
    int gold = *sets.entities.find(t.gold_entity);
    sets.quad_ctx.sentence_of_mid[static_cast<std::size_t>(mid)] = it->second;
    sets.quad_ctx.mentions_of_entity[static_cast<std::size_t>(gold)].push_back(mid);
    gold_of_mid[static_cast<std::size_t>(mid)] = gold;
    tuples_by_sentence[static_cast<std::size_t>(it->second)].push_back(mid);
  }
  for (auto& mids : tuples_by_sentence) {
    std::sort(mids.begin(), mids.end());
    for (std::size_t i = 0; i < mids.size(); ++i) {
      for (std::size_t j = i + 1; j < mids.size(); ++j) {
        sets.quads.push_back({gold_of_mid[static_cast<std::size_t>(mids[i])],
                              gold_of_mid[static_cast<std::size_t>(mids[j])], mids[i],
                              mids[j]});
      }
    }
  }

  // Per-set noise distributions, all count^0.75.
  {
    std::vector<std::pair<int, double>> counts;
    for (const auto& [entity, mass] : vocab.entity_totals()) {
      counts.emplace_back(*sets.entities.find(entity), mass);
    }
    if (!counts.empty()) sets.fe_noise.emplace(counts);
  }
  {
    std::map<int, double> degree;
    for (const auto& e : sets.ee) {
      degree[e.a] += e.weight;
      degree[e.b] += e.weight;
    }
    std::vector<std::pair<int, double>> counts(degree.begin(), degree.end());
    if (!counts.empty()) sets.ee_noise.emplace(counts);
  }
  {
    std::map<int, double> mass;
    for (const auto& e : sets.et) mass[e.type] += e.weight;
    std::vector<std::pair<int, double>> counts(mass.begin(), mass.end());
    if (!counts.empty()) sets.et_noise.emplace(counts);
  }
  {
    std::map<int, double> mentions;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      double w = tuple_weights.empty() ? 1.0 : tuple_weights[i];
      mentions[gold_of_mid[static_cast<std::size_t>(tuples[i].span.mid)]] += w;
    }
    std::vector<std::pair<int, double>> counts(mentions.begin(), mentions.end());
    if (!counts.empty()) sets.quad_noise.emplace(counts);
  }

  if (sets.fe.empty()) sets.warnings.push_back("feature-entity edge set is empty; objective skipped");
  if (sets.my.empty()) sets.warnings.push_back("mention-entity set is empty; objective skipped");
  if (sets.ee.empty()) sets.warnings.push_back("entity-entity edge set is empty; objective skipped");
  if (sets.et.empty()) sets.warnings.push_back("entity-type edge set is empty; objective skipped");
  if (sets.quads.empty()) sets.warnings.push_back("coherence quad set is empty; objective skipped");
  return sets;
}

bool converged(std::span<const double> totals, double tol, long window) {
  if (window < 2) throw std::invalid_argument("convergence window must be at least 2");
  const auto n = static_cast<long>(totals.size());
  if (n < 2) return false;
  long w = std::min(window, n / 2);
  if (w < 1) return false;
  auto mean = [&](long begin, long count) {
    double s = 0.0;
    for (long i = begin; i < begin + count; ++i) s += totals[static_cast<std::size_t>(i)];
    return s / static_cast<double>(count);
  };
  double recent = mean(n - w, w);
  double previous = mean(n - 2 * w, w);
  double denom = std::abs(previous);
  if (denom == 0.0) return std::abs(recent) == 0.0;
  return std::abs(recent - previous) / denom < tol;
}

namespace {

struct Sampler {
  const EdgeSets& sets;
  ParamStore& store;
  const TrainConfig& cfg;
  TrainReport& report;
  std::atomic<long>& skipped_quads;
  bool collect;

  void apply(const SparseGrad& grad, double alpha) {
    for (const auto& e : grad.entries) {
      auto row = table(store, e.table).row(e.row);
      axpy(-alpha, {e.g.data(), e.g.size()}, row);
      project_norm(row, cfg.norm_cap);
    }
  }

  static void check_finite(double loss, const char* objective, long iteration) {
    if (!std::isfinite(loss)) {
      throw std::runtime_error(std::string("non-finite ") + objective +
                               " loss at iteration " + std::to_string(iteration));
    }
  }

  double step_fe(std::mt19937_64& rng, double alpha, long it) {
    if (sets.fe.empty() || !sets.fe_noise) return 0.0;
    double acc = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const auto& edge = sets.fe[next_index(rng, sets.fe.size())];
      auto negs = sample_negatives(*sets.fe_noise, cfg.negatives, {edge.entity}, rng);
      auto lg = fe_loss_grad(edge.feature, edge.entity, negs, store, edge.weight);
      check_finite(lg.loss, "feature-entity", it);
      apply(lg.grad, alpha);
      acc += lg.loss;
    }
    return acc / cfg.batch;
  }

  double step_my(std::mt19937_64& rng, double alpha, long it) {
    if (sets.my.empty()) return 0.0;
    double acc = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const auto& item = sets.my[next_index(rng, sets.my.size())];
      auto lg = hinge_loss_grad(item.mid, item.gold, item.candidates, store, cfg.lambda);
      check_finite(lg.loss, "mention-entity", it);
      apply(lg.grad, alpha);
      acc += lg.loss;
    }
    return acc / cfg.batch;
  }

  double step_ee(std::mt19937_64& rng, double alpha, long it) {
    if (sets.ee.empty() || !sets.ee_noise) return 0.0;
    double acc = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const auto& edge = sets.ee[next_index(rng, sets.ee.size())];
      bool flip = next_uniform(rng) < 0.5;  // undirected: both directions sampled
      int target = flip ? edge.b : edge.a;
      int context = flip ? edge.a : edge.b;
      auto negs = sample_negatives(*sets.ee_noise, cfg.negatives, {context}, rng);
      auto lg = ee_loss_grad(target, context, negs, store, edge.weight);
      check_finite(lg.loss, "entity-entity", it);
      apply(lg.grad, alpha);
      acc += lg.loss;
    }
    return acc / cfg.batch;
  }

  double step_et(std::mt19937_64& rng, double alpha, long it) {
    if (sets.et.empty() || !sets.et_noise) return 0.0;
    double acc = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const auto& edge = sets.et[next_index(rng, sets.et.size())];
      auto negs = sample_negatives(*sets.et_noise, cfg.negatives, {edge.type}, rng);
      auto lg = et_loss_grad(edge.entity, edge.type, negs, store, edge.weight);
      check_finite(lg.loss, "entity-type", it);
      apply(lg.grad, alpha);
      acc += lg.loss;
    }
    return acc / cfg.batch;
  }

  double step_coh(std::mt19937_64& rng, double alpha, long it) {
    if (sets.quads.empty() || !sets.quad_noise) return 0.0;
    double acc = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const auto& quad = sets.quads[next_index(rng, sets.quads.size())];
      std::vector<CoherenceQuad> negs;
      try {
        negs = sample_negative_quads(quad, sets.quad_ctx, *sets.quad_noise, cfg.negatives,
                                     cfg.quad_retry_budget, rng);
      } catch (const std::runtime_error&) {
        ++skipped_quads;  // this draw is skipped, training continues
        continue;
      }
      if (collect) {
        report.collected_negative_quads.insert(report.collected_negative_quads.end(),
                                               negs.begin(), negs.end());
      }
      auto lg = coherence_loss_grad(quad, negs, store);
      check_finite(lg.loss, "coherence", it);
      apply(lg.grad, alpha);
      acc += lg.loss;
    }
    return acc / cfg.batch;
  }
};

}  // namespace

TrainReport train(const EdgeSets& sets, ParamStore& store, const TrainConfig& cfg) {
  if (cfg.iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (cfg.batch < 1) throw std::invalid_argument("batch must be at least 1");
  if (cfg.negatives < 0) throw std::invalid_argument("negatives must be non-negative");
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (cfg.window < 2) throw std::invalid_argument("convergence window must be at least 2");
  if (store.entity_targets.rows < sets.entities.size() ||
      store.mentions.rows < sets.mention_count || store.types.rows < sets.types.size()) {
    throw std::invalid_argument("parameter store is smaller than the edge sets demand");
  }

  TrainReport report;
  report.parallel = cfg.threads > 1;
  for (const auto& w : sets.warnings) report.notes.push_back(w);
  std::atomic<long> skipped_quads{0};
  std::atomic<bool> stop{false};

  const int threads = std::max(1, cfg.threads);
  const long per_thread = (cfg.iterations + threads - 1) / threads;
  const bool collect = cfg.collect_negative_quads && threads == 1;
  if (cfg.collect_negative_quads && threads > 1) {
    report.notes.push_back("negative-quad collection disabled in parallel mode");
  }

  auto t0 = std::chrono::steady_clock::now();

  auto worker = [&](int tid) {
    Sampler sampler{sets, store, cfg, report, skipped_quads, collect && tid == 0};
    std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(tid));
    const bool record = tid == 0;
    for (long it = 0; it < per_thread && !stop.load(std::memory_order_relaxed); ++it) {
      double alpha = cfg.alpha;
      if (cfg.decay) {
        alpha *= std::max(1e-4, 1.0 - static_cast<double>(it) / static_cast<double>(per_thread));
      }
      double fe = sampler.step_fe(rng, alpha, it);
      double my = sampler.step_my(rng, alpha, it);
      double ee = sampler.step_ee(rng, alpha, it);
      double et = sampler.step_et(rng, alpha, it);
      double coh = sampler.step_coh(rng, alpha, it);
      if (record) {
        report.fe_loss.push_back(fe);
        report.my_loss.push_back(my);
        report.ee_loss.push_back(ee);
        report.et_loss.push_back(et);
        report.coh_loss.push_back(coh);
        report.total_loss.push_back(fe + my + ee + et + coh);
        report.iterations = it + 1;
        if (cfg.log && cfg.log_every > 0 && (it + 1) % cfg.log_every == 0) {
          *cfg.log << "iter " << (it + 1) << " fe " << fe << " my " << my << " ee " << ee
                   << " et " << et << " coh " << coh << '\n';
        }
        if (cfg.tol > 0.0 && (it + 1) % cfg.window == 0 && (it + 1) >= 2 * cfg.window &&
            converged(report.total_loss, cfg.tol, cfg.window)) {
          report.converged = true;
          stop.store(true, std::memory_order_relaxed);
        }
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
    report.notes.push_back("parallel mode: unsynchronized updates, losses from thread 0");
  }

  report.skipped_quad_draws = skipped_quads.load();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::optional<int> Model::find_feature(const Feature& f) const {
  auto it = feature_index.find(feature_key(f));
  if (it == feature_index.end()) return std::nullopt;
  return it->second;
}

std::vector<double> Model::mention_vector(const std::vector<Feature>& features) const {
  std::vector<double> out(static_cast<std::size_t>(params.dim), 0.0);
  for (const auto& f : features) {
    if (auto id = find_feature(f)) axpy(1.0, params.features.row(*id), out);
  }
  return out;
}

Model make_model(ParamStore params, const FeatureVocab& vocab, IdVocab entities,
                 IdVocab types, FeatureConfig feature_cfg) {
  Model model;
  model.params = std::move(params);
  model.feature_ids = vocab.features();
  for (int i = 0; i < vocab.size(); ++i) {
    model.feature_index.emplace(feature_key(model.feature_ids[static_cast<std::size_t>(i)]), i);
  }
  model.entities = std::move(entities);
  model.types = std::move(types);
  model.feature_cfg = std::move(feature_cfg);
  if (model.params.features.rows != static_cast<int>(model.feature_ids.size()) ||
      model.params.entity_targets.rows != model.entities.size() ||
      model.params.entity_contexts.rows != model.entities.size() ||
      model.params.types.rows != model.types.size()) {
    throw std::invalid_argument("parameter table sizes do not match the label maps");
  }
  return model;
}

void export_model_embeddings(const Model& model, const std::string& prefix) {
  std::vector<std::string> feature_labels;
  feature_labels.reserve(model.feature_ids.size());
  for (const auto& f : model.feature_ids) feature_labels.push_back(feature_key(f));
  std::vector<std::string> mention_labels;
  mention_labels.reserve(static_cast<std::size_t>(model.params.mentions.rows));
  for (int i = 0; i < model.params.mentions.rows; ++i) {
    mention_labels.push_back(std::to_string(i));
  }
  write_embedding_text(prefix + ".features.vec", model.params.features, feature_labels);
  write_embedding_text(prefix + ".mentions.vec", model.params.mentions, mention_labels);
  write_embedding_text(prefix + ".entity-target.vec", model.params.entity_targets,
                       model.entities.names());
  write_embedding_text(prefix + ".entity-context.vec", model.params.entity_contexts,
                       model.entities.names());
  write_embedding_text(prefix + ".types.vec", model.params.types, model.types.names());
}

}  // namespace nel
