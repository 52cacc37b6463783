#include "nel/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nel {

namespace {

constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) {
  return std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
}

std::uint64_t pack_pair(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t next_index(std::mt19937_64& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("cannot draw from an empty range");
  auto i = static_cast<std::size_t>(next_uniform(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

NoiseTable::NoiseTable(const std::vector<std::pair<int, double>>& counts, double power) {
  if (counts.empty()) throw std::invalid_argument("noise table needs at least one item");
  std::vector<std::pair<int, double>> sorted = counts;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  items_.reserve(sorted.size());
  std::vector<double> weights;
  weights.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto [item, count] = sorted[i];
    if (i > 0 && item == sorted[i - 1].first) {
      throw std::invalid_argument("duplicate item in noise table counts");
    }
    if (!(count > 0.0) || !std::isfinite(count)) {
      throw std::invalid_argument("noise table counts must be positive");
    }
    double w = std::pow(count, power);
    items_.push_back(item);
    weights.push_back(w);
    total += w;
  }

  // Vose alias construction: slot i owns probability slot_prob_[i] of item i,
  // the remainder goes to its alias.
  const std::size_t n = items_.size();
  slot_prob_.assign(n, 1.0);
  slot_alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    double p = weights[i] / total;
    prob_.emplace(items_[i], p);
    scaled[i] = p * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::size_t s = small.back();
    small.pop_back();
    std::size_t l = large.back();
    large.pop_back();
    slot_prob_[s] = scaled[s];
    slot_alias_[s] = static_cast<int>(l);
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (auto i : large) {
    slot_prob_[i] = 1.0;
    slot_alias_[i] = static_cast<int>(i);
  }
  for (auto i : small) {  // numeric leftovers
    slot_prob_[i] = 1.0;
    slot_alias_[i] = static_cast<int>(i);
  }
}

int NoiseTable::draw(std::mt19937_64& rng) const {
  std::size_t slot = next_index(rng, items_.size());
  if (next_uniform(rng) < slot_prob_[slot]) return items_[slot];
  return items_[static_cast<std::size_t>(slot_alias_[slot])];
}

double NoiseTable::probability(int item) const {
  // Reconstructed from the alias structure rather than echoed from the input,
  // so exactness tests check the table that sampling actually uses.
  double p = 0.0;
  const double n = static_cast<double>(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i] == item) p += slot_prob_[i] / n;
    if (items_[static_cast<std::size_t>(slot_alias_[i])] == item) {
      p += (1.0 - slot_prob_[i]) / n;
    }
  }
  return p;
}

std::vector<int> sample_negatives(const NoiseTable& table, int q,
                                  const std::vector<int>& exclude, std::mt19937_64& rng) {
  if (q < 0) throw std::invalid_argument("negative sample count must be non-negative");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(q));
  if (q == 0) return out;
  int excluded_in_support = 0;
  for (int x : exclude) {
    if (table.contains(x)) ++excluded_in_support;
  }
  if (excluded_in_support >= table.size()) {
    throw std::runtime_error("negative sampling support exhausted by exclusions");
  }
  auto is_excluded = [&](int item) {
    return std::find(exclude.begin(), exclude.end(), item) != exclude.end();
  };
  long attempts = 0;
  const long rejection_cap = 1000L * (q + 1);
  while (static_cast<int>(out.size()) < q && attempts < rejection_cap) {
    ++attempts;
    int item = table.draw(rng);
    if (!is_excluded(item)) out.push_back(item);
  }
  if (static_cast<int>(out.size()) < q) {
    // Pathological mass concentration on excluded items: fall back to an
    // explicit conditional table, which preserves the target distribution.
    std::vector<std::pair<int, double>> rest;
    for (int item : table.items()) {
      if (!is_excluded(item)) rest.emplace_back(item, table.probability(item));
    }
    NoiseTable conditional(rest, 1.0);
    while (static_cast<int>(out.size()) < q) out.push_back(conditional.draw(rng));
  }
  return out;
}

std::span<double> SparseGrad::at(TableId table, int row, int dim) {
  for (auto& e : entries) {
    if (e.table == table && e.row == row) return {e.g.data(), e.g.size()};
  }
  entries.push_back({table, row, std::vector<double>(static_cast<std::size_t>(dim), 0.0)});
  auto& g = entries.back().g;
  return {g.data(), g.size()};
}

void SparseGrad::add_scaled(TableId table, int row, double coeff,
                            std::span<const double> v) {
  axpy(coeff, v, at(table, row, static_cast<int>(v.size())));
}

LossGrad fe_loss_grad(int feature, int entity, std::span<const int> negatives,
                      const ParamStore& store, double weight) {
  LossGrad out;
  auto f = store.features.row(feature);
  auto y = store.entity_targets.row(entity);
  double s = dot(f, y);
  out.loss = -weight * log_sigmoid(s);
  double coef = -weight * (1.0 - sigmoid(s));
  out.grad.add_scaled(TableId::kFeatures, feature, coef, y);
  out.grad.add_scaled(TableId::kEntityTargets, entity, coef, f);
  for (int n : negatives) {
    auto yn = store.entity_contexts.row(n);
    double sn = dot(f, yn);
    out.loss += -weight * log_sigmoid(-sn);
    double cn = weight * sigmoid(sn);
    out.grad.add_scaled(TableId::kFeatures, feature, cn, yn);
    out.grad.add_scaled(TableId::kEntityContexts, n, cn, f);
  }
  return out;
}

LossGrad hinge_loss_grad(int mid, int gold, std::span<const int> candidates,
                         const ParamStore& store, double lambda) {
  if (std::find(candidates.begin(), candidates.end(), gold) == candidates.end()) {
    throw std::invalid_argument("gold entity missing from the candidate set");
  }
  LossGrad out;
  auto m = store.mentions.row(mid);
  auto yg = store.entity_targets.row(gold);
  double phi_gold = dot(m, yg);
  int best = -1;
  double phi_best = 0.0;
  for (int c : candidates) {
    if (c == gold) continue;
    double phi = dot(m, store.entity_targets.row(c));
    if (best < 0 || phi > phi_best) {
      best = c;
      phi_best = phi;
    }
  }
  double hinge = 0.0;
  if (best >= 0) hinge = std::max(0.0, 1.0 - (phi_gold - phi_best));
  out.loss = hinge + 0.5 * lambda * (dot(m, m) + dot(yg, yg));
  if (hinge > 0.0) {
    auto yb = store.entity_targets.row(best);
    out.grad.add_scaled(TableId::kMentions, mid, 1.0, yb);
    out.grad.add_scaled(TableId::kMentions, mid, -1.0, yg);
    out.grad.add_scaled(TableId::kEntityTargets, gold, -1.0, m);
    out.grad.add_scaled(TableId::kEntityTargets, best, 1.0, m);
  }
  if (lambda != 0.0) {
    out.grad.add_scaled(TableId::kMentions, mid, lambda, m);
    out.grad.add_scaled(TableId::kEntityTargets, gold, lambda, yg);
  }
  return out;
}

LossGrad ee_loss_grad(int target, int context, std::span<const int> negatives,
                      const ParamStore& store, double weight) {
  LossGrad out;
  auto yt = store.entity_targets.row(target);
  auto yc = store.entity_contexts.row(context);
  double s = dot(yt, yc);
  out.loss = -weight * log_sigmoid(s);
  double coef = -weight * (1.0 - sigmoid(s));
  out.grad.add_scaled(TableId::kEntityTargets, target, coef, yc);
  out.grad.add_scaled(TableId::kEntityContexts, context, coef, yt);
  for (int n : negatives) {
    auto yn = store.entity_contexts.row(n);
    double sn = dot(yt, yn);
    out.loss += -weight * log_sigmoid(-sn);
    double cn = weight * sigmoid(sn);
    out.grad.add_scaled(TableId::kEntityTargets, target, cn, yn);
    out.grad.add_scaled(TableId::kEntityContexts, n, cn, yt);
  }
  return out;
}

LossGrad et_loss_grad(int entity, int type, std::span<const int> negatives,
                      const ParamStore& store, double weight) {
  LossGrad out;
  auto y = store.entity_targets.row(entity);
  auto t = store.types.row(type);
  double s = dot(y, t);
  out.loss = -weight * log_sigmoid(s);
  double coef = -weight * (1.0 - sigmoid(s));
  out.grad.add_scaled(TableId::kEntityTargets, entity, coef, t);
  out.grad.add_scaled(TableId::kTypes, type, coef, y);
  for (int n : negatives) {
    auto tn = store.types.row(n);
    double sn = dot(y, tn);
    out.loss += -weight * log_sigmoid(-sn);
    double cn = weight * sigmoid(sn);
    out.grad.add_scaled(TableId::kEntityTargets, entity, cn, tn);
    out.grad.add_scaled(TableId::kTypes, n, cn, y);
  }
  return out;
}

double coherence_confidence(const CoherenceQuad& quad, const ParamStore& store) {
  double ie = sigmoid(dot(store.entity_targets.row(quad.e_i), store.entity_targets.row(quad.e_j)));
  double im = sigmoid(dot(store.mentions.row(quad.mid_i), store.mentions.row(quad.mid_j)));
  return ie * im + 1.0 - ie;
}

namespace {

// Chain rule for one quad given dLoss/dI, where I = Ie*Im + 1 - Ie.
void accumulate_quad(const CoherenceQuad& q, const ParamStore& store, double dI,
                     SparseGrad& grad) {
  auto yi = store.entity_targets.row(q.e_i);
  auto yj = store.entity_targets.row(q.e_j);
  auto mi = store.mentions.row(q.mid_i);
  auto mj = store.mentions.row(q.mid_j);
  double ie = sigmoid(dot(yi, yj));
  double im = sigmoid(dot(mi, mj));
  double dse = dI * (im - 1.0) * ie * (1.0 - ie);
  double dsm = dI * ie * im * (1.0 - im);
  grad.add_scaled(TableId::kEntityTargets, q.e_i, dse, yj);
  grad.add_scaled(TableId::kEntityTargets, q.e_j, dse, yi);
  grad.add_scaled(TableId::kMentions, q.mid_i, dsm, mj);
  grad.add_scaled(TableId::kMentions, q.mid_j, dsm, mi);
}

}  // namespace

LossGrad coherence_loss_grad(const CoherenceQuad& quad,
                             std::span<const CoherenceQuad> negatives,
                             const ParamStore& store) {
  LossGrad out;
  double ipos = clamp_prob(coherence_confidence(quad, store));
  out.loss = -std::log(ipos);
  accumulate_quad(quad, store, -1.0 / ipos, out.grad);
  for (const auto& neg : negatives) {
    double ineg = coherence_confidence(neg, store);
    double q = clamp_prob(1.0 - ineg);
    out.loss += -std::log(q);
    accumulate_quad(neg, store, 1.0 / q, out.grad);
  }
  return out;
}

bool QuadSamplerContext::has_ee_edge(int a, int b) const {
  return ee_pairs.count(pack_pair(a, b)) != 0;
}

bool QuadSamplerContext::co_sentence(int mid_a, int mid_b) const {
  return sentence_of_mid.at(static_cast<std::size_t>(mid_a)) ==
         sentence_of_mid.at(static_cast<std::size_t>(mid_b));
}

void QuadSamplerContext::add_ee_pair(int a, int b) { ee_pairs.insert(pack_pair(a, b)); }

std::vector<CoherenceQuad> sample_negative_quads(const CoherenceQuad& quad,
                                                 const QuadSamplerContext& ctx,
                                                 const NoiseTable& entity_noise, int q,
                                                 int retry_budget, std::mt19937_64& rng) {
  if (q < 0) throw std::invalid_argument("negative quad count must be non-negative");
  if (retry_budget < 1) throw std::invalid_argument("retry budget must be positive");
  std::vector<CoherenceQuad> out;
  out.reserve(static_cast<std::size_t>(q));
  long budget = static_cast<long>(retry_budget) * q;
  long attempts = 0;
  while (static_cast<int>(out.size()) < q) {
    if (attempts++ >= budget) {
      throw std::runtime_error("negative quad sampling exhausted its retry budget");
    }
    int e = entity_noise.draw(rng);
    const auto& mids = ctx.mentions_of_entity.at(static_cast<std::size_t>(e));
    if (mids.empty()) continue;
    int mid = mids[next_index(rng, mids.size())];
    if (ctx.co_sentence(quad.mid_i, mid)) continue;      // mentions share a sentence
    if (ctx.has_ee_edge(quad.e_i, e)) continue;          // entities are graph neighbors
    out.push_back({quad.e_i, e, quad.mid_i, mid});
  }
  return out;
}

}  // namespace nel
