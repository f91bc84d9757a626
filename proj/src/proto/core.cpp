#include "proto_tqtl/proto/core.hpp"

#include "proto_tqtl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace proto_tqtl::proto {

LatentClip::LatentClip(std::size_t height, std::size_t width, std::size_t dim, std::vector<double> data,
                       Label label)
    : height_(height), width_(width), dim_(dim), data_(std::move(data)), label_(label) {
  if (height_ == 0 || width_ == 0 || dim_ == 0) {
    throw InvariantError("latent clip dimensions must be >= 1",
                         std::to_string(height_) + "x" + std::to_string(width_) + "x" + std::to_string(dim_));
  }
  if (data_.size() != height_ * width_ * dim_) {
    throw InvariantError("latent clip size mismatch",
                         std::to_string(data_.size()) + " values for " + std::to_string(height_ * width_ * dim_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw InvariantError("latent clip entries must be finite", "");
  }
}

std::vector<std::size_t> PrototypeBank::ids_of(Label label) const {
  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    if (prototypes[j].label == label) ids.push_back(j);
  }
  return ids;
}

void PrototypeBank::validate() const {
  if (dim == 0) throw InvariantError("prototype dimension must be >= 1", "");
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    if (prototypes[j].vector.size() != dim) {
      throw InvariantError("prototype dimension mismatch", "prototype " + std::to_string(j));
    }
  }
  if (fc.rows != kNumClasses || fc.cols != prototypes.size() || fc.values.size() != fc.rows * fc.cols) {
    throw InvariantError("fc weight shape must be K x m", "");
  }
}

double TrainConfig::separation_weight() const { return literal_lambda_signs ? lambda_sep : std::fabs(lambda_sep); }

void TrainConfig::validate() const {
  if (projection_period < 1) throw InvariantError("projection_period must be >= 1", "");
  if (!(lr_proto > 0.0)) throw InvariantError("lr_proto must be > 0", std::to_string(lr_proto));
  if (!(lr_fc > 0.0)) throw InvariantError("lr_fc must be > 0", std::to_string(lr_fc));
  if (protos_per_class < 1) throw InvariantError("protos_per_class must be >= 1", "");
}

// ---------------------------------------------------------------------------

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    acc += d * d;
  }
  return acc;
}

double patch_similarity(std::span<const double> patch, std::span<const double> proto) {
  return 1.0 / (1.0 + squared_distance(patch, proto));
}

namespace {

void check_dims(const LatentClip& clip, const PrototypeBank& bank) {
  if (clip.dim() != bank.dim) {
    throw DimensionError("clip has C=" + std::to_string(clip.dim()) + ", bank has C=" + std::to_string(bank.dim));
  }
}

/// Per-sample quantities shared by the forward pass, the losses and their
/// gradients.
struct Activation {
  Vector scores;                    // max-pooled similarity per prototype
  std::vector<std::size_t> best;    // patch index achieving it
  Vector min_dist;                  // min squared distance per prototype
  std::vector<std::size_t> nearest; // patch index achieving the min distance
};

Activation activate(const LatentClip& clip, const PrototypeBank& bank) {
  check_dims(clip, bank);
  const std::size_t m = bank.size();
  Activation a{Vector(m, 0.0), std::vector<std::size_t>(m, 0), Vector(m, std::numeric_limits<double>::infinity()),
               std::vector<std::size_t>(m, 0)};
  for (std::size_t j = 0; j < m; ++j) {
    const auto& p = bank.prototypes[j].vector;
    for (std::size_t z = 0; z < clip.num_patches(); ++z) {
      const double d = squared_distance(clip.patch(z), p);
      const double s = 1.0 / (1.0 + d);
      if (s > a.scores[j]) {
        a.scores[j] = s;
        a.best[j] = z;
      }
      if (d < a.min_dist[j]) {
        a.min_dist[j] = d;
        a.nearest[j] = z;
      }
    }
  }
  return a;
}

/// Lowest-id prototype among `ids` with the smallest min distance.
std::size_t closest_of(const Activation& a, const std::vector<std::size_t>& ids) {
  std::size_t best = ids.front();
  for (std::size_t j : ids) {
    if (a.min_dist[j] < a.min_dist[best]) best = j;
  }
  return best;
}

std::array<std::vector<std::size_t>, kNumClasses> class_ids(const PrototypeBank& bank) {
  return {bank.ids_of(Label::Real), bank.ids_of(Label::Fake)};
}

void require_prototypes(const std::vector<std::size_t>& ids, Label label) {
  if (ids.empty()) throw Error("class " + std::string(to_string(label)) + " has no prototypes");
}

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) acc += a[c] * b[c];
  return acc;
}

} // namespace

Vector prototype_layer(const LatentClip& clip, const PrototypeBank& bank) { return activate(clip, bank).scores; }

std::array<double, kNumClasses> logits(std::span<const double> scores, const PrototypeBank& bank) {
  if (scores.size() != bank.size() || bank.fc.cols != scores.size()) {
    throw DimensionError("score vector has " + std::to_string(scores.size()) + " entries, bank has " +
                         std::to_string(bank.size()) + " prototypes");
  }
  std::array<double, kNumClasses> a{};
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t j = 0; j < scores.size(); ++j) a[k] += bank.fc(k, j) * scores[j];
  }
  return a;
}

std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& a) {
  const double top = *std::max_element(a.begin(), a.end());
  std::array<double, kNumClasses> p{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    p[k] = std::exp(a[k] - top);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::array<double, kNumClasses> predict(std::span<const double> scores, const PrototypeBank& bank) {
  return softmax(logits(scores, bank));
}

Label argmax_class(const std::array<double, kNumClasses>& probs) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k) {
    if (probs[k] > probs[best]) best = k;
  }
  return label_at(best);
}

double accuracy(Batch batch, const PrototypeBank& bank) {
  if (batch.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& clip : batch) {
    const Vector s = prototype_layer(clip, bank);
    if (argmax_class(predict(s, bank)) == clip.label()) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

// ---------------------------------------------------------------------------

namespace {

double log_sum_exp(const std::array<double, kNumClasses>& a) {
  const double top = *std::max_element(a.begin(), a.end());
  double sum = 0.0;
  for (double v : a) sum += std::exp(v - top);
  return top + std::log(sum);
}

double sample_ce(const Activation& act, Label y, const PrototypeBank& bank) {
  const auto a = logits(act.scores, bank);
  return log_sum_exp(a) - a[index_of(y)];
}

} // namespace

double loss_ce(Batch batch, const PrototypeBank& bank) {
  if (batch.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& clip : batch) acc += sample_ce(activate(clip, bank), clip.label(), bank);
  return acc / static_cast<double>(batch.size());
}

double loss_clus(Batch batch, const PrototypeBank& bank) {
  if (batch.empty()) return 0.0;
  const auto ids = class_ids(bank);
  double acc = 0.0;
  for (const auto& clip : batch) {
    const auto& own = ids[index_of(clip.label())];
    require_prototypes(own, clip.label());
    const Activation a = activate(clip, bank);
    acc += a.min_dist[closest_of(a, own)];
  }
  return acc / static_cast<double>(batch.size());
}

double loss_sep(Batch batch, const PrototypeBank& bank) {
  if (batch.empty()) return 0.0;
  const auto ids = class_ids(bank);
  double acc = 0.0;
  for (const auto& clip : batch) {
    const Label other = opposite(clip.label());
    require_prototypes(ids[index_of(other)], other);
    const Activation a = activate(clip, bank);
    acc += a.min_dist[closest_of(a, ids[index_of(other)])];
  }
  return -acc / static_cast<double>(batch.size());
}

double loss_div(const PrototypeBank& bank, double s_max) {
  std::vector<double> norms(bank.size());
  for (std::size_t j = 0; j < bank.size(); ++j) {
    norms[j] = norm(bank.prototypes[j].vector);
    if (norms[j] == 0.0) throw InvariantError("diversity loss undefined for a zero prototype", std::to_string(j));
  }
  double acc = 0.0;
  for (const auto& ids : class_ids(bank)) {
    for (std::size_t a : ids) {
      for (std::size_t b : ids) {
        if (a == b) continue;
        const double cos = dot(bank.prototypes[a].vector, bank.prototypes[b].vector) / (norms[a] * norms[b]);
        acc += std::max(0.0, cos - s_max);
      }
    }
  }
  return acc;
}

double weighted_total(double ce, double clus, double sep, double div, const TrainConfig& cfg) {
  return ce + cfg.lambda_clus * clus + cfg.separation_weight() * sep + cfg.lambda_div * div;
}

LossTerms loss_total(Batch batch, const PrototypeBank& bank, const TrainConfig& cfg) {
  LossTerms t;
  t.ce = loss_ce(batch, bank);
  t.clus = loss_clus(batch, bank);
  t.sep = loss_sep(batch, bank);
  t.div = loss_div(bank, cfg.s_max);
  t.total = weighted_total(t.ce, t.clus, t.sep, t.div, cfg);
  return t;
}

// ---------------------------------------------------------------------------

Gradients gradients(Batch batch, const PrototypeBank& bank, const TrainConfig& cfg) {
  bank.validate();
  const std::size_t m = bank.size();
  const std::size_t dim = bank.dim;
  Gradients g{std::vector<Vector>(m, Vector(dim, 0.0)), Matrix::zeros(kNumClasses, m)};
  const auto ids = class_ids(bank);

  // d/dp ||z - p||^2 = 2 (p - z), scaled by `weight`.
  auto add_distance_grad = [&](std::size_t j, std::span<const double> z, double weight) {
    const auto& p = bank.prototypes[j].vector;
    for (std::size_t c = 0; c < dim; ++c) g.prototypes[j][c] += weight * 2.0 * (p[c] - z[c]);
  };

  if (!batch.empty()) {
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const double w_sep = cfg.separation_weight();
    for (const auto& clip : batch) {
      const Activation act = activate(clip, bank);
      const auto probs = softmax(logits(act.scores, bank));
      const std::size_t y = index_of(clip.label());

      // Cross-entropy: dCE/da_k = p_k - [y = k]; a = W s.
      std::array<double, kNumClasses> delta{};
      for (std::size_t k = 0; k < kNumClasses; ++k) delta[k] = probs[k] - (k == y ? 1.0 : 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        double d_score = 0.0;
        for (std::size_t k = 0; k < kNumClasses; ++k) {
          g.fc(k, j) += inv_n * delta[k] * act.scores[j];
          d_score += bank.fc(k, j) * delta[k];
        }
        // s = 1 / (1 + d) at the pooled patch: ds/dd = -s^2.
        const double s = act.scores[j];
        add_distance_grad(j, clip.patch(act.best[j]), inv_n * d_score * -(s * s));
      }

      const auto& own = ids[y];
      const auto& other = ids[index_of(opposite(clip.label()))];
      require_prototypes(own, clip.label());
      require_prototypes(other, opposite(clip.label()));

      const std::size_t jc = closest_of(act, own);
      add_distance_grad(jc, clip.patch(act.nearest[jc]), inv_n * cfg.lambda_clus);
      const std::size_t js = closest_of(act, other);
      add_distance_grad(js, clip.patch(act.nearest[js]), -inv_n * w_sep);
    }
  }

  // Diversity over ordered pairs; each pair touches both members.
  if (cfg.lambda_div != 0.0) {
    std::vector<double> norms(m);
    for (std::size_t j = 0; j < m; ++j) {
      norms[j] = norm(bank.prototypes[j].vector);
      if (norms[j] == 0.0) throw InvariantError("diversity loss undefined for a zero prototype", std::to_string(j));
    }
    // d cos(a, b) / da = b / (|a||b|) - cos * a / |a|^2
    auto add_cos_grad = [&](std::size_t a, std::size_t b, double cos) {
      const auto& va = bank.prototypes[a].vector;
      const auto& vb = bank.prototypes[b].vector;
      const double inv_ab = 1.0 / (norms[a] * norms[b]);
      const double inv_aa = 1.0 / (norms[a] * norms[a]);
      for (std::size_t c = 0; c < dim; ++c) {
        g.prototypes[a][c] += cfg.lambda_div * (vb[c] * inv_ab - cos * va[c] * inv_aa);
      }
    };
    for (const auto& cls : ids) {
      for (std::size_t a : cls) {
        for (std::size_t b : cls) {
          if (a == b) continue;
          const double cos = dot(bank.prototypes[a].vector, bank.prototypes[b].vector) / (norms[a] * norms[b]);
          if (cos - cfg.s_max > 0.0) {
            add_cos_grad(a, b, cos);
            add_cos_grad(b, a, cos);
          }
        }
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

PrototypeBank project(const PrototypeBank& bank, Batch dataset) {
  bank.validate();
  PrototypeBank out = bank;
  for (auto& proto : out.prototypes) {
    double best = std::numeric_limits<double>::infinity();
    std::optional<Grounding> where;
    std::span<const double> winner;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const LatentClip& clip = dataset[i];
      if (clip.label() != proto.label) continue;
      check_dims(clip, bank);
      for (std::size_t z = 0; z < clip.num_patches(); ++z) {
        const double d = squared_distance(clip.patch(z), proto.vector);
        if (d < best) {
          best = d;
          where = Grounding{i, z / clip.width(), z % clip.width()};
          winner = clip.patch(z);
        }
      }
    }
    if (!where) throw Error("no training patches for class " + std::string(to_string(proto.label)));
    proto.vector.assign(winner.begin(), winner.end());
    proto.grounding = where;
  }
  return out;
}

} // namespace proto_tqtl::proto
