#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace proto_tqtl::testing {

namespace {

double sq_dist(const proto::LatentClip& clip, std::size_t r, std::size_t c, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < clip.dim(); ++k) {
    const double d = clip.data()[(r * clip.width() + c) * clip.dim() + k] - p[k];
    acc += d * d;
  }
  return acc;
}

double min_dist_to_class(const proto::LatentClip& clip, const proto::PrototypeBank& bank, Label cls) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : bank.prototypes) {
    if (p.label != cls) continue;
    for (std::size_t r = 0; r < clip.height(); ++r) {
      for (std::size_t c = 0; c < clip.width(); ++c) best = std::min(best, sq_dist(clip, r, c, p.vector));
    }
  }
  return best;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

// Gap between the smallest and second-smallest value.
double runner_up_gap(std::vector<double> v) {
  if (v.size() < 2) return std::numeric_limits<double>::infinity();
  std::sort(v.begin(), v.end());
  return v[1] - v[0];
}

} // namespace

std::vector<double> oracle_scores(const proto::LatentClip& clip, const proto::PrototypeBank& bank) {
  std::vector<double> out;
  for (const auto& p : bank.prototypes) {
    double best = 0.0;
    for (std::size_t r = 0; r < clip.height(); ++r) {
      for (std::size_t c = 0; c < clip.width(); ++c) best = std::max(best, 1.0 / (1.0 + sq_dist(clip, r, c, p.vector)));
    }
    out.push_back(best);
  }
  return out;
}

OracleLosses oracle_losses(const std::vector<proto::LatentClip>& batch, const proto::PrototypeBank& bank,
                           const proto::TrainConfig& cfg) {
  OracleLosses out;
  const double n = static_cast<double>(batch.size());
  for (const auto& clip : batch) {
    const auto s = oracle_scores(clip, bank);
    double a[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t j = 0; j < s.size(); ++j) a[k] += bank.fc.values[k * bank.size() + j] * s[j];
    }
    const std::size_t y = clip.label() == Label::Fake ? 1 : 0;
    const double p_true = std::exp(a[y]) / (std::exp(a[0]) + std::exp(a[1]));
    out.ce += -std::log(p_true) / n;
    out.clus += min_dist_to_class(clip, bank, clip.label()) / n;
    out.sep -= min_dist_to_class(clip, bank, opposite(clip.label())) / n;
  }
  for (std::size_t i = 0; i < bank.size(); ++i) {
    for (std::size_t j = 0; j < bank.size(); ++j) {
      if (i == j || bank.prototypes[i].label != bank.prototypes[j].label) continue;
      out.div += std::max(0.0, cosine(bank.prototypes[i].vector, bank.prototypes[j].vector) - cfg.s_max);
    }
  }
  const double w_sep = cfg.literal_lambda_signs ? cfg.lambda_sep : std::fabs(cfg.lambda_sep);
  out.total = out.ce + cfg.lambda_clus * out.clus + w_sep * out.sep + cfg.lambda_div * out.div;
  return out;
}

proto::Gradients finite_difference(const std::vector<proto::LatentClip>& batch, const proto::PrototypeBank& bank,
                                   const proto::TrainConfig& cfg, double h) {
  proto::Gradients g{std::vector<proto::Vector>(bank.size(), proto::Vector(bank.dim, 0.0)),
                     proto::Matrix::zeros(bank.fc.rows, bank.fc.cols)};
  auto total = [&](const proto::PrototypeBank& b) { return proto::loss_total(batch, b, cfg).total; };
  proto::PrototypeBank work = bank;
  for (std::size_t j = 0; j < bank.size(); ++j) {
    for (std::size_t c = 0; c < bank.dim; ++c) {
      const double x = bank.prototypes[j].vector[c];
      work.prototypes[j].vector[c] = x + h;
      const double up = total(work);
      work.prototypes[j].vector[c] = x - h;
      const double down = total(work);
      work.prototypes[j].vector[c] = x;
      g.prototypes[j][c] = (up - down) / (2.0 * h);
    }
  }
  for (std::size_t i = 0; i < bank.fc.values.size(); ++i) {
    const double x = bank.fc.values[i];
    work.fc.values[i] = x + h;
    const double up = total(work);
    work.fc.values[i] = x - h;
    const double down = total(work);
    work.fc.values[i] = x;
    g.fc.values[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double selection_margin(const std::vector<proto::LatentClip>& batch, const proto::PrototypeBank& bank,
                        double s_max) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& clip : batch) {
    // Max pooling per prototype: gap between the two nearest patches.
    for (const auto& p : bank.prototypes) {
      std::vector<double> d;
      for (std::size_t r = 0; r < clip.height(); ++r) {
        for (std::size_t c = 0; c < clip.width(); ++c) d.push_back(sq_dist(clip, r, c, p.vector));
      }
      margin = std::min(margin, runner_up_gap(d));
    }
    // Cluster / separation minima over (prototype, patch) pairs per class.
    for (Label cls : {Label::Real, Label::Fake}) {
      std::vector<double> d;
      for (const auto& p : bank.prototypes) {
        if (p.label != cls) continue;
        for (std::size_t r = 0; r < clip.height(); ++r) {
          for (std::size_t c = 0; c < clip.width(); ++c) d.push_back(sq_dist(clip, r, c, p.vector));
        }
      }
      margin = std::min(margin, runner_up_gap(d));
    }
  }
  for (std::size_t i = 0; i < bank.size(); ++i) {
    for (std::size_t j = 0; j < bank.size(); ++j) {
      if (i == j || bank.prototypes[i].label != bank.prototypes[j].label) continue;
      margin = std::min(margin, std::fabs(cosine(bank.prototypes[i].vector, bank.prototypes[j].vector) - s_max));
    }
  }
  return margin;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::fabs(a[i] - b[i]));
    scale = std::max({scale, std::fabs(a[i]), std::fabs(b[i])});
  }
  return scale == 0.0 ? diff : diff / scale;
}

} // namespace proto_tqtl::testing
