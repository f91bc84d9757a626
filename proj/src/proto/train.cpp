#include "proto_tqtl/error.hpp"
#include "proto_tqtl/proto/core.hpp"

#include <cmath>
#include <random>
#include <string>

namespace proto_tqtl::proto {

PrototypeBank initial_bank(std::size_t dim, const TrainConfig& cfg) {
  cfg.validate();
  if (dim == 0) throw InvariantError("prototype dimension must be >= 1", "");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PrototypeBank bank;
  bank.dim = dim;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t i = 0; i < cfg.protos_per_class; ++i) {
      Prototype p;
      p.label = label_at(k);
      p.vector.resize(dim);
      for (double& v : p.vector) v = unit(rng);
      bank.prototypes.push_back(std::move(p));
    }
  }
  bank.fc = Matrix::zeros(kNumClasses, bank.size());
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t j = 0; j < bank.size(); ++j) {
      bank.fc(k, j) = bank.prototypes[j].label == label_at(k) ? 1.0 : -0.5;
    }
  }
  return bank;
}

TrainResult train(Batch dataset, const TrainConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) throw Error("training set is empty");
  bool seen[kNumClasses] = {false, false};
  for (const auto& clip : dataset) seen[index_of(clip.label())] = true;
  if (!seen[0] || !seen[1]) throw Error("training set must contain both classes");

  TrainResult result;
  result.bank = initial_bank(dataset.front().dim(), cfg);
  PrototypeBank& bank = result.bank;
  result.initial_loss = loss_total(dataset, bank, cfg).total;
  if (!std::isfinite(result.initial_loss)) throw TrainingDiverged("initial loss is not finite");

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Gradients g = gradients(dataset, bank, cfg);
    for (std::size_t j = 0; j < bank.size(); ++j) {
      auto& p = bank.prototypes[j];
      for (std::size_t c = 0; c < bank.dim; ++c) p.vector[c] -= cfg.lr_proto * g.prototypes[j][c];
      p.grounding.reset();
    }
    for (std::size_t i = 0; i < bank.fc.values.size(); ++i) bank.fc.values[i] -= cfg.lr_fc * g.fc.values[i];

    if ((epoch + 1) % cfg.projection_period == 0) {
      bank = project(bank, dataset);
      ++result.projections;
    }

    const double loss = loss_total(dataset, bank, cfg).total;
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("loss became " + std::to_string(loss) + " at epoch " + std::to_string(epoch + 1));
    }
    result.final_loss = loss;
  }
  if (cfg.epochs == 0) result.final_loss = result.initial_loss;
  result.final_accuracy = accuracy(dataset, bank);
  return result;
}

} // namespace proto_tqtl::proto
