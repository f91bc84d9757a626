#pragma once

#include "proto_tqtl/label.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace proto_tqtl::proto {

using Vector = std::vector<double>;

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  static Matrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols, std::vector<double>(rows * cols)}; }

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  bool operator==(const Matrix&) const = default;
};

/// H x W grid of C-dimensional latent patches standing in for an encoder
/// output, plus the clip's label. Patches are stored row-major.
class LatentClip {
 public:
  /// Throws InvariantError unless H, W, C >= 1, data has H*W*C entries and
  /// every entry is finite.
  LatentClip(std::size_t height, std::size_t width, std::size_t dim, std::vector<double> data, Label label);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_patches() const noexcept { return height_ * width_; }
  Label label() const noexcept { return label_; }
  const std::vector<double>& data() const noexcept { return data_; }

  std::span<const double> patch(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }
  std::span<const double> patch(std::size_t row, std::size_t col) const { return patch(row * width_ + col); }

  bool operator==(const LatentClip&) const = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t dim_;
  std::vector<double> data_;
  Label label_;
};

/// Where a projected prototype came from: dataset clip index and patch cell.
struct Grounding {
  std::size_t clip = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const Grounding&) const = default;
};

struct Prototype {
  Label label = Label::Real;
  Vector vector;
  std::optional<Grounding> grounding;
  bool operator==(const Prototype&) const = default;
};

struct PrototypeBank {
  std::size_t dim = 0;
  std::vector<Prototype> prototypes;
  /// K x m class-connection weights.
  Matrix fc;

  std::size_t size() const noexcept { return prototypes.size(); }
  std::vector<std::size_t> ids_of(Label label) const;

  /// Throws InvariantError on inconsistent shapes.
  void validate() const;

  bool operator==(const PrototypeBank&) const = default;
};

struct TrainConfig {
  double lambda_clus = 0.2;
  double lambda_sep = -0.2;
  double lambda_div = 0.1;
  double s_max = 0.3;
  std::size_t protos_per_class = 10;
  double lr_proto = 1e-3;
  double lr_fc = 2e-4;
  std::size_t epochs = 200;
  std::size_t projection_period = 5;
  std::uint64_t seed = 0;
  /// Weight the separation term by lambda_sep as given. By default the
  /// weight is |lambda_sep| so the term always pushes patches away from
  /// wrong-class prototypes.
  bool literal_lambda_signs = false;

  double separation_weight() const;

  /// Throws InvariantError on invalid values.
  void validate() const;
};

using Batch = std::span<const LatentClip>;

double squared_distance(std::span<const double> a, std::span<const double> b);

/// 1 / (1 + ||patch - proto||^2), in (0, 1].
double patch_similarity(std::span<const double> patch, std::span<const double> proto);

/// Max-pooled similarity of every prototype to the clip.
Vector prototype_layer(const LatentClip& clip, const PrototypeBank& bank);

std::array<double, kNumClasses> logits(std::span<const double> scores, const PrototypeBank& bank);
std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& logits);

/// softmax(W * scores).
std::array<double, kNumClasses> predict(std::span<const double> scores, const PrototypeBank& bank);

/// Highest-probability class; ties go to the lower class index.
Label argmax_class(const std::array<double, kNumClasses>& probs);

double accuracy(Batch batch, const PrototypeBank& bank);

double loss_ce(Batch batch, const PrototypeBank& bank);
double loss_clus(Batch batch, const PrototypeBank& bank);
double loss_sep(Batch batch, const PrototypeBank& bank);
double loss_div(const PrototypeBank& bank, double s_max);

struct LossTerms {
  double ce = 0.0;
  double clus = 0.0;
  double sep = 0.0;
  double div = 0.0;
  double total = 0.0;
};

/// ce + lambda_clus * clus + separation_weight * sep + lambda_div * div.
double weighted_total(double ce, double clus, double sep, double div, const TrainConfig& cfg);

LossTerms loss_total(Batch batch, const PrototypeBank& bank, const TrainConfig& cfg);

struct Gradients {
  std::vector<Vector> prototypes;
  Matrix fc;
};

/// Analytic gradient of loss_total. Max/min selections use the lowest
/// index on ties; the hinge in the diversity term has zero slope at s_max.
Gradients gradients(Batch batch, const PrototypeBank& bank, const TrainConfig& cfg);

/// Uniform [0, 1) prototypes, protos_per_class per class (REAL first), and
/// class-connection weights 1 to the own class and -0.5 to the other.
PrototypeBank initial_bank(std::size_t dim, const TrainConfig& cfg);

/// Replaces every prototype with its nearest same-class training patch and
/// records the grounding. Scan order: clip, then row-major patch; the first
/// minimum wins.
PrototypeBank project(const PrototypeBank& bank, Batch dataset);

struct TrainResult {
  PrototypeBank bank;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
  std::size_t projections = 0;
};

/// Full-batch gradient descent, one step per epoch, with a projection after
/// every `projection_period` epochs. Throws TrainingDiverged on a non-finite
/// loss.
TrainResult train(Batch dataset, const TrainConfig& cfg);

} // namespace proto_tqtl::proto
