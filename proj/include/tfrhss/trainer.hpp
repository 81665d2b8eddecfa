#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfrhss/datagen.hpp"
#include "tfrhss/metrics.hpp"
#include "tfrhss/parallel.hpp"
#include "tfrhss/pirl_loss.hpp"
#include "tfrhss/reversible_model.hpp"

namespace tfrhss {

/// Raised when a batch produces a non-finite loss or gradient. The net has
/// already been reset to the last good parameters when this propagates.
class NonFiniteLoss : public NonFiniteError {
 public:
  NonFiniteLoss(int epoch, std::size_t batch, const std::string& what)
      : NonFiniteError(what), epoch(epoch), batch(batch) {}
  int epoch;
  std::size_t batch;
};

struct TrainConfig {
  int epochs = 50;
  int batch_size = 16;
  double learning_rate = 1e-3;
  std::vector<int> decay_epochs{30, 40};  // lr *= decay_factor once each of these epochs has completed
  double decay_factor = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 10.0;  // global L2 norm; <= 0 disables
  LossWeights weights;
  std::uint64_t seed = 0;
  double val_fraction = 0.2;
  int threads = 1;

  void validate() const;
  double learning_rate_at(int epoch) const;  // epoch is 1-based
};

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0.0;
  LossBreakdown train;  // per-sample means
  LossBreakdown val;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  std::size_t train_count = 0;
  std::size_t val_count = 0;

  /// epoch,train_total,val_total,point,bc,laplace,tv then the validation
  /// terms and the learning rate. The raw terms are training means.
  std::string to_csv() const;
};

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Seeded shuffle of [0, count); the first round(val_fraction * count)
/// indices go to validation. Both parts are non-empty.
DataSplit split_indices(std::size_t count, double val_fraction, std::uint64_t seed);

/// Mean loss breakdown of `net` over the given samples; parameters untouched.
LossBreakdown mean_loss(const ReversibleNet& net, const Dataset& dataset, const std::vector<std::size_t>& indices,
                        const Domain& domain, const LossWeights& weights, int threads);

/// Unsupervised training on monitoring matrices only; truth fields are never
/// read. On return the net holds the parameters of the best validation epoch.
TrainHistory train(const Dataset& dataset, const SystemSpec& spec, ReversibleNet& net, const TrainConfig& config,
                   const std::function<void(const EpochRecord&)>& on_epoch = {});

using Predictor = std::function<Field(const Sample& sample, std::size_t index)>;

/// Metrics of predictor(sample) against each sample's truth. Timing covers the
/// predictor calls only. Samples without truth are rejected with FormatError.
MetricReport evaluate(const Predictor& predictor, const Dataset& test, const SystemSpec& spec);
MetricReport evaluate(const ReversibleNet& net, const Dataset& test, const SystemSpec& spec);

}  // namespace tfrhss
