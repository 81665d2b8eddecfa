#include "tfrhss/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "tfrhss/config.hpp"

namespace tfrhss {

namespace {

constexpr std::uint64_t kStreamSplit = 3;
constexpr std::uint64_t kStreamShuffle = 4;

struct SampleResult {
  LossBreakdown loss;
  bool finite = true;
};

void add_into(LossBreakdown& acc, const LossBreakdown& x) {
  acc.point += x.point;
  acc.bc += x.bc;
  acc.laplace += x.laplace;
  acc.tv += x.tv;
  acc.total += x.total;
}

LossBreakdown scaled(LossBreakdown x, double s) {
  x.point *= s;
  x.bc *= s;
  x.laplace *= s;
  x.tv *= s;
  x.total *= s;
  return x;
}

bool finite(const LossBreakdown& b) {
  return std::isfinite(b.point) && std::isfinite(b.bc) && std::isfinite(b.laplace) && std::isfinite(b.tv) &&
         std::isfinite(b.total);
}

nn::Tensor4 to_seed(const Field& grad) {
  nn::Tensor4 t({1, 1, grad.n(), grad.n()});
  for (std::size_t k = 0; k < grad.size(); ++k) t[k] = static_cast<float>(grad[k]);
  return t;
}

// Forward, loss and (when grads is non-null) backward for one sample.
SampleResult run_sample(const ReversibleNet& net, const Sample& sample, const Domain& domain,
                        const LossWeights& weights, nn::ParamStore* grads) {
  nn::Tape tape;
  const nn::Tape::Id out = net.record(tape, nn::from_field(sample.monitoring.values), grads);
  const Field pred = nn::to_field(tape.value(out));
  SampleResult r;
  for (double v : pred.values())
    if (!std::isfinite(v)) {
      r.finite = false;
      return r;
    }
  const TotalLoss loss = total_loss(pred, sample.monitoring, domain, weights);
  r.loss = loss.breakdown;
  r.finite = finite(r.loss);
  if (grads != nullptr && r.finite) {
    grads->zero_grad();
    tape.backward(out, to_seed(loss.grad));
  }
  return r;
}

void check_dataset(const Dataset& dataset, const ReversibleNet& net) {
  if (dataset.n_cells != net.config().n_cells)
    throw ShapeError("dataset N=" + std::to_string(dataset.n_cells) + " does not match the net's N=" +
                     std::to_string(net.config().n_cells));
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw SpecError("train: epochs must be >= 1");
  if (batch_size < 1) throw SpecError("train: batch size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw SpecError("train: learning rate must be >= 0");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw SpecError("train: val_fraction must be in (0, 1)");
  if (!(decay_factor > 0.0)) throw SpecError("train: decay factor must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 && adam_epsilon > 0.0))
    throw SpecError("train: bad Adam constants");
  weights.validate();
}

double TrainConfig::learning_rate_at(int epoch) const {
  double lr = learning_rate;
  for (int e : decay_epochs)
    if (epoch > e) lr *= decay_factor;
  return lr;
}

std::string TrainHistory::to_csv() const {
  std::ostringstream os;
  os << "epoch,train_total,val_total,point,bc,laplace,tv,val_point,val_bc,val_laplace,val_tv,learning_rate\n";
  for (const auto& e : epochs) {
    os << e.epoch;
    for (double v : {e.train.total, e.val.total, e.train.point, e.train.bc, e.train.laplace, e.train.tv, e.val.point,
                     e.val.bc, e.val.laplace, e.val.tv, e.learning_rate})
      os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

DataSplit split_indices(std::size_t count, double val_fraction, std::uint64_t seed) {
  if (count < 2) throw SpecError("split: need at least 2 samples");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw SpecError("split: val_fraction must be in (0, 1)");
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(stream_seed(seed, 0, kStreamSplit));
  std::shuffle(idx.begin(), idx.end(), rng);
  auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(count)));
  n_val = std::clamp<std::size_t>(n_val, 1, count - 1);
  DataSplit s;
  s.val.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

LossBreakdown mean_loss(const ReversibleNet& net, const Dataset& dataset, const std::vector<std::size_t>& indices,
                        const Domain& domain, const LossWeights& weights, int threads) {
  check_dataset(dataset, net);
  if (indices.empty()) return {};
  std::vector<SampleResult> results(indices.size());
  parallel_for(indices.size(), threads, [&](std::size_t k) {
    results[k] = run_sample(net, dataset.samples.at(indices[k]), domain, weights, nullptr);
  });
  LossBreakdown acc;
  for (const auto& r : results) add_into(acc, r.loss);
  return scaled(acc, 1.0 / static_cast<double>(indices.size()));
}

TrainHistory train(const Dataset& dataset, const SystemSpec& spec, ReversibleNet& net, const TrainConfig& config,
                   const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  check_dataset(dataset, net);
  check_compatible(dataset, spec);
  const Domain domain(spec);
  const DataSplit split = split_indices(dataset.size(), config.val_fraction, config.seed);
  const int threads = std::max(1, config.threads);

  nn::ParamStore& params = net.params();
  const std::size_t np = params.size();
  std::vector<nn::ParamStore> sample_grads(static_cast<std::size_t>(config.batch_size), params.clone());
  std::vector<std::vector<double>> m(np), v(np);
  for (std::size_t i = 0; i < np; ++i) {
    m[i].assign(params.value(i).size(), 0.0);
    v[i].assign(params.value(i).size(), 0.0);
  }
  std::vector<std::vector<double>> batch_grad(np);
  std::int64_t step = 0;

  TrainHistory history;
  history.train_count = split.train.size();
  history.val_count = split.val.size();
  nn::ParamStore best = params.clone();
  double best_val = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order = split.train;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t_start = std::chrono::steady_clock::now();
    const double lr = config.learning_rate_at(epoch);
    std::mt19937_64 rng(stream_seed(config.seed, static_cast<std::uint64_t>(epoch), kStreamShuffle));
    order = split.train;
    std::shuffle(order.begin(), order.end(), rng);

    LossBreakdown train_acc;
    const std::size_t bs = static_cast<std::size_t>(config.batch_size);
    const std::size_t n_batches = (order.size() + bs - 1) / bs;
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t first = b * bs;
      const std::size_t count = std::min(bs, order.size() - first);
      std::vector<SampleResult> results(count);
      parallel_for(count, threads, [&](std::size_t k) {
        results[k] = run_sample(net, dataset.samples[order[first + k]], domain, config.weights, &sample_grads[k]);
      });

      // Fixed-order reduction: the result does not depend on the thread count.
      bool ok = true;
      for (const auto& r : results) ok = ok && r.finite;
      double norm2 = 0.0;
      if (ok) {
        const double inv = 1.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < np; ++i) {
          auto& g = batch_grad[i];
          g.assign(params.value(i).size(), 0.0);
          for (std::size_t k = 0; k < count; ++k) {
            const nn::Tensor4& sg = sample_grads[k].grad(i);
            for (std::size_t j = 0; j < g.size(); ++j) g[j] += sg[j];
          }
          for (auto& x : g) {
            x *= inv;
            norm2 += x * x;
          }
        }
        ok = std::isfinite(norm2);
      }
      if (!ok) {
        if (history.best_epoch > 0) {
          for (std::size_t i = 0; i < np; ++i) params.value(i) = best.value(i);
        }
        throw NonFiniteLoss(epoch, b,
                            "non-finite loss or gradient in epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(b) + "; parameters reset to the last good state");
      }
      for (const auto& r : results) add_into(train_acc, r.loss);

      const double norm = std::sqrt(norm2);
      const double clip = config.clip_norm > 0.0 && norm > config.clip_norm ? config.clip_norm / norm : 1.0;
      ++step;
      const double c1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < np; ++i) {
        nn::Tensor4& p = params.value(i);
        const auto& g = batch_grad[i];
        for (std::size_t j = 0; j < g.size(); ++j) {
          const double gj = g[j] * clip;
          m[i][j] = config.adam_beta1 * m[i][j] + (1.0 - config.adam_beta1) * gj;
          v[i][j] = config.adam_beta2 * v[i][j] + (1.0 - config.adam_beta2) * gj * gj;
          const double update = lr * (m[i][j] / c1) / (std::sqrt(v[i][j] / c2) + config.adam_epsilon);
          p[j] = static_cast<float>(static_cast<double>(p[j]) - update);
        }
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = lr;
    rec.train = scaled(train_acc, 1.0 / static_cast<double>(order.size()));
    rec.val = mean_loss(net, dataset, split.val, domain, config.weights, threads);
    if (!finite(rec.val)) {
      if (history.best_epoch > 0)
        for (std::size_t i = 0; i < np; ++i) params.value(i) = best.value(i);
      throw NonFiniteLoss(epoch, n_batches, "non-finite validation loss in epoch " + std::to_string(epoch));
    }
    if (rec.val.total < best_val) {
      best_val = rec.val.total;
      history.best_epoch = epoch;
      for (std::size_t i = 0; i < np; ++i) best.value(i) = params.value(i);
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  for (std::size_t i = 0; i < np; ++i) params.value(i) = best.value(i);
  return history;
}

MetricReport evaluate(const Predictor& predictor, const Dataset& test, const SystemSpec& spec) {
  check_compatible(test, spec);
  for (std::size_t i = 0; i < test.size(); ++i)
    if (!test.samples[i].truth) throw FormatError("evaluate: sample " + std::to_string(i) + " has no truth field");
  const Masks masks = rasterize_masks(spec);
  MetricReport report;
  double seconds = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Field pred = predictor(test.samples[i], i);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.per_sample.push_back(compute_metrics(pred, *test.samples[i].truth, masks));
  }
  report.mean = mean_metrics(report.per_sample);
  report.ms_per_sample = test.size() ? 1000.0 * seconds / static_cast<double>(test.size()) : 0.0;
  return report;
}

MetricReport evaluate(const ReversibleNet& net, const Dataset& test, const SystemSpec& spec) {
  check_dataset(test, net);
  return evaluate([&net](const Sample& s, std::size_t) { return net.predict(s.monitoring.values); }, test, spec);
}

}  // namespace tfrhss
