#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfrhss/grid.hpp"

namespace tfrhss {

/// Reconstruction errors in kelvin. cmae and m_cae are undefined (nullopt)
/// when the layout has no source cells.
struct MetricValues {
  double mae = 0.0;
  std::optional<double> cmae;
  std::optional<double> m_cae;
  double bmae = 0.0;
};

struct MetricReport {
  MetricValues mean;
  std::vector<MetricValues> per_sample;
  double ms_per_sample = 0.0;

  /// Timing varies run to run; leave it out for reproducible files.
  std::string to_text(bool with_timing = true) const;
  std::string to_csv() const;
};

/// mae over all cells, cmae/m_cae mean/max over omega_l, bmae over the ring.
MetricValues compute_metrics(const Field& pred, const Field& truth, const Masks& masks);

/// Mean of each metric over samples (m_cae is averaged too, not maxed).
MetricValues mean_metrics(const std::vector<MetricValues>& samples);

}  // namespace tfrhss
