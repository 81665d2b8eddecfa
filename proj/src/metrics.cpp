#include "tfrhss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tfrhss {

MetricValues compute_metrics(const Field& pred, const Field& truth, const Masks& masks) {
  if (pred.n() != truth.n() || pred.n() != masks.omega_l.n()) throw ShapeError("metrics: shape mismatch");
  MetricValues m;
  double sum_all = 0.0, sum_l = 0.0, max_l = 0.0;
  std::size_t count_l = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double err = std::abs(pred[k] - truth[k]);
    sum_all += err;
    if (masks.omega_l[k]) {
      sum_l += err;
      max_l = std::max(max_l, err);
      ++count_l;
    }
  }
  m.mae = sum_all / static_cast<double>(pred.size());
  if (count_l > 0) {
    m.cmae = sum_l / static_cast<double>(count_l);
    m.m_cae = max_l;
  }
  double sum_b = 0.0;
  for (const auto& c : masks.omega_b) sum_b += std::abs(pred(c.row, c.col) - truth(c.row, c.col));
  m.bmae = sum_b / static_cast<double>(masks.omega_b.size());
  return m;
}

MetricValues mean_metrics(const std::vector<MetricValues>& samples) {
  MetricValues out;
  if (samples.empty()) return out;
  double mae = 0.0, bmae = 0.0, cmae = 0.0, mcae = 0.0;
  bool defined = true;
  for (const auto& s : samples) {
    mae += s.mae;
    bmae += s.bmae;
    if (s.cmae && s.m_cae) {
      cmae += *s.cmae;
      mcae += *s.m_cae;
    } else {
      defined = false;
    }
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  out.mae = mae * inv;
  out.bmae = bmae * inv;
  if (defined) {
    out.cmae = cmae * inv;
    out.m_cae = mcae * inv;
  }
  return out;
}

namespace {

std::string fixed4(std::optional<double> v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string MetricReport::to_text(bool with_timing) const {
  std::ostringstream out;
  out << "samples = " << per_sample.size() << "\n";
  out << "mae = " << fixed4(mean.mae) << "\n";
  out << "cmae = " << fixed4(mean.cmae) << "\n";
  out << "m_cae = " << fixed4(mean.m_cae) << "\n";
  out << "bmae = " << fixed4(mean.bmae) << "\n";
  if (with_timing) out << "ms_per_sample = " << fixed4(ms_per_sample) << "\n";
  return out.str();
}

std::string MetricReport::to_csv() const {
  std::ostringstream out;
  out << "sample,mae,cmae,m_cae,bmae\n";
  for (std::size_t i = 0; i < per_sample.size(); ++i) {
    const auto& s = per_sample[i];
    out << i << ',' << fixed4(s.mae) << ',' << fixed4(s.cmae) << ',' << fixed4(s.m_cae) << ','
        << fixed4(s.bmae) << "\n";
  }
  return out.str();
}

}  // namespace tfrhss
