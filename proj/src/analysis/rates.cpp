#include "fsm/analysis.hpp"
#include "fsm/errors.hpp"
#include "fsm/log.hpp"

#include <cmath>
#include <sstream>

namespace fsm {

namespace {

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) throw InsufficientDataError("rate fit: all abscissae coincide");
  return sxy / sxx;
}

// Drops nonpositive or non-finite errors, with a warning.
void usable(std::span<const double> x, std::span<const double> err, bool log_x, std::vector<double>& lx,
            std::vector<double>& ly) {
  if (x.size() != err.size()) throw ConfigError("rate fit: axis and error lengths differ");
  std::size_t dropped = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(err[k] > 0.0) || !std::isfinite(err[k]) || (log_x && !(x[k] > 0.0))) {
      ++dropped;
      continue;
    }
    lx.push_back(log_x ? std::log(x[k]) : x[k]);
    ly.push_back(std::log(err[k]));
  }
  if (dropped > 0) {
    std::ostringstream os;
    os << "rate fit: excluded " << dropped << " nonpositive point(s)";
    log::warn(os.str());
  }
  if (lx.size() < 3) {
    std::ostringstream os;
    os << "rate fit: " << lx.size() << " usable point(s), need at least 3";
    throw InsufficientDataError(os.str());
  }
}

}  // namespace

double fit_rate(std::span<const double> x, std::span<const double> err) {
  std::vector<double> lx, ly;
  usable(x, err, true, lx, ly);
  const double s = slope(lx, ly);
  return s == 0.0 ? 0.0 : -s;
}

double fit_decay_ratio(std::span<const double> x, std::span<const double> err) {
  std::vector<double> lx, ly;
  usable(x, err, false, lx, ly);
  return std::exp(slope(lx, ly));
}

std::vector<std::size_t> pre_knee(std::span<const double> err, double floor, double factor) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < err.size(); ++k) {
    if (err[k] > factor * floor) idx.push_back(k);
  }
  return idx;
}

std::vector<double> axis_values(std::span<const ErrorRecord> records, SweepAxis axis) {
  std::vector<double> x;
  x.reserve(records.size());
  for (const auto& r : records) {
    switch (axis) {
      case SweepAxis::K: x.push_back(r.params.K); break;
      case SweepAxis::N: x.push_back(r.params.N); break;
      case SweepAxis::M: x.push_back(r.params.M); break;
    }
  }
  return x;
}

std::vector<double> error_values(std::span<const ErrorRecord> records, ErrorField field) {
  std::vector<double> y;
  y.reserve(records.size());
  for (const auto& r : records) y.push_back(field == ErrorField::Value ? r.err_val : r.err_vec);
  return y;
}

RateFit fit_pre_knee_rate(std::span<const ErrorRecord> records, SweepAxis axis, ErrorField field, double floor) {
  const auto x = axis_values(records, axis);
  const auto y = error_values(records, field);
  RateFit fit;
  fit.floor = floor;
  fit.window = pre_knee(y, floor);
  std::vector<double> wx, wy;
  for (auto k : fit.window) {
    wx.push_back(x[k]);
    wy.push_back(y[k]);
  }
  fit.rate = fit_rate(wx, wy);
  return fit;
}

}  // namespace fsm
