#include "agentcoord/bounds.hpp"

#include <cmath>
#include <map>
#include <set>

#include "agentcoord/error.hpp"

namespace agentcoord {

void BoundInputs::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(lf) || !positive(lfp) || !positive(U) || !positive(eta) ||
      !positive(beta) || D == 0 || T == 0) {
    throw InvalidInput("bound inputs must all be strictly positive and finite");
  }
}

double conflict_error_bound(const BoundInputs& b) {
  b.validate();
  const double T = static_cast<double>(b.T);
  const double startup = 4.0 / (b.eta * T);
  const double drift = 6.0 * std::sqrt(3.0 * b.lfp * b.lf * b.lf * b.beta / b.eta);
  const double noise = 3.0 * b.eta * std::pow(b.lf, 4);
  return startup + drift + noise;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("least_squares_slope needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("least_squares_slope needs distinct abscissae");
  return sxy / sxx;
}

namespace {

// Slope of log(error) against log(key(point)) over the largest group sharing
// group(point), or nullopt if no group has three distinct keys.
template <class GroupFn, class KeyFn>
std::optional<double> grouped_slope(const std::vector<ScalingPoint>& runs, GroupFn group,
                                    KeyFn key) {
  std::map<std::size_t, std::vector<const ScalingPoint*>> groups;
  for (const auto& p : runs) groups[group(p)].push_back(&p);
  const std::vector<const ScalingPoint*>* best = nullptr;
  for (const auto& [g, members] : groups) {
    std::set<std::size_t> distinct;
    for (const auto* p : members) distinct.insert(key(*p));
    if (distinct.size() >= 3 && (!best || members.size() > best->size())) best = &members;
  }
  if (!best) return std::nullopt;
  std::vector<double> x, y;
  for (const auto* p : *best) {
    x.push_back(std::log(static_cast<double>(key(*p))));
    y.push_back(std::log(p->g_error));
  }
  return least_squares_slope(x, y);
}

}  // namespace

ScalingFit fit_g_error_scaling(const std::vector<ScalingPoint>& runs) {
  if (runs.size() < 3) throw InvalidInput("scaling fit needs at least three runs");
  for (const auto& p : runs) {
    if (!(p.g_error > 0.0) || !std::isfinite(p.g_error) || p.T == 0 || p.D == 0) {
      throw InvalidInput("scaling fit needs positive G-errors, T and D");
    }
  }
  ScalingFit fit;
  fit.slope_vs_d = grouped_slope(runs, [](const ScalingPoint& p) { return p.T; },
                                 [](const ScalingPoint& p) { return p.D; });
  fit.slope_vs_t = grouped_slope(runs, [](const ScalingPoint& p) { return p.D; },
                                 [](const ScalingPoint& p) { return p.T; });
  if (!fit.slope_vs_d && !fit.slope_vs_t) {
    throw InvalidInput("scaling fit needs three distinct D (fixed T) or T (fixed D)");
  }
  return fit;
}

}  // namespace agentcoord
