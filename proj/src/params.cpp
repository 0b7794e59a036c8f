#include "fcc/params.hpp"

#include <algorithm>
#include <cmath>

#include "fcc/error.hpp"

namespace fcc {

void FrameworkParams::validate(bool streaming) const {
  if (!(alpha > 0.0)) throw Error(ErrorKind::Argument, "alpha must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::Argument, "beta must lie in (0,1)");
  if (!(c > 1.0)) throw Error(ErrorKind::Argument, "c must exceed 1");
  if (streaming) {
    if (!(s > 1.0)) throw Error(ErrorKind::Argument, "s must exceed 1");
    if (!(g > s)) throw Error(ErrorKind::Argument, "g must exceed s");
    if (!(s * c - s - 2.0 * c > 0.0)) throw Error(ErrorKind::Argument, "need s*c - s - 2c > 0");
  }
}

FrameworkParams FrameworkParams::offline_default(double gamma, double rho) {
  FrameworkParams p;
  p.c = 3.0;
  p.alpha = 3.0 / (10.0 * (rho + 1.0));
  p.beta = 2.0 / (5.0 * (gamma + 1.0) * (rho + 1.0));
  return p;
}

FrameworkParams FrameworkParams::streaming_default(double gamma, double rho) {
  FrameworkParams p;
  p.c = 3.0;
  p.s = 4.0;
  p.g = 64.0;
  p.alpha = 1.0 / (6.0 * (rho + 1.0));
  p.beta = 1.0 / (72.0 * (gamma + 1.0) * (rho + 1.0));
  return p;
}

double offline_ratio(double gamma, double eta, const FrameworkParams& p) {
  const double a = p.alpha, b = p.beta, c = p.c;
  return std::max({1.0 + 3.0 * (eta + 1.0) * a,
                   gamma + 2.0 - (gamma + 1.0) * b,
                   gamma + 2.0 - 2.0 * a / c,
                   gamma + 2.0 + (gamma + 1.0) * b / (c - 1.0) - 2.0 * (1.0 - 1.0 / c) * a});
}

double streaming_ratio(double gamma, double eta, const FrameworkParams& p) {
  const double a = p.alpha, b = p.beta, c = p.c, s = p.s, g = p.g;
  return std::max(
      {gamma + 2.0 - (gamma + 1.0) * b,
       gamma + 2.0 + (gamma + 1.0) * (b * (g - s) + s) / (g * (s - 1.0)) - 2.0 * a / c,
       gamma + 2.0 +
           (gamma + 1.0) * (b * (g * (2.0 * c + s) - s * c) + s * c) / (g * (c * s - s - 2.0 * c)) -
           2.0 * (1.0 - 1.0 / s - 1.0 / c) * a,
       1.0 + 3.0 * (eta + 1.0) * a});
}

double stream_kmedian_ratio(double gamma, double rho, const KMedianStreamParams& p) {
  const double d = p.delta, a = p.alpha, b = p.beta;
  const double r = std::max(
      {2.0 + gamma - (b - d) * (1.0 + gamma),
       2.0 + d + gamma * (1.0 + b + d) - a * b / (2.0 * (b + 1.0)) + 2.0 * b * b / (1.0 - b),
       1.0 + 3.0 * (gamma + 1.0) * (rho + 1.0) * a});
  return (1.0 + p.epsilon) * (r + p.epsilon1);
}

KMedianStreamParams stream_kmedian_paper_constants(double gamma) {
  KMedianStreamParams p;
  p.delta = 1.0 / (1e6 * (gamma + 1.0));
  p.beta = 0.015;
  p.alpha = 8.0 * p.beta * (p.beta + 1.0) / (1.0 - p.beta);
  p.epsilon = 1e-7;
  p.epsilon1 = 1e-7;
  return p;
}

namespace {

Preset make_preset(std::string name, std::string regime, double gamma, double alpha, double beta,
                   double c, double s_alpha, double s_beta, double s_c, double offline_r,
                   double streaming_r) {
  Preset p;
  p.name = std::move(name);
  p.regime = std::move(regime);
  p.gamma = gamma;
  p.offline.alpha = alpha;
  p.offline.beta = beta;
  p.offline.c = c;
  p.streaming.alpha = s_alpha;
  p.streaming.beta = s_beta;
  p.streaming.c = s_c;
  p.streaming.s = 10.0;
  p.streaming.g = 100000.0;
  p.offline_ratio = offline_r;
  p.streaming_ratio = streaming_r;
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      make_preset("paper-1to1", "1:1", 1.0, 0.129835, 0.050115, 2.6237, 0.13181506, 0.03626050,
                  3.270833, 2.901, 2.927),
      make_preset("paper-1top", "1:p", 17.0, 0.135970, 0.005765, 2.6161, 0.13620638, 0.00415431,
                  3.270833, 18.896, 18.925),
      make_preset("paper-ptoq", "p:q", 33.0, 0.136393, 0.003407, 2.8742, 0.13647381, 0.00219897,
                  3.270833, 34.905, 34.925),
  };
  return table;
}

std::optional<Preset> find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

}  // namespace fcc
