#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fcc {

/// Approximation factor of the correlation-clustering routine assumed by
/// the published parameter settings.
inline constexpr double kReferenceCorrelationFactor = 1.4371;

/// Fair correlation factor obtained by composing a rho-approximate
/// correlation clustering with a gamma-close fair fit.
inline double fair_correlation_factor(double gamma, double rho) {
  return gamma * rho + gamma + rho;
}

/// Knobs of the candidate framework. alpha, beta, c drive the analysis only;
/// s and g additionally size the streaming sample.
struct FrameworkParams {
  double alpha = 0.0;
  double beta = 0.0;
  double c = 3.0;
  double s = 4.0;
  double g = 64.0;

  /// Throws Argument unless 0<beta<1, alpha>0, c>1 and, when `streaming`,
  /// s>1, g>s and s*c - s - 2c > 0.
  void validate(bool streaming) const;

  /// alpha = 3/(10(rho+1)), beta = 2/(5(gamma+1)(rho+1)), c = 3.
  static FrameworkParams offline_default(double gamma, double rho = kReferenceCorrelationFactor);
  /// alpha = 1/(6(rho+1)), beta = 1/(72(gamma+1)(rho+1)), s = 4, c = 3, g = 64.
  static FrameworkParams streaming_default(double gamma, double rho = kReferenceCorrelationFactor);
};

/// Guaranteed factor of the offline framework for the given parameters.
double offline_ratio(double gamma, double eta, const FrameworkParams& params);
/// Guaranteed factor of the single-pass 1-median before the (1+eps)/(1-eps)
/// evaluation loss.
double streaming_ratio(double gamma, double eta, const FrameworkParams& params);

struct KMedianStreamParams {
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  double epsilon1 = 0.0;
};

/// (1+eps) (r + eps1) for the streaming k-median pipeline.
double stream_kmedian_ratio(double gamma, double rho, const KMedianStreamParams& params);
KMedianStreamParams stream_kmedian_paper_constants(double gamma);

/// Named parameter regimes for two colors (1:1, 1:p, p:q).
struct Preset {
  std::string name;
  std::string regime;
  double gamma = 1.0;
  FrameworkParams offline;
  FrameworkParams streaming;
  double offline_ratio = 0.0;    // as published for the regime
  double streaming_ratio = 0.0;  // as published for the regime
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(std::string_view name);

}  // namespace fcc
