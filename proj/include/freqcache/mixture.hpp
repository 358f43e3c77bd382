// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

// Analytic rectified-flow velocity for Gaussian-mixture data.
//
// Forward process X_t = (1 - t) X_0 + t X_1 with X_1 ~ N(0, s1 I) and X_0
// drawn from a mixture of isotropic Gaussians N(m_k, v_k I). Given
// component k, X_t ~ N((1 - t) m_k, ((1 - t)^2 v_k + t^2 s1) I), and
//
//   E[X_0 | X_t = x, k] = m_k + (1 - t) v_k / den_k * (x - (1 - t) m_k)
//   v(x, t)             = (x - E[X_0 | X_t = x]) / t
//
// with den_k = (1 - t)^2 v_k + t^2 s1. Responsibilities are evaluated in log
// space with max-subtraction. Two couplings are provided:
//   per_cell  every cell is an independent scalar mixture
//   joint     one component is drawn for the whole latent, so
//             responsibilities are shared by all cells

#pragma once

#include <cstdint>
#include <vector>

#include "freqcache/predictor.hpp"

namespace freqcache {

enum class MixtureCoupling { per_cell, joint };

struct MixtureComponent {
  double weight = 1.0;
  /// Shape (1,1,1,1) broadcasts a scalar, (1,1,1,C) a per-channel vector;
  /// otherwise it must equal the latent shape.
  Tensor4 mean;
  double variance = 1.0;
};

struct GaussianMixtureSpec {
  Shape latent;
  std::vector<MixtureComponent> components;
  MixtureCoupling coupling = MixtureCoupling::per_cell;
  double noise_variance = 1.0;

  /// Weights positive and summing to 1 within 1e-12, variances > 0, mean
  /// shapes broadcastable. Throws ConfigError.
  void validate() const;

  /// The same distribution observed through mean pooling to `target`:
  /// means are pooled and both variances shrink by the pooling volume.
  /// Exact for joint coupling; a moment approximation for per_cell.
  GaussianMixtureSpec pooled(const Shape& target) const;
};

/// Throws DomainError unless 0 < t <= 1 and DimensionError if x does not
/// match the spec's latent shape.
Tensor4 mixture_posterior_mean(const GaussianMixtureSpec& spec,
                               const Tensor4& x, double t);
Tensor4 mixture_velocity(const GaussianMixtureSpec& spec, const Tensor4& x,
                         double t);

/// Component posteriors. per_cell: K values per cell, cell-major
/// (index cell * K + k). joint: K values.
std::vector<double> mixture_responsibilities(const GaussianMixtureSpec& spec,
                                             const Tensor4& x, double t);

class MixturePredictor final : public Predictor {
 public:
  explicit MixturePredictor(GaussianMixtureSpec spec);

  /// Inputs at the native shape use the spec directly; pooled inputs use
  /// spec.pooled(z.shape()).
  Tensor4 evaluate(const Tensor4& z, const StepInfo& step) const override;
  std::string name() const override { return "mixture"; }
  const GaussianMixtureSpec& spec() const { return spec_; }

 private:
  GaussianMixtureSpec spec_;
};

GaussianMixtureSpec single_gaussian(const Shape& latent, double mean,
                                    double variance);

/// Equal-weight components at +mu and -mu (scalar broadcast).
GaussianMixtureSpec symmetric_pair(const Shape& latent, double mu,
                                   double variance,
                                   MixtureCoupling coupling);

/// Defaults of the toy scene prior used by the harness experiments.
struct SceneMixtureParams {
  std::size_t components = 2;
  /// RMS of each component mean.
  double amplitude = 0.8;
  double variance = 4.0;
  /// Component means are constant on blocks of this size, so pooling by it
  /// keeps every bit of information that separates the components.
  DownsampleFactors structure{2, 4, 4};
  std::uint64_t seed = 1234;
};

/// Joint-coupled mixture whose component means are smooth random fields on
/// the coarse (structure-pooled) grid, held constant over each block.
GaussianMixtureSpec scene_mixture(const Shape& latent,
                                  const SceneMixtureParams& params = {});

}  // namespace freqcache
