// Copyright 2026 The freqcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "freqcache/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "freqcache/error.hpp"
#include "freqcache/kernels.hpp"

namespace freqcache {
namespace {

enum class MeanLayout { scalar, per_channel, full };

MeanLayout layout_of(const Tensor4& mean, const Shape& latent) {
  const Shape& s = mean.shape();
  if (s == Shape{1, 1, 1, 1}) return MeanLayout::scalar;
  if (s == Shape{1, 1, 1, latent.c}) return MeanLayout::per_channel;
  if (s == latent) return MeanLayout::full;
  throw ConfigError("mixture mean shape " + s.to_string() +
                    " does not broadcast to latent " + latent.to_string());
}

// Flattened view of one component for the inner loops.
struct ComponentView {
  double log_weight;
  double variance;
  MeanLayout layout;
  const double* mean;
  std::size_t channels;

  double mean_at(std::size_t cell) const {
    switch (layout) {
      case MeanLayout::scalar:
        return mean[0];
      case MeanLayout::per_channel:
        return mean[cell % channels];
      case MeanLayout::full:
        break;
    }
    return mean[cell];
  }
};

std::vector<ComponentView> views(const GaussianMixtureSpec& spec) {
  std::vector<ComponentView> out;
  out.reserve(spec.components.size());
  for (const auto& c : spec.components)
    out.push_back(ComponentView{std::log(c.weight), c.variance,
                                layout_of(c.mean, spec.latent),
                                c.mean.data().data(), spec.latent.c});
  return out;
}

void check_time(double t) {
  if (!(t > 0.0)) throw DomainError("mixture velocity requires t > 0");
  if (!(t <= 1.0)) throw DomainError("mixture velocity requires t <= 1");
}

void check_input(const GaussianMixtureSpec& spec, const Tensor4& x) {
  if (x.shape() != spec.latent)
    throw DimensionError("mixture input shape " + x.shape().to_string() +
                         " does not match latent " + spec.latent.to_string());
}

double denominator(double variance, double noise, double t) {
  const double a = 1.0 - t;
  return a * a * variance + t * t * noise;
}

void normalize_log(std::span<double> logs) {
  const double top = *std::max_element(logs.begin(), logs.end());
  double z = 0.0;
  for (double& l : logs) {
    l = std::exp(l - top);
    z += l;
  }
  for (double& l : logs) l /= z;
}

// Shared responsibilities for joint coupling.
std::vector<double> joint_responsibilities(const GaussianMixtureSpec& spec,
                                           const std::vector<ComponentView>& cv,
                                           const Tensor4& x, double t) {
  const std::size_t n = x.size();
  const double a = 1.0 - t;
  std::vector<double> logs(cv.size());
  std::vector<double> resid(n);
  for (std::size_t k = 0; k < cv.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) resid[i] = x[i] - a * cv[k].mean_at(i);
    const double ss = kernels::parallel::sum_squares(resid);
    const double den = denominator(cv[k].variance, spec.noise_variance, t);
    logs[k] = cv[k].log_weight - 0.5 * static_cast<double>(n) * std::log(den) -
              0.5 * ss / den;
  }
  normalize_log(logs);
  return logs;
}

}  // namespace

void GaussianMixtureSpec::validate() const {
  if (components.empty()) throw ConfigError("mixture needs at least one component");
  if (!(noise_variance > 0.0)) throw ConfigError("noise variance must be > 0");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw ConfigError("mixture weights must be positive");
    if (!(c.variance > 0.0)) throw ConfigError("mixture variances must be positive");
    layout_of(c.mean, latent);
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("mixture weights must sum to 1");
}

GaussianMixtureSpec GaussianMixtureSpec::pooled(const Shape& target) const {
  if (target == latent) return *this;
  if (target.c != latent.c || target.t == 0 || target.h == 0 || target.w == 0 ||
      latent.t % target.t != 0 || latent.h % target.h != 0 ||
      latent.w % target.w != 0) {
    throw DimensionError("shape " + target.to_string() +
                         " is not a pooling of latent " + latent.to_string());
  }
  const DownsampleFactors f{latent.t / target.t, latent.h / target.h,
                            latent.w / target.w};
  const double volume = static_cast<double>(f.volume());
  GaussianMixtureSpec out = *this;
  out.latent = target;
  out.noise_variance = noise_variance / volume;
  for (auto& c : out.components) {
    if (c.mean.shape() == latent) c.mean = avg_downsample(c.mean, f);
    c.variance /= volume;
  }
  return out;
}

std::vector<double> mixture_responsibilities(const GaussianMixtureSpec& spec,
                                             const Tensor4& x, double t) {
  check_time(t);
  check_input(spec, x);
  const auto cv = views(spec);
  if (spec.coupling == MixtureCoupling::joint)
    return joint_responsibilities(spec, cv, x, t);

  const std::size_t K = cv.size();
  const double a = 1.0 - t;
  std::vector<double> out(x.size() * K);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::span<double> logs(out.data() + i * K, K);
    for (std::size_t k = 0; k < K; ++k) {
      const double den = denominator(cv[k].variance, spec.noise_variance, t);
      const double r = x[i] - a * cv[k].mean_at(i);
      logs[k] = cv[k].log_weight - 0.5 * std::log(den) - 0.5 * r * r / den;
    }
    normalize_log(logs);
  }
  return out;
}

Tensor4 mixture_posterior_mean(const GaussianMixtureSpec& spec,
                               const Tensor4& x, double t) {
  check_time(t);
  check_input(spec, x);
  const auto cv = views(spec);
  const std::size_t K = cv.size();
  const std::size_t n = x.size();
  const double a = 1.0 - t;

  std::vector<double> gain(K);
  for (std::size_t k = 0; k < K; ++k)
    gain[k] = a * cv[k].variance /
              denominator(cv[k].variance, spec.noise_variance, t);

  std::vector<double> shared;
  if (spec.coupling == MixtureCoupling::joint)
    shared = joint_responsibilities(spec, cv, x, t);

  Tensor4 out(x.shape());
  auto o = out.mutable_data();
  const bool per_cell = spec.coupling == MixtureCoupling::per_cell;
  const auto nn = static_cast<long long>(n);
#pragma omp parallel if (n >= kernels::kParallelThreshold)
  {
    std::vector<double> resp(K);
#pragma omp for schedule(static)
    for (long long ii = 0; ii < nn; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const double xi = x[i];
      if (per_cell) {
        for (std::size_t k = 0; k < K; ++k) {
          const double den = denominator(cv[k].variance, spec.noise_variance, t);
          const double r = xi - a * cv[k].mean_at(i);
          resp[k] = cv[k].log_weight - 0.5 * std::log(den) - 0.5 * r * r / den;
        }
        normalize_log(resp);
      }
      const std::vector<double>& w = per_cell ? resp : shared;
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double m = cv[k].mean_at(i);
        acc += w[k] * (m + gain[k] * (xi - a * m));
      }
      o[i] = acc;
    }
  }
  return out;
}

Tensor4 mixture_velocity(const GaussianMixtureSpec& spec, const Tensor4& x,
                         double t) {
  const Tensor4 pm = mixture_posterior_mean(spec, x, t);
  Tensor4 v = axpy(x, -1.0, pm);
  for (double& e : v.mutable_data()) e /= t;
  return v;
}

MixturePredictor::MixturePredictor(GaussianMixtureSpec spec)
    : spec_(std::move(spec)) {
  spec_.validate();
}

Tensor4 MixturePredictor::evaluate(const Tensor4& z,
                                   const StepInfo& step) const {
  if (z.shape() == spec_.latent) return mixture_velocity(spec_, z, step.t);
  return mixture_velocity(spec_.pooled(z.shape()), z, step.t);
}

GaussianMixtureSpec single_gaussian(const Shape& latent, double mean,
                                    double variance) {
  GaussianMixtureSpec spec;
  spec.latent = latent;
  spec.components.push_back(
      MixtureComponent{1.0, Tensor4(Shape{1, 1, 1, 1}, mean), variance});
  spec.validate();
  return spec;
}

GaussianMixtureSpec symmetric_pair(const Shape& latent, double mu,
                                   double variance, MixtureCoupling coupling) {
  GaussianMixtureSpec spec;
  spec.latent = latent;
  spec.coupling = coupling;
  spec.components.push_back(
      MixtureComponent{0.5, Tensor4(Shape{1, 1, 1, 1}, mu), variance});
  spec.components.push_back(
      MixtureComponent{0.5, Tensor4(Shape{1, 1, 1, 1}, -mu), variance});
  spec.validate();
  return spec;
}

GaussianMixtureSpec scene_mixture(const Shape& latent,
                                  const SceneMixtureParams& params) {
  if (params.components == 0) throw ConfigError("scene mixture needs components");
  const Shape coarse = downsampled_shape(latent, params.structure);
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  GaussianMixtureSpec spec;
  spec.latent = latent;
  spec.coupling = MixtureCoupling::joint;
  const double weight = 1.0 / static_cast<double>(params.components);
  for (std::size_t k = 0; k < params.components; ++k) {
    // Random field on the coarse grid from spatial modes with |frequency|
    // <= 1 on both axes.
    Tensor4 field(coarse);
    for (std::size_t t = 0; t < coarse.t; ++t)
      for (std::size_t c = 0; c < coarse.c; ++c)
        for (int fy = -1; fy <= 1; ++fy)
          for (int fx = -1; fx <= 1; ++fx) {
            const double ca = normal(rng), sa = normal(rng);
            for (std::size_t h = 0; h < coarse.h; ++h)
              for (std::size_t w = 0; w < coarse.w; ++w) {
                const double phase =
                    2.0 * std::numbers::pi *
                    (fy * static_cast<double>(h) / static_cast<double>(coarse.h) +
                     fx * static_cast<double>(w) / static_cast<double>(coarse.w));
                field.at(t, h, w, c) += ca * std::cos(phase) + sa * std::sin(phase);
              }
          }
    const double rms = std::sqrt(sum_squares(field) / static_cast<double>(field.size()));
    const double scale = rms > 0.0 ? params.amplitude / rms : 0.0;

    Tensor4 mean(latent);
    const DownsampleFactors& f = params.structure;
    for (std::size_t t = 0; t < latent.t; ++t)
      for (std::size_t h = 0; h < latent.h; ++h)
        for (std::size_t w = 0; w < latent.w; ++w)
          for (std::size_t c = 0; c < latent.c; ++c)
            mean.at(t, h, w, c) =
                scale * field.at(t / f.temporal, h / f.height, w / f.width, c);
    spec.components.push_back(MixtureComponent{weight, std::move(mean), params.variance});
  }
  // Absorb rounding in 1/K so the weights sum to exactly 1.
  double rest = 1.0;
  for (std::size_t k = 0; k + 1 < spec.components.size(); ++k)
    rest -= spec.components[k].weight;
  spec.components.back().weight = rest;
  spec.validate();
  return spec;
}

}  // namespace freqcache
