// Copyright 2026 The srd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "srd/rankmodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "srd/error.hpp"

namespace srd {

FitNotConverged::FitNotConverged(double alpha, double beta, double loss, int iterations)
    : Error("rankmodel", "fit did not converge after " + std::to_string(iterations) +
                             " iterations (best alpha=" + std::to_string(alpha) +
                             ", beta=" + std::to_string(beta) +
                             ", loss=" + std::to_string(loss) + ")"),
      alpha_(alpha),
      beta_(beta),
      loss_(loss),
      iterations_(iterations) {}

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("rankmodel", message); }

void check_parameters(double alpha, double beta, std::size_t n_references) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    fail("beta-binomial parameters must be positive and finite");
  if (n_references < 2) fail("beta-binomial needs at least two references");
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

const double kLogMin = std::log(kMinShape);
const double kLogMax = std::log(kMaxShape);

using Point = std::array<double, 2>;

Point clamp_point(Point p) {
  return {std::clamp(p[0], kLogMin, kLogMax), std::clamp(p[1], kLogMin, kLogMax)};
}

struct SearchResult {
  Point best;
  double loss;
  int iterations;
  bool converged;
};

// Nelder-Mead with standard coefficients, vertices projected into the box.
template <typename F>
SearchResult nelder_mead(F&& f, Point start, double tolerance, int max_iterations) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  constexpr double kStep = 0.5;
  constexpr double kXTolerance = 1e-7;

  std::array<Point, 3> v;
  v[0] = clamp_point(start);
  for (int d = 0; d < 2; ++d) {
    Point p = v[0];
    p[d] += (p[d] + kStep <= kLogMax) ? kStep : -kStep;
    v[d + 1] = p;
  }
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};

  int it = 0;
  for (;; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const std::array<Point, 3> sv{v[order[0]], v[order[1]], v[order[2]]};
    const std::array<double, 3> sf{fv[order[0]], fv[order[1]], fv[order[2]]};
    v = sv;
    fv = sf;

    double size = 0.0;
    for (int k = 1; k < 3; ++k)
      size = std::max({size, std::abs(v[k][0] - v[0][0]), std::abs(v[k][1] - v[0][1])});
    if (fv[2] - fv[0] < tolerance && size < kXTolerance) return {v[0], fv[0], it, true};
    if (it >= max_iterations) return {v[0], fv[0], it, false};

    const Point centroid{(v[0][0] + v[1][0]) / 2.0, (v[0][1] + v[1][1]) / 2.0};
    auto along = [&](double t) {
      return clamp_point({centroid[0] + t * (v[2][0] - centroid[0]),
                          centroid[1] + t * (v[2][1] - centroid[1])});
    };

    const Point xr = along(-kReflect);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const Point xe = along(-kExpand);
      const double fe = f(xe);
      if (fe < fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
      continue;
    }
    if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
      continue;
    }
    const bool outside = fr < fv[2];
    const Point xc = along(outside ? -kContract : kContract);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[2])) {
      v[2] = xc;
      fv[2] = fc;
      continue;
    }
    for (int k = 1; k < 3; ++k) {
      v[k] = {v[0][0] + kShrink * (v[k][0] - v[0][0]), v[0][1] + kShrink * (v[k][1] - v[0][1])};
      fv[k] = f(v[k]);
    }
  }
}

}  // namespace

std::vector<double> log_betabinom_pmf(double alpha, double beta, std::size_t n_references) {
  check_parameters(alpha, beta, n_references);
  const double n = static_cast<double>(n_references - 1);
  const double log_norm = log_beta(alpha, beta);
  const double log_n_fact = std::lgamma(n + 1.0);
  std::vector<double> out(n_references);
  for (std::size_t j = 0; j < n_references; ++j) {
    const double k = static_cast<double>(j);
    const double log_choose = log_n_fact - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    out[j] = log_choose + log_beta(k + alpha, n - k + beta) - log_norm;
  }
  return out;
}

std::vector<double> betabinom_pmf(double alpha, double beta, std::size_t n_references) {
  check_parameters(alpha, beta, n_references);
  // BB(n, 1, 1) is the discrete uniform; return it exactly.
  if (alpha == 1.0 && beta == 1.0)
    return std::vector<double>(n_references, 1.0 / static_cast<double>(n_references));
  std::vector<double> out = log_betabinom_pmf(alpha, beta, n_references);
  for (double& v : out) v = std::exp(v);
  return out;
}

double log_likelihood(const RankDistribution& dist, double alpha, double beta) {
  const auto logp = log_betabinom_pmf(alpha, beta, dist.n_references());
  const auto counts = dist.counts();
  double ll = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) ll += static_cast<double>(counts[k]) * logp[k];
  }
  return ll;
}

double fit_loss(const RankDistribution& dist, double alpha, double beta,
                double rank1_penalty_weight) {
  const auto logp = log_betabinom_pmf(alpha, beta, dist.n_references());
  const auto counts = dist.counts();
  double ll = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) ll += static_cast<double>(counts[k]) * logp[k];
  }
  const double gap = std::exp(logp[0]) - dist.probability_at(1);
  return -ll + rank1_penalty_weight * static_cast<double>(dist.total()) * gap * gap;
}

std::pair<double, double> moment_estimate(const RankDistribution& dist) {
  const auto counts = dist.counts();
  const std::size_t observed =
      static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  if (observed <= 1 || dist.n_references() < 2) return {1.0, 1.0};

  const double total = static_cast<double>(dist.total());
  double mean = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) mean += static_cast<double>(counts[k]) * k;
  mean /= total;
  double var = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double d = static_cast<double>(k) - mean;
    var += static_cast<double>(counts[k]) * d * d;
  }
  var /= total;

  const double n = static_cast<double>(dist.n_references() - 1);
  const double p = mean / n;
  double concentration;  // alpha + beta
  if (n < 2.0) {
    concentration = 2.0;
  } else {
    // var = n p (1 - p) (1 + (n - 1) rho), rho = 1 / (alpha + beta + 1)
    const double rho = (var / (n * p * (1.0 - p)) - 1.0) / (n - 1.0);
    if (rho <= 0.0)
      concentration = 2.0 * kMaxShape;
    else if (rho >= 1.0)
      concentration = 2.0 * kMinShape;
    else
      concentration = 1.0 / rho - 1.0;
  }
  return {std::clamp(p * concentration, kMinShape, kMaxShape),
          std::clamp((1.0 - p) * concentration, kMinShape, kMaxShape)};
}

BetaBinomialModel fit(const RankDistribution& dist, const FitConfig& config) {
  if (!(config.tolerance > 0.0)) fail("fit tolerance must be positive");
  if (config.rank1_penalty_weight < 0.0) fail("rank-1 penalty weight must be non-negative");
  if (config.max_iterations < 1) fail("max_iterations must be positive");
  if (dist.n_references() < 2) fail("fit needs at least two ranks");

  auto objective = [&](const Point& p) {
    return fit_loss(dist, std::exp(p[0]), std::exp(p[1]), config.rank1_penalty_weight);
  };

  std::vector<Point> starts;
  if (config.initializer == Initializer::kMethodOfMoments) {
    const auto [a, b] = moment_estimate(dist);
    starts.push_back({std::log(a), std::log(b)});
  } else {
    starts.push_back({0.0, 0.0});
  }
  if (config.multistart) {
    for (double a : {0.1, 1.0, 10.0})
      for (double b : {0.1, 1.0, 10.0}) starts.push_back({std::log(a), std::log(b)});
  }

  SearchResult best{{0.0, 0.0}, std::numeric_limits<double>::infinity(), 0, false};
  int total_iterations = 0;
  for (const Point& start : starts) {
    // Restart from the optimum until a fresh simplex stops finding
    // improvements; a collapsed simplex can otherwise stall early.
    SearchResult r = nelder_mead(objective, start, config.tolerance,
                                 config.max_iterations - total_iterations);
    total_iterations += r.iterations;
    while (r.converged && total_iterations < config.max_iterations) {
      SearchResult again = nelder_mead(objective, r.best, config.tolerance,
                                       config.max_iterations - total_iterations);
      total_iterations += again.iterations;
      const bool improved = again.loss < r.loss - config.tolerance;
      if (again.loss <= r.loss) r = again;
      if (!improved) break;
    }
    if (!r.converged) {
      const SearchResult& report = r.loss < best.loss ? r : best;
      throw FitNotConverged(std::exp(report.best[0]), std::exp(report.best[1]), report.loss,
                            total_iterations);
    }
    if (r.loss < best.loss) best = r;
  }

  BetaBinomialModel model;
  model.alpha = std::clamp(std::exp(best.best[0]), kMinShape, kMaxShape);
  model.beta = std::clamp(std::exp(best.best[1]), kMinShape, kMaxShape);
  model.n_references = dist.n_references();
  model.gamma = betabinom_pmf(model.alpha, model.beta, model.n_references);
  model.loss = best.loss;
  model.iterations = total_iterations;
  return model;
}

std::string model_to_json(const BetaBinomialModel& model) {
  nlohmann::json j;
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["n_references"] = model.n_references;
  j["gamma"] = model.gamma;
  j["loss"] = model.loss;
  j["iterations"] = model.iterations;
  j["constraint_form"] = std::string(kConstraintForm);
  return j.dump(2) + "\n";
}

}  // namespace srd
