#include "authentigpt/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace authentigpt {

void TrainingSet::validate() const {
  if (scores.size() != labels.size()) {
    throw LengthMismatchError("scores and labels differ in length");
  }
  if (scores.empty()) {
    throw DataError("training set is empty");
  }
  bool has_human = false, has_machine = false;
  for (Label label : labels) {
    (label == Label::human ? has_human : has_machine) = true;
  }
  if (!has_human || !has_machine) {
    throw SingleClassError("training set must contain both classes");
  }
  for (double score : scores) {
    if (!std::isfinite(score)) {
      throw DataError("training scores must be finite");
    }
  }
}

LambdaGrid LambdaGrid::uniform(double lo, double hi, int count) {
  if (count < 2 || !(lo < hi)) {
    throw ConfigError("lambda grid needs lo < hi and at least 2 values");
  }
  LambdaGrid grid;
  grid.values.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    grid.values.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(count - 1));
  }
  return grid;
}

double boxcox(double y, double lambda) {
  if (!(y > 0.0)) {
    throw NonPositiveInputError("Box-Cox input must be positive, got " +
                                std::to_string(y));
  }
  if (lambda == 0.0) return std::log(y);
  return (std::pow(y, lambda) - 1.0) / lambda;
}

std::pair<std::vector<double>, double> shift_scores(std::span<const double> scores) {
  if (scores.empty()) throw DataError("no scores to shift");
  std::vector<double> shifted;
  shifted.reserve(scores.size());
  for (double score : scores) shifted.push_back(score + kPositivityShift);
  return {std::move(shifted), kPositivityShift};
}

// --- GMM ---------------------------------------------------------------------

namespace {

double log_gaussian(double x, double mean, double variance) {
  static const double kLogTwoPi = std::log(2.0 * std::numbers::pi);
  const double diff = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance) + diff * diff / variance);
}

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

MeanVar moments(std::span<const double> data) {
  MeanVar mv;
  for (double x : data) mv.mean += x;
  mv.mean /= static_cast<double>(data.size());
  for (double x : data) {
    const double d = x - mv.mean;
    mv.variance += d * d;
  }
  mv.variance /= static_cast<double>(data.size());
  return mv;
}

}  // namespace

GmmFit fit_gmm(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 4) {
    throw DegenerateDataError("GMM fit needs at least 4 points, got " +
                              std::to_string(n));
  }
  for (double x : data) {
    if (!std::isfinite(x)) {
      throw DegenerateDataError("GMM fit needs finite data");
    }
  }
  const auto [min_it, max_it] = std::minmax_element(data.begin(), data.end());
  if (*min_it == *max_it) {
    throw DegenerateDataError("GMM fit on identical points is degenerate");
  }

  // Median-split initialization: deterministic and adequate for two
  // components in one dimension.
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = n / 2;
  const MeanVar lo = moments(std::span<const double>(sorted).first(half));
  const MeanVar hi = moments(std::span<const double>(sorted).subspan(half));

  GmmParams params;
  params.weights = {static_cast<double>(half) / static_cast<double>(n),
                    static_cast<double>(n - half) / static_cast<double>(n)};
  params.means = {lo.mean, hi.mean};
  params.variances = {std::max(lo.variance, kVarianceFloor),
                      std::max(hi.variance, kVarianceFloor)};

  GmmFit fit;
  constexpr int kMaxIterations = 200;
  constexpr double kTolerance = 1e-8;

  std::vector<double> resp0(n);  // responsibility of component 0
  double previous_ll = -std::numeric_limits<double>::infinity();

  for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
    // E step, with the log-likelihood of the current parameters.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double l0 =
          std::log(params.weights[0]) + log_gaussian(data[i], params.means[0],
                                                     params.variances[0]);
      const double l1 =
          std::log(params.weights[1]) + log_gaussian(data[i], params.means[1],
                                                     params.variances[1]);
      const double m = std::max(l0, l1);
      const double log_total = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
      resp0[i] = std::exp(l0 - log_total);
      ll += log_total;
    }
    fit.log_likelihoods.push_back(ll);
    fit.iterations = iteration + 1;
    if (ll - previous_ll < kTolerance) break;
    previous_ll = ll;

    // M step.
    double n0 = 0.0, sum0 = 0.0, sum1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      n0 += resp0[i];
      sum0 += resp0[i] * data[i];
      sum1 += (1.0 - resp0[i]) * data[i];
    }
    const double n1 = static_cast<double>(n) - n0;
    // A component that lost all mass keeps its previous parameters.
    if (n0 > 0.0) params.means[0] = sum0 / n0;
    if (n1 > 0.0) params.means[1] = sum1 / n1;
    double var0 = 0.0, var1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = data[i] - params.means[0];
      const double d1 = data[i] - params.means[1];
      var0 += resp0[i] * d0 * d0;
      var1 += (1.0 - resp0[i]) * d1 * d1;
    }
    if (n0 > 0.0) params.variances[0] = std::max(var0 / n0, kVarianceFloor);
    if (n1 > 0.0) params.variances[1] = std::max(var1 / n1, kVarianceFloor);
    params.weights[0] = n0 / static_cast<double>(n);
    params.weights[1] = n1 / static_cast<double>(n);
  }

  fit.params = params;
  return fit;
}

// --- AUROC ---------------------------------------------------------------------

double auroc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw LengthMismatchError("scores and labels differ in length");
  }
  std::size_t positives = 0;
  for (Label label : labels) {
    if (label == Label::machine) ++positives;
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw SingleClassError("AUROC needs both classes");
  }

  // Midrank formulation of the Mann-Whitney statistic.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // ranks are 1-based; tied values share the average rank of the run [i, j)
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == Label::machine) positive_rank_sum += midrank;
    }
    i = j;
  }

  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) /
         (p * static_cast<double>(negatives));
}

// --- model selection -------------------------------------------------------------

double machine_posterior(const GmmParams& gmm, int machine_component,
                         double transformed) {
  const int m = machine_component;
  const int h = 1 - machine_component;
  const double lm = std::log(gmm.weights[m]) +
                    log_gaussian(transformed, gmm.means[m], gmm.variances[m]);
  const double lh = std::log(gmm.weights[h]) +
                    log_gaussian(transformed, gmm.means[h], gmm.variances[h]);
  const double top = std::max(lm, lh);
  return std::exp(lm - top) / (std::exp(lm - top) + std::exp(lh - top));
}

json to_json(const std::vector<LambdaDiagnostic>& diagnostics) {
  json out = json::array();
  for (const LambdaDiagnostic& d : diagnostics) {
    json entry{{"lambda", d.lambda}, {"skipped", d.skipped}};
    if (d.skipped) {
      entry["auroc"] = nullptr;
    } else {
      entry["auroc"] = d.auroc;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

TrainResult find_threshold(const TrainingSet& training, const LambdaGrid& grid,
                           double alpha, int beta) {
  training.validate();
  if (grid.values.empty()) throw ConfigError("empty lambda grid");

  const auto [shifted, shift] = shift_scores(training.scores);

  TrainResult result;
  result.diagnostics.reserve(grid.values.size());
  bool found = false;
  double best_auroc = -1.0;

  std::vector<double> transformed(shifted.size());
  std::vector<double> posteriors(shifted.size());

  for (double lambda : grid.values) {
    LambdaDiagnostic diagnostic;
    diagnostic.lambda = lambda;
    try {
      for (std::size_t i = 0; i < shifted.size(); ++i) {
        transformed[i] = boxcox(shifted[i], lambda);
      }
      const GmmFit fit = fit_gmm(transformed);
      // Machine = larger mean; higher similarity indicates machine-generated
      // text, and the transform is order-preserving. Exact tie falls to 0.
      const int machine_component =
          fit.params.means[1] > fit.params.means[0] ? 1 : 0;
      for (std::size_t i = 0; i < shifted.size(); ++i) {
        posteriors[i] =
            machine_posterior(fit.params, machine_component, transformed[i]);
      }
      diagnostic.auroc = auroc(posteriors, training.labels);

      // Strictly-greater keeps the smallest lambda on ties (grid ascends).
      if (!found || diagnostic.auroc > best_auroc) {
        found = true;
        best_auroc = diagnostic.auroc;
        result.model.lambda = lambda;
        result.model.shift = shift;
        result.model.gmm = fit.params;
        result.model.machine_component = machine_component;
      }
    } catch (const DegenerateDataError&) {
      diagnostic.skipped = true;
    }
    result.diagnostics.push_back(diagnostic);
  }

  if (!found) {
    throw DegenerateDataError("every lambda in the grid failed to fit");
  }
  result.model.alpha = alpha;
  result.model.beta = beta;
  result.training_auroc = best_auroc;
  return result;
}

Classification classify(const DetectorModel& model, double score) {
  const double y = score + model.shift;
  if (!(y > 0.0)) {
    throw NonPositiveInputError("shifted score must be positive, got " +
                                std::to_string(y));
  }
  const double transformed = boxcox(y, model.lambda);
  const double posterior =
      machine_posterior(model.gmm, model.machine_component, transformed);
  return Classification{posterior >= 0.5 ? Label::machine : Label::human,
                        posterior};
}

}  // namespace authentigpt
