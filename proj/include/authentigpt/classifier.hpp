#pragma once

#include <span>
#include <utility>
#include <vector>

#include "authentigpt/core.hpp"

namespace authentigpt {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct TrainingSet {
  std::vector<double> scores;  // similarity means, in [-1,1]
  std::vector<Label> labels;   // parallel

  // Both classes present, equal lengths. Throws.
  void validate() const;
};

struct LambdaGrid {
  std::vector<double> values;  // strictly increasing

  // `count` evenly spaced values over [lo, hi] inclusive.
  static LambdaGrid uniform(double lo, double hi, int count);
};

// Additive offset applied to similarity scores before the power transform.
// Scores live in [-1,1]; 1 + 1e-9 maps the worst case to a strictly positive
// value.
inline constexpr double kPositivityShift = 1.0 + 1e-9;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// (y^lambda - 1)/lambda, ln(y) at lambda = 0. Strictly increasing in y for
// every fixed lambda. Throws NonPositiveInputError for y <= 0.
double boxcox(double y, double lambda);

// shifted[i] = scores[i] + kPositivityShift. Strictly monotone, output > 0.
std::pair<std::vector<double>, double> shift_scores(std::span<const double> scores);

struct GmmFit {
  GmmParams params;
  std::vector<double> log_likelihoods;  // one entry per EM iteration
  int iterations = 0;
};

// Two-component 1-D EM. Initialization is a median split (each half's
// mean/variance, weights from the half sizes), variance floor 1e-6,
// convergence when the log-likelihood improves by less than 1e-8, cap 200
// iterations. Throws DegenerateDataError for fewer than 4 points or
// all-identical data.
GmmFit fit_gmm(std::span<const double> data);

inline constexpr double kVarianceFloor = 1e-6;

// Mann-Whitney AUROC with machine as the positive class:
//   (#{(m,h): s_m > s_h} + 0.5 * #ties) / (P * N),
// computed via midranks. Throws SingleClassError / LengthMismatchError.
double auroc(std::span<const double> scores, std::span<const Label> labels);

// Posterior probability of the machine component at a transformed value.
double machine_posterior(const GmmParams& gmm, int machine_component,
                         double transformed);

struct LambdaDiagnostic {
  double lambda = 0.0;
  double auroc = 0.0;   // meaningless when skipped
  bool skipped = false;
};

json to_json(const std::vector<LambdaDiagnostic>& diagnostics);

struct TrainResult {
  DetectorModel model;
  std::vector<LambdaDiagnostic> diagnostics;  // one entry per grid value
  double training_auroc = 0.0;
};

// For each lambda: shift, transform, fit the GMM unsupervised, score every
// training point by the machine component's posterior, and compute AUROC
// against the labels. Returns the model with maximal AUROC; ties go to the
// smallest lambda. A lambda whose fit degenerates is skipped and recorded.
// alpha/beta are stamped into the returned model so detection can verify its
// config matches training.
TrainResult find_threshold(const TrainingSet& training, const LambdaGrid& grid,
                           double alpha, int beta);

struct Classification {
  Label label = Label::human;
  double posterior = 0.0;  // probability of machine
};

// Soft classification of one similarity mean. label = machine iff
// posterior >= 0.5. Throws NonPositiveInputError if score + shift <= 0.
Classification classify(const DetectorModel& model, double score);

}  // namespace authentigpt
