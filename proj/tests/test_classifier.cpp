#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "authentigpt/classifier.hpp"

using namespace authentigpt;

namespace {

// Independent oracle: all-pairs Mann-Whitney count, wins + half ties.
double auroc_bruteforce(const std::vector<double>& scores,
                        const std::vector<Label>& labels) {
  double wins = 0.0, ties = 0.0;
  std::size_t positives = 0, negatives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != Label::machine) continue;
    ++positives;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != Label::human) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) ties += 1.0;
    }
  }
  for (Label label : labels) {
    if (label == Label::human) ++negatives;
  }
  return (wins + 0.5 * ties) /
         (static_cast<double>(positives) * static_cast<double>(negatives));
}

// Box-Muller on SplitMix64; independent of the EM implementation.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}
  double sample(double mean, double stddev) {
    const double u1 = std::max(rng_.uniform01(), 1e-300);
    const double u2 = rng_.uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
  }

 private:
  SplitMix64 rng_;
};

// Every fit in the suite funnels through here so the EM monotonicity
// guarantee is asserted on all of them.
GmmFit checked_fit(std::span<const double> data) {
  const GmmFit fit = fit_gmm(data);
  for (std::size_t i = 1; i < fit.log_likelihoods.size(); ++i) {
    REQUIRE(fit.log_likelihoods[i] >= fit.log_likelihoods[i - 1] - 1e-10);
  }
  REQUIRE(std::fabs(fit.params.weights[0] + fit.params.weights[1] - 1.0) < 1e-9);
  REQUIRE(fit.params.variances[0] >= kVarianceFloor);
  REQUIRE(fit.params.variances[1] >= kVarianceFloor);
  return fit;
}

}  // namespace

TEST_CASE("boxcox analytic values") {
  CHECK(std::fabs(boxcox(4.0, 0.5) - 2.0) < 1e-12);
  CHECK(std::fabs(boxcox(std::exp(1.0), 0.0) - 1.0) < 1e-12);
  for (double lambda : {-2.0, -0.5, 0.0, 0.5, 2.0, 1e-9}) {
    CHECK(std::fabs(boxcox(1.0, lambda)) < 1e-12);
  }
}

TEST_CASE("boxcox approaches log as lambda goes to zero") {
  for (double y : {0.5, 1.5, 3.0}) {
    CHECK(std::fabs(boxcox(y, 1e-9) - std::log(y)) < 1e-6);
  }
}

TEST_CASE("boxcox is strictly increasing in y for every lambda") {
  for (double lambda : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    double previous = -1e300;
    for (int i = 0; i < 100; ++i) {
      const double y = 0.01 + static_cast<double>(i) * 0.05;
      const double value = boxcox(y, lambda);
      CHECK(value > previous);
      previous = value;
    }
  }
}

TEST_CASE("boxcox rejects the non-positive domain") {
  CHECK_THROWS_AS(boxcox(0.0, 0.5), NonPositiveInputError);
  CHECK_THROWS_AS(boxcox(-1.0, 0.0), NonPositiveInputError);
}

TEST_CASE("shift maps [-1,1] scores into the positive domain") {
  const auto [worst, shift1] = shift_scores(std::vector<double>{-1.0});
  CHECK(shift1 == kPositivityShift);
  CHECK(worst[0] > 0.0);
  CHECK(std::fabs(worst[0] - 1e-9) < 1e-15);

  const auto [zero, shift2] = shift_scores(std::vector<double>{0.0});
  CHECK(zero[0] == kPositivityShift);
  (void)shift2;

  const std::vector<double> scores{0.4, -0.7, 0.9, 0.1, -0.2};
  const auto [shifted, shift3] = shift_scores(scores);
  (void)shift3;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = 0; j < scores.size(); ++j) {
      CHECK((scores[i] < scores[j]) == (shifted[i] < shifted[j]));
    }
  }
  CHECK_THROWS_AS(shift_scores(std::vector<double>{}), DataError);
}

TEST_CASE("em recovers two well-separated clusters") {
  GaussianSampler sampler(42);
  std::vector<double> data;
  for (int i = 0; i < 50; ++i) data.push_back(sampler.sample(0.0, 0.1));
  for (int i = 0; i < 50; ++i) data.push_back(sampler.sample(10.0, 0.1));

  const GmmFit fit = checked_fit(data);
  const int low = fit.params.means[0] < fit.params.means[1] ? 0 : 1;
  const int high = 1 - low;
  CHECK(std::fabs(fit.params.means[low] - 0.0) < 0.2);
  CHECK(std::fabs(fit.params.means[high] - 10.0) < 0.2);
  CHECK(std::fabs(fit.params.weights[low] - 0.5) < 0.1);
  CHECK(std::fabs(fit.params.weights[high] - 0.5) < 0.1);
}

TEST_CASE("em on symmetric data finds symmetric means") {
  std::vector<double> data;
  for (int i = 0; i < 25; ++i) {
    data.push_back(-3.0);
    data.push_back(3.0);
  }
  const GmmFit fit = checked_fit(data);
  CHECK(std::fabs(fit.params.means[0] + fit.params.means[1]) < 1e-6);
  CHECK(std::fabs(fit.params.weights[0] - 0.5) < 1e-6);
}

TEST_CASE("em log-likelihood is non-decreasing on overlapping data") {
  GaussianSampler sampler(7);
  std::vector<double> data;
  for (int i = 0; i < 60; ++i) data.push_back(sampler.sample(0.0, 1.0));
  for (int i = 0; i < 40; ++i) data.push_back(sampler.sample(1.5, 1.2));
  const GmmFit fit = checked_fit(data);  // monotonicity asserted inside
  CHECK(fit.iterations >= 2);
}

TEST_CASE("em rejects degenerate data") {
  CHECK_THROWS_AS(fit_gmm(std::vector<double>{1.0, 1.0, 1.0}), DegenerateDataError);
  CHECK_THROWS_AS(fit_gmm(std::vector<double>{2.0, 2.0, 2.0, 2.0}),
                  DegenerateDataError);
}

TEST_CASE("auroc analytic cases") {
  CHECK(auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9},
              std::vector<Label>{Label::human, Label::human, Label::machine,
                                 Label::machine}) == 1.0);
  CHECK(auroc(std::vector<double>{0.5, 0.5, 0.5, 0.5},
              std::vector<Label>{Label::human, Label::machine, Label::human,
                                 Label::machine}) == 0.5);
  // human {0.1, 0.4}, machine {0.35, 0.8}: 3 wins of 4 pairs, no ties
  const std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
  const std::vector<Label> labels{Label::human, Label::human, Label::machine,
                                  Label::machine};
  CHECK(auroc(scores, labels) == 0.75);
  CHECK(auroc_bruteforce(scores, labels) == 0.75);
}

TEST_CASE("auroc requires both classes and equal lengths") {
  CHECK_THROWS_AS(auroc(std::vector<double>{1.0, 2.0},
                        std::vector<Label>{Label::human, Label::human}),
                  SingleClassError);
  CHECK_THROWS_AS(auroc(std::vector<double>{1.0},
                        std::vector<Label>{Label::human, Label::machine}),
                  LengthMismatchError);
}

TEST_CASE("auroc matches the brute-force oracle on random instances with ties") {
  SplitMix64 rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.bounded(49);
    std::vector<double> scores;
    std::vector<Label> labels;
    bool seen_human = false, seen_machine = false;
    for (std::size_t i = 0; i < n; ++i) {
      // coarse score grid so ties actually happen
      scores.push_back(static_cast<double>(rng.bounded(10)) / 10.0);
      const Label label = rng.bounded(2) == 0 ? Label::human : Label::machine;
      labels.push_back(label);
      (label == Label::human ? seen_human : seen_machine) = true;
    }
    if (!seen_human) labels[0] = Label::human;
    if (!seen_machine) labels[labels.size() - 1] = Label::machine;
    CHECK(std::fabs(auroc(scores, labels) - auroc_bruteforce(scores, labels)) <
          1e-9);
  }
}

TEST_CASE("auroc is invariant under shift plus boxcox for every grid lambda") {
  const LambdaGrid grid = LambdaGrid::uniform(-2.0, 2.0, 100);
  SplitMix64 rng(31415);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 6 + rng.bounded(30);
    std::vector<double> scores;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back(-1.0 + 0.01 * static_cast<double>(rng.bounded(201)));
      labels.push_back(i % 2 == 0 ? Label::human : Label::machine);
    }
    const double raw = auroc(scores, labels);
    const auto [shifted, shift] = shift_scores(scores);
    (void)shift;
    for (double lambda : grid.values) {
      std::vector<double> transformed;
      transformed.reserve(shifted.size());
      for (double y : shifted) transformed.push_back(boxcox(y, lambda));
      CHECK(auroc(transformed, labels) == raw);  // exact equality
    }
  }
}

TEST_CASE("lambda grid is 100 strictly increasing values over [-2,2]") {
  const LambdaGrid grid = LambdaGrid::uniform(-2.0, 2.0, 100);
  REQUIRE(grid.values.size() == 100);
  CHECK(grid.values.front() == -2.0);
  CHECK(grid.values.back() == 2.0);
  for (std::size_t i = 1; i < grid.values.size(); ++i) {
    CHECK(grid.values[i] > grid.values[i - 1]);
  }
}

TEST_CASE("find_threshold separates two clean clusters with training auroc one") {
  TrainingSet training;
  SplitMix64 rng(55);
  for (int i = 0; i < 10; ++i) {
    training.scores.push_back(0.30 + 0.01 * rng.uniform01());
    training.labels.push_back(Label::human);
    training.scores.push_back(0.95 + 0.01 * rng.uniform01());
    training.labels.push_back(Label::machine);
  }
  const TrainResult result = find_threshold(
      training, LambdaGrid::uniform(-2.0, 2.0, 100), 0.08, 10);
  CHECK(result.training_auroc == 1.0);
  CHECK(result.model.alpha == 0.08);
  CHECK(result.model.beta == 10);
  CHECK(result.model.shift == kPositivityShift);
  CHECK(result.diagnostics.size() == 100);
  // machine component sits at the larger mean
  const GmmParams& gmm = result.model.gmm;
  CHECK(gmm.means[result.model.machine_component] ==
        std::max(gmm.means[0], gmm.means[1]));
}

TEST_CASE("find_threshold works at the paper-scale ten training samples") {
  TrainingSet training;
  training.scores = {0.31, 0.35, 0.40, 0.33, 0.38, 0.90, 0.94, 0.88, 0.92, 0.91};
  training.labels = {Label::human, Label::human, Label::human, Label::human,
                     Label::human, Label::machine, Label::machine, Label::machine,
                     Label::machine, Label::machine};
  const TrainResult result = find_threshold(
      training, LambdaGrid::uniform(-2.0, 2.0, 100), 0.08, 10);
  CHECK(result.training_auroc == 1.0);

  // Unseen scores on each side classify correctly.
  CHECK(classify(result.model, 0.34).label == Label::human);
  CHECK(classify(result.model, 0.93).label == Label::machine);
}

TEST_CASE("a custom grid can pin lambda one half exactly") {
  // 81 points over [-2,2] step 0.05 contains 0.5 exactly.
  const LambdaGrid grid = LambdaGrid::uniform(-2.0, 2.0, 81);
  CHECK(std::find(grid.values.begin(), grid.values.end(), 0.5) !=
        grid.values.end());

  TrainingSet training;
  SplitMix64 rng(66);
  for (int i = 0; i < 12; ++i) {
    training.scores.push_back(0.4 + 0.05 * rng.uniform01());
    training.labels.push_back(Label::human);
    training.scores.push_back(0.8 + 0.05 * rng.uniform01());
    training.labels.push_back(Label::machine);
  }
  const TrainResult result = find_threshold(training, grid, 0.08, 10);
  // the 0.5 grid entry was evaluated, not skipped
  const auto at_half = std::find_if(
      result.diagnostics.begin(), result.diagnostics.end(),
      [](const LambdaDiagnostic& d) { return d.lambda == 0.5; });
  REQUIRE(at_half != result.diagnostics.end());
  CHECK_FALSE(at_half->skipped);
  CHECK(at_half->auroc > 0.9);
}

TEST_CASE("find_threshold is deterministic") {
  TrainingSet training;
  SplitMix64 rng(77);
  for (int i = 0; i < 15; ++i) {
    training.scores.push_back(0.2 + 0.3 * rng.uniform01());
    training.labels.push_back(Label::human);
    training.scores.push_back(0.5 + 0.3 * rng.uniform01());
    training.labels.push_back(Label::machine);
  }
  const LambdaGrid grid = LambdaGrid::uniform(-2.0, 2.0, 100);
  const TrainResult a = find_threshold(training, grid, 0.08, 10);
  const TrainResult b = find_threshold(training, grid, 0.08, 10);
  CHECK(to_json(a.model).dump() == to_json(b.model).dump());
  CHECK(a.training_auroc == b.training_auroc);
}

TEST_CASE("training set validation") {
  TrainingSet bad;
  bad.scores = {0.1, 0.2};
  bad.labels = {Label::human};
  CHECK_THROWS_AS(bad.validate(), LengthMismatchError);
  bad.labels = {Label::human, Label::human};
  CHECK_THROWS_AS(bad.validate(), SingleClassError);
  bad.labels = {Label::human, Label::machine};
  CHECK_NOTHROW(bad.validate());
}

namespace {

DetectorModel toy_model(double human_mean, double machine_mean, double variance) {
  DetectorModel model;
  model.lambda = 1.0;  // boxcox(y,1) = y - 1, so transformed space is affine
  model.shift = kPositivityShift;
  model.gmm.weights = {0.5, 0.5};
  model.gmm.means = {human_mean, machine_mean};
  model.gmm.variances = {variance, variance};
  model.machine_component = 1;
  model.alpha = 0.08;
  model.beta = 10;
  return model;
}

double transformed_of(const DetectorModel& model, double score) {
  return boxcox(score + model.shift, model.lambda);
}

}  // namespace

TEST_CASE("classify is confident at a component mean of a separated model") {
  DetectorModel model = toy_model(0.0, 0.0, 0.0004);  // means set below
  // place component means at the transforms of scores 0.3 and 0.9
  model.gmm.means = {transformed_of(model, 0.3), transformed_of(model, 0.9)};
  const Classification at_machine = classify(model, 0.9);
  CHECK(at_machine.label == Label::machine);
  CHECK(at_machine.posterior > 0.99);
  const Classification at_human = classify(model, 0.3);
  CHECK(at_human.label == Label::human);
  CHECK(at_human.posterior < 0.01);
}

TEST_CASE("classify resolves the equidistant tie to machine") {
  DetectorModel model = toy_model(0.0, 0.0, 0.01);
  model.gmm.means = {transformed_of(model, 0.4), transformed_of(model, 0.6)};
  const Classification tie = classify(model, 0.5);
  CHECK(tie.posterior == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(tie.label == Label::machine);  // the >= rule
}

TEST_CASE("classify posterior is monotone in the score") {
  DetectorModel model = toy_model(0.0, 0.0, 0.02);
  model.gmm.means = {transformed_of(model, 0.35), transformed_of(model, 0.75)};
  double previous = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double score = static_cast<double>(i) / 100.0;
    const double posterior = classify(model, score).posterior;
    CHECK(posterior >= previous);
    previous = posterior;
  }
}

TEST_CASE("posteriors of the two components sum to one") {
  DetectorModel model = toy_model(0.0, 0.0, 0.05);
  model.gmm.means = {transformed_of(model, 0.3), transformed_of(model, 0.8)};
  model.gmm.weights = {0.3, 0.7};
  for (int i = 0; i <= 20; ++i) {
    const double t = transformed_of(model, static_cast<double>(i) / 20.0);
    const double machine = machine_posterior(model.gmm, 1, t);
    const double human = machine_posterior(model.gmm, 0, t);
    CHECK(std::fabs(machine + human - 1.0) < 1e-12);
  }
}

TEST_CASE("classify rejects scores below the shifted domain") {
  const DetectorModel model = toy_model(0.0, 1.0, 0.1);
  CHECK_THROWS_AS(classify(model, -2.0), NonPositiveInputError);
}
