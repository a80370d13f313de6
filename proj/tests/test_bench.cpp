#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "monosort/bench.hpp"

using monosort::PlanFamily;
using monosort::RunRecord;
using monosort::SigmoidKind;
using monosort::SyntheticTask;
using monosort::TrainConfig;

namespace {

TrainConfig small_config(SigmoidKind kind, double beta, int set_size) {
  TrainConfig cfg;
  cfg.sigmoid.kind = kind;
  cfg.beta = beta;
  cfg.set_size = set_size;
  cfg.steps = 40;
  cfg.batch_size = 16;
  cfg.eval_every = 20;
  cfg.seed = 5;
  return cfg;
}

std::string jsonl_of(const SyntheticTask& task, const TrainConfig& cfg) {
  const RunRecord rec = monosort::train(task, cfg);
  std::ostringstream out;
  monosort::write_run_jsonl(out, rec);
  return out.str();
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("task generation is deterministic and gap-guarded") {
  const SyntheticTask a = monosort::make_task(42, 16, 5, 64, 16);
  const SyntheticTask b = monosort::make_task(42, 16, 5, 64, 16);
  CHECK_EQ(a.latent_w, b.latent_w);
  CHECK_EQ(a.latent_bias, b.latent_bias);
  REQUIRE_EQ(a.train.size(), 64);
  REQUIRE_EQ(a.val.size(), 16);
  CHECK_EQ(a.train[0].inputs, b.train[0].inputs);
  CHECK_EQ(a.train[0].truth, b.train[0].truth);

  const SyntheticTask c = monosort::make_task(43, 16, 5, 8, 4);
  CHECK(a.latent_w != c.latent_w);

  for (const auto* side : {&a.train, &a.val}) {
    for (const SyntheticTask::Instance& inst : *side) {
      std::vector<double> sorted = inst.truth;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t k = 1; k < sorted.size(); ++k)
        CHECK(sorted[k] - sorted[k - 1] >= 1e-6);
    }
  }
}

TEST_CASE("plan family names") {
  CHECK_EQ(monosort::parse_plan_family("odd-even"), PlanFamily::OddEven);
  CHECK_EQ(monosort::parse_plan_family("odd_even"), PlanFamily::OddEven);
  CHECK_EQ(monosort::parse_plan_family("bitonic"), PlanFamily::Bitonic);
  CHECK_FALSE(monosort::parse_plan_family("oddeven").has_value());
  CHECK_EQ(std::string(monosort::to_string(PlanFamily::OddEven)), "odd_even");
  CHECK_EQ(std::string(monosort::to_string(PlanFamily::Bitonic)), "bitonic");
}

TEST_CASE("tuned inverse-temperature defaults") {
  CHECK_EQ(monosort::default_beta(SigmoidKind::Optimal, PlanFamily::OddEven, 5),
           20.0);
  CHECK_EQ(
      monosort::default_beta(SigmoidKind::Logistic, PlanFamily::OddEven, 32),
      128.0);
  CHECK_EQ(monosort::default_beta(SigmoidKind::Cauchy, PlanFamily::Bitonic, 16),
           12.0 * std::numbers::pi);
  CHECK_EQ(
      monosort::default_beta(SigmoidKind::Reciprocal, PlanFamily::OddEven, 15),
      120.0);
  CHECK_FALSE(
      monosort::default_beta(SigmoidKind::Optimal, PlanFamily::OddEven, 6)
          .has_value());
  CHECK_FALSE(
      monosort::default_beta(SigmoidKind::Optimal, PlanFamily::Bitonic, 8)
          .has_value());
}

TEST_CASE("training runs are bit-reproducible") {
  const SyntheticTask task = monosort::make_task(7, 8, 4, 64, 32);
  TrainConfig cfg = small_config(SigmoidKind::Optimal, 20.0, 4);
  const std::string first = jsonl_of(task, cfg);
  const std::string second = jsonl_of(task, cfg);
  CHECK_EQ(first, second);

  // A different training seed changes the run.
  cfg.seed = 6;
  CHECK(jsonl_of(task, cfg) != first);
}

TEST_CASE("zero steps evaluates the untrained predictor at chance level") {
  const SyntheticTask task = monosort::make_task(11, 16, 5, 8, 512);
  TrainConfig cfg = small_config(SigmoidKind::Optimal, 20.0, 5);
  cfg.steps = 0;
  const RunRecord rec = monosort::train(task, cfg);
  REQUIRE_EQ(rec.evals.size(), 1);
  CHECK_EQ(rec.evals[0].step, 0);
  CHECK_EQ(rec.final.step, 0);
  // Element-rank accuracy of an untrained net: about 1/n.
  CHECK(rec.final.element_rate >= 0.05);
  CHECK(rec.final.element_rate <= 0.40);
  CHECK_FALSE(rec.diverged);
}

TEST_CASE("loss decreases on a fixed batch for monotone kinds") {
  // Pool size equals batch size, so every step sees the same batch.
  const SyntheticTask task = monosort::make_task(13, 16, 5, 32, 16);
  for (const SigmoidKind kind :
       {SigmoidKind::Optimal, SigmoidKind::Reciprocal, SigmoidKind::Cauchy}) {
    TrainConfig cfg = small_config(kind, 0.0, 5);
    cfg.beta = *monosort::default_beta(kind, PlanFamily::OddEven, 5);
    cfg.steps = 100;
    cfg.batch_size = 32;
    const RunRecord rec = monosort::train(task, cfg);
    REQUIRE_EQ(rec.train_loss.size(), 100);
    CHECK_MESSAGE(rec.train_loss.back() < rec.train_loss.front(),
                  monosort::to_string(kind));
  }
}

TEST_CASE("gradient reaches the first layer for every kind at step one") {
  const SyntheticTask task = monosort::make_task(17, 16, 5, 32, 8);
  for (const SigmoidKind kind :
       {SigmoidKind::Logistic, SigmoidKind::LogisticArt, SigmoidKind::Reciprocal,
        SigmoidKind::Cauchy, SigmoidKind::Optimal}) {
    TrainConfig cfg = small_config(kind, 0.0, 5);
    cfg.beta = monosort::default_beta(kind, PlanFamily::OddEven, 5).value_or(1.0);
    cfg.steps = 1;
    const RunRecord rec = monosort::train(task, cfg);
    CHECK_MESSAGE(rec.input_grad_norm0 > 0.0, monosort::to_string(kind));
  }
}

TEST_CASE("evaluation cadence includes start, interval and final step") {
  const SyntheticTask task = monosort::make_task(19, 8, 4, 32, 8);
  TrainConfig cfg = small_config(SigmoidKind::Optimal, 20.0, 4);
  cfg.steps = 50;
  cfg.eval_every = 20;
  const RunRecord rec = monosort::train(task, cfg);
  std::vector<int> steps;
  for (const monosort::EvalPoint& pt : rec.evals) steps.push_back(pt.step);
  CHECK_EQ(steps, std::vector<int>{0, 20, 40, 50});
  CHECK_EQ(rec.final.step, 50);

  cfg.steps = 40;
  const RunRecord exact = monosort::train(task, cfg);
  steps.clear();
  for (const monosort::EvalPoint& pt : exact.evals) steps.push_back(pt.step);
  CHECK_EQ(steps, std::vector<int>{0, 20, 40});
}

TEST_CASE("single-element sweep equals a direct run") {
  const SyntheticTask task = monosort::make_task(23, 8, 4, 64, 16);
  TrainConfig cfg = small_config(SigmoidKind::Cauchy, 30.0, 4);
  const std::vector<double> betas{30.0};
  const std::vector<RunRecord> swept =
      monosort::sweep_beta(task, cfg, betas, 1);
  REQUIRE_EQ(swept.size(), 1);
  const RunRecord direct = monosort::train(task, cfg);
  CHECK_EQ(swept[0].final.loss, direct.final.loss);
  CHECK_EQ(swept[0].final.element_rate, direct.final.element_rate);
}

TEST_CASE("sweep is thread-count invariant") {
  const SyntheticTask task = monosort::make_task(29, 8, 4, 32, 8);
  TrainConfig cfg = small_config(SigmoidKind::Optimal, 1.0, 4);
  cfg.steps = 30;
  const std::vector<double> betas{1.0, 8.0, 64.0};
  const std::vector<RunRecord> serial =
      monosort::sweep_beta(task, cfg, betas, 1);
  const std::vector<RunRecord> parallel =
      monosort::sweep_beta(task, cfg, betas, 3);
  REQUIRE_EQ(serial.size(), 3);
  REQUIRE_EQ(parallel.size(), 3);
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK_EQ(serial[k].config.beta, betas[k]);
    CHECK_EQ(serial[k].final.loss, parallel[k].final.loss);
    CHECK_EQ(serial[k].final.element_rate, parallel[k].final.element_rate);
  }
}

TEST_CASE("sweep summary table") {
  const SyntheticTask task = monosort::make_task(31, 8, 4, 32, 8);
  TrainConfig cfg = small_config(SigmoidKind::Reciprocal, 1.0, 4);
  cfg.steps = 10;
  const std::vector<double> betas{2.0, 16.0};
  const std::vector<RunRecord> records =
      monosort::sweep_beta(task, cfg, betas, 2);
  std::ostringstream out;
  monosort::write_sweep_csv(out, records);
  std::stringstream ss(out.str());
  std::string line;
  std::getline(ss, line);
  CHECK_EQ(line, "beta,kind,plan,n,exact_rate,element_rate");
  std::getline(ss, line);
  CHECK(line.rfind("2,reciprocal,odd_even,4,", 0) == 0);
  std::getline(ss, line);
  CHECK(line.rfind("16,reciprocal,odd_even,4,", 0) == 0);
  CHECK_FALSE(std::getline(ss, line));
}

TEST_CASE("run record serialization") {
  const SyntheticTask task = monosort::make_task(37, 8, 4, 32, 8);
  TrainConfig cfg = small_config(SigmoidKind::LogisticArt, 2.0, 4);
  cfg.steps = 20;
  cfg.eval_every = 10;
  const RunRecord rec = monosort::train(task, cfg);
  std::ostringstream out;
  monosort::write_run_jsonl(out, rec);
  std::stringstream ss(out.str());
  std::string line;

  REQUIRE(std::getline(ss, line));
  nlohmann::json header = nlohmann::json::parse(line);
  CHECK_EQ(header["config"]["sigmoid"], "logistic_art");
  CHECK_EQ(header["config"]["beta"], 2.0);
  CHECK_EQ(header["config"]["plan"], "odd_even");
  CHECK_EQ(header["config"]["n"], 4);
  CHECK_EQ(header["config"]["steps"], 20);
  CHECK_EQ(header["diverged"], false);
  CHECK(header["input_grad_norm0"].get<double>() > 0.0);

  int eval_lines = 0;
  nlohmann::json last;
  while (std::getline(ss, line)) {
    last = nlohmann::json::parse(line);
    if (last.contains("final")) break;
    CHECK(last.contains("step"));
    CHECK(last.contains("loss"));
    CHECK(last.contains("exact_rate"));
    CHECK(last.contains("element_rate"));
    ++eval_lines;
  }
  CHECK_EQ(eval_lines, 3);  // steps 0, 10, 20
  REQUIRE(last.contains("final"));
  CHECK_EQ(last["final"]["step"], 20);

  // A manually flagged diverged record serializes its flag.
  RunRecord flagged = rec;
  flagged.diverged = true;
  std::ostringstream out2;
  monosort::write_run_jsonl(out2, flagged);
  std::string first_line;
  std::stringstream ss2(out2.str());
  std::getline(ss2, first_line);
  CHECK(nlohmann::json::parse(first_line)["diverged"].get<bool>());
}

TEST_CASE("configuration validation") {
  const SyntheticTask task = monosort::make_task(41, 8, 4, 16, 8);
  TrainConfig cfg = small_config(SigmoidKind::Optimal, 1.0, 4);
  cfg.beta = 0.0;
  CHECK_THROWS_AS(monosort::train(task, cfg), std::invalid_argument);
  cfg = small_config(SigmoidKind::Optimal, 1.0, 5);  // mismatched set size
  CHECK_THROWS_AS(monosort::train(task, cfg), std::invalid_argument);
  cfg = small_config(SigmoidKind::Optimal, 1.0, 4);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(monosort::train(task, cfg), std::invalid_argument);
  const std::vector<double> none;
  CHECK_THROWS_AS(monosort::sweep_beta(task, small_config(SigmoidKind::Optimal, 1.0, 4),
                                       none, 1),
                  std::invalid_argument);
}

}  // TEST_SUITE
