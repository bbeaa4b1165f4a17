#include <benchmark/benchmark.h>

#include "paneltrend/bandwidth.hpp"
#include "paneltrend/estimators.hpp"
#include "paneltrend/local_cov.hpp"
#include "paneltrend/spectral.hpp"
#include "paneltrend/synthetic.hpp"

using namespace paneltrend;

namespace {

Panel make_panel(int n, int t) {
  SyntheticSpec spec;
  spec.n_units = n;
  spec.n_periods = t;
  spec.a_true = 0.35;
  spec.g_profiles = {GProfile::linear(0.5, 0.8)};
  spec.noise_sd = 0.4;
  spec.noise_law = NoiseLaw::gaussian;
  spec.seed = 11;
  return generate(spec).first;
}

} // namespace

static void BM_Sigma(benchmark::State& state) {
  const Panel panel = make_panel(static_cast<int>(state.range(0)), 200);
  const KernelSpec spec{KernelFamily::epanechnikov, 0.25, BoundaryRule::right_adjusted};
  for (auto _ : state) {
    LocalCovariance cov = sigma(panel, spec, 0.7);
    benchmark::DoNotOptimize(cov.matrix.data());
  }
}
BENCHMARK(BM_Sigma)->Arg(10)->Arg(50)->Arg(150);

static void BM_TopEigenpair(benchmark::State& state) {
  const Panel panel = make_panel(static_cast<int>(state.range(0)), 200);
  const KernelSpec spec{KernelFamily::epanechnikov, 0.25, BoundaryRule::right_adjusted};
  const LocalCovariance cov = sigma(panel, spec, 0.7);
  for (auto _ : state) {
    EigenPair pair = top_eigenpair(cov.matrix);
    benchmark::DoNotOptimize(pair.lambda);
  }
}
BENCHMARK(BM_TopEigenpair)->Arg(10)->Arg(50)->Arg(150);

static void BM_LambdaCurve(benchmark::State& state) {
  const Panel panel = make_panel(20, static_cast<int>(state.range(0)));
  const KernelSpec spec{KernelFamily::epanechnikov, 0.25, BoundaryRule::right_adjusted};
  const EvaluationSet c_set = eval_set(panel, EvalRule::quarter_trim);
  for (auto _ : state) {
    LambdaCurve curve = lambda_curve(panel, spec, c_set);
    benchmark::DoNotOptimize(curve.entries.data());
  }
}
BENCHMARK(BM_LambdaCurve)->Arg(100)->Arg(200)->Arg(400);

static void BM_SelectBandwidth(benchmark::State& state) {
  const Panel panel = make_panel(15, 120);
  const EvaluationSet c_set = eval_set(panel, EvalRule::quarter_trim);
  for (auto _ : state) {
    CvResult cv = select_bandwidth(panel, default_grid(panel.n_periods(), 10), c_set);
    benchmark::DoNotOptimize(cv.h_hat);
  }
}
BENCHMARK(BM_SelectBandwidth);

BENCHMARK_MAIN();
