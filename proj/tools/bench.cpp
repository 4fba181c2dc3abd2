// Parallel kernels against their serial references.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "sia/config.hpp"
#include "sia/pipeline/analysis.hpp"
#include "sia/synth/scenario.hpp"

using namespace sia;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const std::string& kernel, std::size_t items, double serial, double parallel, bool same) {
  Json row{{"kernel", kernel},
           {"items", items},
           {"threads", omp_get_max_threads()},
           {"serial_s", serial},
           {"parallel_s", parallel},
           {"speedup", serial / parallel},
           {"identical", same}};
  std::cout << row.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark OpenMP kernels against serial references"};
  double minutes = 2.0;
  int per_class = 200;
  int reps = 3;
  app.add_option("--minutes", minutes, "Synthetic session length for frame analysis");
  app.add_option("--per-class", per_class, "Training samples per class for the gradient");
  app.add_option("--reps", reps, "Repetitions; the best time is reported");
  CLI11_PARSE(app, argc, argv);

  const auto model = default_classifier(AffectConfig{});
  const pipeline::FrameAnalyzer analyzer(vision::builtin_reference_model(), model);
  const auto gen = synth::generate(
      synth::random_scenario(3, static_cast<Micros>(minutes * 60.0 * kMicrosPerSecond), 0.002));

  std::vector<pipeline::FrameAnalysis> par, ser;
  const double t_ser = best_of(reps, [&] { ser = pipeline::analyze_batch_serial(gen.frames, analyzer); });
  const double t_par = best_of(reps, [&] { par = pipeline::analyze_batch(gen.frames, analyzer); });
  report("analyze_batch", gen.frames.size(), t_ser, t_par, par == ser);

  const auto data = synth::make_training_set(per_class, 0.005, 1);
  affect::Gradient g_par, g_ser;
  const double g_t_ser = best_of(reps, [&] { g_ser = affect::gradient_reference(model, data, 1e-4); });
  const double g_t_par = best_of(reps, [&] { g_par = affect::gradient(model, data, 1e-4); });
  double diff = 0.0;
  for (std::size_t i = 0; i < g_par.weights.size(); ++i) diff = std::max(diff, std::abs(g_par.weights[i] - g_ser.weights[i]));
  for (std::size_t k = 0; k < kLabelCount; ++k) diff = std::max(diff, std::abs(g_par.bias[k] - g_ser.bias[k]));
  report("gradient", data.size(), g_t_ser, g_t_par, diff < 1e-12);
  return 0;
}
