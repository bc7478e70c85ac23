#include "xcca/significance.hpp"

#include "xcca/parallel.hpp"
#include "xcca/random.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace xcca {
namespace {

using Complex = std::complex<double>;

std::vector<double> draw_phases(Rng& rng, Index count) {
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phases(static_cast<std::size_t>(count));
  for (auto& p : phases) p = uniform(rng);
  return phases;
}

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Matrix phase_scramble(const Matrix& m, std::uint64_t seed, const PhaseScrambleOptions& options) {
  const Index t = m.rows();
  if (t < 3) throw ValidationError("phase_scramble: need at least 3 rows, got " + std::to_string(t));
  const Index n_phases = (t - 1) / 2;
  Rng rng(seed);
  std::vector<double> phases = draw_phases(rng, n_phases);

  Eigen::FFT<double> fft;
  std::vector<Complex> signal(static_cast<std::size_t>(t));
  std::vector<Complex> spectrum;
  std::vector<Complex> back;
  Matrix out(t, m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    if (options.independent_phases && j > 0) phases = draw_phases(rng, n_phases);
    for (Index i = 0; i < t; ++i) signal[static_cast<std::size_t>(i)] = Complex(m(i, j), 0.0);
    fft.fwd(spectrum, signal);
    for (Index f = 1; f <= n_phases; ++f) {
      const Complex rot = std::polar(1.0, phases[static_cast<std::size_t>(f - 1)]);
      const auto pos = static_cast<std::size_t>(f);
      const auto neg = static_cast<std::size_t>(t - f);
      spectrum[pos] *= rot;
      spectrum[neg] = std::conj(spectrum[pos]);
    }
    fft.inv(back, spectrum);
    for (Index i = 0; i < t; ++i) out(i, j) = back[static_cast<std::size_t>(i)].real();
  }
  return out;
}

std::uint64_t surrogate_seed(std::uint64_t master_seed, std::size_t i) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(i));
}

double permutation_p_value(double observed, const Eigen::Ref<const Vector>& null) {
  std::size_t exceed = 0;
  for (Index i = 0; i < null.size(); ++i) {
    if (null(i) >= observed) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(1 + null.size());
}

PermutationReport permutation_test(const CcaModel& model, const Matrix& x_test, const Matrix& y_test, std::size_t n,
                                   std::uint64_t master_seed, const PermutationOptions& options) {
  if (n < 1) throw ValidationError("permutation_test: need at least one permutation");
  PermutationReport report;
  report.observed = evaluate_correlations(model, x_test, y_test);
  report.n_permutations = n;
  report.master_seed = master_seed;
  const Index k = model.num_components();
  report.null_samples.resize(static_cast<Index>(n), k);

  // The brain projection is shared by every surrogate.
  const Matrix v = project(model, y_test, View::kBrain);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const Matrix surrogate = phase_scramble(x_test, surrogate_seed(master_seed, i + 1), options.scramble);
    report.null_samples.row(static_cast<Index>(i)) =
        column_correlations(project(model, surrogate, View::kFeatures), v).transpose();
  });

  report.p_values.resize(k);
  for (Index c = 0; c < k; ++c) report.p_values(c) = permutation_p_value(report.observed(c), report.null_samples.col(c));
  return report;
}

double quantile(Vector values, double q) {
  if (values.size() == 0) throw ValidationError("quantile: empty input");
  std::sort(values.data(), values.data() + values.size());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<Index>(std::floor(pos));
  const Index hi = std::min<Index>(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values(lo) + frac * (values(hi) - values(lo));
}

nlohmann::json to_json(const PermutationReport& report) {
  const Index k = report.observed.size();
  std::vector<double> p05, p50, p95;
  for (Index c = 0; c < k; ++c) {
    const Vector col = report.null_samples.col(c);
    p05.push_back(quantile(col, 0.05));
    p50.push_back(quantile(col, 0.50));
    p95.push_back(quantile(col, 0.95));
  }
  return {
      {"observed", as_std(report.observed)},
      {"p_values", as_std(report.p_values)},
      {"n", report.n_permutations},
      {"master_seed", report.master_seed},
      {"null_quantiles", {{"p05", p05}, {"p50", p50}, {"p95", p95}}},
  };
}

}  // namespace xcca
