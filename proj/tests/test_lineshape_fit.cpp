#include <cmath>
#include <random>

#include "doctest.h"
#include "mdcs/errors.hpp"
#include "mdcs/least_squares.hpp"
#include "mdcs/lineshape_fit.hpp"
#include "oracle.hpp"

using namespace mdcs;

namespace {

Trace1D sampled(double lo, double hi, double step, const std::function<double(double)>& f) {
  Trace1D t;
  for (double x = lo; x <= hi + 1e-12; x += step) {
    t.nu_thz.push_back(x);
    t.amplitude.push_back(f(x));
    t.valid.push_back(1);
  }
  return t;
}

}  // namespace

TEST_CASE("linear least squares matches the normal equations") {
  std::mt19937_64 g(4);
  std::normal_distribution<double> n(0.0, 0.1);
  const int m = 40;
  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double x = 0.1 * i;
    X(i, 0) = 1.0;
    X(i, 1) = x;
    X(i, 2) = x * x;
    y[i] = 1.0 - 2.0 * x + 0.5 * x * x + n(g);
  }
  ResidualFunction f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    r = X * p - y;
    if (J) *J = X;
  };
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -1e9);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 1e9);
  const auto res = levenberg_marquardt(f, Eigen::VectorXd::Zero(3), lo, hi, m);
  CHECK(res.converged);

  const Eigen::MatrixXd XtX = X.transpose() * X;
  const Eigen::VectorXd beta = XtX.ldlt().solve(X.transpose() * y);
  const double rss = (X * beta - y).squaredNorm();
  const Eigen::MatrixXd cov = rss / (m - 3) * XtX.inverse();
  CHECK((res.params - beta).norm() < 1e-8 * beta.norm());
  CHECK((res.covariance - cov).norm() < 1e-6 * cov.norm());
  CHECK(res.residual_norm == doctest::Approx(std::sqrt(rss)).epsilon(1e-9));
  for (std::size_t k = 1; k < res.cost_history.size(); ++k)
    CHECK(res.cost_history[k] <= res.cost_history[k - 1]);
}

TEST_CASE("bounds are respected") {
  ResidualFunction f = [](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    r.resize(2);
    r << p[0] - 3.0, p[1] + 2.0;
    if (J) *J = Eigen::MatrixXd::Identity(2, 2);
  };
  Eigen::VectorXd lo(2), hi(2);
  lo << -10.0, 0.0;
  hi << 1.0, 10.0;
  const auto res = levenberg_marquardt(f, Eigen::VectorXd::Constant(2, 0.5), lo, hi, 2);
  CHECK(res.params[0] == doctest::Approx(1.0));
  CHECK(res.params[1] == doctest::Approx(0.0));
}

TEST_CASE("analytic Jacobians match finite differences") {
  for (const auto& c : oracle::jacobian_cases()) {
    INFO(to_string(c.spec.model) << " floor " << c.spec.floor << " background " << c.spec.background);
    CHECK(oracle::jacobian_error(c.spec, c.x, c.p) < 1e-6);
  }
}

TEST_CASE("exponential fits recover the inputs") {
  DecayTrace d;
  for (int i = 0; i < 300; ++i) {
    const double x = 5.0 * i;
    d.delay_ps.push_back(x);
    d.amplitude.push_back(0.7 * std::exp(-x / 120.0) + 0.3 * std::exp(-x / 990.0));
  }
  const auto bi = fit_exponential(d, 2);
  CHECK(bi.converged);
  CHECK(bi.value("T2a") == doctest::Approx(120.0).epsilon(1e-6));
  CHECK(bi.value("T2b") == doctest::Approx(990.0).epsilon(1e-6));
  CHECK(bi.value("A") == doctest::Approx(0.7).epsilon(1e-6));

  DecayTrace m;
  std::mt19937_64 g(8);
  std::normal_distribution<double> n(0.0, 0.01);
  for (int i = 0; i < 200; ++i) {
    const double x = 4.0 * i;
    const double s = std::exp(-x / 122.0);
    m.delay_ps.push_back(x);
    m.amplitude.push_back(std::abs(std::complex<double>(s + n(g), n(g))));
  }
  const auto mono = fit_exponential(m, 1, 0.01 * std::sqrt(2.0));
  CHECK(std::abs(mono.value("T2a") - 122.0) < 3.0 * mono.sigma("T2a") + 1.0);
  CHECK(mono.sigma("T2a") > 0.0);
}

TEST_CASE("bi-exponential with one rate collapses") {
  DecayTrace d;
  for (int i = 0; i < 100; ++i) {
    d.delay_ps.push_back(3.0 * i);
    d.amplitude.push_back(std::exp(-3.0 * i / 80.0));
  }
  const auto fit = fit_exponential(d, 2);
  CHECK(fit.has_flag("DegenerateFit"));
  CHECK(fit.value("T2a") == doctest::Approx(80.0).epsilon(1e-6));
  CHECK_THROWS_AS(fit.at("T2b"), FitInputError);
}

TEST_CASE("fit input errors") {
  DecayTrace d{{0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}};
  CHECK_THROWS_AS(fit_exponential(d, 1), FitInputError);
  CHECK_THROWS_AS(fit_exponential(d, 3), FitInputError);
  CHECK_THROWS_AS(fit_exponential(d, 1, -1.0), FitInputError);
  CHECK_THROWS_AS(lorentzian_width_from_t2(0.0), FitInputError);
}

TEST_CASE("linewidth from T2") {
  CHECK(lorentzian_width_from_t2(120.0) == doctest::Approx(1.3263).epsilon(1e-4));
  CHECK(lorentzian_width_from_t2(990.0) * 1e3 == doctest::Approx(160.76).epsilon(1e-4));
}

TEST_CASE("width estimators on analytic lines") {
  const double sigma = 0.012;
  const auto gauss = sampled(406.6, 406.8, 0.0005, [&](double x) {
    return 2.0 * std::exp(-0.5 * std::pow((x - 406.7) / sigma, 2));
  });
  const double truth = kGaussianFwhmPerSigma * sigma;
  const auto wi = fwhm(gauss);
  CHECK(std::abs(wi.fwhm_thz - truth) < 0.0005);
  CHECK(wi.uncertainty_thz == doctest::Approx(0.0005 / std::sqrt(6.0)).epsilon(1e-6));
  const auto wg = fwhm(gauss, WidthMethod::Gaussian);
  CHECK(wg.fwhm_thz == doctest::Approx(truth).epsilon(1e-8));
  CHECK(wg.center_thz == doctest::Approx(406.7).epsilon(1e-12));

  const auto lor = sampled(406.0, 407.4, 0.001, [](double x) {
    const double u = x - 406.7;
    return 0.02 * 0.02 / (u * u + 0.02 * 0.02);
  });
  CHECK(fwhm(lor, WidthMethod::Lorentzian).fwhm_thz == doctest::Approx(0.04).epsilon(1e-8));

  AxisWindow w{406.65, 406.75};
  const auto two = sampled(406.5, 407.0, 0.0005, [&](double x) {
    return std::exp(-0.5 * std::pow((x - 406.7) / sigma, 2)) +
           3.0 * std::exp(-0.5 * std::pow((x - 406.9) / sigma, 2));
  });
  CHECK(fwhm(two, WidthMethod::Interpolated, w).center_thz == doctest::Approx(406.7).epsilon(1e-5));
}

TEST_CASE("missing half crossing") {
  const auto edge = sampled(406.7, 406.8, 0.001, [](double x) { return std::exp(-50.0 * (x - 406.7)); });
  CHECK_THROWS_AS(fwhm(edge), NoHalfCrossing);
  auto t = sampled(406.6, 406.8, 0.001, [](double x) {
    return std::exp(-0.5 * std::pow((x - 406.7) / 0.02, 2));
  });
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t.nu_thz[k] < 406.69) t.valid[k] = 0;
  CHECK_THROWS_AS(fwhm(t), NoHalfCrossing);
}

TEST_CASE("finite-bandwidth fit of a laser-filtered Gaussian") {
  const auto laser = LaserSpectrum::gaussian(406.77, 4.14);
  const double s = 1.84 / kGaussianFwhmPerSigma;
  const auto t = sampled(400.0, 413.0, 0.02, [&](double x) {
    return 5.0 * std::exp(-0.5 * std::pow((x - 406.9) / s, 2)) * std::pow(laser.intensity(x), 2);
  });
  const auto fit = fit_finite_bandwidth(t, laser);
  CHECK(fit.value("fwhm") == doctest::Approx(1.84).epsilon(1e-7));
  CHECK(fit.value("center") == doctest::Approx(406.9).epsilon(1e-9));
  CHECK_FALSE(fit.has_flag("IllConditioned"));
}

TEST_CASE("fit result serialization") {
  FitResult f;
  f.model = "exp1";
  f.params = {{"A", "arb", 1.0, 0.1}, {"T2a", "ps", 122.0, 2.0}};
  const auto rows = to_csv_rows(f);
  CHECK(rows.find("T2a") != std::string::npos);
  CHECK(to_key_value(f).find("T2a") != std::string::npos);
  CHECK(f.value("T2a") == 122.0);
  CHECK(f.sigma("T2a") == 2.0);
}
