#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gmf/errors.hpp"
#include "gmf/filters/ekf_update.hpp"
#include "gmf/filters/filter.hpp"
#include "gmf/filters/gmf.hpp"
#include "gmf/models/linear_gaussian.hpp"
#include "gmf/models/range_only.hpp"
#include "gmf/models/tricyclist.hpp"
#include "oracles.hpp"

using namespace gmf;

namespace {

GmfConfig config_for(std::size_t n, Vector mean, Matrix cov) {
  GmfConfig c;
  c.num_samples = n;
  c.initial_mean = std::move(mean);
  c.initial_cov = std::move(cov);
  return c;
}

GaussianMixtured scalar_mixture(std::initializer_list<std::pair<double, double>> mean_var) {
  GaussianMixtured mix;
  for (const auto& [m, v] : mean_var) {
    mix.push_back({Vector::Constant(1, m), Matrix::Constant(1, 1, v), 1.0 / static_cast<double>(mean_var.size())});
  }
  return mix;
}

Measurement scalar_measurement(double z) { return {Vector::Constant(1, z), {}}; }

void expect_simplex(const GaussianMixtured& mix) {
  double total = 0.0;
  for (const auto& c : mix) {
    EXPECT_GE(c.weight, 0.0);
    total += c.weight;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

}  // namespace

TEST(GmfInit, SingleSampleZeroPriorSitsOnMeanWithUnitCov) {
  RngStream rng(1);
  const Vector mu = (Vector(2) << 3.0, -1.0).finished();
  const auto mix = gmf_init(config_for(1, mu, Matrix::Zero(2, 2)), rng);
  ASSERT_EQ(mix.size(), 1u);
  EXPECT_EQ(mix[0].mean, mu);
  EXPECT_TRUE(mix[0].cov.isApprox(Matrix::Identity(2, 2)));
  EXPECT_DOUBLE_EQ(mix[0].weight, 1.0);
}

TEST(GmfInit, CovarianceIsBandwidthSquaredIdentity) {
  RngStream rng(2);
  const auto mix = gmf_init(config_for(7000, Vector::Zero(3), Matrix::Identity(3, 3)), rng);
  ASSERT_EQ(mix.size(), 7000u);
  for (const auto& c : mix) {
    EXPECT_NEAR(c.cov(0, 0), 0.028970820, 1e-9);
    EXPECT_EQ(c.cov(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(c.weight, 1.0 / 7000);
  }
}

TEST(GmfInit, FixedSeedIsReproducible) {
  RngStream a(5);
  RngStream b(5);
  const auto cfg = config_for(50, Vector::Zero(2), Matrix::Identity(2, 2));
  const auto x = gmf_init(cfg, a);
  const auto y = gmf_init(cfg, b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].mean, y[i].mean);
  }
}

TEST(GmfConfig, ValidationRejectsBadSettings) {
  auto cfg = config_for(1, Vector::Zero(2), Matrix::Identity(2, 2));
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.num_samples = 10;
  cfg.bandwidth_exponent = 0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.bandwidth_exponent = -0.2;
  cfg.initial_cov = Matrix::Identity(3, 3);
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(GmfPropagate, IdentityWithoutNoiseIsUnchanged) {
  const auto model = LinearGaussianModel(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Zero(2, 2),
                                         Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  RngStream rng(3);
  const auto mix = gmf_init(config_for(20, Vector::Zero(2), Matrix::Identity(2, 2)), rng);
  const auto out = gmf_propagate(mix, model, 0.0, 1.0, rng);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    EXPECT_EQ(out[i].mean, mix[i].mean);
    EXPECT_EQ(out[i].cov, mix[i].cov);
    EXPECT_EQ(out[i].weight, mix[i].weight);
  }
}

TEST(GmfPropagate, LinearMapTransformsCovariance) {
  const Matrix a = (Matrix(2, 2) << 1.0, 0.5, -0.2, 2.0).finished();
  const auto model =
      LinearGaussianModel(a, Matrix::Identity(2, 2), Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  GaussianMixtured mix;
  const Matrix p = (Matrix(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
  mix.push_back({(Vector(2) << 1.0, 2.0).finished(), p, 1.0});
  RngStream rng(4);
  const auto out = gmf_propagate(mix, model, 0.0, 1.0, rng);
  // A P A^T by hand: [[2.55, 1.17], [1.17, 3.84]].
  EXPECT_TRUE(out[0].cov.isApprox((Matrix(2, 2) << 2.55, 1.17, 1.17, 3.84).finished(), 1e-14));
  EXPECT_TRUE(out[0].mean.isApprox((Vector(2) << 2.0, 3.8).finished(), 1e-14));
}

TEST(GmfPropagate, AdditiveNoiseGrowsCovariance) {
  const double q = 0.7;
  const auto model = LinearGaussianModel(Matrix::Identity(2, 2), Matrix::Identity(2, 2), q * Matrix::Identity(2, 2),
                                         Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  RngStream rng(5);
  const auto mix = gmf_init(config_for(10, Vector::Zero(2), Matrix::Identity(2, 2)), rng);
  const auto out = gmf_propagate(mix, model, 0.0, 1.0, rng);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    EXPECT_TRUE(out[i].cov.isApprox(mix[i].cov + q * Matrix::Identity(2, 2), 1e-14));
  }
}

TEST(GmfPropagate, ResultDoesNotDependOnJobs) {
  const TricyclistModel model(TricyclistConfig::defaults());
  const auto cfg = TricyclistConfig::defaults();
  RngStream init(6);
  const auto mix = gmf_init(config_for(300, cfg.initial_mean, Matrix(cfg.initial_cov_diag.asDiagonal())), init);
  RngStream a(7);
  RngStream b(7);
  const auto x = gmf_propagate(mix, model, 0.0, 0.5, a, 1);
  const auto y = gmf_propagate(mix, model, 0.0, 0.5, b, 4);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].mean, y[i].mean);
    EXPECT_EQ(x[i].cov, y[i].cov);
  }
}

TEST(GmfPropagate, NonFiniteStateNamesComponent) {
  const TricyclistModel model(TricyclistConfig::defaults());
  GaussianMixtured mix;
  Vector x = TricyclistConfig::defaults().initial_mean;
  mix.push_back({x, Matrix::Identity(7, 7) * 0.01, 0.5});
  x[0] = std::numeric_limits<double>::quiet_NaN();
  mix.push_back({x, Matrix::Identity(7, 7) * 0.01, 0.5});
  RngStream rng(8);
  try {
    (void)gmf_propagate(mix, model, 0.0, 0.5, rng);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
}

TEST(GmfMiBound, TinyCovariancesAreUntouched) {
  GaussianMixtured mix;
  const double means[4][2] = {{0, 0}, {4, 0}, {0, 4}, {4, 4}};
  for (const auto& m : means) {
    mix.push_back({(Vector(2) << m[0], m[1]).finished(), 1e-6 * Matrix::Identity(2, 2), 0.25});
  }
  const auto out = gmf_mi_bound(mix, config_for(4, Vector::Zero(2), Matrix::Identity(2, 2)));
  for (std::size_t i = 0; i < mix.size(); ++i) {
    EXPECT_EQ(out[i].cov, mix[i].cov);
    EXPECT_EQ(out[i].mean, mix[i].mean);
  }
}

TEST(GmfMiBound, LargeCovarianceIsReplacedByScaledSampleCovariance) {
  GaussianMixtured mix;
  const double means[4][2] = {{0, 0}, {4, 0}, {0, 4}, {4, 4}};
  for (const auto& m : means) {
    mix.push_back({(Vector(2) << m[0], m[1]).finished(), 1e-6 * Matrix::Identity(2, 2), 0.25});
  }
  mix[2].cov = 1e6 * Matrix::Identity(2, 2);
  // Sample covariance of the four corners is (16/3) I; h^2 = 4^-0.4.
  const double bound = std::pow(4.0, -0.4) * 16.0 / 3.0;
  const auto out = gmf_mi_bound(mix, config_for(4, Vector::Zero(2), Matrix::Identity(2, 2)));
  EXPECT_TRUE(out[2].cov.isApprox(bound * Matrix::Identity(2, 2), 1e-14));
  EXPECT_EQ(out[0].cov, mix[0].cov);
}

TEST(GmfMiBound, IdenticalMeansFallBackToFloorWithDiagnostic) {
  GaussianMixtured mix;
  for (int i = 0; i < 3; ++i) {
    mix.push_back({Vector::Constant(2, 1.0), 50.0 * Matrix::Identity(2, 2), 1.0 / 3});
  }
  Diagnostics diag;
  const auto out = gmf_mi_bound(mix, config_for(3, Vector::Zero(2), Matrix::Identity(2, 2)), &diag);
  for (const auto& c : out) {
    EXPECT_TRUE(c.cov.isApprox(covariance_floor<double>(2)));
  }
  EXPECT_FALSE(diag.empty());
}

TEST(GmfMiBound, PostconditionHoldsOnRandomMixtures) {
  RngStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    GaussianMixtured mix;
    for (int i = 0; i < 30; ++i) {
      Matrix a = Matrix::NullaryExpr(3, 3, [&] { return rng.normal(); });
      mix.push_back({Vector::NullaryExpr(3, [&] { return 5.0 * rng.normal(); }), a * a.transpose(), 1.0 / 30});
    }
    Matrix bound;
    const auto out = gmf_mi_bound(mix, config_for(30, Vector::Zero(3), Matrix::Identity(3, 3)), nullptr, &bound);
    for (const auto& c : out) {
      EXPECT_FALSE(psd_exceeds(c.cov, bound));
    }
  }
}

TEST(GmfUpdate, HugeNoiseLeavesComponentsAlone) {
  const auto model = LinearGaussianModel::scalar(1.0, 0.0, 1e12);
  const auto mix = scalar_mixture({{0.0, 1.0}, {3.0, 2.0}});
  const auto out = gmf_update(mix, scalar_measurement(10.0), model, config_for(2, Vector::Zero(1), Matrix::Identity(1, 1)));
  for (std::size_t i = 0; i < mix.size(); ++i) {
    EXPECT_NEAR(out[i].mean[0], mix[i].mean[0], 1e-6);
    EXPECT_NEAR(out[i].cov(0, 0), mix[i].cov(0, 0), 1e-6);
    EXPECT_NEAR(out[i].weight, 0.5, 1e-6);
  }
}

TEST(GmfUpdate, ScalarHandArithmetic) {
  const auto model = LinearGaussianModel::scalar(1.0, 0.0, 1.0);
  const auto out = gmf_update(scalar_mixture({{0.0, 1.0}}), scalar_measurement(2.0), model,
                              config_for(2, Vector::Zero(1), Matrix::Identity(1, 1)));
  EXPECT_DOUBLE_EQ(out[0].mean[0], 1.0);
  EXPECT_DOUBLE_EQ(out[0].cov(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(out[0].weight, 1.0);
}

TEST(GmfUpdate, JosephFormAgreesWithStandardForm) {
  const auto model = LinearGaussianModel::scalar(1.0, 0.0, 1.0);
  auto cfg = config_for(2, Vector::Zero(1), Matrix::Identity(1, 1));
  cfg.joseph_form = true;
  const auto out = gmf_update(scalar_mixture({{0.0, 1.0}}), scalar_measurement(2.0), model, cfg);
  EXPECT_NEAR(out[0].cov(0, 0), 0.5, 1e-15);
}

TEST(GmfUpdate, IdenticalComponentsStayIdentical) {
  const auto model = LinearGaussianModel::scalar(1.0, 0.0, 1.0);
  const auto out = gmf_update(scalar_mixture({{0.3, 1.0}, {0.3, 1.0}}), scalar_measurement(2.0), model,
                              config_for(2, Vector::Zero(1), Matrix::Identity(1, 1)));
  EXPECT_EQ(out[0].mean, out[1].mean);
  EXPECT_EQ(out[0].cov, out[1].cov);
  EXPECT_DOUBLE_EQ(out[0].weight, 0.5);
  EXPECT_DOUBLE_EQ(out[1].weight, 0.5);
}

TEST(GmfUpdate, WeightsUseInnovationDensity) {
  const auto model = LinearGaussianModel::scalar(1.0, 0.0, 1.0);
  const auto out = gmf_update(scalar_mixture({{0.0, 1.0}, {2.0, 3.0}}), scalar_measurement(2.0), model,
                              config_for(2, Vector::Zero(1), Matrix::Identity(1, 1)));
  // N(2; 0, 2) against N(2; 2, 4).
  const double a = std::exp(-1.0) / std::sqrt(2 * M_PI * 2);
  const double b = 1.0 / std::sqrt(2 * M_PI * 4);
  EXPECT_NEAR(out[0].weight, a / (a + b), 1e-14);
  expect_simplex(out);
}

TEST(GmfUpdate, LogSpaceWeightsSurviveExtremeInnovations) {
  const auto model = LinearGaussianModel::scalar(1.0, 0.0, 1e-6);
  const auto out = gmf_update(scalar_mixture({{0.0, 1e-12}, {1.0, 1e-12}}), scalar_measurement(1e3), model,
                              config_for(2, Vector::Zero(1), Matrix::Identity(1, 1)));
  EXPECT_DOUBLE_EQ(out[1].weight, 1.0);
  expect_simplex(out);
}

TEST(ReweightMixture, TotalUnderflowResetsToUniform) {
  auto mix = scalar_mixture({{0.0, 1.0}, {1.0, 1.0}});
  mix[0].weight = 0.9;
  mix[1].weight = 0.1;
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> loglik{ninf, ninf};
  Diagnostics diag;
  reweight_mixture(mix, loglik, &diag, "test");
  EXPECT_DOUBLE_EQ(mix[0].weight, 0.5);
  EXPECT_FALSE(diag.empty());
}

TEST(GmfUpdate, CovarianceTraceNeverGrows) {
  const TricyclistModel model(TricyclistConfig::defaults());
  const auto cfg = TricyclistConfig::defaults();
  RngStream rng(10);
  auto gcfg = config_for(200, cfg.initial_mean, Matrix(cfg.initial_cov_diag.asDiagonal()));
  auto mix = gmf_init(gcfg, rng);
  for (auto& c : mix) {
    c.cov = Matrix(cfg.initial_cov_diag.asDiagonal()) * 0.1;
  }
  Measurement m{(Vector(2) << 0.3, -1.0).finished(), {}};
  const auto out = gmf_update(mix, m, model, gcfg);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    EXPECT_LE(out[i].cov.trace(), mix[i].cov.trace() * (1 + 1e-12));
  }
  expect_simplex(out);
}

TEST(GmfResample, OneHotZeroCovarianceCollapses) {
  GaussianMixtured mix;
  mix.push_back({Vector::Constant(2, 1.0), Matrix::Identity(2, 2), 0.0});
  mix.push_back({Vector::Constant(2, -4.0), Matrix::Zero(2, 2), 1.0});
  RngStream rng(11);
  const auto out = gmf_resample(mix, config_for(50, Vector::Zero(2), Matrix::Identity(2, 2)), rng);
  ASSERT_EQ(out.size(), 50u);
  for (const auto& c : out) {
    EXPECT_EQ(c.mean, Vector::Constant(2, -4.0));
    EXPECT_TRUE(c.cov.isApprox(covariance_floor<double>(2)));
    EXPECT_DOUBLE_EQ(c.weight, 1.0 / 50);
  }
}

TEST(GmfResample, ExactProportionalAllocation) {
  GaussianMixtured mix;
  mix.push_back({Vector::Constant(1, 0.0), Matrix::Zero(1, 1), 0.9});
  mix.push_back({Vector::Constant(1, 1.0), Matrix::Zero(1, 1), 0.1});
  RngStream rng(12);
  const auto out = gmf_resample(mix, config_for(1000, Vector::Zero(1), Matrix::Identity(1, 1)), rng);
  int zeros = 0;
  for (const auto& c : out) {
    zeros += c.mean[0] == 0.0 ? 1 : 0;
  }
  EXPECT_EQ(zeros, 900);
  // Every new covariance is h^2 times the sample covariance of the new means.
  const double h2 = std::pow(1000.0, -0.4);
  const double var = 900.0 * 100.0 / 1000.0 / 999.0;
  EXPECT_NEAR(out[0].cov(0, 0), h2 * var, 1e-14);
}

TEST(GmfResample, IdenticalComponentsGiveSeededGaussianDraws) {
  GaussianMixtured mix;
  for (int i = 0; i < 4; ++i) {
    mix.push_back({Vector::Zero(2), Matrix::Identity(2, 2), 0.25});
  }
  RngStream a(13);
  RngStream b(13);
  const auto cfg = config_for(4000, Vector::Zero(2), Matrix::Identity(2, 2));
  const auto x = gmf_resample(mix, cfg, a);
  const auto y = gmf_resample(mix, cfg, b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].mean, y[i].mean);
  }
  const auto m = gmf_estimate(x);
  EXPECT_NEAR(m.mean.norm(), 0.0, 0.1);
}

TEST(GmfEstimate, MomentExamples) {
  const auto one = gmf_estimate(scalar_mixture({{2.0, 3.0}}));
  EXPECT_DOUBLE_EQ(one.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(one.cov(0, 0), 3.0);
  const auto two = gmf_estimate(scalar_mixture({{-1.0, 0.0}, {1.0, 0.0}}));
  EXPECT_DOUBLE_EQ(two.mean[0], 0.0);
  EXPECT_DOUBLE_EQ(two.cov(0, 0), 1.0);
  auto skewed = scalar_mixture({{5.0, 2.0}, {-3.0, 7.0}});
  skewed[0].weight = 1.0;
  skewed[1].weight = 0.0;
  const auto first = gmf_estimate(skewed);
  EXPECT_DOUBLE_EQ(first.mean[0], 5.0);
  EXPECT_DOUBLE_EQ(first.cov(0, 0), 2.0);
}

TEST(GmfFilter, TracksKalmanFilterOnLinearGaussianSystem) {
  const double a = 1.0;
  const double q = 0.1;
  const double r = 0.5;
  const auto model = LinearGaussianModel::scalar(a, q, r);
  const std::size_t n = 2000;
  RngStream data(14);
  const auto trial = simulate_scalar(a, q, r, 0.0, 1.0, 50, data);
  FilterSettings settings;
  settings.num_samples = n;
  auto filter = make_filter(FilterKind::kGmf, settings, Vector::Zero(1), Matrix::Identity(1, 1), RngStream(15));
  ScalarKalman kf{0.0, 1.0};
  double sq = 0.0;
  double post_var = 0.0;
  for (std::size_t k = 0; k < trial.z.size(); ++k) {
    const double dt = k == 0 ? 0.0 : 1.0;
    if (k > 0) {
      kf.predict(a, q);
    }
    kf.update(trial.z[k], r);
    filter->step(model, static_cast<double>(k), dt, scalar_measurement(trial.z[k]));
    sq += std::pow(filter->estimate()[0] - kf.mean, 2);
    post_var = kf.var;
  }
  const double rms = std::sqrt(sq / static_cast<double>(trial.z.size()));
  EXPECT_LT(rms, 3.0 * std::sqrt(post_var) / std::sqrt(static_cast<double>(n)));
}

TEST(GmfFilter, RangeOnlyUpdateProducesRing) {
  const RangeOnlyModel model(0.25, 0.0);
  const Eigen::Vector2d robot(20.0, 15.0);
  FilterSettings settings;
  settings.num_samples = 3000;
  auto filter = make_filter(FilterKind::kGmf, settings, Vector(robot), 400.0 * Matrix::Identity(2, 2), RngStream(16));
  Measurement m{Vector::Constant(1, 10.0), {}};
  m.context.robot_position = robot;
  filter->step(model, 0.0, 0.0, m);
  const auto belief = filter->belief();
  double sq = 0.0;
  std::array<int, 12> sectors{};
  for (const auto& c : belief) {
    const Eigen::Vector2d rel = Eigen::Vector2d(c.mean[0], c.mean[1]) - robot;
    sq += std::pow(rel.norm() - 10.0, 2);
    const double angle = std::atan2(rel.y(), rel.x()) + M_PI;
    ++sectors[std::min<std::size_t>(11, static_cast<std::size_t>(angle / (2 * M_PI) * 12))];
  }
  EXPECT_LT(std::sqrt(sq / static_cast<double>(belief.size())) / 10.0, 0.2);
  EXPECT_GE(std::count_if(sectors.begin(), sectors.end(), [](int s) { return s > 0; }), 10);
}

TEST(GmfFilter, FixedSeedGivesBitIdenticalTrajectory) {
  const TricyclistModel model(TricyclistConfig::defaults());
  const auto cfg = TricyclistConfig::defaults();
  FilterSettings settings;
  settings.num_samples = 100;
  auto run = [&](int jobs) {
    settings.jobs = jobs;
    auto f = make_filter(FilterKind::kGmf, settings, cfg.initial_mean, Matrix(cfg.initial_cov_diag.asDiagonal()),
                         RngStream(17));
    std::vector<Vector> out;
    for (int k = 0; k < 10; ++k) {
      Measurement m{(Vector(2) << 0.1 * k, -0.2 * k).finished(), {}};
      f->step(model, 0.5 * k, 0.5, m);
      out.push_back(f->estimate());
    }
    return out;
  };
  EXPECT_EQ(run(1), run(1));
  EXPECT_EQ(run(1), run(3));
}

TEST(MixtureIo, CsvAndBinaryRoundTrip) {
  RngStream rng(18);
  GaussianMixtured mix;
  for (int i = 0; i < 5; ++i) {
    Matrix a = Matrix::NullaryExpr(3, 3, [&] { return rng.normal(); });
    mix.push_back({Vector::NullaryExpr(3, [&] { return rng.normal() * 1e3; }), a * a.transpose(), 0.2});
  }
  std::stringstream csv;
  write_mixture_csv(csv, mix);
  const auto from_csv = read_mixture_csv(csv);
  std::stringstream bin;
  write_mixture_binary(bin, mix);
  const auto from_bin = read_mixture_binary(bin);
  ASSERT_EQ(from_csv.size(), mix.size());
  ASSERT_EQ(from_bin.size(), mix.size());
  for (std::size_t i = 0; i < mix.size(); ++i) {
    EXPECT_EQ(from_csv[i].mean, mix[i].mean);
    EXPECT_EQ(from_csv[i].cov, mix[i].cov);
    EXPECT_EQ(from_csv[i].weight, mix[i].weight);
    EXPECT_EQ(from_bin[i].mean, mix[i].mean);
    EXPECT_EQ(from_bin[i].cov, mix[i].cov);
    EXPECT_EQ(from_bin[i].weight, mix[i].weight);
  }
}
