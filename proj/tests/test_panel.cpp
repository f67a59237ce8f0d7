#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmlm/errors.hpp"
#include "cmlm/panel.hpp"
#include "cmlm/rng.hpp"
#include "doctest.h"

using namespace cmlm;

namespace {

// A small unbalanced panel with a planted linear structure plus noise.
std::vector<PanelObservation> make_panel(int n_entities, int n_times, std::uint64_t seed,
                                         bool drop_some = true) {
  CounterRng rng(seed, 77);
  std::vector<PanelObservation> out;
  for (int i = 0; i < n_entities; ++i) {
    double entity_effect = rng.next_uniform(-2.0, 2.0);
    for (int t = 0; t < n_times; ++t) {
      if (drop_some && rng.next_double() < 0.1) continue;  // unbalanced
      PanelObservation obs;
      obs.entity_id = "E" + std::to_string(i);
      obs.time_id = "T" + std::to_string(10 + t);
      double x1 = rng.next_uniform(-1.0, 1.0);
      double x2 = rng.next_normal();
      obs.covariates["x1"] = x1;
      obs.covariates["x2"] = x2;
      obs.response = 1.5 * x1 - 0.7 * x2 + entity_effect + 0.3 * t + 0.5 * rng.next_normal();
      out.push_back(obs);
    }
  }
  return out;
}

// Straightforward dummy-variable least squares: one 0/1 column per group
// level, solved with a rank-revealing QR. Slope estimates and standard
// errors for the named regressors are read off directly.
struct DummyFit {
  std::map<std::string, double> coef;
  std::map<std::string, double> se;
  double rss = 0.0;
  long df = 0;
};

DummyFit dummy_ols(const std::vector<PanelObservation>& obs,
                   const std::vector<std::string>& regressors, Effects effects) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  std::map<std::string, int> entities, times;
  for (const auto& o : obs) {
    entities.emplace(o.entity_id, 0);
    times.emplace(o.time_id, 0);
  }
  int idx = 0;
  for (auto& [k, v] : entities) v = idx++;
  idx = 0;
  for (auto& [k, v] : times) v = idx++;

  const auto k_reg = static_cast<Eigen::Index>(regressors.size());
  const auto n_ent = static_cast<Eigen::Index>(entities.size());
  const auto n_time = static_cast<Eigen::Index>(times.size());

  Eigen::Index k_dummies = 0;
  switch (effects) {
    case Effects::none: k_dummies = 1; break;  // plain intercept
    case Effects::entity: k_dummies = n_ent; break;
    case Effects::time: k_dummies = n_time; break;
    case Effects::two_way: k_dummies = n_ent + n_time - 1; break;
  }

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k_reg + k_dummies);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& o = obs[static_cast<std::size_t>(r)];
    y(r) = o.response;
    for (Eigen::Index j = 0; j < k_reg; ++j) {
      X(r, j) = o.covariates.at(regressors[static_cast<std::size_t>(j)]);
    }
    switch (effects) {
      case Effects::none:
        X(r, k_reg) = 1.0;
        break;
      case Effects::entity:
        X(r, k_reg + entities.at(o.entity_id)) = 1.0;
        break;
      case Effects::time:
        X(r, k_reg + times.at(o.time_id)) = 1.0;
        break;
      case Effects::two_way:
        X(r, k_reg + entities.at(o.entity_id)) = 1.0;
        if (times.at(o.time_id) > 0) {
          X(r, k_reg + n_ent + times.at(o.time_id) - 1) = 1.0;
        }
        break;
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  Eigen::VectorXd b = qr.solve(y);
  Eigen::VectorXd resid = y - X * b;
  DummyFit fit;
  fit.rss = resid.squaredNorm();
  fit.df = static_cast<long>(n - X.cols());
  double s2 = fit.rss / static_cast<double>(fit.df);
  Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  for (Eigen::Index j = 0; j < k_reg; ++j) {
    fit.coef[regressors[static_cast<std::size_t>(j)]] = b(j);
    fit.se[regressors[static_cast<std::size_t>(j)]] = std::sqrt(s2 * xtx_inv(j, j));
  }
  return fit;
}

}  // namespace

TEST_CASE("expand_design shapes columns and interactions") {
  std::vector<PanelObservation> obs(2);
  obs[0] = {"E1", "T1", 1.0, {{"a", 2.0}, {"b", 3.0}}};
  obs[1] = {"E2", "T1", 2.0, {{"a", 4.0}, {"b", 5.0}}};

  RegressionSpec spec;
  spec.effects = Effects::none;
  spec.regressors = {"a", "b"};
  spec.interactions = {{"a", "b"}};
  auto design = expand_design(obs, spec);
  REQUIRE(design.names.size() == 4);  // intercept + a + b + a x b
  CHECK(design.names[0] == "(Intercept)");
  CHECK(design.names[3] == "a x b");
  CHECK(design.X(0, 3) == 6.0);
  CHECK(design.X(1, 3) == 20.0);
  CHECK(design.y(1) == 2.0);

  RegressionSpec fe = spec;
  fe.effects = Effects::entity;
  auto fe_design = expand_design(obs, fe);
  CHECK(fe_design.names.size() == 3);  // group intercepts are absorbed, not columns

  RegressionSpec missing;
  missing.regressors = {"zzz"};
  CHECK_THROWS_AS(expand_design(obs, missing), Error);

  RegressionSpec dup;
  dup.regressors = {"a", "a"};
  CHECK_THROWS_AS(expand_design(obs, dup), Error);

  CHECK_THROWS_AS(expand_design({}, spec), Error);
}

TEST_CASE("within_demean removes group means exactly") {
  // Two entities, two times, fully crossed.
  Eigen::MatrixXd cols(4, 1);
  cols << 1.0, 3.0, 10.0, 14.0;  // entity means 2 and 12
  std::vector<int> entity_of = {0, 0, 1, 1};
  std::vector<int> time_of = {0, 1, 0, 1};

  Eigen::MatrixXd entity_demeaned = cols;
  within_demean(entity_demeaned, entity_of, time_of, 2, 2, Effects::entity);
  CHECK(entity_demeaned(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(entity_demeaned(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entity_demeaned(2, 0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(entity_demeaned(3, 0) == doctest::Approx(2.0).epsilon(1e-15));

  Eigen::MatrixXd time_demeaned = cols;
  within_demean(time_demeaned, entity_of, time_of, 2, 2, Effects::time);
  CHECK(time_demeaned(0, 0) == doctest::Approx(-4.5).epsilon(1e-15));
  CHECK(time_demeaned(2, 0) == doctest::Approx(4.5).epsilon(1e-15));

  // Balanced two-way: residual after removing row and column means.
  Eigen::MatrixXd both = cols;
  within_demean(both, entity_of, time_of, 2, 2, Effects::two_way);
  // values: 1,3 / 10,14; grand 7; entity means 2,12; time means 5.5, 8.5
  // residual(0,0) = 1 - 2 - 5.5 + 7 = 0.5
  CHECK(both(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(both(1, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(both(2, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(both(3, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fixed-effects slopes match dummy-variable least squares") {
  for (auto effects : {Effects::entity, Effects::time, Effects::two_way}) {
    auto obs = make_panel(8, 6, 11 + static_cast<std::uint64_t>(effects));
    RegressionSpec spec;
    spec.effects = effects;
    spec.regressors = {"x1", "x2"};

    auto result = fit_panel(obs, spec);
    auto oracle = dummy_ols(obs, spec.regressors, effects);

    for (const auto& name : {"x1", "x2"}) {
      CHECK(result.coefficients.at(name) ==
            doctest::Approx(oracle.coef.at(name)).epsilon(1e-9));
      CHECK(result.std_errors.at(name) ==
            doctest::Approx(oracle.se.at(name)).epsilon(1e-9));
    }
    CHECK(result.f_df.second == oracle.df);
  }
}

TEST_CASE("pooled regression matches dummy OLS with a plain intercept") {
  auto obs = make_panel(6, 5, 29);
  RegressionSpec spec;
  spec.effects = Effects::none;
  spec.regressors = {"x1", "x2"};
  auto result = fit_panel(obs, spec);
  auto oracle = dummy_ols(obs, spec.regressors, Effects::none);
  CHECK(result.coefficients.at("x1") == doctest::Approx(oracle.coef.at("x1")).epsilon(1e-10));
  CHECK(result.std_errors.at("x2") == doctest::Approx(oracle.se.at("x2")).epsilon(1e-10));
  CHECK(result.coefficients.count("(Intercept)") == 1);
}

TEST_CASE("permuting rows changes nothing") {
  auto obs = make_panel(6, 5, 3);
  RegressionSpec spec;
  spec.effects = Effects::two_way;
  spec.regressors = {"x1", "x2"};
  auto base = fit_panel(obs, spec);

  std::mt19937 shuffler(99);
  std::shuffle(obs.begin(), obs.end(), shuffler);
  auto shuffled = fit_panel(obs, spec);
  CHECK(shuffled.coefficients.at("x1") == base.coefficients.at("x1"));
  CHECK(shuffled.coefficients.at("x2") == base.coefficients.at("x2"));
  CHECK(shuffled.std_errors.at("x1") == base.std_errors.at("x1"));
  CHECK(shuffled.r_squared == base.r_squared);
  CHECK(shuffled.f_stat == base.f_stat);
}

TEST_CASE("serial and parallel fits agree bitwise") {
  auto obs = make_panel(10, 8, 5);
  RegressionSpec spec;
  spec.effects = Effects::two_way;
  spec.regressors = {"x1", "x2"};
  auto serial = fit_panel(obs, spec, false);
  auto parallel = fit_panel(obs, spec, true);
  CHECK(serial.coefficients.at("x1") == parallel.coefficients.at("x1"));
  CHECK(serial.coefficients.at("x2") == parallel.coefficients.at("x2"));
  CHECK(serial.std_errors.at("x2") == parallel.std_errors.at("x2"));
  CHECK(serial.r_squared == parallel.r_squared);
}

TEST_CASE("single-regressor F equals the squared t statistic") {
  auto obs = make_panel(7, 6, 13);
  RegressionSpec spec;
  spec.effects = Effects::entity;
  spec.regressors = {"x1"};
  auto result = fit_panel(obs, spec);
  double t = result.coefficients.at("x1") / result.std_errors.at("x1");
  CHECK(result.f_stat == doctest::Approx(t * t).epsilon(1e-12));
  CHECK(result.f_df.first == 1);
  CHECK(f_statistic(result) == result.f_stat);
}

TEST_CASE("typed panel errors") {
  // Duplicate (entity, time) cell.
  std::vector<PanelObservation> dup(2);
  dup[0] = {"E1", "T1", 1.0, {{"x", 1.0}}};
  dup[1] = {"E1", "T1", 2.0, {{"x", 2.0}}};
  RegressionSpec spec;
  spec.effects = Effects::none;
  spec.regressors = {"x"};
  try {
    fit_panel(dup, spec);
    FAIL("expected duplicate_key");
  } catch (const Error& e) {
    CHECK(e.code() == errc::duplicate_key);
  }

  // More parameters than observations.
  std::vector<PanelObservation> tiny(2);
  tiny[0] = {"E1", "T1", 1.0, {{"x", 1.0}}};
  tiny[1] = {"E2", "T2", 2.0, {{"x", 2.0}}};
  RegressionSpec fe;
  fe.effects = Effects::entity;
  fe.regressors = {"x"};
  try {
    fit_panel(tiny, fe);
    FAIL("expected too_few_observations");
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_few_observations);
  }

  // A regressor constant within every entity has no within variation.
  auto obs = make_panel(5, 5, 21, false);
  for (auto& o : obs) o.covariates["fixed"] = (o.entity_id == "E0") ? 3.0 : 1.0;
  RegressionSpec constant;
  constant.effects = Effects::entity;
  constant.regressors = {"fixed"};
  try {
    fit_panel(obs, constant);
    FAIL("expected no_within_variation");
  } catch (const Error& e) {
    CHECK(e.code() == errc::no_within_variation);
  }

  // Two copies of the same column are rank deficient even with variation.
  for (auto& o : obs) o.covariates["x1_copy"] = o.covariates["x1"];
  RegressionSpec collinear;
  collinear.effects = Effects::entity;
  collinear.regressors = {"x1", "x1_copy"};
  try {
    fit_panel(obs, collinear);
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.code() == errc::rank_deficient);
  }

  RegressionSpec no_slopes;
  no_slopes.effects = Effects::none;
  auto intercept_only = fit_panel(make_panel(4, 4, 8), no_slopes);
  CHECK_THROWS_AS(f_statistic(intercept_only), Error);
}

TEST_CASE("significance stars follow the usual thresholds") {
  CHECK(stars_for(0.5) == "");
  CHECK(stars_for(0.099) == "*");
  CHECK(stars_for(0.049) == "**");
  CHECK(stars_for(0.009) == "***");
  CHECK(stars_for(0.10) == "");
  CHECK(stars_for(0.05) == "*");
  CHECK(stars_for(0.01) == "**");
}

TEST_CASE("effects names are stable") {
  CHECK(std::string(effects_name(Effects::none)) == "none");
  CHECK(std::string(effects_name(Effects::time)) == "time");
  CHECK(std::string(effects_name(Effects::entity)) == "entity");
  CHECK(std::string(effects_name(Effects::two_way)) == "two-way");
}

TEST_CASE("formatted table carries coefficients, footer, and notes") {
  auto obs = make_panel(6, 6, 17);
  RegressionSpec spec;
  spec.effects = Effects::entity;
  spec.regressors = {"x1", "x2"};
  auto result = fit_panel(obs, spec);

  auto table = format_table(result, "demo title", {{"x1", "First Slope"}},
                            {"Reference note line."});
  CHECK(table.find("demo title") != std::string::npos);
  CHECK(table.find("First Slope") != std::string::npos);
  CHECK(table.find("x2") != std::string::npos);
  CHECK(table.find("Observations") != std::string::npos);
  CHECK(table.find("Adjusted R2") != std::string::npos);
  CHECK(table.find("F Statistic") != std::string::npos);
  CHECK(table.find("(") != std::string::npos);  // parenthesized standard errors
  CHECK(table.find("Reference note line.") != std::string::npos);

  auto csv_text = format_result_csv(result);
  CHECK(csv_text.rfind("term,estimate,std_error,p_value,stars\n", 0) == 0);
  CHECK(csv_text.find("x1,") != std::string::npos);
  CHECK(csv_text.find("x2,") != std::string::npos);
}
