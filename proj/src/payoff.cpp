#include "evac/payoff.hpp"

#include <cmath>
#include <string>

#include "evac/error.hpp"

namespace evac {

namespace {

void require_in(double value, double lo, double hi, const char* name) {
  if (!(value >= lo && value <= hi)) {
    throw ConfigError(std::string("payoff parameter ") + name + " = " + std::to_string(value) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

PayoffMatrix symmetric(double ee, double es, double se, double ss, double property_value) {
  return {ee, ee, es, se, se, es, ss, ss, property_value};
}

}  // namespace

Decision decision_from_char(char c) {
  switch (c) {
    case 'E':
    case 'e':
      return Decision::Evacuate;
    case 'S':
    case 's':
      return Decision::Stay;
    default:
      throw ConfigError(std::string("unknown decision '") + c + "'");
  }
}

void PayoffParams::validate() const {
  require_in(p, 0.0, 1.0, "p");
  require_in(r_E, 0.0, 1.0, "r_E");
  require_in(r_S, 0.0, 1.0, "r_S");
  require_in(r_T, 0.0, 1.0, "r_T");
  require_in(r_D, 0.0, 1.0, "r_D");
  require_in(theta, -1.0, 1.0, "theta");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("payoff parameter alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("payoff parameter beta must be >= 0");
  if (!(property_value > 0.0) || !std::isfinite(property_value)) {
    throw ConfigError("property_value must be positive");
  }
}

bool PayoffMatrix::role_symmetric(double tol) const noexcept {
  return std::abs(a_ee - b_ee) <= tol && std::abs(a_ss - b_ss) <= tol && std::abs(a_es - b_se) <= tol &&
         std::abs(a_se - b_es) <= tol;
}

PayoffMatrix baseline_matrix(const PayoffParams& params) {
  params.validate();
  const double kept = 1.0 - params.p;
  const double evacuee_vs_stayer = kept - (1.0 - params.r_E) * params.alpha;
  const double stayer_vs_evacuee = kept - (1.0 - params.r_S) * params.beta;
  return symmetric(kept, evacuee_vs_stayer, stayer_vs_evacuee, kept, params.property_value);
}

PayoffMatrix incentive_matrix(const PayoffParams& params) {
  const PayoffMatrix base = baseline_matrix(params);
  const double ee = base.a_ee + params.theta - (1.0 - params.r_T) * params.alpha;
  const double es = base.a_es + params.theta + params.r_T * (1.0 - params.r_E) * params.alpha;
  const double se = base.a_se;
  const double ss = base.a_ss - params.r_D * params.beta;
  return symmetric(ee, es, se, ss, params.property_value);
}

PayoffMatrix paper_coefficient_matrix(double theta, double property_value) {
  if (!(theta >= -1.0 && theta <= 1.0)) throw ConfigError("theta must lie in [-1, 1]");
  if (!(property_value > 0.0)) throw ConfigError("property_value must be positive");
  return symmetric(0.3 + theta, 0.4 + theta, 0.47, 0.42, property_value);
}

std::pair<double, double> pair_payoff(const PayoffMatrix& m, Decision a, Decision b) noexcept {
  const double pv = m.property_value;
  if (a == Decision::Evacuate) {
    if (b == Decision::Evacuate) return {m.a_ee * pv, m.b_ee * pv};
    return {m.a_es * pv, m.b_es * pv};
  }
  if (b == Decision::Evacuate) return {m.a_se * pv, m.b_se * pv};
  return {m.a_ss * pv, m.b_ss * pv};
}

PayoffMode payoff_mode_from_string(std::string_view text) {
  if (text == "paper") return PayoffMode::Paper;
  if (text == "formula") return PayoffMode::Formula;
  if (text == "baseline") return PayoffMode::Baseline;
  throw ConfigError("unknown payoff mode '" + std::string(text) + "' (expected paper, formula or baseline)");
}

std::string_view to_string(PayoffMode mode) noexcept {
  switch (mode) {
    case PayoffMode::Paper:
      return "paper";
    case PayoffMode::Formula:
      return "formula";
    case PayoffMode::Baseline:
      return "baseline";
  }
  return "?";
}

PayoffMatrix make_matrix(PayoffMode mode, const PayoffParams& params) {
  switch (mode) {
    case PayoffMode::Paper:
      params.validate();
      return paper_coefficient_matrix(params.theta, params.property_value);
    case PayoffMode::Formula:
      return incentive_matrix(params);
    case PayoffMode::Baseline:
      return baseline_matrix(params);
  }
  throw ConfigError("unknown payoff mode");
}

}  // namespace evac
