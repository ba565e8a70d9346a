#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace evac {

enum class Decision : unsigned char { Stay = 0, Evacuate = 1 };

constexpr char to_char(Decision d) noexcept { return d == Decision::Evacuate ? 'E' : 'S'; }
Decision decision_from_char(char c);

// Model parameters. theta is the recovery incentive as a fraction of
// property value; property_value scales every payoff.
struct PayoffParams {
  double p = 0.5;
  double alpha = 0.4;
  double beta = 0.2;
  double r_E = 0.5;
  double r_S = 0.07;
  double r_T = 0.5;
  double r_D = 0.4;
  double theta = 0.0;
  double property_value = 1.0;

  // Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

// Dimensionless payoff coefficients. a_xy is what agent A receives when A
// plays x against B playing y; b_xy is what B receives in the same encounter.
// Payoff = coefficient * property_value.
struct PayoffMatrix {
  double a_ee = 0, b_ee = 0;
  double a_es = 0, b_es = 0;
  double a_se = 0, b_se = 0;
  double a_ss = 0, b_ss = 0;
  double property_value = 1.0;

  // A-side coefficient for (self, other).
  double coefficient(Decision self, Decision other) const noexcept {
    if (self == Decision::Evacuate) return other == Decision::Evacuate ? a_ee : a_es;
    return other == Decision::Evacuate ? a_se : a_ss;
  }

  bool role_symmetric(double tol = 1e-12) const noexcept;

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;
};

// No incentive, no government services.
PayoffMatrix baseline_matrix(const PayoffParams& params);

// Baseline plus recovery fund theta and transport/resource services.
PayoffMatrix incentive_matrix(const PayoffParams& params);

// Published coefficient values: a_ee = 0.3 + theta, a_es = 0.4 + theta,
// a_se = 0.47, a_ss = 0.42 (b-side by role symmetry).
PayoffMatrix paper_coefficient_matrix(double theta, double property_value = 1.0);

// (payoff to A, payoff to B) when A plays a and B plays b.
std::pair<double, double> pair_payoff(const PayoffMatrix& m, Decision a, Decision b) noexcept;

enum class PayoffMode { Baseline, Formula, Paper };

PayoffMode payoff_mode_from_string(std::string_view text);
std::string_view to_string(PayoffMode mode) noexcept;

// Matrix for the given mode; theta in params is used by Formula and Paper.
PayoffMatrix make_matrix(PayoffMode mode, const PayoffParams& params);

}  // namespace evac
