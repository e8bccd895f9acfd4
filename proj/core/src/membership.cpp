#include "blowup/membership.hpp"

#include <cmath>
#include <stdexcept>

namespace blowup {

ShrinkingSetParams ShrinkingSetParams::from(const ProblemParams& params, double A, double K) {
  ShrinkingSetParams ssp{A, params.nu(), params.varrho(), K};
  ssp.validate();
  return ssp;
}

void ShrinkingSetParams::validate() const {
  if (!(A > 1.0)) throw std::invalid_argument("shrinking set needs A > 1");
  if (!(varrho > 0.0 && varrho < nu)) throw std::invalid_argument("shrinking set needs 0 < varrho < nu");
  if (!(K > 0.0)) throw std::invalid_argument("shrinking set needs K > 0");
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::Mode0: return "mode0";
    case Constraint::Mode1: return "mode1";
    case Constraint::Mode2: return "mode2";
    case Constraint::Minus: return "minus";
    case Constraint::Exterior: return "exterior";
    case Constraint::None: return "none";
  }
  return "unknown";
}

MembershipBounds MembershipBounds::at(double s, const ShrinkingSetParams& ssp) {
  const double A = ssp.A;
  const double mode = std::pow(s, -(1.0 + ssp.nu));
  return {{A * mode, A * mode, A * A * mode, A * std::pow(s, -(1.5 + ssp.varrho)),
           A * A * std::pow(s, -ssp.varrho)}};
}

MembershipReport check_VA(const NormReport& norms, double s, const ShrinkingSetParams& ssp) {
  const auto bounds = MembershipBounds::at(s, ssp);
  const double measured[5] = {norms.q0, norms.q1, norms.q2, norms.qminus_weighted, norms.qe_sup};
  MembershipReport r;
  r.s = s;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    r.margin[i] = measured[i] / bounds.value[i];
    r.ok[i] = measured[i] <= bounds.value[i];
    r.in_set = r.in_set && r.ok[i];
    if (r.margin[i] > worst) {
      worst = r.margin[i];
      r.tightest = static_cast<Constraint>(i);
    }
  }
  return r;
}

MembershipReport check_VA(const SpectralDecomposition& dec, const ShrinkingSetParams& ssp) {
  return check_VA(weighted_norms(dec), dec.s, ssp);
}

}  // namespace blowup
