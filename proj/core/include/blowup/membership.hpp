#pragma once

#include <array>
#include <string>

#include "blowup/hermite.hpp"
#include "blowup/params.hpp"

namespace blowup {

struct ShrinkingSetParams {
  double A = 20.0;
  double nu = 0.0;
  double varrho = 0.0;
  double K = 5.0;

  static ShrinkingSetParams from(const ProblemParams& params, double A, double K = 5.0);
  void validate() const;
};

enum class Constraint { Mode0 = 0, Mode1 = 1, Mode2 = 2, Minus = 3, Exterior = 4, None = 5 };

std::string to_string(Constraint c);

/// Five componentwise bounds of the shrinking set at time s.
struct MembershipBounds {
  std::array<double, 5> value;
  static MembershipBounds at(double s, const ShrinkingSetParams& ssp);
};

struct MembershipReport {
  double s = 0.0;
  std::array<bool, 5> ok{true, true, true, true, true};
  std::array<double, 5> margin{};  // measured / bound
  bool in_set = true;
  Constraint tightest = Constraint::None;  // largest margin, None when all margins are 0

  bool satisfied(Constraint c) const { return ok[static_cast<int>(c)]; }
  double margin_of(Constraint c) const { return margin[static_cast<int>(c)]; }
};

MembershipReport check_VA(const NormReport& norms, double s, const ShrinkingSetParams& ssp);
MembershipReport check_VA(const SpectralDecomposition& dec, const ShrinkingSetParams& ssp);

}  // namespace blowup
