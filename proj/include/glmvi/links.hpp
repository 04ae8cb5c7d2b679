#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace glmvi {

enum class LinkKind {
  identity,
  logit_sigmoid,
  exp,
  reciprocal,
  arctan_cdf,
  softplus,
  clipped_exp,
  relu,
  gmm_cdf,
  minty_sine,
};

enum class Side { left, right, two_sided };

/// Points closer than this to a kink are treated as the kink itself.
inline constexpr double kKinkTolerance = 1e-12;

struct GmmComponents {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> scales;
};

/// Inverse link g^{-1} with closed-form value, first and second derivatives,
/// kink locations and its registered constants. Immutable after construction.
class LinkFunction {
 public:
  static LinkFunction identity();
  static LinkFunction sigmoid();
  static LinkFunction exp();
  static LinkFunction reciprocal();
  static LinkFunction arctan_cdf();
  static LinkFunction softplus();
  /// max{c, min{e^z, C}}; requires 0 <= c < C.
  static LinkFunction clipped_exp(double c, double C);
  static LinkFunction relu();
  /// sum_i w_i * Phi((z - m_i) / s_i); requires equal lengths, w_i >= 0, s_i > 0.
  static LinkFunction gmm_cdf(GmmComponents components);
  /// z + 2 sin(z) cos(z): not monotone, but strong Minty with modulus 1/2.
  static LinkFunction minty_sine();

  /// The mixture used by the benchmark grid.
  static LinkFunction gmm_cdf_experiment();

  LinkKind kind() const noexcept { return kind_; }

  double eval(double z) const;
  double deriv(double z, Side side = Side::two_sided) const;
  /// Derivative used by operators and solvers: two-sided off kinks, the
  /// right derivative at a kink.
  double solver_deriv(double z) const;
  /// Second derivative (right-sided at kinks). Used by MLE Hessians.
  double deriv2(double z) const;

  const std::vector<double>& kinks() const noexcept { return kinks_; }
  /// Nearest kink within kKinkTolerance of z, if any.
  std::optional<double> kink_at(double z) const;

  /// Global Lipschitz constant; +infinity for exp and reciprocal.
  double lipschitz() const noexcept { return lipschitz_; }
  std::optional<double> monotone_modulus() const noexcept { return modulus_; }

  /// Clipping bounds; only meaningful for clipped_exp.
  double clip_low() const noexcept { return clip_low_; }
  double clip_high() const noexcept { return clip_high_; }
  const GmmComponents& gmm() const noexcept { return gmm_; }

  /// Canonical spec string, parseable by parse_link.
  std::string to_spec() const;
  std::string name() const;

 private:
  explicit LinkFunction(LinkKind kind);

  LinkKind kind_;
  double lipschitz_ = 1.0;
  std::optional<double> modulus_;
  double clip_low_ = 0.0;
  double clip_high_ = 0.0;
  GmmComponents gmm_;
  std::vector<double> kinks_;
};

struct LinkConstants {
  double lipschitz;
  std::optional<double> monotone_modulus;
};

inline double link_eval(const LinkFunction& link, double z) { return link.eval(z); }
inline double link_deriv(const LinkFunction& link, double z, Side side) {
  return link.deriv(z, side);
}
inline LinkConstants link_constants(const LinkFunction& link) {
  return {link.lipschitz(), link.monotone_modulus()};
}

/// Parses `log`, `softplus`, `clipped_exp:c=0,C=2`,
/// `gmmcdf:w=1.65,1.35;m=-0.5,1.2;s=0.7,0.5`, `identity`, `sigmoid`,
/// `reciprocal`, `relu`, `minty_sine`, `arctan`. Throws ConfigError.
LinkFunction parse_link(std::string_view spec);

/// Standard normal CDF via erfc.
double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace glmvi
