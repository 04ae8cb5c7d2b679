#include "glmvi/links.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "glmvi/error.hpp"

namespace glmvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid_of(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus_of(double z) {
  if (z <= 0.0) return std::log1p(std::exp(z));
  return z + std::log1p(std::exp(-z));
}

void require_finite(double z, const LinkFunction& link) {
  if (!std::isfinite(z)) {
    throw DomainError("link " + link.name() + ": non-finite argument");
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_number(values[i]);
  }
  return out;
}

double parse_number(std::string_view text, std::string_view spec) {
  // from_chars rejects a leading '+', which is accepted here for convenience.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("link spec '" + std::string(spec) + "': bad number '" +
                      std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

LinkFunction::LinkFunction(LinkKind kind) : kind_(kind) {}

LinkFunction LinkFunction::identity() {
  LinkFunction l(LinkKind::identity);
  l.lipschitz_ = 1.0;
  l.modulus_ = 1.0;
  return l;
}

LinkFunction LinkFunction::sigmoid() {
  LinkFunction l(LinkKind::logit_sigmoid);
  l.lipschitz_ = 0.25;
  return l;
}

LinkFunction LinkFunction::exp() {
  LinkFunction l(LinkKind::exp);
  l.lipschitz_ = kInf;
  return l;
}

LinkFunction LinkFunction::reciprocal() {
  LinkFunction l(LinkKind::reciprocal);
  l.lipschitz_ = kInf;
  return l;
}

LinkFunction LinkFunction::arctan_cdf() {
  LinkFunction l(LinkKind::arctan_cdf);
  l.lipschitz_ = 1.0 / std::numbers::pi;
  return l;
}

LinkFunction LinkFunction::softplus() {
  LinkFunction l(LinkKind::softplus);
  l.lipschitz_ = 1.0;
  return l;
}

LinkFunction LinkFunction::clipped_exp(double c, double C) {
  if (!(c >= 0.0) || !(C > c) || !std::isfinite(C)) {
    throw ParameterError("clipped_exp requires 0 <= c < C < inf");
  }
  LinkFunction l(LinkKind::clipped_exp);
  l.clip_low_ = c;
  l.clip_high_ = C;
  l.lipschitz_ = C;
  if (c > 0.0) l.kinks_.push_back(std::log(c));
  l.kinks_.push_back(std::log(C));
  return l;
}

LinkFunction LinkFunction::relu() {
  LinkFunction l(LinkKind::relu);
  l.lipschitz_ = 1.0;
  l.kinks_.push_back(0.0);
  return l;
}

LinkFunction LinkFunction::gmm_cdf(GmmComponents components) {
  const auto n = components.weights.size();
  if (n == 0 || components.means.size() != n || components.scales.size() != n) {
    throw ParameterError("gmm_cdf requires equal, nonzero numbers of weights, means and scales");
  }
  double lip = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(components.weights[i] >= 0.0) || !(components.scales[i] > 0.0) ||
        !std::isfinite(components.means[i])) {
      throw ParameterError("gmm_cdf requires w >= 0, finite m and s > 0");
    }
    lip += components.weights[i] / (components.scales[i] * std::sqrt(2.0 * std::numbers::pi));
  }
  LinkFunction l(LinkKind::gmm_cdf);
  l.gmm_ = std::move(components);
  l.lipschitz_ = lip;
  return l;
}

LinkFunction LinkFunction::gmm_cdf_experiment() {
  return gmm_cdf({{1.65, 1.35}, {-0.5, 1.2}, {0.7, 0.5}});
}

LinkFunction LinkFunction::minty_sine() {
  LinkFunction l(LinkKind::minty_sine);
  l.lipschitz_ = 3.0;
  l.modulus_ = 0.5;
  return l;
}

double LinkFunction::eval(double z) const {
  require_finite(z, *this);
  switch (kind_) {
    case LinkKind::identity:
      return z;
    case LinkKind::logit_sigmoid:
      return sigmoid_of(z);
    case LinkKind::exp:
      return std::exp(z);
    case LinkKind::reciprocal:
      if (z == 0.0) throw DomainError("link reciprocal: undefined at z = 0");
      return 1.0 / z;
    case LinkKind::arctan_cdf:
      return 0.5 + std::atan(z) / std::numbers::pi;
    case LinkKind::softplus:
      return softplus_of(z);
    case LinkKind::clipped_exp:
      return std::max(clip_low_, std::min(std::exp(z), clip_high_));
    case LinkKind::relu:
      return std::max(0.0, z);
    case LinkKind::gmm_cdf: {
      double v = 0.0;
      for (std::size_t i = 0; i < gmm_.weights.size(); ++i) {
        v += gmm_.weights[i] * normal_cdf((z - gmm_.means[i]) / gmm_.scales[i]);
      }
      return v;
    }
    case LinkKind::minty_sine:
      return z + 2.0 * std::sin(z) * std::cos(z);
  }
  return 0.0;
}

std::optional<double> LinkFunction::kink_at(double z) const {
  for (double k : kinks_) {
    if (std::abs(z - k) <= kKinkTolerance) return k;
  }
  return std::nullopt;
}

double LinkFunction::deriv(double z, Side side) const {
  require_finite(z, *this);
  if (const auto kink = kink_at(z)) {
    if (side == Side::two_sided) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "link " << name() << ": two-sided derivative undefined at kink z = " << *kink;
      throw KinkError(msg.str(), *kink);
    }
    const bool right = side == Side::right;
    if (kind_ == LinkKind::relu) return right ? 1.0 : 0.0;
    // clipped_exp: lower kink log c, upper kink log C.
    if (clip_low_ > 0.0 && *kink == kinks_.front()) return right ? clip_low_ : 0.0;
    return right ? 0.0 : clip_high_;
  }
  switch (kind_) {
    case LinkKind::identity:
      return 1.0;
    case LinkKind::logit_sigmoid: {
      const double s = sigmoid_of(z);
      return s * (1.0 - s);
    }
    case LinkKind::exp:
      return std::exp(z);
    case LinkKind::reciprocal:
      if (z == 0.0) throw DomainError("link reciprocal: undefined at z = 0");
      return -1.0 / (z * z);
    case LinkKind::arctan_cdf:
      return 1.0 / (std::numbers::pi * (1.0 + z * z));
    case LinkKind::softplus:
      return sigmoid_of(z);
    case LinkKind::clipped_exp: {
      const double e = std::exp(z);
      return (e < clip_low_ || e > clip_high_) ? 0.0 : e;
    }
    case LinkKind::relu:
      return z > 0.0 ? 1.0 : 0.0;
    case LinkKind::gmm_cdf: {
      double v = 0.0;
      for (std::size_t i = 0; i < gmm_.weights.size(); ++i) {
        v += gmm_.weights[i] * normal_pdf((z - gmm_.means[i]) / gmm_.scales[i]) / gmm_.scales[i];
      }
      return v;
    }
    case LinkKind::minty_sine:
      return 1.0 + 2.0 * (std::cos(z) * std::cos(z) - std::sin(z) * std::sin(z));
  }
  return 0.0;
}

double LinkFunction::solver_deriv(double z) const {
  return deriv(z, kink_at(z) ? Side::right : Side::two_sided);
}

double LinkFunction::deriv2(double z) const {
  require_finite(z, *this);
  switch (kind_) {
    case LinkKind::identity:
    case LinkKind::relu:
      return 0.0;
    case LinkKind::logit_sigmoid: {
      const double s = sigmoid_of(z);
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case LinkKind::exp:
      return std::exp(z);
    case LinkKind::reciprocal:
      if (z == 0.0) throw DomainError("link reciprocal: undefined at z = 0");
      return 2.0 / (z * z * z);
    case LinkKind::arctan_cdf: {
      const double q = 1.0 + z * z;
      return -2.0 * z / (std::numbers::pi * q * q);
    }
    case LinkKind::softplus: {
      const double s = sigmoid_of(z);
      return s * (1.0 - s);
    }
    case LinkKind::clipped_exp:
      return solver_deriv(z) == 0.0 ? 0.0 : std::exp(z);
    case LinkKind::gmm_cdf: {
      double v = 0.0;
      for (std::size_t i = 0; i < gmm_.weights.size(); ++i) {
        const double s = gmm_.scales[i];
        const double x = (z - gmm_.means[i]) / s;
        v -= gmm_.weights[i] * x * normal_pdf(x) / (s * s);
      }
      return v;
    }
    case LinkKind::minty_sine:
      return -4.0 * std::sin(2.0 * z);
  }
  return 0.0;
}

std::string LinkFunction::name() const {
  switch (kind_) {
    case LinkKind::identity: return "identity";
    case LinkKind::logit_sigmoid: return "sigmoid";
    case LinkKind::exp: return "log";
    case LinkKind::reciprocal: return "reciprocal";
    case LinkKind::arctan_cdf: return "arctan";
    case LinkKind::softplus: return "softplus";
    case LinkKind::clipped_exp: return "clipped_exp";
    case LinkKind::relu: return "relu";
    case LinkKind::gmm_cdf: return "gmmcdf";
    case LinkKind::minty_sine: return "minty_sine";
  }
  return "unknown";
}

std::string LinkFunction::to_spec() const {
  switch (kind_) {
    case LinkKind::clipped_exp:
      return "clipped_exp:c=" + format_number(clip_low_) + ",C=" + format_number(clip_high_);
    case LinkKind::gmm_cdf:
      return "gmmcdf:w=" + join_numbers(gmm_.weights) + ";m=" + join_numbers(gmm_.means) +
             ";s=" + join_numbers(gmm_.scales);
    default:
      return name();
  }
}

LinkFunction parse_link(std::string_view spec_in) {
  const std::string_view spec = trim(spec_in);
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view args =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const bool has_args = colon != std::string_view::npos;

  auto no_args = [&](LinkFunction l) {
    if (has_args) throw ConfigError("link '" + std::string(head) + "' takes no parameters");
    return l;
  };

  if (head == "identity") return no_args(LinkFunction::identity());
  if (head == "sigmoid" || head == "logit") return no_args(LinkFunction::sigmoid());
  if (head == "log" || head == "exp") return no_args(LinkFunction::exp());
  if (head == "reciprocal" || head == "inverse") return no_args(LinkFunction::reciprocal());
  if (head == "arctan") return no_args(LinkFunction::arctan_cdf());
  if (head == "softplus") return no_args(LinkFunction::softplus());
  if (head == "relu") return no_args(LinkFunction::relu());
  if (head == "minty_sine") return no_args(LinkFunction::minty_sine());

  if (head == "clipped_exp") {
    if (!has_args) return LinkFunction::clipped_exp(0.0, 2.0);
    std::optional<double> c, C;
    for (auto kv : split(args, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("link spec '" + std::string(spec) + "': expected key=value");
      }
      const auto key = trim(kv.substr(0, eq));
      const double v = parse_number(trim(kv.substr(eq + 1)), spec);
      if (key == "c") c = v;
      else if (key == "C") C = v;
      else throw ConfigError("link spec '" + std::string(spec) + "': unknown key '" + std::string(key) + "'");
    }
    if (!c || !C) throw ConfigError("link spec '" + std::string(spec) + "': needs c and C");
    try {
      return LinkFunction::clipped_exp(*c, *C);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }

  if (head == "gmmcdf" || head == "gmm_cdf") {
    if (!has_args) return LinkFunction::gmm_cdf_experiment();
    GmmComponents comp;
    for (auto group : split(args, ';')) {
      const auto eq = group.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("link spec '" + std::string(spec) + "': expected key=list");
      }
      const auto key = trim(group.substr(0, eq));
      std::vector<double> values;
      for (auto item : split(group.substr(eq + 1), ',')) values.push_back(parse_number(trim(item), spec));
      if (key == "w") comp.weights = std::move(values);
      else if (key == "m") comp.means = std::move(values);
      else if (key == "s") comp.scales = std::move(values);
      else throw ConfigError("link spec '" + std::string(spec) + "': unknown key '" + std::string(key) + "'");
    }
    try {
      return LinkFunction::gmm_cdf(std::move(comp));
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }

  throw ConfigError("unknown link '" + std::string(spec) + "'");
}

}  // namespace glmvi
