#include "hrwave/model.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hrwave/errors.hpp"

namespace hrwave {
namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(value)) {
    throw std::invalid_argument("bad " + what + ": '" + text + "'");
  }
  return value;
}

/// (e^{-2 pi i k a} - e^{-2 pi i k b}) / (2 pi i k), or b - a at k = 0.
std::complex<double> indicator_coefficient(double a, double b, int k) {
  if (k == 0) return b - a;
  const double ka = std::fmod(double(k) * a, 1.0);
  const double kb = std::fmod(double(k) * b, 1.0);
  const std::complex<double> diff = std::polar(1.0, -kTwoPi * ka) - std::polar(1.0, -kTwoPi * kb);
  return diff / std::complex<double>(0, kTwoPi * k);
}

void check_box(const Box& box, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (!(0 <= box.lo[i] && box.lo[i] < box.hi[i] && box.hi[i] <= 1)) {
      throw std::invalid_argument("box must satisfy 0 <= lo < hi <= 1 in every dimension");
    }
  }
}

/// a(k) for k = 0..count-1, drawn from the stream of one factor.
std::vector<double> rough_factor(std::uint64_t seed, std::uint32_t factor, double exponent, int count) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), factor};
  std::mt19937_64 rng(seq);
  std::vector<double> a(count);
  for (int k = 0; k < count; ++k) {
    const double uniform = double(rng() >> 11) * 0x1.0p-53;
    a[k] = k == 0 ? uniform : uniform * std::pow(double(k), -exponent);
  }
  return a;
}

/// H^s norm of the tensor product of two magnitude tables over |k_i| <= K-1.
double rough_norm(const std::vector<double>& a, const std::vector<double>& b, int dim, int K, double s) {
  const double four_pi2 = kTwoPi * kTwoPi;
  double sum = 0;
  if (dim == 1) {
    for (int k = -(K - 1); k <= K - 1; ++k) {
      const double c = a[std::abs(k)];
      sum += std::pow(1 + four_pi2 * double(k) * k, s) * c * c;
    }
    return std::sqrt(sum);
  }
  for (int k1 = -(K - 1); k1 <= K - 1; ++k1) {
    const double c1 = a[std::abs(k1)];
    double row = 0;
    for (int k2 = -(K - 1); k2 <= K - 1; ++k2) {
      const double c2 = b[std::abs(k2)];
      row += std::pow(1 + four_pi2 * (double(k1) * k1 + double(k2) * k2), s) * c2 * c2;
    }
    sum += c1 * c1 * row;
  }
  return std::sqrt(sum);
}

PairField<double> smooth_field(const Smooth& smooth, int dim, int N) {
  if (smooth.label != "sin") throw std::invalid_argument("unknown smooth data '" + smooth.label + "'");
  const Layout layout{dim, N};
  validate_layout(layout);
  GridSamples<double> s{dim, N, RealArray<double>(layout.size())};
  const int side = int(layout.side());
  for (Eigen::Index i = 0; i < layout.size(); ++i) {
    const double x1 = double(dim == 1 ? i : i / side) / side;
    double value = std::sin(kTwoPi * x1);
    if (dim == 2) value *= std::sin(kTwoPi * double(i % side) / side);
    s.values[i] = value;
  }
  PairField<double> w{forward_transform(s), SpectralField<double>::zero(dim, N)};
  clear_nyquist(w);
  return w;
}

}  // namespace

Nonlinearity Nonlinearity::parse(const std::string& label, double m) {
  if (!(m > 0) || !std::isfinite(m)) throw std::invalid_argument("m must be a positive number");
  const auto colon = label.find(':');
  const std::string family = label.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : label.substr(colon + 1);
  Nonlinearity nl;
  nl.m = m;
  if (family == "sine") {
    nl.family = Family::Sine;
    nl.param = arg.empty() ? 1.0 : parse_number(arg, "sine amplitude");
  } else if (family == "cubic") {
    nl.family = Family::Cubic;
    nl.param = arg.empty() ? 1.0 : parse_number(arg, "cubic coefficient");
  } else if (family == "linear" && arg.empty()) {
    nl.family = Family::Linear;
    nl.param = 0;
  } else {
    throw std::invalid_argument("unknown nonlinearity '" + label + "' (expected sine:A, cubic:L or linear)");
  }
  return nl;
}

std::string Nonlinearity::label() const {
  switch (family) {
    case Family::Sine: return "sine:" + shortest(param);
    case Family::Cubic: return "cubic:" + shortest(param);
    case Family::Linear: return "linear";
  }
  return {};
}

double Nonlinearity::g(double u) const {
  switch (family) {
    case Family::Sine: return param * std::sin(u);
    case Family::Cubic: return param * u * u * u;
    case Family::Linear: return -m * u;
  }
  return 0;
}

double Nonlinearity::dg(double u) const {
  switch (family) {
    case Family::Sine: return param * std::cos(u);
    case Family::Cubic: return 3 * param * u * u;
    case Family::Linear: return -m;
  }
  return 0;
}

double Nonlinearity::d2g(double u) const {
  switch (family) {
    case Family::Sine: return -param * std::sin(u);
    case Family::Cubic: return 6 * param * u;
    case Family::Linear: return 0;
  }
  return 0;
}

SpectralField<double> eval_f_on_grid(const Nonlinearity& nl, const SpectralField<double>& u, Which which) {
  if (!u.hermitian) throw std::invalid_argument("eval_f_on_grid needs a real (hermitian) field");
  auto samples = inverse_transform(u);
  if (nl.family == Nonlinearity::Family::Linear) {
    samples.values.setZero();
  } else if (which == Which::F) {
    samples.values = samples.values.unaryExpr([&](double x) { return nl.f(x); });
  } else {
    samples.values = samples.values.unaryExpr([&](double x) { return nl.df(x); });
  }
  if (!samples.values.allFinite()) throw BlowUpError("non-finite nonlinearity on the grid", -1);
  return forward_transform(samples);
}

SpectralField<double> exact_box_coefficients(double a, double b, double height, int N) {
  if (!(0 <= a && a < b && b <= 1)) throw std::invalid_argument("box interval must satisfy 0 <= a < b <= 1");
  auto f = SpectralField<double>::zero(1, N);
  for (int k = -(N - 1); k <= N - 1; ++k) f[{k}] = height * indicator_coefficient(a, b, k);
  return f;
}

bool make_preset(const std::string& name, int dim, std::uint64_t seed, InitialData& out) {
  const auto box1 = [](double lo, double hi, double h) { return Box{{lo, 0}, {hi, 1}, h}; };
  const auto box2 = [](double lo, double hi, double h) { return Box{{lo, lo}, {hi, hi}, h}; };
  const auto need = [&](int want) {
    if (dim != want) {
      throw std::invalid_argument("preset " + name + " is " + std::to_string(want) + "D but --dim is " +
                                  std::to_string(dim));
    }
  };
  InitialData data;
  data.name = name;
  if (name == "boxes:sg1d") {
    need(1);
    data.variant = Boxes{{box1(0.3, 0.425, 5), box1(0.575, 0.7, 2.5)}, {box1(0.3, 0.425, -5), box1(0.575, 0.7, -2.5)}};
  } else if (name == "boxes:kg1d") {
    need(1);
    data.variant = Boxes{{box1(0.3, 0.425, 4), box1(0.575, 0.7, 2)}, {}};
  } else if (name == "boxes:sg2d-one") {
    need(2);
    data.variant = Boxes{{box2(0.375, 0.625, 0.5)}, {}};
  } else if (name == "boxes:sg2d-two") {
    need(2);
    data.variant = Boxes{{box2(0.3, 0.425, 0.5), box2(0.575, 0.7, 0.25)}, {}};
  } else if (name == "rough2d") {
    need(2);
    Rough rough;
    rough.seed = seed;
    data.variant = rough;
  } else if (name == "smooth:sin") {
    data.variant = Smooth{"sin"};
  } else {
    return false;
  }
  data.dim = dim;
  out = std::move(data);
  return true;
}

ModeSource::ModeSource(const InitialData& data, int K) : dim_(data.dim), K_(K), data_(data) {
  validate_layout({dim_, K_});
  if (const auto* boxes = std::get_if<Boxes>(&data_.variant)) {
    for (const auto& b : boxes->u) check_box(b, dim_);
    for (const auto& b : boxes->v) check_box(b, dim_);
  } else if (const auto* rough = std::get_if<Rough>(&data_.variant)) {
    if (!(rough->target_u > 0) || !(rough->target_v > 0)) throw std::invalid_argument("rough target norms must be > 0");
    const int Kn = rough->normalization_bandwidth > 0 ? rough->normalization_bandwidth : K_;
    const int count = std::max(K_, Kn);
    rough_u_[0] = rough_factor(rough->seed, 0, rough->exponent_u, count);
    rough_v_[0] = rough_factor(rough->seed, 2, rough->exponent_v, count);
    if (dim_ == 2) {
      rough_u_[1] = rough_factor(rough->seed, 1, rough->exponent_u, count);
      rough_v_[1] = rough_factor(rough->seed, 3, rough->exponent_v, count);
    }
    const double nu = rough_norm(rough_u_[0], rough_u_[1], dim_, Kn, 0.5);
    const double nv = rough_norm(rough_v_[0], rough_v_[1], dim_, Kn, -0.5);
    scale_u_ = nu > 0 ? rough->target_u / nu : 0.0;
    scale_v_ = nv > 0 ? rough->target_v / nv : 0.0;
  } else if (const auto* smooth = std::get_if<Smooth>(&data_.variant)) {
    smooth_ = smooth_field(*smooth, dim_, 4);
  } else {
    smooth_ = std::get<Coefficients>(data_.variant).state;
    if (smooth_.dim() != dim_ || smooth_.v.layout() != smooth_.u.layout()) {
      throw std::invalid_argument("initial coefficients do not match the dimension");
    }
  }
}

std::complex<double> ModeSource::boxes_at(const std::vector<Box>& boxes, ModeIndex k) const {
  std::complex<double> c = 0;
  for (const auto& box : boxes) {
    std::complex<double> term = box.height * indicator_coefficient(box.lo[0], box.hi[0], k.k1);
    if (dim_ == 2) term *= indicator_coefficient(box.lo[1], box.hi[1], k.k2);
    c += term;
  }
  return c;
}

std::pair<std::complex<double>, std::complex<double>> ModeSource::operator()(ModeIndex k) const {
  const auto inside = [this](int c) { return std::abs(c) <= K_ - 1; };
  if (!inside(k.k1) || (dim_ == 2 && !inside(k.k2))) return {0.0, 0.0};
  if (const auto* boxes = std::get_if<Boxes>(&data_.variant)) return {boxes_at(boxes->u, k), boxes_at(boxes->v, k)};
  if (std::holds_alternative<Rough>(data_.variant)) {
    const int a = std::abs(k.k1), b = std::abs(k.k2);
    double u = rough_u_[0][a], v = rough_v_[0][a];
    if (dim_ == 2) {
      u *= rough_u_[1][b];
      v *= rough_v_[1][b];
    }
    return {scale_u_ * u, scale_v_ * v};
  }
  const Layout native = smooth_.layout();
  if (std::abs(k.k1) > native.N - 1 || (dim_ == 2 && std::abs(k.k2) > native.N - 1)) return {0.0, 0.0};
  return {smooth_.u[k], smooth_.v[k]};
}

PairField<double> build_rough(const Rough& spec, int dim, int N_alpha) {
  InitialData data{dim, spec, "rough"};
  return build_initial(data, N_alpha);
}

PairField<double> build_initial(const InitialData& data, int N_alpha) {
  if (const auto* smooth = std::get_if<Smooth>(&data.variant)) return smooth_field(*smooth, data.dim, N_alpha);
  const ModeSource source(data, N_alpha);
  auto w = PairField<double>::zero(data.dim, N_alpha);
  const Layout layout = w.layout();
  for (Eigen::Index i = 0; i < layout.size(); ++i) {
    const auto [u, v] = source(layout.mode(i));
    w.u.coeffs[i] = u;
    w.v.coeffs[i] = v;
  }
  return w;
}

}  // namespace hrwave
