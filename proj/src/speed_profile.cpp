#include "patsvd/speed_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "patsvd/error.hpp"

namespace patsvd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("sound speed ") + what + " must be positive and finite");
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

SoundSpeedProfile::SoundSpeedProfile(Params p) : params_(std::move(p)) {
    std::visit(Overloaded{
                   [&](const Constant& c) {
                       require_positive(c.value, "value");
                       c_min_ = c_max_ = c.value;
                   },
                   [&](const Rational& c) {
                       if (!std::isfinite(c.scale))
                           throw ConfigError("rational profile scale must be finite");
                       c_max_ = 1.0;
                       c_min_ = 1.0 / (1.0 + c.scale * c.scale);
                   },
                   [&](const Annulus& c) {
                       require_positive(c.inside, "annulus value");
                       require_positive(c.outside, "background value");
                       if (!(0.0 <= c.inner && c.inner < c.outer && c.outer <= 1.0))
                           throw ConfigError("annulus radii must satisfy 0 <= inner < outer <= 1");
                       c_min_ = std::min(c.inside, c.outside);
                       c_max_ = std::max(c.inside, c.outside);
                   },
                   [&](const Tabulated& c) {
                       if (c.radii.size() != c.values.size() || c.radii.size() < 2)
                           throw ConfigError("tabulated profile needs >= 2 matching (r, c) pairs");
                       for (std::size_t i = 1; i < c.radii.size(); ++i)
                           if (!(c.radii[i] > c.radii[i - 1]))
                               throw ConfigError("tabulated radii must be strictly increasing");
                       if (c.radii.front() > 0.0 || c.radii.back() < 1.0)
                           throw ConfigError("tabulated profile leaves a gap in [0, 1]");
                       for (double v : c.values) require_positive(v, "table value");
                       // Linear interpolation attains its extrema at the knots.
                       c_min_ = *std::min_element(c.values.begin(), c.values.end());
                       c_max_ = *std::max_element(c.values.begin(), c.values.end());
                   },
               },
               params_);
}

SoundSpeedProfile SoundSpeedProfile::constant(double value) { return SoundSpeedProfile(Constant{value}); }

SoundSpeedProfile SoundSpeedProfile::rational(double scale) { return SoundSpeedProfile(Rational{scale}); }

SoundSpeedProfile SoundSpeedProfile::annulus(double inner, double outer, double inside, double outside) {
    return SoundSpeedProfile(Annulus{inner, outer, inside, outside});
}

SoundSpeedProfile SoundSpeedProfile::tabulated(std::vector<double> radii, std::vector<double> values) {
    return SoundSpeedProfile(Tabulated{std::move(radii), std::move(values)});
}

double SoundSpeedProfile::operator()(double r) const {
    if (!(r >= 0.0 && r <= 1.0))
        throw DomainError("sound speed evaluated outside [0, 1]: r = " + fmt_double(r));
    return eval_unchecked(r);
}

double SoundSpeedProfile::eval_unchecked(double r) const {
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.value; },
                          [r](const Rational& c) { return 1.0 / (1.0 + (c.scale * r) * (c.scale * r)); },
                          [r](const Annulus& c) {
                              return (r >= c.inner && r <= c.outer) ? c.inside : c.outside;
                          },
                          [r](const Tabulated& c) {
                              auto it = std::upper_bound(c.radii.begin(), c.radii.end(), r);
                              if (it == c.radii.begin()) return c.values.front();
                              if (it == c.radii.end()) return c.values.back();
                              const auto i = static_cast<std::size_t>(it - c.radii.begin());
                              const double t = (r - c.radii[i - 1]) / (c.radii[i] - c.radii[i - 1]);
                              return (1.0 - t) * c.values[i - 1] + t * c.values[i];
                          },
                      },
                      params_);
}

std::string SoundSpeedProfile::kind() const {
    return std::visit(Overloaded{
                          [](const Constant&) { return std::string("constant"); },
                          [](const Rational&) { return std::string("rational-c1"); },
                          [](const Annulus&) { return std::string("piecewise-radial"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      params_);
}

std::string SoundSpeedProfile::describe() const {
    return std::visit(Overloaded{
                          [](const Constant& c) { return "const:" + fmt_double(c.value); },
                          [](const Rational& c) {
                              return c.scale == 1.0 ? std::string("c1") : "c1:" + fmt_double(c.scale);
                          },
                          [](const Annulus& c) {
                              std::string s = "c2:" + fmt_double(c.inner) + ":" + fmt_double(c.outer);
                              if (c.inside != 5.0 || c.outside != 1.0)
                                  s += ":" + fmt_double(c.inside) + ":" + fmt_double(c.outside);
                              return s;
                          },
                          [](const Tabulated& c) {
                              std::ostringstream os;
                              os << "table:";
                              for (std::size_t i = 0; i < c.radii.size(); ++i)
                                  os << (i ? "," : "") << fmt_double(c.radii[i]) << "/" << fmt_double(c.values[i]);
                              return os.str();
                          },
                      },
                      params_);
}

} // namespace patsvd
