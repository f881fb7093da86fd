#pragma once

#include <string>
#include <variant>
#include <vector>

namespace patsvd {

/// Radial coefficient c(r) of the wave operator c(|x|)Δ on the unit ball.
///
/// All four kinds are bounded away from zero; `c_min()`/`c_max()` are exact
/// bounds over [0, 1] computed at construction.
class SoundSpeedProfile {
public:
    struct Constant {
        double value = 1.0;
    };
    /// 1 / (1 + (scale r)^2)
    struct Rational {
        double scale = 1.0;
    };
    /// `inside` on the closed annulus [inner, outer], `outside` elsewhere.
    struct Annulus {
        double inner = 0.3;
        double outer = 0.6;
        double inside = 5.0;
        double outside = 1.0;
    };
    /// Piecewise-linear through (radii[i], values[i]).
    struct Tabulated {
        std::vector<double> radii;
        std::vector<double> values;
    };
    using Params = std::variant<Constant, Rational, Annulus, Tabulated>;

    static SoundSpeedProfile constant(double value);
    static SoundSpeedProfile rational(double scale = 1.0);
    static SoundSpeedProfile annulus(double inner, double outer, double inside = 5.0,
                                     double outside = 1.0);
    static SoundSpeedProfile tabulated(std::vector<double> radii, std::vector<double> values);

    /// Throws DomainError for r outside [0, 1].
    double operator()(double r) const;

    double c_min() const noexcept { return c_min_; }
    double c_max() const noexcept { return c_max_; }
    const Params& params() const noexcept { return params_; }

    /// "constant", "rational-c1", "piecewise-radial" or "tabulated".
    std::string kind() const;
    /// Preset-style spec string that `make_profile` parses back to an equal profile.
    std::string describe() const;

private:
    explicit SoundSpeedProfile(Params p);
    double eval_unchecked(double r) const;

    Params params_;
    double c_min_ = 1.0;
    double c_max_ = 1.0;
};

} // namespace patsvd
