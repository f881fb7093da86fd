#include "patsvd/wave_forward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "patsvd/error.hpp"
#include "patsvd/parallel.hpp"
#include "patsvd/radial_eigensolver.hpp"
#include "patsvd/simd/kernels.hpp"

namespace patsvd {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

std::vector<complex> angular_column(const ModeIndex& index, const AngularGrid& angular) {
    std::vector<complex> out(angular.size());
    for (std::size_t a = 0; a < angular.size(); ++a)
        out[a] = angular_factor(index, angular.colatitude(a), angular.azimuth(a));
    return out;
}

ModeIndex angular_key(const ModeIndex& i) {
    ModeIndex key = i;
    key.k = 1;
    return key;
}

double boundary_gain(const RadialMode& m) { return m.boundary_value; }

} // namespace

TimeGrid TimeGrid::for_horizon(double horizon, double mu_max) {
    if (!(horizon > 0.0)) throw ConfigError("time horizon must be positive");
    if (!(mu_max >= 0.0)) throw ConfigError("mu_max must be non-negative");
    const double steps = std::ceil(horizon * mu_max / kQuarterPi - 1e-9);
    TimeGrid g{horizon / std::max(1.0, steps), static_cast<std::size_t>(std::max(1.0, steps))};
    g.check(mu_max);
    return g;
}

void TimeGrid::check(double mu_max) const {
    if (!(dt > 0.0) || n_steps == 0) throw ConfigError("time grid needs dt > 0 and at least one step");
    if (dt * mu_max > kQuarterPi * (1.0 + 1e-12))
        throw ConfigError("time step " + std::to_string(dt) + " undersamples mu_max = " + std::to_string(mu_max) +
                          " (need dt * mu_max <= pi/4)");
}

BoundaryTrace::BoundaryTrace(AngularGrid angular, TimeGrid time)
    : angular_(std::move(angular)), time_(time), samples_(angular_.size() * time_.n_steps) {}

BoundaryTrace::BoundaryTrace(AngularGrid angular, TimeGrid time, std::vector<complex> samples)
    : angular_(std::move(angular)), time_(time), samples_(std::move(samples)) {
    if (samples_.size() != angular_.size() * time_.n_steps)
        throw ShapeError("trace has " + std::to_string(samples_.size()) + " samples, grid needs " +
                         std::to_string(angular_.size() * time_.n_steps));
}

BoundaryTrace BoundaryTrace::truncated(std::size_t n_steps) const {
    if (n_steps == 0 || n_steps > time_.n_steps) throw ShapeError("cannot truncate trace to " + std::to_string(n_steps) + " steps");
    const auto end = samples_.begin() + static_cast<std::ptrdiff_t>(n_steps * angular_.size());
    return BoundaryTrace(angular_, TimeGrid{time_.dt, n_steps}, std::vector<complex>(samples_.begin(), end));
}

double BoundaryTrace::max_imag() const {
    double m = 0.0;
    for (const complex& v : samples_) m = std::max(m, std::abs(v.imag()));
    return m;
}

BoundaryTrace& BoundaryTrace::operator+=(const BoundaryTrace& other) {
    if (!same_grid(other)) throw ShapeError("traces live on different grids");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
    return *this;
}

BoundaryTrace& BoundaryTrace::operator-=(const BoundaryTrace& other) {
    if (!same_grid(other)) throw ShapeError("traces live on different grids");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
    return *this;
}

BoundaryTrace& BoundaryTrace::operator*=(complex s) {
    for (complex& v : samples_) v *= s;
    return *this;
}

double l2_norm(const BoundaryTrace& trace) {
    double s = 0.0;
    for (const complex& v : trace.samples()) s += std::norm(v);
    return std::sqrt(s);
}

BoundaryTrace sample_psi(const ModeIndex& index, double mu, const TimeGrid& time, const AngularGrid& angular) {
    BoundaryTrace out(angular, time);
    const std::vector<complex> ang = angular_column(index, angular);
    for (std::size_t t = 0; t < time.n_steps; ++t) {
        const double c = std::cos(mu * time.time(t));
        for (std::size_t a = 0; a < angular.size(); ++a) out.at(t, a) = c * ang[a];
    }
    return out;
}

BoundaryTrace modal_trace(const ModalCoefficients& coeffs, std::span<const Mode> modes, const TimeGrid& time,
                          const AngularGrid& angular, double (*gain)(const RadialMode&)) {
    std::map<ModeIndex, const Mode*> lookup;
    for (const Mode& m : modes) {
        if (m.index.dimension != angular.dimension()) throw ShapeError("mode " + m.index.label() + " has the wrong dimension");
        lookup[m.index] = &m;
    }
    // time series per angular factor
    std::map<ModeIndex, std::vector<complex>> series;
    for (const auto& [index, value] : coeffs.entries) {
        auto it = lookup.find(index);
        if (it == lookup.end()) throw IndexError("no mode for coefficient " + index.label());
        if (value == complex{}) continue;
        const complex amp = value * gain(*it->second->radial);
        const double mu = it->second->mu();
        auto& s = series[angular_key(index)];
        if (s.empty()) s.assign(time.n_steps, complex{});
        for (std::size_t t = 0; t < time.n_steps; ++t) s[t] += amp * std::cos(mu * time.time(t));
    }
    BoundaryTrace out(angular, time);
    for (const auto& [key, s] : series) {
        const std::vector<complex> ang = angular_column(key, angular);
        for (std::size_t t = 0; t < time.n_steps; ++t)
            for (std::size_t a = 0; a < angular.size(); ++a) out.at(t, a) += s[t] * ang[a];
    }
    return out;
}

BoundaryTrace forward_spectral(const ModalCoefficients& coeffs, std::span<const Mode> modes, const TimeGrid& time,
                               const AngularGrid& angular) {
    return modal_trace(coeffs, modes, time, angular, boundary_gain);
}

double FdtdResult::energy_drift() const {
    if (energy.empty() || energy.front() == 0.0) return 0.0;
    double worst = 0.0;
    for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()));
    return worst / std::abs(energy.front());
}

namespace {

struct Channel {
    int l = 0;
    std::size_t dft_index = 0;
    double multiplicity = 1.0; // 2 when the mirrored -l channel is implied
    std::vector<double> re, im;
    bool has_re = false, has_im = false;
};

struct ChannelOutput {
    std::vector<complex> boundary;
    std::vector<double> energy;
};

struct RadialStepper {
    std::size_t first = 0; // first active cell
    std::vector<double> lower, upper, diag;
    std::vector<double> mass;       // r dr / c
    SymTridiag stiffness;           // K on the active cells
    double edge = 0.0;              // boundary extrapolation factor for the last cell
    double edge_laplacian = 0.0;    // 1 / (r_N dr)
};

RadialStepper make_stepper(const SoundSpeedProfile& profile, const RadialGrid& grid, int l, double dt) {
    const std::size_t n = grid.size();
    const DiscreteOperator op = assemble_discrete_operator(profile, l, grid, BoundaryCondition::Neumann, 2);
    RadialStepper s;
    const double al = std::abs(l);
    s.first = static_cast<std::size_t>(std::max(0.0, std::ceil(al / 2.0 - 0.5)));
    if (s.first >= n) s.first = n;
    const std::size_t m = n - s.first;
    s.lower.assign(m, 0.0);
    s.upper.assign(m, 0.0);
    s.diag.assign(m, 0.0);
    s.mass.assign(m, 0.0);
    s.stiffness.diag.assign(m, 0.0);
    s.stiffness.off.assign(m > 0 ? m - 1 : 0, 0.0);
    const double dt2 = dt * dt;
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = s.first + i;
        const double inv = 1.0 / op.weight[j];
        s.mass[i] = op.weight[j];
        s.stiffness.diag[i] = op.stiffness.diag[j];
        s.diag[i] = dt2 * inv * op.stiffness.diag[j];
        double g = inv * op.stiffness.diag[j];
        if (i > 0) {
            s.lower[i] = -dt2 * inv * op.stiffness.off[j - 1];
            g += std::sqrt(inv / op.weight[j - 1]) * std::abs(op.stiffness.off[j - 1]);
        }
        if (i + 1 < m) {
            s.upper[i] = -dt2 * inv * op.stiffness.off[j];
            s.stiffness.off[i] = op.stiffness.off[j];
            g += std::sqrt(inv / op.weight[j + 1]) * std::abs(op.stiffness.off[j]);
        }
        worst = std::max(worst, g);
    }
    if (dt2 * worst > 4.0)
        throw ConfigError("FDTD step " + std::to_string(dt) + " is unstable for angular order " + std::to_string(l) +
                          " (dt^2 * spectral bound = " + std::to_string(dt2 * worst) + " > 4)");
    const double h = 0.5 * grid.spacing();
    s.edge = 0.5 * h * h;
    s.edge_laplacian = 1.0 / (grid.node(n - 1) * grid.spacing());
    return s;
}

/// p(1) from the last cell: Taylor step with p_r(1) = 0 and p_rr(1) = l^2 p + Δ_l p.
double boundary_from(const RadialStepper& s, const std::vector<double>& p, int l) {
    const std::size_t m = s.mass.size();
    if (m == 0) return 0.0;
    const std::size_t last = m - 1;
    double kp = s.stiffness.diag[last] * p[last];
    if (last > 0) kp += s.stiffness.off[last - 1] * p[last - 1];
    const double lap = -kp * s.edge_laplacian;
    return p[last] - s.edge * (static_cast<double>(l) * l * p[last] + lap);
}

double staggered_energy(const RadialStepper& s, const std::vector<double>& next, const std::vector<double>& cur,
                        double dt) {
    const std::size_t m = s.mass.size();
    double kinetic = 0.0;
    double potential = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double v = (next[i] - cur[i]) / dt;
        kinetic += s.mass[i] * v * v;
        double kc = s.stiffness.diag[i] * cur[i];
        if (i > 0) kc += s.stiffness.off[i - 1] * cur[i - 1];
        if (i + 1 < m) kc += s.stiffness.off[i] * cur[i + 1];
        potential += next[i] * kc;
    }
    return 0.5 * (kinetic + potential);
}

/// Evolves one real radial profile; fills boundary values and energy at the record steps.
void evolve(const RadialStepper& s, std::vector<double> p0, int l, std::size_t stride, std::size_t n_records,
            double dt, std::vector<double>& boundary, std::vector<double>& energy) {
    const auto& kern = simd::kernels();
    const std::size_t m = s.mass.size();
    boundary.assign(n_records, 0.0);
    energy.assign(n_records, 0.0);
    if (m == 0) return;
    std::vector<double> prev(p0.begin() + static_cast<std::ptrdiff_t>(s.first), p0.end());
    std::vector<double> cur(m);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = -s.diag[i] * prev[i];
        if (i > 0) acc += s.lower[i] * prev[i - 1];
        if (i + 1 < m) acc += s.upper[i] * prev[i + 1];
        cur[i] = prev[i] + 0.5 * acc;
    }
    const std::size_t half = stride / 2;
    const std::size_t last_step = (n_records - 1) * stride + half;
    std::size_t record = 0;
    for (std::size_t step = 1; step <= last_step; ++step) {
        kern.leapfrog(prev.data(), cur.data(), s.lower.data(), s.upper.data(), s.diag.data(), m);
        // prev holds p^{step+1}, cur holds p^{step}
        if (step == record * stride + half) {
            boundary[record] = boundary_from(s, cur, l);
            energy[record] = staggered_energy(s, prev, cur, dt);
            if (!std::isfinite(energy[record]) || !std::isfinite(boundary[record]))
                throw DivergenceError("FDTD field became non-finite in angular order " + std::to_string(l) + " at step " +
                                          std::to_string(step),
                                      static_cast<long>(step));
            ++record;
        }
        prev.swap(cur);
    }
}

} // namespace

FdtdResult forward_fdtd_detailed(const GridFunction& f0, const SoundSpeedProfile& profile, const FdtdConfig& config,
                                 const TimeGrid& time) {
    if (f0.dimension() != 2) throw ConfigError("FDTD forward is 2D only");
    if (!(config.cfl > 0.0 && config.cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
    if (config.radial_cells != f0.radial().size() || config.angular_points != f0.angular().size())
        throw ShapeError("FDTD config grid " + std::to_string(config.radial_cells) + "x" +
                         std::to_string(config.angular_points) + " does not match the initial field");
    if (!(time.dt > 0.0) || time.n_steps == 0) throw ConfigError("time grid needs dt > 0 and at least one step");

    const RadialGrid& grid = f0.radial();
    const std::size_t n = grid.size();
    const std::size_t na = f0.angular().size();
    const double dt_max = config.cfl * grid.spacing() / std::sqrt(profile.c_max());
    std::size_t stride = static_cast<std::size_t>(std::ceil(time.dt / dt_max - 1e-12));
    stride = std::max<std::size_t>(2, stride + (stride % 2));
    const double dt = time.dt / static_cast<double>(stride);

    // ring-wise DFT: F_k(r_j) = (1/na) sum_a f(r_j, a) e^{-2 pi i k a / na}
    double max_abs = 0.0, max_im = 0.0;
    for (const complex& v : f0.samples()) {
        max_abs = std::max(max_abs, std::abs(v));
        max_im = std::max(max_im, std::abs(v.imag()));
    }
    const bool real_input = max_im <= 1e-14 * max_abs;
    std::vector<complex> twiddle(na);
    for (std::size_t a = 0; a < na; ++a) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(na);
        twiddle[a] = complex(std::cos(t), std::sin(t));
    }
    std::vector<Channel> channels;
    const std::size_t k_end = real_input ? na / 2 + 1 : na;
    for (std::size_t k = 0; k < k_end; ++k) {
        Channel ch;
        ch.dft_index = k;
        ch.l = k <= na / 2 ? static_cast<int>(k) : static_cast<int>(k) - static_cast<int>(na);
        ch.multiplicity = (real_input && k != 0 && 2 * k != na) ? 2.0 : 1.0;
        ch.re.assign(n, 0.0);
        ch.im.assign(n, 0.0);
        double peak = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            complex acc{};
            const auto ring = f0.ring(j);
            for (std::size_t a = 0; a < na; ++a) acc += ring[a] * std::conj(twiddle[(k * a) % na]);
            acc /= static_cast<double>(na);
            ch.re[j] = acc.real();
            ch.im[j] = acc.imag();
            peak = std::max(peak, std::abs(acc));
        }
        if (peak <= 1e-14 * std::max(max_abs, 1e-300)) continue;
        for (std::size_t j = 0; j < n; ++j) {
            ch.has_re = ch.has_re || ch.re[j] != 0.0;
            ch.has_im = ch.has_im || ch.im[j] != 0.0;
        }
        channels.push_back(std::move(ch));
    }

    std::vector<RadialStepper> steppers;
    steppers.reserve(channels.size());
    for (const Channel& ch : channels) steppers.push_back(make_stepper(profile, grid, ch.l, dt));

    const std::size_t n_records = time.n_steps;
    std::vector<ChannelOutput> outputs(channels.size());
    parallel_for(channels.size(), [&](std::size_t c) {
        const Channel& ch = channels[c];
        ChannelOutput& out = outputs[c];
        std::vector<double> b_re(n_records, 0.0), b_im(n_records, 0.0), e_re(n_records, 0.0), e_im(n_records, 0.0);
        if (ch.has_re) evolve(steppers[c], ch.re, ch.l, stride, n_records, dt, b_re, e_re);
        if (ch.has_im) evolve(steppers[c], ch.im, ch.l, stride, n_records, dt, b_im, e_im);
        out.boundary.resize(n_records);
        out.energy.resize(n_records);
        // Parseval over the circle: ∫|f|^2 dθ = 2π Σ_l |F_l|^2
        const double scale = 2.0 * std::numbers::pi * ch.multiplicity;
        for (std::size_t t = 0; t < n_records; ++t) {
            out.boundary[t] = complex(b_re[t], b_im[t]);
            out.energy[t] = scale * (e_re[t] + e_im[t]);
        }
    });

    FdtdResult result{BoundaryTrace(f0.angular(), time), std::vector<double>(n_records, 0.0), dt,
                      (n_records - 1) * stride + stride / 2, channels.size()};
    for (std::size_t c = 0; c < channels.size(); ++c) {
        const Channel& ch = channels[c];
        const bool mirror = ch.multiplicity == 2.0;
        for (std::size_t t = 0; t < n_records; ++t) {
            result.energy[t] += outputs[c].energy[t];
            const complex b = outputs[c].boundary[t];
            for (std::size_t a = 0; a < na; ++a) {
                const complex e = twiddle[(ch.dft_index * a) % na];
                result.trace.at(t, a) += mirror ? 2.0 * (b * e).real() : b * e;
            }
        }
    }
    return result;
}

BoundaryTrace forward_fdtd(const GridFunction& f0, const SoundSpeedProfile& profile, const FdtdConfig& config,
                           const TimeGrid& time) {
    return forward_fdtd_detailed(f0, profile, config, time).trace;
}

complex h_inner_product(const BoundaryTrace& u, const BoundaryTrace& v) {
    if (!u.same_grid(v)) throw ShapeError("H inner product of traces on different grids");
    const std::size_t na = u.angular().size();
    std::vector<complex> vw(v.samples().size());
    for (std::size_t t = 0; t < u.n_steps(); ++t)
        for (std::size_t a = 0; a < na; ++a) vw[t * na + a] = v.at(t, a) * u.angular().weight(a);
    const complex s = simd::kernels().cdot(u.samples().data(), vw.data(), vw.size());
    return s * (2.0 / static_cast<double>(u.n_steps()));
}

double cosine_pair_average(double a, double b, double horizon) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    auto sinc_integral = [horizon](double x) {
        const double xa = x * horizon;
        if (std::abs(xa) < 1e-6) return horizon * (1.0 - xa * xa / 6.0);
        return std::sin(xa) / x;
    };
    return (sinc_integral(a - b) + sinc_integral(a + b)) / horizon;
}

} // namespace patsvd
