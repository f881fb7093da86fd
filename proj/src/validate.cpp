#include <cmath>
#include <random>

#include "patsvd/error.hpp"
#include "patsvd/lab.hpp"
#include "patsvd/radial_eigensolver.hpp"
#include "patsvd/wave_forward.hpp"

namespace patsvd {

namespace {

void check(ValidationReport& rep, std::string name, double measured, double tolerance) {
    rep.checks.push_back({std::move(name), measured, tolerance, measured <= tolerance});
}

void suite_classify(ValidationReport& rep) {
    for (int dim : {2, 3})
        for (int l = 0; l <= 4; ++l) {
            const EndpointClass want = l == 0 ? EndpointClass::LimitCircle : EndpointClass::LimitPoint;
            check(rep, "classify dim=" + std::to_string(dim) + " l=" + std::to_string(l),
                  classify_origin(dim, l) == want ? 0.0 : 1.0, 0.0);
        }
}

void suite_bessel(ValidationReport& rep) {
    const auto c = SoundSpeedProfile::constant(1.0);
    const RadialGrid grid(4096);
    auto compare = [&](int dim, BoundaryCondition bc, int l, std::size_t count) {
        const auto modes = solve_radial_modes(c, l, count, grid, bc, dim);
        const auto ref = bessel_reference_frequencies(1.0, l, count, bc, dim);
        for (std::size_t k = 0; k < count; ++k) {
            const double err = ref[k] == 0.0 ? modes[k].mu : std::abs(modes[k].mu - ref[k]) / ref[k];
            check(rep,
                  "dim=" + std::to_string(dim) + " " + to_string(bc) + " l=" + std::to_string(l) +
                      " k=" + std::to_string(k + 1) + " mu",
                  err, 1e-4);
        }
    };
    for (int l = 0; l <= 2; ++l) compare(2, BoundaryCondition::Neumann, l, 8);
    compare(2, BoundaryCondition::Dirichlet, 0, 2);
    compare(3, BoundaryCondition::Neumann, 0, 2);
    const std::size_t sizes[] = {512, 1024, 2048};
    for (const ConvergenceEstimate& e : convergence_order(c, 0, BoundaryCondition::Neumann, 2, sizes, 4))
        if (e.order) check(rep, "order k=" + std::to_string(e.k), std::abs(*e.order - 2.0), 0.2);
}

void suite_gram(ValidationReport& rep) {
    const auto prof = make_profile("c1");
    const RadialGrid grid(2048);
    const auto modes = lowest_modes(prof, grid, BoundaryCondition::Neumann, 2, 200);
    const auto g = gram_matrix(modes, prof);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(g[i][j] - (i == j ? 1.0 : 0.0)));
    check(rep, "max |G - I| (200 modes, c1)", worst, 1e-6);
}

void suite_prop1(ValidationReport& rep) {
    const double a = 3.83171, b = 7.01559, horizon = 200.0;
    check(rep, "closed-form off-diagonal", std::abs(cosine_pair_average(a, b, horizon)), 2.0 / ((b - a) * horizon));
    check(rep, "closed-form diagonal", std::abs(cosine_pair_average(a, a, horizon) - 1.0), 1.0 / (2.0 * horizon * a));
    const TimeGrid t = TimeGrid::for_horizon(horizon, b);
    const AngularGrid ang = AngularGrid::circle(8);
    const BoundaryTrace pa = sample_psi(ModeIndex::planar(1, 1), a, t, ang);
    const BoundaryTrace pb = sample_psi(ModeIndex::planar(1, 2), b, t, ang);
    check(rep, "sampled off-diagonal", std::abs(h_inner_product(pa, pb)), 2.0 / ((b - a) * horizon));
    check(rep, "sampled diagonal", std::abs(h_inner_product(pa, pa) - 1.0), 1.0 / (2.0 * horizon * a));
    const BoundaryTrace p0 = sample_psi(ModeIndex::planar(0, 1), a, t, ang);
    check(rep, "angular orthogonality", std::abs(h_inner_product(p0, pa)), 1e-14);
    for (double A : {50.0, 100.0, 400.0})
        for (double x : {1.0, 2.5, 6.0})
            for (double y : {1.7, 4.0, 9.0}) {
                if (x == y) continue;
                const double c = std::max(1.0 / (2.0 * std::min(x, y)), 2.0 / std::abs(x - y));
                check(rep, "C/A bound A=" + std::to_string(static_cast<int>(A)),
                      std::abs(cosine_pair_average(x, y, A)), c / A);
            }
}

void suite_crossfdtd(ValidationReport& rep) {
    const auto prof = SoundSpeedProfile::constant(1.0);
    const RadialGrid grid(512);
    const AngularGrid ang = AngularGrid::circle(8);
    const auto modes = enumerate_modes_rect(prof, grid, BoundaryCondition::Neumann, 2, 0, 2);
    const Mode& m = modes[1];
    const TimeGrid t = TimeGrid::for_horizon(20.0, m.mu());
    const FdtdResult r = forward_fdtd_detailed(sample_mode(m, grid, ang), prof, {512, 8, 0.45}, t);
    ModalCoefficients x;
    x.entries[m.index] = 1.0;
    const Mode one[] = {m};
    BoundaryTrace diff = r.trace;
    const BoundaryTrace spectral = forward_spectral(x, one, t, ang);
    diff -= spectral;
    check(rep, "FDTD vs spectral relative L2", l2_norm(diff) / l2_norm(spectral), 0.02);
    check(rep, "FDTD energy drift", r.energy_drift(), 0.005);
}

void suite_dirichlet(ValidationReport& rep) {
    const auto prof = SoundSpeedProfile::constant(1.0);
    const RadialGrid grid(1024);
    const auto modes = lowest_modes(prof, grid, BoundaryCondition::Dirichlet, 2, 50);
    const auto triples = make_triples(modes);
    double mu_max = 0.0;
    for (const Mode& m : modes) mu_max = std::max(mu_max, m.mu());
    const AngularGrid ang = angular_grid_for(modes);
    const TimeGrid t = TimeGrid::for_horizon(200.0, mu_max);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ModalCoefficients x;
    for (const Mode& m : modes) x.entries[m.index] = complex(u(rng), u(rng));
    const BoundaryTrace data = dirichlet_forward_trace(x, triples, t, ang);
    const double bound = crosstalk_bound(triples, t.horizon()) * x.l1_norm();
    double worst = 0.0;
    for (const SvdTriple& tr : triples) worst = std::max(worst, std::abs(dirichlet_recover(data, tr) - x.get(tr.mode.index)));
    check(rep, "Dirichlet round trip (50 modes, A=200)", worst, bound);
    const auto first = solve_radial_modes(prof, 0, 1, grid, BoundaryCondition::Dirichlet, 2);
    const double ref = bessel_reference_frequencies(1.0, 0, 1, BoundaryCondition::Dirichlet, 2)[0];
    check(rep, "Dirichlet mu_1 vs first zero of J0", std::abs(first[0].mu - ref) / ref, 1e-4);
}

} // namespace

bool ValidationReport::passed() const {
    for (const ValidationCheck& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

std::vector<std::string> validation_suites() { return {"bessel", "gram", "prop1", "crossfdtd", "dirichlet", "classify"}; }

ValidationReport validate_suite(const std::string& suite) {
    ValidationReport rep;
    rep.suite = suite;
    if (suite == "classify") suite_classify(rep);
    else if (suite == "bessel") suite_bessel(rep);
    else if (suite == "gram") suite_gram(rep);
    else if (suite == "prop1") suite_prop1(rep);
    else if (suite == "crossfdtd") suite_crossfdtd(rep);
    else if (suite == "dirichlet") suite_dirichlet(rep);
    else throw ConfigError("unknown validation suite '" + suite + "'");
    return rep;
}

} // namespace patsvd
