#include <cmath>
#include <set>
#include <sstream>

#include "patsvd/error.hpp"
#include "patsvd/io.hpp"
#include "patsvd/lab.hpp"

namespace patsvd {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& spec) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("bad number '" + s + "' in profile spec '" + spec + "'");
    return v;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    std::set<std::string> names(known.begin(), known.end());
    for (const auto& item : j.items())
        if (!names.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace

SoundSpeedProfile make_profile(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    std::vector<double> args;
    if (head != "table" && colon != std::string::npos)
        for (const std::string& part : split(rest, ':')) args.push_back(parse_number(part, spec));

    if (head == "const") {
        if (args.size() != 1) throw ConfigError("profile 'const' takes one value, e.g. const:1");
        return SoundSpeedProfile::constant(args[0]);
    }
    if (head == "c1") {
        if (args.size() > 1) throw ConfigError("profile 'c1' takes at most a scale, e.g. c1:3");
        return SoundSpeedProfile::rational(args.empty() ? 1.0 : args[0]);
    }
    if (head == "c2") {
        if (args.empty()) return SoundSpeedProfile::annulus(0.3, 0.6);
        if (args.size() == 2) return SoundSpeedProfile::annulus(args[0], args[1]);
        if (args.size() == 4) return SoundSpeedProfile::annulus(args[0], args[1], args[2], args[3]);
        throw ConfigError("profile 'c2' takes inner:outer or inner:outer:inside:outside");
    }
    if (head == "table") {
        std::vector<double> radii, values;
        for (const std::string& pair : split(rest, ',')) {
            const auto slash = pair.find('/');
            if (slash == std::string::npos) throw ConfigError("table entries are r/value, got '" + pair + "'");
            radii.push_back(parse_number(pair.substr(0, slash), spec));
            values.push_back(parse_number(pair.substr(slash + 1), spec));
        }
        return SoundSpeedProfile::tabulated(std::move(radii), std::move(values));
    }
    throw ConfigError("unknown profile preset '" + spec + "' (known: c1, c2, const:<v>, table:...)");
}

std::string to_string(PhantomKind kind) {
    switch (kind) {
    case PhantomKind::GaussianBump: return "gaussian-bump";
    case PhantomKind::Disk: return "disk";
    case PhantomKind::Ring: return "ring";
    case PhantomKind::ModeCombination: return "mode-combination";
    }
    return "?";
}

PhantomKind parse_phantom_kind(const std::string& s) {
    for (PhantomKind k : {PhantomKind::GaussianBump, PhantomKind::Disk, PhantomKind::Ring, PhantomKind::ModeCombination})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown phantom kind '" + s + "'");
}

double PhantomSpec::support_radius() const {
    double r = 0.0;
    for (const PhantomFeature& f : features) {
        double c = 0.0;
        for (double x : f.center) c += x * x;
        c = std::sqrt(c);
        double extent = f.size;
        if (kind == PhantomKind::GaussianBump) extent = 3.0 * f.size;
        if (kind == PhantomKind::Ring) extent = f.size + 0.5 * f.width;
        r = std::max(r, c + extent);
    }
    return r;
}

void validate_phantom(const PhantomSpec& spec, int dimension) {
    if (spec.kind == PhantomKind::ModeCombination) {
        for (const auto& [i, v] : spec.coefficients.entries)
            if (i.dimension != dimension) throw ConfigError("phantom coefficient " + i.label() + " has the wrong dimension");
        return;
    }
    for (const PhantomFeature& f : spec.features) {
        if (f.center.size() != static_cast<std::size_t>(dimension))
            throw ConfigError("phantom centre needs " + std::to_string(dimension) + " coordinates");
        if (!(f.size > 0.0)) throw ConfigError("phantom feature size must be positive");
        if (spec.kind == PhantomKind::Ring && !(f.width > 0.0 && f.width < 2.0 * f.size))
            throw ConfigError("ring width must lie in (0, 2 * radius)");
    }
    const double r = spec.support_radius();
    if (!(r < 1.0))
        throw ConfigError("phantom support reaches radius " + std::to_string(r) + "; it must stay inside the unit ball");
}

GridFunction make_phantom(const PhantomSpec& spec, const RadialGrid& radial, const AngularGrid& angular,
                          std::span<const Mode> modes) {
    const int dim = angular.dimension();
    validate_phantom(spec, dim);
    if (spec.kind == PhantomKind::ModeCombination) return synthesize(spec.coefficients, modes, radial, angular);
    GridFunction g(radial, angular);
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (std::size_t j = 0; j < radial.size(); ++j) {
        const double r = radial.node(j);
        for (std::size_t a = 0; a < angular.size(); ++a) {
            const double az = angular.azimuth(a);
            if (dim == 2) {
                x[0] = r * std::cos(az);
                x[1] = r * std::sin(az);
            } else {
                const double th = angular.colatitude(a);
                x[0] = r * std::sin(th) * std::cos(az);
                x[1] = r * std::sin(th) * std::sin(az);
                x[2] = r * std::cos(th);
            }
            double v = 0.0;
            for (const PhantomFeature& f : spec.features) {
                const double d = dist(x, f.center);
                switch (spec.kind) {
                case PhantomKind::GaussianBump: v += f.amplitude * std::exp(-d * d / (f.size * f.size)); break;
                case PhantomKind::Disk: v += d <= f.size ? f.amplitude : 0.0; break;
                case PhantomKind::Ring: v += std::abs(d - f.size) <= 0.5 * f.width ? f.amplitude : 0.0; break;
                case PhantomKind::ModeCombination: break;
                }
            }
            g.at(j, a) = v;
        }
    }
    return g;
}

json RunConfig::to_json() const {
    json features = json::array();
    for (const PhantomFeature& f : phantom.features)
        features.push_back({{"center", f.center}, {"size", f.size}, {"width", f.width}, {"amplitude", f.amplitude}});
    json modes{{"count", mode_count}};
    if (mu_max) modes["mu_max"] = *mu_max;
    if (l_max) modes["l_max"] = *l_max;
    if (k_max) modes["k_max"] = *k_max;
    return json{
        {"profile", profile},
        {"phantom",
         {{"kind", to_string(phantom.kind)}, {"features", features}, {"coefficients", io::to_json(phantom.coefficients)}}},
        {"dimension", dimension},
        {"modes", modes},
        {"grid", {{"radial_cells", radial_cells}, {"angular_points", angular_points}, {"colatitude_points", colatitude_points}}},
        {"time", {{"horizon", horizon}, {"dt", dt}, {"cfl", cfl}}},
        {"bc", patsvd::to_string(bc)},
        {"data", data},
        {"method", method},
        {"regularization", regularization},
        {"noise", noise},
        {"seed", seed},
        {"image_size", image_size},
        {"output", output},
    };
}

RunConfig RunConfig::from_json(const json& j) {
    reject_unknown(j,
                   {"profile", "phantom", "dimension", "modes", "grid", "time", "bc", "data", "method", "regularization",
                    "noise", "seed", "image_size", "output"},
                   "config");
    RunConfig c;
    c.profile = get_or(j, "profile", c.profile);
    c.dimension = get_or(j, "dimension", c.dimension);
    if (j.contains("phantom")) {
        const json& p = j.at("phantom");
        reject_unknown(p, {"kind", "features", "coefficients"}, "phantom");
        c.phantom.kind = parse_phantom_kind(get_or<std::string>(p, "kind", "gaussian-bump"));
        c.phantom.features.clear();
        for (const json& f : p.value("features", json::array())) {
            reject_unknown(f, {"center", "size", "width", "amplitude"}, "phantom feature");
            PhantomFeature pf;
            pf.center = get_or(f, "center", pf.center);
            pf.size = get_or(f, "size", pf.size);
            pf.width = get_or(f, "width", pf.width);
            pf.amplitude = get_or(f, "amplitude", pf.amplitude);
            c.phantom.features.push_back(std::move(pf));
        }
        if (p.contains("coefficients")) c.phantom.coefficients = io::coefficients_from_json(p.at("coefficients"));
    }
    if (j.contains("modes")) {
        const json& m = j.at("modes");
        reject_unknown(m, {"count", "mu_max", "l_max", "k_max"}, "modes");
        c.mode_count = get_or(m, "count", c.mode_count);
        if (m.contains("mu_max")) c.mu_max = get_or(m, "mu_max", 0.0);
        if (m.contains("l_max")) c.l_max = get_or(m, "l_max", 0);
        if (m.contains("k_max")) c.k_max = get_or(m, "k_max", 0);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, {"radial_cells", "angular_points", "colatitude_points"}, "grid");
        c.radial_cells = get_or(g, "radial_cells", c.radial_cells);
        c.angular_points = get_or(g, "angular_points", c.angular_points);
        c.colatitude_points = get_or(g, "colatitude_points", c.colatitude_points);
    }
    if (j.contains("time")) {
        const json& t = j.at("time");
        reject_unknown(t, {"horizon", "dt", "cfl"}, "time");
        c.horizon = get_or(t, "horizon", c.horizon);
        c.dt = get_or(t, "dt", c.dt);
        c.cfl = get_or(t, "cfl", c.cfl);
    }
    if (j.contains("bc")) c.bc = parse_boundary_condition(get_or<std::string>(j, "bc", "neumann"));
    c.data = get_or(j, "data", c.data);
    c.method = get_or(j, "method", c.method);
    c.regularization = get_or(j, "regularization", c.regularization);
    c.noise = get_or(j, "noise", c.noise);
    c.seed = get_or(j, "seed", c.seed);
    c.image_size = get_or(j, "image_size", c.image_size);
    c.output = get_or(j, "output", c.output);
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    RunConfig c = from_json(io::read_json(path));
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (dimension != 2 && dimension != 3) throw ConfigError("dimension must be 2 or 3");
    make_profile(profile);
    validate_phantom(phantom, dimension);
    if (phantom.kind != PhantomKind::ModeCombination && phantom.features.empty())
        throw ConfigError("phantom needs at least one feature");
    if (data != "fdtd" && data != "spectral") throw ConfigError("data must be 'fdtd' or 'spectral'");
    if (data == "fdtd" && dimension == 3) throw ConfigError("FDTD data is 2D only; use data = spectral in 3D");
    if (data == "fdtd" && bc == BoundaryCondition::Dirichlet)
        throw ConfigError("FDTD data uses the Neumann boundary; use data = spectral with Dirichlet");
    if (method != "direct" && method != "lsq") throw ConfigError("method must be 'direct' or 'lsq'");
    if (!(regularization >= 0.0)) throw ConfigError("regularization must be non-negative");
    if (!(noise >= 0.0)) throw ConfigError("noise must be non-negative");
    if (radial_cells < 8) throw ConfigError("radial grid needs at least 8 cells");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(dt >= 0.0) || dt > horizon) throw ConfigError("dt must lie in [0, horizon]");
    if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
    if (mu_max && !(*mu_max > 0.0)) throw ConfigError("mu_max must be positive");
    if (l_max.has_value() != k_max.has_value()) throw ConfigError("l_max and k_max go together");
    if (l_max && (*l_max < 0 || *k_max < 1)) throw ConfigError("need l_max >= 0 and k_max >= 1");
    if (!mu_max && !l_max && mode_count == 0) throw ConfigError("mode count must be positive");
    if (image_size < 2) throw ConfigError("image size must be at least 2");
    if (output.empty()) throw ConfigError("output directory must be set");
}

RunConfig preset_config(const std::string& name) {
    RunConfig c;
    c.phantom.kind = PhantomKind::GaussianBump;
    c.phantom.features = {{{0.3, 0.1}, 0.2, 0.05, 1.0}, {{-0.35, -0.25}, 0.12, 0.05, 0.6}};
    if (name == "desk" || name == "default") return c;
    if (name == "paper-scale") {
        // radius-3 experiments mapped to the unit ball: lengths and times divide by 3
        c.profile = "c1:3";
        c.mode_count = 1473;
        c.horizon = 800.0 / 3.0;
        c.dt = 0.0016 / 3.0;
        c.radial_cells = 1024;
        return c;
    }
    throw ConfigError("unknown preset '" + name + "' (known: desk, paper-scale)");
}

double relative_weighted_error(const GridFunction& a, const GridFunction& b, const SoundSpeedProfile& profile) {
    GridFunction d = a;
    d -= b;
    const double den = weighted_inner_product(b, b, profile).real();
    const double num = weighted_inner_product(d, d, profile).real();
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_l2_error(const GridFunction& a, const GridFunction& b) {
    return relative_weighted_error(a, b, SoundSpeedProfile::constant(1.0));
}

} // namespace patsvd
