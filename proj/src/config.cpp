#include "efie/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace efie {

Mode parse_mode(const std::string& name) {
    if (name == "solve") return Mode::solve;
    if (name == "estimate") return Mode::estimate;
    if (name == "uniform-study") return Mode::uniform_study;
    if (name == "adapt") return Mode::adapt;
    throw InputError("mode: unknown mode '" + name + "' (expected solve, estimate, uniform-study or adapt)");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::solve: return "solve";
        case Mode::estimate: return "estimate";
        case Mode::uniform_study: return "uniform-study";
        case Mode::adapt: return "adapt";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

double to_real(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
        throw InputError(key + ": expected a finite number, got '" + s + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
        throw InputError(key + ": expected an integer, got '" + s + "'");
    return v;
}

Vec3 to_vec3(const std::string& key, const std::string& text) {
    std::string s = trim(text);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw InputError(key + ": unbalanced '['");
        s = s.substr(1, s.size() - 2);
    }
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (parts.size() != 3) throw InputError(key + ": expected three comma-separated components");
    return Vec3(to_real(key, parts[0]), to_real(key, parts[1]), to_real(key, parts[2]));
}

}  // namespace

void set_field(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = unquote(trim(raw));
    if (key == "geometry") c.geometry = value;
    else if (key == "scale") c.scale = to_real(key, value);
    else if (key == "initial_refinements") c.initial_refinements = to_int(key, value);
    else if (key == "k") c.k = to_real(key, value);
    else if (key == "polarization") c.polarization = to_vec3(key, value);
    else if (key == "polarization_imag") c.polarization_imag = to_vec3(key, value);
    else if (key == "direction") c.direction = to_vec3(key, value);
    else if (key == "panel_order") c.orders.panel = to_int(key, value);
    else if (key == "far_order") c.orders.far = to_int(key, value);
    else if (key == "residual_order") c.orders.residual = to_int(key, value);
    else if (key == "rhs_order") c.orders.rhs = to_int(key, value);
    else if (key == "near_factor") c.near_factor = to_real(key, value);
    else if (key == "mode") c.mode = parse_mode(value);
    else if (key == "theta") c.theta = to_real(key, value);
    else if (key == "levels") c.levels = to_int(key, value);
    else if (key == "max_iters") c.max_iters = to_int(key, value);
    else if (key == "max_dofs") c.max_dofs = to_int(key, value);
    else if (key == "out") c.out = value;
    else if (key == "threads") c.threads = to_int(key, value);
    else throw InputError(key + ": unknown configuration key");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // '#' inside quotes is kept
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw InputError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw InputError(where + "missing key");
        try {
            set_field(cfg, key, line.substr(eq + 1));
        } catch (const InputError& e) {
            throw InputError(where + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config: cannot open '" + path + "'");
    return parse_config(in, path);
}

IncidentWave RunConfig::wave() const {
    IncidentWave w;
    w.p = polarization.cast<cplx>() + cplx(0, 1) * polarization_imag.cast<cplx>();
    w.d = direction;
    w.k = k;
    return w;
}

AdaptConfig RunConfig::adapt_config() const {
    AdaptConfig a;
    a.theta = theta;
    a.max_iters = max_iters;
    a.max_dofs = max_dofs;
    a.wave = wave();
    a.orders = orders;
    a.eval.near_factor = near_factor;
    a.threads = threads;
    return a;
}

void RunConfig::validate() const {
    if (geometry.empty()) throw InputError("geometry: must not be empty");
    if (!(scale > 0.0)) throw InputError("scale: must be positive");
    if (initial_refinements < 0 || initial_refinements > 6) throw InputError("initial_refinements: must be in 0..6");
    if (!(k >= 0.0)) throw InputError("k: wavenumber must be finite and nonnegative");
    if (orders.panel < 1 || orders.panel > 40) throw InputError("panel_order: must be in 1..40");
    if (orders.far < 1 || orders.far > 20) throw InputError("far_order: must be in 1..20");
    if (orders.residual < 1 || orders.residual > 20) throw InputError("residual_order: must be in 1..20");
    if (orders.rhs < 1 || orders.rhs > 20) throw InputError("rhs_order: must be in 1..20");
    if (!(near_factor >= 0.0)) throw InputError("near_factor: must be nonnegative");
    if (!(theta > 0.0 && theta <= 1.0)) throw InputError("theta: must lie in (0, 1]");
    if (levels < 1) throw InputError("levels: must be at least 1");
    if (max_iters < 0) throw InputError("max_iters: must be nonnegative");
    if (max_dofs <= 0) throw InputError("max_dofs: must be positive");
    if (out.empty()) throw InputError("out: must not be empty");
    if (threads < 1) throw InputError("threads: must be at least 1");
    wave().validate();
}

nlohmann::json RunConfig::to_json() const {
    auto vec = [](const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); };
    return {
        {"geometry", geometry},
        {"scale", scale},
        {"initial_refinements", initial_refinements},
        {"k", k},
        {"polarization", vec(polarization)},
        {"polarization_imag", vec(polarization_imag)},
        {"direction", vec(direction)},
        {"panel_order", orders.panel},
        {"far_order", orders.far},
        {"residual_order", orders.residual},
        {"rhs_order", orders.rhs},
        {"near_factor", near_factor},
        {"mode", to_string(mode)},
        {"theta", theta},
        {"levels", levels},
        {"max_iters", max_iters},
        {"max_dofs", max_dofs},
        {"out", out},
        {"threads", threads},
    };
}

}  // namespace efie
