#include "emubench/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

#include "emubench/error.hpp"
#include "emubench/operators.hpp"
#include "emubench/parallel.hpp"
#include "emubench/rng.hpp"

namespace emubench {
namespace {

using Mode = InterfaceMode;

constexpr int kLinearOrders = 5;

// Rows whose linear part is a plain coefficient list and whose nonlinear
// part (if any) is one entry of the difficulty table.
struct GenericRow {
    std::string_view name;
    std::array<double, kLinearOrders> gammas;
    std::string_view component;  // empty for linear rows
    double delta;
    int warmup;
};

constexpr GenericRow kGenericRows[] = {
    {"adv", {0, -4, 0, 0, 0}, "", 0, 0},
    {"diff", {0, 0, 4, 0, 0}, "", 0, 0},
    {"adv_diff", {0, -4, 4, 0, 0}, "", 0, 0},
    {"disp", {0, 0, 0, 4, 0}, "", 0, 0},
    {"hyp", {0, 0, 0, 0, -4}, "", 0, 0},
    {"burgers", {0, 0, 1.5, 0, 0}, kConv, -1.5, 0},
    {"burgers_sc", {0, 0, 1.5, 0, 0}, kConvSc, -1.5, 0},
    {"kdv", {0, 0, 0, -14, -9}, kConvSc, -2, 0},
    {"ks_cons", {0, 0, -2, 0, -18}, kConv, -1, 500},
    {"ks", {0, 0, -1.2, 0, -15}, kGradNorm, -6, 500},
    {"fisher", {0.02, 0, 0.2, 0, 0}, kQuad, -0.02, 0},
};

const GenericRow* find_generic(std::string_view name) {
    for (const auto& row : kGenericRows) {
        if (row.name == name) return &row;
    }
    return nullptr;
}

int default_points(int num_dims) { return num_dims == 3 ? 32 : 160; }

// Physical-mode defaults of the generic rows reproduce the difficulty
// defaults at the default resolution on L = 1 with this step.
constexpr double kGenericPhysicalDt = 0.1;

std::string key_index(std::string_view base, int j) { return std::string(base) + std::to_string(j); }

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("invalid number for '" + key + "': " + value);
    }
    if (pos != value.size()) throw ConfigError("invalid number for '" + key + "': " + value);
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("expected an integer for '" + key + "': " + value);
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError("expected a boolean for '" + key + "': " + value);
}

std::map<std::string, double> generic_defaults(const GenericRow& row, Mode mode, int num_dims) {
    std::map<std::string, double> p;
    DifficultyCoefficients diff;
    diff.gammas.assign(row.gammas.begin(), row.gammas.end());
    if (!row.component.empty()) diff.deltas[std::string(row.component)] = row.delta;
    diff.num_points = default_points(num_dims);
    diff.num_dims = num_dims;
    diff.max_abs = 1.0;

    if (mode == Mode::difficulty) {
        for (int j = 0; j < kLinearOrders; ++j) p[key_index("gamma", j)] = diff.gammas[static_cast<std::size_t>(j)];
        for (const auto& [k, v] : diff.deltas) p["delta_" + k] = v;
        p["m"] = diff.max_abs;
        return p;
    }
    const auto norm = difficulty_to_normalized(diff);
    if (mode == Mode::normalized) {
        for (int j = 0; j < kLinearOrders; ++j) p[key_index("alpha", j)] = norm.alphas[static_cast<std::size_t>(j)];
        for (const auto& [k, v] : norm.betas) p["beta_" + k] = v;
        return p;
    }
    // a_j = alpha_j L^j / dt with L = 1.
    p["L"] = 1.0;
    p["dt"] = kGenericPhysicalDt;
    for (int j = 0; j < kLinearOrders; ++j) {
        p[key_index("a", j)] = norm.alphas[static_cast<std::size_t>(j)] / kGenericPhysicalDt;
    }
    for (const auto& [k, v] : norm.betas) p["b_" + k] = v / kGenericPhysicalDt;
    return p;
}

std::map<std::string, double> physical_defaults(std::string_view name, int num_dims) {
    const bool three = num_dims == 3;
    if (name == "unbal_adv") {
        std::map<std::string, double> p{{"L", 1.0}, {"dt", 0.1}, {"c0", 0.01}, {"c1", -0.04}};
        if (three) p["c2"] = 0.005;
        return p;
    }
    if (name == "diag_diff") {
        std::map<std::string, double> p{{"L", 1.0}, {"dt", 0.1}, {"nu0", 0.001}, {"nu1", 0.002}};
        if (three) p["nu2"] = 0.0004;
        return p;
    }
    if (name == "aniso_diff") {
        std::map<std::string, double> p{{"L", 1.0}, {"dt", 0.1}};
        const double a2[3][3] = {{0.001, 0.0005, 0.0}, {0.0005, 0.002, 0.0}, {0.0, 0.0, 0.0004}};
        for (int i = 0; i < num_dims; ++i) {
            for (int j = 0; j < num_dims; ++j) p["A" + std::to_string(i) + std::to_string(j)] = a2[i][j];
        }
        return p;
    }
    if (name == "mix_disp") return {{"L", 1.0}, {"dt", 0.001}, {"xi", 0.00025}};
    // The table's zeta = -0.000075 would make -zeta * Laplacian^2 grow
    // without bound; the damping sign is used instead.
    if (name == "mix_hyp") return {{"L", 1.0}, {"dt", 0.00001}, {"zeta", 0.000075}};
    if (name == "gs") {
        return {{"L", 1.0}, {"dt", 10.0}, {"nu0", 2e-5}, {"nu1", 1e-5}, {"feed", 0.04}, {"kill", 0.06}};
    }
    if (name == "gs_type") {
        const auto rates = gray_scott_type("theta");
        return {{"L", 2.5}, {"dt", 20.0}, {"nu0", 2e-5}, {"nu1", 1e-5}, {"feed", rates.feed}, {"kill", rates.kill}};
    }
    if (name == "sh") return {{"L", 10.0 * std::numbers::pi}, {"dt", 0.1}, {"r", 0.7}, {"k", 1.0}};
    if (name == "decay_turb") return {{"L", 1.0}, {"dt", 0.1}, {"nu", 1e-4}, {"b", 1.0}};
    if (name == "kolm_flow") {
        return {{"L", 2.0 * std::numbers::pi}, {"dt", 0.1}, {"drag", -0.1}, {"k", 4.0}, {"re", 100.0}, {"b", 1.0}};
    }
    throw ConfigError("unknown scenario: " + std::string(name));
}

// The table row that owns a dynamic name ("gs_type" belongs to "gs").
std::string_view row_of(std::string_view dynamic) { return dynamic == "gs_type" ? "gs" : dynamic; }

}  // namespace

std::string_view mode_prefix(InterfaceMode mode) {
    switch (mode) {
        case Mode::difficulty: return "diff";
        case Mode::normalized: return "norm";
        case Mode::physical: return "phy";
    }
    return "diff";
}

std::string_view split_name(Split split) { return split == Split::train ? "train" : "test"; }

int nonlinear_order(std::string_view component) {
    if (component == kQuad) return 0;
    if (component == kConv || component == kConvSc) return 1;
    if (component == kGradNorm) return 2;
    throw ConfigError("unknown nonlinear component: " + std::string(component));
}

NormalizedCoefficients difficulty_to_normalized(const DifficultyCoefficients& diff) {
    if (diff.num_points < 1 || diff.num_dims < 1) throw ConfigError("difficulty conversion needs N and D");
    if (!(diff.max_abs > 0.0)) throw ConfigError("max_abs must be positive");
    NormalizedCoefficients norm;
    const double n = diff.num_points;
    const double d = diff.num_dims;
    for (std::size_t j = 0; j < diff.gammas.size(); ++j) {
        const double jj = static_cast<double>(j);
        norm.alphas.push_back(diff.gammas[j] / (std::pow(n, jj) * std::pow(2.0, jj - 1.0) * d));
    }
    for (const auto& [k, delta] : diff.deltas) {
        norm.betas[k] = delta / (std::pow(n, nonlinear_order(k)) * d * diff.max_abs);
    }
    return norm;
}

DifficultyCoefficients normalized_to_difficulty(const NormalizedCoefficients& norm, int num_points, int num_dims,
                                                double max_abs) {
    if (num_points < 1 || num_dims < 1) throw ConfigError("difficulty conversion needs N and D");
    if (!(max_abs > 0.0)) throw ConfigError("max_abs must be positive");
    DifficultyCoefficients diff;
    diff.num_points = num_points;
    diff.num_dims = num_dims;
    diff.max_abs = max_abs;
    const double n = num_points;
    const double d = num_dims;
    for (std::size_t j = 0; j < norm.alphas.size(); ++j) {
        const double jj = static_cast<double>(j);
        diff.gammas.push_back(norm.alphas[j] * std::pow(n, jj) * std::pow(2.0, jj - 1.0) * d);
    }
    for (const auto& [k, beta] : norm.betas) diff.deltas[k] = beta * std::pow(n, nonlinear_order(k)) * d * max_abs;
    return diff;
}

const std::vector<DynamicInfo>& dynamics_table() {
    static const std::vector<DynamicInfo> table = [] {
        const std::vector<Mode> generic{Mode::difficulty, Mode::normalized, Mode::physical};
        const std::vector<Mode> phy{Mode::physical};
        return std::vector<DynamicInfo>{
            {"adv", "Advection", "L-I", {1, 2, 3}, generic},
            {"diff", "Diffusion", "L-D", {1, 2, 3}, generic},
            {"adv_diff", "Advection-Diffusion", "L-D", {1, 2, 3}, generic},
            {"disp", "Dispersion", "L-I", {1, 2, 3}, generic},
            {"hyp", "Hyper-Diffusion", "L-D", {1, 2, 3}, generic},
            {"unbal_adv", "Unbalanced Advection", "L-I", {2, 3}, phy},
            {"diag_diff", "Diagonal Diffusion", "L-D", {2, 3}, phy},
            {"aniso_diff", "Anisotropic Diffusion", "L-D", {2, 3}, phy},
            {"mix_disp", "Spatially-Mixed Dispersion", "L-I", {2, 3}, phy},
            {"mix_hyp", "Spatially-Mixed Hyper-Diffusion", "L-I", {2, 3}, phy},
            {"burgers", "Burgers", "N-D-M", {1, 2, 3}, generic},
            {"burgers_sc", "Burgers (single-channel)", "N-D", {2, 3}, generic},
            {"kdv", "Korteweg-de Vries (single-channel)", "N-D", {1, 2, 3}, generic},
            {"ks_cons", "Kuramoto-Sivashinsky (conservative)", "N-I-C", {1}, generic},
            {"ks", "Kuramoto-Sivashinsky (combustion)", "N-I-C", {1, 2, 3}, generic},
            {"fisher", "Fisher-KPP", "N-S", {1, 2, 3}, generic},
            {"gs", "Gray-Scott", "N-S/C/I-M", {2, 3}, phy},
            {"sh", "Swift-Hohenberg", "N-S", {2, 3}, phy},
            {"decay_turb", "Navier-Stokes (streamfunction vorticity)", "N-D", {2}, phy},
            {"kolm_flow", "Navier-Stokes (Kolmogorov forcing)", "N-I-C", {2}, phy},
        };
    }();
    return table;
}

const DynamicInfo& dynamic_info(std::string_view name) {
    const auto row = row_of(name);
    for (const auto& info : dynamics_table()) {
        if (info.name == row) return info;
    }
    throw ConfigError("unknown scenario: " + std::string(name));
}

std::string ScenarioDescriptor::canonical_name() const {
    return std::to_string(num_dims) + "d_" + std::string(mode_prefix(modes.front())) + "_" + name;
}

std::vector<ScenarioDescriptor> registry_list() {
    std::vector<ScenarioDescriptor> out;
    for (const auto& info : dynamics_table()) {
        for (int d : info.dims) out.push_back({info.name, d, info.classes, info.modes});
    }
    return out;
}

const std::vector<std::string>& gray_scott_type_names() {
    static const std::vector<std::string> names{"alpha", "beta",    "gamma", "delta",
                                                "epsilon", "theta", "iota",  "kappa"};
    return names;
}

GrayScottRates gray_scott_type(std::string_view type) {
    static const std::map<std::string, GrayScottRates, std::less<>> rates{
        {"alpha", {0.008, 0.046}}, {"beta", {0.020, 0.046}},    {"gamma", {0.024, 0.056}},
        {"delta", {0.028, 0.056}}, {"epsilon", {0.02, 0.056}},  {"theta", {0.04, 0.06}},
        {"iota", {0.05, 0.0605}},  {"kappa", {0.052, 0.063}},
    };
    const auto it = rates.find(type);
    if (it == rates.end()) throw ConfigError("unknown Gray-Scott type: " + std::string(type));
    return it->second;
}

std::string ScenarioSpec::canonical_name() const {
    return std::to_string(num_dims) + "d_" + std::string(mode_prefix(mode)) + "_" + dynamic;
}

int ScenarioSpec::channels() const {
    if (dynamic == "burgers") return num_dims;
    if (row_of(dynamic) == "gs") return 2;
    return 1;
}

double ScenarioSpec::extent() const {
    const auto it = params.find("L");
    return it == params.end() ? 1.0 : it->second;
}

double ScenarioSpec::dt() const {
    const auto it = params.find("dt");
    return it == params.end() ? 1.0 : it->second;
}

Grid ScenarioSpec::grid() const { return Grid(num_dims, num_points, extent()); }

double ScenarioSpec::param(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ConfigError("scenario " + canonical_name() + " has no parameter '" + key + "'");
    return it->second;
}

ParsedScenarioId parse_scenario_id(std::string_view id) {
    ParsedScenarioId parsed{Mode::difficulty, "", 0};
    std::string_view rest = id;
    if (rest.size() > 3 && rest[1] == 'd' && rest[2] == '_' && rest[0] >= '1' && rest[0] <= '3') {
        parsed.num_dims = rest[0] - '0';
        rest.remove_prefix(3);
    }
    const auto known = [](std::string_view name) {
        if (name == "gs_type") return true;
        for (const auto& info : dynamics_table()) {
            if (info.name == name) return true;
        }
        return false;
    };
    std::optional<Mode> mode;
    for (Mode m : {Mode::difficulty, Mode::normalized, Mode::physical}) {
        const std::string prefix = std::string(mode_prefix(m)) + "_";
        if (rest.starts_with(prefix) && known(rest.substr(prefix.size()))) {
            mode = m;
            rest.remove_prefix(prefix.size());
            break;
        }
    }
    if (!known(rest)) throw ConfigError("unknown scenario: " + std::string(id));
    parsed.dynamic = std::string(rest);
    parsed.mode = mode.value_or(dynamic_info(parsed.dynamic).modes.front());
    return parsed;
}

ScenarioSpec resolve_scenario(std::string_view id, int num_dims) {
    const auto parsed = parse_scenario_id(id);
    if (parsed.num_dims != 0 && parsed.num_dims != num_dims) {
        throw ConfigError("scenario id " + std::string(id) + " names dimension " + std::to_string(parsed.num_dims) +
                          " but " + std::to_string(num_dims) + " was requested");
    }
    const auto& info = dynamic_info(parsed.dynamic);
    if (std::find(info.dims.begin(), info.dims.end(), num_dims) == info.dims.end()) {
        throw ConfigError("scenario " + parsed.dynamic + " is not available in " + std::to_string(num_dims) + "D");
    }
    if (std::find(info.modes.begin(), info.modes.end(), parsed.mode) == info.modes.end()) {
        throw ConfigError("mode unsupported for dynamic: " + std::string(mode_prefix(parsed.mode)) + "_" +
                          parsed.dynamic);
    }

    ScenarioSpec spec;
    spec.dynamic = parsed.dynamic;
    spec.mode = parsed.mode;
    spec.num_dims = num_dims;
    spec.num_points = default_points(num_dims);
    if (const auto* row = find_generic(parsed.dynamic)) {
        spec.params = generic_defaults(*row, parsed.mode, num_dims);
        spec.warmup = row->warmup;
    } else {
        spec.params = physical_defaults(parsed.dynamic, num_dims);
        if (parsed.dynamic == "gs") spec.substeps = 10;
        if (parsed.dynamic == "gs_type") {
            spec.substeps = 20;
            spec.gs_type = "theta";
        }
        if (parsed.dynamic == "sh") spec.substeps = 5;
        if (parsed.dynamic == "kolm_flow") {
            spec.substeps = 20;
            spec.warmup = 500;
        }
    }
    return spec;
}

void apply_override(ScenarioSpec& spec, const std::string& key, const std::string& value) {
    auto positive = [&](int v) {
        if (v < 1) throw ConfigError("'" + key + "' must be >= 1");
        return v;
    };
    if (key == "N") {
        spec.num_points = parse_int(key, value);
    } else if (key == "order") {
        spec.order = parse_int(key, value);
        if (spec.order < 0 || spec.order > 4) throw ConfigError("order must be in 0..4");
    } else if (key == "substeps") {
        spec.substeps = positive(parse_int(key, value));
    } else if (key == "warmup") {
        spec.warmup = parse_int(key, value);
        if (spec.warmup < 0) throw ConfigError("warmup must be >= 0");
    } else if (key == "contour_radius") {
        spec.contour.radius = parse_double(key, value);
    } else if (key == "contour_points") {
        spec.contour.points = parse_int(key, value);
    } else if (key == "dealias") {
        const auto slash = value.find('/');
        if (slash == std::string::npos) throw ConfigError("dealias expects a fraction like 2/3");
        spec.dealias = {parse_int(key, value.substr(0, slash)), parse_int(key, value.substr(slash + 1))};
    } else if (key == "ic_cutoff") {
        spec.ic.cutoff = positive(parse_int(key, value));
    } else if (key == "ic_offset_min") {
        spec.ic.offset_min = parse_double(key, value);
    } else if (key == "ic_offset_max") {
        spec.ic.offset_max = parse_double(key, value);
    } else if (key == "ic_normalize") {
        spec.ic.normalize_max_abs = parse_bool(key, value);
    } else if (key == "ic_blob_sigma") {
        spec.ic.blob_sigma = parse_double(key, value);
    } else if (key == "ic_blob_jitter") {
        spec.ic.blob_jitter = parse_double(key, value);
    } else if (key == "conservative") {
        spec.conservative = parse_bool(key, value);
    } else if (key == "train_samples") {
        spec.recipe.train_samples = positive(parse_int(key, value));
    } else if (key == "train_steps") {
        spec.recipe.train_steps = positive(parse_int(key, value));
    } else if (key == "test_samples") {
        spec.recipe.test_samples = positive(parse_int(key, value));
    } else if (key == "test_steps") {
        spec.recipe.test_steps = positive(parse_int(key, value));
    } else if (key == "type") {
        if (spec.dynamic != "gs_type") throw ConfigError("'type' only applies to gs_type");
        const auto rates = gray_scott_type(value);
        spec.gs_type = value;
        spec.params["feed"] = rates.feed;
        spec.params["kill"] = rates.kill;
    } else if (auto it = spec.params.find(key); it != spec.params.end()) {
        it->second = parse_double(key, value);
    } else {
        throw ConfigError("unknown key '" + key + "' for scenario " + spec.canonical_name());
    }
}

namespace {

struct ResolvedDynamics {
    Grid grid;
    double dt;
    DiagonalLinearOperator linear;
    std::optional<NonlinearSpec> nonlinear;
};

// Linear coefficients a_j and nonlinear scales b of a generic row in the
// units of the grid the stepper is built on.
ResolvedDynamics resolve_generic(const ScenarioSpec& spec, const GenericRow& row, double scale) {
    std::vector<double> a(kLinearOrders, 0.0);
    double b = 0.0;
    double extent = 1.0;
    double dt = 1.0;
    const std::string comp(row.component);
    switch (spec.mode) {
        case Mode::difficulty: {
            DifficultyCoefficients diff;
            for (int j = 0; j < kLinearOrders; ++j) diff.gammas.push_back(scale * spec.param(key_index("gamma", j)));
            if (!comp.empty()) diff.deltas[comp] = scale * spec.param("delta_" + comp);
            diff.num_points = spec.num_points;
            diff.num_dims = spec.num_dims;
            diff.max_abs = spec.param("m");
            const auto norm = difficulty_to_normalized(diff);
            a = norm.alphas;
            if (!comp.empty()) b = norm.betas.at(comp);
            break;
        }
        case Mode::normalized:
            for (int j = 0; j < kLinearOrders; ++j) {
                a[static_cast<std::size_t>(j)] = scale * spec.param(key_index("alpha", j));
            }
            if (!comp.empty()) b = scale * spec.param("beta_" + comp);
            break;
        case Mode::physical:
            for (int j = 0; j < kLinearOrders; ++j) a[static_cast<std::size_t>(j)] = spec.param(key_index("a", j));
            if (!comp.empty()) b = spec.param("b_" + comp);
            extent = spec.param("L");
            dt = scale * spec.param("dt");
            break;
    }
    const Grid grid(spec.num_dims, spec.num_points, extent);
    ResolvedDynamics out{grid, dt, build_isotropic_linear({a}, grid), std::nullopt};
    if (row.component == kConv) {
        out.nonlinear = nl::Convection{b, spec.conservative};
    } else if (row.component == kConvSc) {
        out.nonlinear = nl::SingleChannelConvection{b};
    } else if (row.component == kGradNorm) {
        out.nonlinear = nl::GradientNorm{b, true};
    } else if (row.component == kQuad) {
        out.nonlinear = nl::Polynomial{{0.0, 0.0, b}};
    }
    return out;
}

ResolvedDynamics resolve_physical(const ScenarioSpec& spec, double dt_scale) {
    const Grid grid = spec.grid();
    const double dt = dt_scale * spec.param("dt");
    const int dims = spec.num_dims;
    const auto& name = spec.dynamic;
    auto vec = [&](const std::string& base) {
        std::vector<double> v;
        for (int d = 0; d < dims; ++d) v.push_back(spec.param(key_index(base, d)));
        return v;
    };
    if (name == "unbal_adv") {
        return {grid, dt, build_spatially_mixed_linear(mix::UnbalancedAdvection{vec("c")}, grid), std::nullopt};
    }
    if (name == "diag_diff") {
        return {grid, dt, build_spatially_mixed_linear(mix::DiagonalDiffusion{vec("nu")}, grid), std::nullopt};
    }
    if (name == "aniso_diff") {
        std::vector<double> m;
        for (int i = 0; i < dims; ++i) {
            for (int j = 0; j < dims; ++j) m.push_back(spec.param("A" + std::to_string(i) + std::to_string(j)));
        }
        return {grid, dt, build_spatially_mixed_linear(mix::AnisotropicDiffusion{m}, grid), std::nullopt};
    }
    if (name == "mix_disp") {
        return {grid, dt, build_spatially_mixed_linear(mix::MixedDispersion{spec.param("xi")}, grid), std::nullopt};
    }
    if (name == "mix_hyp") {
        return {grid, dt, build_spatially_mixed_linear(mix::MixedHyperdiffusion{spec.param("zeta")}, grid),
                std::nullopt};
    }
    if (name == "gs" || name == "gs_type") {
        const double f = spec.param("feed");
        const double k = spec.param("kill");
        const auto lap0 = build_isotropic_linear({{-f, 0.0, spec.param("nu0")}}, grid);
        const auto lap1 = build_isotropic_linear({{-(f + k), 0.0, spec.param("nu1")}}, grid);
        const DiagonalLinearOperator parts[] = {lap0, lap1};
        return {grid, dt, DiagonalLinearOperator::stack(parts), nl::GrayScott{f, k}};
    }
    if (name == "sh") {
        const double r = spec.param("r");
        const double k = spec.param("k");
        const auto lap = laplacian_values(grid);
        std::vector<Complex> values(lap.size());
        for (std::size_t i = 0; i < lap.size(); ++i) values[i] = r - (k + lap[i]) * (k + lap[i]);
        return {grid, dt, DiagonalLinearOperator(grid, std::move(values)), nl::Polynomial{{0.0, 0.0, 1.0, -1.0}}};
    }
    if (name == "decay_turb") {
        return {grid, dt, build_isotropic_linear({{0.0, 0.0, spec.param("nu")}}, grid),
                nl::VorticityConvection{spec.param("b"), 0, 1.0}};
    }
    if (name == "kolm_flow") {
        const double nu = 1.0 / spec.param("re");
        const int kf = static_cast<int>(std::lround(spec.param("k")));
        return {grid, dt, build_isotropic_linear({{spec.param("drag"), 0.0, nu}}, grid),
                nl::VorticityConvection{spec.param("b"), kf, 1.0}};
    }
    throw ConfigError("unknown scenario: " + name);
}

ResolvedDynamics resolve(const ScenarioSpec& spec, double scale) {
    if (const auto* row = find_generic(spec.dynamic)) return resolve_generic(spec, *row, scale);
    if (spec.mode != Mode::physical) throw ConfigError("mode unsupported for dynamic: " + spec.canonical_name());
    return resolve_physical(spec, scale);
}

Stepper stepper_from(const ScenarioSpec& spec, const ResolvedDynamics& r) {
    std::optional<NonlinearFunction> fn;
    if (r.nonlinear) fn = build_nonlinear(*r.nonlinear, r.grid, dealias_mask(r.grid, spec.dealias));
    return make_stepper(r.linear, std::move(fn), r.dt, spec.order, spec.substeps, spec.contour);
}

}  // namespace

Stepper build_stepper_from_spec(const ScenarioSpec& spec) { return stepper_from(spec, resolve(spec, 1.0)); }

Stepper build_coarse_stepper(const ScenarioSpec& spec, double proportion) {
    if (!(proportion >= 0.0) || !std::isfinite(proportion)) throw ConfigError("coarse proportion must be >= 0");
    if (proportion == 0.0) {
        const Grid grid = spec.grid();
        return make_stepper(DiagonalLinearOperator::constant(grid, 0.0), std::nullopt, 1.0, 0);
    }
    return stepper_from(spec, resolve(spec, proportion));
}

std::uint64_t sample_seed(std::uint64_t seed, Split split, int index) {
    constexpr std::uint64_t kTrainTag = 0x747261696eULL;  // "train"
    constexpr std::uint64_t kTestTag = 0x74657374ULL;     // "test"
    return derive_seed(seed, split == Split::train ? kTrainTag : kTestTag, static_cast<std::uint64_t>(index));
}

namespace {

// Truncated Fourier series: every half-spectrum bin with all |k_d| <= K
// except the mean gets (b - i a) N^D / 2, so each conjugate pair contributes
// a sin(k.x) + b cos(k.x). Bins on the k_last = 0 plane are drawn once per
// conjugate pair.
void fill_fourier_channel(const Grid& grid, const WavenumberGrid& wg, const IcConfig& ic, RandomStream& rng,
                          std::span<double> out) {
    const int dims = grid.num_dims;
    const int n = grid.num_points;
    const std::size_t size = grid.spectral_size();
    std::vector<Complex> hat(size, 0.0);
    const double scale = static_cast<double>(grid.spatial_size()) / 2.0;
    const auto last = static_cast<std::size_t>(n / 2 + 1);

    for (std::size_t idx = 0; idx < size; ++idx) {
        bool inside = true;
        bool dc = true;
        for (int d = 0; d < dims; ++d) {
            const int k = wg.flat[static_cast<std::size_t>(d)][idx];
            if (std::abs(k) > ic.cutoff) inside = false;
            if (k != 0) dc = false;
        }
        if (!inside || dc) continue;
        const bool on_plane = wg.flat[static_cast<std::size_t>(dims - 1)][idx] == 0;
        if (on_plane) {
            // Canonical member of the pair: first nonzero wavenumber positive.
            int first = 0;
            for (int d = 0; d < dims - 1 && first == 0; ++d) first = wg.flat[static_cast<std::size_t>(d)][idx];
            if (first < 0) continue;
        }
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        hat[idx] = scale * Complex(b, -a);
        if (on_plane) {
            // Flat index of the mirrored bin (-k_0, ..., -k_{D-2}, 0).
            std::size_t mirror = 0;
            for (int d = 0; d < dims - 1; ++d) {
                const int k = wg.flat[static_cast<std::size_t>(d)][idx];
                mirror = mirror * static_cast<std::size_t>(n) + static_cast<std::size_t>((-k + n) % n);
            }
            mirror *= last;
            hat[mirror] = std::conj(hat[idx]);
        }
    }
    detail::inverse_channel(grid, hat, out);
}

double periodic_offset(double x, double c, double extent) {
    double d = x - c;
    d -= extent * std::round(d / extent);
    return d;
}

}  // namespace

SpatialField sample_initial_condition(const ScenarioSpec& spec, std::uint64_t seed) {
    const Grid grid = spec.grid();
    const int channels = spec.channels();
    SpatialField u(grid, channels);
    RandomStream rng(seed);

    if (row_of(spec.dynamic) == "gs") {
        const double extent = grid.extent;
        const double sigma = spec.ic.blob_sigma * extent;
        if (!(sigma > 0.0)) throw ConfigError("ic_blob_sigma must be positive");
        std::vector<double> center(static_cast<std::size_t>(grid.num_dims));
        for (auto& c : center) c = 0.5 * extent + spec.ic.blob_jitter * extent * rng.uniform(-1.0, 1.0);
        auto blob = u.channel(0);
        auto complement = u.channel(1);
        const int n = grid.num_points;
        for (std::size_t i = 0; i < blob.size(); ++i) {
            std::size_t rest = i;
            double r2 = 0.0;
            for (int d = grid.num_dims - 1; d >= 0; --d) {
                const int idx = static_cast<int>(rest % static_cast<std::size_t>(n));
                rest /= static_cast<std::size_t>(n);
                const double off = periodic_offset(grid.coordinate(idx), center[static_cast<std::size_t>(d)], extent);
                r2 += off * off;
            }
            blob[i] = std::exp(-r2 / (2.0 * sigma * sigma));
            complement[i] = 1.0 - blob[i];
        }
        return u;
    }

    if (spec.ic.cutoff >= grid.num_points / 2) {
        throw ConfigError("ic_cutoff must be below N/2 to stay resolved");
    }
    const auto wg = build_wavenumber_grid(grid);
    for (int c = 0; c < channels; ++c) {
        auto ch = u.channel(c);
        fill_fourier_channel(grid, wg, spec.ic, rng, ch);
        const double offset = rng.uniform(spec.ic.offset_min, spec.ic.offset_max);
        for (double& v : ch) v += offset;
        if (spec.dynamic == "fisher") {
            // Logistic growth diverges for negative states, so the field is
            // mapped affinely onto [0, 1].
            const auto [lo, hi] = std::minmax_element(ch.begin(), ch.end());
            const double min = *lo;
            const double span = *hi - *lo;
            if (span > 0.0) {
                for (double& v : ch) v = (v - min) / span;
            }
        } else if (spec.ic.normalize_max_abs) {
            double m = 0.0;
            for (double v : ch) m = std::max(m, std::abs(v));
            if (m > 0.0) {
                for (double& v : ch) v /= m;
            }
        }
    }
    return u;
}

std::vector<std::size_t> TrajectorySet::shape() const {
    std::vector<std::size_t> s{static_cast<std::size_t>(samples), static_cast<std::size_t>(snapshots),
                               static_cast<std::size_t>(channels)};
    for (int d = 0; d < grid.num_dims; ++d) s.push_back(static_cast<std::size_t>(grid.num_points));
    return s;
}

Trajectory TrajectorySet::trajectory(int sample) const {
    if (sample < 0 || sample >= samples) throw ShapeError("trajectory set: sample index out of range");
    Trajectory traj(grid, channels, snapshots);
    const auto begin = data.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(sample) * trajectory_size());
    std::copy(begin, begin + static_cast<std::ptrdiff_t>(trajectory_size()), traj.data().begin());
    return traj;
}

SpatialField TrajectorySet::state(int sample, int t) const {
    if (sample < 0 || sample >= samples || t < 0 || t >= snapshots) {
        throw ShapeError("trajectory set: index out of range");
    }
    const std::size_t snap = static_cast<std::size_t>(channels) * grid.spatial_size();
    const std::size_t offset = static_cast<std::size_t>(sample) * trajectory_size() + static_cast<std::size_t>(t) * snap;
    return SpatialField(grid, channels,
                        std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(offset),
                                            data.begin() + static_cast<std::ptrdiff_t>(offset + snap)));
}

void generate_dataset_streaming(const ScenarioSpec& spec, Split split, std::uint64_t seed, unsigned threads,
                                const TrajectorySink& sink) {
    const Stepper stepper = build_stepper_from_spec(spec);
    const int samples = split == Split::train ? spec.recipe.train_samples : spec.recipe.test_samples;
    const int steps = split == Split::train ? spec.recipe.train_steps : spec.recipe.test_steps;
    const int batch = static_cast<int>(resolve_threads(threads));
    for (int start = 0; start < samples; start += batch) {
        const int count = std::min(batch, samples - start);
        std::vector<Trajectory> results(static_cast<std::size_t>(count));
        parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t i) {
            const int sample = start + static_cast<int>(i);
            const auto ic = sample_initial_condition(spec, sample_seed(seed, split, sample));
            try {
                results[i] = rollout(stepper, ic, steps, spec.warmup);
            } catch (const DivergenceError& e) {
                throw DivergenceError("trajectory diverged in sample " + std::to_string(sample),
                                      e.last_valid_step(), sample);
            }
        });
        for (int i = 0; i < count; ++i) sink(start + i, results[static_cast<std::size_t>(i)]);
    }
}

TrajectorySet generate_dataset(const ScenarioSpec& spec, Split split, std::uint64_t seed, unsigned threads) {
    TrajectorySet set;
    set.name = spec.canonical_name();
    set.split = split;
    set.seed = seed;
    set.grid = spec.grid();
    set.samples = split == Split::train ? spec.recipe.train_samples : spec.recipe.test_samples;
    set.snapshots = (split == Split::train ? spec.recipe.train_steps : spec.recipe.test_steps) + 1;
    set.channels = spec.channels();
    set.data.resize(static_cast<std::size_t>(set.samples) * set.trajectory_size());
    generate_dataset_streaming(spec, split, seed, threads, [&](int sample, const Trajectory& traj) {
        std::copy(traj.data().begin(), traj.data().end(),
                  set.data.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(sample) * set.trajectory_size()));
    });
    return set;
}

}  // namespace emubench
