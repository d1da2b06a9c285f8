#include "wulff/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace wulff {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw InputError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) throw InputError("unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError("bad value for '" + key + "' in " + where);
    }
}

AnisotropySpec parse_anisotropy(const json& j, const std::string& where)
{
    reject_unknown(j, {"kind", "q", "p", "blend", "axis", "depth", "width"}, where);
    AnisotropySpec spec;
    if (j.contains("kind")) spec.kind = get_as<std::string>(j, "kind", where);
    if (j.contains("q")) spec.q = get_as<std::vector<std::vector<double>>>(j, "q", where);
    if (j.contains("p")) spec.p = get_as<int>(j, "p", where);
    if (j.contains("blend")) spec.blend = get_as<double>(j, "blend", where);
    if (j.contains("axis")) spec.axis = get_as<std::vector<double>>(j, "axis", where);
    if (j.contains("depth")) spec.depth = get_as<double>(j, "depth", where);
    if (j.contains("width")) spec.width = get_as<double>(j, "width", where);
    return spec;
}

ordered_json anisotropy_to_json(const AnisotropySpec& s)
{
    ordered_json j;
    j["kind"] = s.kind;
    if (s.kind == "quadric") j["q"] = s.q;
    if (s.kind == "pnorm") {
        j["p"] = s.p;
        j["blend"] = s.blend;
    }
    if (s.kind == "dip") {
        j["axis"] = s.axis;
        j["depth"] = s.depth;
        j["width"] = s.width;
    }
    return j;
}

Vec to_vec(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

double RunConfig::tolerance(const std::string& name, double fallback) const
{
    auto it = tolerances.find(name);
    return (it == tolerances.end() ? fallback : it->second) * tol_scale;
}

const std::vector<std::string>& known_suites()
{
    static const std::vector<std::string> suites{"convexity", "calibration", "traces", "maclaurin", "discriminant",
        "minkowski", "first_variation", "lemma26", "jacobi"};
    return suites;
}

RunConfig parse_config(const json& j)
{
    const std::string top = "config";
    reject_unknown(j, {"n", "resolution", "out", "workers", "seed", "samples", "surface", "anisotropy", "problem",
                          "suites", "tolerances", "tol_scale"},
        top);
    RunConfig cfg;
    if (j.contains("n")) cfg.n = get_as<int>(j, "n", top);
    if (j.contains("resolution")) cfg.resolution = get_as<int>(j, "resolution", top);
    if (j.contains("out")) cfg.out = get_as<std::string>(j, "out", top);
    if (j.contains("workers")) cfg.workers = get_as<int>(j, "workers", top);
    if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed", top);
    if (j.contains("samples")) cfg.samples = get_as<int>(j, "samples", top);
    if (j.contains("tol_scale")) cfg.tol_scale = get_as<double>(j, "tol_scale", top);
    if (j.contains("anisotropy")) cfg.anisotropy = parse_anisotropy(j.at("anisotropy"), "anisotropy");
    if (j.contains("surface")) {
        const json& s = j.at("surface");
        const std::string where = "surface";
        reject_unknown(s, {"kind", "radius", "semi_axes", "scale", "major", "minor", "translation", "model"}, where);
        if (s.contains("kind")) cfg.surface.kind = get_as<std::string>(s, "kind", where);
        if (s.contains("radius")) cfg.surface.radius = get_as<double>(s, "radius", where);
        if (s.contains("semi_axes")) cfg.surface.semi_axes = get_as<std::vector<double>>(s, "semi_axes", where);
        if (s.contains("scale")) cfg.surface.scale = get_as<double>(s, "scale", where);
        if (s.contains("major")) cfg.surface.major = get_as<double>(s, "major", where);
        if (s.contains("minor")) cfg.surface.minor = get_as<double>(s, "minor", where);
        if (s.contains("translation")) cfg.surface.translation = get_as<std::vector<double>>(s, "translation", where);
        if (s.contains("model")) cfg.surface.model = parse_anisotropy(s.at("model"), "surface.model");
    }
    if (j.contains("problem")) {
        const json& p = j.at("problem");
        reject_unknown(p, {"r", "s", "a"}, "problem");
        if (p.contains("r")) cfg.problem.r = get_as<int>(p, "r", "problem");
        if (p.contains("s")) cfg.problem.s = get_as<int>(p, "s", "problem");
        if (p.contains("a")) cfg.problem.a = get_as<std::vector<double>>(p, "a", "problem");
    }
    if (j.contains("suites")) cfg.suites = get_as<std::vector<std::string>>(j, "suites", top);
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (!t.is_object()) throw InputError("tolerances must be a JSON object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (!it.value().is_number()) throw InputError("tolerance '" + it.key() + "' must be a number");
            cfg.tolerances[it.key()] = it.value().get<double>();
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

void validate_config(const RunConfig& cfg)
{
    if (cfg.n < 2) throw InputError("n must be at least 2");
    if (cfg.resolution < 16) throw InputError("resolution must be at least 16");
    if (cfg.workers < 1) throw InputError("workers must be positive");
    if (cfg.samples < 1) throw InputError("samples must be positive");
    if (!(cfg.tol_scale > 0.0)) throw InputError("tol-scale must be positive");
    for (const auto& [name, value] : cfg.tolerances) {
        if (!(value > 0.0)) throw InputError("tolerance '" + name + "' must be positive");
    }
    for (const auto& s : cfg.suites) {
        const auto& k = known_suites();
        if (std::find(k.begin(), k.end(), s) == k.end()) throw InputError("unknown suite '" + s + "'");
    }
    static const std::set<std::string> surfaces{"sphere", "ellipsoid", "wulff", "torus"};
    if (!surfaces.count(cfg.surface.kind)) throw InputError("unknown surface kind '" + cfg.surface.kind + "'");
    static const std::set<std::string> models{"isotropic", "quadric", "pnorm", "dip"};
    if (!models.count(cfg.anisotropy.kind)) throw InputError("unknown anisotropy kind '" + cfg.anisotropy.kind + "'");
    if (cfg.surface.kind == "torus" && cfg.n != 2) throw InputError("torus surfaces need n = 2");
    if (!cfg.surface.translation.empty() && cfg.surface.translation.size() != static_cast<std::size_t>(cfg.n + 1)) {
        throw InputError("translation needs n + 1 entries");
    }
}

ordered_json config_to_json(const RunConfig& cfg)
{
    ordered_json j;
    j["n"] = cfg.n;
    j["resolution"] = cfg.resolution;
    j["seed"] = cfg.seed;
    j["samples"] = cfg.samples;
    ordered_json s;
    s["kind"] = cfg.surface.kind;
    if (cfg.surface.kind == "sphere") s["radius"] = cfg.surface.radius;
    if (cfg.surface.kind == "ellipsoid") s["semi_axes"] = cfg.surface.semi_axes;
    if (cfg.surface.kind == "wulff") {
        s["scale"] = cfg.surface.scale;
        if (cfg.surface.model) s["model"] = anisotropy_to_json(*cfg.surface.model);
    }
    if (cfg.surface.kind == "torus") {
        s["major"] = cfg.surface.major;
        s["minor"] = cfg.surface.minor;
    }
    if (!cfg.surface.translation.empty()) s["translation"] = cfg.surface.translation;
    j["surface"] = s;
    j["anisotropy"] = anisotropy_to_json(cfg.anisotropy);
    j["problem"] = {{"r", cfg.problem.r}, {"s", cfg.problem.s}, {"a", cfg.problem.a}};
    j["suites"] = cfg.suites;
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : cfg.tolerances) t[k] = v;
    j["tolerances"] = t;
    j["tol_scale"] = cfg.tol_scale;
    return j;
}

std::string config_hash(const RunConfig& cfg)
{
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

AnisotropyModel make_model(const AnisotropySpec& spec, int n)
{
    const int dim = n + 1;
    if (spec.kind == "isotropic") return AnisotropyModel::isotropic(dim);
    if (spec.kind == "quadric") {
        Mat q = Mat::Identity(dim, dim);
        if (spec.q.empty()) {
            q(0, 0) = 4.0;
        } else {
            if (spec.q.size() != static_cast<std::size_t>(dim)) throw InputError("quadric matrix needs n + 1 rows");
            for (int i = 0; i < dim; ++i) {
                if (spec.q[i].size() != static_cast<std::size_t>(dim)) throw InputError("quadric matrix needs n + 1 columns");
                for (int k = 0; k < dim; ++k) q(i, k) = spec.q[i][k];
            }
        }
        return AnisotropyModel::quadric(q);
    }
    if (spec.kind == "pnorm") return AnisotropyModel::pnorm(dim, spec.p, spec.blend);
    if (spec.kind == "dip") {
        Vec axis = Vec::Zero(dim);
        if (spec.axis.empty()) {
            axis(0) = 1.0;
        } else {
            if (spec.axis.size() != static_cast<std::size_t>(dim)) throw InputError("dip axis needs n + 1 entries");
            axis = to_vec(spec.axis);
        }
        return AnisotropyModel::gaussian_dip(axis, spec.depth, spec.width);
    }
    throw InputError("unknown anisotropy kind '" + spec.kind + "'");
}

ChartMap make_surface(const SurfaceSpec& spec, const AnisotropyModel& run_model, int n)
{
    ChartMap map;
    if (spec.kind == "sphere") {
        map = sphere_map(n, spec.radius);
    } else if (spec.kind == "ellipsoid") {
        std::vector<double> axes = spec.semi_axes;
        if (axes.empty()) {
            axes = {1.5, 1.0, 0.75, 1.25};
            axes.resize(static_cast<std::size_t>(n + 1), 1.0);
        }
        if (axes.size() != static_cast<std::size_t>(n + 1)) throw InputError("semi_axes needs n + 1 entries");
        map = ellipsoid_map(to_vec(axes));
    } else if (spec.kind == "wulff") {
        const AnisotropyModel model = spec.model ? make_model(*spec.model, n) : run_model;
        map = wulff_map(model, spec.scale);
    } else if (spec.kind == "torus") {
        if (n != 2) throw InputError("torus surfaces need n = 2");
        map = torus_map(spec.major, spec.minor);
    } else {
        throw InputError("unknown surface kind '" + spec.kind + "'");
    }
    if (!spec.translation.empty()) {
        if (spec.translation.size() != static_cast<std::size_t>(n + 1)) throw InputError("translation needs n + 1 entries");
        map = transformed_map(map, Mat::Identity(n + 1, n + 1), to_vec(spec.translation));
    }
    return map;
}

} // namespace wulff
