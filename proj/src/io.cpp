#include "wulff/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>

namespace wulff {

using nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
}

void write_index(std::ofstream& out, const ChartGrid& grid, std::size_t node)
{
    out << 0;
    for (int v : grid.multi_index(node)) out << ',' << v;
}

void write_index_header(std::ofstream& out, int n)
{
    out << "chart,i,j";
    if (n == 3) out << ",k";
}

ordered_json optional_value(const std::optional<double>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

} // namespace

void ensure_directory(const std::string& path)
{
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw InputError("cannot create directory " + path + ": " + ec.message());
}

void write_off(const SampledImmersion& imm, const std::string& path)
{
    if (imm.n != 2) throw InputError("OFF export needs n = 2");
    const ChartGrid& grid = imm.grid;
    const int rows = grid.sizes()[0];
    const int cols = grid.sizes()[1];
    const bool sphere = grid.domain() == ParamDomain::sphere;

    std::vector<std::vector<std::size_t>> faces;
    auto node = [&](int i, int k) {
        return grid.linear_index({((i % rows) + rows) % rows, ((k % cols) + cols) % cols});
    };
    const int row_faces = sphere ? rows - 1 : rows;
    for (int i = 0; i < row_faces; ++i) {
        for (int k = 0; k < cols; ++k) faces.push_back({node(i, k), node(i + 1, k), node(i + 1, k + 1), node(i, k + 1)});
    }
    if (sphere) {
        std::vector<std::size_t> top, bottom;
        for (int k = 0; k < cols; ++k) {
            top.push_back(node(0, cols - 1 - k));
            bottom.push_back(node(rows - 1, k));
        }
        faces.push_back(top);
        faces.push_back(bottom);
    }

    // Orient so the first quad's normal agrees with the outward normal -nu.
    const auto& f0 = faces.front();
    const Vec e1 = imm.position[f0[1]] - imm.position[f0[0]];
    const Vec e2 = imm.position[f0[3]] - imm.position[f0[0]];
    const Eigen::Vector3d c = Eigen::Vector3d(e1(0), e1(1), e1(2)).cross(Eigen::Vector3d(e2(0), e2(1), e2(2)));
    const Vec& nu = imm.normal[f0[0]];
    const bool flip = c.dot(Eigen::Vector3d(nu(0), nu(1), nu(2))) > 0.0;

    std::ofstream out = open_out(path);
    out << "OFF\n" << imm.size() << ' ' << faces.size() << " 0\n";
    for (const Vec& x : imm.position) out << x(0) << ' ' << x(1) << ' ' << x(2) << '\n';
    for (auto face : faces) {
        if (flip) std::reverse(face.begin(), face.end());
        out << face.size();
        for (std::size_t v : face) out << ' ' << v;
        out << '\n';
    }
}

void write_field_csv(const SampledImmersion& imm, std::span<const double> field, const std::string& path)
{
    if (field.size() != imm.size()) throw InputError("field size does not match the immersion");
    std::ofstream out = open_out(path);
    write_index_header(out, imm.n);
    out << ",value\n";
    for (std::size_t i = 0; i < imm.size(); ++i) {
        write_index(out, imm.grid, i);
        out << ',' << field[i] << '\n';
    }
}

void write_positions_csv(const SampledImmersion& imm, const std::string& path)
{
    std::ofstream out = open_out(path);
    write_index_header(out, imm.n);
    for (int d = 0; d <= imm.n; ++d) out << ",x" << d;
    out << '\n';
    for (std::size_t i = 0; i < imm.size(); ++i) {
        write_index(out, imm.grid, i);
        for (int d = 0; d <= imm.n; ++d) out << ',' << imm.position[i](d);
        out << '\n';
    }
}

void write_json(const ordered_json& j, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << j.dump(2) << '\n';
}

ordered_json report_header(const RunConfig& cfg, const std::string& command)
{
    ordered_json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["resolution"] = cfg.resolution;
    j["config"] = config_to_json(cfg);
    return j;
}

ordered_json to_json(const StabilityReport& rep)
{
    ordered_json j;
    j["verdict"] = to_string(rep.verdict);
    j["n"] = rep.n;
    j["r"] = rep.r;
    j["s"] = rep.s;
    j["a"] = rep.a;
    j["resolution"] = rep.resolution;
    j["hypotheses_hold"] = rep.hypotheses_hold;
    j["exploratory"] = rep.exploratory;
    j["degenerate_test_function"] = rep.degenerate;
    j["alpha"] = rep.alpha;
    j["beta"] = rep.beta;
    j["beta_deviation"] = rep.beta_deviation;
    j["min_h_s1"] = rep.min_h_s1;
    j["mean_zero_residual"] = rep.mean_zero_residual;
    j["mean_zero_ok"] = rep.mean_zero_ok;
    j["f_norm"] = rep.f_norm;
    j["f_scale"] = rep.f_scale;
    ordered_json j2;
    j2["operator"] = optional_value(rep.j2_operator);
    j2["by_parts"] = optional_value(rep.j2_by_parts);
    j2["closed_form"] = optional_value(rep.j2_closed_form);
    j2["finite_difference"] = optional_value(rep.j2_fd);
    j2["grouped_terms_sum"] = rep.j2_grouped;
    j2["operator_alt_q"] = optional_value(rep.j2_operator_alt_q);
    j2["first_derivative_fd"] = optional_value(rep.j1_fd);
    j2["fd_step"] = optional_value(rep.fd_step);
    j["second_variation"] = j2;
    ordered_json terms = ordered_json::array();
    for (const auto& t : rep.grouped) {
        ordered_json e;
        e["j"] = t.j;
        e["gap_term"] = t.gap_term;
        e["quadratic_term"] = t.quadratic_term;
        e["max_normalized_gap_integrand"] = t.max_gap_integrand;
        e["max_normalized_quadratic_integrand"] = t.max_quadratic_integrand;
        e["min_gap"] = t.min_gap;
        e["max_gap"] = t.max_gap;
        e["min_p_alpha"] = t.min_p_alpha;
        e["max_discriminant"] = t.max_delta;
        terms.push_back(e);
    }
    j["grouped_terms"] = terms;
    j["q_reading_gap"] = rep.q_reading_gap;
    j["max_equality_gap"] = rep.max_equality_gap;
    j["kappa_spread"] = rep.kappa_spread;
    j["sf_identity_error"] = rep.sf_identity_error;
    j["routes_agree"] = rep.routes_agree;
    j["signs_ok"] = rep.signs_ok;
    return j;
}

} // namespace wulff
