#include "graphon/io.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <utility>

#include "graphon/errors.hpp"
#include "graphon/events.hpp"

namespace graphon::io {

using nlohmann::json;

namespace {

json parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_input(path + ": cannot open for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail_input(path + ": " + e.what());
    }
}

const json& field(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail_input(path + ": missing field \"" + key + "\"");
    return *it;
}

double number_at(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_number()) fail_input(path + ": field \"" + key + "\" must be a number");
    return v.get<double>();
}

long integer_at(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_number_integer()) fail_input(path + ": field \"" + key + "\" must be an integer");
    return v.get<long>();
}

Eigen::VectorXd vector_of(const json& v, const std::string& path, const char* what) {
    if (!v.is_array()) fail_input(path + ": " + what + " must be an array of numbers");
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail_input(path + ": " + what + " must contain only numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

WeightSpacePtr parse_space(const json& j, const std::string& path) {
    if (!j.is_object()) fail_input(path + ": \"space\" must be an object");
    Eigen::VectorXd points = vector_of(field(j, "points", path), path, "\"points\"");
    const long zero = integer_at(j, "zero_index", path);
    if (auto it = j.find("dist"); it != j.end()) {
        const json& rows = *it;
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(points.size()))
            fail_input(path + ": \"dist\" must be a square matrix matching \"points\"");
        Eigen::MatrixXd dist(points.size(), points.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            dist.row(static_cast<Eigen::Index>(i)) =
                vector_of(rows[i], path, "\"dist\" rows").transpose();
        return std::make_shared<const WeightSpace>(std::move(points), std::move(dist), zero);
    }
    return WeightSpace::discrete(std::move(points), zero);
}

Direction parse_direction(const json& j, const std::string& path) {
    const json& v = field(j, "direction", path);
    if (v == "ge") return Direction::ge;
    if (v == "le") return Direction::le;
    fail_input(path + ": \"direction\" must be \"ge\" or \"le\"");
}

StepGraphon parse_graphon(const json& j, const std::string& path) {
    auto space = parse_space(field(j, "space", path), path);
    const long n = integer_at(j, "n", path);
    if (n <= 0) fail_input(path + ": \"n\" must be positive");
    const json& rows = field(j, "cells", path);
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n * n))
        fail_input(path + ": \"cells\" must hold n*n weight vectors in row-major order");
    Eigen::MatrixXd cells(n * n, space->size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Eigen::VectorXd w = vector_of(rows[r], path, "\"cells\" entries");
        if (w.size() != space->size())
            fail_input(path + ": cell weight vectors must match the space size");
        cells.row(static_cast<Eigen::Index>(r)) = w.transpose();
    }
    return StepGraphon(std::move(space), static_cast<int>(n), std::move(cells));
}

// Serialization of parsed documents. Objects print keys in sorted order and
// numbers with 17 significant digits so identical configurations reproduce
// identical bytes.
void dump(const json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const std::string inner(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner + json(it.key()).dump() + ": ";
                dump(it.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            bool scalars = true;
            for (const auto& v : j)
                if (v.is_structured()) scalars = false;
            if (scalars) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    dump(j[i], out, depth);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += inner;
                dump(j[i], out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::string:
            out += j.dump();
            return;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            return;
        case json::value_t::number_integer:
            out += std::to_string(j.get<long long>());
            return;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            return;
        case json::value_t::number_float:
            out += format_number(j.get<double>());
            return;
        default:
            out += "null";
            return;
    }
}

json number_json(double v) {
    // Nonfinite values have no structured-text literal; encode as strings.
    if (std::isfinite(v)) return v;
    return format_number(v);
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_json(v[i]));
    return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

json space_json(const WeightSpace& s) {
    json j;
    j["points"] = vector_json(s.points());
    j["dist"] = matrix_json(s.dist());
    j["zero_index"] = s.zero_index();
    return j;
}

json manifest_json(const Manifest& m) {
    json j;
    j["seed"] = m.seed;
    j["config_hash"] = m.config_hash;
    j["version"] = m.version;
    return j;
}

void write_document(const std::string& path, json body, const Manifest& m) {
    body["manifest"] = manifest_json(m);
    std::string out;
    dump(body, out, 0);
    out += "\n";
    write_text_atomic(path, out);
}

std::string manifest_comment(const Manifest& m) {
    return "# seed=" + std::to_string(m.seed) + " config_hash=" + m.config_hash +
           " version=" + m.version + "\n";
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

FiniteMeasure load_measure(const std::string& path) {
    json j = parse_file(path);
    auto space = parse_space(field(j, "space", path), path);
    Eigen::VectorXd w = vector_of(field(j, "weights", path), path, "\"weights\"");
    MeasureKind kind = MeasureKind::probability;
    if (auto it = j.find("kind"); it != j.end()) {
        if (*it == "subprobability")
            kind = MeasureKind::subprobability;
        else if (*it != "probability")
            fail_input(path + ": \"kind\" must be \"probability\" or \"subprobability\"");
    }
    return FiniteMeasure(std::move(space), std::move(w), kind);
}

StepGraphon load_graphon(const std::string& path) { return parse_graphon(parse_file(path), path); }

WeightedGraph load_graph(const std::string& path) {
    json j = parse_file(path);
    auto space = parse_space(field(j, "space", path), path);
    const long n = integer_at(j, "n", path);
    if (n <= 0) fail_input(path + ": \"n\" must be positive");
    const json& rows = field(j, "weights", path);
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
        fail_input(path + ": \"weights\" must be an n x n matrix of point indices");
    Eigen::MatrixXi w(n, n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
            fail_input(path + ": \"weights\" must be an n x n matrix of point indices");
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!row[k].is_number_integer())
                fail_input(path + ": \"weights\" entries must be integers");
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<int>();
        }
    }
    return WeightedGraph(std::move(space), std::move(w));
}

NestedPartitionScheme load_scheme(const std::string& path) {
    json j = parse_file(path);
    const json& iv = field(j, "interval", path);
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        fail_input(path + ": \"interval\" must be [a, b]");
    return NestedPartitionScheme(iv[0].get<double>(), iv[1].get<double>(),
                                 static_cast<int>(integer_at(j, "depth_max", path)));
}

DensityMeasure load_density(const std::string& path) {
    json j = parse_file(path);
    return DensityMeasure(vector_of(field(j, "breakpoints", path), path, "\"breakpoints\""),
                          vector_of(field(j, "values", path), path, "\"values\""));
}

ConstraintSet load_constraints(const std::string& path) {
    json j = parse_file(path);
    ConstraintSet cs;
    cs.n = static_cast<int>(integer_at(j, "n", path));
    if (auto it = j.find("tolerance"); it != j.end()) {
        if (!it->is_number()) fail_input(path + ": \"tolerance\" must be a number");
        cs.tolerance = it->get<double>();
    }
    const json& items = field(j, "constraints", path);
    if (!items.is_array()) fail_input(path + ": \"constraints\" must be an array");
    for (const json& c : items) {
        Constraint out;
        out.f = vector_of(field(c, "f", path), path, "constraint \"f\"");
        out.dir = parse_direction(c, path);
        out.threshold = number_at(c, "threshold", path);
        if (auto it = c.find("scope"); it != c.end()) {
            if (!it->is_array()) fail_input(path + ": \"scope\" must be an array of [i, j] pairs");
            for (const json& p : *it) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
                    !p[1].is_number_integer())
                    fail_input(path + ": \"scope\" must be an array of [i, j] pairs");
                out.scope.emplace_back(p[0].get<int>(), p[1].get<int>());
            }
        }
        cs.items.push_back(std::move(out));
    }
    return cs;
}

EventSpec load_event(const std::string& path) {
    json j = parse_file(path);
    const json& kind = field(j, "kind", path);
    if (kind == "mean")
        return MeanEvent(vector_of(field(j, "f", path), path, "\"f\""), parse_direction(j, path),
                         number_at(j, "threshold", path));
    if (kind == "ball")
        return BallEvent(parse_graphon(field(j, "center", path), path),
                         number_at(j, "radius", path));
    fail_input(path + ": \"kind\" must be \"mean\" or \"ball\"");
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail_input(path + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) fail_runtime(path + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) fail_runtime(path + ": rename failed: " + ec.message());
}

void write_measure(const std::string& path, const FiniteMeasure& nu, const Manifest& m) {
    json j;
    j["space"] = space_json(*nu.space());
    j["weights"] = vector_json(nu.weights());
    j["kind"] = nu.kind() == MeasureKind::probability ? "probability" : "subprobability";
    write_document(path, std::move(j), m);
}

void write_graphon(const std::string& path, const StepGraphon& w, const Manifest& m) {
    json j;
    j["space"] = space_json(*w.space());
    j["n"] = w.n();
    j["symmetric"] = w.symmetric();
    j["cells"] = matrix_json(w.cells());
    write_document(path, std::move(j), m);
}

void write_graph(const std::string& path, const WeightedGraph& g, const Manifest& m) {
    json j;
    j["space"] = space_json(*g.space());
    j["n"] = g.n();
    json rows = json::array();
    for (Eigen::Index i = 0; i < g.weights().rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < g.weights().cols(); ++k) row.push_back(g.weights()(i, k));
        rows.push_back(std::move(row));
    }
    j["weights"] = std::move(rows);
    write_document(path, std::move(j), m);
}

void write_manifest(const std::string& path, const Manifest& m) {
    std::string out;
    dump(manifest_json(m), out, 0);
    out += "\n";
    write_text_atomic(path, out);
}

void write_entropy_report(const std::string& path, double entropy,
                          const Eigen::MatrixXd& per_cell, const Eigen::MatrixXd* dual_kernel,
                          const Manifest& m) {
    json j;
    j["entropy"] = number_json(entropy);
    j["per_cell"] = matrix_json(per_cell);
    if (dual_kernel) j["dual_kernel"] = matrix_json(*dual_kernel);
    write_document(path, std::move(j), m);
}

void write_dist_report(const std::string& path, const CutResult& r, bool emit_witness,
                       const Manifest& m) {
    json j;
    j["value"] = number_json(r.value);
    j["mode"] = cut_mode_name(r.mode);
    if (emit_witness) {
        auto blocks = [](const std::vector<int>& v) {
            json a = json::array();
            for (int x : v) a.push_back(x);
            return a;
        };
        j["witness"]["s_blocks"] = blocks(r.s_blocks);
        j["witness"]["t_blocks"] = blocks(r.t_blocks);
        j["witness"]["sigma"] = blocks(r.sigma);
    }
    write_document(path, std::move(j), m);
}

void write_minimize_report(const std::string& path, const MinimizerResult& r, const Manifest& m) {
    json j;
    j["value"] = number_json(r.value);
    j["dual"] = vector_json(r.dual);
    j["kkt_residual"] = number_json(r.kkt_residual);
    j["feasible"] = r.feasible;
    j["iterations"] = r.iterations;
    j["method"] = r.method;
    write_document(path, std::move(j), m);
}

void write_rates_report(const std::string& path, const ProjectionRates& r, const Manifest& m) {
    json j;
    json vals = json::array();
    for (double v : r.values) vals.push_back(number_json(v));
    j["values"] = std::move(vals);
    j["plateau_level"] = r.plateau_level;
    j["supremum"] = number_json(r.supremum);
    write_document(path, std::move(j), m);
}

void write_ldp_csv(const std::string& path, const std::vector<LdpRow>& rows, const Manifest& m) {
    std::string out = manifest_comment(m);
    out += "n, method, log_prob, scaled, rate_target, gap, ess\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + ", " + r.method + ", " + format_number(r.log_prob) + ", " +
               format_number(r.scaled) + ", " + format_number(r.rate_target) + ", " +
               format_number(r.gap) + ", " + format_number(r.ess) + "\n";
    }
    write_text_atomic(path, out);
}

void write_quantiles_csv(const std::string& path, const std::vector<ConcentrationRow>& rows,
                         const Manifest& m) {
    std::string out = manifest_comment(m);
    out += "n, median, q90\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + ", " + format_number(r.median) + ", " +
               format_number(r.q90) + "\n";
    write_text_atomic(path, out);
}

}  // namespace graphon::io
