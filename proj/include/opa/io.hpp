#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "opa/blaschke.hpp"
#include "opa/boundary.hpp"
#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"
#include "opa/rudin.hpp"
#include "opa/solver.hpp"
#include "opa/steer.hpp"
#include "opa/zerofree.hpp"

namespace opa::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline bool is_flat(const json& j) {
    for (const auto& e : j) {
        if (e.is_object()) return false;
        if (e.is_array() && !is_flat(e)) return false;
    }
    return true;
}

inline void write(std::ostream& os, const json& j, int indent, bool pretty) {
    auto nl = [&](int lvl) {
        if (!pretty) return;
        os << '\n';
        for (int i = 0; i < lvl; ++i) os << "  ";
    };
    switch (j.type()) {
        case json::value_t::null: os << "null"; break;
        case json::value_t::boolean: os << (j.get<bool>() ? "true" : "false"); break;
        case json::value_t::number_integer: os << j.get<long long>(); break;
        case json::value_t::number_unsigned: os << j.get<unsigned long long>(); break;
        case json::value_t::number_float: os << format_double(j.get<double>()); break;
        case json::value_t::string: os << j.dump(); break;
        case json::value_t::array: {
            bool inner_pretty = pretty && !is_flat(j);
            os << '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) os << (inner_pretty ? "," : ", ");
                if (inner_pretty) nl(indent + 1);
                write(os, e, indent + 1, inner_pretty);
                first = false;
            }
            if (inner_pretty && !j.empty()) nl(indent);
            os << ']';
            break;
        }
        case json::value_t::object: {
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << (pretty ? "," : ", ");
                nl(indent + 1);
                os << json(it.key()).dump() << ": ";
                write(os, it.value(), indent + 1, pretty);
                first = false;
            }
            if (!j.empty()) nl(indent);
            os << '}';
            break;
        }
        default: os << j.dump(); break;
    }
}

}  // namespace detail

/// JSON text with every float at 17 significant digits.
inline std::string dump(const json& j, bool pretty = true) {
    std::ostringstream os;
    detail::write(os, j, 0, pretty);
    if (pretty) os << '\n';
    return os.str();
}

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline json complex_array(const std::vector<cplx>& v) {
    json a = json::array();
    for (auto c : v) a.push_back(complex_json(c));
    return a;
}

inline json to_json(const CoeffSeries& a) {
    return {{"coeffs", complex_array(a.coeffs())},
            {"tail_bound", a.tail_bound()},
            {"truncation_degree", a.truncation_degree()}};
}

inline json summary_json(const CoeffSeries& a, std::size_t head = 8) {
    std::vector<cplx> first(a.coeffs().begin(), a.coeffs().begin() + static_cast<std::ptrdiff_t>(std::min(head, a.size())));
    return {{"leading_coeffs", complex_array(first)},
            {"tail_bound", a.tail_bound()},
            {"truncation_degree", a.truncation_degree()},
            {"h2_norm", a.h2_norm()}};
}

inline json to_json(const BoundarySet& e) {
    json arcs = json::array();
    for (const auto& a : e.arcs) arcs.push_back({a.center, a.half_width});
    return {{"points", e.points}, {"arcs", arcs}, {"sample_density", e.sample_density}};
}

inline json to_json(const ZeroFreeReport& r) {
    return {{"zero_free", r.zero_free},
            {"status", to_string(r.status)},
            {"winding_number", r.winding_number},
            {"min_modulus_on_circle", r.min_modulus_on_circle},
            {"grid_size", r.grid_size},
            {"lipschitz_margin", r.lipschitz_margin}};
}

inline json to_json(const OpaResult& r) {
    return {{"Q", to_json(r.Q)},
            {"n", r.n},
            {"alpha", r.weight.alpha()},
            {"residual", r.residual},
            {"residual_squared", r.residual * r.residual},
            {"residual_projection", r.residual_projection},
            {"condition_estimate", r.condition_estimate}};
}

inline json to_json(const PiecewisePartition& p) {
    json pieces = json::array();
    for (const auto& x : p.pieces)
        pieces.push_back({{"set", to_json(x.set)}, {"v", complex_json(x.v)}, {"representative", x.representative}});
    return {{"pieces", pieces}, {"epsilon", p.epsilon}, {"k", p.k}};
}

inline json to_json(const RudinCertificate& c) {
    json j = {{"sup_bound", c.sup_bound},
              {"off_neighborhood_sup", c.off_neighborhood_sup},
              {"peak_deviation", c.peak_deviation},
              {"off_neighborhood_bound", c.off_neighborhood_bound},
              {"min_real_part", c.min_real_part},
              {"grid_size", c.grid_size}};
    j["dirichlet_energy"] = c.dirichlet_energy ? json(*c.dirichlet_energy) : json();
    return j;
}

inline json to_json(const RudinFunction& r, bool coefficients) {
    return {{"completion", coefficients ? to_json(r.completion) : summary_json(r.completion)},
            {"h", coefficients ? to_json(r.h) : summary_json(r.h)},
            {"peak_set", to_json(r.peak_set)},
            {"neighborhood", to_json(r.neighborhood)},
            {"certified", to_json(r.certified)},
            {"construction", r.diagnostics}};
}

inline json to_json(const DiscreteMeasure& m) {
    return {{"nodes", m.nodes}, {"weights", m.weights}, {"energy", m.energy}, {"capacity", m.capacity},
            {"iterations", m.iterations}};
}

inline json to_json(const ZeroFreeApproxResult& r) {
    return {{"P", to_json(r.P)},
            {"report", to_json(r.report)},
            {"space_error", r.space_error},
            {"boundary_error", r.boundary_error},
            {"partition", to_json(r.partition)},
            {"chosen", {{"r", r.r}, {"r_prime", r.r_prime}, {"level", r.level}, {"degree", r.degree}}},
            {"trace", r.trace}};
}

inline json to_json(const SteerResult& s) {
    return {{"F_structured",
             {{"unimodular_scalar", complex_json(s.sigma)},
              {"inner_zeros", complex_array(s.inner_zeros)},
              {"P", to_json(s.P)}}},
            {"F_coeffs", to_json(s.F_coeffs)},
            {"h", to_json(s.h)},
            {"m", s.m},
            {"Q_m", to_json(s.Q_m)},
            {"achieved",
             {{"norm_error", s.norm_error},
              {"boundary_error", s.boundary_error},
              {"isometry_bound", s.isometry_bound},
              {"identity_deviation", s.identity_deviation},
              {"reciprocal_error", s.reciprocal_error}}},
            {"delta", s.delta},
            {"zero_free",
             {{"report", to_json(s.zero_free.report)},
              {"space_error", s.zero_free.space_error},
              {"boundary_error", s.zero_free.boundary_error},
              {"chosen",
               {{"r", s.zero_free.r},
                {"r_prime", s.zero_free.r_prime},
                {"level", s.zero_free.level},
                {"degree", s.zero_free.degree}}},
              {"trace", s.zero_free.trace}}},
            {"diagnostics", s.diagnostics}};
}

inline json error_json(const Error& e) {
    return {{"kind", to_string(e.kind())}, {"message", e.what()}, {"details", e.details()}};
}

// ---- parsing ----

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::invalid_input, "cannot open input file", {{"path", path}});
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        fail(ErrorKind::invalid_input, std::string("malformed JSON: ") + ex.what(), {{"path", path}});
    }
}

inline cplx parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(ErrorKind::invalid_input, "complex numbers are [re, im] pairs");
}

inline CoeffSeries parse_coeff_series(const json& j) {
    if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty())
        fail(ErrorKind::invalid_input, "coefficient file needs a nonempty \"coeffs\" array");
    std::vector<cplx> c;
    for (const auto& e : j["coeffs"]) c.push_back(parse_complex(e));
    double tail = j.value("tail_bound", 0.0);
    return CoeffSeries(std::move(c), tail);
}

inline BoundarySet parse_boundary_set(const json& j) {
    if (!j.is_object()) fail(ErrorKind::invalid_input, "set file must be a JSON object");
    BoundarySet e;
    if (j.contains("points"))
        for (const auto& p : j["points"]) {
            if (!p.is_number()) fail(ErrorKind::invalid_input, "points are angles in radians");
            e.points.push_back(p.get<double>());
        }
    if (j.contains("arcs"))
        for (const auto& a : j["arcs"]) {
            if (!a.is_array() || a.size() != 2) fail(ErrorKind::invalid_input, "arcs are [center, half_width] pairs");
            e.arcs.push_back({a[0].get<double>(), a[1].get<double>()});
        }
    e.sample_density = j.value("sample_density", 256.0);
    return BoundarySet::normalized(std::move(e));
}

/// Target file: {"targets": [{"theta": t, "value": [re, im]}, ...]} or {"values": [...]} aligned with `points`.
inline std::vector<std::pair<double, cplx>> parse_targets(const json& j, const std::vector<double>& file_points) {
    std::vector<std::pair<double, cplx>> out;
    if (j.contains("targets")) {
        for (const auto& t : j["targets"]) out.emplace_back(t.at("theta").get<double>(), parse_complex(t.at("value")));
        return out;
    }
    if (j.contains("values")) {
        const auto& v = j["values"];
        if (v.size() != file_points.size())
            fail(ErrorKind::invalid_input, "\"values\" must align with the points of the set file");
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(file_points[i], parse_complex(v[i]));
        return out;
    }
    fail(ErrorKind::invalid_input, "target file needs \"targets\" or \"values\"");
}

/// Write-temp-then-rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::invalid_input, "cannot write output file", {{"path", tmp.string()}});
        out << text;
        if (!out) fail(ErrorKind::invalid_input, "write failed", {{"path", tmp.string()}});
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace opa::io
