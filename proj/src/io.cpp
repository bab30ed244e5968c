#include "lepage/io.hpp"

#include <charconv>
#include <cmath>

namespace lepage {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // folds -0
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

namespace {

// JSON has no inf/nan; keep them readable as strings
json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

json numbers(std::span<const double> xs) {
    json a = json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

}  // namespace

json to_json(const SampleMeta& m, bool with_trace) {
    json j;
    j["seed"] = m.seed;
    j["lineage"] = m.lineage;
    j["terms_used"] = m.terms_used;
    j["exact_truncation"] = m.exact_truncation;
    j["converged"] = m.converged;
    j["converged_at"] = m.converged_at;
    if (!m.compensator.empty()) j["compensator"] = numbers(m.compensator);
    if (with_trace && !m.r_trace.empty()) {
        json t = json::array();
        for (const auto& row : m.r_trace) t.push_back(numbers(row));
        j["r_trace"] = std::move(t);
    }
    return j;
}

json to_json(const PathSample& ps, bool with_trace) {
    json j;
    j["grid"] = numbers(ps.grid);
    j["values"] = numbers(ps.values);
    if (ps.jumps) {
        json a = json::array();
        for (const auto& jp : *ps.jumps) a.push_back({{"tau", number(jp.time)}, {"mark", number(jp.height)}});
        j["jumps"] = std::move(a);
    }
    j["meta"] = to_json(ps.meta, with_trace);
    return j;
}

json to_json(const MarkedPP& m) {
    json a = json::array();
    for (const auto& p : m.points()) a.push_back({{"tau", number(p.tau)}, {"mark", number(p.mark)}});
    return a;
}

json to_json(const TestReport& r) {
    json j;
    j["name"] = r.name;
    j["statistic"] = number(r.statistic);
    j["p_value"] = number(r.p_value);
    j["alpha"] = r.alpha;
    j["decision"] = to_string(r.decision);
    json prov;
    prov["seed"] = r.provenance.seed;
    prov["lineage"] = r.provenance.lineage;
    prov["n_x"] = r.provenance.n_x;
    prov["n_y"] = r.provenance.n_y;
    prov["grid"] = numbers(r.provenance.grid);
    prov["permutations"] = r.provenance.permutations;
    for (const auto& [k, v] : r.provenance.extra) prov[k] = v;
    j["provenance"] = std::move(prov);
    json d = json::object();
    for (const auto& [k, v] : r.details) d[k] = number(v);
    j["details"] = std::move(d);
    return j;
}

json to_json(const IntegrabilityVerdict& v) {
    json j;
    j["mode"] = v.mode == IntegrabilityMode::abs ? "abs" : "square";
    j["estimate"] = number(v.estimate);
    j["unit_interval"] = number(v.unit_interval);
    j["tail"] = number(v.tail);
    j["verdict"] = to_string(v.verdict);
    j["draws"] = v.draws_used;
    j["converged_at"] = v.converged_at;
    j["horizon_trace"] = numbers(v.horizon_trace);
    return j;
}

void write_paths_csv(std::ostream& os, std::span<const PathSample> paths) {
    std::string buf = "path_id,t,value\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        const std::string id = std::to_string(i) + ",";
        for (std::size_t j = 0; j < p.grid.size(); ++j) {
            buf += id;
            buf += format_double(p.grid[j]);
            buf += ',';
            buf += format_double(p.values[j]);
            buf += '\n';
        }
        if (buf.size() > (1u << 20)) {
            os << buf;
            buf.clear();
        }
    }
    os << buf;
}

void write_jumps_csv(std::ostream& os, std::span<const PathSample> paths) {
    std::string buf = "path_id,tau,mark\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!paths[i].jumps) continue;
        const std::string id = std::to_string(i) + ",";
        for (const auto& jp : *paths[i].jumps) {
            buf += id;
            buf += format_double(jp.time);
            buf += ',';
            buf += format_double(jp.height);
            buf += '\n';
        }
        if (buf.size() > (1u << 20)) {
            os << buf;
            buf.clear();
        }
    }
    os << buf;
}

void write_mpp_csv(std::ostream& os, const MarkedPP& m) {
    os << "tau,mark\n";
    for (const auto& p : m.points()) os << format_double(p.tau) << ',' << format_double(p.mark) << '\n';
}

}  // namespace lepage
