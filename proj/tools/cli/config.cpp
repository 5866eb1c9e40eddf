#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace swcli {

double SystemConfig::max_gap() const {
    if (energies.size() < 2) return 0.0;
    return energies.back() - energies.front();
}

double PacketConfig::resolved_sigma_p(double max_gap) const {
    if (sigma_p) return *sigma_p;
    return *sigma_bar_p * max_gap / resolved_v0();
}

double PacketConfig::resolved_x0(double max_gap, double hbar) const {
    if (x0) return *x0;
    // one full Bohr revival of free flight keeps the collision-time coherences
    // equal to the t = 0 ones
    if (max_gap > 0.0) return -2.0 * std::numbers::pi * hbar * resolved_v0() / max_gap;
    return -10.0 * hbar / (2.0 * resolved_sigma_p(max_gap));
}

double PotentialConfig::total_width() const {
    double w = 0.0;
    for (const auto& s : segments) w += s.width;
    return w;
}

namespace {

class Validator {
public:
    void fail(const std::string& path, const std::string& msg) {
        problems_.push_back(path + ": " + msg);
    }
    void finish() const {
        if (problems_.empty()) return;
        std::ostringstream out;
        out << problems_.size() << " config problem(s):";
        for (const auto& p : problems_) out << "\n  - " << p;
        throw ConfigError(out.str());
    }
    bool ok() const { return problems_.empty(); }

private:
    std::vector<std::string> problems_;
};

std::vector<double> parse_complex_matrix(const json& node_re, const json* node_im, int dim,
                                         const std::string& path, Validator& v) {
    std::vector<double> out(static_cast<std::size_t>(2 * dim * dim), 0.0);
    const auto fill = [&](const json& node, int offset, const std::string& label) {
        if (!node.is_array() || static_cast<int>(node.size()) != dim) {
            v.fail(path + "." + label, "must be a " + std::to_string(dim) + "x" +
                                           std::to_string(dim) + " array of rows");
            return;
        }
        for (int i = 0; i < dim; ++i) {
            const auto& row = node[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != dim) {
                v.fail(path + "." + label, "row " + std::to_string(i) + " has the wrong length");
                return;
            }
            for (int j = 0; j < dim; ++j)
                out[static_cast<std::size_t>(2 * (i * dim + j) + offset)] =
                    row[static_cast<std::size_t>(j)].get<double>();
        }
    };
    fill(node_re, 0, "re");
    if (node_im) fill(*node_im, 1, "im");
    return out;
}

} // namespace

std::vector<PotentialSegment> staircase(const std::function<double(double)>& profile,
                                        double width, int n_steps) {
    if (!(width > 0.0) || n_steps < 1)
        throw ConfigError("staircase needs width > 0 and at least one step");
    std::vector<PotentialSegment> segs(static_cast<std::size_t>(n_steps));
    const double h = width / n_steps;
    for (int i = 0; i < n_steps; ++i)
        segs[static_cast<std::size_t>(i)] = {h, profile((i + 0.5) * h)};
    return segs;
}

ExperimentConfig parse_config(const json& doc) {
    Validator v;
    ExperimentConfig cfg;

    // ----- system -----
    if (!doc.contains("system")) {
        v.fail("system", "block is required");
    } else {
        const auto& sys = doc["system"];
        if (!sys.contains("energies") || !sys["energies"].is_array() || sys["energies"].empty()) {
            v.fail("system.energies", "must be a non-empty array");
        } else {
            cfg.system.energies = sys["energies"].get<std::vector<double>>();
            for (std::size_t j = 0; j + 1 < cfg.system.energies.size(); ++j)
                if (!(cfg.system.energies[j] < cfg.system.energies[j + 1]))
                    v.fail("system.energies", "must be strictly ascending");
        }
        cfg.system.hbar = sys.value("hbar", 1.0);
        if (!(cfg.system.hbar > 0.0)) v.fail("system.hbar", "must be positive");
        if (!sys.contains("coupling_re")) {
            v.fail("system.coupling_re", "block is required");
        } else if (!cfg.system.energies.empty()) {
            const json* im = sys.contains("coupling_im") ? &sys["coupling_im"] : nullptr;
            cfg.system.coupling = parse_complex_matrix(sys["coupling_re"], im,
                                                       cfg.system.dim(), "system", v);
        }
    }

    // ----- state -----
    if (!doc.contains("state")) {
        v.fail("state", "block is required");
    } else {
        const auto& st = doc["state"];
        const std::string kind = st.value("kind", "");
        if (kind == "thermal") {
            cfg.state.kind = StateConfig::Kind::thermal;
        } else if (kind == "coherent_thermal") {
            cfg.state.kind = StateConfig::Kind::coherent_thermal;
        } else if (kind == "matrix") {
            cfg.state.kind = StateConfig::Kind::matrix;
        } else {
            v.fail("state.kind", "must be thermal, coherent_thermal, or matrix");
        }
        cfg.state.beta = st.value("beta", 1.0);
        if (!std::isfinite(cfg.state.beta)) v.fail("state.beta", "must be finite");
        if (cfg.state.kind == StateConfig::Kind::matrix) {
            if (!st.contains("matrix_re")) {
                v.fail("state.matrix_re", "required for kind=matrix");
            } else if (!cfg.system.energies.empty()) {
                const json* im = st.contains("matrix_im") ? &st["matrix_im"] : nullptr;
                cfg.state.matrix =
                    parse_complex_matrix(st["matrix_re"], im, cfg.system.dim(), "state", v);
            }
        }
    }

    // ----- packet -----
    if (!doc.contains("packet")) {
        v.fail("packet", "block is required");
    } else {
        const auto& pk = doc["packet"];
        auto opt = [&](const char* key) -> std::optional<double> {
            if (!pk.contains(key)) return std::nullopt;
            return pk[key].get<double>();
        };
        cfg.packet.p0 = opt("p0");
        cfg.packet.v0 = opt("v0");
        cfg.packet.sigma_p = opt("sigma_p");
        cfg.packet.sigma_bar_p = opt("sigma_bar_p");
        cfg.packet.x0 = opt("x0");
        cfg.packet.mass = pk.value("mass", 1.0);
        if (!(cfg.packet.mass > 0.0)) v.fail("packet.mass", "must be positive");
        if (cfg.packet.p0.has_value() == cfg.packet.v0.has_value())
            v.fail("packet", "exactly one of p0 and v0 must be set (both or neither found)");
        if (cfg.packet.sigma_p.has_value() == cfg.packet.sigma_bar_p.has_value())
            v.fail("packet",
                   "exactly one of sigma_p and sigma_bar_p must be set (both or neither found)");
        if (cfg.packet.sigma_bar_p && !cfg.system.energies.empty() &&
            cfg.system.max_gap() == 0.0)
            v.fail("packet.sigma_bar_p", "needs a system with a non-zero energy gap");
        if (cfg.packet.p0 && !(*cfg.packet.p0 > 0.0)) v.fail("packet.p0", "must be positive");
        if (cfg.packet.v0 && !(*cfg.packet.v0 > 0.0)) v.fail("packet.v0", "must be positive");
        if (cfg.packet.sigma_p && !(*cfg.packet.sigma_p > 0.0))
            v.fail("packet.sigma_p", "must be positive");
        if (cfg.packet.sigma_bar_p && !(*cfg.packet.sigma_bar_p > 0.0))
            v.fail("packet.sigma_bar_p", "must be positive");
        if (cfg.packet.x0 && !(*cfg.packet.x0 < 0.0))
            v.fail("packet.x0", "must be negative (packet starts left of the potential)");
    }

    // ----- potential -----
    if (!doc.contains("potential")) {
        v.fail("potential", "block is required");
    } else {
        const auto& pot = doc["potential"];
        const std::string kind = pot.value("kind", "barrier");
        if (kind == "barrier") {
            const double height = pot.value("height", 0.0);
            const double width = pot.value("width", 0.0);
            if (!(width > 0.0)) v.fail("potential.width", "must be positive");
            cfg.potential.segments = {{width, height}};
        } else if (kind == "segments") {
            if (!pot.contains("segments") || !pot["segments"].is_array() ||
                pot["segments"].empty()) {
                v.fail("potential.segments", "must be a non-empty array");
            } else {
                for (std::size_t i = 0; i < pot["segments"].size(); ++i) {
                    const auto& seg = pot["segments"][i];
                    const double w = seg.value("width", 0.0);
                    if (!(w > 0.0))
                        v.fail("potential.segments[" + std::to_string(i) + "].width",
                               "must be positive");
                    cfg.potential.segments.push_back({w, seg.value("value", 0.0)});
                }
            }
        } else if (kind == "gaussian_staircase") {
            const double height = pot.value("height", 1.0);
            const double width = pot.value("width", 1.0);
            const double center = pot.value("center", width / 2.0);
            const double sigma = pot.value("sigma", width / 6.0);
            const int steps = pot.value("steps", 32);
            if (!(width > 0.0) || !(sigma > 0.0) || steps < 1) {
                v.fail("potential", "gaussian_staircase needs width > 0, sigma > 0, steps >= 1");
            } else {
                cfg.potential.segments = staircase(
                    [=](double x) {
                        const double d = (x - center) / sigma;
                        return height * std::exp(-0.5 * d * d);
                    },
                    width, steps);
            }
        } else {
            v.fail("potential.kind", "must be barrier, segments, or gaussian_staircase");
        }
    }

    // ----- grid -----
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        if (g.contains("lo")) cfg.grid.lo = g["lo"].get<double>();
        if (g.contains("hi")) cfg.grid.hi = g["hi"].get<double>();
        cfg.grid.points = g.value("points", 4001);
        cfg.grid.span_sigmas = g.value("span_sigmas", 8.0);
        if (cfg.grid.points < 2) v.fail("grid.points", "must be at least 2");
        if (!(cfg.grid.span_sigmas > 0.0)) v.fail("grid.span_sigmas", "must be positive");
        if (cfg.grid.lo.has_value() != cfg.grid.hi.has_value())
            v.fail("grid", "lo and hi must be given together");
        if (cfg.grid.lo && cfg.grid.hi && !(*cfg.grid.lo < *cfg.grid.hi))
            v.fail("grid", "lo must be below hi");
    }

    // ----- run -----
    if (doc.contains("run")) {
        const auto& r = doc["run"];
        cfg.run.threads = r.value("threads", 0);
        cfg.run.tol = r.value("tol", 1e-10);
        if (!(cfg.run.tol > 0.0)) v.fail("run.tol", "must be positive");
        if (r.contains("fig1_sigma_bars"))
            cfg.run.fig1_sigma_bars = r["fig1_sigma_bars"].get<std::vector<double>>();
        if (r.contains("sweep")) {
            const auto& s = r["sweep"];
            SweepConfig sweep;
            sweep.parameter = s.value("parameter", "");
            const bool known = sweep.parameter == "sigma_bar_p" || sweep.parameter == "sigma_p" ||
                               sweep.parameter == "mass" || sweep.parameter == "v0";
            if (!known)
                v.fail("run.sweep.parameter", "must be sigma_bar_p, sigma_p, mass, or v0");
            if (s.contains("values")) {
                sweep.values = s["values"].get<std::vector<double>>();
            } else {
                const double from = s.value("from", 0.0);
                const double to = s.value("to", 0.0);
                const int points = s.value("points", 0);
                const bool log_spacing = s.value("log_spacing", false);
                if (points < 2 || !(from > 0.0 && to > from)) {
                    v.fail("run.sweep", "needs values[] or from/to/points with 0 < from < to");
                } else {
                    for (int i = 0; i < points; ++i) {
                        const double f = static_cast<double>(i) / (points - 1);
                        sweep.values.push_back(log_spacing
                                                   ? from * std::pow(to / from, f)
                                                   : from + f * (to - from));
                    }
                }
            }
            if (sweep.values.empty()) v.fail("run.sweep.values", "must not be empty");
            cfg.run.sweep = std::move(sweep);
        }
    }

    // ----- clock (resource subcommand) -----
    if (doc.contains("clock")) {
        const auto& c = doc["clock"];
        cfg.clock.gamma = c.value("gamma", 1.0);
        if (!(cfg.clock.gamma > 0.0)) v.fail("clock.gamma", "must be positive");
        if (c.contains("p0")) cfg.clock.p0 = c["p0"].get<double>();
        if (c.contains("sigma_p")) cfg.clock.sigma_p = c["sigma_p"].get<double>();
        if (c.contains("x0")) cfg.clock.x0 = c["x0"].get<double>();
        if (c.contains("points")) cfg.clock.points = c["points"].get<int>();
        cfg.clock.span_sigmas = c.value("span_sigmas", 8.0);
        if (!(cfg.clock.span_sigmas > 0.0)) v.fail("clock.span_sigmas", "must be positive");
    }

    v.finish();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig fig1_config() {
    json doc = {
        {"system",
         {{"energies", {-0.5, 0.5}},
          {"coupling_re", {{0.0, 1.0}, {1.0, 0.0}}},
          {"hbar", 1.0}}},
        {"state", {{"kind", "thermal"}, {"beta", 1.0}}},
        {"packet",
         {{"v0", 1.0},
          {"mass", 1000.0},
          {"sigma_bar_p", 0.05},
          {"x0", -2.0 * std::numbers::pi}}},
        {"potential", {{"kind", "barrier"}, {"height", 1.0}, {"width", 1.0}}},
        {"grid", {{"points", 4001}, {"span_sigmas", 8.0}}},
        {"run",
         {{"threads", 0},
          {"tol", 1e-10},
          {"fig1_sigma_bars", {0.05, 5.0}},
          {"sweep",
           {{"parameter", "sigma_bar_p"},
            {"from", 0.05},
            {"to", 20.0},
            {"points", 13},
            {"log_spacing", true}}}}},
    };
    return parse_config(doc);
}

json ExperimentConfig::echo() const {
    const double max_gap = system.max_gap();
    json out;
    out["version"] = "0.1.0";
    out["system"] = {{"energies", system.energies}, {"hbar", system.hbar}};
    out["state"]["kind"] = state.kind == StateConfig::Kind::thermal ? "thermal"
                           : state.kind == StateConfig::Kind::coherent_thermal
                               ? "coherent_thermal"
                               : "matrix";
    out["state"]["beta"] = state.beta;
    out["packet"] = {{"p0", packet.resolved_p0()},
                     {"sigma_p", packet.resolved_sigma_p(max_gap)},
                     {"x0", packet.resolved_x0(max_gap, system.hbar)},
                     {"mass", packet.mass}};
    json segs = json::array();
    for (const auto& s : potential.segments) segs.push_back({{"width", s.width}, {"value", s.value}});
    out["potential"]["segments"] = segs;
    out["grid"] = {{"points", grid.points}, {"span_sigmas", grid.span_sigmas}};
    if (grid.lo) out["grid"]["lo"] = *grid.lo;
    if (grid.hi) out["grid"]["hi"] = *grid.hi;
    out["run"] = {{"threads", run.threads}, {"tol", run.tol}};
    if (run.sweep) {
        out["run"]["sweep"] = {{"parameter", run.sweep->parameter},
                               {"values", run.sweep->values}};
    }
    return out;
}

} // namespace swcli
