#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using swcli::ExperimentConfig;
using swcli::json;

namespace {

json minimal_doc() {
    return json{
        {"system", {{"energies", {-0.5, 0.5}}, {"coupling_re", {{0.0, 1.0}, {1.0, 0.0}}}}},
        {"state", {{"kind", "thermal"}, {"beta", 1.0}}},
        {"packet", {{"v0", 1.0}, {"mass", 1000.0}, {"sigma_bar_p", 0.05}}},
        {"potential", {{"kind", "barrier"}, {"height", 1.0}, {"width", 1.0}}},
        {"grid", {{"points", 801}}},
    };
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("swcli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// parse a CSV body (skipping the # header block), returning rows of cells
std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

fs::path write_config(const json& doc, const std::string& name) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << doc.dump(2);
    return p;
}

} // namespace

TEST_CASE("load_config: minimal barrier config") {
    const auto path = write_config(minimal_doc(), "swcli_minimal.json");
    const ExperimentConfig cfg = swcli::load_config(path.string());
    CHECK(cfg.system.dim() == 2);
    CHECK(cfg.packet.resolved_p0() == doctest::Approx(1000.0));
    CHECK(cfg.packet.resolved_sigma_p(cfg.system.max_gap()) == doctest::Approx(0.05));
    // default x0 is one Bohr revival upstream
    CHECK(cfg.packet.resolved_x0(1.0, 1.0) == doctest::Approx(-6.283185307179586));
    CHECK(cfg.potential.segments.size() == 1);
    CHECK(cfg.potential.total_width() == doctest::Approx(1.0));
}

TEST_CASE("load_config: sigma exclusivity names the failing block") {
    auto doc = minimal_doc();
    doc["packet"]["sigma_p"] = 0.05;  // now both are set
    const auto path = write_config(doc, "swcli_exclusive.json");
    try {
        swcli::load_config(path.string());
        FAIL("expected a ConfigError");
    } catch (const swcli::ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("sigma_p") != std::string::npos);
        CHECK(msg.find("sigma_bar_p") != std::string::npos);
    }
}

TEST_CASE("load_config: every validation failure is reported, not just the first") {
    auto doc = minimal_doc();
    doc["state"]["kind"] = "bogus";
    doc["packet"]["p0"] = 1000.0;  // both p0 and v0
    doc["grid"]["points"] = 1;
    const auto path = write_config(doc, "swcli_multi.json");
    try {
        swcli::load_config(path.string());
        FAIL("expected a ConfigError");
    } catch (const swcli::ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3 config problem") != std::string::npos);
        CHECK(msg.find("state.kind") != std::string::npos);
        CHECK(msg.find("exactly one of p0 and v0") != std::string::npos);
        CHECK(msg.find("grid.points") != std::string::npos);
    }
}

TEST_CASE("load_config: parse errors carry position info") {
    const fs::path p = fs::temp_directory_path() / "swcli_broken.json";
    std::ofstream(p) << "{ \"system\": ";
    CHECK_THROWS_AS(swcli::load_config(p.string()), swcli::ConfigError);
}

TEST_CASE("fig1_config: matches the reference parameter set") {
    const ExperimentConfig cfg = swcli::fig1_config();
    CHECK(cfg.system.energies == std::vector<double>{-0.5, 0.5});  // Delta_S = 1
    CHECK(cfg.system.hbar == 1.0);
    // coupling J sigma_x with J = 1
    CHECK(cfg.system.coupling[2] == 1.0);
    CHECK(cfg.system.coupling[4] == 1.0);
    CHECK(cfg.system.coupling[0] == 0.0);
    CHECK(cfg.state.beta == 1.0);
    CHECK(*cfg.packet.v0 == 1.0);
    CHECK(cfg.packet.mass == 1000.0);
    REQUIRE(cfg.potential.segments.size() == 1);
    CHECK(cfg.potential.segments[0].value == 1.0);  // V0 = 1
    CHECK(cfg.potential.segments[0].width == 1.0);  // a = 1
    // and the shipped config file is the same experiment
    const ExperimentConfig shipped =
        swcli::load_config(std::string(SCATTERWORK_CONFIG_DIR) + "/fig1.json");
    CHECK(shipped.echo() == cfg.echo());
}

TEST_CASE("staircase: midpoint sampling over equal steps") {
    const auto segs = swcli::staircase([](double x) { return 2.0 * x; }, 1.0, 4);
    REQUIRE(segs.size() == 4);
    CHECK(segs[0].width == doctest::Approx(0.25));
    CHECK(segs[0].value == doctest::Approx(0.25));   // 2 * midpoint 0.125
    CHECK(segs[3].value == doctest::Approx(1.75));
    CHECK_THROWS_AS(swcli::staircase([](double) { return 0.0; }, 0.0, 4), swcli::ConfigError);
}

TEST_CASE("run_collide: emits the three-way comparison and is thread-count invariant") {
    auto doc = minimal_doc();
    const auto path = write_config(doc, "swcli_collide.json");
    const ExperimentConfig cfg = swcli::load_config(path.string());

    swcli::RunOptions opt1;
    opt1.out_dir = fresh_dir("collide1").string();
    opt1.threads = 1;
    REQUIRE(swcli::run_collide(cfg, opt1) == swcli::kExitOk);

    swcli::RunOptions opt4;
    opt4.out_dir = fresh_dir("collide4").string();
    opt4.threads = 4;
    REQUIRE(swcli::run_collide(cfg, opt4) == swcli::kExitOk);

    const auto rows = read_csv(fs::path(opt1.out_dir) / "collide.csv");
    REQUIRE(rows.size() == 802);  // header + grid points
    CHECK(rows[0] == std::vector<std::string>{"E_p", "density_initial", "density_final",
                                              "density_narrow_limit",
                                              "density_convolution_prediction"});

    // bitwise identical output at any worker count (the header echoes the
    // config, not the override)
    CHECK(slurp(fs::path(opt1.out_dir) / "collide.csv") ==
          slurp(fs::path(opt4.out_dir) / "collide.csv"));
    CHECK(slurp(fs::path(opt1.out_dir) / "collide_meta.json") ==
          slurp(fs::path(opt4.out_dir) / "collide_meta.json"));

    const auto meta = json::parse(slurp(fs::path(opt1.out_dir) / "collide_meta.json"));
    CHECK(meta["regime_report"]["overall"] == "narrow");
    CHECK(meta["tv_exact_vs_convolution"].get<double>() < 1e-2);
}

TEST_CASE("run_smatrix: transparent potential has zero defects") {
    auto doc = minimal_doc();
    doc["potential"]["height"] = 0.0;
    doc["grid"]["points"] = 60;
    const auto path = write_config(doc, "swcli_smatrix.json");
    const ExperimentConfig cfg = swcli::load_config(path.string());
    swcli::RunOptions opt;
    opt.out_dir = fresh_dir("smatrix").string();
    REQUIRE(swcli::run_smatrix(cfg, opt) == swcli::kExitOk);
    const auto rows = read_csv(fs::path(opt.out_dir) / "smatrix.csv");
    REQUIRE(rows.size() > 1);
    const auto defect_col = rows[0].size() - 1;
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::abs(std::stod(rows[i][defect_col])) < 1e-12);
}

TEST_CASE("run_sweep: mass ladder shows monotone semiclassical convergence") {
    auto doc = minimal_doc();
    doc["run"] = {{"sweep", {{"parameter", "mass"}, {"values", {100.0, 1000.0, 10000.0}}}}};
    const auto path = write_config(doc, "swcli_sweep.json");
    const ExperimentConfig cfg = swcli::load_config(path.string());
    swcli::RunOptions opt;
    opt.out_dir = fresh_dir("sweep").string();
    REQUIRE(swcli::run_sweep(cfg, opt) == swcli::kExitOk);
    const auto rows = read_csv(fs::path(opt.out_dir) / "sweep.csv");
    REQUIRE(rows.size() == 4);
    double prev = 1e9;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double defect = std::stod(rows[i][4]) + std::stod(rows[i][5]);
        CHECK(defect < prev);
        prev = defect;
    }
    CHECK(rows[1][6] == "narrow");
}

TEST_CASE("run_tpm: comb weights and averages land in the metadata") {
    const auto path = write_config(minimal_doc(), "swcli_tpm.json");
    const ExperimentConfig cfg = swcli::load_config(path.string());
    swcli::RunOptions opt;
    opt.out_dir = fresh_dir("tpm").string();
    REQUIRE(swcli::run_tpm(cfg, opt) == swcli::kExitOk);
    const auto meta = json::parse(slurp(fs::path(opt.out_dir) / "tpm_meta.json"));
    CHECK(meta["tpm_average"].get<double>() ==
          doctest::Approx(-0.2989478176728419).epsilon(1e-9));
    CHECK(meta["tpm_average_trace_form"].get<double>() ==
          doctest::Approx(meta["tpm_average"].get<double>()).epsilon(1e-12));
    const auto rows = read_csv(fs::path(opt.out_dir) / "tpm_comb.csv");
    REQUIRE(rows.size() == 4);  // header + three atoms
    double total = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i][1]);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("run_resource: clock energy table mirrors the collision columns") {
    auto doc = minimal_doc();
    doc["clock"] = {{"gamma", 2.0}, {"points", 401}};
    const auto path = write_config(doc, "swcli_resource.json");
    const ExperimentConfig cfg = swcli::load_config(path.string());
    swcli::RunOptions opt;
    opt.out_dir = fresh_dir("resource").string();
    REQUIRE(swcli::run_resource(cfg, opt) == swcli::kExitOk);
    const auto rows = read_csv(fs::path(opt.out_dir) / "resource.csv");
    REQUIRE(rows.size() == 402);
    CHECK(rows[0] == std::vector<std::string>{"E_A", "density_initial", "density_final"});
    // both densities integrate to one on the E_A grid
    for (int col : {1, 2}) {
        double acc = 0.0;
        for (std::size_t i = 1; i + 1 < rows.size(); ++i)
            acc += 0.5 * (std::stod(rows[i][static_cast<std::size_t>(col)]) +
                          std::stod(rows[i + 1][static_cast<std::size_t>(col)])) *
                   (std::stod(rows[i + 1][0]) - std::stod(rows[i][0]));
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("scatterwork binary: exit codes for config and usage errors") {
    const std::string bin = SCATTERWORK_BIN;
    const fs::path bad = fs::temp_directory_path() / "swcli_badcfg.json";
    std::ofstream(bad) << "{\"system\": {}}";
    const fs::path outdir = fresh_dir("bin");

    const auto run = [&](const std::string& args) {
        const int status = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("collide --config " + bad.string() + " --out " + outdir.string()) == 2);
    CHECK(run("collide --out " + outdir.string()) == 2);  // missing --config
    CHECK(run("fig1 --help") == 0);
    // fig1 runs from the built-in preset; a tiny grid keeps this fast
    const auto cfgpath = write_config(
        [] {
            auto d = minimal_doc();
            d["grid"]["points"] = 401;
            d["run"] = {{"fig1_sigma_bars", {0.05}},
                        {"sweep", {{"parameter", "sigma_bar_p"}, {"values", {0.05, 20.0}}}}};
            return d;
        }(),
        "swcli_fig1_small.json");
    CHECK(run("fig1 --config " + cfgpath.string() + " --out " + outdir.string()) == 0);
    CHECK(fs::exists(outdir / "panel1.csv"));
    CHECK(fs::exists(outdir / "panel3.csv"));

    // panel 3 endpoints: narrow row tracks the TPM average, broad coherent row
    // the untouched work; the drive-side columns are constant
    const auto rows = read_csv(outdir / "panel3.csv");
    REQUIRE(rows.size() == 3);
    const auto cell = [&](std::size_t r, std::size_t c) { return std::stod(rows[r][c]); };
    CHECK(std::abs(cell(1, 1) - cell(1, 3)) < 0.01);  // dEx_thermal vs tpm_average
    CHECK(std::abs(cell(2, 2) - cell(2, 5)) < 0.05);  // dEx_coherent vs untouched_coherent
    CHECK(cell(1, 3) == cell(2, 3));
    CHECK(std::abs(cell(1, 3) - cell(1, 4)) < 1e-10);  // thermal: W_tpm == W0
}
