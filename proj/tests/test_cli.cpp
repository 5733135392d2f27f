#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "virlab/cli_harness.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"virlab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return virlab::cli::run(int(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("virlab_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

const char* kPerturbConfig = R"({
  "grid": {"n_t": 41, "n_x": 201, "T": 1.0, "x_max": 12.0},
  "path": {"family": "gaussian_loop", "amplitude": 0.1},
  "order": {"k": 1, "m": 2, "n": 1},
  "a": 1,
  "epsilons": [0.2, 0.1]
})";

} // namespace

TEST_CASE("energy subcommand: constant path gives an E = 0 row") {
    fs::path d = fresh_dir("energy");
    write(d / "cfg.json", R"({
      "grid": {"n_t": 21, "n_x": 101, "T": 1.0, "x_max": 12.0},
      "path": {"family": "gaussian_loop", "amplitude": 0.0}
    })");
    CHECK(run_cli({"energy", "--config", (d / "cfg.json").string(), "--out", d.string()}) == 0);
    std::string csv = slurp(d / "energy.csv");
    std::istringstream is(csv);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "energy,central_defect,length,energy_virasoro");
    const double e = std::stod(row.substr(0, row.find(',')));
    CHECK(std::abs(e) < 1e-25);
}

TEST_CASE("malformed config exits 4 without partial artifacts") {
    fs::path d = fresh_dir("badcfg");
    write(d / "cfg.json", "{ not json");
    CHECK(run_cli({"perturb", "--config", (d / "cfg.json").string(), "--out", (d / "out").string()}) == 4);
    CHECK(!fs::exists(d / "out" / "perturb.csv"));
    // increasing eps list is a config error too
    write(d / "cfg2.json", R"({"epsilons": [0.1, 0.2]})");
    CHECK(run_cli({"perturb", "--config", (d / "cfg2.json").string(), "--out", (d / "out").string()}) == 4);
    CHECK(!fs::exists(d / "out" / "perturb.csv"));
}

TEST_CASE("constant path in the sweep is an invariant violation (exit 2)") {
    fs::path d = fresh_dir("nosite");
    write(d / "cfg.json", R"({
      "grid": {"n_t": 21, "n_x": 101, "T": 1.0, "x_max": 12.0},
      "path": {"family": "gaussian_loop", "amplitude": 0.0},
      "epsilons": [0.1]
    })");
    CHECK(run_cli({"perturb", "--config", (d / "cfg.json").string(), "--out", d.string()}) == 2);
}

TEST_CASE("empty sweep produces a header-only CSV") {
    fs::path d = fresh_dir("empty");
    write(d / "cfg.json", R"({
      "grid": {"n_t": 21, "n_x": 101, "T": 1.0, "x_max": 12.0},
      "path": {"family": "gaussian_loop"},
      "epsilons": []
    })");
    CHECK(run_cli({"perturb", "--config", (d / "cfg.json").string(), "--out", d.string()}) == 0);
    std::string csv = slurp(d / "perturb.csv");
    CHECK(csv ==
          "eps,delta_e,closeness,predicted,ratio,endpoint_residual_0,endpoint_residual_T\n");
}

TEST_CASE("reruns are byte identical") {
    fs::path d1 = fresh_dir("det1");
    fs::path d2 = fresh_dir("det2");
    write(d1 / "cfg.json", kPerturbConfig);
    CHECK(run_cli({"perturb", "--config", (d1 / "cfg.json").string(), "--out", d1.string(), "--svg"}) == 0);
    CHECK(run_cli({"perturb", "--config", (d1 / "cfg.json").string(), "--out", d2.string(), "--svg"}) == 0);
    CHECK(slurp(d1 / "perturb.csv") == slurp(d2 / "perturb.csv"));
    CHECK(slurp(d1 / "perturb_summary.json") == slurp(d2 / "perturb_summary.json"));
    CHECK(slurp(d1 / "perturb.svg") == slurp(d2 / "perturb.svg"));
}

TEST_CASE("seeded random runs honor the seed override") {
    fs::path d1 = fresh_dir("seed1");
    fs::path d2 = fresh_dir("seed2");
    fs::path d3 = fresh_dir("seed3");
    const char* cfg = R"({
      "grid": {"n_t": 41, "n_x": 201, "T": 1.0, "x_max": 12.0},
      "path": {"family": "random", "seed": 5},
      "epsilons": [0.1]
    })";
    write(d1 / "cfg.json", cfg);
    CHECK(run_cli({"perturb", "--config", (d1 / "cfg.json").string(), "--out", d1.string()}) == 0);
    CHECK(run_cli({"perturb", "--config", (d1 / "cfg.json").string(), "--out", d2.string(), "--seed", "5"}) == 0);
    CHECK(run_cli({"perturb", "--config", (d1 / "cfg.json").string(), "--out", d3.string(), "--seed", "9"}) == 0);
    CHECK(slurp(d1 / "perturb.csv") == slurp(d2 / "perturb.csv"));
    CHECK(slurp(d1 / "perturb.csv") != slurp(d3 / "perturb.csv"));
}

TEST_CASE("SVG markers agree with the CSV data") {
    fs::path d = fresh_dir("svg");
    write(d / "cfg.json", kPerturbConfig);
    CHECK(run_cli({"perturb", "--config", (d / "cfg.json").string(), "--out", d.string(), "--svg"}) == 0);

    // parse CSV: eps, delta_e, closeness columns
    std::vector<double> eps, de, cl;
    {
        std::istringstream is(slurp(d / "perturb.csv"));
        std::string line;
        std::getline(is, line);
        while (std::getline(is, line)) {
            std::istringstream ls(line);
            std::string tok;
            std::vector<double> row;
            while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
            eps.push_back(row[0]);
            de.push_back(row[1]);
            cl.push_back(row[2]);
        }
    }
    REQUIRE(eps.size() == 2);

    // parse SVG circles
    std::string svg = slurp(d / "perturb.svg");
    struct Pt { std::string series; double eps, value, cx, cy; };
    std::vector<Pt> pts;
    std::size_t pos = 0;
    auto attr = [&](const std::string& s, const char* name) {
        const std::string key = std::string(name) + "=\"";
        const auto a = s.find(key);
        REQUIRE(a != std::string::npos);
        const auto b = s.find('"', a + key.size());
        return s.substr(a + key.size(), b - a - key.size());
    };
    while ((pos = svg.find("<circle", pos)) != std::string::npos) {
        const auto end = svg.find("/>", pos);
        const std::string tag = svg.substr(pos, end - pos);
        pts.push_back({attr(tag, "data-series"), std::stod(attr(tag, "data-eps")),
                       std::stod(attr(tag, "data-value")), std::stod(attr(tag, "cx")),
                       std::stod(attr(tag, "cy"))});
        pos = end;
    }
    REQUIRE(pts.size() == 4);

    // recompute the log-log mapping over the union of both series
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        for (double v : {de[i], cl[i]}) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
        xmin = std::min(xmin, eps[i]);
        xmax = std::max(xmax, eps[i]);
    }
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    auto X = [&](double e) {
        return ml + (std::log10(e) - std::log10(xmin)) / (std::log10(xmax) - std::log10(xmin)) *
                        (W - ml - mr);
    };
    auto Y = [&](double v) {
        return H - mb - (std::log10(v) - std::log10(ymin)) / (std::log10(ymax) - std::log10(ymin)) *
                            (H - mt - mb);
    };
    for (const Pt& p : pts) {
        CHECK(p.cx == doctest::Approx(X(p.eps)).epsilon(1e-6));
        CHECK(p.cy == doctest::Approx(Y(p.value)).epsilon(1e-6));
        const double want = p.series == "delta_e" ? de[p.eps == eps[0] ? 0 : 1]
                                                  : cl[p.eps == eps[0] ? 0 : 1];
        CHECK(p.value == doctest::Approx(want).epsilon(1e-12));
    }
    // decade gridlines present and inside the frame
    CHECK(svg.find("data-decade-y") != std::string::npos);
}

TEST_CASE("pinned perturb sweep through the CLI: positive savings, cubic slope") {
    fs::path d = fresh_dir("pinned");
    write(d / "cfg.json", R"({
      "grid": {"n_t": 101, "n_x": 401, "T": 1.0, "x_max": 15.0},
      "path": {"family": "gaussian_loop", "amplitude": 0.1},
      "order": {"k": 1, "m": 2, "n": 1},
      "a": 1,
      "epsilons": [0.2, 0.1, 0.05, 0.025]
    })");
    CHECK(run_cli({"perturb", "--config", (d / "cfg.json").string(), "--out", d.string()}) == 0);
    std::istringstream is(slurp(d / "perturb.csv"));
    std::string line;
    std::getline(is, line);
    int rows = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        std::getline(ls, tok, ',');
        CHECK(std::stod(tok) > 0.0);  // delta_e column
        ++rows;
    }
    CHECK(rows == 4);
    const std::string js = slurp(d / "perturb_summary.json");
    const std::string key = "\"slope_delta_e\": ";
    const auto pos = js.find(key);
    REQUIRE(pos != std::string::npos);
    const double slope = std::stod(js.substr(pos + key.size()));
    CHECK(slope >= 2.7);
    CHECK(slope <= 3.3);
}

TEST_CASE("unknown family and missing config are config errors") {
    fs::path d = fresh_dir("family");
    write(d / "cfg.json", R"({"path": {"family": "nope"}, "epsilons": []})");
    CHECK(run_cli({"perturb", "--config", (d / "cfg.json").string(), "--out", d.string()}) == 4);
    CHECK(run_cli({"perturb", "--config", (d / "missing.json").string(), "--out", d.string()}) == 4);
}
