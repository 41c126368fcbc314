#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "qgdirac/errors.hpp"
#include "qgdirac/nlse.hpp"
#include "qgdirac/sweep.hpp"

using namespace qgdirac;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

SweepConfig small_config() {
  return parse_sweep_config(R"({"graph": "line", "m": 1, "p": 3, "c_list": [5, 10, 20],
                               "h": 0.05, "trunc_length": 20, "seed": 0, "out_dir": "out"})");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("qgdirac_sweep_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("slope fit") {
  std::vector<std::pair<double, double>> inv, flat;
  for (double c : {10.0, 20.0, 40.0, 80.0}) {
    inv.emplace_back(c, 1.0 / c);
    flat.emplace_back(c, 7.0);
  }
  CHECK(std::abs(fit_rate(inv) + 1.0) <= 1e-10);
  CHECK(std::abs(fit_rate(flat)) <= 1e-12);
  CHECK(code_of([&] { fit_rate({{1.0, 1.0}, {2.0, 2.0}}); }) == ErrorCode::InsufficientData);
  CHECK(code_of([&] { fit_rate({{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}}); }) == ErrorCode::DomainError);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  CHECK(cfg.c_list.size() == 3u);
  CHECK(parse_sweep_config(cfg.to_json()).c_list == cfg.c_list);
  CHECK(code_of([] {
          parse_sweep_config(R"({"graph": "line", "m": 1, "p": 3, "c_list": [1], "h": 0.1,
                                 "trunc_length": 5, "seed": 0, "out_dir": ".", "workers": 2})");
        }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] {
          parse_sweep_config(R"({"graph": "line", "m": 1, "p": 3, "c_list": [20, 10], "h": 0.1,
                                 "trunc_length": 5, "seed": 0, "out_dir": "."})");
        }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_sweep_config(R"({"graph": "line"})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { read_sweep_config("/nonexistent/config.json"); }) == ErrorCode::IoError);

  auto empty = parse_sweep_config(R"({"graph": "line", "m": 1, "p": 3, "c_list": [], "h": 0.1,
                                      "trunc_length": 5, "seed": 0, "out_dir": "."})");
  CHECK(code_of([&] { run_sweep(empty); }) == ErrorCode::EmptySweep);
}

TEST_CASE("shipped config resolves its graph file") {
  auto cfg = read_sweep_config(fs::path(QGDIRAC_DATA_DIR) / "configs" / "sweep_default.json");
  CHECK(cfg.c_list == std::vector<double>{10, 20, 40, 80});
  CHECK(build_graph(cfg.graph_spec()).core_length() == doctest::Approx(1.0));
}

TEST_CASE("small sweep, report files and determinism") {
  auto cfg = small_config();
  auto report = run_sweep(cfg);
  REQUIRE_FALSE(report.failed);
  REQUIRE(report.rows.size() == 3u);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    CHECK(r.c == cfg.c_list[i]);
    CHECK(r.residual <= 1e-10);
    CHECK(r.omega_minus_mc2 < 0.0);
    if (i > 0) CHECK(r.h1_u2 < report.rows[i - 1].h1_u2);
  }
  CHECK(report.h1_u2_slope < -0.5);
  CHECK(report.h1_u2_slope > -1.5);

  auto dir = scratch_dir("a");
  emit_report(report, dir);
  auto csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind(kSweepCsvHeader, 0) == 0);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) CHECK(std::count(line.begin(), line.end(), ',') == 8);

  auto back = read_sweep_csv(dir / "sweep.csv");
  REQUIRE(back.size() == report.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].c == report.rows[i].c);
    CHECK(back[i].omega == report.rows[i].omega);
    CHECK(back[i].omega_minus_mc2 == report.rows[i].omega_minus_mc2);
    CHECK(back[i].l2_u2 == report.rows[i].l2_u2);
    CHECK(back[i].h1_u2 == report.rows[i].h1_u2);
    CHECK(back[i].h1_u1_minus_g == report.rows[i].h1_u1_minus_g);
    CHECK(back[i].action == report.rows[i].action);
    CHECK(back[i].residual == report.rows[i].residual);
    CHECK(back[i].newton_iters == report.rows[i].newton_iters);
  }

  auto manifest = nlohmann::json::parse(slurp(dir / "sweep_manifest.json"));
  CHECK(manifest["sign_convention"] == kNlseSignConvention);
  CHECK(manifest["failed"] == false);
  CHECK(manifest["config"]["c_list"].size() == 3u);
  CHECK(fs::exists(dir / "sweep.gp"));

  auto again = run_sweep(cfg);
  auto dir2 = scratch_dir("b");
  emit_report(again, dir2);
  CHECK(slurp(dir2 / "sweep.csv") == csv);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("failed run keeps a manifest and no silent rows") {
  auto cfg = parse_sweep_config(R"({"graph": "line", "m": 1, "p": 3, "c_list": [5, 10], "h": 0.05,
                                    "trunc_length": 3, "seed": 0, "out_dir": "."})");
  auto report = run_sweep(cfg);
  CHECK(report.failed);
  CHECK(report.rows.size() < cfg.c_list.size());
  CHECK(report.error.find("NoDecay") != std::string::npos);
  auto dir = scratch_dir("failed");
  emit_report(report, dir);
  auto manifest = nlohmann::json::parse(slurp(dir / "sweep_manifest.json"));
  CHECK(manifest["failed"] == true);
  CHECK(manifest["expected_rows"] == 2);
  fs::remove_all(dir);
}

TEST_CASE("unwritable output") {
  auto report = SweepReport{};
  CHECK(code_of([&] { emit_report(report, "/proc/qgdirac_no_such_dir"); }) == ErrorCode::IoError);
}
