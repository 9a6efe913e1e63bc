#include "hspec/config.hpp"
#include "hspec/errors.hpp"
#include "hspec/runner.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hspec;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(HSPEC_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hspec_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(HSPEC_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("format_number uses 12 significant digits in fixed notation") {
  CHECK(format_number(0.630929753571457) == "0.630929753571");
  CHECK(format_number(1.0) == "1.00000000000");
  CHECK(format_number(123456.789) == "123456.789000");
  CHECK(format_number(-2.5e-3) == "-0.00250000000000");
  CHECK(format_number(0.99999999999999) == "1.00000000000");
  CHECK(format_number(-0.0) == "0.00000000000");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("config round trip") {
  for (const char* name : {"middle_third.json", "step.json", "suspension.json", "gauss.json"}) {
    const RunConfig c = load_config(data(name));
    const std::string text = emit_config(c);
    CHECK(parse_config(text) == c);
    CHECK(emit_config(parse_config(text)) == text);
  }
  RunConfig c = load_config(data("middle_third.json"));
  c.model_s = GaussSpec{{1, 3}};
  c.height = EmbeddedHeight{1, HeightMap{1, 2, 0.5, 0}};
  c.run.threshold = 0.75;
  c.run.seed = 18446744073709551615ull;
  c.run.tolerances.epsilon = 0.123456789012345678;
  c.run.forbidden.clear();
  CHECK(parse_config(emit_config(c)) == c);

  FiberCoefficients f{0.1, 0.2, 0.3, 0.4, 0.5, 6, 0.7};
  c.height = SuspensionHeight{f, 0, {}, {1.25}, 1};
  CHECK(parse_config(emit_config(c)) == c);
}

TEST_CASE("config errors carry the field path") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(slurp(data("bad_row.json"))).rfind("system.transitions[1]", 0) == 0);
  const std::string base = slurp(data("step.json"));
  auto replaced = [&](const std::string& from, const std::string& to) {
    std::string t = base;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  CHECK(message(replaced("\"schema_version\": 1", "\"schema_version\": 2")).rfind("schema_version", 0) == 0);
  CHECK(message(replaced("[0.5, 1.0]", "[1.0, 0.5]")).rfind("run.t_grid", 0) == 0);
  CHECK(message(replaced("\"window\": [1]", "\"window\": [2]")).rfind("height.entries[1].window", 0) == 0);
  CHECK(message(replaced("\"window\": [1]", "\"window\": [0]")).rfind("height.entries[1].window", 0) == 0);
  CHECK(message(replaced("[0.3333333333333333, 0.3333333333333333]", "[0.5]")).rfind("model_u", 0) == 0);
  CHECK(message(replaced("\"command\": \"curve\"", "\"command\": \"plot\"")).rfind("run.command", 0) == 0);
  CHECK(message(replaced("\"radius\": 0", "\"radius\": 0, \"extra\": 1")).rfind("height.extra", 0) == 0);
  CHECK(message("{").rfind("config", 0) == 0);
  CHECK(message(replaced("[[1, 1], [1, 1]]", "[[1, 1], [0, 0]]")).rfind("system.transitions", 0) == 0);
}

TEST_CASE("dims reports the closed form") {
  const fs::path out = scratch("dims");
  REQUIRE(cli("dims --config " + data("middle_third.json") + " --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "dims.json"));
  CHECK(std::abs(j["unstable"]["pressure"]["value"].get<double>() - 0.630930) < 1e-6);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["command"] == "dims");
  CHECK(report["files"] == nlohmann::json::array({"dims.json", "report.json"}));
  CHECK_FALSE(report.contains("elapsed_seconds"));
}

TEST_CASE("curve CSV schema and example rows") {
  const fs::path out = scratch("curve");
  REQUIRE(cli("curve --config " + data("step.json") + " --out " + out.string()) == 0);
  const auto rows = lines(slurp(out / "curve.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "t,D_u,D_s,method,error");
  const auto r1 = fields(rows[1]);
  const auto r2 = fields(rows[2]);
  CHECK(std::stod(r1[0]) == 0.5);
  CHECK(std::stod(r1[1]) == 0);
  CHECK(std::stod(r1[2]) == 0);
  CHECK(std::stod(r2[0]) == 1.0);
  CHECK(std::abs(std::stod(r2[1]) - 0.6309) < 1e-4);
  CHECK(std::abs(std::stod(r2[2]) - 0.6309) < 1e-4);
  CHECK(r2[3] == "pressure-root");
  CHECK(fs::exists(out / "curve.svg"));
}

TEST_CASE("spectrum artifacts") {
  const fs::path out = scratch("spectrum");
  REQUIRE(cli("spectrum --config " + data("step.json") + " --out " + out.string()) == 0);
  const auto rows = lines(slurp(out / "spectrum.csv"));
  REQUIRE(!rows.empty());
  CHECK(rows[0] == "value,kind,period_bound");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(fields(rows[i]).size() == 3);
  const auto dims = nlohmann::json::parse(slurp(out / "spectrum_dim.json"));
  CHECK(dims["markov"]["count"] == 2);
  CHECK(dims["lagrange"]["count"] == 2);
}

TEST_CASE("curve svg") {
  DimensionCurve one{{{0.5, 0.3, 0.3, DimensionMethod::PressureRoot, 0}}};
  const std::string s1 = curve_svg(one);
  CHECK(s1.find("<svg") != std::string::npos);
  CHECK(s1.find("</svg>") != std::string::npos);
  CHECK(s1.find("<polyline") == std::string::npos);
  CHECK(s1.find(">t</text>") != std::string::npos);
  CHECK(s1.find(">dimension</text>") != std::string::npos);
  std::size_t circles = 0;
  for (std::size_t p = s1.find("<circle"); p != std::string::npos; p = s1.find("<circle", p + 1)) ++circles;
  CHECK(circles == 1);

  DimensionCurve two{{{0, 0.1, 0.1, DimensionMethod::PressureRoot, 0}, {1, 0.5, 0.5, DimensionMethod::PressureRoot, 0}}};
  const std::string s2 = curve_svg(two);
  const auto a = s2.find("points=\"") + 8;
  const std::string pts = s2.substr(a, s2.find('"', a) - a);
  std::vector<std::pair<double, double>> xy;
  std::istringstream in(pts);
  for (std::string tok; in >> tok;) {
    const auto comma = tok.find(',');
    xy.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
  }
  REQUIRE(xy.size() == 3);  // one step: across, then up
  CHECK(xy[0].second == xy[1].second);
  CHECK(xy[1].first == xy[2].first);

  DimensionCurve mono;
  for (int i = 0; i < 10; ++i) mono.samples.push_back({0.1 * i, 0.05 * i * i / 9, 0, DimensionMethod::PressureRoot, 0});
  const std::string s3 = curve_svg(mono);
  const auto b = s3.find("points=\"") + 8;
  std::istringstream in3(s3.substr(b, s3.find('"', b) - b));
  double last_x = -1, last_y = 1e9;
  for (std::string tok; in3 >> tok;) {
    const auto comma = tok.find(',');
    const double x = std::stod(tok.substr(0, comma)), y = std::stod(tok.substr(comma + 1));
    CHECK(x >= last_x);
    CHECK(y <= last_y);  // screen y grows downward
    last_x = x;
    last_y = y;
  }
  CHECK(curve_svg(mono) == s3);
  CHECK_THROWS_AS(curve_svg(DimensionCurve{}), DomainError);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch("exit");
  CHECK(cli("dims --config " + data("bad_row.json") + " --out " + out.string()) == 2);
  CHECK(cli("dims --config " + data("missing.json") + " --out " + out.string()) == 2);
  CHECK(cli("dims") == 2);
  CHECK(cli("suspend-check --config " + data("middle_third.json") + " --out " + out.string()) == 2);

  // Threshold below every value: nothing survives pruning.
  RunConfig c = load_config(data("step.json"));
  c.run.threshold = -1;
  fs::create_directories(out);
  std::ofstream(out / "low.json") << emit_config(c);
  CHECK(cli("prune --config " + (out / "low.json").string() + " --out " + out.string()) == 3);
}

TEST_CASE("commands are deterministic") {
  for (const char* cfg : {"middle_third.json", "suspension.json"}) {
    const fs::path a = scratch(std::string("det_a_") + cfg);
    const fs::path b = scratch(std::string("det_b_") + cfg);
    REQUIRE(cli(std::string("selftest --config ") + data(cfg) + " --out " + a.string()) == 0);
    REQUIRE(cli(std::string("selftest --config ") + data(cfg) + " --out " + b.string()) == 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
      ++files;
    }
    const auto report = nlohmann::json::parse(slurp(a / "report.json"));
    CHECK(report["files"].size() == files);
  }
}
