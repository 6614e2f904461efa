#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "thinslab/cli.hpp"

using namespace thinslab;
using namespace thinslab::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() / ("thinslab_unit_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

const char* kSmall =
    "[domain]\nkind = disk\nradius = 1\nnx = 24\nny = 24\nlayers = 3\n"
    "[params]\neps = 0.25\nk = 0.7\n"
    "[solve]\ntol = 1e-3\n";

RunConfig small(const std::string& out, const std::string& extra = "") {
  ConfigMap m = ConfigMap::parse(std::string(kSmall) + extra);
  m.set("run.out", out, "test");
  return resolve(m, Experiment::minimize);
}

int run_args(std::vector<std::string> args, std::vector<std::string> env = {}) {
  args.insert(args.begin(), "thinslab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::vector<const char*> envp;
  for (auto& e : env) envp.push_back(e.c_str());
  envp.push_back(nullptr);
  return run(static_cast<int>(argv.size()), argv.data(), envp.data());
}

std::string error_of(const std::string& text) {
  try {
    ConfigMap::parse(text, "t.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config syntax errors carry line and column") {
    CHECK(error_of("[run\nseed = 1\n").rfind("t.ini:1:", 0) == 0);
    CHECK(error_of("[run]\nseed\n") == "t.ini:2:1: expected 'key = value'");
    CHECK(error_of("seed = 1\n").find("outside of a [section]") != std::string::npos);
    CHECK(error_of("[run]\nseed = 1\nseed = 2\n").rfind("t.ini:3:", 0) == 0);
    CHECK(error_of("[run]\nseed =\n").rfind("t.ini:2:", 0) == 0);
    CHECK(error_of("# comment\n[run]\nseed = 1 ; trailing\n").empty());
  }

  TEST_CASE("unknown keys and bad values are reported at their location") {
    try {
      resolve(ConfigMap::parse("[run]\nsede = 3\n", "t.ini"), Experiment::minimize);
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.where().rfind("t.ini:2:", 0) == 0);
    }
    CHECK_THROWS_AS(resolve(ConfigMap::parse("[params]\neps = abc\n"), Experiment::minimize), ConfigError);
    CHECK_THROWS_AS(resolve(ConfigMap::parse("[domain]\nnx = -4\n"), Experiment::minimize), ConfigError);
  }

  TEST_CASE("env and command-line overrides in order of precedence") {
    ConfigMap m = ConfigMap::parse("[run]\nseed = 3\n[solve]\nmax_iters = 10\n");
    const std::vector<const char*> env{"LCSLAB_RUN__SEED=5", "LCSLAB_SOLVE__TOL=0.5", "OTHER=1", nullptr};
    m.apply_env(env.data());
    CHECK(m.find("run.seed")->value == "5");
    m.apply_assignment("run.seed=7");
    RunConfig c = resolve(m, Experiment::minimize);
    CHECK(c.seed == 7u);
    CHECK(c.solve.max_iters == 10);
    CHECK(c.solve.tol_residual == 0.5);
    const std::vector<const char*> bad{"LCSLAB_NOSEPARATOR=1", nullptr};
    CHECK_THROWS_AS(m.apply_env(bad.data()), ConfigError);
    CHECK_THROWS_AS(m.apply_assignment("no_dot=1"), ConfigError);
  }

  TEST_CASE("config hash tracks the resolved values") {
    const RunConfig a = small("x");
    const RunConfig b = small("x");
    const RunConfig c = small("x", "[run]\nseed = 9\n");
    CHECK(a.hash.size() == 16);
    CHECK(a.hash == b.hash);
    CHECK(a.hash != c.hash);
  }

  TEST_CASE("field dump round trip and corruption") {
    TempDir t;
    const auto d = make_domain(DomainShape::disk(1.0), 16, 16);
    const BoundaryDatum g = power_law_datum(d, 1);
    const DirectorField U = initial_director(extrude(d, 3), g, 4);
    const ScalingParams p(0.2, 0.1);
    write_field_dump(t / "f.bin", U, p, "0123456789abcdef");
    const FieldDump back = read_field_dump(t / "f.bin");
    REQUIRE(back.field.values.size() == U.values.size());
    for (std::size_t i = 0; i < U.values.size(); ++i) CHECK(norm(back.field.values[i] - U.values[i]) == 0.0);
    CHECK(back.params.eps() == 0.2);
    CHECK(back.params.eta() == 0.1);
    CHECK(back.header.at("config_hash") == "0123456789abcdef");
    CHECK(unit_violations(back.field).empty());

    const std::string bytes = slurp(t / "f.bin");
    spit(t / "short.bin", bytes.substr(0, bytes.size() - 13));
    try {
      read_field_dump(t / "short.bin");
      FAIL("no error");
    } catch (const DumpError& e) {
      CHECK(e.offset() > 0);
      CHECK(e.offset() <= bytes.size());
    }
    spit(t / "magic.bin", "nonsense" + bytes.substr(8));
    CHECK_THROWS_AS(read_field_dump(t / "magic.bin"), DumpError);
    spit(t / "long.bin", bytes + "x");
    CHECK_THROWS_AS(read_field_dump(t / "long.bin"), DumpError);
  }

  TEST_CASE("analyze rejects a dump with a non-unit director") {
    TempDir t;
    const auto d = make_domain(DomainShape::disk(1.0), 16, 16);
    DirectorField U = initial_director(extrude(d, 3), power_law_datum(d, 1), 4);
    const int n = d->interior_nodes()[5];
    U.at(n, 1) = U.at(n, 1) * 1.01;
    const auto bad = unit_violations(U);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].find("layer=1") != std::string::npos);
    write_field_dump(t / "bad.bin", U, ScalingParams(0.2, 0.1), "0000000000000000");
    CHECK(run_args({"analyze", t / "bad.bin", "--out", t / "a"}) == 1);
    CHECK(fs::exists(t / "a/analysis.txt"));
  }

  TEST_CASE("minimize writes its artifacts and analyze reproduces the energy") {
    TempDir t;
    const RunConfig c = small(t / "m");
    CHECK(cmd_minimize(c) == ExitCode::ok);
    for (const char* f : {"field.bin", "energy.csv", "trace.csv", "defects.csv", "report.txt"})
      CHECK(fs::exists(t / (std::string("m/") + f)));
    const std::string energy = slurp(t / "m/energy.csv");
    CHECK(energy.rfind("# schema=1 config_hash=" + c.hash, 0) == 0);
    std::istringstream defects(slurp(t / "m/defects.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(defects, line)) {
      if (!line.empty() && line[0] != '#' && line.rfind("x,", 0) != 0) ++rows;
    }
    CHECK(rows == 1);

    CHECK(run_args({"analyze", t / "m/field.bin", "--out", t / "a"}) == 0);
    const std::string e1 = slurp(t / "m/energy.csv");
    const std::string e2 = slurp(t / "a/energy.csv");
    // value of the "total" column on the data row
    const auto total_of = [](const std::string& s) {
      std::istringstream in(s);
      std::string comment, header, row;
      std::getline(in, comment);
      std::getline(in, header);
      std::getline(in, row);
      const auto column = [](const std::string& line, long idx) {
        std::istringstream f(line);
        std::string cell;
        for (long i = 0; i <= idx; ++i) std::getline(f, cell, ',');
        return cell;
      };
      const std::string head = header.substr(0, header.find("total"));
      return std::stod(column(row, std::count(head.begin(), head.end(), ',')));
    };
    CHECK(total_of(e1) == doctest::Approx(total_of(e2)).epsilon(1e-12));

    const RunConfig again = small(t / "m2");
    CHECK(cmd_minimize(again) == ExitCode::ok);
    CHECK(slurp(t / "m/field.bin") == slurp(t / "m2/field.bin"));
  }

  TEST_CASE("an iteration cap gives exit 2 but still writes outputs") {
    TempDir t;
    spit(t / "c.ini", kSmall);
    CHECK(run_args({"minimize", "--config", t / "c.ini", "--out", t / "m"}, {"LCSLAB_SOLVE__MAX_ITERS=1"}) == 2);
    CHECK(fs::exists(t / "m/field.bin"));
    CHECK(fs::exists(t / "m/report.txt"));
  }

  TEST_CASE("run reports malformed configs with exit 1") {
    TempDir t;
    spit(t / "bad.ini", "[solve]\nmax_iters 3\n");
    CHECK(run_args({"minimize", "--config", t / "bad.ini", "--out", t / "m"}) == 1);
    CHECK(run_args({"minimize", "--out", t / "m", "--set", "bogus"}) == 1);
    CHECK(run_args({"nosuchcommand"}) == 1);
  }

  TEST_CASE("sweep argument checks and failure handling") {
    TempDir t;
    ConfigMap m = ConfigMap::parse(std::string(kSmall) + "[run]\nout = " + (t / "s") + "\n");
    m.set("params.eps_list", "0.3, 0.25", "test");
    CHECK_THROWS_AS(cmd_sweep(resolve(m, Experiment::sweep)), ConfigError);

    m.set("params.eps_list", "0.4, 0.3, 0.25", "test");
    m.set("boundary.degree", "0", "test");
    m.set("sweep.compare", "false", "test");
    CHECK(cmd_sweep(resolve(m, Experiment::sweep)) == ExitCode::ok);
    CHECK(fs::exists(t / "s/sweep.csv"));

    m.set("boundary.degree", "1", "test");
    m.set("solve.max_iters", "1", "test");
    m.set("run.out", t / "f", "test");
    CHECK(cmd_sweep(resolve(m, Experiment::sweep)) == ExitCode::sweep_failure);
    CHECK(fs::exists(t / "f/sweep.csv"));
  }
}
