#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fragkin/config.hpp"
#include "fragkin/scenario.hpp"
#include "fragkin/series_io.hpp"

using namespace fragkin;

namespace {

namespace fs = std::filesystem;

int exit_code(const std::string& args) {
  const std::string cmd = std::string(FRAGKIN_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("fragkin_cli_" + name); }

// The violating preset shrunk to a few cheap steps.  The spatial grid stays
// fine enough to resolve the initial bump.
fs::path small_violating() {
  RunConfiguration c = parse_config(preset_text("full-power-rate-violating"));
  c.grids.m = 32;
  c.solver.t_end = 5 * c.solver.dt;
  c.solver.output_every = 1;
  const fs::path p = scratch("violating.cfg");
  std::ofstream(p) << serialize_config(c);
  return p;
}

}  // namespace

TEST_CASE("certify exit codes") {
  CHECK(exit_code("certify --preset full-power-rate-global") == 0);
  CHECK(exit_code("certify --preset full-power-rate-violating") == 3);
  // certify reports any failing clause, advisory or not; advisory only relaxes run gating.
  CHECK(exit_code("certify --preset pure-diffusion") == 3);
}

TEST_CASE("configuration problems exit with 2") {
  const fs::path bad = scratch("bad.cfg");
  std::ofstream(bad) << "[coag_kernel]\nrho = 1.5\n";
  CHECK(exit_code("certify --config " + bad.string()) == 2);
  CHECK(exit_code("certify --preset no-such-preset") == 2);
  CHECK(exit_code("run --config " + (scratch("missing.cfg")).string()) == 2);
  fs::remove(bad);
}

TEST_CASE("run refuses a failed certificate unless overridden") {
  const fs::path cfg = small_violating();
  const fs::path out = scratch("series.ndjson");
  CHECK(exit_code("run --config " + cfg.string() + " --out " + out.string()) == 3);
  CHECK(exit_code("run --config " + cfg.string() + " --override-certificate --out " + out.string()) == 0);
  std::ifstream in(out);
  const StoredSeries s = read_series(in);
  CHECK(s.series.size() == 6);
  CHECK(s.config.grids.m == 32);
  CHECK(exit_code("report --series " + out.string()) == 0);
  fs::remove(cfg);
  fs::remove(out);
}

TEST_CASE("thread count does not change the output") {
  RunConfiguration c = parse_config(preset_text("full-power-rate-global"));
  c.grids.m = 32;
  c.solver.t_end = 5 * c.solver.dt;
  const fs::path cfg = scratch("global.cfg");
  std::ofstream(cfg) << serialize_config(c);
  const fs::path a = scratch("t1.ndjson"), b = scratch("t3.ndjson");
  REQUIRE(exit_code("run --config " + cfg.string() + " --threads 1 --out " + a.string()) == 0);
  REQUIRE(exit_code("run --config " + cfg.string() + " --threads 3 --out " + b.string()) == 0);
  std::stringstream sa, sb;
  sa << std::ifstream(a).rdbuf();
  sb << std::ifstream(b).rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK_FALSE(sa.str().empty());
  for (const auto& p : {cfg, a, b}) fs::remove(p);
}

TEST_CASE("probe subcommand") {
  CHECK(exit_code("probe --preset pure-diffusion --kind green --alpha 1") == 0);
  CHECK(exit_code("probe --preset full-power-rate-global --kind monotone --time 0.1 --width 3") == 0);
  CHECK(exit_code("probe --preset pure-diffusion --kind nonsense") == 2);
  CHECK(exit_code("probe --kind green") == 2);
}
