#include <doctest.h>

#include <memory>
#include <sstream>

#include "fragkin/errors.hpp"
#include "fragkin/integrator.hpp"
#include "fragkin/series_io.hpp"

using namespace fragkin;

namespace {

DiagnosticsSeries short_run(bool zero) {
  auto space = std::make_shared<const SpaceGrid>(1, 10.0, 8);
  auto sizes = std::make_shared<const SizeGrid>(1e-3, 100.0, 32);
  PowerLaw law;
  const Models md = Models::build(space, sizes, RateModel::power(law), FragKernel::power(0.0),
                                  CoagKernel::constant(0.5, 1.0, 0.5));
  Field u(space, sizes);
  if (!zero)
    for (std::size_t c = 0; c < u.num_cells(); ++c)
      for (std::size_t i = 0; i < u.num_sizes(); ++i) u(c, i) = (1.0 + 0.1 * c) / (1.0 + sizes->node(i));
  SolverConfig sc;
  sc.dt = 1e-2;
  sc.t_end = 0.05;
  sc.output_every = 1;
  return run(sc, initial_state(u), md, default_norm_set(4, 2, 0.5)).series;
}

}  // namespace

TEST_CASE("empty series is the header alone") {
  RunConfiguration c;
  DiagnosticsSeries s;
  s.norm_set = c.norm_set();
  std::ostringstream out;
  emit_series(out, c, s);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(text.find("\"config_hash\":\"" + config_hash(c) + "\"") != std::string::npos);
  std::istringstream in(text);
  const StoredSeries back = read_series(in);
  CHECK(back.series.size() == 0);
  CHECK(back.config == c);
}

TEST_CASE("zero data give all-zero records") {
  const DiagnosticsSeries s = short_run(true);
  std::ostringstream out;
  emit_series(out, RunConfiguration{}, s);
  std::istringstream in(out.str());
  const StoredSeries back = read_series(in);
  REQUIRE(back.series.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(back.series.mass[k] == 0.0);
    CHECK(back.series.number[k] == 0.0);
    for (const auto& [key, v] : back.series.norms) CHECK(v[k] == 0.0);
  }
}

TEST_CASE("read back and re-emit is byte-identical") {
  RunConfiguration c;
  c.solver.dt = 1e-2;
  const DiagnosticsSeries s = short_run(false);
  std::ostringstream first;
  emit_series(first, c, s);
  std::istringstream in(first.str());
  const StoredSeries back = read_series(in);
  CHECK(back.config_hash == config_hash(c));
  CHECK(back.series.times == s.times);
  CHECK(back.series.mass == s.mass);
  CHECK(back.series.norms == s.norms);
  CHECK(back.series.underflow == s.underflow);
  std::ostringstream second;
  emit_series(second, back.config, back.series);
  CHECK(second.str() == first.str());
}

TEST_CASE("abort line round trips") {
  DiagnosticsSeries s = short_run(false);
  s.aborted = true;
  s.abort_time = s.times.back();
  std::ostringstream out;
  emit_series(out, RunConfiguration{}, s);
  CHECK(out.str().find("{\"abort\":0.05}") != std::string::npos);
  std::istringstream in(out.str());
  const StoredSeries back = read_series(in);
  CHECK(back.series.aborted);
  CHECK(*back.series.abort_time == s.times.back());
}

TEST_CASE("malformed streams are corruption errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_series(empty), CorruptionError);
  std::istringstream junk("{not json\n");
  CHECK_THROWS_AS(read_series(junk), CorruptionError);
  std::ostringstream good;
  emit_series(good, RunConfiguration{}, short_run(false));
  std::string text = good.str();
  text.resize(text.size() - 20);
  std::istringstream cut(text);
  CHECK_THROWS_AS(read_series(cut), CorruptionError);
}

TEST_CASE("csv output has one row per sample") {
  const DiagnosticsSeries s = short_run(false);
  std::ostringstream out;
  emit_series_csv(out, s);
  const std::string text = out.str();
  CHECK(text.rfind("t,mass,number,posmin,underflow,overflow,\"p=1,l=0,s=0\"", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(s.size() + 1));
}
