#include "fragkin/series_io.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "fragkin/errors.hpp"

namespace fragkin {

namespace {

using ordered = nlohmann::ordered_json;

void write_line(std::ostream& out, const ordered& j) {
  out << j.dump() << '\n';
  if (!out) throw Error("series sink write failed");
}

}  // namespace

void write_series_header(std::ostream& out, const RunConfiguration& config, const std::vector<NormSpec>& norm_set) {
  ordered h;
  h["config_hash"] = config_hash(config);
  ordered norms = ordered::array();
  for (const auto& n : norm_set) norms.push_back({n.p, n.ell, n.s});
  h["norm_set"] = norms;
  h["config"] = serialize_config(config);
  write_line(out, h);
}

void write_series_record(std::ostream& out, const DiagnosticsSeries& series, std::size_t k) {
  ordered r;
  r["t"] = series.times.at(k);
  r["mass"] = series.mass.at(k);
  r["number"] = series.number.at(k);
  ordered norms = ordered::object();
  for (const auto& n : series.norm_set) norms[n.key()] = series.norm(n).at(k);
  r["norms"] = norms;
  r["posmin"] = series.positivity_min.at(k);
  r["underflow"] = series.underflow.at(k);
  r["overflow"] = series.overflow.at(k);
  write_line(out, r);
}

void write_series_abort(std::ostream& out, const DiagnosticsSeries& series) {
  if (!series.aborted) return;
  ordered a;
  a["abort"] = series.abort_time.value_or(series.times.empty() ? 0.0 : series.times.back());
  write_line(out, a);
}

void emit_series(std::ostream& out, const RunConfiguration& config, const DiagnosticsSeries& series) {
  write_series_header(out, config, series.norm_set);
  for (std::size_t k = 0; k < series.size(); ++k) write_series_record(out, series, k);
  write_series_abort(out, series);
}

StoredSeries read_series(std::istream& in) {
  StoredSeries s;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  auto fail = [&](const std::string& what) {
    throw CorruptionError("series line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    try {
      if (!have_header) {
        s.config_hash = j.at("config_hash").get<std::string>();
        s.config = parse_config(j.at("config").get<std::string>());
        for (const auto& n : j.at("norm_set")) s.series.norm_set.push_back({n.at(0), n.at(1), n.at(2)});
        for (const auto& n : s.series.norm_set) s.series.norms[n.key()];
        have_header = true;
        continue;
      }
      if (j.contains("abort")) {
        s.series.aborted = true;
        s.series.abort_time = j.at("abort").get<double>();
        continue;
      }
      s.series.times.push_back(j.at("t").get<double>());
      s.series.mass.push_back(j.at("mass").get<double>());
      s.series.number.push_back(j.at("number").get<double>());
      s.series.positivity_min.push_back(j.at("posmin").get<double>());
      s.series.underflow.push_back(j.at("underflow").get<double>());
      s.series.overflow.push_back(j.at("overflow").get<double>());
      for (const auto& n : s.series.norm_set) s.series.norms[n.key()].push_back(j.at("norms").at(n.key()).get<double>());
      s.series.steps.push_back(0);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
  }
  if (!have_header) throw CorruptionError("series stream has no header");
  return s;
}

void emit_series_csv(std::ostream& out, const DiagnosticsSeries& series) {
  out << "t,mass,number,posmin,underflow,overflow";
  for (const auto& n : series.norm_set) out << ",\"" << n.key() << '"';
  out << '\n';
  for (std::size_t k = 0; k < series.size(); ++k) {
    out << format_double(series.times[k]) << ',' << format_double(series.mass[k]) << ','
        << format_double(series.number[k]) << ',' << format_double(series.positivity_min[k]) << ','
        << format_double(series.underflow[k]) << ',' << format_double(series.overflow[k]);
    for (const auto& n : series.norm_set) out << ',' << format_double(series.norm(n)[k]);
    out << '\n';
  }
  if (!out) throw Error("series sink write failed");
}

}  // namespace fragkin
