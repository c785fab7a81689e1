#include "riesz/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace riesz {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string field_to_csv(const Field& f) {
  std::string out = "index,re,im\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_number(f[k].real());
    out += ',';
    out += format_number(f[k].imag());
    out += '\n';
  }
  return out;
}

std::string field_manifest_json(const Field& f) {
  const GridSpec& g = f.grid();
  nlohmann::ordered_json j;
  j["format"] = "riesz-field";
  j["version"] = 1;
  j["dimension"] = g.dimension();
  j["points_per_axis"] = g.points_per_axis();
  j["half_width"] = g.half_width();
  j["domain"] = to_string(f.domain());
  j["index_order"] = "row-major, axis 0 slowest; axis index i -> (i - M/2) * spacing";
  j["spacing"] = g.spacing();
  j["frequency_spacing"] = g.frequency_spacing();
  return j.dump(2) + "\n";
}

void dump_field(const Field& f, const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto json = stem;
  json += ".json";
  write_file_atomic(csv, field_to_csv(f));
  write_file_atomic(json, field_manifest_json(f));
}

Field load_field(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  std::ifstream js(json_path);
  if (!js) throw UsageError("cannot open field manifest " + json_path.string());
  nlohmann::json j;
  try {
    js >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed field manifest " + json_path.string() + ": " + e.what());
  }
  if (!j.contains("dimension") || !j.contains("points_per_axis") || !j.contains("half_width") ||
      !j.contains("domain"))
    throw UsageError("field manifest " + json_path.string() + " lacks grid keys");
  const GridSpec grid(j["dimension"].get<int>(), j["points_per_axis"].get<std::size_t>(),
                      j["half_width"].get<double>());
  const std::string tag = j["domain"].get<std::string>();
  if (tag != "spatial" && tag != "frequency") throw UsageError("unknown domain tag '" + tag + "'");

  std::ifstream in(csv_path);
  if (!in) throw UsageError("cannot open field csv " + csv_path.string());
  std::vector<cplx> samples(grid.size());
  std::vector<bool> seen(grid.size(), false);
  std::string line;
  std::getline(in, line);  // header
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw UsageError(csv_path.string() + ":" + std::to_string(lineno) + ": expected index,re,im");
    try {
      const std::size_t idx = std::stoul(a);
      if (idx >= grid.size()) throw UsageError("index out of range");
      samples[idx] = {std::stod(b), std::stod(c)};
      seen[idx] = true;
    } catch (const std::exception& e) {
      throw UsageError(csv_path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (bool s : seen)
    if (!s) throw UsageError(csv_path.string() + ": missing lattice indices");
  return Field(grid, tag == "spatial" ? Domain::spatial : Domain::frequency, std::move(samples));
}

}  // namespace riesz
