#include "fbmlab/noise_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fbmlab/error.hpp"

namespace fbmlab {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string path_to_csv(const TwoSidedPath& path) {
  std::string out = "time,omega\n";
  for (std::int64_t k = path.first_index(); k <= path.last_index(); ++k) {
    out += format_real(path.time(k));
    out += ',';
    out += format_real(path.at(k));
    out += '\n';
  }
  return out;
}

nlohmann::json path_manifest(const TwoSidedPath& path) {
  return {{"hurst", path.hurst().value()},
          {"step", path.step()},
          {"n_past", path.n_past()},
          {"n_future", path.n_future()},
          {"seed", path.seed()}};
}

TwoSidedPath path_from_csv(const std::string& csv, const nlohmann::json& manifest) {
  const HurstIndex hurst(manifest.at("hurst").get<double>());
  const double step = manifest.at("step").get<double>();
  const auto n_past = manifest.at("n_past").get<std::size_t>();
  const auto n_future = manifest.at("n_future").get<std::size_t>();
  const auto seed = manifest.at("seed").get<std::uint64_t>();

  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "time,omega") throw ConfigError("path CSV must start with 'time,omega'");
  std::vector<double> samples;
  samples.reserve(n_past + n_future + 1);
  std::int64_t k = -static_cast<std::int64_t>(n_past);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed path CSV row: " + line);
    const double t = std::stod(line.substr(0, comma));
    const double w = std::stod(line.substr(comma + 1));
    if (std::abs(t - static_cast<double>(k) * step) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw ConfigError("path CSV time " + line.substr(0, comma) + " does not match the manifest grid");
    }
    samples.push_back(w);
    ++k;
  }
  return TwoSidedPath(hurst, step, n_past, n_future, seed, std::move(samples));
}

namespace {

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_path(const TwoSidedPath& path, const std::filesystem::path& csv_file,
                const std::filesystem::path& manifest_file) {
  std::ofstream(csv_file, std::ios::binary) << path_to_csv(path);
  std::ofstream(manifest_file, std::ios::binary) << path_manifest(path).dump(2) << '\n';
}

TwoSidedPath read_path(const std::filesystem::path& csv_file, const std::filesystem::path& manifest_file) {
  return path_from_csv(slurp(csv_file), nlohmann::json::parse(slurp(manifest_file)));
}

}  // namespace fbmlab
