#include "slfs/reporting.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slfs/errors.hpp"

namespace slfs {

namespace {

using json = nlohmann::json;

}  // namespace

std::string RunManifest::to_json_string() const {
  json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  // The config snapshot is JSON text already; embed it as a value so the
  // manifest stays one well-formed document.
  j["config"] = config_json.empty() ? json(nullptr) : json::parse(config_json);
  j["data_path"] = data_path;
  j["data_checksum"] = data_checksum;
  j["seed"] = seed;
  j["outputs"] = outputs;
  j["timings_s"] = timings_s;
  return j.dump(2);
}

RunManifest RunManifest::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest parse error: ") + e.what());
  }
  try {
    RunManifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config_json = j.at("config").is_null() ? std::string() : j.at("config").dump();
    m.data_path = j.at("data_path").get<std::string>();
    m.data_checksum = j.at("data_checksum").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.timings_s = j.at("timings_s").get<std::map<std::string, double>>();
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest missing field: ") + e.what());
  }
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for checksum: " + path);
  std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;  // FNV prime
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? "." : target.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);  // best effort; open below reports failures

  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("short write: " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& cell, char delimiter) {
  const bool needs = cell.find(delimiter) != std::string::npos ||
                     cell.find('"') != std::string::npos ||
                     cell.find('\n') != std::string::npos ||
                     cell.find('\r') != std::string::npos;
  if (!needs) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace slfs
