#ifndef SLFS_REPORTING_HPP
#define SLFS_REPORTING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace slfs {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything needed to repeat a run: the resolved configuration, input
/// identity and seed. Timings are informational; result files never embed
/// them so repeated runs stay byte-identical.
struct RunManifest {
  std::string tool = "slfs";
  std::string version = kToolVersion;
  std::string command;
  std::string config_json;  // resolved options of the subcommand, as JSON text
  std::string data_path;
  std::string data_checksum;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;  // file names relative to out_dir
  std::map<std::string, double> timings_s;

  std::string to_json_string() const;
  static RunManifest from_json_string(const std::string& text);
};

/// FNV-1a 64-bit over the file bytes, rendered as "fnv1a64:<hex>".
/// Throws DataError when the file cannot be read.
std::string file_checksum(const std::string& path);

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe a partial file. Throws DataError on I/O failure.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Locale-independent shortest-round-trip rendering for doubles in CSV cells.
std::string format_double(double v);

/// Quotes a CSV cell when it contains the delimiter, quotes or newlines.
std::string csv_escape(const std::string& cell, char delimiter = ',');

}  // namespace slfs

#endif  // SLFS_REPORTING_HPP
