#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lossperc/statistics.hpp"

namespace lossperc {

/// Output file could not be written or input could not be read (exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form, independent of locale.
std::string format_double(double value);

std::uint64_t fnv1a(std::string_view text);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// `# schema=curve v1`, `# config_hash=<hash>`, then `p,mean_S,span_prob`.
std::string curve_csv(const CanonicalCurve& curve, std::string_view config_hash);
/// Parses a curve CSV. Throws IoError on a missing file or foreign schema.
CanonicalCurve read_curve_csv(const std::filesystem::path& path);

/// `# schema=threshold v1`, `# config_hash=<hash>`, then `L,lambda,stderr`.
std::string threshold_csv(const std::vector<SizeThreshold>& rows, std::string_view config_hash);

struct BenchRow {
  std::string variable;
  double value = 0.0;
  double wall_time_s = 0.0;
};

/// `# schema=bench v1`, `# config_hash=<hash>`, then `variable,value,wall_time_s`.
std::string bench_csv(const std::vector<BenchRow>& rows, std::string_view config_hash);

}  // namespace lossperc
