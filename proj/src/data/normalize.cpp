#include "dwmrpm/data/normalize.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "dwmrpm/core/errors.hpp"
#include "dwmrpm/data/csv.hpp"

namespace dwmrpm::data {

std::string NormalizationParams::fingerprint() const {
  // FNV-1a over the little-endian bytes of both bounds.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : {i_min, i_max}) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate(const NormalizationParams& p) {
  if (!std::isfinite(p.i_min) || !std::isfinite(p.i_max) || !(p.i_max > p.i_min))
    throw DegenerateRange("normalization range must satisfy I_max > I_min, got [" + format_double(p.i_min) + ", " +
                          format_double(p.i_max) + "]");
}

NormalizationParams fit_normalizer(std::span<const MonthlySeries> train_series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t count = 0;
  for (const auto& s : train_series)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++count;
    }
  if (count == 0) throw ContractError("fit_normalizer: no training values");
  NormalizationParams p{lo, hi};
  validate(p);
  return p;
}

double normalize(double mm, const NormalizationParams& p) { return (mm - p.i_min) / (p.i_max - p.i_min) * 100.0; }

double denormalize(double normalized, const NormalizationParams& p) {
  return normalized / 100.0 * (p.i_max - p.i_min) + p.i_min;
}

std::vector<MonthlySeries> truncate_after_year(std::span<const MonthlySeries> series, int last_year) {
  std::vector<MonthlySeries> out;
  const int end_index = YearMonth{last_year, 12}.index();
  for (const auto& s : series) {
    const int keep = end_index - s.start.index() + 1;
    if (keep <= 0) continue;
    MonthlySeries cut = s;
    const auto n = std::min<std::size_t>(cut.size(), static_cast<std::size_t>(keep));
    cut.values.resize(n);
    cut.flags.resize(n);
    out.push_back(std::move(cut));
  }
  return out;
}

}  // namespace dwmrpm::data
