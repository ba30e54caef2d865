#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "ucmab/uplift_forest.hpp"

namespace ucmab {

/// One row of the public MineThatData e-mail campaign file.
struct HillstromRow {
  int recency = 0;
  std::string history_segment;
  double history = 0.0;
  int mens = 0;
  int womens = 0;
  std::string zip_code;
  int newbie = 0;
  std::string channel;
  std::string segment;  // "Womens E-Mail", "Mens E-Mail" or "No E-Mail"
  int visit = 0;
  int conversion = 0;
  double spend = 0.0;
};

enum class HillstromResponse { visit, conversion };
enum class HillstromArm { mens, womens };

std::string_view to_string(HillstromResponse r) noexcept;
std::string_view to_string(HillstromArm a) noexcept;
/// Throw ConfigError on unknown names.
HillstromResponse hillstrom_response_from_string(std::string_view name);
HillstromArm hillstrom_arm_from_string(std::string_view name);

/// Parses the CSV (header row required, columns in any order). Throws
/// IngestionError with the offending line number.
std::vector<HillstromRow> parse_hillstrom_csv(std::istream& in);

struct HillstromDataset {
  std::vector<LabeledExample> examples;
  /// Encoded column order: recency, history, mens, womens, newbie, then one
  /// indicator per observed level of zip_code, channel and history_segment
  /// (levels sorted), named "column=level".
  std::vector<std::string> feature_names;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Keeps "No E-Mail" rows as control and the chosen e-mail segment as
/// treated, drops the other e-mail segment, one-hot encodes categoricals and
/// min-max scales recency and history to [0, 1] over the kept rows.
HillstromDataset encode_hillstrom(const std::vector<HillstromRow>& rows, HillstromResponse response,
                                  HillstromArm treatment_arm);

HillstromDataset load_hillstrom(const std::filesystem::path& path, HillstromResponse response,
                                HillstromArm treatment_arm);

}  // namespace ucmab
