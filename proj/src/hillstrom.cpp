#include "ucmab/hillstrom.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "ucmab/errors.hpp"

namespace ucmab {

namespace {

constexpr std::array<std::string_view, 12> kColumns{
    "recency", "history_segment", "history", "mens",  "womens",     "zip_code",
    "newbie",  "channel",         "segment", "visit", "conversion", "spend"};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_real(const std::string& text, std::size_t line, std::string_view column) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw IngestionError(line, "unparsable number '" + text + "' in column " + std::string(column));
  return value;
}

int parse_int(const std::string& text, std::size_t line, std::string_view column) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw IngestionError(line, "unparsable integer '" + text + "' in column " + std::string(column));
  return value;
}

int parse_flag(const std::string& text, std::size_t line, std::string_view column) {
  const int v = parse_int(text, line, column);
  if (v != 0 && v != 1) throw IngestionError(line, "column " + std::string(column) + " must be 0 or 1");
  return v;
}

}  // namespace

std::string_view to_string(HillstromResponse r) noexcept {
  return r == HillstromResponse::visit ? "visit" : "conversion";
}

std::string_view to_string(HillstromArm a) noexcept { return a == HillstromArm::mens ? "mens" : "womens"; }

HillstromResponse hillstrom_response_from_string(std::string_view name) {
  if (name == "visit") return HillstromResponse::visit;
  if (name == "conversion") return HillstromResponse::conversion;
  throw ConfigError("unknown Hillstrom response column '" + std::string(name) + "'");
}

HillstromArm hillstrom_arm_from_string(std::string_view name) {
  if (name == "mens") return HillstromArm::mens;
  if (name == "womens") return HillstromArm::womens;
  throw ConfigError("unknown Hillstrom treatment arm '" + std::string(name) + "'");
}

std::vector<HillstromRow> parse_hillstrom_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IngestionError(0, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  const auto header = split_csv_line(line);
  std::map<std::string_view, std::size_t> position;
  for (auto name : kColumns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IngestionError(1, "missing column '" + std::string(name) + "'");
    position[name] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<HillstromRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw IngestionError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(f.size()));
    auto at = [&](std::string_view name) -> const std::string& { return f[position.at(name)]; };

    HillstromRow row;
    row.recency = parse_int(at("recency"), line_no, "recency");
    row.history_segment = at("history_segment");
    row.history = parse_real(at("history"), line_no, "history");
    row.mens = parse_flag(at("mens"), line_no, "mens");
    row.womens = parse_flag(at("womens"), line_no, "womens");
    row.zip_code = at("zip_code");
    row.newbie = parse_flag(at("newbie"), line_no, "newbie");
    row.channel = at("channel");
    row.segment = at("segment");
    if (row.segment != "Womens E-Mail" && row.segment != "Mens E-Mail" && row.segment != "No E-Mail")
      throw IngestionError(line_no, "unknown segment '" + row.segment + "'");
    row.visit = parse_flag(at("visit"), line_no, "visit");
    row.conversion = parse_flag(at("conversion"), line_no, "conversion");
    row.spend = parse_real(at("spend"), line_no, "spend");
    rows.push_back(std::move(row));
  }
  return rows;
}

HillstromDataset encode_hillstrom(const std::vector<HillstromRow>& rows, HillstromResponse response,
                                  HillstromArm treatment_arm) {
  const std::string treated_segment = treatment_arm == HillstromArm::mens ? "Mens E-Mail" : "Womens E-Mail";

  HillstromDataset out;
  out.rows_read = rows.size();
  std::vector<const HillstromRow*> kept;
  for (const auto& r : rows) {
    if (r.segment == treated_segment || r.segment == "No E-Mail") kept.push_back(&r);
  }
  out.rows_dropped = rows.size() - kept.size();
  if (kept.empty()) return out;

  std::set<std::string> zips;
  std::set<std::string> channels;
  std::set<std::string> history_segments;
  double recency_lo = kept.front()->recency;
  double recency_hi = recency_lo;
  double history_lo = kept.front()->history;
  double history_hi = history_lo;
  for (const auto* r : kept) {
    zips.insert(r->zip_code);
    channels.insert(r->channel);
    history_segments.insert(r->history_segment);
    recency_lo = std::min<double>(recency_lo, r->recency);
    recency_hi = std::max<double>(recency_hi, r->recency);
    history_lo = std::min(history_lo, r->history);
    history_hi = std::max(history_hi, r->history);
  }

  out.feature_names = {"recency", "history", "mens", "womens", "newbie"};
  for (const auto& z : zips) out.feature_names.push_back("zip_code=" + z);
  for (const auto& c : channels) out.feature_names.push_back("channel=" + c);
  for (const auto& h : history_segments) out.feature_names.push_back("history_segment=" + h);

  auto scale = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
  auto one_hot = [](std::vector<double>& x, const std::set<std::string>& levels, const std::string& value) {
    for (const auto& level : levels) x.push_back(level == value ? 1.0 : 0.0);
  };

  out.examples.reserve(kept.size());
  for (const auto* r : kept) {
    std::vector<double> x;
    x.reserve(out.feature_names.size());
    x.push_back(scale(r->recency, recency_lo, recency_hi));
    x.push_back(scale(r->history, history_lo, history_hi));
    x.push_back(r->mens);
    x.push_back(r->womens);
    x.push_back(r->newbie);
    one_hot(x, zips, r->zip_code);
    one_hot(x, channels, r->channel);
    one_hot(x, history_segments, r->history_segment);
    const bool responded = response == HillstromResponse::visit ? r->visit == 1 : r->conversion == 1;
    const Treatment arm = r->segment == treated_segment ? Treatment::treated : Treatment::control;
    out.examples.push_back({ContextPoint(std::move(x)), arm, Outcome{responded}});
  }
  return out;
}

HillstromDataset load_hillstrom(const std::filesystem::path& path, HillstromResponse response,
                                HillstromArm treatment_arm) {
  std::ifstream in(path);
  if (!in) throw IngestionError(0, "cannot open " + path.string());
  return encode_hillstrom(parse_hillstrom_csv(in), response, treatment_arm);
}

}  // namespace ucmab
