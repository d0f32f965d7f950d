#include "relcore/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "relcore/errors.hpp"

namespace relcore {

Table::Table(std::string name, std::vector<std::string> features,
             std::vector<std::vector<double>> columns)
    : name_(std::move(name)), features_(std::move(features)), columns_(std::move(columns)) {
  expect(features_.size() == columns_.size(), "Table " + name_ + ": feature/column count mismatch");
  expect(!features_.empty(), "Table " + name_ + ": no columns");
  std::set<std::string> seen;
  for (const auto& f : features_) {
    expect(seen.insert(f).second, "Table " + name_ + ": duplicate feature '" + f + "'");
  }
  rows_ = columns_.front().size();
  for (const auto& c : columns_) {
    expect(c.size() == rows_, "Table " + name_ + ": columns differ in length");
  }
  expect(rows_ >= 1, "Table " + name_ + ": empty table");
}

std::optional<std::size_t> Table::find(const std::string& feature) const {
  auto it = std::find(features_.begin(), features_.end(), feature);
  if (it == features_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - features_.begin());
}

std::optional<std::size_t> FeaturePartition::index_of(const std::string& feature) const {
  auto it = std::find(full.begin(), full.end(), feature);
  if (it == full.end()) return std::nullopt;
  return static_cast<std::size_t>(it - full.begin());
}

std::vector<std::size_t> FeaturePartition::key_features() const {
  std::vector<std::size_t> uses(full.size(), 0);
  for (const auto& d : per_table)
    for (auto f : d) ++uses[f];
  std::vector<std::size_t> keys;
  for (std::size_t f = 0; f < full.size(); ++f)
    if (uses[f] >= 2) keys.push_back(f);
  return keys;
}

FeaturePartition make_partition(const std::vector<Table>& tables) {
  expect(!tables.empty(), "make_partition: no tables");
  FeaturePartition p;
  std::unordered_map<std::string, std::size_t> index;
  p.per_table.resize(tables.size());
  p.disjoint.resize(tables.size());
  p.disjoint_columns.resize(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& names = tables[i].features();
    for (std::size_t c = 0; c < names.size(); ++c) {
      auto [it, inserted] = index.emplace(names[c], p.full.size());
      if (inserted) {
        p.full.push_back(names[c]);
        p.owner.push_back(i);
        p.disjoint[i].push_back(it->second);
        p.disjoint_columns[i].push_back(c);
      }
      p.per_table[i].push_back(it->second);
    }
  }
  return p;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

Table read_csv_table(const std::string& name, const std::filesystem::path& path,
                     const std::optional<std::vector<std::string>>& subset) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw LoadError(where(path, 1) + ": missing header row");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto f : split_fields(line)) {
    if (f.empty()) throw LoadError(where(path, line_no) + ": empty feature name in header");
    header.emplace_back(f);
  }
  {
    std::set<std::string> seen;
    for (const auto& h : header)
      if (!seen.insert(h).second)
        throw LoadError(where(path, line_no) + ": duplicate feature '" + h + "'");
  }

  std::vector<std::size_t> selected;
  std::vector<std::string> names;
  if (subset) {
    std::set<std::string> seen;
    for (const auto& f : *subset) {
      auto it = std::find(header.begin(), header.end(), f);
      if (it == header.end())
        throw LoadError(where(path, 1) + ": feature '" + f + "' not in header");
      if (!seen.insert(f).second)
        throw LoadError(path.string() + ": feature '" + f + "' selected twice");
      selected.push_back(static_cast<std::size_t>(it - header.begin()));
      names.push_back(f);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) selected.push_back(c);
    names = header;
  }

  std::vector<std::vector<double>> columns(selected.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw LoadError(where(path, line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) {
      auto cell = fields[selected[j]];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw LoadError(where(path, line_no) + ": cannot parse '" + std::string(cell) +
                        "' as a finite number");
      columns[j].push_back(v);
    }
  }
  if (columns.empty() || columns.front().empty())
    throw LoadError(where(path, line_no) + ": table has no data rows");
  return Table(name, std::move(names), std::move(columns));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv_table(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError(path.string() + ": cannot open for writing");
  for (std::size_t c = 0; c < table.width(); ++c) out << (c ? "," : "") << table.features()[c];
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.width(); ++c)
      out << (c ? "," : "") << format_double(table.value(r, c));
    out << '\n';
  }
  if (!out) throw LoadError(path.string() + ": write failed");
}

JoinSpec load_join_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open join specification");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string() + ": invalid join specification: " + e.what());
  }
  JoinSpec spec;
  const auto base = path.parent_path();
  try {
    for (const auto& t : doc.at("tables")) {
      TableSource src;
      src.path = t.at("path").get<std::string>();
      if (src.path.is_relative()) src.path = base / src.path;
      src.name = t.contains("name") ? t.at("name").get<std::string>() : src.path.stem().string();
      if (t.contains("features")) src.features = t.at("features").get<std::vector<std::string>>();
      spec.tables.push_back(std::move(src));
    }
    if (doc.contains("label")) spec.label = doc.at("label").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": malformed join specification: " + e.what());
  }
  if (spec.tables.empty()) throw LoadError(path.string() + ": join specification lists no tables");
  return spec;
}

void save_join_spec(const JoinSpec& spec, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : spec.tables) {
    nlohmann::ordered_json e;
    e["name"] = t.name;
    e["path"] = t.path.string();
    if (t.features) e["features"] = *t.features;
    doc["tables"].push_back(std::move(e));
  }
  if (spec.label) doc["label"] = *spec.label;
  std::ofstream out(path);
  if (!out) throw LoadError(path.string() + ": cannot open for writing");
  out << doc.dump(2) << '\n';
}

LoadedTables load_tables(const JoinSpec& spec) {
  LoadedTables out;
  for (const auto& src : spec.tables) out.tables.push_back(read_csv_table(src.name, src.path, src.features));
  out.partition = make_partition(out.tables);
  if (spec.label && !out.partition.index_of(*spec.label))
    throw LoadError("label column '" + *spec.label + "' is not a feature of any table");
  return out;
}

}  // namespace relcore
