#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace relcore {

/// An immutable numeric relation: named columns of equal length (at least one row).
class Table {
 public:
  Table(std::string name, std::vector<std::string> features, std::vector<std::vector<double>> columns);

  const std::string& name() const noexcept { return name_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t width() const noexcept { return features_.size(); }
  const std::vector<std::string>& features() const noexcept { return features_; }
  const std::vector<double>& column(std::size_t c) const { return columns_[c]; }
  double value(std::size_t row, std::size_t col) const { return columns_[col][row]; }

  /// Column index of `feature`, if present.
  std::optional<std::size_t> find(const std::string& feature) const;

 private:
  std::string name_;
  std::vector<std::string> features_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
};

/// Global feature list D and its per-table views.
///
/// `full` is ordered table by table, each table contributing the features it introduces
/// (its disjoint set) in column order, so `full` is the concatenation of all disjoint sets.
struct FeaturePartition {
  std::vector<std::string> full;
  /// per_table[i]: global indices of D_i, in table column order.
  std::vector<std::vector<std::size_t>> per_table;
  /// disjoint[i]: global indices of the features table i introduces, ascending.
  std::vector<std::vector<std::size_t>> disjoint;
  /// disjoint_columns[i][j]: column of table i holding feature disjoint[i][j].
  std::vector<std::vector<std::size_t>> disjoint_columns;
  /// owner[f]: the table that introduces global feature f.
  std::vector<std::size_t> owner;

  std::size_t dim() const noexcept { return full.size(); }
  std::size_t tables() const noexcept { return per_table.size(); }
  std::optional<std::size_t> index_of(const std::string& feature) const;
  /// Features shared by at least two tables.
  std::vector<std::size_t> key_features() const;
};

FeaturePartition make_partition(const std::vector<Table>& tables);

/// One entry of a join specification file.
struct TableSource {
  std::string name;
  std::filesystem::path path;
  std::optional<std::vector<std::string>> features;  // subset to load; all columns when absent
};

/// Ordered list of tables to join plus an optional label column.
struct JoinSpec {
  std::vector<TableSource> tables;
  std::optional<std::string> label;
};

/// Parses a JSON join specification; relative paths resolve against the spec's directory.
JoinSpec load_join_spec(const std::filesystem::path& path);
void save_join_spec(const JoinSpec& spec, const std::filesystem::path& path);

/// Reads one CSV file (header row, comma separated, finite numeric cells).
Table read_csv_table(const std::string& name, const std::filesystem::path& path,
                     const std::optional<std::vector<std::string>>& subset = std::nullopt);
void write_csv_table(const Table& table, const std::filesystem::path& path);

struct LoadedTables {
  std::vector<Table> tables;
  FeaturePartition partition;
};

LoadedTables load_tables(const JoinSpec& spec);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace relcore
