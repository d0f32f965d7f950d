#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "relcore/count.hpp"
#include "relcore/losses.hpp"
#include "relcore/point_set.hpp"
#include "relcore/table.hpp"

namespace relcli {

using json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

/// Git blob id of a file's bytes: SHA-1 over "blob <size>\0" followed by the content.
std::string git_blob_hash(const std::filesystem::path& path);

/// Spec file and table files with their blob ids.
json describe_inputs(const std::filesystem::path& spec_path, const relcore::JoinSpec& spec);

/// Reads {"index_set": [table names], "center": [...], "radius": r}.
relcore::PseudoCube read_cube(const std::filesystem::path& path, const std::vector<relcore::Table>& tables);

void write_points(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const relcore::PointSet& points, const std::vector<double>* weights = nullptr);

/// Points of a CSV file; a "weight" column, when present, is split off into `weights`.
struct WeightedCsv {
  std::vector<std::string> header;
  relcore::PointSet points;
  std::vector<double> weights;
};
WeightedCsv read_points(const std::filesystem::path& path);

json theta_to_json(relcore::LossKind kind, const relcore::Theta& theta);
relcore::Theta theta_from_json(const json& doc);

void write_json(const std::filesystem::path& path, const json& doc);
json read_json(const std::filesystem::path& path);

}  // namespace relcli
