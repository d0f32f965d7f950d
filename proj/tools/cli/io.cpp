#include "io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "relcore/errors.hpp"

namespace relcli {

using relcore::LoadError;

namespace {

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string git_blob_hash(const std::filesystem::path& path) {
  const std::string body = read_bytes(path);
  const std::string head = "blob " + std::to_string(body.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), head.data(), head.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), body.data(), body.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha1 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

json describe_inputs(const std::filesystem::path& spec_path, const relcore::JoinSpec& spec) {
  json tables = json::array();
  for (const auto& t : spec.tables)
    tables.push_back({{"name", t.name}, {"file", t.path.filename().string()}, {"blob", git_blob_hash(t.path)}});
  return {{"spec", {{"file", spec_path.filename().string()}, {"blob", git_blob_hash(spec_path)}}},
          {"tables", std::move(tables)}};
}

relcore::PseudoCube read_cube(const std::filesystem::path& path, const std::vector<relcore::Table>& tables) {
  const json doc = read_json(path);
  relcore::PseudoCube cube;
  try {
    for (const auto& name : doc.at("index_set")) {
      const auto want = name.get<std::string>();
      auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) { return t.name() == want; });
      if (it == tables.end()) throw relcore::ContractViolation(path.string() + ": unknown table '" + want + "'");
      cube.tables.push_back(static_cast<std::size_t>(it - tables.begin()));
    }
    cube.center = doc.at("center").get<std::vector<double>>();
    cube.radius = doc.at("radius").get<double>();
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  std::sort(cube.tables.begin(), cube.tables.end());
  return cube;
}

void write_points(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const relcore::PointSet& points, const std::vector<double>* weights) {
  std::ofstream out(path);
  if (!out) throw LoadError(path.string() + ": cannot open for writing");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  if (weights) out << (header.empty() ? "" : ",") << "weight";
  out << '\n';
  for (std::size_t r = 0; r < points.size(); ++r) {
    const auto p = points[r];
    for (std::size_t c = 0; c < p.size(); ++c) out << (c ? "," : "") << relcore::format_double(p[c]);
    if (weights) out << (p.empty() ? "" : ",") << relcore::format_double((*weights)[r]);
    out << '\n';
  }
  if (!out) throw LoadError(path.string() + ": write failed");
}

WeightedCsv read_points(const std::filesystem::path& path) {
  const auto table = relcore::read_csv_table(path.stem().string(), path);
  const auto weight_col = table.find("weight");
  WeightedCsv out;
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < table.width(); ++c)
    if (!weight_col || c != *weight_col) {
      cols.push_back(c);
      out.header.push_back(table.features()[c]);
    }
  out.points = relcore::PointSet(cols.size());
  std::vector<double> row(cols.size());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) row[j] = table.value(r, cols[j]);
    out.points.push_back(row);
    out.weights.push_back(weight_col ? table.value(r, *weight_col) : 1.0);
  }
  return out;
}

json theta_to_json(relcore::LossKind kind, const relcore::Theta& theta) {
  json doc = {{"loss", relcore::to_string(kind)}};
  if (kind == relcore::LossKind::kmeans) {
    json centers = json::array();
    for (std::size_t i = 0; i < theta.centers.size(); ++i) {
      const auto c = theta.centers[i];
      centers.push_back(std::vector<double>(c.begin(), c.end()));
    }
    doc["centers"] = std::move(centers);
  } else {
    doc["omega"] = theta.omega;
    doc["bias"] = theta.bias;
  }
  return doc;
}

relcore::Theta theta_from_json(const json& doc) {
  relcore::Theta theta;
  try {
    if (doc.contains("centers")) {
      const auto rows = doc.at("centers").get<std::vector<std::vector<double>>>();
      if (rows.empty()) throw LoadError("theta: no centers");
      theta.centers = relcore::PointSet(rows.front().size());
      for (const auto& r : rows) theta.centers.push_back(r);
    }
    if (doc.contains("omega")) theta.omega = doc.at("omega").get<std::vector<double>>();
    if (doc.contains("bias")) theta.bias = doc.at("bias").get<double>();
  } catch (const json::exception& e) {
    throw LoadError(std::string("theta: ") + e.what());
  } catch (const relcore::ContractViolation& e) {
    throw LoadError(std::string("theta: ") + e.what());
  }
  return theta;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw LoadError(path.string() + ": cannot open for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw LoadError(path.string() + ": write failed");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace relcli
