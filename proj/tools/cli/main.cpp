// relcore: coresets over acyclic joins from the command line.
//
// Every command reads the same join specification, derives all randomness from --seed and
// writes a versioned JSON report. Wall-clock and thread information live under "execution"
// so reports can be diffed across runs.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "io.hpp"
#include "relcore/aggtree.hpp"
#include "relcore/errors.hpp"
#include "relcore/eval.hpp"
#include "relcore/join_tree.hpp"
#include "relcore/kcenter.hpp"
#include "relcore/materialize.hpp"
#include "relcore/parallel.hpp"
#include "relcore/pipeline.hpp"
#include "relcore/rng.hpp"
#include "relcore/sample.hpp"
#include "relcore/synth.hpp"
#include "relcore/train.hpp"
#include "relcore/weights.hpp"

namespace fs = std::filesystem;
using namespace relcore;
using relcli::json;

namespace {

// Stream tags for the top-level seed split.
constexpr std::uint64_t kSampleStream = 0x73616d706c65;
constexpr std::uint64_t kBuildStream = 0x6275696c64;
constexpr std::uint64_t kWeighStream = 0x7765696768;
constexpr std::uint64_t kCoresetStream = 0x636f7265736574;
constexpr std::uint64_t kTrainStream = 0x747261696e;
constexpr std::uint64_t kEvalStream = 0x6576616c;

// Exact diameters are quadratic; beyond this many points the two-pass bound is used.
constexpr std::size_t kExactDiameterLimit = 4000;

struct Options {
  std::string command;
  std::string spec;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out;
  std::string report;
  std::optional<std::string> label;
  bool oracle = false;
  bool error_json = false;
  std::uint64_t cap = kDefaultMaterializeCap;

  CoresetConfig coreset;
  std::string cube;
  std::size_t m = 1000;
  std::string centers;
  double radius = 0.0;

  std::string data;
  std::string coreset_csv;
  std::string theta;
  std::string loss = "kmeans";
  std::size_t clusters = 10;
  double svm_reg = 1.0;
  std::size_t iterations = 300;

  SynthOptions synth;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Tables, partition and acyclicity witness of --spec.
struct Instance {
  fs::path spec_path;
  JoinSpec spec;
  LoadedTables loaded;
  JoinTree tree;
  std::optional<std::string> label;
};

Instance load_instance(const Options& o) {
  if (o.spec.empty()) throw ContractViolation("--spec is required");
  Instance in;
  in.spec_path = o.spec;
  in.spec = load_join_spec(in.spec_path);
  in.loaded = load_tables(in.spec);
  in.tree = check_acyclic(in.loaded.partition);
  in.label = o.label ? o.label : in.spec.label;
  if (in.label && !in.loaded.partition.index_of(*in.label))
    throw ContractViolation("label column '" + *in.label + "' is not a feature of any table");
  return in;
}

json report_head(const Options& o, const Instance* in, json parameters) {
  json doc = {{"schema_version", relcli::kReportSchemaVersion}, {"command", o.command}, {"seed", o.seed}};
  doc["parameters"] = std::move(parameters);
  if (in) doc["inputs"] = relcli::describe_inputs(in->spec_path, in->spec);
  return doc;
}

void finish_report(const Options& o, json& doc, json seconds) {
  doc["execution"] = {{"threads", thread_count()}, {"seconds", std::move(seconds)}};
  if (!o.report.empty()) relcli::write_json(o.report, doc);
}

json levels_json(const LevelRadii& radii) {
  json levels = json::array();
  for (std::size_t h = 0; h < radii.L.size(); ++h) levels.push_back({{"level", h}, {"l", radii.l[h]}, {"L", radii.L[h]}});
  return levels;
}

json merges_json(const AggTree& tree) {
  json merges = json::array();
  for (const auto& node : tree.nodes) {
    if (!node.left) continue;
    merges.push_back({{"node", node.id},
                      {"left", *node.left},
                      {"right", *node.right},
                      {"level", node.level},
                      {"tables", node.tables},
                      {"grid", node.grid_size},
                      {"survivors", node.survivors},
                      {"centers", node.centers.size()},
                      {"prune_radius", node.prune_radius},
                      {"spread", node.spread},
                      {"bound", node.bound}});
  }
  return merges;
}

json tree_seconds(const AggTree& tree) {
  json merges = json::array();
  for (const auto& node : tree.nodes)
    if (node.left) merges.push_back({{"node", node.id}, {"seconds", node.seconds}});
  return {{"leaves", tree.leaf_seconds}, {"merges", std::move(merges)}};
}

json weights_json(const Coreset& c) {
  json cubes = json::array();
  for (std::size_t i = 0; i < c.cubes.size(); ++i) {
    const auto& d = c.cubes[i];
    cubes.push_back({{"exact_count", d.exact_count},
                     {"samples", d.samples},
                     {"fresh", d.fresh},
                     {"ratio", d.ratio},
                     {"heavy", d.heavy},
                     {"weight", c.weights[i]}});
  }
  const auto& p = c.params;
  return {{"params",
           {{"eps1", p.eps1},
            {"beta", p.beta},
            {"lambda", p.lambda},
            {"k", p.k},
            {"delta", p.delta},
            {"tau", p.tau},
            {"m", p.m},
            {"m_formula", p.m_formula},
            {"m_capped", p.m_capped}}},
          {"cubes", std::move(cubes)},
          {"total_weight", c.total_weight()}};
}

json coreset_parameters(const CoresetConfig& c) {
  return {{"k", c.k},           {"eps1", c.eps1},
          {"beta", c.beta},     {"lambda", c.lambda},
          {"tight", c.tight_level_factor}, {"sample_cap", c.sample_cap}};
}

// Every join row is charged to the first heavy cube that contains it.
json oracle_check(const std::vector<Table>& tables, const FeaturePartition& partition, const CoresetPart& part,
                  std::uint64_t cap) {
  try {
    const auto matrix = materialize(tables, partition, cap);
    std::vector<bool> heavy;
    for (const auto& d : part.coreset.cubes) heavy.push_back(d.heavy);
    const auto exact = exact_weights_given(part.summary, partition, matrix, heavy);
    double worst = 0.0, charged = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      charged += exact[i];
      if (heavy[i] && exact[i] > 0.0) worst = std::max(worst, std::abs(part.coreset.weights[i] / exact[i] - 1.0));
    }
    return {{"join_rows", matrix.rows()},
            {"hausdorff", directed_hausdorff(matrix.points, part.summary.centers)},
            {"exact_weights", exact},
            {"charged_rows", charged},
            {"max_relative_weight_error", worst}};
  } catch (const CapExceeded& e) {
    return {{"skipped", e.what()}};
  }
}

// Commands ------------------------------------------------------------------------------------

int run_validate(const Options& o) {
  const auto in = load_instance(o);
  const JoinIndex index(in.loaded.tables, in.loaded.partition, in.tree);
  const Count n = index.join_size();
  std::cout << "acyclic, n=" << n << '\n';
  json doc = report_head(o, &in, json::object());
  json edges = json::array();
  for (std::size_t t = 0; t < in.tree.size(); ++t) {
    if (in.tree.parent[t] == JoinTree::kNoParent) continue;
    json shared = json::array();
    for (auto f : in.tree.shared[t]) shared.push_back(in.loaded.partition.full[f]);
    edges.push_back({{"child", in.loaded.tables[t].name()},
                     {"parent", in.loaded.tables[in.tree.parent[t]].name()},
                     {"shared", std::move(shared)}});
  }
  doc["result"] = {{"acyclic", true},
                   {"join_size", n},
                   {"dimension", in.loaded.partition.dim()},
                   {"features", in.loaded.partition.full},
                   {"root", in.loaded.tables[in.tree.root].name()},
                   {"edges", std::move(edges)}};
  finish_report(o, doc, json::object());
  return 0;
}

int run_materialize(const Options& o) {
  const auto in = load_instance(o);
  const auto start = Clock::now();
  const auto matrix = materialize(in.loaded.tables, in.loaded.partition, o.cap);
  const double seconds = seconds_since(start);
  if (!o.out.empty()) relcli::write_points(o.out, matrix.feature_order, matrix.points);
  std::cout << "rows=" << matrix.rows() << '\n';
  json doc = report_head(o, &in, {{"cap", o.cap}});
  doc["result"] = {{"rows", matrix.rows()}, {"features", matrix.feature_order}};
  finish_report(o, doc, {{"materialize", seconds}});
  return 0;
}

int run_count(const Options& o) {
  const auto in = load_instance(o);
  const JoinIndex index(in.loaded.tables, in.loaded.partition, in.tree);
  const auto start = Clock::now();
  Count n = 0;
  json cube_doc = nullptr;
  if (o.cube.empty()) {
    n = index.join_size();
  } else {
    const auto cube = relcli::read_cube(o.cube, in.loaded.tables);
    n = index.count(cube);
    cube_doc = {{"tables", cube.tables}, {"center", cube.center}, {"radius", cube.radius}};
  }
  const double seconds = seconds_since(start);
  std::cout << n << '\n';
  json doc = report_head(o, &in, {{"cube", cube_doc}});
  doc["result"] = {{"count", n}};
  finish_report(o, doc, {{"count", seconds}});
  return 0;
}

int run_sample(const Options& o) {
  const auto in = load_instance(o);
  const JoinIndex index(in.loaded.tables, in.loaded.partition, in.tree);
  std::optional<PseudoCube> cube;
  if (!o.cube.empty()) cube = relcli::read_cube(o.cube, in.loaded.tables);
  const auto start = Clock::now();
  const auto points = uniform_sample(index, cube, o.m, split_seed(o.seed, kSampleStream));
  const double seconds = seconds_since(start);
  if (o.out.empty())
    throw ContractViolation("sample: --out is required");
  relcli::write_points(o.out, in.loaded.partition.full, points);
  json doc = report_head(o, &in, {{"m", o.m}, {"filtered", cube.has_value()}});
  doc["result"] = {{"rows", points.size()}};
  finish_report(o, doc, {{"sample", seconds}});
  return 0;
}

int run_build(const Options& o) {
  const auto in = load_instance(o);
  const JoinIndex index(in.loaded.tables, in.loaded.partition, in.tree);
  const auto start = Clock::now();
  const auto tree = build_tree(index, {o.coreset.k, split_seed(o.seed, kBuildStream), o.coreset.tight_level_factor});
  const double seconds = seconds_since(start);
  if (!o.out.empty()) relcli::write_points(o.out, in.loaded.partition.full, tree.summary.centers);
  std::cout << "centers=" << tree.summary.centers.size() << " radius=" << format_double(tree.summary.final_radius)
            << '\n';
  json doc = report_head(o, &in, {{"k", o.coreset.k}, {"tight", o.coreset.tight_level_factor}});
  doc["result"] = {{"centers", tree.summary.centers.size()},
                   {"final_radius", tree.summary.final_radius},
                   {"levels", levels_json(tree.radii)},
                   {"merges", merges_json(tree)}};
  auto timing = tree_seconds(tree);
  timing["total"] = seconds;
  finish_report(o, doc, std::move(timing));
  return 0;
}

int run_weigh(const Options& o) {
  const auto in = load_instance(o);
  const JoinIndex index(in.loaded.tables, in.loaded.partition, in.tree);
  if (o.centers.empty()) throw ContractViolation("weigh: --centers is required");
  const auto csv = relcli::read_points(o.centers);
  if (csv.header != in.loaded.partition.full)
    throw ContractViolation("weigh: center columns must match the join's feature order");
  RootSummary summary;
  summary.centers = csv.points;
  summary.final_radius = o.radius;
  std::vector<std::size_t> all(in.loaded.tables.size());
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = t;
  for (std::size_t i = 0; i < csv.points.size(); ++i) {
    const auto c = csv.points[i];
    summary.cubes.push_back(PseudoCube{all, {c.begin(), c.end()}, o.radius});
  }
  summary.k = summary.cubes.size();
  const auto start = Clock::now();
  const auto kept = drop_empty_cubes(summary, index);
  if (kept.cubes.empty()) throw BuildError("weigh: no center's cube holds a join tuple");
  const auto params = WeightParams::make(o.coreset.eps1, o.coreset.beta, o.coreset.lambda, kept.cubes.size(),
                                         split_seed(o.seed, kWeighStream), o.coreset.sample_cap);
  const auto coreset = assign_weights(kept, index, params);
  const double seconds = seconds_since(start);
  const auto emitted = coreset.emitted();
  if (!o.out.empty()) relcli::write_points(o.out, in.loaded.partition.full, emitted.points, &emitted.weights);
  std::cout << "rows=" << emitted.points.size() << " weight=" << format_double(emitted.total_weight()) << '\n';
  auto params_doc = coreset_parameters(o.coreset);
  params_doc["radius"] = o.radius;
  json doc = report_head(o, &in, std::move(params_doc));
  doc["inputs"]["centers"] = {{"file", fs::path(o.centers).filename().string()},
                              {"blob", relcli::git_blob_hash(o.centers)}};
  auto result = weights_json(coreset);
  result["dropped_empty"] = summary.cubes.size() - kept.cubes.size();
  result["emitted"] = emitted.points.size();
  doc["result"] = std::move(result);
  finish_report(o, doc, {{"weigh", seconds}});
  return 0;
}

int run_coreset(const Options& o) {
  const auto in = load_instance(o);
  auto config = o.coreset;
  config.seed = split_seed(o.seed, kCoresetStream);
  const auto start = Clock::now();
  const auto result = build_coreset(in.loaded.tables, in.loaded.partition, in.label, config);
  const double seconds = seconds_since(start);

  double total = 0.0;
  for (double w : result.weights) total += w;
  std::cout << "rows=" << result.points.size() << " weight=" << format_double(total) << '\n';

  fs::path report_path = o.report;
  if (!o.out.empty()) {
    relcli::write_points(o.out, result.feature_order, result.points, &result.weights);
    if (report_path.empty()) report_path = fs::path(o.out).concat(".json");
  }

  std::vector<std::vector<Table>> class_tables;
  if (o.oracle) {
    if (in.label)
      for (auto& [value, tables] : split_by_label(in.loaded.tables, in.loaded.partition, *in.label))
        class_tables.push_back(std::move(tables));
    else
      class_tables.push_back(in.loaded.tables);
  }

  json parts = json::array(), part_seconds = json::array();
  for (std::size_t p = 0; p < result.parts.size(); ++p) {
    const auto& part = result.parts[p];
    json entry = {{"label", part.label ? json(*part.label) : json(nullptr)},
                  {"join_size", part.join_size},
                  {"centers", part.tree.summary.centers.size()},
                  {"nonempty_cubes", part.summary.cubes.size()},
                  {"final_radius", part.summary.final_radius},
                  {"levels", levels_json(part.tree.radii)},
                  {"merges", merges_json(part.tree)}};
    entry["weights"] = weights_json(part.coreset);
    if (o.oracle) entry["oracle"] = oracle_check(class_tables[p], in.loaded.partition, part, o.cap);
    parts.push_back(std::move(entry));
    auto t = tree_seconds(part.tree);
    t["build"] = part.build_seconds;
    t["weigh"] = part.weigh_seconds;
    part_seconds.push_back(std::move(t));
  }

  auto params = coreset_parameters(o.coreset);
  params["label"] = in.label ? json(*in.label) : json(nullptr);
  params["oracle"] = o.oracle;
  json doc = report_head(o, &in, std::move(params));
  doc["result"] = {{"rows", result.points.size()},
                   {"total_weight", total},
                   {"features", result.feature_order},
                   {"parts", std::move(parts)}};
  Options report_opts = o;
  report_opts.report = report_path.string();
  finish_report(report_opts, doc, {{"total", seconds}, {"parts", std::move(part_seconds)}});
  return 0;
}

LossModel make_model(const Options& o) {
  switch (parse_loss_kind(o.loss)) {
    case LossKind::kmeans:
      return LossModel::kmeans(o.clusters);
    case LossKind::logistic:
      return LossModel::logistic();
    case LossKind::svm:
      return LossModel::svm(o.svm_reg);
  }
  throw ContractViolation("unknown loss");
}

// Splits off the label column by name; k-means ignores labels but still drops the column.
Dataset to_dataset(const std::vector<std::string>& header, const PointSet& points,
                   const std::optional<std::string>& label, const LossModel& model) {
  std::optional<std::size_t> col;
  if (label) {
    auto it = std::find(header.begin(), header.end(), *label);
    if (it == header.end()) throw ContractViolation("label column '" + *label + "' not found");
    col = static_cast<std::size_t>(it - header.begin());
  } else if (model.needs_labels()) {
    throw ContractViolation(to_string(model.kind) + " needs a label column (--label or the spec's label)");
  }
  auto data = split_label(points, col);
  if (!model.needs_labels()) data.y.clear();
  return data;
}

int run_train(const Options& o) {
  const auto model = make_model(o);
  std::optional<Instance> in;
  std::vector<std::string> header;
  PointSet points;
  std::vector<double> weights;
  std::optional<std::string> label = o.label;
  if (!o.data.empty()) {
    auto csv = relcli::read_points(o.data);
    header = std::move(csv.header);
    points = std::move(csv.points);
    weights = std::move(csv.weights);
  } else {
    in = load_instance(o);
    auto matrix = materialize(in->loaded.tables, in->loaded.partition, o.cap);
    header = matrix.feature_order;
    points = std::move(matrix.points);
    weights = unit_weights(points.size());
    label = in->label;
  }
  const auto data = to_dataset(header, points, label, model);
  TrainOptions topt;
  topt.max_iterations = o.iterations;
  topt.seed = split_seed(o.seed, kTrainStream);
  const auto start = Clock::now();
  const auto trained = train(model, data, weights, topt);
  const double seconds = seconds_since(start);
  auto theta = relcli::theta_to_json(model.kind, trained.theta);
  if (!o.out.empty()) relcli::write_json(o.out, theta);
  else std::cout << theta.dump() << '\n';
  json doc = report_head(o, in ? &*in : nullptr,
                         {{"loss", o.loss}, {"clusters", o.clusters}, {"svm_reg", o.svm_reg}, {"iterations", o.iterations}});
  if (!o.data.empty()) doc["inputs"] = {{"data", {{"file", fs::path(o.data).filename().string()}, {"blob", relcli::git_blob_hash(o.data)}}}};
  doc["result"] = {{"objective", trained.objective}, {"iterations", trained.iterations}, {"theta", theta}};
  finish_report(o, doc, {{"train", seconds}});
  return 0;
}

int run_evaluate(const Options& o) {
  const auto model = make_model(o);
  const auto in = load_instance(o);
  if (o.coreset_csv.empty()) throw ContractViolation("evaluate: --coreset is required");
  const auto matrix = materialize(in.loaded.tables, in.loaded.partition, o.cap);
  const auto full = to_dataset(matrix.feature_order, matrix.points, in.label, model);
  const auto csv = relcli::read_points(o.coreset_csv);
  if (csv.header != matrix.feature_order)
    throw ContractViolation("evaluate: coreset columns must match the join's feature order");
  const auto small = to_dataset(csv.header, csv.points, in.label, model);

  Theta theta;
  std::string theta_source;
  if (!o.theta.empty()) {
    theta = relcli::theta_from_json(relcli::read_json(o.theta));
    theta_source = "file";
  } else {
    TrainOptions topt;
    topt.max_iterations = o.iterations;
    topt.seed = split_seed(o.seed, kTrainStream);
    theta = train(model, small, csv.weights, topt).theta;
    theta_source = "trained on coreset";
  }
  const auto diameter = full.size() <= kExactDiameterLimit ? exact_diameter(full.x)
                                                           : two_pass_diameter(full.x, split_seed(o.seed, kEvalStream));
  const auto report = evaluate(model, theta, full, small, csv.weights, diameter);
  std::cout << "full=" << format_double(report.full_objective) << " coreset=" << format_double(report.coreset_objective)
            << " gap=" << format_double(report.multiplicative_gap) << '\n';
  json doc = report_head(o, &in, {{"loss", o.loss}, {"clusters", o.clusters}, {"svm_reg", o.svm_reg}, {"theta", theta_source}});
  doc["inputs"]["coreset"] = {{"file", fs::path(o.coreset_csv).filename().string()},
                              {"blob", relcli::git_blob_hash(o.coreset_csv)}};
  doc["result"] = {{"full_objective", report.full_objective},
                   {"coreset_objective", report.coreset_objective},
                   {"diameter", report.diameter},
                   {"diameter_method", report.diameter_method},
                   {"multiplicative_gap", report.multiplicative_gap},
                   {"additive_gap", report.additive_gap},
                   {"theta", relcli::theta_to_json(model.kind, theta)}};
  finish_report(o, doc, {{"evaluate", report.seconds}});
  if (!o.out.empty()) relcli::write_json(o.out, doc["result"]);
  return 0;
}

int run_synth(const Options& o) {
  if (o.out.empty()) throw ContractViolation("synth: --out <directory> is required");
  auto synth = o.synth;
  synth.seed = o.seed;
  fs::create_directories(o.out);
  const auto spec = write_synth(synth, o.out);
  std::cout << spec.string() << '\n';
  json doc = report_head(o, nullptr,
                         {{"tables", synth.tables},
                          {"rows", synth.rows},
                          {"features", synth.features},
                          {"clusters", synth.clusters},
                          {"skew", synth.skew},
                          {"cells", synth.cells},
                          {"label", synth.label}});
  doc["result"] = {{"spec", spec.filename().string()}};
  finish_report(o, doc, json::object());
  return 0;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation:
      return 2;
    case ErrorKind::build:
      return 3;
    case ErrorKind::io:
      return 4;
  }
  return 3;
}

int report_error(const Options& o, const std::string& type, ErrorKind kind, const std::string& message,
                 json extra = nullptr) {
  if (o.error_json) {
    json err = {{"error",
                 {{"type", type},
                  {"kind", kind == ErrorKind::validation ? "validation" : kind == ErrorKind::build ? "build" : "io"},
                  {"message", message}}}};
    if (!extra.is_null()) err["error"]["details"] = std::move(extra);
    std::cerr << err.dump() << '\n';
  } else {
    std::cerr << "relcore " << o.command << ": " << message << '\n';
  }
  return exit_code(kind);
}

void add_coreset_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--k", o.coreset.k, "centers per node (per class with a label)")->check(CLI::PositiveNumber);
  cmd->add_option("--eps1", o.coreset.eps1, "multiplicative error target");
  cmd->add_option("--beta", o.coreset.beta, "loss continuity constant beta");
  cmd->add_option("--lambda", o.coreset.lambda, "failure probability of the weight estimates");
  cmd->add_option("--sample-cap", o.coreset.sample_cap, "upper limit on samples per cube")->check(CLI::PositiveNumber);
  cmd->add_flag("--tight", o.coreset.tight_level_factor, "use sqrt(max |I|) in the radius recursion");
}

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--loss", o.loss, "kmeans, logistic or svm")->check(CLI::IsMember({"kmeans", "logistic", "svm"}));
  cmd->add_option("--clusters", o.clusters, "k-means clusters")->check(CLI::PositiveNumber);
  cmd->add_option("--svm-reg", o.svm_reg, "hinge weight of the SVM objective");
  cmd->add_option("--iterations", o.iterations, "trainer iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Coresets for empirical risk minimization over acyclic joins"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string label;
  app.add_option("--spec", o.spec, "join specification (JSON)");
  app.add_option("--seed", o.seed, "top-level seed");
  app.add_option("--threads", o.threads, "worker threads")->envname("RELCORE_THREADS")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "primary output file");
  app.add_option("--report", o.report, "JSON report path");
  app.add_option("--label", label, "label column (overrides the spec)");
  app.add_option("--cap", o.cap, "largest join the oracle may materialize");
  app.add_flag("--oracle", o.oracle, "cross-check against the materialized join when it fits under --cap");
  app.add_flag("--error-json", o.error_json, "print errors as JSON on stderr");

  app.add_subcommand("validate", "check acyclicity and print the join size");
  app.add_subcommand("materialize", "write the full join as CSV");
  auto* count = app.add_subcommand("count", "count join tuples inside a pseudo-cube");
  count->add_option("--cube", o.cube, "cube JSON: index_set, center, radius");
  auto* sample = app.add_subcommand("sample", "uniform samples from the join");
  sample->add_option("--m", o.m, "number of draws")->check(CLI::PositiveNumber);
  sample->add_option("--cube", o.cube, "restrict to a pseudo-cube");
  auto* build = app.add_subcommand("build", "aggregation tree; writes the root centers");
  add_coreset_options(build, o);
  auto* weigh = app.add_subcommand("weigh", "weights for given centers and radius");
  add_coreset_options(weigh, o);
  weigh->add_option("--centers", o.centers, "centers CSV in the join's feature order");
  weigh->add_option("--radius", o.radius, "per-subspace cube radius")->check(CLI::NonNegativeNumber);
  auto* coreset = app.add_subcommand("coreset", "build and weigh; writes the weighted coreset");
  add_coreset_options(coreset, o);
  auto* train_cmd = app.add_subcommand("train", "fit a model on a (weighted) CSV or the full join");
  add_model_options(train_cmd, o);
  train_cmd->add_option("--data", o.data, "points CSV, optionally with a weight column");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "compare full and coreset objectives");
  add_model_options(evaluate_cmd, o);
  evaluate_cmd->add_option("--coreset", o.coreset_csv, "weighted coreset CSV");
  evaluate_cmd->add_option("--theta", o.theta, "model JSON; trained on the coreset when absent");
  auto* synth = app.add_subcommand("synth", "generate a seeded chain-join instance");
  synth->add_option("--tables", o.synth.tables)->check(CLI::PositiveNumber);
  synth->add_option("--rows", o.synth.rows)->check(CLI::PositiveNumber);
  synth->add_option("--features", o.synth.features)->check(CLI::PositiveNumber);
  synth->add_option("--clusters", o.synth.clusters)->check(CLI::PositiveNumber);
  synth->add_option("--skew", o.synth.skew);
  synth->add_option("--cells", o.synth.cells)->check(CLI::PositiveNumber);
  synth->add_option("--noise", o.synth.noise);
  synth->add_flag("--with-label", o.synth.label, "add a binary label column to the first table");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    o.command = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
    if (o.error_json) return report_error(o, "UsageError", ErrorKind::validation, e.what());
    app.exit(e);
    return 2;
  }
  if (!label.empty()) o.label = label;
  o.command = app.get_subcommands().front()->get_name();
  set_thread_count(o.threads);

  try {
    if (o.command == "validate") return run_validate(o);
    if (o.command == "materialize") return run_materialize(o);
    if (o.command == "count") return run_count(o);
    if (o.command == "sample") return run_sample(o);
    if (o.command == "build") return run_build(o);
    if (o.command == "weigh") return run_weigh(o);
    if (o.command == "coreset") return run_coreset(o);
    if (o.command == "train") return run_train(o);
    if (o.command == "evaluate") return run_evaluate(o);
    if (o.command == "synth") return run_synth(o);
  } catch (const CyclicError& e) {
    return report_error(o, "CyclicError", e.kind(), e.what(), e.residual());
  } catch (const CapExceeded& e) {
    return report_error(o, "CapExceeded", e.kind(), e.what(), {{"estimated_size", e.estimated_size()}});
  } catch (const LoadError& e) {
    return report_error(o, "LoadError", e.kind(), e.what());
  } catch (const ContractViolation& e) {
    return report_error(o, "ContractViolation", e.kind(), e.what());
  } catch (const CountOverflow& e) {
    return report_error(o, "CountOverflow", e.kind(), e.what());
  } catch (const EmptyRegion& e) {
    return report_error(o, "EmptyRegion", e.kind(), e.what());
  } catch (const DivergenceError& e) {
    return report_error(o, "DivergenceError", e.kind(), e.what());
  } catch (const Error& e) {
    return report_error(o, "BuildError", e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(o, "IOError", ErrorKind::io, e.what());
  } catch (const std::exception& e) {
    return report_error(o, "InternalError", ErrorKind::build, e.what());
  }
  return 2;
}
