#include "qgraph/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qgraph {

namespace {

nlohmann::json parse_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FileNotFound("no such file: " + path);
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedGraphJson(path + ": " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileNotFound("cannot write: " + path);
  return out;
}

}  // namespace

GraphFile load_graph_json(const std::string& path) {
  const nlohmann::json j = parse_file(path);
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw MalformedGraphJson(path + ": expected an object with \"vertices\" and \"edges\"");
  if (!j["vertices"].is_number_integer())
    throw MalformedGraphJson(path + ": \"vertices\" must be an integer");
  const int vertices = j["vertices"].get<int>();
  if (!j["edges"].is_array()) throw MalformedGraphJson(path + ": \"edges\" must be an array");

  std::vector<Edge> edges;
  for (const auto& item : j["edges"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
        !item[1].is_number_integer())
      throw MalformedGraphJson(path + ": each edge must be a [tail, head] integer pair");
    edges.push_back({item[0].get<int>(), item[1].get<int>()});
  }

  GraphFile file;
  try {
    file.graph = build_graph(vertices, edges);
  } catch (const Error& e) {
    throw MalformedGraphJson(path + ": " + e.what());
  }
  if (j.contains("lengths")) {
    if (!j["lengths"].is_array() || j["lengths"].size() != edges.size())
      throw MalformedGraphJson(path + ": \"lengths\" must list one number per edge");
    std::vector<double> lengths;
    for (const auto& item : j["lengths"]) {
      if (!item.is_number()) throw MalformedGraphJson(path + ": lengths must be numbers");
      const double l = item.get<double>();
      if (!std::isfinite(l) || l <= 0)
        throw MalformedGraphJson(path + ": lengths must be positive and finite");
      lengths.push_back(l);
    }
    file.lengths = std::move(lengths);
  }
  return file;
}

void save_graph_json(const std::string& path, const GraphFile& file) {
  nlohmann::ordered_json j;
  j["vertices"] = file.graph.vertex_count();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const Edge& e : file.graph.edges()) edges.push_back({e.tail, e.head});
  j["edges"] = std::move(edges);
  if (file.lengths) j["lengths"] = *file.lengths;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

MetricGraph metric_from(const GraphFile& file) {
  if (!file.lengths)
    throw InvalidInput("graph file has no \"lengths\" field but this operation needs a metric");
  return build_metric_graph(file.graph.vertex_count(), file.graph.edges(), *file.lengths);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_spectrum_csv(const std::string& path, const SpectrumSlice& slice) {
  auto out = open_out(path);
  const int e_count =
      slice.roots.empty() ? 0 : static_cast<int>(slice.roots.front().amplitudes.size()) / 2;
  out << "k,residual,degenerate,multiplicity";
  for (int e = 0; e < e_count; ++e) out << ",a_" << e + 1 << ",b_" << e + 1;
  out << "\n";
  for (const EigenData& root : slice.roots) {
    out << format_double(root.k) << "," << format_double(root.residual) << ","
        << (root.degenerate ? 1 : 0) << "," << root.multiplicity;
    for (int i = 0; i < root.amplitudes.size(); ++i) out << "," << format_double(root.amplitudes[i]);
    out << "\n";
  }
}

void write_census_json(const std::string& path, const Census& census) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CensusCluster& c : census.clusters) {
    nlohmann::ordered_json item;
    item["m"] = c.center.m;
    item["density"] = c.relative_density;
    item["is_scar"] = c.is_scar;
    item["count"] = c.count;
    arr.push_back(std::move(item));
  }
  auto out = open_out(path);
  out << arr.dump(2) << "\n";
}

void write_average_csv(const std::string& path, const BgAverage& avg, double k_max) {
  auto out = open_out(path);
  const int dim = static_cast<int>(avg.estimate.size());
  const int blocks = static_cast<int>(avg.block_estimates.cols());
  out << "k_block";
  for (int d = 0; d < dim; ++d) out << ",estimate_" << d + 1;
  for (int d = 0; d < dim; ++d) out << ",stderr_" << d + 1;
  out << "\n";
  for (int b = 0; b < blocks; ++b) {
    const auto running = avg.block_estimates.leftCols(b + 1);
    const Eigen::VectorXd mean = running.rowwise().mean();
    out << format_double(k_max * (b + 1) / blocks);
    for (int d = 0; d < dim; ++d) out << "," << format_double(mean[d]);
    for (int d = 0; d < dim; ++d) {
      double se = 0;
      if (b > 0) {
        double ss = 0;
        for (int c = 0; c <= b; ++c) {
          const double dev = avg.block_estimates(d, c) - mean[d];
          ss += dev * dev;
        }
        se = std::sqrt(ss / (static_cast<double>(b + 1) * b));
      }
      out << "," << format_double(se);
    }
    out << "\n";
  }
}

void write_markov_csv(const std::string& path, const ErgodicityReport& report) {
  auto out = open_out(path);
  out << "edge,occupation_fraction,occupation_stderr,expected\n";
  for (size_t e = 0; e < report.occupation.size(); ++e) {
    out << e << "," << format_double(report.occupation[e]) << ","
        << format_double(report.occupation_stderr[e]) << "," << format_double(report.expected[e])
        << "\n";
  }
}

void write_unitcheck_csv(const std::string& path, const UnitCrossCheck& check) {
  auto out = open_out(path);
  out << "predicted_k,predicted_multiplicity,source,solver_k,solver_multiplicity,deviation\n";
  for (const UnitCrossCheck::Row& row : check.rows) {
    const char* source = row.source == UnitLine::Source::adjacency ? "adjacency"
                         : row.source == UnitLine::Source::zero_mode ? "zero_mode"
                                                                     : "pi_mode";
    out << format_double(row.predicted_k) << "," << row.predicted_multiplicity << "," << source
        << "," << format_double(row.solver_k) << "," << row.solver_multiplicity << ","
        << format_double(std::abs(row.solver_k - row.predicted_k)) << "\n";
  }
}

}  // namespace qgraph
