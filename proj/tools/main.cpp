#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <qgraph/errors.hpp>
#include <qgraph/io.hpp>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;

constexpr const char* kOutDirEnv = "QGRAPH_OUT_DIR";

/// Relative paths land in $QGRAPH_OUT_DIR when set, else the working
/// directory; absolute paths win as given.
std::string resolve_out(const std::string& requested, const std::string& input,
                        const std::string& suffix) {
  namespace fs = std::filesystem;
  fs::path p;
  if (!requested.empty()) {
    p = requested;
  } else {
    p = fs::path(input).stem();
    p += suffix;
  }
  if (p.is_absolute()) return p.string();
  if (const char* dir = std::getenv(kOutDirEnv)) return (fs::path(dir) / p).string();
  return p.string();
}

struct SolverFlags {
  double k_tol = 0;
  double value_tol = 1e-8;
  double degeneracy_tol = 1e-8;
  int threads = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--ktol", k_tol, "Bisection half-width; 0 picks 1e-12 * kmax")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--valtol", value_tol, "Relative |det| gate for even-order roots")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--degtol", degeneracy_tol, "Relative second-singular-value gate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads for the solver")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  qgraph::SolveOptions make() const {
    qgraph::SolveOptions o;
    o.k_tol = k_tol;
    o.value_tol = value_tol;
    o.degeneracy_tol = degeneracy_tol;
    o.threads = threads;
    return o;
  }
};

void write_text(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw qgraph::InvalidInput("cannot open output file: " + path);
  os << body;
}

std::string class_name(qgraph::MinimalClass c) {
  switch (c) {
    case qgraph::MinimalClass::star3: return "star3";
    case qgraph::MinimalClass::eight: return "eight";
    case qgraph::MinimalClass::cherry: return "cherry";
    case qgraph::MinimalClass::circle: return "circle";
    case qgraph::MinimalClass::interval: return "interval";
  }
  return "?";
}

ordered_json spectrum_json(const qgraph::SpectrumSlice& slice) {
  ordered_json roots = ordered_json::array();
  for (const auto& r : slice.roots) {
    ordered_json row;
    row["k"] = r.k;
    row["residual"] = r.residual;
    row["degenerate"] = r.degenerate;
    row["multiplicity"] = r.multiplicity;
    row["amplitudes"] = std::vector<double>(r.amplitudes.begin(), r.amplitudes.end());
    roots.push_back(std::move(row));
  }
  ordered_json out;
  out["k_max"] = slice.k_max;
  out["count"] = slice.count;
  out["roots"] = std::move(roots);
  return out;
}

std::string census_csv(const qgraph::Census& census, int edges) {
  std::string s;
  for (int e = 0; e < edges; ++e) s += "m_" + std::to_string(e + 1) + ",";
  s += "relative_density,is_scar,count\n";
  for (const auto& c : census.clusters) {
    for (int e = 0; e < edges; ++e) s += qgraph::format_double(c.center.m[static_cast<size_t>(e)]) + ",";
    s += qgraph::format_double(c.relative_density);
    s += c.is_scar ? ",1," : ",0,";
    s += std::to_string(c.count) + "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qgraph: eigenvalues, semi-classical measures, and edge-walk dynamics on metric graphs.\n"
      "Relative output paths are placed under $QGRAPH_OUT_DIR when that variable is set."};
  app.require_subcommand(1);

  std::string input;
  std::string out;
  std::string spectrum_format;
  std::string census_format;
  double kmax = 0;
  SolverFlags solver;
  double cluster_tol = 0.05;
  int blocks = 10;
  double horizon = 1e5;
  int trials = 20;
  std::uint64_t seed = 12345;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("graph", input, "Graph JSON file")->required();
    cmd->add_option("-o,--out", out, "Output file (default: <graph-stem>_<subcommand> extension)");
  };
  auto add_kmax = [&](CLI::App* cmd) {
    cmd->add_option("--kmax", kmax, "Upper end of the solved k-range")
        ->required()
        ->check(CLI::PositiveNumber);
  };

  auto* sp = app.add_subcommand("spectrum", "Solve the secular roots up to kmax");
  add_input(sp);
  add_kmax(sp);
  solver.attach(sp);
  sp->add_option("--format", spectrum_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val("csv");
  sp->callback([&] {
    auto mg = qgraph::metric_from(qgraph::load_graph_json(input));
    auto slice = qgraph::solve_spectrum(mg, kmax, solver.make());
    const bool json = spectrum_format == "json";
    const std::string path = resolve_out(out, input, json ? "_spectrum.json" : "_spectrum.csv");
    if (json)
      write_text(path, spectrum_json(slice).dump(2) + "\n");
    else
      qgraph::write_spectrum_csv(path, slice);
    std::cout << "roots " << slice.roots.size() << " (multiplicity total " << slice.count
              << ") up to k = " << qgraph::format_double(slice.k_max) << "\nwrote " << path << "\n";
  });

  auto* wy = app.add_subcommand("weyl", "Mean-density ratio and roots-per-window diagnostic");
  add_input(wy);
  add_kmax(wy);
  solver.attach(wy);
  wy->callback([&] {
    auto mg = qgraph::metric_from(qgraph::load_graph_json(input));
    auto slice = qgraph::solve_spectrum(mg, kmax, solver.make());
    const double ratio = qgraph::weyl_ratio(slice, mg);
    const auto windows = qgraph::window_zero_counts(slice);
    std::string body = "k_max,count,weyl_ratio,max_roots_per_unit_window\n";
    body += qgraph::format_double(slice.k_max) + "," + std::to_string(slice.count) + "," +
            qgraph::format_double(ratio) + "," + std::to_string(windows.max_count) + "\n";
    const std::string path = resolve_out(out, input, "_weyl.csv");
    write_text(path, body);
    std::cout << "count " << slice.count << "  weyl ratio " << qgraph::format_double(ratio)
              << "  max roots in a unit window " << windows.max_count << "\n";
    for (const auto& [n, times] : windows.histogram)
      std::cout << "  windows holding " << n << " roots: " << times << "\n";
    std::cout << "wrote " << path << "\n";
  });

  auto* bg = app.add_subcommand("bgmass", "Spectral mass of the constant observable vs L/pi");
  add_input(bg);
  add_kmax(bg);
  solver.attach(bg);
  bg->add_option("--blocks", blocks, "k-blocks for the error bar")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bg->callback([&] {
    auto mg = qgraph::metric_from(qgraph::load_graph_json(input));
    qgraph::AverageOptions opts;
    opts.solve = solver.make();
    opts.blocks = blocks;
    auto avg = qgraph::bg_average(mg, [](const qgraph::TorusPoint&) { return 1.0; }, kmax, opts);
    const std::string path = resolve_out(out, input, "_bgmass.csv");
    qgraph::write_average_csv(path, avg, kmax);
    const double target = mg.total_length() / std::acos(-1.0);
    std::cout << "mass estimate " << qgraph::format_double(avg.estimate[0]) << " +- "
              << qgraph::format_double(avg.std_error[0]) << "  (L/pi = "
              << qgraph::format_double(target) << ")\nwrote " << path << "\n";
  });

  auto* lv = app.add_subcommand("liouville", "Ergodic average of the normalized Gauss map");
  add_input(lv);
  add_kmax(lv);
  solver.attach(lv);
  lv->add_option("--blocks", blocks, "k-blocks for the error bar")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  lv->callback([&] {
    auto mg = qgraph::metric_from(qgraph::load_graph_json(input));
    auto sys = qgraph::build_secular_system(mg.graph);
    qgraph::AverageOptions opts;
    opts.solve = solver.make();
    opts.blocks = blocks;
    auto slice = qgraph::solve_spectrum(sys, mg, kmax, opts.solve);
    auto avg = qgraph::liouville_average(sys, mg, slice, opts);
    const std::string path = resolve_out(out, input, "_liouville.csv");
    qgraph::write_average_csv(path, avg, kmax);
    std::cout << "per-edge averages (limit 1/pi = "
              << qgraph::format_double(1.0 / std::acos(-1.0)) << "):\n";
    for (int e = 0; e < avg.estimate.size(); ++e)
      std::cout << "  edge " << e << ": " << qgraph::format_double(avg.estimate[e]) << " +- "
                << qgraph::format_double(avg.std_error[e]) << "\n";
    std::cout << "skipped: " << avg.skipped_degenerate << " degenerate, " << avg.skipped_singular
              << " near-singular\nwrote " << path << "\n";
  });

  auto* cs = app.add_subcommand("census", "Cluster normalized eigenfunction measures");
  add_input(cs);
  add_kmax(cs);
  solver.attach(cs);
  cs->add_option("--cluster-tol", cluster_tol, "Max-norm ball radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cs->add_option("--format", census_format, "json or csv")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val("json");
  cs->callback([&] {
    auto mg = qgraph::metric_from(qgraph::load_graph_json(input));
    auto slice = qgraph::solve_spectrum(mg, kmax, solver.make());
    qgraph::CensusOptions opts;
    opts.cluster_tol = cluster_tol;
    auto census = qgraph::semiclassical_census(mg, slice, opts);
    const bool csv = census_format == "csv";
    const std::string path = resolve_out(out, input, csv ? "_census.csv" : "_census.json");
    if (csv)
      write_text(path, census_csv(census, mg.graph.edge_count()));
    else
      qgraph::write_census_json(path, census);
    std::cout << census.clusters.size() << " clusters over " << census.total_used
              << " roots (" << census.skipped_degenerate << " degenerate skipped)\n";
    for (const auto& c : census.clusters) {
      std::cout << "  density " << qgraph::format_double(c.relative_density) << "  m = (";
      for (size_t e = 0; e < c.center.m.size(); ++e)
        std::cout << (e ? ", " : "") << qgraph::format_double(c.center.m[e]);
      std::cout << (c.is_scar ? ")  scar\n" : ")\n");
    }
    std::cout << "wrote " << path << "\n";
  });

  auto* sc = app.add_subcommand("scars", "Build and verify localized eigenfunctions");
  add_input(sc);
  sc->add_option("--seed", seed, "Seed for off-support lengths")->capture_default_str();
  sc->callback([&] {
    auto g = qgraph::load_graph_json(input).graph;
    auto supports = qgraph::minimal_scar_supports(g);
    qgraph::ScarMetricOptions opts;
    opts.seed = seed;
    ordered_json rows = ordered_json::array();
    double worst = 0;
    for (const auto& sup : supports) {
      auto built = qgraph::scar_metric(g, sup, opts);
      auto check = qgraph::verify_scar(built.metric, sup, built.k);
      worst = std::max(worst, check.residual);
      ordered_json row;
      row["kind"] = sup.kind == qgraph::ScarSupport::Kind::cycle ? "cycle" : "path";
      row["edges"] = sup.edge_seq;
      row["k"] = built.k;
      row["lengths"] = built.metric.lengths;
      row["residual"] = check.residual;
      rows.push_back(std::move(row));
    }
    const std::string path = resolve_out(out, input, "_scars.json");
    write_text(path, rows.dump(2) + "\n");
    std::cout << supports.size() << " minimal supports, worst residual "
              << qgraph::format_double(worst) << "\nwrote " << path << "\n";
  });

  auto* uc = app.add_subcommand(
      "unitcheck", "Compare unit-length secular roots against adjacency predictions");
  add_input(uc);
  uc->callback([&] {
    auto g = qgraph::load_graph_json(input).graph;
    auto sys = qgraph::build_secular_system(g);
    auto check = qgraph::cross_check_unit(g, sys);
    const std::string path = resolve_out(out, input, "_unitcheck.csv");
    qgraph::write_unitcheck_csv(path, check);
    int predicted = 0;
    for (const auto& row : check.rows) predicted += row.predicted_multiplicity;
    std::cout << "lines " << check.rows.size() << "  predicted multiplicity total " << predicted
              << " (= 2#E " << 2 * g.edge_count() << ")  max deviation "
              << qgraph::format_double(check.max_deviation)
              << (check.unmatched.empty() ? "\n" : "  UNMATCHED SOLVER ROOTS\n");
    std::cout << "wrote " << path << "\n";
  });

  auto* mk = app.add_subcommand("markov", "Edge occupation of the vertex-scattering walk");
  add_input(mk);
  mk->add_option("--T", horizon, "Trajectory horizon")->check(CLI::PositiveNumber)->capture_default_str();
  mk->add_option("--trials", trials, "Independent trajectories")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mk->add_option("--seed", seed, "Master seed; trial i draws stream i")->capture_default_str();
  mk->callback([&] {
    auto mg = qgraph::metric_from(qgraph::load_graph_json(input));
    auto report = qgraph::ergodicity_report(mg, trials, horizon, seed);
    const std::string path = resolve_out(out, input, "_markov.csv");
    qgraph::write_markov_csv(path, report);
    std::cout << "tv distance to length fractions " << qgraph::format_double(report.tv_distance)
              << "  spectral gap " << qgraph::format_double(report.gap)
              << (report.non_ergodic ? "  (non-ergodic)\n" : "\n");
    std::cout << "wrote " << path << "\n";
  });

  auto* rd = app.add_subcommand("reduce", "Minimal homeomorphism class and contraction set");
  add_input(rd);
  rd->callback([&] {
    auto g = qgraph::load_graph_json(input).graph;
    auto red = qgraph::reduce_to_minimal(g);
    ordered_json j;
    j["class"] = class_name(red.cls);
    j["contracted"] = red.contracted;
    const std::string path = resolve_out(out, input, "_reduce.json");
    write_text(path, j.dump(2) + "\n");
    std::cout << "class " << class_name(red.cls) << "  contract {";
    for (size_t i = 0; i < red.contracted.size(); ++i)
      std::cout << (i ? ", " : "") << red.contracted[i];
    std::cout << "}\nwrote " << path << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const qgraph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
