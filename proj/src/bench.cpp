#include "paraode/bench.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

namespace paraode {

Method method_by_name(const std::string& name) {
  if (name == "paraieks") return Method::kParaIeks;
  if (name == "ieks") return Method::kSeqIeks;
  if (name == "eks") return Method::kEks;
  throw InvalidInputError("unknown method '" + name + "' (expected paraieks, ieks or eks)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kParaIeks: return "paraieks";
    case Method::kSeqIeks: return "ieks";
    case Method::kEks: return "eks";
  }
  return "?";
}

const char* const kRunRecordHeader =
    "problem,method,nu,grid_size,rmse,runtime_seconds,iterations,sigma_hat,converged,"
    "combine_invocations,sequential_depth";

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << r.problem << ',' << r.method << ',' << r.nu << ',' << r.grid_size << ','
      << (r.rmse ? fmt_double(*r.rmse) : std::string()) << ',' << fmt_double(r.runtime_seconds)
      << ',' << r.iterations << ',' << fmt_double(r.sigma_hat) << ','
      << (r.converged ? "true" : "false") << ',' << r.combine_invocations << ','
      << r.sequential_depth;
  return out.str();
}

std::string to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << kRunRecordHeader << '\n';
  for (const RunRecord& r : records) out << csv_row(r) << '\n';
  return out.str();
}

std::string to_svg(const std::vector<RunRecord>& records) {
  struct Series {
    std::vector<std::pair<double, double>> points;  // (log10 runtime, log10 rmse)
  };
  std::map<std::string, Series> series;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const RunRecord& r : records) {
    if (!r.rmse || !(*r.rmse > 0.0) || !(r.runtime_seconds > 0.0)) continue;
    const double x = std::log10(r.runtime_seconds);
    const double y = std::log10(*r.rmse);
    series[r.problem + " " + r.method + " nu=" + std::to_string(r.nu)].points.emplace_back(x, y);
    xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    ymin = std::min(ymin, y), ymax = std::max(ymax, y);
  }
  if (series.empty()) return "<svg xmlns='http://www.w3.org/2000/svg'/>\n";
  if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-9) ymin -= 0.5, ymax += 0.5;

  const double width = 760, height = 520, ml = 80, mr = 20, mt = 20, mb = 60;
  auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto sy = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * (height - mt - mb); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' font-family='sans-serif' font-size='12'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  // Decade grid and tick labels.
  for (int e = static_cast<int>(std::floor(xmin)); e <= static_cast<int>(std::ceil(xmax)); ++e) {
    if (e < xmin || e > xmax) continue;
    svg << "<line x1='" << sx(e) << "' y1='" << mt << "' x2='" << sx(e) << "' y2='"
        << height - mb << "' stroke='#ddd'/>\n";
    svg << "<text x='" << sx(e) << "' y='" << height - mb + 18 << "' text-anchor='middle'>1e"
        << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::floor(ymin)); e <= static_cast<int>(std::ceil(ymax)); ++e) {
    if (e < ymin || e > ymax) continue;
    svg << "<line x1='" << ml << "' y1='" << sy(e) << "' x2='" << width - mr << "' y2='" << sy(e)
        << "' stroke='#ddd'/>\n";
    svg << "<text x='" << ml - 8 << "' y='" << sy(e) + 4 << "' text-anchor='end'>1e" << e
        << "</text>\n";
  }
  svg << "<rect x='" << ml << "' y='" << mt << "' width='" << width - ml - mr << "' height='"
      << height - mt - mb << "' fill='none' stroke='#333'/>\n";
  svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 14
      << "' text-anchor='middle'>runtime [s]</text>\n";
  svg << "<text x='18' y='" << (mt + height - mb) / 2 << "' text-anchor='middle' transform='rotate(-90 18 "
      << (mt + height - mb) / 2 << ")'>RMSE</text>\n";

  int idx = 0;
  for (const auto& [label, s] : series) {
    const char* color = palette[idx % 8];
    std::vector<std::pair<double, double>> pts = s.points;
    std::sort(pts.begin(), pts.end());
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (const auto& [x, y] : pts) svg << sx(x) << ',' << sy(y) << ' ';
    svg << "'/>\n";
    for (const auto& [x, y] : pts) {
      svg << "<circle cx='" << sx(x) << "' cy='" << sy(y) << "' r='3' fill='" << color << "'/>\n";
    }
    svg << "<text x='" << ml + 10 << "' y='" << mt + 16 + 16 * idx << "' fill='" << color << "'>"
        << label << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

SolverReport dispatch(Method method, const NamedProblem& prob, const IwpPrior& prior,
                      const std::vector<double>& grid, const IeksConfig& config, WorkPool& pool) {
  switch (method) {
    case Method::kParaIeks: return para_ieks(prob.ivp, prior, grid, config, pool);
    case Method::kSeqIeks: return seq_ieks(prob.ivp, prior, grid, config);
    case Method::kEks: return eks_solve(prob.ivp, prior, grid, config.linearization);
  }
  throw InvalidInputError("dispatch: unknown method");
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open output file '" + path + "'");
  out << content;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct SolveOptions {
  std::string problem = "logistic";
  std::string method = "paraieks";
  int nu = 2;
  int n = 100;
  int max_iterations = 100;
  unsigned workers = 0;
  std::string out;
};

int cmd_solve(const SolveOptions& opt) {
  const NamedProblem prob = problem_by_name(opt.problem);
  const Method method = method_by_name(opt.method);
  if (opt.n < 2) throw InvalidInputError("solve: --n must be at least 2");
  if (opt.nu < 1 || opt.nu > 4) throw InvalidInputError("solve: --nu must be in 1..4");

  const std::vector<double> grid = uniform_grid(prob.ivp.t_end, opt.n);
  IwpPrior prior;
  prior.nu = opt.nu;
  prior.dim = prob.ivp.dim;
  IeksConfig config;
  config.max_iterations = opt.max_iterations;
  WorkPool pool(opt.workers);

  const SolverReport report = dispatch(method, prob, prior, grid, config, pool);

  nlohmann::json doc;
  doc["problem"] = opt.problem;
  doc["method"] = opt.method;
  doc["nu"] = opt.nu;
  doc["grid_size"] = opt.n;
  doc["grid"] = report.times;
  auto& mean = doc["mean"] = nlohmann::json::array();
  auto& stddev = doc["std"] = nlohmann::json::array();
  for (std::size_t k = 0; k < report.solution_means.size(); ++k) {
    const Vector& m = report.solution_means[k];
    mean.push_back(std::vector<double>(m.data(), m.data() + m.size()));
    const Vector s = report.solution_covs[k].diagonal().cwiseMax(0.0).cwiseSqrt();
    stddev.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  }
  doc["sigma_hat"] = report.sigma_hat;
  doc["iterations"] = report.iterations;
  doc["converged"] = report.converged;
  doc["objective_trace"] = report.objective_trace;

  write_output(opt.out, doc.dump(2) + "\n");
  return report.converged ? 0 : 2;
}

struct BenchmarkOptions {
  std::vector<std::string> problems = {"logistic", "rigidbody", "vanderpol"};
  std::vector<std::string> methods = {"paraieks", "ieks", "eks"};
  int nu = 0;  // 0 sweeps {1, 2}
  std::vector<int> grid_sizes = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  int repeats = 3;
  unsigned workers = 0;
  std::string out;
  std::string svg;
};

int cmd_benchmark(const BenchmarkOptions& opt) {
  if (opt.repeats < 1) throw InvalidInputError("benchmark: --repeats must be at least 1");
  std::vector<int> nus = opt.nu == 0 ? std::vector<int>{1, 2} : std::vector<int>{opt.nu};
  WorkPool pool(opt.workers);

  std::vector<RunRecord> records;
  for (const std::string& pname : opt.problems) {
    const NamedProblem prob = problem_by_name(pname);  // reference built once per problem
    for (const std::string& mname : opt.methods) {
      const Method method = method_by_name(mname);
      for (int nu : nus) {
        for (int n : opt.grid_sizes) {
          RunRecord rec;
          rec.problem = pname;
          rec.method = mname;
          rec.nu = nu;
          rec.grid_size = n;
          try {
            if (n < 2) throw InvalidInputError("benchmark: grid sizes must be at least 2");
            const std::vector<double> grid = uniform_grid(prob.ivp.t_end, n);
            IwpPrior prior;
            prior.nu = nu;
            prior.dim = prob.ivp.dim;
            const IeksConfig config;
            SolverReport report;
            std::vector<double> timings;
            for (int r = 0; r <= opt.repeats; ++r) {  // one warm-up plus timed repeats
              const auto start = std::chrono::steady_clock::now();
              report = dispatch(method, prob, prior, grid, config, pool);
              const std::chrono::duration<double> elapsed =
                  std::chrono::steady_clock::now() - start;
              if (r > 0) timings.push_back(elapsed.count());
            }
            rec.runtime_seconds = median(timings);
            rec.rmse = rmse(report.solution_means, prob.reference, grid);
            rec.iterations = report.iterations;
            rec.sigma_hat = report.sigma_hat;
            rec.converged = report.converged;
            rec.combine_invocations = report.scan_stats.combine_invocations;
            rec.sequential_depth = report.scan_stats.sequential_depth;
          } catch (const std::exception& e) {
            std::cerr << "benchmark cell " << pname << "/" << mname << "/nu=" << nu << "/n=" << n
                      << " failed: " << e.what() << "\n";
            rec.rmse.reset();
            rec.converged = false;
          }
          records.push_back(rec);
        }
      }
    }
  }

  write_output(opt.out, to_csv(records));
  if (!opt.svg.empty()) {
    std::ofstream svg(opt.svg, std::ios::binary);
    if (!svg) throw InvalidInputError("cannot open SVG file '" + opt.svg + "'");
    svg << to_svg(records);
  }
  return 0;
}

struct CompareOptions {
  std::vector<std::string> problems = {"logistic", "rigidbody", "vanderpol"};
  double tolerance = 1e-8;
  unsigned workers = 0;
};

int cmd_compare(const CompareOptions& opt) {
  static const int kGrids[] = {30, 100, 150};
  WorkPool pool(opt.workers);
  bool all_ok = true;
  for (const std::string& pname : opt.problems) {
    const NamedProblem prob = problem_by_name(pname);
    for (int n : kGrids) {
      const std::vector<double> grid = uniform_grid(prob.ivp.t_end, n);
      IwpPrior prior;
      prior.nu = 2;
      prior.dim = prob.ivp.dim;
      const IeksConfig config;
      const SolverReport seq = seq_ieks(prob.ivp, prior, grid, config);
      const SolverReport par = para_ieks(prob.ivp, prior, grid, config, pool);
      double max_diff = 0.0;
      for (std::size_t k = 0; k < seq.marginals.size(); ++k) {
        max_diff = std::max(
            max_diff, (seq.marginals[k].mean - par.marginals[k].mean).cwiseAbs().maxCoeff());
      }
      const bool ok = max_diff <= opt.tolerance && seq.iterations == par.iterations;
      all_ok = all_ok && ok;
      std::printf("%-10s n=%-4d max_mean_diff=%.3e iterations=%d/%d %s\n", pname.c_str(), n,
                  max_diff, seq.iterations, par.iterations, ok ? "PASS" : "FAIL");
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Parallel-in-time probabilistic ODE solver"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "Solve one problem and print the posterior");
  solve->add_option("--problem", solve_opt.problem, "logistic, rigidbody or vanderpol");
  solve->add_option("--method", solve_opt.method, "paraieks, ieks or eks");
  solve->add_option("--nu", solve_opt.nu, "prior smoothness order");
  solve->add_option("--n", solve_opt.n, "number of grid steps");
  solve->add_option("--max-iterations", solve_opt.max_iterations, "iteration budget");
  solve->add_option("--workers", solve_opt.workers, "work pool width (0 = hardware)");
  solve->add_option("--out", solve_opt.out, "output path (default stdout)");

  BenchmarkOptions bench_opt;
  CLI::App* bench = app.add_subcommand("benchmark", "Work-precision sweep, CSV output");
  bench->add_option("--problems", bench_opt.problems, "problems to sweep")->delimiter(',');
  bench->add_option("--methods", bench_opt.methods, "methods to sweep")->delimiter(',');
  bench->add_option("--nu", bench_opt.nu, "restrict to one smoothness order");
  bench->add_option("--grid-sizes", bench_opt.grid_sizes, "grid sizes to sweep")->delimiter(',');
  bench->add_option("--repeats", bench_opt.repeats, "timed repeats per cell (after 1 warm-up)");
  bench->add_option("--workers", bench_opt.workers, "work pool width (0 = hardware)");
  bench->add_option("--out", bench_opt.out, "CSV path (default stdout)");
  bench->add_option("--svg", bench_opt.svg, "also write a work-precision SVG chart");

  CompareOptions cmp_opt;
  CLI::App* cmp = app.add_subcommand("compare", "Check the scan smoother against the sequential one");
  cmp->add_option("--problems", cmp_opt.problems, "problems to check")->delimiter(',');
  cmp->add_option("--tolerance", cmp_opt.tolerance, "max allowed mean deviation");
  cmp->add_option("--workers", cmp_opt.workers, "work pool width (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_opt);
    if (bench->parsed()) return cmd_benchmark(bench_opt);
    if (cmp->parsed()) return cmd_compare(cmp_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace paraode
