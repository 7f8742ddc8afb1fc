// asdlab: numerical laboratory for anti-self-dual connections on S^3 x R
// and mean-dimension estimates of their moduli samples.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "asdlab/config.hpp"
#include "asdlab/cutgauge.hpp"
#include "asdlab/fieldfile.hpp"
#include "asdlab/gauge.hpp"
#include "asdlab/green.hpp"
#include "asdlab/meandim.hpp"
#include "asdlab/ops.hpp"
#include "asdlab/perturb.hpp"
#include "asdlab/spectral.hpp"
#include "asdlab/util.hpp"
#include "asdlab/weitz.hpp"

using nlohmann::json;
using namespace asdlab;

namespace {

enum ExitCode { kOk = 0, kIo = 1, kInvalidArgument = 2, kCorruptData = 3, kPrecondition = 4, kNumerical = 5 };

json config_json(const RunConfig& cfg) {
  json j;
  for (auto& [k, v] : cfg.resolved()) j[k] = v;
  return j;
}

void write_report(const std::string& path, json j) {
  j["timestamp"] = "";  // separate field; kept empty for byte-stable reports
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

Field load_connection(const std::string& path, std::unique_ptr<Grid>& grid_holder) {
  auto data = read_field_file(path);
  grid_holder = std::make_unique<Grid>(data.spec);
  return attach(data, *grid_holder);
}

int cmd_sample(const RunConfig& cfg, const std::string& kind, double center, double scale, double amplitude,
               double support, const std::string& out_path, const std::string& report_path) {
  Grid grid(cfg.grid);
  Field a(grid, FormKind::OneForm);
  if (kind == "flat")
    a = sample_flat(grid);
  else if (kind == "bpst")
    a = sample_bpst_cylinder(grid, center, scale);
  else if (kind == "synthetic")
    a = sample_synthetic(grid, cfg.seed, amplitude);
  else if (kind == "bump")
    a = sample_synthetic_bump(grid, cfg.seed, amplitude, support);
  else
    throw invalid_argument_error("sample: unknown kind '" + kind + "'");
  write_field_file(out_path, a);
  CurvatureReport rep = curvature_report(a, std::min(2.0, grid.spec().L));
  json j;
  j["config"] = config_json(cfg);
  j["kind"] = kind;
  j["energy"] = rep.energy;
  j["chern_weil"] = rep.chern_weil;
  j["max_f"] = rep.max_f;
  j["max_f_plus"] = rep.max_f_plus;
  j["rho"] = rep.rho;
  j["rho_window"] = rep.rho_window;
  if (!report_path.empty()) write_report(report_path, j);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_green(const RunConfig& cfg, const std::string& kernel_out, const std::string& kernel_check,
              const std::string& report_path) {
  if (!kernel_check.empty()) {
    read_field_file(kernel_check);  // throws corrupt_data_error on damage
    std::cout << "kernel file ok\n";
    return kOk;
  }
  Grid grid(cfg.grid);
  GreenOperator green(grid, cfg.green_a, cfg.green_kmax);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double t = 2.0; t <= 5.0; t += 0.1) {
    double y = std::log(green.eval_angle(1e-8, t));
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++n;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  Rng rng(cfg.seed);
  double min_g = 1e300;
  for (int q = 0; q < 10000; ++q) {
    std::int64_t x = rng.index(static_cast<int>(grid.n_sites()));
    std::int64_t y = rng.index(static_cast<int>(grid.n_sites()));
    if (x == y) continue;
    min_g = std::min(min_g, green.eval_sites(x, y));
  }
  json j;
  j["config"] = config_json(cfg);
  j["K_analytic"] = green.K_analytic();
  j["K_quadrature"] = green.K_quadrature();
  j["decay_fit_slope"] = slope;
  j["decay_expected"] = -std::sqrt(cfg.green_a);
  j["positivity_min"] = min_g;
  j["tail_bound"] = green.tail_bound();
  if (!kernel_out.empty()) {
    // kernel row exported in the standard container: g(x0, .) as a scalar field
    Field gx(grid, FormKind::Scalar);
    for (std::int64_t s = 0; s < grid.n_sites(); ++s) gx.at(s, 0)[0] = green.eval_sites(0, s);
    write_field_file(kernel_out, gx);
  }
  if (!report_path.empty()) write_report(report_path, j);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_perturb(const RunConfig& cfg, const std::string& input, const std::string& out_phi,
                const std::string& out_conn, const std::string& trace_path, const std::string& report_path,
                bool force) {
  std::unique_ptr<Grid> grid;
  Field a = load_connection(input, grid);
  GreenOperator green(*grid, cfg.green_a, cfg.green_kmax);
  WeitzOp op(*grid, a);
  PerturbOptions opt;
  opt.tol_T = cfg.perturb_tol;
  opt.max_iter = cfg.perturb_max_iter;
  opt.enforce_admissible = !force;
  opt.collar_T = 0.0;
  FixedPointResult res;
  try {
    res = fixed_point(op, green, opt);
  } catch (const precondition_error& e) {
    std::cerr << e.what() << " (measured " << e.measured << ")\n";
    return kPrecondition;
  }
  if (!out_phi.empty()) write_field_file(out_phi, res.phi);
  if (!out_conn.empty()) {
    Field a_new = a;
    axpy(1.0, res.a_perturb, a_new);
    write_field_file(out_conn, a_new);
  }
  if (!trace_path.empty()) {
    std::ofstream csv(trace_path);
    csv << "n,eta_T,diff_T,phi_inf,grad_inf,residual\n";
    for (const auto& st : res.trace.steps)
      csv << st.n << "," << st.eta_T << "," << st.diff_T << "," << st.phi_inf << "," << st.grad_inf << ","
          << st.solve_residual << "\n";
  }
  json j;
  j["config"] = config_json(cfg);
  j["fplus_in_T"] = res.trace.fplus_in_T;
  j["fplus_in_inf"] = res.trace.fplus_in_inf;
  j["fplus_out_inf"] = res.trace.fplus_out_inf;
  j["fplus_out_T"] = res.trace.fplus_out_T;
  j["energy_gap"] = res.trace.energy_gap;
  j["steps"] = res.trace.steps.size();
  j["converged"] = res.trace.converged;
  if (!res.trace.failure.empty()) j["failure"] = res.trace.failure;
  if (!report_path.empty()) write_report(report_path, j);
  std::cout << j.dump(2) << "\n";
  return res.trace.converged ? kOk : kNumerical;
}

int cmd_cutoff(const RunConfig& cfg, const std::string& input, const std::string& out_conn,
               const std::string& report_path) {
  std::unique_ptr<Grid> grid;
  Field a = load_connection(input, grid);
  GreenOperator green(*grid, cfg.green_a, cfg.green_kmax);
  double delta1 = cfg.cutoff_delta1;
  json budget;
  if (cfg.cutoff_delta1_auto) {
    Field f = ops::curvature(a);
    double d = 0.0;
    for (std::int64_t s = 0; s < grid->n_sites(); ++s) d = std::max(d, pointwise_norm(f, s));
    auto res = green.delta1_budget(d);
    budget["feasible"] = res.feasible;
    budget["analytic_delta1"] = res.analytic_delta1;
    budget["delta1_prime"] = res.delta1_prime;
    budget["budget_value"] = res.budget;
    // the continuum budget is far below any grid cell; fall back to the
    // smallest well-resolved ramp and record the shortfall
    delta1 = res.feasible ? res.delta1 : std::min(1.0, std::max(4.0 * grid->d_t(), res.analytic_delta1));
  }
  auto cut = cutoff_splice(a, green, cfg.cutoff_T, delta1);
  if (!out_conn.empty()) write_field_file(out_conn, cut.a_prime);
  json j;
  j["config"] = config_json(cfg);
  j["T"] = cut.report.T;
  j["delta1"] = cut.report.delta1;
  j["support_lo"] = cut.report.support_lo;
  j["support_hi"] = cut.report.support_hi;
  j["max_fplus_collar"] = cut.report.max_fplus_collar;
  j["fplus_taubes"] = cut.report.fplus_taubes;
  j["chern_weil"] = cut.report.chern_weil;
  j["d_bound"] = cut.report.d_bound;
  j["budget_pass"] = cut.report.budget_pass;
  j["winding_pos"] = cut.report.winding_pos;
  j["winding_neg"] = cut.report.winding_neg;
  if (!budget.empty()) j["delta1_budget"] = budget;
  if (!report_path.empty()) write_report(report_path, j);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_meandim(const RunConfig& cfg, const std::string& system, int tracks, const std::string& csv_path,
                const std::string& report_path) {
  json j;
  j["config"] = config_json(cfg);
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    csv << "eps,n,measure,lower,upper,lower_norm,upper_norm,lower_inc,upper_inc\n";
  }
  if (system == "shift") {
    int W = 2;
    int period = cfg.meandim_windows + 2 * W + 2;
    DynMetricSpace sp = make_shift_system(3, period, tracks, W);
    std::vector<std::vector<int>> windows;
    std::vector<double> measures;
    for (int n = 1; n <= cfg.meandim_windows; ++n) {
      std::vector<int> om;
      for (int q = 0; q < n; ++q) om.push_back(q);
      windows.push_back(om);
      measures.push_back(n);
    }
    auto rows = mean_dim_estimate(sp, windows, measures, cfg.meandim_eps);
    json rj = json::array();
    for (auto& r : rows) {
      if (csv.is_open())
        csv << cfg.meandim_eps << "," << r.n_window << "," << r.measure << "," << r.lower << "," << r.upper
            << "," << r.lower_norm << "," << r.upper_norm << "," << r.lower_inc << "," << r.upper_inc << "\n";
      rj.push_back({{"n", r.n_window},
                    {"lower", r.lower},
                    {"upper", r.upper},
                    {"lower_inc", r.lower_inc},
                    {"upper_inc", r.upper_inc}});
    }
    j["rows"] = rj;
    j["tracks"] = tracks;
  } else if (system == "cube") {
    DynMetricSpace sp;
    sp.dim = tracks;
    sp.sup_metric = true;
    int side = 11;
    sp.n = 1;
    for (int i = 0; i < tracks; ++i) sp.n *= side;
    sp.coords.resize(static_cast<std::size_t>(sp.n) * tracks);
    for (int p = 0; p < sp.n; ++p) {
      int code = p;
      for (int i = 0; i < tracks; ++i) {
        sp.coords[static_cast<std::size_t>(p) * tracks + i] = (code % side) / static_cast<double>(side - 1);
        code /= side;
      }
    }
    auto cert = widim_bounds(sp, cfg.meandim_eps);
    j["lower"] = cert.lower;
    j["upper"] = cert.upper;
    j["validated"] = cert.validated;
    j["method"] = cert.method;
    if (csv.is_open())
      csv << cfg.meandim_eps << ",0,1," << cert.lower << "," << cert.upper << "," << cert.lower << ","
          << cert.upper << ",0,0\n";
  } else {
    throw invalid_argument_error("meandim: unknown system '" + system + "'");
  }
  if (!report_path.empty()) write_report(report_path, j);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& op_name, const std::string& conn,
                 const std::string& report_path, int count) {
  std::unique_ptr<Grid> own;
  Field a{Grid{cfg.grid}, FormKind::OneForm};
  if (conn == "flat" || conn == "synthetic") {
    own = std::make_unique<Grid>(cfg.grid);
    a = conn == "flat" ? sample_flat(*own) : sample_synthetic(*own, cfg.seed, 0.4);
  } else {
    a = load_connection(conn, own);
  }
  SpectralProbe probe = op_name == "deformation" ? probe_deformation(*own, a, count)
                                                 : probe_laplacian_omega0(*own, a, count);
  json j;
  j["config"] = config_json(cfg);
  j["op"] = probe.op;
  j["eigenvalues"] = probe.eigenvalues;
  j["threshold"] = probe.threshold;
  j["count_below"] = probe.count_below;
  if (!report_path.empty()) write_report(report_path, j);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asdlab: ASD connections on the cylinder and mean-dimension estimators"};
  app.require_subcommand(1);

  std::string config_path, input, output, report, trace, kernel_check, kind = "flat", system = "shift";
  std::string op_name = "laplacian_omega0", conn = "flat", out_phi, out_conn;
  double center = 0.0, scale = 1.0, amplitude = 0.01, support = 1.0;
  int tracks = 1, count = 8;
  bool force = false;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--set", overrides, "config override key=value (repeatable)");
    sub->add_option("--report", report, "report JSON path");
  };

  auto* s_sample = app.add_subcommand("sample", "generate a sample connection");
  add_common(s_sample);
  s_sample->add_option("--kind", kind, "flat | bpst | synthetic | bump");
  s_sample->add_option("--center", center);
  s_sample->add_option("--scale", scale);
  s_sample->add_option("--amplitude", amplitude);
  s_sample->add_option("--support", support);
  s_sample->add_option("--out", output, "field file")->required();

  auto* s_green = app.add_subcommand("green", "build the Green kernel and diagnostics");
  add_common(s_green);
  s_green->add_option("--kernel-out", output);
  s_green->add_option("--kernel-check", kernel_check, "validate an exported kernel file");

  auto* s_perturb = app.add_subcommand("perturb", "contraction iteration to an ASD connection");
  add_common(s_perturb);
  s_perturb->add_option("--input", input)->required();
  s_perturb->add_option("--out-phi", out_phi);
  s_perturb->add_option("--out-conn", out_conn);
  s_perturb->add_option("--trace", trace);
  s_perturb->add_flag("--force", force, "run even when ||F+||_T > eps0");

  auto* s_cutoff = app.add_subcommand("cutoff", "temporal gauge, Coulomb slices, splice");
  add_common(s_cutoff);
  s_cutoff->add_option("--input", input)->required();
  s_cutoff->add_option("--out", out_conn);

  auto* s_meandim = app.add_subcommand("meandim", "widim / mean dimension estimates");
  add_common(s_meandim);
  s_meandim->add_option("--system", system, "shift | cube");
  s_meandim->add_option("--N", tracks, "number of tracks / dimensions");
  s_meandim->add_option("--csv", trace, "table CSV path");

  auto* s_spectrum = app.add_subcommand("spectrum", "spectral probes");
  add_common(s_spectrum);
  s_spectrum->add_option("--op", op_name, "laplacian_omega0 | deformation");
  s_spectrum->add_option("--conn", conn, "flat | synthetic | field file");
  s_spectrum->add_option("--count", count);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& ov : overrides) {
      auto eq = ov.find('=');
      if (eq == std::string::npos) throw invalid_argument_error("--set needs key=value");
      apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (s_sample->parsed()) return cmd_sample(cfg, kind, center, scale, amplitude, support, output, report);
    if (s_green->parsed()) return cmd_green(cfg, output, kernel_check, report);
    if (s_perturb->parsed()) return cmd_perturb(cfg, input, out_phi, out_conn, trace, report, force);
    if (s_cutoff->parsed()) return cmd_cutoff(cfg, input, out_conn, report);
    if (s_meandim->parsed()) return cmd_meandim(cfg, system, tracks, trace, report);
    if (s_spectrum->parsed()) return cmd_spectrum(cfg, op_name, conn, report, count);
  } catch (const corrupt_data_error& e) {
    std::cerr << "corrupt data: " << e.what() << "\n";
    return kCorruptData;
  } catch (const invalid_argument_error& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kInvalidArgument;
  } catch (const precondition_error& e) {
    std::cerr << "precondition: " << e.what() << " (measured " << e.measured << ")\n";
    return kPrecondition;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
