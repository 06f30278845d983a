// Command-line front end: trapping radii, rigorous one-period integration,
// periodic-trajectory verification, and the nonrigorous reference
// trajectory.  All artifacts are written atomically (tmp + rename) so a
// crash never leaves a truncated certificate behind.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vfem/config.hpp"

namespace {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush())
      throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string trace_csv(const vfem::IntegrationResult& run) {
  std::ostringstream os;
  os.precision(17);
  std::size_t n = run.initial_box.size();
  os << "step,t_lo,t_hi,eps_max,R1,R2,R3,R4,R5,qk_h1,qk_l2";
  for (std::size_t l = 0; l < n; ++l)
    os << ",beta" << l + 1 << "_lo,beta" << l + 1 << "_hi";
  os << "\n";
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    const vfem::TraceStep& ts = run.trace[i];
    double eps_max = 0.0;
    for (const vfem::Interval& e : ts.eps)
      eps_max = std::max(eps_max, e.hi());
    os << i << ',' << ts.window.lo() << ',' << ts.window.hi() << ','
       << eps_max << ',' << ts.bounds.R1.hi() << ',' << ts.bounds.R2.hi()
       << ',' << ts.bounds.R3.hi() << ',' << ts.bounds.R4.hi() << ','
       << ts.bounds.R5.hi() << ',' << ts.qk.h1.hi() << ',' << ts.qk.l2.hi();
    for (std::size_t l = 0; l < n; ++l)
      os << ',' << ts.beta_box[l].lo() << ',' << ts.beta_box[l].hi();
    os << "\n";
  }
  return os.str();
}

std::string reference_csv(const vfem::RunConfig& cfg,
                          const std::vector<std::vector<double>>& sol) {
  std::ostringstream os;
  os.precision(17);
  std::size_t n = sol.front().size();
  os << "step,t";
  for (std::size_t l = 0; l < n; ++l) os << ",beta" << l + 1;
  os << "\n";
  double T = cfg.forcing.period.mid();
  for (std::size_t i = 0; i < sol.size(); ++i) {
    os << i << ',' << T * static_cast<double>(i) / cfg.steps_per_period;
    for (double v : sol[i]) os << ',' << v;
    os << "\n";
  }
  return os.str();
}

void print_radii(const vfem::TrappingRadii& r) {
  const vfem::Interval* R[] = {&r.R1, &r.R2, &r.R3, &r.R4, &r.R5};
  for (int i = 0; i < 5; ++i)
    std::cout << "R" << i + 1 << " = [" << R[i]->lo() << ", " << R[i]->hi()
              << "]  (" << r.method[i] << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"validated trapping radii and rigorous one-period integration "
               "for the forced viscous conservation law on (0, 1)"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".", norm_mode;
  bool no_trace = false;
  app.add_option("--config", config_path, "run configuration (JSON)")
      ->required();
  app.add_option("--out", out_dir, "output directory (default: .)");
  app.add_option("--norm-mode", norm_mode,
                 "override norm_mode: triangle or orthogonal");

  CLI::App* cmd_radii =
      app.add_subcommand("radii", "compute the global trapping radii R1..R5");
  CLI::App* cmd_integrate = app.add_subcommand(
      "integrate", "rigorously integrate one forcing period");
  cmd_integrate->add_flag("--no-trace", no_trace,
                          "omit the per-step trace from the certificate");
  CLI::App* cmd_verify = app.add_subcommand(
      "verify-periodic",
      "integrate one period and check containment of the final box");
  cmd_verify->add_flag("--no-trace", no_trace,
                       "omit the per-step trace from the certificate");
  CLI::App* cmd_reference = app.add_subcommand(
      "reference", "nonrigorous RK4 reference trajectory (oracle only)");

  CLI11_PARSE(app, argc, argv);

  vfem::RunConfig cfg;
  try {
    cfg = vfem::load_config(config_path);
    if (!norm_mode.empty()) {
      if (norm_mode == "triangle")
        cfg.norm_mode = vfem::NormMode::triangle;
      else if (norm_mode == "orthogonal")
        cfg.norm_mode = vfem::NormMode::orthogonal;
      else
        throw vfem::ConfigError(
            "config: --norm-mode must be triangle or orthogonal");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  fs::path out(out_dir);
  std::cout.precision(9);
  try {
    fs::create_directories(out);
    if (cmd_radii->parsed()) {
      vfem::TrappingRadii r =
          vfem::compute_radii(cfg.forcing, cfg.grid, cfg.norm_mode);
      atomic_write(out / "radii.json", vfem::radii_to_json(r).dump(2) + "\n");
      print_radii(r);
      return 0;
    }
    if (cmd_reference->parsed()) {
      auto sol = vfem::reference_solve(cfg);
      atomic_write(out / "reference.csv", reference_csv(cfg, sol));
      std::cout << "wrote " << sol.size() << " states to "
                << (out / "reference.csv").string() << "\n";
      return 0;
    }
    vfem::Certificate cert;
    if (cmd_integrate->parsed()) {
      cert.run = vfem::integrate_period(cfg);
      cert.verdict = cert.run.completed ? vfem::Verdict::not_verified
                                        : vfem::Verdict::failed;
      cert.reason = cert.run.completed
                        ? "integration only, containment not checked"
                        : "step " + std::to_string(cert.run.failed_step) +
                              ": " + cert.run.failure;
    } else {
      cert = vfem::verify_periodic(cfg);
    }
    atomic_write(out / "certificate.json",
                 vfem::certificate_to_json(cert, !no_trace).dump(2) + "\n");
    atomic_write(out / "trace.csv", trace_csv(cert.run));
    print_radii(cert.run.radii);
    std::cout << "verdict: " << vfem::to_string(cert.verdict) << " ("
              << cert.reason << ")\n";
    if (!cert.run.completed) return 3;
    if (cmd_verify->parsed())
      return cert.verdict == vfem::Verdict::periodic_verified ? 0 : 1;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
