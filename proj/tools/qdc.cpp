// qdc — command-line front end for the dense-coding channel library.
//
// One subcommand per job type; a plain-text config file supplies parameters
// and a handful of flags override the common ones.  Exit codes: 0 success,
// 2 configuration error, 3 numerical-tolerance failure, 4 I/O error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qdc/config.hpp"
#include "qdc/jobs.hpp"
#include "qdc/version.hpp"

namespace {

int run(const qdc::config::JobSpec& spec) {
  const qdc::jobs::JobOutcome outcome = qdc::jobs::run_job(spec);
  for (const std::string& line : outcome.summary) {
    std::printf("%s\n", line.c_str());
  }
  for (const auto& path : outcome.files) {
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using qdc::config::JobMode;

  CLI::App app{
      "qdc: capacity and noise calculations for a dense-coding channel "
      "built from spatially multimode entangled light"};
  app.fallthrough();
  app.set_version_flag("--version",
                       std::string("qdc ") + qdc::version_string);
  app.footer("Configuration keys and their defaults:\n" +
             qdc::config::render_config(qdc::config::JobSpec{}) +
             "Flags override the corresponding keys; 'exp_r00 = X' in a "
             "config file stores g = ln X.");

  std::string config_path;
  std::string out_dir;
  std::string units;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int threads = 1;
  auto* opt_config = app.add_option(
      "--config", config_path, "Read parameters from this key = value file");
  auto* opt_out = app.add_option(
      "--out", out_dir, "Directory for output CSV files (default '.')");
  auto* opt_units =
      app.add_option("--units", units, "Report information in nats or bits")
          ->check(CLI::IsMember({"nats", "bits"}));
  auto* opt_seed =
      app.add_option("--seed", seed, "Random seed for the simulate job");
  auto* opt_tol =
      app.add_option("--tol", tol, "Quadrature tolerance in nats (> 0)");
  auto* opt_threads =
      app.add_option("--threads", threads,
                     "Worker threads for sweeps and sampling (advisory)");

  const std::vector<std::pair<const char*, JobMode>> modes = {
      {"spectrum", JobMode::spectrum},
      {"variance", JobMode::variance},
      {"capacity", JobMode::capacity},
      {"sweep", JobMode::sweep},
      {"simulate", JobMode::simulate},
      {"figures", JobMode::figures},
  };
  const char* descriptions[] = {
      "Tabulate squeezing coefficients U, V and ellipse geometry",
      "Tabulate detection-noise and signal variances against kappa",
      "Evaluate the information stream density for one parameter set",
      "Evaluate the information stream density along a parameter axis",
      "Monte-Carlo sample the optical train and estimate the capacity",
      "Generate the standard figure-data bundle (fig2/fig3/fig4a/fig4b)",
  };
  for (std::size_t i = 0; i < modes.size(); ++i) {
    app.add_subcommand(modes[i].first, descriptions[i]);
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    qdc::config::JobSpec spec;
    if (opt_config->count() > 0) {
      spec = qdc::config::load_config(config_path);
    }
    for (const auto& [name, mode] : modes) {
      if (app.got_subcommand(name)) spec.mode = mode;
    }
    if (opt_out->count() > 0) spec.out_dir = out_dir;
    if (opt_units->count() > 0) {
      spec.units = units == "bits" ? qdc::config::Units::bits
                                   : qdc::config::Units::nats;
    }
    if (opt_seed->count() > 0) spec.seed = seed;
    if (opt_tol->count() > 0) {
      if (!(tol > 0.0)) throw qdc::config_error("--tol must be > 0");
      spec.tol = tol;
    }
    if (opt_threads->count() > 0) {
      if (threads < 1) throw qdc::config_error("--threads must be >= 1");
      spec.threads = threads;
    }
    return run(spec);
  } catch (const qdc::tolerance_error& e) {
    std::fprintf(stderr, "qdc: tolerance failure: %s (achieved %.3g, requested %.3g)\n",
                 e.what(), e.achieved(), e.requested());
    return 3;
  } catch (const qdc::io_error& e) {
    std::fprintf(stderr, "qdc: I/O error: %s\n", e.what());
    return 4;
  } catch (const qdc::config_error& e) {
    std::fprintf(stderr, "qdc: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "qdc: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "qdc: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qdc: error: %s\n", e.what());
    return 1;
  }
}
