// srnlab: config-driven runner for the single-neuron training-dynamics experiments.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "srn/artifacts.hpp"
#include "srn/errors.hpp"
#include "srn/experiments.hpp"
#include "srn/run_config.hpp"

namespace {

struct CommonFlags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  bool paper_scale = false;
  std::string out;
  int jobs = 1;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, CommonFlags& f, bool need_config) {
  auto* opt = app->add_option("--config", f.configs, "run config file(s)")->check(CLI::ExistingFile);
  if (need_config) opt->required();
  app->add_option("--seed", f.seed, "override the config seed");
  app->add_flag("--paper-scale", f.paper_scale, "use the full-size problem sizes");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--jobs", f.jobs, "runs executed in parallel")->check(CLI::PositiveNumber);
  app->add_option("--set", f.sets, "override a config key (key=value)");
}

void apply(srn::RunConfig& cfg, const CommonFlags& f, const std::string& label, bool many) {
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw srn::ConfigError("--set expects key=value, got '" + kv + "'");
    try {
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    } catch (const srn::ConfigError& e) {
      throw srn::ConfigError("--set " + kv + ": " + e.what());
    }
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.paper_scale) cfg.paper_scale = true;
  if (!f.out.empty()) cfg.output_dir = many ? (std::filesystem::path(f.out) / label).string() : f.out;
  cfg.check_required();
}

struct Job {
  std::string label;
  srn::RunConfig cfg;
};

// Runs every job, `jobs` at a time; returns the process exit status.
int run_jobs(const std::vector<Job>& jobs, int parallel) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> all_ok{true};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        const srn::ExperimentResult res = srn::run_experiment(job.cfg);
        srn::write_artifacts(res, job.cfg.output_dir);
        std::lock_guard lock(io);
        std::size_t failed = 0;
        for (const auto& c : res.checks) failed += !c.pass;
        std::cout << (res.ok() ? "PASS " : "FAIL ") << job.label << " (" << res.experiment << ", "
                  << res.checks.size() - failed << "/" << res.checks.size() << " checks, "
                  << res.runtime_seconds << " s) -> " << job.cfg.output_dir << "\n";
        for (const auto& c : res.checks) {
          if (!c.pass) std::cout << "  failed: " << c.name << " margin " << c.margin << "\n";
        }
        for (const auto& w : res.flags) std::cout << "  flag: " << w << "\n";
        for (const auto& w : res.warnings) std::cout << "  warning: " << w << "\n";
        if (!res.ok()) all_ok = false;
      } catch (const std::exception& e) {
        std::lock_guard lock(io);
        std::cerr << "ERROR " << job.label << ": " << e.what() << "\n";
        all_ok = false;
      }
    }
  };
  const int n = std::max(1, std::min<int>(parallel, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return all_ok ? 0 : 1;
}

std::vector<Job> load_jobs(const CommonFlags& f) {
  std::vector<Job> jobs;
  const bool many = f.configs.size() > 1;
  for (const auto& path : f.configs) {
    Job job{std::filesystem::path(path).stem().string(), srn::load_run_config(path)};
    apply(job.cfg, f, job.label, many);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srnlab: training dynamics of single-ReLU-neuron networks"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "run experiments from config files");
  add_common(run, run_flags, true);

  CommonFlags re_flags;
  std::string anchors;
  auto* re = app.add_subcommand("reanchor", "re-anchored envelopes along one run");
  add_common(re, re_flags, true);
  re->add_option("--anchors", anchors, "comma-separated anchor steps");

  CommonFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "oracle self-checks (plus any given configs)");
  add_common(verify, verify_flags, false);

  auto* list = app.add_subcommand("list-experiments", "list experiment kinds and required keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      for (auto e : srn::all_experiments()) {
        std::cout << srn::to_string(e);
        const auto keys = srn::required_keys(e);
        if (!keys.empty()) {
          std::cout << "  (requires:";
          for (const auto& k : keys) std::cout << ' ' << k;
          std::cout << ')';
        }
        std::cout << "\n";
      }
      return 0;
    }
    if (*run) return run_jobs(load_jobs(run_flags), run_flags.jobs);
    if (*re) {
      if (!anchors.empty()) re_flags.sets.push_back("anchors=" + anchors);
      re_flags.sets.insert(re_flags.sets.begin(), "experiment=reanchor");
      return run_jobs(load_jobs(re_flags), re_flags.jobs);
    }
    if (*verify) {
      std::vector<Job> jobs = load_jobs(verify_flags);
      const std::string root = verify_flags.out.empty() ? "out/verify" : verify_flags.out;
      for (const char* name : {"lemma-verify", "error-scaling"}) {
        Job job{name, srn::parse_run_config(std::string("experiment = ") + name + "\n", name)};
        job.cfg.output_dir = (std::filesystem::path(root) / name).string();
        if (verify_flags.seed) job.cfg.seed = *verify_flags.seed;
        jobs.push_back(std::move(job));
      }
      return run_jobs(jobs, verify_flags.jobs);
    }
  } catch (const srn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
