#include "pyrofront/pyrofront.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "pyrofront/config.hpp"
#include "pyrofront/error.hpp"
#include "pyrofront/io.hpp"
#include "pyrofront/mission.hpp"
#include "pyrofront/qlearn.hpp"
#include "pyrofront/sim.hpp"

struct pf_config {
  pyrofront::ExperimentConfig cfg;
};

struct pf_run {
  pyrofront::ExperimentResult result;
};

struct pf_env {
  pyrofront::EnvConfig cfg;
  pyrofront::EnvState state;
  pyrofront::Rng rng;
};

namespace {

thread_local std::string g_last_error;

pf_status status_of(pyrofront::ErrorCode c) {
  switch (c) {
    case pyrofront::ErrorCode::kInvalidArgument: return PF_ERR_INVALID_ARGUMENT;
    case pyrofront::ErrorCode::kConfig: return PF_ERR_CONFIG;
    case pyrofront::ErrorCode::kIo: return PF_ERR_IO;
    case pyrofront::ErrorCode::kNumeric: return PF_ERR_NUMERIC;
    case pyrofront::ErrorCode::kState: return PF_ERR_STATE;
  }
  return PF_ERR_INTERNAL;
}

template <typename F>
pf_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return PF_OK;
  } catch (const pyrofront::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return PF_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) pyrofront::fail(pyrofront::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::string run_summary_text(const pf_run* run) {
  return pyrofront::io::read_text(run->result.run_dir / "summary.json");
}

}  // namespace

extern "C" {

const char* pf_version(void) { return "0.1.0"; }
const char* pf_last_error(void) { return g_last_error.c_str(); }

const char* pf_status_name(pf_status status) {
  switch (status) {
    case PF_OK: return "ok";
    case PF_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PF_ERR_CONFIG: return "config";
    case PF_ERR_IO: return "io";
    case PF_ERR_NUMERIC: return "numeric";
    case PF_ERR_STATE: return "state";
    case PF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void pf_string_free(char* s) { delete[] s; }

pf_status pf_config_create(pf_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new pf_config{};
  });
}

pf_status pf_config_load(const char* path, pf_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto c = std::make_unique<pf_config>();
    c->cfg = pyrofront::load_config(path);
    *out = c.release();
  });
}

pf_status pf_config_from_json(const char* text, pf_config** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    auto c = std::make_unique<pf_config>();
    c->cfg = pyrofront::config_from_json(text);
    *out = c.release();
  });
}

pf_status pf_config_clone(const pf_config* cfg, pf_config** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = new pf_config{*cfg};
  });
}

pf_status pf_config_set(pf_config* cfg, const char* assignment) {
  return guarded([&] {
    require(cfg != nullptr && assignment != nullptr, "null argument");
    pyrofront::apply_override(cfg->cfg, assignment);
  });
}

pf_status pf_config_validate(const pf_config* cfg) {
  return guarded([&] {
    require(cfg != nullptr, "null config");
    pyrofront::validate(cfg->cfg);
  });
}

pf_status pf_config_to_json(const pf_config* cfg, char** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = dup_string(pyrofront::to_json(cfg->cfg));
  });
}

pf_status pf_config_output_dir(const pf_config* cfg, char** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = dup_string(cfg->cfg.output_dir);
  });
}

pf_status pf_config_run_id(const pf_config* cfg, char** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    const auto& c = cfg->cfg;
    *out = dup_string(pyrofront::to_string(c.mode) + "_" + pyrofront::to_string(c.scenario) + "_seed" +
                      std::to_string(c.seed));
  });
}

void pf_config_free(pf_config* cfg) { delete cfg; }

pf_status pf_run_experiment(const pf_config* cfg, const char* run_dir, pf_run** out) {
  return guarded([&] {
    require(cfg != nullptr && run_dir != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto r = std::make_unique<pf_run>();
    r->result = pyrofront::run_experiment(cfg->cfg, run_dir);
    *out = r.release();
  });
}

pf_status pf_scan_demo(const pf_config* cfg, const char* run_dir, pf_run** out) {
  return guarded([&] {
    require(cfg != nullptr && run_dir != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto r = std::make_unique<pf_run>();
    r->result = pyrofront::run_experiment(cfg->cfg, run_dir, true);
    *out = r.release();
  });
}

int pf_run_episode_count(const pf_run* run) {
  return run == nullptr ? 0 : static_cast<int>(run->result.episodes.size());
}

int pf_run_complete(const pf_run* run) { return run != nullptr && run->result.complete ? 1 : 0; }

pf_status pf_run_episode_metrics(const pf_run* run, int episode, double* coverage, double* time_average_mia,
                                 int* steps) {
  return guarded([&] {
    require(run != nullptr, "null run");
    require(episode >= 1 && episode <= static_cast<int>(run->result.episodes.size()), "episode out of range");
    const auto& e = run->result.episodes[episode - 1];
    if (coverage != nullptr) *coverage = e.coverage;
    if (time_average_mia != nullptr) *time_average_mia = e.time_average_mia;
    if (steps != nullptr) *steps = static_cast<int>(e.steps.size());
  });
}

pf_status pf_run_observed_fraction(const pf_run* run, int episode, double* out) {
  return guarded([&] {
    require(run != nullptr && out != nullptr, "null argument");
    require(episode >= 1 && episode <= static_cast<int>(run->result.episodes.size()), "episode out of range");
    *out = run->result.episodes[episode - 1].observed_fraction;
  });
}

pf_status pf_run_summary_json(const pf_run* run, char** out) {
  return guarded([&] {
    require(run != nullptr && out != nullptr, "null argument");
    *out = dup_string(run_summary_text(run));
  });
}

void pf_run_free(pf_run* run) { delete run; }

pf_status pf_gradient_check(int reduced_net, int grid_size, uint64_t seed, int samples, double* max_relative_error,
                            size_t* checked) {
  return guarded([&] {
    require(grid_size >= 4 && samples >= 1, "need grid_size >= 4 and samples >= 1");
    const auto net_cfg = reduced_net ? pyrofront::nn::NetConfig::reduced(grid_size)
                                     : pyrofront::nn::NetConfig::full(grid_size);
    pyrofront::nn::ValueNet net(net_cfg, seed);
    pyrofront::Rng rng(pyrofront::derive_seed(seed, 9));
    const auto r = pyrofront::gradient_check(net, rng, samples);
    if (max_relative_error != nullptr) *max_relative_error = r.max_relative_error;
    if (checked != nullptr) *checked = r.checked;
  });
}

pf_status pf_recompute_metrics(const char* run_dir, char** summary_json) {
  return guarded([&] {
    require(run_dir != nullptr, "null run_dir");
    const std::string s = pyrofront::io::recompute_summary(run_dir);
    if (summary_json != nullptr) *summary_json = dup_string(s);
  });
}

pf_status pf_export_artifacts(const char* run_dir, char** manifest_json) {
  return guarded([&] {
    require(run_dir != nullptr, "null run_dir");
    const auto m = pyrofront::io::export_artifacts(run_dir);
    if (manifest_json != nullptr) *manifest_json = dup_string(pyrofront::io::to_json(m));
  });
}

pf_status pf_env_create(const pf_config* cfg, uint64_t seed, pf_env** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    pyrofront::validate(cfg->cfg.env);
    auto e = std::make_unique<pf_env>();
    e->cfg = cfg->cfg.env;
    e->state = pyrofront::init_environment(e->cfg, seed);
    e->rng.seed(pyrofront::derive_seed(seed, 4));
    *out = e.release();
  });
}

pf_status pf_env_step(pf_env* env) {
  return guarded([&] {
    require(env != nullptr, "null env");
    pyrofront::env_step(env->state, env->cfg, env->rng);
  });
}

int pf_env_size(const pf_env* env) { return env == nullptr ? 0 : env->state.n; }
int pf_env_time(const pf_env* env) { return env == nullptr ? 0 : env->state.t; }

pf_status pf_env_grid(const pf_env* env, const char* name, double* out, size_t len) {
  return guarded([&] {
    require(env != nullptr && name != nullptr && out != nullptr, "null argument");
    const auto& s = env->state;
    const std::size_t cells = static_cast<std::size_t>(s.n) * static_cast<std::size_t>(s.n);
    require(len >= cells, "output buffer too small");
    const std::string g = name;
    for (std::size_t i = 0; i < cells; ++i) {
      const pyrofront::Cell c{static_cast<int>(i % s.n), static_cast<int>(i / s.n)};
      if (g == "F") out[i] = static_cast<double>(s.ignition[c]);
      else if (g == "f") out[i] = s.fuel[c];
      else if (g == "A") out[i] = s.wind_mag[c];
      else if (g == "phi") out[i] = s.wind_phase[c];
      else pyrofront::fail(pyrofront::ErrorCode::kInvalidArgument, "unknown grid '" + g + "'");
    }
  });
}

void pf_env_free(pf_env* env) { delete env; }

}  // extern "C"
