#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "castfv/app.hpp"
#include "castfv/error.hpp"

namespace castfv {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_safe(std::string name) {
  std::string out;
  for (char c : name) out += (c == '@') ? std::string("_at_") : std::string(1, c);
  return out;
}

std::string coords_line(const Eigen::VectorXd& x) {
  std::string s = "x";
  for (Eigen::Index k = 0; k < x.size(); ++k) s += " " + num(x[k]);
  return s;
}

bool read_cache(const fs::path& path, const Eigen::VectorXd& x, std::size_t outputs, std::vector<double>& values) {
  std::ifstream is(path);
  if (!is) return false;
  std::string line;
  if (!std::getline(is, line) || line != coords_line(x)) return false;
  if (!std::getline(is, line)) return false;
  std::istringstream ss(line);
  std::string tag;
  ss >> tag;
  if (tag != "y") return false;
  values.clear();
  for (std::string v; ss >> v;) values.push_back(std::stod(v));
  return values.size() == outputs;
}

void write_cache(const fs::path& path, const Eigen::VectorXd& x, const std::vector<double>& values) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw ConfigError("cannot write " + tmp.string());
    os << coords_line(x) << "\ny";
    for (double v : values) os << " " << num(v);
    os << "\n";
  }
  fs::rename(tmp, path);
}

// Evaluates every column of `physical`, reusing cached results. Returns rows per point.
Eigen::MatrixXd evaluate_points(const CampaignConfig& config, const CampaignOptions& options,
                                const SampleEvaluator& evaluator, const Eigen::MatrixXd& physical,
                                const std::string& prefix, int& computed) {
  const int n = static_cast<int>(physical.cols());
  const std::size_t n_out = config.outputs.size();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(n_out));
  fs::path cache_dir;
  if (!options.out_dir.empty()) {
    cache_dir = fs::path(options.out_dir) / "cache";
    fs::create_directories(cache_dir);
  }
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string error;

  auto worker = [&] {
    while (!failed) {
      const int i = next++;
      if (i >= n) return;
      const Eigen::VectorXd x = physical.col(i);
      const fs::path cache = cache_dir.empty() ? fs::path() : cache_dir / (prefix + "_" + std::to_string(i) + ".txt");
      std::vector<double> values;
      if (!cache.empty() && read_cache(cache, x, n_out, values)) {
        for (std::size_t o = 0; o < n_out; ++o) out(i, static_cast<Eigen::Index>(o)) = values[o];
        continue;
      }
      try {
        values = evaluator(x);
        if (values.size() != n_out) throw NumericalError("evaluator returned the wrong number of outputs");
        for (std::size_t o = 0; o < n_out; ++o)
          if (!std::isfinite(values[o])) throw NumericalError("output " + config.outputs[o] + " is undefined");
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          const std::string snapshot = dump_config_tree(sample_config(config, x));
          std::string where = "\n--- sample config ---\n" + snapshot;
          if (!options.out_dir.empty()) {
            const fs::path p = fs::path(options.out_dir) / ("failed_" + prefix + "_" + std::to_string(i) + ".ini");
            std::ofstream(p) << snapshot;
            where = " (config written to " + p.string() + ")";
          }
          error = prefix + " " + std::to_string(i) + " failed: " + e.what() + where;
        }
        return;
      }
      for (std::size_t o = 0; o < n_out; ++o) out(i, static_cast<Eigen::Index>(o)) = values[o];
      if (!cache.empty()) write_cache(cache, x, values);
      ++done;
      if (options.verbose) std::fprintf(stderr, "%s %d done\n", prefix.c_str(), i);
    }
  };

  const int workers = std::max(1, std::min(options.workers, n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed) throw NumericalError(error);
  computed += done;
  return out;
}

Eigen::MatrixXd to_physical(const InputDistribution& d, const Eigen::MatrixXd& xi) {
  Eigen::MatrixXd x(xi.rows(), xi.cols());
  for (Eigen::Index m = 0; m < xi.cols(); ++m) x.col(m) = d.physical(xi.col(m));
  return x;
}

}  // namespace

SampleEvaluator solver_evaluator(const CampaignConfig& config) {
  return [config](const Eigen::VectorXd& x) {
    const RunConfig rc = parse_run_config(sample_config(config, x), config.base_dir);
    const RunResult r = run_deterministic(rc);
    std::vector<double> values;
    for (const auto& name : config.outputs) values.push_back(output_functional(r, name));
    return values;
  };
}

CampaignResult run_campaign(const CampaignConfig& config, const CampaignOptions& options) {
  config.validate();
  CampaignResult res;
  res.dist = config.distribution();
  res.outputs = config.outputs;
  res.grid = smolyak_grid(res.dist.dim(), config.level);
  const int order = config.order < 0 ? config.level - 1 : config.order;
  const SampleEvaluator evaluator = options.evaluator ? options.evaluator : solver_evaluator(config);
  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    write_samples_csv((fs::path(options.out_dir) / "samples.csv").string(), res.grid, res.dist);
  }

  res.sample_outputs =
      evaluate_points(config, options, evaluator, to_physical(res.dist, res.grid.nodes), "node", res.evaluated);

  for (std::size_t o = 0; o < config.outputs.size(); ++o) {
    const Eigen::Index oi = static_cast<Eigen::Index>(o);
    res.models.push_back(fit_pce(res.grid.nodes, res.sample_outputs.col(oi), order, res.dist));
    res.sobol.push_back(sobol_indices(res.models.back()));
    if (res.dist.dim() >= 2) {
      int a = 0, b = 1;
      if (res.sobol.back().defined) {
        const Eigen::VectorXd& t = res.sobol.back().total;
        std::vector<int> idx(res.dist.dim());
        for (int k = 0; k < res.dist.dim(); ++k) idx[k] = k;
        std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return t[i] > t[j]; });
        a = idx[0];
        b = idx[1];
      }
      res.surfaces.push_back(response_surface(res.models.back(), a, b, config.surface_resolution));
    }
  }

  if (config.validation_points > 0) {
    res.validation_samples = latin_hypercube(res.dist.dim(), config.validation_points, config.seed);
    res.validation_outputs = evaluate_points(config, options, evaluator, to_physical(res.dist, res.validation_samples),
                                             "lhs", res.evaluated);
    res.validation_error.resize(static_cast<Eigen::Index>(config.outputs.size()));
    for (std::size_t o = 0; o < config.outputs.size(); ++o) {
      Eigen::VectorXd pred(config.validation_points);
      for (int m = 0; m < config.validation_points; ++m)
        pred[m] = res.models[o].evaluate(res.validation_samples.col(m));
      res.validation_error[static_cast<Eigen::Index>(o)] =
          normalized_rms_error(pred, res.validation_outputs.col(static_cast<Eigen::Index>(o)));
    }
  }

  if (!options.out_dir.empty()) {
    const fs::path dir(options.out_dir);
    std::vector<std::string> header = {"index"};
    header.insert(header.end(), config.outputs.begin(), config.outputs.end());
    std::vector<std::vector<double>> rows;
    for (Eigen::Index m = 0; m < res.sample_outputs.rows(); ++m) {
      std::vector<double> row = {static_cast<double>(m)};
      for (Eigen::Index o = 0; o < res.sample_outputs.cols(); ++o) row.push_back(res.sample_outputs(m, o));
      rows.push_back(row);
    }
    write_csv((dir / "outputs.csv").string(), header, rows);
    write_sobol_csv((dir / "sobol.csv").string(), config.outputs, res.sobol, res.dist.names);
    for (std::size_t o = 0; o < config.outputs.size(); ++o) {
      write_pce_model((dir / ("pce_" + file_safe(config.outputs[o]) + ".txt")).string(), res.models[o]);
      if (o < res.surfaces.size())
        write_response_surface_csv((dir / ("surface_" + file_safe(config.outputs[o]) + ".csv")).string(),
                                   res.surfaces[o]);
    }
    if (config.validation_points > 0) {
      std::vector<std::vector<double>> err = {std::vector<double>(res.validation_error.data(),
                                                                  res.validation_error.data() + res.validation_error.size())};
      write_csv((dir / "validation.csv").string(), config.outputs, err);
    }
  }
  return res;
}

}  // namespace castfv
