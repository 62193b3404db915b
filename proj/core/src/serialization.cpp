/**
 * This code is part of the hqmm project.
 *
 * (C) Copyright the hqmm developers 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "hqmm/serialization.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hqmm/errors.hpp"

namespace hqmm {

using nlohmann::json;

namespace {

json complex_to_json(const Complex &z) {
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json &j) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError("complex scalar must be a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json cmat_to_json(const CMat &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(complex_to_json(m(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMat cmat_from_json(const json &j) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("matrix must be a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw ParseError("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)]
                                   [static_cast<std::size_t>(c)]);
    }
  }
  return m;
}

json rmat_to_json(const RMat &m) { return cmat_to_json(m.cast<Complex>()); }

RMat rmat_from_json(const json &j) {
  const CMat m = cmat_from_json(j);
  return m.real();
}

json cvec_to_json(const CVec &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(complex_to_json(v[i]));
  }
  return out;
}

CVec cvec_from_json(const json &j) {
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  }
  return v;
}

json rvec_to_json(const RVec &v) { return cvec_to_json(v.cast<Complex>()); }

RVec rvec_from_json(const json &j) { return cvec_from_json(j).real(); }

json model_to_json_object(const ModelSpec &model) {
  json j;
  j["family"] = family_name(model);
  std::visit([&j](const auto &m) {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_same_v<T, Hmm>) {
      j["n"] = m.n();
      j["s"] = m.s();
      j["transition"] = rmat_to_json(m.transition);
      j["emission"] = rmat_to_json(m.emission);
      j["initial"] = rvec_to_json(m.initial);
    } else if constexpr (std::is_same_v<T, StandardOom>) {
      j["n"] = m.n();
      j["s"] = m.s();
      json ops = json::array();
      for (const auto &op : m.operators) {
        ops.push_back(rmat_to_json(op));
      }
      j["operators"] = std::move(ops);
      j["initial"] = rvec_to_json(m.initial);
    } else if constexpr (std::is_same_v<T, GeneralOom>) {
      j["n"] = m.n();
      j["s"] = m.s();
      json ops = json::array();
      for (const auto &op : m.operators) {
        ops.push_back(cmat_to_json(op));
      }
      j["operators"] = std::move(ops);
      j["initial"] = cvec_to_json(m.initial);
      j["functional"] = cvec_to_json(m.functional);
    } else if constexpr (std::is_same_v<T, Noom>) {
      j["n"] = m.n();
      j["s"] = m.s();
      json ops = json::array();
      for (const auto &op : m.operators) {
        ops.push_back(rmat_to_json(op));
      }
      j["operators"] = std::move(ops);
      j["initial"] = rvec_to_json(m.initial);
    } else if constexpr (std::is_same_v<T, KHqmm>) {
      j["n"] = m.n();
      j["s"] = m.s();
      j["w"] = m.w();
      json ops = json::array();
      for (int i = 0; i < m.kraus.block_count(); ++i) {
        ops.push_back(cmat_to_json(m.kraus.block(i)));
      }
      j["kraus"] = std::move(ops);
      j["initial"] = cmat_to_json(m.initial.matrix());
    } else {
      j["n"] = m.n();
      j["s"] = m.s();
      json ops = json::array();
      for (const auto &op : m.superoperators) {
        ops.push_back(cmat_to_json(op));
      }
      j["superoperators"] = std::move(ops);
      j["initial"] = cvec_to_json(m.initial_vec);
    }
  }, model);
  return j;
}

ModelSpec model_from_json_object(const json &j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "hmm") {
    Hmm m;
    m.transition = rmat_from_json(j.at("transition"));
    m.emission = rmat_from_json(j.at("emission"));
    m.initial = rvec_from_json(j.at("initial"));
    return m;
  }
  if (family == "standard_oom") {
    StandardOom m;
    for (const auto &op : j.at("operators")) {
      m.operators.push_back(rmat_from_json(op));
    }
    m.initial = rvec_from_json(j.at("initial"));
    return m;
  }
  if (family == "general_oom") {
    GeneralOom m;
    for (const auto &op : j.at("operators")) {
      m.operators.push_back(cmat_from_json(op));
    }
    m.initial = cvec_from_json(j.at("initial"));
    m.functional = cvec_from_json(j.at("functional"));
    return m;
  }
  if (family == "noom") {
    Noom m;
    for (const auto &op : j.at("operators")) {
      m.operators.push_back(rmat_from_json(op));
    }
    m.initial = rvec_from_json(j.at("initial"));
    return m;
  }
  if (family == "khqmm") {
    const int n = j.at("n").get<int>();
    const int s = j.at("s").get<int>();
    const int w = j.at("w").get<int>();
    const auto &ops = j.at("kraus");
    if (static_cast<int>(ops.size()) != s * w) {
      throw ParseError("khqmm expects s*w Kraus operators");
    }
    CMat stack(static_cast<Eigen::Index>(s) * w * n, n);
    for (int i = 0; i < s * w; ++i) {
      stack.block(static_cast<Eigen::Index>(i) * n, 0, n, n) =
          cmat_from_json(ops[static_cast<std::size_t>(i)]);
    }
    return KHqmm{StiefelPoint::unchecked(std::move(stack), s, w),
                 DensityMatrix::unchecked(cmat_from_json(j.at("initial")))};
  }
  if (family == "lhqmm") {
    LHqmm m;
    for (const auto &op : j.at("superoperators")) {
      m.superoperators.push_back(cmat_from_json(op));
    }
    m.initial_vec = cvec_from_json(j.at("initial"));
    return m;
  }
  throw ParseError("unknown model family '" + family + "'");
}

json config_to_json(const TrainingConfig &c) {
  json j;
  j["tau"] = c.tau;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["batches"] = c.batches;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["burn_in"] = c.burn_in;
  j["seed"] = c.seed;
  j["update_scheme"] = update_scheme_name(c.update_scheme);
  j["reorth_period"] = c.reorth_period;
  j["reorth_tol"] = c.reorth_tol;
  return j;
}

TrainingConfig config_from_json(const json &j) {
  TrainingConfig c;
  c.tau = j.at("tau").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.batches = j.at("batches").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.burn_in = j.at("burn_in").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.update_scheme = parse_update_scheme(
      j.at("update_scheme").get<std::string>());
  c.reorth_period = j.at("reorth_period").get<int>();
  c.reorth_tol = j.at("reorth_tol").get<double>();
  return c;
}

} // namespace

std::string model_to_json(const ModelSpec &model) {
  return model_to_json_object(model).dump(2);
}

ModelSpec model_from_json(const std::string &text) {
  return model_from_json_object(json::parse(text));
}

void save_model(const ModelSpec &model, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write model to '" + path.string() + "'");
  }
  out << model_to_json(model) << '\n';
}

ModelSpec load_model(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open model '" + path.string() + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

void save_run(const TrainingRun &run, const std::filesystem::path &path) {
  const std::filesystem::path dir = path.parent_path();
  const std::string stem = path.stem().string();
  const std::string best_name = stem + ".best.model.json";
  const std::string final_name = stem + ".final.model.json";
  save_model(ModelSpec(run.best_model), dir / best_name);
  save_model(ModelSpec(run.final_model), dir / final_name);

  json j;
  j["arch"] = {{"n", run.arch.n}, {"s", run.arch.s}, {"w", run.arch.w}};
  j["config"] = config_to_json(run.config);
  json epochs = json::array();
  for (const auto &e : run.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"loss", e.mean_loss},
                      {"validation_da", e.validation_da},
                      {"seconds", e.seconds},
                      {"max_orthonormality_residual",
                       e.max_orthonormality_residual}});
  }
  j["epochs"] = std::move(epochs);
  j["step_orthonormality_residuals"] = run.step_orthonormality_residuals;
  j["best_model"] = best_name;
  j["best_validation_da"] = run.best_validation_da;
  j["best_epoch"] = run.best_epoch;
  j["final_model"] = final_name;
  j["initial_validation_da"] = run.initial_validation_da;
  j["skipped_batches"] = run.skipped_batches;
  j["step_size_halvings"] = run.step_size_halvings;

  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write run to '" + path.string() + "'");
  }
  out << j.dump(2) << '\n';
}

TrainingRun load_run(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open run '" + path.string() + "'");
  }
  const json j = json::parse(in);
  const std::filesystem::path dir = path.parent_path();
  const ModelSpec best =
      load_model(dir / j.at("best_model").get<std::string>());
  const ModelSpec final_model =
      load_model(dir / j.at("final_model").get<std::string>());
  if (!std::holds_alternative<KHqmm>(best) ||
      !std::holds_alternative<KHqmm>(final_model)) {
    throw ParseError("run snapshots must be khqmm models");
  }

  Arch arch;
  arch.n = j.at("arch").at("n").get<int>();
  arch.s = j.at("arch").at("s").get<int>();
  arch.w = j.at("arch").at("w").get<int>();

  TrainingRun run{
      arch,
      config_from_json(j.at("config")),
      {},
      j.at("step_orthonormality_residuals").get<std::vector<double>>(),
      std::get<KHqmm>(best),
      j.at("best_validation_da").get<double>(),
      j.at("best_epoch").get<int>(),
      std::get<KHqmm>(final_model),
      j.at("initial_validation_da").get<double>(),
      j.at("skipped_batches").get<long>(),
      j.at("step_size_halvings").get<long>(),
  };
  for (const auto &e : j.at("epochs")) {
    EpochRecord rec;
    rec.epoch = e.at("epoch").get<int>();
    rec.mean_loss = e.at("loss").get<double>();
    rec.validation_da = e.at("validation_da").get<double>();
    rec.seconds = e.at("seconds").get<double>();
    rec.max_orthonormality_residual =
        e.at("max_orthonormality_residual").get<double>();
    run.epochs.push_back(rec);
  }
  return run;
}

void save_trajectory_csv(const TrainingRun &run,
                         const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write trajectory to '" + path.string() + "'");
  }
  out << "epoch,loss,validation_da,seconds\n";
  out.precision(17);
  for (const auto &e : run.epochs) {
    out << e.epoch << ',' << e.mean_loss << ',' << e.validation_da << ','
        << e.seconds << '\n';
  }
}

Trajectory load_trajectory_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open trajectory '" + path.string() + "'");
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError("empty trajectory file");
  }
  std::vector<std::string> columns;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      columns.push_back(col);
    }
  }
  int seconds_col = -1;
  int da_col = -1;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == "seconds") {
      seconds_col = static_cast<int>(i);
    } else if (columns[i] == "da" || columns[i] == "validation_da") {
      da_col = static_cast<int>(i);
    }
  }
  if (seconds_col < 0 || da_col < 0) {
    throw ParseError("trajectory CSV needs 'seconds' and 'da' (or "
                     "'validation_da') columns");
  }
  Trajectory out;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (static_cast<int>(cells.size()) <= std::max(seconds_col, da_col)) {
      throw ParseError("short row in trajectory CSV", line_no);
    }
    TrajectoryPoint p;
    try {
      p.seconds = std::stod(cells[static_cast<std::size_t>(seconds_col)]);
      p.da = std::stod(cells[static_cast<std::size_t>(da_col)]);
    } catch (const std::exception &) {
      throw ParseError("non-numeric cell in trajectory CSV", line_no);
    }
    out.push_back(p);
  }
  return out;
}

ExperimentConfig load_config_kv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open config '" + path.string() + "'");
  }
  ExperimentConfig config;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    std::istringstream ls(line);
    std::string key;
    std::string eq;
    std::string value;
    if (!(ls >> key)) {
      continue;
    }
    if (!(ls >> eq >> value) || eq != "=") {
      throw ParseError("expected 'key = value' at line " +
                           std::to_string(line_no),
                       line_no);
    }
    try {
      if (key == "tau") {
        config.training.tau = std::stod(value);
      } else if (key == "alpha") {
        config.training.alpha = std::stod(value);
      } else if (key == "beta") {
        config.training.beta = std::stod(value);
      } else if (key == "batches") {
        config.training.batches = std::stoi(value);
      } else if (key == "batch_size") {
        config.training.batch_size = std::stoi(value);
      } else if (key == "epochs") {
        config.training.epochs = std::stoi(value);
      } else if (key == "burn_in") {
        config.training.burn_in = std::stoi(value);
      } else if (key == "seed") {
        config.training.seed = std::stoull(value);
      } else if (key == "update_scheme") {
        config.training.update_scheme = parse_update_scheme(value);
      } else if (key == "reorth_period") {
        config.training.reorth_period = std::stoi(value);
      } else if (key == "reorth_tol") {
        config.training.reorth_tol = std::stod(value);
      } else if (key == "n") {
        config.arch.n = std::stoi(value);
        config.has_arch = true;
      } else if (key == "s") {
        config.arch.s = std::stoi(value);
        config.has_arch = true;
      } else if (key == "w") {
        config.arch.w = std::stoi(value);
        config.has_arch = true;
      } else {
        throw ParseError("unknown config key '" + key + "'", line_no);
      }
    } catch (const ParseError &) {
      throw;
    } catch (const std::exception &) {
      throw ParseError("bad value for '" + key + "' at line " +
                           std::to_string(line_no),
                       line_no);
    }
  }
  return config;
}

void save_config_kv(const ExperimentConfig &config,
                    const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write config to '" + path.string() + "'");
  }
  out.precision(17);
  const TrainingConfig &c = config.training;
  out << "tau = " << c.tau << '\n'
      << "alpha = " << c.alpha << '\n'
      << "beta = " << c.beta << '\n'
      << "batches = " << c.batches << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "epochs = " << c.epochs << '\n'
      << "burn_in = " << c.burn_in << '\n'
      << "seed = " << c.seed << '\n'
      << "update_scheme = " << update_scheme_name(c.update_scheme) << '\n'
      << "reorth_period = " << c.reorth_period << '\n'
      << "reorth_tol = " << c.reorth_tol << '\n';
  if (config.has_arch) {
    out << "n = " << config.arch.n << '\n'
        << "s = " << config.arch.s << '\n'
        << "w = " << config.arch.w << '\n';
  }
}

} // namespace hqmm
