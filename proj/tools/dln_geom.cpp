// Command-line front end: entropy values, flow trajectories, verification
// suites, orbit volumes and the orthonormal-basis report, with JSON/CSV
// artifacts that are byte-identical for equal (config, seed).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <limits>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "dln/basis.hpp"
#include "dln/entropy.hpp"
#include "dln/flow.hpp"
#include "dln/io.hpp"
#include "dln/jacobi.hpp"
#include "dln/metric.hpp"

using namespace dln;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// small helpers

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

HaarConvention parse_convention(const std::string& name) {
  if (name == "embedded") return HaarConvention::Embedded;
  if (name == "ponting") return HaarConvention::Ponting;
  throw CLI::ValidationError("--convention", "expected 'embedded' or 'ponting'");
}

std::string convention_name(HaarConvention c) {
  return c == HaarConvention::Embedded ? "embedded" : "ponting";
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Matrix random_gauss_matrix(int dim, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = gauss(rng);
  return m;
}

Vector random_descending(int dim, std::mt19937_64& rng, double lo, double hi, double min_gap) {
  std::uniform_real_distribution<double> uni(lo, hi);
  Vector v(dim);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int i = 0; i < dim; ++i) v(i) = uni(rng);
    std::sort(v.data(), v.data() + dim, std::greater<double>());
    bool ok = true;
    for (int i = 0; i + 1 < dim; ++i)
      if (v(i) - v(i + 1) < min_gap) ok = false;
    if (ok) return v;
  }
  throw UnsupportedDimension("could not draw separated singular values");
}

Matrix random_full_rank(int dim, std::mt19937_64& rng) {
  const Vector sigma = random_descending(dim, rng, 0.5, 2.0, 0.05);
  return haar_orthogonal(dim, rng) * sigma.asDiagonal() *
         haar_orthogonal(dim, rng).transpose();
}

Network random_balanced_network(int dim, int depth, std::mt19937_64& rng) {
  const Vector lambda = random_descending(dim, rng, 0.7, 1.5, 0.05);
  FrameTuple frames;
  for (int s = 0; s <= depth; ++s) frames.q.push_back(haar_orthogonal(dim, rng));
  return assemble_network(Spectrum::from_lambda(lambda, depth), frames);
}

int thread_cap() {
  if (const char* env = std::getenv("DLN_GEOM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// entropy

struct EntropyArgs {
  std::string sigma_list;
  std::string matrix_path;
  int depth = 0;
  std::string convention = "embedded";
  std::string out;
};

int run_entropy(const EntropyArgs& args) {
  const HaarConvention convention = parse_convention(args.convention);
  Spectrum spec = [&] {
    if (!args.matrix_path.empty())
      return svd_descending(load_matrix(args.matrix_path)).spectrum(args.depth);
    const std::vector<double> values = parse_double_list(args.sigma_list, "--sigma");
    Vector sigma(values.size());
    for (size_t i = 0; i < values.size(); ++i) sigma(i) = values[i];
    return Spectrum::from_sigma(sigma, args.depth);
  }();
  const EntropyValue value = entropy(spec, args.depth, convention);
  json out{{"command", "entropy"},
           {"depth", args.depth},
           {"convention", convention_name(convention)},
           {"sigma", vector_to_json(spec.sigma)},
           {"total", value.total},
           {"constant_part", value.constant_part},
           {"ratio_part", value.ratio_part},
           {"c_d", json{{"embedded", haar_volume_od(spec.dim(), HaarConvention::Embedded)},
                        {"ponting", haar_volume_od(spec.dim(), HaarConvention::Ponting)}}}};
  emit(out.dump(2) + "\n", args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// volume

struct VolumeArgs {
  std::string sigma_list;
  std::string lambda_list;
  std::string matrix_path;
  int depth = 0;
  std::string convention = "embedded";
  int grid = 10000;
  bool density_fit = false;
  int trials = 50;
  std::uint64_t seed = 0;
  std::string out;
};

json density_fit_report(int depth, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1012);
  std::vector<double> xs, ys;
  for (int trial = 0; trial < trials; ++trial) {
    const Vector sigma = random_descending(2, rng, 0.4, 2.5, 0.05);
    Matrix x = Matrix::Zero(2, 2);
    x(0, 0) = sigma(0);
    x(1, 1) = sigma(1);
    const MetricOperator op(x, depth);
    Matrix gram(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Matrix ea = Matrix::Zero(2, 2), eb = Matrix::Zero(2, 2);
        ea(a / 2, a % 2) = 1.0;
        eb(b / 2, b % 2) = 1.0;
        gram(a, b) = op.metric(ea, eb);
      }
    const double sqrt_det_g = std::sqrt(Eigen::PartialPivLU<Matrix>(gram).determinant());
    const Vector squares = sigma.array().square();
    const Vector roots = sigma.array().pow(2.0 / depth);
    const double ratio =
        sqrt_det_g * std::abs(vandermonde(squares)) / std::abs(vandermonde(roots));
    xs.push_back(std::log(sigma(0) * sigma(1)));
    ys.push_back(std::log(ratio));
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double stated = (double(depth) - 1.0) / depth;
  return json{{"width", 2},
              {"depth", depth},
              {"samples", trials},
              {"fitted_exponent", sxy / sxx},
              {"stated_exponent", stated},
              {"discrepancy", sxy / sxx - stated},
              {"r2", (sxy * sxy) / (sxx * syy)},
              {"intercept", my - (sxy / sxx) * mx}};
}

int run_volume(const VolumeArgs& args) {
  const HaarConvention convention = parse_convention(args.convention);
  Spectrum spec = [&] {
    if (!args.matrix_path.empty())
      return svd_descending(load_matrix(args.matrix_path)).spectrum(args.depth);
    if (!args.lambda_list.empty()) {
      const std::vector<double> values = parse_double_list(args.lambda_list, "--lambda");
      Vector lambda(values.size());
      for (size_t i = 0; i < values.size(); ++i) lambda(i) = values[i];
      return Spectrum::from_lambda(lambda, args.depth);
    }
    const std::vector<double> values = parse_double_list(args.sigma_list, "--sigma");
    Vector sigma(values.size());
    for (size_t i = 0; i < values.size(); ++i) sigma(i) = values[i];
    return Spectrum::from_sigma(sigma, args.depth);
  }();

  const double formula = orbit_volume_formula(spec, args.depth, convention);
  const EntropyValue value = entropy(spec, args.depth, convention);
  json out{{"command", "volume"},
           {"depth", args.depth},
           {"convention", convention_name(convention)},
           {"sigma", vector_to_json(spec.sigma)},
           {"lambda", vector_to_json(spec.lambda)},
           {"formula", formula},
           {"log_formula", std::log(formula)},
           {"entropy_total", value.total}};

  const bool oracle_in_scope = spec.dim() == 2 && (args.depth == 2 || args.depth == 3) &&
                               convention == HaarConvention::Embedded && args.grid > 0;
  if (oracle_in_scope) {
    const Matrix x = spec.sigma.asDiagonal();
    const double numeric = orbit_volume_numeric(x, args.depth, args.grid);
    out["numeric"] = numeric;
    out["numeric_rel_err"] = std::abs(numeric - formula) / formula;
    out["grid"] = args.grid;
  }
  if (args.density_fit) {
    if (spec.dim() != 2)
      throw UnsupportedDimension("volume --density-fit: diagnostic covers width 2 only");
    out["density_fit"] = density_fit_report(args.depth, args.trials, args.seed);
  }
  emit(out.dump(2) + "\n", args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string suite;
  int width = 2;
  int depth = 3;
  int trials = 100;
  std::uint64_t seed = 0;
  double balance_tol = tol::kBalance;
  std::string out;
};

json make_check(const std::string& name, double value, double tolerance, bool pass) {
  return json{{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}};
}

json verify_jacobi(const VerifyArgs& args) {
  json checks = json::array();
  const double closed = block_det(2.0, 1.0, args.depth);
  const double lu = Eigen::PartialPivLU<Matrix>(
                        jacobi_block(2.0, 1.0, args.depth, JacobiBoundary::Interior).entries)
                        .determinant();
  const bool anchored_ok = std::abs(closed - lu) <= 1e-9 * std::abs(closed);
  checks.push_back(make_check("anchored_closed_det", closed, 1e-9, anchored_ok));
  checks.push_back(make_check("anchored_lu_det", lu, 1e-9, anchored_ok));

  std::mt19937_64 rng(args.seed + 1);
  std::uniform_real_distribution<double> uni(0.1, 4.0);
  double det_rel = 0.0, cheb_dev = 0.0, ext_dev = 0.0;
  for (int trial = 0; trial < args.trials; ++trial) {
    const double lk = uni(rng), ll = uni(rng);
    if (std::abs(lk - ll) < 0.02) continue;
    const int n = std::max(2, args.depth);
    const JacobiBlock interior = jacobi_block(lk, ll, n, JacobiBoundary::Interior);
    const double lu_det = Eigen::PartialPivLU<Matrix>(interior.entries).determinant();
    det_rel = std::max(det_rel, std::abs(block_det(lk, ll, n) - lu_det) /
                                    std::abs(block_det(lk, ll, n)));
    const ChebyshevEigen eig = chebyshev_eigen(interior);
    cheb_dev = std::max(cheb_dev, (eig.s * interior.entries * eig.s.transpose() -
                                   Matrix(eig.sigma.asDiagonal()))
                                      .cwiseAbs()
                                      .maxCoeff());
    const PMatrix p = p_matrix(lk, ll, n);
    const JacobiBlock ext = jacobi_block(lk, ll, n, JacobiBoundary::Extended);
    ext_dev = std::max(ext_dev, (p.entries * ext.entries * p.entries.transpose() -
                                 Matrix::Identity(n + 1, n + 1))
                                    .cwiseAbs()
                                    .maxCoeff());
  }
  checks.push_back(make_check("block_det_max_rel_err", det_rel, 1e-9, det_rel < 1e-9));
  checks.push_back(make_check("chebyshev_congruence_max_dev", cheb_dev, 1e-10, cheb_dev < 1e-10));
  checks.push_back(
      make_check("extended_diagonalizer_max_dev", ext_dev, 1e-10, ext_dev < 1e-10));
  return checks;
}

json verify_basis(const VerifyArgs& args) {
  json checks = json::array();
  std::mt19937_64 rng(args.seed + 2);
  double gram_dev = 0.0;
  bool counts_ok = true;
  const int runs = std::max(1, args.trials / 20);
  for (int trial = 0; trial < runs; ++trial) {
    const Network w = random_balanced_network(args.width, args.depth, rng);
    const OrthonormalBasis basis = onb_vectors(w, args.balance_tol);
    const int pairs = args.width * (args.width - 1) / 2;
    counts_ok = counts_ok &&
                int(basis.vectors.size()) == args.width + (args.depth + 1) * pairs &&
                basis.kernel_dimension() == (args.depth - 1) * pairs;
    for (size_t i = 0; i < basis.vectors.size(); ++i)
      for (size_t j = i; j < basis.vectors.size(); ++j)
        gram_dev = std::max(gram_dev, std::abs(frobenius_ip(basis.vectors[i], basis.vectors[j]) -
                                               (i == j ? 1.0 : 0.0)));
  }
  checks.push_back(make_check("gram_max_deviation", gram_dev, 1e-9, gram_dev < 1e-9));
  checks.push_back(make_check("counts_match", counts_ok ? 1.0 : 0.0, 0.0, counts_ok));
  return checks;
}

json verify_submersion(const VerifyArgs& args) {
  json checks = json::array();
  std::mt19937_64 rng(args.seed + 3);
  double kernel = 0.0, isometry = 0.0, closed = 0.0;
  const int runs = std::max(1, args.trials / 20);
  for (int trial = 0; trial < runs; ++trial) {
    const Network w = random_balanced_network(args.width, args.depth, rng);
    const SubmersionReport report = submersion_report(w, args.balance_tol);
    kernel = std::max(kernel, report.kernel_max);
    isometry = std::max(isometry, report.isometry_max);
    closed = std::max(closed, report.closed_form_max);
  }
  checks.push_back(make_check("kernel_max", kernel, 1e-9, kernel < 1e-9));
  checks.push_back(make_check("isometry_max", isometry, 1e-9, isometry < 1e-9));
  checks.push_back(make_check("closed_form_max", closed, 1e-9, closed < 1e-9));
  return checks;
}

int run_verify(const VerifyArgs& args) {
  json checks;
  if (args.suite == "jacobi")
    checks = verify_jacobi(args);
  else if (args.suite == "basis")
    checks = verify_basis(args);
  else if (args.suite == "submersion")
    checks = verify_submersion(args);
  else
    throw CLI::ValidationError("--suite", "expected jacobi, basis or submersion");

  bool pass = true;
  for (const json& c : checks) pass = pass && c.at("pass").get<bool>();
  json out{{"suite", args.suite}, {"width", args.width},   {"depth", args.depth},
           {"seed", args.seed},   {"trials", args.trials}, {"checks", checks},
           {"pass", pass}};
  emit(out.dump(2) + "\n", args.out);
  std::cout << (pass ? "PASS" : "FAIL") << " verify --suite " << args.suite;
  if (args.suite == "jacobi")
    std::cout << ": det " << format_double(checks.at(0).at("value").get<double>()) << " vs "
              << format_double(checks.at(1).at("value").get<double>());
  std::cout << "\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// basis

struct BasisArgs {
  std::string network_path;
  std::string matrix_path;
  int width = 2;
  int depth = 3;
  std::uint64_t seed = 0;
  double balance_tol = tol::kBalance;
  bool emit_vectors = false;
  std::string out;
};

int run_basis(const BasisArgs& args) {
  Network w = [&] {
    if (!args.network_path.empty()) return load_network(args.network_path);
    if (!args.matrix_path.empty())
      return center_of_fiber(load_matrix(args.matrix_path), args.depth);
    std::mt19937_64 rng(args.seed);
    return random_balanced_network(args.width, args.depth, rng);
  }();
  const OrthonormalBasis basis = onb_vectors(w, args.balance_tol);
  double gram_dev = 0.0;
  for (size_t i = 0; i < basis.vectors.size(); ++i)
    for (size_t j = i; j < basis.vectors.size(); ++j)
      gram_dev = std::max(gram_dev, std::abs(frobenius_ip(basis.vectors[i], basis.vectors[j]) -
                                             (i == j ? 1.0 : 0.0)));
  const int pairs = w.width() * (w.width() - 1) / 2;
  json labels = json::array();
  for (const BasisLabel& label : basis.labels) {
    if (label.kind == BasisLabel::Kind::Radial)
      labels.push_back(json{{"kind", "radial"}, {"k", label.k}});
    else
      labels.push_back(
          json{{"kind", "gauge"}, {"k", label.k}, {"l", label.l}, {"p", label.p}});
  }
  json out{{"command", "basis"},
           {"width", w.width()},
           {"depth", w.depth()},
           {"seed", args.seed},
           {"count", basis.vectors.size()},
           {"expected_count", w.width() + (w.depth() + 1) * pairs},
           {"kernel_dimension", basis.kernel_dimension()},
           {"gram_max_deviation", gram_dev},
           {"lambda", vector_to_json(basis.decomposition.spectrum.lambda)},
           {"labels", labels}};
  if (args.emit_vectors) {
    json vectors = json::array();
    for (const TangentVector& v : basis.vectors) {
      json slots = json::array();
      for (int s = 1; s <= v.depth(); ++s) {
        json rows = json::array();
        for (int i = 0; i < v.slot(s).rows(); ++i) {
          json row = json::array();
          for (int j = 0; j < v.slot(s).cols(); ++j) row.push_back(v.slot(s)(i, j));
          rows.push_back(row);
        }
        slots.push_back(rows);
      }
      vectors.push_back(slots);
    }
    out["vectors"] = vectors;
  }
  emit(out.dump(2) + "\n", args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// flow

struct FlowArgs {
  std::string kind = "balanced";
  int width = 2;
  int depth = 2;
  std::string x0_path;
  std::string w0_path;
  std::string loss = "quadratic";
  std::string target_path;
  std::string mask_path;
  double dt = 1e-3;
  int steps = 1000;
  int record_every = 10;
  std::string beta_list = "inf";
  std::string convention = "embedded";
  std::uint64_t seed = 0;
  std::string out;
};

struct FlowRun {
  double beta = std::numeric_limits<double>::infinity();
  std::string beta_token;
  Trajectory trajectory;
};

int run_flow(const FlowArgs& args) {
  const HaarConvention convention = parse_convention(args.convention);
  if (args.kind != "param" && args.kind != "closed" && args.kind != "balanced" &&
      args.kind != "free")
    throw CLI::ValidationError("--kind", "expected param, closed, balanced or free");
  if (args.loss != "quadratic" && args.loss != "masked")
    throw CLI::ValidationError("--loss", "expected quadratic or masked");
  if (args.loss == "masked" && args.mask_path.empty())
    throw CLI::ValidationError("--mask", "required when --loss masked");

  std::mt19937_64 rng(args.seed);
  const bool network_state = args.kind == "param" || args.kind == "closed";
  if (network_state && !args.x0_path.empty())
    throw CLI::ValidationError("--x0", "only valid for --kind balanced|free");
  if (!network_state && !args.w0_path.empty())
    throw CLI::ValidationError("--w0", "only valid for --kind param|closed");

  Network w0;
  Matrix x0;
  int width = args.width;
  if (network_state) {
    if (!args.w0_path.empty())
      w0 = load_network(args.w0_path);
    else {
      std::vector<Matrix> layers;
      for (int p = 0; p < args.depth; ++p)
        layers.push_back(0.7 * random_gauss_matrix(args.width, rng, 1.0));
      w0 = Network(std::move(layers));
    }
    width = w0.width();
  } else {
    x0 = args.x0_path.empty() ? random_full_rank(args.width, rng) : load_matrix(args.x0_path);
    width = static_cast<int>(x0.rows());
  }
  const int depth = network_state ? w0.depth() : args.depth;

  const Matrix target = args.target_path.empty() ? 0.5 * random_gauss_matrix(width, rng, 1.0)
                                                 : load_matrix(args.target_path);
  const LossSpec loss = args.loss == "quadratic"
                            ? LossSpec::quadratic(target)
                            : LossSpec::masked_quadratic(target, load_matrix(args.mask_path));

  std::vector<FlowRun> runs;
  {
    std::stringstream ss(args.beta_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      FlowRun run;
      run.beta_token = tok;
      try {
        run.beta = std::stod(tok);
      } catch (const std::exception&) {
        throw CLI::ValidationError("--beta", "cannot parse '" + tok + "'");
      }
      runs.push_back(std::move(run));
    }
  }
  if (runs.empty()) throw CLI::ValidationError("--beta", "empty list");
  if (runs.size() > 1 && args.out.empty())
    throw CLI::ValidationError("--out", "required for a --beta sweep");

  auto integrate = [&](double beta) {
    FlowConfig cfg;
    cfg.dt = args.dt;
    cfg.steps = args.steps;
    cfg.record_every = args.record_every;
    cfg.beta = beta;
    cfg.convention = convention;
    if (args.kind == "param") return param_flow(w0, loss, cfg);
    if (args.kind == "closed") return closed_flow_general(w0, loss, cfg);
    if (args.kind == "balanced") return balanced_flow(x0, depth, loss, cfg);
    return free_energy_flow(x0, depth, loss, cfg);
  };

  // Sweep members run concurrently, capped by DLN_GEOM_THREADS.
  const int cap = std::max(1, std::min<int>(thread_cap(), static_cast<int>(runs.size())));
  std::vector<std::exception_ptr> errors(runs.size());
  for (size_t base = 0; base < runs.size(); base += cap) {
    std::vector<std::thread> pool;
    for (size_t i = base; i < std::min(runs.size(), base + cap); ++i)
      pool.emplace_back([&, i] {
        try {
          runs[i].trajectory = integrate(runs[i].beta);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);

  int exit_code = 0;
  for (const FlowRun& run : runs) {
    std::string path = args.out;
    if (runs.size() > 1) {
      const std::filesystem::path p(args.out);
      path = (p.parent_path() /
              (p.stem().string() + "_beta=" + run.beta_token + p.extension().string()))
                 .string();
    }
    if (path.empty()) {
      write_trajectory_csv(run.trajectory, std::cout);
    } else {
      write_trajectory_csv(run.trajectory, path);
    }
    if (run.trajectory.stopped_early) {
      std::cerr << run.trajectory.stop_reason << ": flow stopped early at t = "
                << format_double(run.trajectory.back().t) << " (beta = " << run.beta_token
                << ")\n";
      exit_code = 1;
    }
  }
  return exit_code;
}

// ---------------------------------------------------------------------------
// --config preprocessing: JSON keys become flags, command-line flags win

std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string config_path;
  for (size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") {
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config file " + config_path);
  json cfg = json::parse(in, nullptr, false);
  if (cfg.is_discarded() || !cfg.is_object())
    throw IoError(config_path + ": config must be a JSON object");

  std::string command;
  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") {
      command = value.get<std::string>();
      continue;
    }
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back("--" + key);
      continue;
    }
    injected.push_back("--" + key);
    if (value.is_string())
      injected.push_back(value.get<std::string>());
    else if (value.is_array()) {
      std::string joined;
      for (size_t i = 0; i < value.size(); ++i) {
        if (i) joined += ",";
        joined += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
      }
      injected.push_back(joined);
    } else
      injected.push_back(value.dump());
  }

  std::vector<std::string> merged;
  size_t user_start = 0;
  if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
    merged.push_back(args[0]);  // subcommand given on the command line
    user_start = 1;
  } else if (!command.empty()) {
    merged.push_back(command);
  }
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + user_start, args.end());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian geometry of the deep linear network"};
  app.require_subcommand(1);

  EntropyArgs entropy_args;
  auto* entropy_cmd =
      app.add_subcommand("entropy", "Boltzmann entropy of the gauge orbit over an observable");
  entropy_cmd->add_option("--sigma", entropy_args.sigma_list, "comma-separated singular values")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  entropy_cmd->add_option("--matrix", entropy_args.matrix_path, "matrix file (JSON or CSV)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  entropy_cmd->add_option("--depth", entropy_args.depth, "network depth N")
      ->required()
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  entropy_cmd
      ->add_option("--convention", entropy_args.convention, "embedded|ponting (default embedded)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  entropy_cmd->add_option("--out", entropy_args.out, "output JSON path (default stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  VolumeArgs volume_args;
  auto* volume_cmd =
      app.add_subcommand("volume", "orbit volume: closed form, numeric oracle, density fit");
  volume_cmd->add_option("--sigma", volume_args.sigma_list, "comma-separated singular values")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd->add_option("--lambda", volume_args.lambda_list, "comma-separated layer spectrum")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd->add_option("--matrix", volume_args.matrix_path, "matrix file (JSON or CSV)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd->add_option("--depth", volume_args.depth, "network depth N")
      ->required()
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd->add_option("--convention", volume_args.convention, "embedded|ponting")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd
      ->add_option("--grid", volume_args.grid, "grid for the numeric oracle (0 disables)")
      ->check(CLI::Range(0, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd->add_flag("--density-fit", volume_args.density_fit,
                       "fit the volume-density exponent against det(Sigma)");
  volume_cmd->add_option("--trials", volume_args.trials, "samples for --density-fit")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd->add_option("--seed", volume_args.seed, "random seed")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  volume_cmd->add_option("--out", volume_args.out, "output JSON path (default stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "randomized verification suites");
  verify_cmd->add_option("--suite", verify_args.suite, "jacobi|basis|submersion")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  verify_cmd->add_option("--width", verify_args.width, "matrix width d")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  verify_cmd->add_option("--depth", verify_args.depth, "network depth N")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  verify_cmd->add_option("--trials", verify_args.trials, "random trials")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  verify_cmd->add_option("--seed", verify_args.seed, "random seed")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  verify_cmd->add_option("--balance-tol", verify_args.balance_tol, "balance tolerance override")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  verify_cmd->add_option("--out", verify_args.out, "report JSON path (default stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  BasisArgs basis_args;
  auto* basis_cmd =
      app.add_subcommand("basis", "orthonormal tangent basis report at a balanced point");
  basis_cmd->add_option("--network", basis_args.network_path, "balanced network JSON")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  basis_cmd->add_option("--matrix", basis_args.matrix_path, "observable matrix (center is used)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  basis_cmd->add_option("--width", basis_args.width, "matrix width d")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  basis_cmd->add_option("--depth", basis_args.depth, "network depth N")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  basis_cmd->add_option("--seed", basis_args.seed, "random seed")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  basis_cmd->add_option("--balance-tol", basis_args.balance_tol, "balance tolerance override")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  basis_cmd->add_flag("--emit-vectors", basis_args.emit_vectors,
                      "include the basis vectors in the report");
  basis_cmd->add_option("--out", basis_args.out, "output JSON path (default stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  FlowArgs flow_args;
  auto* flow_cmd = app.add_subcommand("flow", "training-flow trajectories as CSV");
  flow_cmd->add_option("--kind", flow_args.kind, "param|closed|balanced|free")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--width", flow_args.width, "matrix width d")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--depth", flow_args.depth, "network depth N")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--x0", flow_args.x0_path, "initial observable (balanced|free kinds)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--w0", flow_args.w0_path, "initial network (param|closed kinds)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--loss", flow_args.loss, "quadratic|masked")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--target", flow_args.target_path, "loss target matrix file")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--mask", flow_args.mask_path, "0/1 mask matrix file (masked loss)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--dt", flow_args.dt, "integrator step")
      ->check(CLI::PositiveNumber)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--steps", flow_args.steps, "number of steps")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--record-every", flow_args.record_every, "sampling stride")
      ->check(CLI::Range(1, std::numeric_limits<int>::max()))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--beta", flow_args.beta_list,
                       "inverse temperature; comma list runs a concurrent sweep")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--convention", flow_args.convention, "embedded|ponting")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--seed", flow_args.seed, "random seed for generated inputs")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  flow_cmd->add_option("--out", flow_args.out, "CSV path (default stdout; sweep stem)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = apply_config_file(args);
  } catch (const DlnError& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 1;
  }

  std::vector<const char*> cargs;
  cargs.push_back(argv[0]);
  for (const std::string& a : args) cargs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (entropy_cmd->parsed()) {
      if (entropy_args.sigma_list.empty() == entropy_args.matrix_path.empty()) {
        std::cerr << "usage error: exactly one of --sigma or --matrix is required\n";
        return 2;
      }
      return run_entropy(entropy_args);
    }
    if (volume_cmd->parsed()) {
      if (volume_args.sigma_list.empty() && volume_args.lambda_list.empty() &&
          volume_args.matrix_path.empty()) {
        std::cerr << "usage error: one of --sigma, --lambda or --matrix is required\n";
        return 2;
      }
      return run_volume(volume_args);
    }
    if (verify_cmd->parsed()) return run_verify(verify_args);
    if (basis_cmd->parsed()) return run_basis(basis_args);
    if (flow_cmd->parsed()) return run_flow(flow_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DlnError& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
