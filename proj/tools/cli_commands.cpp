#include "cli_commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "christoffel/christoffel.hpp"
#include "christoffel/csv.hpp"
#include "christoffel/density.hpp"
#include "christoffel/dimension.hpp"
#include "christoffel/errors.hpp"
#include "christoffel/geometry.hpp"
#include "christoffel/moments.hpp"
#include "christoffel/perturbation.hpp"

namespace christoffel::cli {

namespace {

using json = nlohmann::ordered_json;

struct SampleArgs {
  std::string surface;
  long long n = 0;
  std::uint64_t seed = 0;
  int dim = 3;
  double major_radius = 0.75;
  double minor_radius = 0.25;
  std::string out = "-";
};

struct SpectralArgs {
  std::string basis = "chebyshev";
  double threshold = 1e-10;
  std::string threshold_mode = "relative";
  std::string threshold_scale = "eigenvalue";
  double kernel_tol = kDefaultKernelTol;

  Threshold make_threshold() const {
    return {threshold, threshold_mode_from_string(threshold_mode), threshold_scale_from_string(threshold_scale)};
  }
  json to_json() const {
    return {{"basis", basis},
            {"threshold", threshold},
            {"threshold_mode", threshold_mode},
            {"threshold_scale", threshold_scale},
            {"kernel_tol", kernel_tol}};
  }
};

struct InputArgs {
  std::string input;
  std::string embed;
  bool angles_in_degrees = false;

  json to_json() const {
    return {{"input", input}, {"embed", embed.empty() ? json(nullptr) : json(embed)}, {"angles_in_degrees", angles_in_degrees}};
  }
};

struct RankCurveArgs {
  InputArgs in;
  std::string degrees = "5..12";
  SpectralArgs spec{.threshold_scale = "singular-value"};
  double rel_fit_tol = kDefaultRelFitTol;
  std::string out = "-";
};

struct DensityArgs {
  InputArgs in;
  std::string surface;
  int degree = 4;
  std::string grid;
  SpectralArgs spec;
  std::string out;
  std::string summary = "-";
  std::string moments_out;
};

struct PerturbArgs {
  InputArgs in;
  std::string surface;
  int degree = 6;
  std::string sigmas;
  std::uint64_t seed = 0;
  std::string grid;
  SpectralArgs spec;
  std::string out_prefix;
  std::string summary = "-";
};

struct EvalArgs {
  InputArgs in;
  std::string moments_in;
  int degree = 4;
  SpectralArgs spec;
  std::vector<std::string> points;
  std::string moments_out;
  std::string out = "-";
};

void add_spectral_options(CLI::App* app, SpectralArgs& a) {
  app->add_option("--basis", a.basis, "Polynomial basis: chebyshev or monomial")->capture_default_str();
  app->add_option("--threshold", a.threshold, "Rank threshold")->capture_default_str();
  app->add_option("--threshold-mode", a.threshold_mode, "relative or absolute")->capture_default_str();
  app->add_option("--threshold-scale", a.threshold_scale, "eigenvalue or singular-value")->capture_default_str();
  app->add_option("--kernel-tol", a.kernel_tol, "Tolerance on the normalized kernel residual")->capture_default_str();
}

void add_input_options(CLI::App* app, InputArgs& a, bool required = true) {
  auto* opt = app->add_option("--input,-i", a.input, "Input CSV (one point or angle tuple per row)");
  if (required) opt->required();
  app->add_option("--embed", a.embed, "Treat columns as angles and embed them: circle or bitorus");
  app->add_flag("--angles-in-degrees", a.angles_in_degrees, "Angle columns are in degrees");
}

// Writes to `path`, or to `out` when path is "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-" || path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("write to '" + path + "' failed");
}

PointCloud load_cloud(const InputArgs& a) {
  auto table = read_csv(a.input);
  if (a.embed.empty()) return PointCloud(std::move(table.data));
  const auto target = surface_kind_from_string(a.embed);
  if (a.angles_in_degrees) table.data *= std::numbers::pi / 180.0;
  return embed_angles(table.data, target);
}

std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int a = std::stoi(text.substr(0, dots));
      const int b = std::stoi(text.substr(dots + 2));
      if (b < a) throw std::invalid_argument("empty degree range");
      for (int d = a; d <= b; ++d) out.push_back(d);
    } else {
      for (double v : parse_number_list(text)) {
        if (v != std::floor(v)) throw std::invalid_argument("non-integer degree");
        out.push_back(static_cast<int>(v));
      }
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("--degrees: expected 'a..b' or a comma-separated list, got '" + text + "'");
  }
  if (out.empty()) throw std::invalid_argument("--degrees: no degrees given");
  return out;
}

std::pair<int, int> parse_grid(const std::string& text, SurfaceKind kind) {
  if (text.empty()) {
    switch (kind) {
      case SurfaceKind::Circle: return {512, 0};
      case SurfaceKind::Sphere: return {72, 36};
      case SurfaceKind::BiTorus: return {64, 64};
      default: break;
    }
    throw std::invalid_argument("no evaluation grid for surface " + to_string(kind));
  }
  try {
    const auto x = text.find('x');
    if (x == std::string::npos) return {std::stoi(text), 0};
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("--grid: expected 'N' or 'NxM', got '" + text + "'");
  }
}

SurfaceSpec resolve_surface(const std::string& surface, const InputArgs& in, int cloud_dim) {
  std::string name = surface;
  if (name.empty()) name = in.embed;
  if (name.empty()) throw std::invalid_argument("--surface is required");
  if (!in.embed.empty() && in.embed != name) {
    throw std::invalid_argument("--surface " + name + " conflicts with --embed " + in.embed);
  }
  const auto kind = surface_kind_from_string(name);
  switch (kind) {
    case SurfaceKind::Circle: return SurfaceSpec::circle();
    case SurfaceKind::Sphere: return SurfaceSpec::sphere(cloud_dim);
    case SurfaceKind::BiTorus: return SurfaceSpec::bi_torus();
    default: throw std::invalid_argument("density estimation supports circle, sphere and bitorus");
  }
}

PointMatrix grid_rows(const DensityGrid& dg) {
  const auto& g = dg.grid;
  const auto np = g.parameters.cols();
  const auto nx = g.points.cols();
  PointMatrix rows(static_cast<Eigen::Index>(g.size()), np + nx + 2);
  for (Eigen::Index k = 0; k < rows.rows(); ++k) {
    rows.row(k).head(np) = g.parameters.row(k);
    rows.row(k).segment(np, nx) = g.points.row(k);
    rows(k, np + nx) = dg.values[static_cast<std::size_t>(k)];
    rows(k, np + nx + 1) = dg.kernel_residuals[static_cast<std::size_t>(k)];
  }
  return rows;
}

std::vector<std::string> grid_header(const DensityGrid& dg) {
  auto header = dg.grid.parameter_names;
  for (Eigen::Index j = 0; j < dg.grid.points.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
  header.push_back("value");
  header.push_back("kernel_residual");
  return header;
}

std::string grid_csv(const DensityGrid& dg) {
  std::ostringstream os;
  write_csv(os, grid_header(dg), grid_rows(dg));
  return os.str();
}

json grid_summary(const DensityGrid& dg) {
  return {{"d", dg.degree},
          {"n", dg.sample_count},
          {"N_of_d", dg.n_of_d},
          {"rank", dg.rank},
          {"min_value", dg.min_value},
          {"max_value", dg.max_value},
          {"sample_kappa_mean", dg.sample_kappa_mean},
          {"retained_eigen_ratio", dg.retained_eigen_ratio},
          {"warnings", dg.warnings}};
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  if (a.n < 1) throw std::invalid_argument("--n must be >= 1");
  SurfaceSpec spec;
  switch (surface_kind_from_string(a.surface)) {
    case SurfaceKind::Cube: spec = SurfaceSpec::cube(a.dim); break;
    case SurfaceKind::Sphere: spec = SurfaceSpec::sphere(a.dim); break;
    case SurfaceKind::Torus: spec = SurfaceSpec::torus(a.major_radius, a.minor_radius); break;
    case SurfaceKind::TVScreen: spec = SurfaceSpec::tv_screen(); break;
    case SurfaceKind::Circle: spec = SurfaceSpec::circle(); break;
    case SurfaceKind::BiTorus: spec = SurfaceSpec::bi_torus(); break;
  }
  const auto cloud = sample(spec, static_cast<std::size_t>(a.n), a.seed);
  std::ostringstream os;
  write_csv(os, {}, cloud.points());
  emit(a.out, os.str(), out);
  return kOk;
}

int cmd_rank_curve(const RankCurveArgs& a, std::ostream& out, std::ostream& err) {
  const auto cloud = load_cloud(a.in);
  const auto degrees = parse_degrees(a.degrees);
  const auto curve = rank_curve(cloud, degrees, basis_kind_from_string(a.spec.basis), a.spec.make_threshold());
  report_warnings(curve.warnings, err);
  const auto est = estimate_dimension(curve, cloud.dim(), a.rel_fit_tol);

  json doc;
  doc["format_version"] = kFormatVersion;
  doc["command"] = "rank-curve";
  json config = a.in.to_json();
  config["degrees"] = a.degrees;
  config.update(a.spec.to_json());
  config["rel_fit_tol"] = a.rel_fit_tol;
  doc["config"] = config;
  doc["n"] = cloud.size();
  doc["ambient_dim"] = cloud.dim();
  json obs = json::array();
  for (const auto& o : curve.observations) {
    obs.push_back({{"degree", o.degree},
                   {"rank", o.rank},
                   {"s_of_d", o.s_of_d},
                   {"saturated", o.saturated},
                   {"threshold_used", o.threshold_used}});
  }
  doc["curve"] = obs;
  json fits = json::array();
  json residual_by_k = json::object();
  for (const auto& f : est.fits) {
    fits.push_back({{"k", f.k},
                    {"coefficients", std::vector<double>(f.coefficients.begin(), f.coefficients.end())},
                    {"rms_residual", f.rms_residual}});
    residual_by_k[std::to_string(f.k)] = f.rms_residual;
  }
  doc["fits"] = fits;
  doc["residual_by_k"] = residual_by_k;
  doc["fit_degrees_used"] = est.fit_degrees_used;
  doc["selected_dimension"] = est.selected_dimension;
  doc["reliable"] = est.reliable;
  doc["notes"] = est.notes;
  doc["warnings"] = curve.warnings;
  emit(a.out, doc.dump(2) + "\n", out);
  return kOk;
}

DensityOptions density_options(const SpectralArgs& s) {
  DensityOptions opts;
  opts.basis = basis_kind_from_string(s.basis);
  opts.threshold = s.make_threshold();
  opts.kernel_tol = s.kernel_tol;
  return opts;
}

int cmd_density(const DensityArgs& a, std::ostream& out, std::ostream& err) {
  const auto cloud = load_cloud(a.in);
  const auto surface = resolve_surface(a.surface, a.in, cloud.dim());
  const auto [g1, g2] = parse_grid(a.grid, surface.kind);
  const auto grid = make_grid(surface, g1, g2);
  const auto opts = density_options(a.spec);
  const auto dg = estimate_density(cloud, surface, a.degree, grid, opts);
  report_warnings(dg.warnings, err);

  if (!a.moments_out.empty()) {
    const auto box = opts.basis == BasisKind::TensorChebyshev ? bounding_box(cloud.points()) : ScaleBox{};
    write_moment_cache(a.moments_out, moment_matrix(cloud, GradedBasis::enumerate(cloud.dim(), a.degree, opts.basis, box)));
  }
  if (!a.out.empty()) emit(a.out, grid_csv(dg), out);

  json doc;
  doc["format_version"] = kFormatVersion;
  doc["command"] = "density";
  json config = a.in.to_json();
  config["surface"] = to_string(surface.kind);
  config["degree"] = a.degree;
  config["grid"] = {g1, g2};
  config.update(a.spec.to_json());
  config["out"] = a.out;
  doc["config"] = config;
  doc["summary"] = grid_summary(dg);
  emit(a.summary, doc.dump(2) + "\n", out);
  return kOk;
}

int cmd_perturb(const PerturbArgs& a, std::ostream& out, std::ostream& err) {
  const auto sigmas = parse_number_list(a.sigmas);
  if (sigmas.empty()) throw std::invalid_argument("--sigmas: at least one noise level is required");
  auto base = load_cloud(a.in);
  const auto surface = resolve_surface(a.surface.empty() && a.in.embed.empty() ? "circle" : a.surface, a.in, base.dim());
  const auto [g1, g2] = parse_grid(a.grid, surface.kind);
  const auto grid = make_grid(surface, g1, g2);
  const NoiseLadder ladder{std::move(base), sigmas, a.seed};
  const auto sweep = noise_sweep(ladder, surface, a.degree, grid, density_options(a.spec));
  report_warnings(sweep.reference.warnings, err);

  if (!a.out_prefix.empty()) {
    emit(a.out_prefix + "_reference.csv", grid_csv(sweep.reference), out);
    for (std::size_t i = 0; i < sweep.levels.size(); ++i) {
      emit(a.out_prefix + "_sigma_" + std::to_string(i) + ".csv", grid_csv(sweep.levels[i].grid), out);
    }
  }

  json doc;
  doc["format_version"] = kFormatVersion;
  doc["command"] = "perturb";
  json config = a.in.to_json();
  config["surface"] = to_string(surface.kind);
  config["degree"] = a.degree;
  config["sigmas"] = sigmas;
  config["seed"] = a.seed;
  config["grid"] = {g1, g2};
  config.update(a.spec.to_json());
  config["out_prefix"] = a.out_prefix;
  doc["config"] = config;
  doc["reference"] = grid_summary(sweep.reference);
  json levels = json::array();
  for (std::size_t i = 0; i < sweep.levels.size(); ++i) {
    const auto& l = sweep.levels[i];
    json entry = {{"sigma", l.sigma}, {"deviation", l.deviation}};
    entry["summary"] = grid_summary(l.grid);
    if (!a.out_prefix.empty()) entry["csv"] = a.out_prefix + "_sigma_" + std::to_string(i) + ".csv";
    levels.push_back(entry);
  }
  doc["levels"] = levels;
  emit(a.summary, doc.dump(2) + "\n", out);
  return kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.in.input.empty() == a.moments_in.empty()) {
    throw std::invalid_argument("christoffel-eval: give exactly one of --input or --moments-in");
  }
  MomentMatrix m;
  if (!a.moments_in.empty()) {
    m = read_moment_cache(a.moments_in);
  } else {
    const auto cloud = load_cloud(a.in);
    const auto kind = basis_kind_from_string(a.spec.basis);
    const auto box = kind == BasisKind::TensorChebyshev ? bounding_box(cloud.points()) : ScaleBox{};
    m = moment_matrix(cloud, GradedBasis::enumerate(cloud.dim(), a.degree, kind, box));
  }
  if (!a.moments_out.empty()) write_moment_cache(a.moments_out, m);
  const auto ev = ChristoffelEvaluator::from_moments(m, a.spec.make_threshold(), a.spec.kernel_tol);

  json results = json::array();
  for (const auto& text : a.points) {
    const auto x = parse_number_list(text);
    if (x.size() != static_cast<std::size_t>(m.basis.ambient_dim())) {
      throw std::invalid_argument("--x '" + text + "' has " + std::to_string(x.size()) + " coordinates, expected " +
                                  std::to_string(m.basis.ambient_dim()));
    }
    const auto lam = ev.lambda(x);
    json pinv = std::isfinite(lam.pinv_value) ? json(lam.pinv_value) : json(nullptr);
    results.push_back({{"x", x},
                       {"lambda", lam.value},
                       {"lambda_pinv", pinv},
                       {"kappa", ev.kernel(x, x)},
                       {"kernel_residual", lam.kernel_residual},
                       {"on_support", lam.on_support()}});
  }

  json doc;
  doc["format_version"] = kFormatVersion;
  doc["command"] = "christoffel-eval";
  json config = a.in.to_json();
  config["moments_in"] = a.moments_in;
  config["degree"] = m.degree();
  config.update(a.spec.to_json());
  config["basis"] = to_string(m.basis.kind());
  config["x"] = a.points;
  doc["config"] = config;
  doc["n"] = m.sample_count;
  doc["s_of_d"] = m.size();
  doc["rank"] = ev.rank();
  doc["points"] = results;
  emit(a.out, doc.dump(2) + "\n", out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Christoffel functions, rank curves and densities on algebraic sets", "christoffel_cli"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Sample points on a test set and write CSV");
  sample_cmd->add_option("--surface", sample_args.surface, "cube|sphere|torus|tvscreen|circle|bitorus")->required();
  sample_cmd->add_option("--n", sample_args.n, "Number of points")->required();
  sample_cmd->add_option("--seed", sample_args.seed, "Random seed")->capture_default_str();
  sample_cmd->add_option("--dim", sample_args.dim, "Ambient dimension for cube and sphere")->capture_default_str();
  sample_cmd->add_option("--major-radius", sample_args.major_radius, "Torus R")->capture_default_str();
  sample_cmd->add_option("--minor-radius", sample_args.minor_radius, "Torus r")->capture_default_str();
  sample_cmd->add_option("--out,-o", sample_args.out, "Output CSV ('-' for stdout)")->capture_default_str();

  RankCurveArgs rc;
  auto* rc_cmd = app.add_subcommand("rank-curve", "Rank of the moment matrix per degree and intrinsic dimension");
  add_input_options(rc_cmd, rc.in);
  rc_cmd->add_option("--degrees", rc.degrees, "Degree range a..b or list")->capture_default_str();
  add_spectral_options(rc_cmd, rc.spec);
  rc_cmd->add_option("--rel-fit-tol", rc.rel_fit_tol, "Residual gate relative to the mean rank")->capture_default_str();
  rc_cmd->add_option("--out,-o", rc.out, "Output JSON ('-' for stdout)")->capture_default_str();

  DensityArgs da;
  auto* density_cmd = app.add_subcommand("density", "Normalized Christoffel density on a grid");
  add_input_options(density_cmd, da.in);
  density_cmd->add_option("--surface", da.surface, "circle|sphere|bitorus");
  density_cmd->add_option("--degree,-d", da.degree, "Polynomial degree")->capture_default_str();
  density_cmd->add_option("--grid", da.grid, "Grid resolution N or NxM");
  add_spectral_options(density_cmd, da.spec);
  density_cmd->add_option("--out,-o", da.out, "Grid CSV output");
  density_cmd->add_option("--summary", da.summary, "Summary JSON ('-' for stdout)")->capture_default_str();
  density_cmd->add_option("--moments-out", da.moments_out, "Write the moment matrix cache");

  PerturbArgs pa;
  auto* perturb_cmd = app.add_subcommand("perturb", "Christoffel function under decreasing Gaussian noise");
  add_input_options(perturb_cmd, pa.in);
  perturb_cmd->add_option("--surface", pa.surface, "circle|sphere|bitorus (default circle)");
  perturb_cmd->add_option("--degree,-d", pa.degree, "Polynomial degree")->capture_default_str();
  perturb_cmd->add_option("--sigmas", pa.sigmas, "Strictly decreasing noise levels, comma-separated")->required();
  perturb_cmd->add_option("--seed", pa.seed, "Noise seed")->capture_default_str();
  perturb_cmd->add_option("--grid", pa.grid, "Grid resolution N or NxM");
  add_spectral_options(perturb_cmd, pa.spec);
  perturb_cmd->add_option("--out-prefix", pa.out_prefix, "Write <prefix>_reference.csv and <prefix>_sigma_<i>.csv");
  perturb_cmd->add_option("--summary", pa.summary, "Summary JSON ('-' for stdout)")->capture_default_str();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("christoffel-eval", "Point-wise Christoffel function and kernel diagonal");
  add_input_options(eval_cmd, ea.in, false);
  eval_cmd->add_option("--moments-in", ea.moments_in, "Read a moment matrix cache instead of a CSV");
  eval_cmd->add_option("--degree,-d", ea.degree, "Polynomial degree")->capture_default_str();
  add_spectral_options(eval_cmd, ea.spec);
  eval_cmd->add_option("--x", ea.points, "Query point c1,c2,... (repeatable)")->required();
  eval_cmd->add_option("--moments-out", ea.moments_out, "Write the moment matrix cache");
  eval_cmd->add_option("--out,-o", ea.out, "Output JSON ('-' for stdout)")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (sample_cmd->parsed()) return cmd_sample(sample_args, out);
    if (rc_cmd->parsed()) return cmd_rank_curve(rc, out, err);
    if (density_cmd->parsed()) return cmd_density(da, out, err);
    if (perturb_cmd->parsed()) return cmd_perturb(pa, out, err);
    if (eval_cmd->parsed()) return cmd_eval(ea, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace christoffel::cli
