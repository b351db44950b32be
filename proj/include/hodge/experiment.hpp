#pragma once

// Experiment harness: CSV ingestion and emission, synthetic fields,
// train/test protocols on S2, model sweeps and result tables.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hodge/errors.hpp"
#include "hodge/gp.hpp"
#include "hodge/kernels.hpp"
#include "hodge/manifold.hpp"

#ifndef HODGE_VERSION
#define HODGE_VERSION "0.1.0"
#endif

namespace hodge {

inline constexpr const char* kVersion = HODGE_VERSION;
inline constexpr double kMaxIngestLatDeg = 89.9;

// ---------------------------------------------------------------------------
// Small text helpers

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

/// Shortest text that reads back to the same double, or `precision`
/// significant digits when given.
inline std::string format_double(double v, int precision = 0) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = precision > 0 ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision)
                               : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV ingestion

template <class Point>
struct Ingested {
  Dataset<Point> data;
  std::size_t rejected = 0;  // rows dropped for |lat| > 89.9 deg
};

using IngestedSphere = Ingested<SpherePoint>;
using IngestedTorus = Ingested<TorusPoint>;

/// Reads `lon_deg,lat_deg,u_east,v_north` (sphere) or
/// `theta_1,..,theta_d,v_1,..,v_d` (torus). The header decides which.
inline std::variant<IngestedSphere, IngestedTorus> ingest_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!detail::trim(line).empty()) {
      header = detail::split(detail::trim(line), ',');
      break;
    }
  }
  if (header.empty()) throw InvalidInput("ingest_csv: empty file");

  const bool sphere = header == std::vector<std::string>{"lon_deg", "lat_deg", "u_east", "v_north"};
  int d = 0;
  if (!sphere) {
    if (header.size() % 2 != 0 || header.empty()) throw ParseError(lineno, "unrecognized header");
    d = static_cast<int>(header.size() / 2);
    for (int i = 0; i < d; ++i) {
      if (header[static_cast<std::size_t>(i)] != "theta_" + std::to_string(i + 1) ||
          header[static_cast<std::size_t>(d + i)] != "v_" + std::to_string(i + 1))
        throw ParseError(lineno, "unrecognized header");
    }
  }

  IngestedSphere s;
  IngestedTorus t;
  const std::size_t ncol = header.size();
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = detail::trim(line);
    if (row.empty()) continue;
    const auto cells = detail::split(row, ',');
    if (cells.size() != ncol)
      throw ParseError(lineno, "expected " + std::to_string(ncol) + " fields, got " + std::to_string(cells.size()));
    std::vector<double> v(ncol);
    for (std::size_t i = 0; i < ncol; ++i)
      if (!detail::parse_double(cells[i], v[i]) || !std::isfinite(v[i]))
        throw ParseError(lineno, "field " + std::to_string(i + 1) + " is not a finite number: '" + cells[i] + "'");
    if (sphere) {
      if (std::abs(v[1]) > kMaxIngestLatDeg) {
        ++s.rejected;
        continue;
      }
      const SpherePoint x = lonlat_to_point(v[0], v[1]);
      s.data.points.push_back(x);
      s.data.values.emplace_back(tangent_from_east_north(x, v[2], v[3]).v);
    } else {
      std::vector<double> th(v.begin(), v.begin() + d);
      t.data.points.emplace_back(std::move(th));
      t.data.values.push_back(Eigen::Map<const Eigen::VectorXd>(v.data() + d, d));
    }
  }
  if (sphere) return s;
  return t;
}

inline std::variant<IngestedSphere, IngestedTorus> ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("ingest_csv: cannot open " + path.string());
  return ingest_csv(in);
}

inline IngestedSphere ingest_sphere_csv(const std::filesystem::path& path) {
  auto r = ingest_csv(path);
  if (!std::holds_alternative<IngestedSphere>(r))
    throw InvalidInput("ingest_csv: " + path.string() + " holds torus data, sphere expected");
  return std::get<IngestedSphere>(std::move(r));
}

inline void write_csv(std::ostream& out, const SphereDataset& data) {
  out << "lon_deg,lat_deg,u_east,v_north\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto [lon, lat] = point_to_lonlat(data.points[i]);
    const auto [u, v] = east_north_components(TangentVector{data.points[i], data.values[i]});
    out << detail::format_double(lon) << ',' << detail::format_double(lat) << ',' << detail::format_double(u) << ','
        << detail::format_double(v) << '\n';
  }
}

inline void write_csv(std::ostream& out, const TorusDataset& data) {
  const int d = data.empty() ? 0 : data.points.front().dim();
  for (int i = 1; i <= d; ++i) out << "theta_" << i << ',';
  for (int i = 1; i <= d; ++i) out << "v_" << i << (i == d ? "\n" : ",");
  for (std::size_t k = 0; k < data.size(); ++k) {
    for (int i = 0; i < d; ++i) out << detail::format_double(data.points[k][i]) << ',';
    for (int i = 0; i < d; ++i) out << detail::format_double(data.values[k][i]) << (i + 1 == d ? "\n" : ",");
  }
}

template <class Point>
void write_csv(const std::filesystem::path& path, const Dataset<Point>& data) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("write_csv: cannot open " + path.string());
  write_csv(out, data);
}

// ---------------------------------------------------------------------------
// Data preparation

/// Scales observations so that their mean Euclidean norm is 1. Returns the
/// factor s and the scaled copy (whose `scale` field accumulates s).
template <class Point>
std::pair<double, Dataset<Point>> normalize_dataset(const Dataset<Point>& train) {
  if (train.empty()) throw InvalidInput("normalize_dataset: empty dataset");
  double mean = 0.0;
  for (const auto& v : train.values) mean += v.norm();
  mean /= static_cast<double>(train.size());
  if (!(mean > 0.0)) throw InvalidInput("normalize_dataset: all observations are zero");
  const double s = 1.0 / mean;
  Dataset<Point> out = train;
  for (auto& v : out.values) v *= s;
  out.scale = train.scale * s;
  return {s, out};
}

/// Rigid rotation about the z axis, (x, y, z) -> (y, -x, 0).
inline Vec3 rotation_field(const SpherePoint& p) { return Vec3(p.vec().y(), -p.vec().x(), 0.0); }

/// Field evaluators used to generate synthetic data.
struct FieldSource {
  std::string name = "rotation";  // "rotation" or "kernel-sample"
  KernelSpec sample_spec;          // kernel-sample only

  void validate() const {
    if (name != "rotation" && name != "kernel-sample") throw InvalidInput("unknown synthetic field '" + name + "'");
    if (name == "kernel-sample") {
      sample_spec.validate();
      if (sample_spec.kind == KernelKind::PureNoise || sample_spec.kind == KernelKind::Scalar)
        throw InvalidInput("kernel-sample needs a vector kernel kind");
    }
  }
};

/// Evaluates the named field at `points`. Kernel samples are drawn afresh
/// from `rng` on every call.
inline SphereDataset synthetic_field(const FieldSource& src, const std::vector<SpherePoint>& points, Rng& rng) {
  src.validate();
  SphereDataset out;
  out.points = points;
  if (src.name == "rotation") {
    for (const auto& p : points) out.values.emplace_back(rotation_field(p));
    return out;
  }
  const auto sample = sample_prior(src.sample_spec, sphere_spectrum_for(src.sample_spec), rng);
  for (const auto& p : points) out.values.push_back(project_tangent(p, sample(p)));
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration

enum class Protocol { HemisphereSplit, GreatCircle, File };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::HemisphereSplit: return "hemisphere-split";
    case Protocol::GreatCircle: return "great-circle";
    case Protocol::File: return "file";
  }
  return "?";
}

inline Protocol protocol_from_string(const std::string& s) {
  for (Protocol p : {Protocol::HemisphereSplit, Protocol::GreatCircle, Protocol::File})
    if (s == to_string(p)) return p;
  throw InvalidInput("unknown protocol '" + s + "'");
}

inline std::string nu_to_string(double nu) {
  if (std::isinf(nu)) return "inf";
  if (std::isnan(nu)) return "";
  return detail::format_double(nu);
}

inline double nu_from_string(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInfiniteNu;
  double v = 0.0;
  if (s == "1/2") return 0.5;
  if (s == "3/2") return 1.5;
  if (s == "5/2") return 2.5;
  if (!detail::parse_double(s, v) || !(v > 0.0)) throw InvalidInput("invalid nu '" + s + "'");
  return v;
}

struct ExperimentConfig {
  std::vector<KernelKind> kernels{KernelKind::PureNoise, KernelKind::HodgeCurl};
  std::vector<double> nus{0.5};
  std::vector<std::uint64_t> seeds{0};
  Protocol protocol = Protocol::HemisphereSplit;

  std::size_t n_train = 30;  // hemisphere-split
  std::size_t n_test = 100;  // hemisphere-split and great-circle

  std::vector<double> gc_longitudes{-90.0, 90.0};  // great-circle: observed meridians
  double gc_spacing_deg = 0.25;                    // latitude spacing along a meridian
  std::size_t gc_stride = 180;                     // keep one point in every gc_stride

  std::filesystem::path train_file;  // file protocol
  std::filesystem::path test_file;

  FieldSource field;
  std::optional<double> frozen_kappa;
  int lmax = 30;
  int restarts = 5;
  int max_iterations = 400;

  std::filesystem::path out_dir;  // empty: nothing is written
  bool write_grids = true;
  int grid_lat = 37;
  int grid_lon = 72;

  void validate() const {
    if (kernels.empty()) throw InvalidInput("config: no kernels");
    if (nus.empty()) throw InvalidInput("config: no nu values");
    if (seeds.empty()) throw InvalidInput("config: no seeds");
    for (double nu : nus)
      if (!(nu > 0.0)) throw InvalidInput("config: nu must be > 0");
    if (lmax < 1) throw InvalidInput("config: lmax must be >= 1");
    if (restarts < 1 || max_iterations < 1) throw InvalidInput("config: restarts and iterations must be >= 1");
    if (frozen_kappa && !(*frozen_kappa > 0.0)) throw InvalidInput("config: kappa must be > 0");
    if (grid_lat < 2 || grid_lon < 1) throw InvalidInput("config: grid too small");
    switch (protocol) {
      case Protocol::HemisphereSplit:
        if (n_train == 0 || n_test == 0) throw InvalidInput("config: hemisphere-split needs n_train, n_test > 0");
        field.validate();
        break;
      case Protocol::GreatCircle:
        if (gc_longitudes.empty() || !(gc_spacing_deg > 0.0) || gc_stride == 0 || n_test == 0)
          throw InvalidInput("config: great-circle needs longitudes, spacing > 0, stride > 0 and n_test > 0");
        field.validate();
        break;
      case Protocol::File:
        if (train_file.empty() || test_file.empty()) throw InvalidInput("config: file protocol needs train and test");
        break;
    }
  }

  /// Canonical text of everything that affects the results (not out_dir).
  std::string canonical() const {
    std::ostringstream s;
    s << "kernels=";
    for (auto k : kernels) s << to_string(k) << ';';
    s << "|nus=";
    for (double nu : nus) s << nu_to_string(nu) << ';';
    s << "|seeds=";
    for (auto sd : seeds) s << sd << ';';
    s << "|protocol=" << to_string(protocol) << "|n_train=" << n_train << "|n_test=" << n_test << "|gc=";
    for (double l : gc_longitudes) s << detail::format_double(l) << ';';
    s << detail::format_double(gc_spacing_deg) << ';' << gc_stride << "|train=" << train_file.string()
      << "|test=" << test_file.string() << "|field=" << field.name;
    if (field.name == "kernel-sample")
      s << ';' << to_string(field.sample_spec.kind) << ';' << nu_to_string(field.sample_spec.params.nu) << ';'
        << detail::format_double(field.sample_spec.params.kappa) << ';'
        << detail::format_double(field.sample_spec.params.variance) << ';' << field.sample_spec.lmax;
    s << "|kappa=" << (frozen_kappa ? detail::format_double(*frozen_kappa) : "free") << "|lmax=" << lmax
      << "|restarts=" << restarts << "|iters=" << max_iterations << "|grid=" << write_grids << ';' << grid_lat << ';'
      << grid_lon;
    return s.str();
  }

  std::string hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(canonical())));
    return buf;
  }
};

inline std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& part : detail::split(s, ',')) {
    if (part.empty()) throw InvalidInput("invalid seed list '" + s + "'");
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto a = std::stoull(part.substr(0, dash));
        const auto b = std::stoull(part.substr(dash + 1));
        if (b < a) throw InvalidInput("invalid seed range '" + part + "'");
        for (auto v = a; v <= b; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw InvalidInput("invalid seed list '" + s + "'");
    }
  }
  return out;
}

/// Applies one `key=value` setting. Unknown keys are rejected.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  auto number = [&](double& out) {
    if (!detail::parse_double(value, out)) throw InvalidInput("config: '" + key + "' needs a number");
  };
  auto count = [&]() -> std::size_t {
    double v = 0.0;
    number(v);
    if (v < 0.0 || v != std::floor(v)) throw InvalidInput("config: '" + key + "' needs a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  if (key == "manifold") {
    if (value != "sphere") throw InvalidInput("config: experiments run on the sphere only");
  } else if (key == "kernel" || key == "kernels") {
    cfg.kernels.clear();
    for (const auto& k : detail::split(value, ',')) cfg.kernels.push_back(kernel_kind_from_string(k));
  } else if (key == "nu" || key == "nus") {
    cfg.nus.clear();
    for (const auto& n : detail::split(value, ',')) cfg.nus.push_back(nu_from_string(n));
  } else if (key == "seeds") {
    cfg.seeds = parse_seeds(value);
  } else if (key == "protocol") {
    cfg.protocol = protocol_from_string(value);
  } else if (key == "n_train") {
    cfg.n_train = count();
  } else if (key == "n_test") {
    cfg.n_test = count();
  } else if (key == "gc_longitudes") {
    cfg.gc_longitudes.clear();
    for (const auto& l : detail::split(value, ',')) {
      double v = 0.0;
      if (!detail::parse_double(l, v)) throw InvalidInput("config: bad longitude '" + l + "'");
      cfg.gc_longitudes.push_back(v);
    }
  } else if (key == "gc_spacing_deg") {
    number(cfg.gc_spacing_deg);
  } else if (key == "gc_stride") {
    cfg.gc_stride = count();
  } else if (key == "train") {
    cfg.train_file = value;
  } else if (key == "test") {
    cfg.test_file = value;
  } else if (key == "field") {
    cfg.field.name = value;
  } else if (key == "field_kernel") {
    cfg.field.sample_spec.kind = kernel_kind_from_string(value);
  } else if (key == "field_nu") {
    cfg.field.sample_spec.params.nu = nu_from_string(value);
  } else if (key == "field_kappa") {
    number(cfg.field.sample_spec.params.kappa);
  } else if (key == "kappa") {
    if (value == "free") {
      cfg.frozen_kappa.reset();
    } else {
      double v = 0.0;
      number(v);
      cfg.frozen_kappa = v;
    }
  } else if (key == "lmax") {
    cfg.lmax = static_cast<int>(count());
    cfg.field.sample_spec.lmax = cfg.lmax;
  } else if (key == "restarts") {
    cfg.restarts = static_cast<int>(count());
  } else if (key == "max_iterations") {
    cfg.max_iterations = static_cast<int>(count());
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "grid") {
    if (value != "true" && value != "false") throw InvalidInput("config: grid must be true or false");
    cfg.write_grids = value == "true";
  } else if (key == "grid_lat") {
    cfg.grid_lat = static_cast<int>(count());
  } else if (key == "grid_lon") {
    cfg.grid_lon = static_cast<int>(count());
  } else {
    throw InvalidInput("config: unknown key '" + key + "'");
  }
}

/// Plain-text `key = value` file; `#` starts a comment.
inline void apply_config_file(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    try {
      apply_setting(cfg, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
    } catch (const InvalidInput& e) {
      throw ParseError(lineno, e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Protocols

struct Split {
  SphereDataset train;
  SphereDataset test;
};

/// Meridian points at the given longitudes and latitude spacing, keeping
/// every `stride`-th one in order of (longitude, latitude).
inline std::vector<SpherePoint> great_circle_points(const std::vector<double>& longitudes, double spacing_deg,
                                                    std::size_t stride) {
  if (!(spacing_deg > 0.0) || stride == 0) throw InvalidInput("great_circle_points: spacing and stride must be > 0");
  std::vector<SpherePoint> all;
  const auto n = static_cast<long>(std::floor(180.0 / spacing_deg + 1e-9));
  for (double lon : longitudes)
    for (long i = 0; i <= n; ++i) {
      const double lat = -90.0 + static_cast<double>(i) * spacing_deg;
      if (std::abs(lat) <= kMaxIngestLatDeg) all.push_back(lonlat_to_point(lon, lat));
    }
  std::vector<SpherePoint> out;
  for (std::size_t i = 0; i < all.size(); i += stride) out.push_back(all[i]);
  return out;
}

/// Train/test data for one seed. Synthetic protocols draw points first,
/// then (for kernel samples) the field, all from one generator.
inline Split make_split(const ExperimentConfig& cfg, std::uint64_t seed) {
  Split s;
  if (cfg.protocol == Protocol::File) {
    auto tr = ingest_sphere_csv(cfg.train_file);
    auto te = ingest_sphere_csv(cfg.test_file);
    s.train = std::move(tr.data);
    s.test = std::move(te.data);
    if (s.train.empty() || s.test.empty()) throw InvalidInput("file protocol: train and test must be nonempty");
    return s;
  }
  Rng rng(seed);
  std::vector<SpherePoint> train_pts, test_pts;
  if (cfg.protocol == Protocol::HemisphereSplit) {
    train_pts = sample_uniform_hemisphere(cfg.n_train, true, rng);
    test_pts = sample_uniform_hemisphere(cfg.n_test, false, rng);
  } else {
    train_pts = great_circle_points(cfg.gc_longitudes, cfg.gc_spacing_deg, cfg.gc_stride);
    test_pts = sample_uniform_sphere(cfg.n_test, rng);
  }
  std::vector<SpherePoint> all = train_pts;
  all.insert(all.end(), test_pts.begin(), test_pts.end());
  const SphereDataset full = synthetic_field(cfg.field, all, rng);
  const auto nt = static_cast<std::ptrdiff_t>(train_pts.size());
  s.train.points.assign(full.points.begin(), full.points.begin() + nt);
  s.train.values.assign(full.values.begin(), full.values.begin() + nt);
  s.test.points.assign(full.points.begin() + nt, full.points.end());
  s.test.values.assign(full.values.begin() + nt, full.values.end());
  return s;
}

// ---------------------------------------------------------------------------
// Sweeps

struct CellResult {
  KernelKind kernel = KernelKind::PureNoise;
  double nu = std::numeric_limits<double>::quiet_NaN();  // NaN for pure noise
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  KernelSpec fitted;
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
  double pnll = std::numeric_limits<double>::quiet_NaN();
  double scale = std::numeric_limits<double>::quiet_NaN();
  double test_mean_sq_norm = std::numeric_limits<double>::quiet_NaN();  // mean |y_test|^2
};

struct SummaryRow {
  KernelKind kernel = KernelKind::PureNoise;
  double nu = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  double mse_mean = std::numeric_limits<double>::quiet_NaN();
  double mse_std = std::numeric_limits<double>::quiet_NaN();
  double pnll_mean = std::numeric_limits<double>::quiet_NaN();
  double pnll_std = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<CellResult> cells;
  std::vector<SummaryRow> summary;

  /// Summary row for a kernel and nu (nu ignored for pure noise).
  const SummaryRow& row(KernelKind k, double nu = kInfiniteNu) const {
    for (const auto& r : summary)
      if (r.kernel == k && (k == KernelKind::PureNoise || r.nu == nu)) return r;
    throw InvalidInput(std::string("no summary row for ") + to_string(k));
  }
};

/// Base spec for fitting: unit parameters, nu set, A = I.
inline KernelSpec base_spec(KernelKind kind, double nu, int lmax) {
  KernelSpec s;
  s.kind = kind;
  s.params.nu = nu;
  s.lmax = lmax;
  return s;
}

namespace detail {

inline std::string grid_name(KernelKind k, double nu, std::uint64_t seed) {
  std::string n = std::string("grid_") + to_string(k);
  if (k != KernelKind::PureNoise) n += "_nu" + nu_to_string(nu);
  return n + "_seed" + std::to_string(seed) + ".csv";
}

/// Predictive mean (east, north) and sqrt of the trace of the predictive
/// covariance on a regular latitude-longitude grid, poles included, in the
/// units of the unscaled data.
inline void write_grid(const std::filesystem::path& path, const PosteriorModel<SphereKernel>& model, double scale,
                       int n_lat, int n_lon) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "lon_deg,lat_deg,mean_east,mean_north,std_trace\n";
  std::vector<SpherePoint> q;
  std::vector<std::pair<double, double>> ll;
  for (int i = 0; i < n_lat; ++i)
    for (int j = 0; j < n_lon; ++j) {
      const double lat = -90.0 + 180.0 * i / (n_lat - 1);
      const double lon = -180.0 + 360.0 * j / n_lon;
      q.push_back(lonlat_to_point(lon, lat));
      ll.emplace_back(lon, lat);
    }
  const auto preds = model.predict(q);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Vec3 m = project_tangent(preds[i].point, preds[i].mean) / scale;
    const auto [u, v] = east_north_components(TangentVector{preds[i].point, m});
    const double sd = std::sqrt(std::max(0.0, preds[i].cov.trace())) / scale;
    out << format_double(ll[i].first, 10) << ',' << format_double(ll[i].second, 10) << ',' << format_double(u, 10)
        << ',' << format_double(v, 10) << ',' << format_double(sd, 10) << '\n';
  }
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
}

}  // namespace detail

/// Fits, predicts and scores one (kernel, nu) on one split. The model is
/// fitted on training data scaled to unit mean norm; predictions are mapped
/// back by the same factor and scored in the units of the input data.
inline CellResult run_cell(const ExperimentConfig& cfg, const Split& split, KernelKind kind, double nu,
                           std::uint64_t seed, std::ostream* log = nullptr) {
  CellResult c;
  c.kernel = kind;
  c.nu = kind == KernelKind::PureNoise ? std::numeric_limits<double>::quiet_NaN() : nu;
  c.seed = seed;
  try {
    const auto [s, train] = normalize_dataset(split.train);
    double msq = 0.0;
    for (const auto& v : split.test.values) msq += v.squaredNorm();
    c.scale = s;
    c.test_mean_sq_norm = msq / static_cast<double>(split.test.size());

    FitConfig fc;
    fc.restarts = cfg.restarts;
    fc.max_iterations = cfg.max_iterations;
    fc.seed = seed;
    fc.frozen_kappa = cfg.frozen_kappa;
    const KernelSpec base = base_spec(kind, kind == KernelKind::PureNoise ? 0.5 : nu, cfg.lmax);
    const FitResult fr = fit<SphereKernel>(train, base, fc);
    c.fitted = fr.spec;
    c.log_likelihood = fr.log_likelihood;
    const auto model = condition(SphereKernel(fr.spec), train);
    auto preds = model.predict(split.test.points);
    for (auto& p : preds) {
      p.mean /= s;
      p.cov /= s * s;
    }
    const Metrics m = metrics(preds, split.test.values, fr.spec.params.noise_variance / (s * s));
    c.mse = m.mse;
    c.pnll = m.pnll;
    if (!std::isfinite(c.mse) || !std::isfinite(c.pnll)) throw NumericalFailure("non-finite metrics");
    c.ok = true;
    if (cfg.write_grids && !cfg.out_dir.empty())
      detail::write_grid(cfg.out_dir / detail::grid_name(kind, nu, seed), model, s, cfg.grid_lat, cfg.grid_lon);
  } catch (const std::exception& e) {
    c.ok = false;
    c.error = e.what();
    c.mse = c.pnll = c.log_likelihood = std::numeric_limits<double>::quiet_NaN();
    if (log) *log << "cell " << to_string(kind) << " nu=" << nu_to_string(c.nu) << " seed=" << seed
                  << " failed: " << e.what() << '\n';
  }
  return c;
}

inline std::vector<SummaryRow> summarize(const std::vector<CellResult>& cells) {
  std::vector<SummaryRow> out;
  auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  for (const auto& c : cells) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& r) { return r.kernel == c.kernel && same(r.nu, c.nu); });
    if (it == out.end()) {
      out.push_back({});
      it = out.end() - 1;
      it->kernel = c.kernel;
      it->nu = c.nu;
    }
  }
  for (auto& r : out) {
    std::vector<double> mse, pnll;
    for (const auto& c : cells) {
      if (c.kernel != r.kernel || !same(c.nu, r.nu)) continue;
      if (c.ok) {
        mse.push_back(c.mse);
        pnll.push_back(c.pnll);
      } else {
        ++r.n_failed;
      }
    }
    r.n_ok = mse.size();
    std::tie(r.mse_mean, r.mse_std) = detail::mean_std(mse);
    std::tie(r.pnll_mean, r.pnll_std) = detail::mean_std(pnll);
  }
  return out;
}

inline void write_results_csv(std::ostream& out, const ExperimentResult& r) {
  using detail::format_double;
  out << "config_hash,version,kernel,nu,seed,status,kappa,variance,kappa_div,variance_div,kappa_curl,variance_curl,"
         "noise_variance,log_likelihood,mse,pnll,scale\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : r.cells) {
    const KernelSpec& f = c.fitted;
    const bool comp = c.kernel == KernelKind::HodgeCompositional;
    const bool has_kv = c.ok && !comp && c.kernel != KernelKind::PureNoise;
    out << r.config_hash << ',' << kVersion << ',' << to_string(c.kernel) << ',' << nu_to_string(c.nu) << ','
        << c.seed << ',' << (c.ok ? "ok" : "failed") << ',' << format_double(has_kv ? f.params.kappa : nan, 10) << ','
        << format_double(has_kv ? f.params.variance : nan, 10) << ','
        << format_double(c.ok && comp ? f.div.kappa : nan, 10) << ','
        << format_double(c.ok && comp ? f.div.variance : nan, 10) << ','
        << format_double(c.ok && comp ? f.curl.kappa : nan, 10) << ','
        << format_double(c.ok && comp ? f.curl.variance : nan, 10) << ','
        << format_double(c.ok ? f.params.noise_variance : nan, 10) << ',' << format_double(c.log_likelihood, 10)
        << ',' << format_double(c.mse, 10) << ',' << format_double(c.pnll, 10) << ',' << format_double(c.scale, 10)
        << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const ExperimentResult& r) {
  using detail::format_double;
  out << "config_hash,version,kernel,nu,n_ok,n_failed,mse_mean,mse_std,pnll_mean,pnll_std\n";
  for (const auto& s : r.summary)
    out << r.config_hash << ',' << kVersion << ',' << to_string(s.kernel) << ',' << nu_to_string(s.nu) << ','
        << s.n_ok << ',' << s.n_failed << ',' << format_double(s.mse_mean, 10) << ','
        << format_double(s.mse_std, 10) << ',' << format_double(s.pnll_mean, 10) << ','
        << format_double(s.pnll_std, 10) << '\n';
}

/// Runs every (kernel, nu, seed) cell. Pure noise ignores nu and runs once
/// per seed. All kernels see the same split for a given seed. Failed cells
/// are kept with NaN metrics. Rows are ordered by kernel list, nu list,
/// then seed list, so output is deterministic.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  ExperimentResult res;
  res.config_hash = cfg.hash();
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

  std::map<std::uint64_t, Split> splits;
  for (auto seed : cfg.seeds) {
    splits.emplace(seed, make_split(cfg, seed));
    if (log) *log << "seed " << seed << ": " << splits.at(seed).train.size() << " train, "
                  << splits.at(seed).test.size() << " test\n";
  }
  for (KernelKind k : cfg.kernels) {
    const std::vector<double> nus = k == KernelKind::PureNoise ? std::vector<double>{cfg.nus.front()} : cfg.nus;
    for (double nu : nus)
      for (auto seed : cfg.seeds) {
        res.cells.push_back(run_cell(cfg, splits.at(seed), k, nu, seed, log));
        const auto& c = res.cells.back();
        if (log && c.ok) *log << to_string(k) << " nu=" << nu_to_string(c.nu) << " seed=" << seed
                              << " mse=" << detail::format_double(c.mse, 6) << " pnll="
                              << detail::format_double(c.pnll, 6) << '\n';
      }
  }
  res.summary = summarize(res.cells);

  if (!cfg.out_dir.empty()) {
    std::ofstream rc(cfg.out_dir / "results.csv");
    std::ofstream sc(cfg.out_dir / "summary.csv");
    if (!rc || !sc) throw InvalidInput("cannot write results under " + cfg.out_dir.string());
    write_results_csv(rc, res);
    write_summary_csv(sc, res);
  }
  return res;
}

}  // namespace hodge
