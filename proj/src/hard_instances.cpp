#include "gpbandit/hard_instances.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace gpb {

using nlohmann::json;

std::string to_string(ClassKind k) {
  switch (k) {
    case ClassKind::StandardSE: return "standard_se";
    case ClassKind::StandardMatern: return "standard_matern";
    case ClassKind::SimplifiedMatern: return "simplified_matern";
    case ClassKind::FinalPointRobust: return "final_point_robust";
  }
  return "?";
}

ClassKind class_kind_from_string(const std::string& s) {
  if (s == "standard_se") return ClassKind::StandardSE;
  if (s == "standard_matern") return ClassKind::StandardMatern;
  if (s == "simplified_matern") return ClassKind::SimplifiedMatern;
  if (s == "final_point_robust") return ClassKind::FinalPointRobust;
  throw ConfigError("unknown class kind: " + s);
}

int HardClass::regions() const {
  int n = 1;
  for (const auto& b : axis_bounds) n *= static_cast<int>(b.size()) - 1;
  return n;
}

int HardClass::M() const {
  return members_total() - (kind == ClassKind::FinalPointRobust ? 1 : 0);
}

int HardClass::member_index(int m) const {
  return m + (kind == ClassKind::FinalPointRobust ? 1 : 0);
}

Region HardClass::region(int j) const {
  Region rg;
  rg.lo = Vec(dim);
  rg.hi = Vec(dim);
  int rem = j;
  for (int ax = dim - 1; ax >= 0; --ax) {
    int cells = static_cast<int>(axis_bounds[ax].size()) - 1;
    int i = rem % cells;
    rem /= cells;
    rg.lo(ax) = axis_bounds[ax][i];
    rg.hi(ax) = axis_bounds[ax][i + 1];
  }
  return rg;
}

Vec HardClass::region_center(int j) const {
  Region rg = region(j);
  return 0.5 * (rg.lo + rg.hi);
}

double HardClass::member_peak_value(int members_idx) const {
  (void)members_idx;
  return kind == ClassKind::FinalPointRobust ? 0.0 : 2.0 * epsilon;
}

long long packed_cell_count(double w, int d) {
  require_config(w > 0, "width must be positive");
  return static_cast<long long>(std::floor(std::pow(1.0 / w, d)));
}

double matern_width(double eps, double kappa, double B, double nu) {
  require_config(eps > 0 && kappa > 0 && B > 0 && nu > 0,
                 "width formula parameters must be positive");
  return std::pow(2.0 * eps * kappa / B, 1.0 / nu);
}

namespace {

int default_cert_res(int d, const BuildOptions& opts) {
  if (opts.cert_grid_per_axis > 0) return opts.cert_grid_per_axis;
  if (d == 1) return 512;
  if (d == 2) return 40;
  return 16;
}

std::vector<double> batch_certificates(const Kernel& k,
                                       const std::vector<FunctionInstance>& fns,
                                       const Mat& grid) {
  auto [L, jit] = cholesky_with_jitter(kernel_matrix(k, grid));
  (void)jit;
  const int n = static_cast<int>(grid.rows());
  std::vector<double> certs;
  certs.reserve(fns.size());
  Vec v(n);
  for (const auto& f : fns) {
    for (int i = 0; i < n; ++i) v(i) = f(grid.row(i).transpose());
    certs.push_back(L.triangularView<Eigen::Lower>().solve(v).norm());
  }
  return certs;
}

void admit_members(std::vector<FunctionInstance>& fns, const Kernel& k,
                   const Mat& grid, double budget, const char* what) {
  auto certs = batch_certificates(k, fns, grid);
  for (std::size_t i = 0; i < fns.size(); ++i) {
    fns[i].norm_certificate = certs[i];
    if (certs[i] > budget * (1.0 + 1e-9))
      throw ConfigError(std::string(what) +
                        " certificate exceeds its norm budget: " +
                        std::to_string(certs[i]) + " > " +
                        std::to_string(budget));
  }
}

std::vector<Vec> grid_centers(int d, int per_axis) {
  long n = 1;
  for (int i = 0; i < d; ++i) n *= per_axis;
  std::vector<Vec> out;
  out.reserve(n);
  for (long idx = 0; idx < n; ++idx) {
    Vec c(d);
    long rem = idx;
    for (int ax = d - 1; ax >= 0; --ax) {
      long i = rem % per_axis;
      rem /= per_axis;
      c(ax) = (static_cast<double>(i) + 0.5) / per_axis;
    }
    out.push_back(c);
  }
  return out;
}

HardClass build_grid_bump_class(ClassKind kind, const Kernel& k, double eps,
                                double B, int d, double kappa,
                                const BuildOptions& opts) {
  require_config(d >= 1 && d <= 3, "class dimension must be in [1, 3]");
  double w = matern_width(eps, kappa, B, k.nu);
  require_config(w < 0.5, "empty class: member width w >= 1/2 (need w << 1)");
  int m_axis = static_cast<int>(std::floor(1.0 / w));
  require_config(m_axis >= 1, "empty class: no member fits the domain");
  double cell = 1.0 / m_axis;

  HardClass cls;
  cls.kind = kind;
  cls.kernel = k;
  cls.epsilon = eps;
  cls.width = w;
  cls.B = B;
  cls.dim = d;
  cls.kappa = kappa;
  cls.axis_bounds.assign(
      d, [&] {
        std::vector<double> b(m_axis + 1);
        for (int i = 0; i <= m_axis; ++i)
          b[i] = static_cast<double>(i) / m_axis;
        return b;
      }());

  for (const Vec& c : grid_centers(d, m_axis)) {
    FunctionInstance f;
    f.shape = Shape::SpatialBump;
    f.center = c;
    f.height = 2.0 * eps;
    f.width = cell / 2.0;  // support confined to the member's own cell
    cls.members.push_back(std::move(f));
  }
  Mat cert_grid = uniform_grid(d, default_cert_res(d, opts));
  admit_members(cls.members, k, cert_grid, opts.admission_fraction * B,
                "class member");
  return cls;
}

}  // namespace

HardClass build_standard_class(const Kernel& k, double eps, double B, int d,
                               double kappa, const BuildOptions& opts) {
  require_config(eps > 0 && B > 0, "eps and B must be positive");
  if (k.family == KernelFamily::Matern)
    return build_grid_bump_class(ClassKind::StandardMatern, k, eps, B, d,
                                 kappa, opts);

  require_config(d >= 1 && d <= 3, "class dimension must be in [1, 3]");
  Mat cert_grid = uniform_grid(d, default_cert_res(d, opts));
  Vec mid = Vec::Constant(d, 0.5);
  double target = 0.95 * opts.admission_fraction * B;
  double a = calibrate_sinc_freq(k, eps, target, mid, cert_grid);
  double spacing = opts.sinc_spacing_factor * kSincHalfLevel / a;
  int m_axis = static_cast<int>(std::floor(1.0 / spacing));
  require_config(m_axis >= 1,
                 "empty class: eps/B too large for the SE construction");
  double cell = 1.0 / m_axis;

  HardClass cls;
  cls.kind = ClassKind::StandardSE;
  cls.kernel = k;
  cls.epsilon = eps;
  cls.width = spacing;
  cls.B = B;
  cls.dim = d;
  cls.kappa = kappa;
  cls.sinc_freq = a;
  cls.axis_bounds.assign(
      d, [&] {
        std::vector<double> b(m_axis + 1);
        for (int i = 0; i <= m_axis; ++i)
          b[i] = static_cast<double>(i) / m_axis;
        return b;
      }());
  (void)cell;
  for (const Vec& c : grid_centers(d, m_axis))
    cls.members.push_back(make_sinc_bump(eps, c, a));
  admit_members(cls.members, k, cert_grid, opts.admission_fraction * B,
                "class member");
  return cls;
}

HardClass build_simplified_matern_class(double nu, double l, double eps,
                                        double B, int d, double kappa,
                                        const BuildOptions& opts) {
  require_config(eps > 0 && B > 0, "eps and B must be positive");
  return build_grid_bump_class(ClassKind::SimplifiedMatern,
                               Kernel::matern(nu, l), eps, B, d, kappa, opts);
}

HardClass build_final_point_class(const Kernel& k, double xi, double eps,
                                  double B, int d, double eta,
                                  const BuildOptions& opts) {
  require_config(xi > 0 && xi < 0.5, "xi must lie in (0, 1/2)");
  require_config(eta > 0 && eta < 0.2, "eta must be a small positive constant");
  require_config(eps > 0 && B > 0, "eps and B must be positive");
  require_config(d >= 1 && d <= 3, "class dimension must be in [1, 3]");
  require_config(k.family == KernelFamily::Matern,
                 "robust class spikes use the Matern width formula");

  const double r_in = (3.0 - eta) * xi / 2.0;  // plateau radius
  const double w0 = xi / 8.0;                  // taper half-width
  require_config(r_in + 2.0 * w0 < std::sqrt(static_cast<double>(d)) / 2.0 - 0.01,
                 "xi too large: plateau and taper do not fit inside the domain");

  // Spike: depth 4 eps (bottom of f_m at -4 eps), width from the bump formula.
  Vec mid = Vec::Constant(d, 0.5);
  FunctionInstance spike_proto = make_matern_bump(2.0 * eps, B, k, mid, opts.kappa);
  const double w_s = spike_proto.width;
  require_config(w_s <= 0.1 * xi,
                 "spike width exceeds a 0.1 fraction of xi; decrease eps or kappa");

  const double rho = r_in - xi;  // radius of the xi-safe plain ball
  require_config(rho > 0, "plain region empty: plateau radius below xi");
  const double pitch = xi / 10.0;  // spike packing lattice pitch
  const double usable = rho - w_s - eta * xi / 2.0;
  require_config(usable >= 0, "no room for spikes inside the plain region");
  const int K = static_cast<int>(std::floor(usable / pitch));
  const int count_axis = 2 * K + 1;

  HardClass cls;
  cls.kind = ClassKind::FinalPointRobust;
  cls.kernel = k;
  cls.epsilon = eps;
  cls.width = w_s;
  cls.B = B;
  cls.dim = d;
  cls.xi = xi;
  cls.eta = eta;
  cls.kappa = opts.kappa;

  FunctionInstance shift;
  shift.shape = Shape::ConstantShift;
  shift.center = mid;
  shift.height = 2.0 * eps;
  shift.sign = -1.0;

  FunctionInstance plateau =
      ball_plateau(r_in + w0, w0, opts.ball_table_resolution);
  plateau.center = mid;
  plateau.height = 2.0 * eps;

  // Certify the three building blocks against B/3 each; members then stay
  // under B by the triangle inequality, and their own certificates are checked
  // against B below.
  Mat cert_grid = uniform_grid(d, default_cert_res(d, opts));
  {
    std::vector<FunctionInstance> parts{shift, plateau, spike_proto};
    admit_members(parts, k, cert_grid, opts.admission_fraction * B,
                  "robust component");
    shift = parts[0];
    plateau = parts[1];
    spike_proto = parts[2];
  }

  FunctionInstance f0;
  f0.shape = Shape::Composite;
  f0.center = mid;
  f0.components = {shift, plateau};
  cls.members.push_back(f0);

  std::vector<double> offsets(count_axis);
  for (int i = 0; i < count_axis; ++i) offsets[i] = (i - K) * pitch;
  for (const Vec& u : grid_centers(d, count_axis)) {
    // Map the unit-cube lattice cell centers onto the spike lattice.
    Vec p(d);
    for (int ax = 0; ax < d; ++ax) {
      int i = static_cast<int>(std::lround(u(ax) * count_axis - 0.5));
      p(ax) = 0.5 + offsets[i];
    }
    FunctionInstance spike = spike_proto;
    spike.center = p;
    spike.sign = -1.0;
    FunctionInstance fm;
    fm.shape = Shape::Composite;
    fm.center = p;
    fm.components = {shift, plateau, spike};
    cls.members.push_back(std::move(fm));
  }
  admit_members(cls.members, k, cert_grid, B, "robust member");

  // Partition: per-axis Voronoi cells of the spike lattice, extended to [0,1].
  cls.axis_bounds.assign(d, [&] {
    std::vector<double> b;
    b.push_back(0.0);
    for (int i = 0; i + 1 < count_axis; ++i)
      b.push_back(0.5 + 0.5 * (offsets[i] + offsets[i + 1]));
    b.push_back(1.0);
    return b;
  }());
  return cls;
}

namespace {

std::vector<double> region_axis_nodes(double lo, double hi, int g) {
  std::vector<double> nodes(g);
  for (int i = 0; i < g; ++i)
    nodes[i] = lo + (hi - lo) * static_cast<double>(i) / (g - 1);
  double mid = 0.5 * (lo + hi);
  bool has_mid = false;
  for (double v : nodes)
    if (v == mid) has_mid = true;
  if (!has_mid) nodes.push_back(mid);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

double region_abs_max(const FunctionInstance& f, const Region& rg, int g) {
  const int d = static_cast<int>(rg.lo.size());
  std::vector<std::vector<double>> nodes(d);
  for (int ax = 0; ax < d; ++ax)
    nodes[ax] = region_axis_nodes(rg.lo(ax), rg.hi(ax), g);
  std::vector<int> idx(d, 0);
  Vec x(d);
  double best = 0.0;
  while (true) {
    for (int ax = 0; ax < d; ++ax) x(ax) = nodes[ax][idx[ax]];
    best = std::max(best, std::abs(f(x)));
    int ax = d - 1;
    while (ax >= 0) {
      if (++idx[ax] < static_cast<int>(nodes[ax].size())) break;
      idx[ax] = 0;
      --ax;
    }
    if (ax < 0) break;
  }
  return best;
}

}  // namespace

Mat vbar_table(const HardClass& cls, int grid_per_region) {
  require_config(grid_per_region >= 16,
                 "region sub-grid needs at least 16 points per axis");
  const int M = cls.M();
  Mat tab(M, M);
  for (int m = 0; m < M; ++m) {
    const FunctionInstance& f = cls.members[cls.member_index(m)];
    for (int j = 0; j < M; ++j)
      tab(m, j) = region_abs_max(f, cls.region(j), grid_per_region);
  }
  return tab;
}

Mat kl_table(const HardClass& cls, double noise_var, int grid_per_region) {
  require_config(noise_var > 0,
                 "KL table undefined at zero noise variance; noiseless runs bypass it");
  Mat v = vbar_table(cls, grid_per_region);
  return (v.array().square() / (2.0 * noise_var)).matrix();
}

namespace {

Mat axes_product(const std::vector<std::vector<double>>& axes) {
  const int d = static_cast<int>(axes.size());
  long long n = 1;
  for (const auto& a : axes) n *= static_cast<long long>(a.size());
  Mat g(n, d);
  std::vector<int> id(d, 0);
  for (long long r = 0; r < n; ++r) {
    for (int ax = 0; ax < d; ++ax) g(r, ax) = axes[ax][id[ax]];
    for (int ax = d - 1; ax >= 0; --ax) {
      if (++id[ax] < static_cast<int>(axes[ax].size())) break;
      id[ax] = 0;
    }
  }
  return g;
}

std::vector<int> decode_cell(long long ordinal, int m_axis, int d) {
  std::vector<int> cell(d);
  for (int ax = d - 1; ax >= 0; --ax) {
    cell[ax] = static_cast<int>(ordinal % m_axis);
    ordinal /= m_axis;
  }
  return cell;
}

}  // namespace

Vec certificates_on_lattice(const HardClass& cls, int per_axis) {
  require_config(per_axis >= 2,
                 "certificate lattice needs at least 2 points per axis");
  const int d = cls.dim;
  const int n_members = static_cast<int>(cls.members.size());
  Vec out(n_members);
  const bool compact = cls.kind == ClassKind::StandardMatern ||
                       cls.kind == ClassKind::SimplifiedMatern;
  if (d == 1 || !compact) {
    require_config(std::pow(static_cast<double>(per_axis), d) <= 20000.0,
                   "certificate lattice too large for a dense solve");
    auto certs =
        batch_certificates(cls.kernel, cls.members, uniform_grid(d, per_axis));
    for (int i = 0; i < n_members; ++i) out(i) = certs[i];
    return out;
  }
  const int m_axis = static_cast<int>(cls.axis_bounds[0].size()) - 1;
  auto cell_axis_points = [&](int cell) {
    std::vector<double> pts;
    for (int j = 0; j < per_axis; ++j) {
      double x = (j + 0.5) / per_axis;
      if (x >= static_cast<double>(cell) / m_axis &&
          x < static_cast<double>(cell + 1) / m_axis)
        pts.push_back(x);
    }
    return pts;
  };
  if (per_axis % m_axis == 0) {
    const int p = per_axis / m_axis;
    require_config(std::pow(static_cast<double>(p), d) <= 20000.0,
                   "certificate cell lattice too large for a dense solve");
    std::vector<std::vector<double>> axes(d, cell_axis_points(0));
    Mat base = axes_product(axes);
    auto [L, jit] = cholesky_with_jitter(kernel_matrix(cls.kernel, base));
    (void)jit;
    const long long n = base.rows();
    Vec v(n), x(d);
    for (int i = 0; i < n_members; ++i) {
      auto cell = decode_cell(i, m_axis, d);
      for (long long r = 0; r < n; ++r) {
        for (int ax = 0; ax < d; ++ax)
          x(ax) = base(r, ax) + static_cast<double>(cell[ax]) / m_axis;
        v(r) = cls.members[i](x);
      }
      out(i) = L.triangularView<Eigen::Lower>().solve(v).norm();
    }
    return out;
  }
  for (int i = 0; i < n_members; ++i) {
    auto cell = decode_cell(i, m_axis, d);
    std::vector<std::vector<double>> axes(d);
    for (int ax = 0; ax < d; ++ax) axes[ax] = cell_axis_points(cell[ax]);
    Mat grid = axes_product(axes);
    require_config(grid.rows() <= 20000,
                   "certificate cell lattice too large for a dense solve");
    out(i) =
        batch_certificates(cls.kernel, {cls.members[i]}, grid)[0];
  }
  return out;
}

int region_of(const HardClass& cls, const Vec& x) {
  require_config(x.size() == cls.dim, "point dimension mismatch");
  int idx = 0;
  for (int ax = 0; ax < cls.dim; ++ax) {
    const auto& b = cls.axis_bounds[ax];
    double a = x(ax);
    require_config(a >= b.front() && a <= b.back(),
                   "point outside the domain [0,1]^d");
    auto it = std::lower_bound(b.begin(), b.end(), a);
    int i = static_cast<int>(it - b.begin());
    int cell = (i == 0) ? 0 : i - 1;  // boundary points go to the lower cell
    cell = std::min(cell, static_cast<int>(b.size()) - 2);
    idx = idx * (static_cast<int>(b.size()) - 1) + cell;
  }
  return idx;
}

namespace {

json instance_to_json(const FunctionInstance& f) {
  json j;
  switch (f.shape) {
    case Shape::SpatialBump: j["shape"] = "spatial_bump"; break;
    case Shape::SEBump: j["shape"] = "se_bump"; break;
    case Shape::SincBump: j["shape"] = "sinc_bump"; break;
    case Shape::BallPlateau: j["shape"] = "ball_plateau"; break;
    case Shape::ConstantShift: j["shape"] = "constant_shift"; break;
    case Shape::Composite: j["shape"] = "composite"; break;
  }
  j["center"] = std::vector<double>(f.center.data(),
                                    f.center.data() + f.center.size());
  j["height"] = f.height;
  j["width"] = f.width;
  j["sign"] = f.sign;
  j["freq"] = f.freq;
  j["r"] = f.r;
  j["w0"] = f.w0;
  j["norm_certificate"] = f.norm_certificate;
  if (!f.taper_table.empty()) j["taper_table"] = f.taper_table;
  if (!f.components.empty()) {
    json comps = json::array();
    for (const auto& c : f.components) comps.push_back(instance_to_json(c));
    j["components"] = comps;
  }
  return j;
}

FunctionInstance instance_from_json(const json& j) {
  FunctionInstance f;
  std::string s = j.at("shape");
  if (s == "spatial_bump") f.shape = Shape::SpatialBump;
  else if (s == "se_bump") f.shape = Shape::SEBump;
  else if (s == "sinc_bump") f.shape = Shape::SincBump;
  else if (s == "ball_plateau") f.shape = Shape::BallPlateau;
  else if (s == "constant_shift") f.shape = Shape::ConstantShift;
  else if (s == "composite") f.shape = Shape::Composite;
  else throw ConfigError("unknown shape in manifest: " + s);
  std::vector<double> c = j.at("center");
  f.center = Eigen::Map<Vec>(c.data(), c.size());
  f.height = j.at("height");
  f.width = j.at("width");
  f.sign = j.at("sign");
  f.freq = j.at("freq");
  f.r = j.at("r");
  f.w0 = j.at("w0");
  f.norm_certificate = j.at("norm_certificate");
  if (j.contains("taper_table"))
    f.taper_table = j.at("taper_table").get<std::vector<double>>();
  if (j.contains("components"))
    for (const auto& cj : j.at("components"))
      f.components.push_back(instance_from_json(cj));
  return f;
}

}  // namespace

std::string to_manifest(const HardClass& cls) {
  json j;
  j["kind"] = to_string(cls.kind);
  j["kernel"]["family"] =
      cls.kernel.family == KernelFamily::SE ? "se" : "matern";
  j["kernel"]["lengthscale"] = cls.kernel.lengthscale;
  j["kernel"]["nu"] = cls.kernel.nu;
  j["epsilon"] = cls.epsilon;
  j["width"] = cls.width;
  j["B"] = cls.B;
  j["dim"] = cls.dim;
  j["xi"] = cls.xi;
  j["eta"] = cls.eta;
  j["kappa"] = cls.kappa;
  j["sinc_freq"] = cls.sinc_freq;
  j["axis_bounds"] = cls.axis_bounds;
  json mem = json::array();
  for (const auto& f : cls.members) mem.push_back(instance_to_json(f));
  j["members"] = mem;
  return j.dump(2);
}

HardClass from_manifest(const std::string& text) {
  json j = json::parse(text);
  HardClass cls;
  cls.kind = class_kind_from_string(j.at("kind"));
  std::string fam = j.at("kernel").at("family");
  double l = j.at("kernel").at("lengthscale");
  double nu = j.at("kernel").at("nu");
  cls.kernel = fam == "se" ? Kernel::se(l) : Kernel::matern(nu, l);
  cls.epsilon = j.at("epsilon");
  cls.width = j.at("width");
  cls.B = j.at("B");
  cls.dim = j.at("dim");
  cls.xi = j.at("xi");
  cls.eta = j.at("eta");
  cls.kappa = j.at("kappa");
  cls.sinc_freq = j.at("sinc_freq");
  cls.axis_bounds = j.at("axis_bounds").get<std::vector<std::vector<double>>>();
  for (const auto& mj : j.at("members"))
    cls.members.push_back(instance_from_json(mj));
  return cls;
}

}  // namespace gpb
