#pragma once

#include <string>
#include <vector>

#include "gpbandit/rkhs.hpp"

namespace gpb {

enum class ClassKind { StandardSE, StandardMatern, SimplifiedMatern, FinalPointRobust };

std::string to_string(ClassKind k);
ClassKind class_kind_from_string(const std::string& s);

struct Region {
  Vec lo, hi;
};

// Build-time tunables shared by the class builders. Defaults match the shipped
// configs; everything here is recorded in manifests.
struct BuildOptions {
  int cert_grid_per_axis = 0;      // 0: 512 for d=1, 40 for d=2, 16 for d=3
  double admission_fraction = 1.0 / 3.0;  // per-instance certificate budget, x B
  double sinc_spacing_factor = 2.2;       // spacing in units of half-level width
  double kappa = 1.0;              // robust-class spike width constant
  int ball_table_resolution = 512;
};

class HardClass {
 public:
  ClassKind kind = ClassKind::SimplifiedMatern;
  Kernel kernel;
  std::vector<FunctionInstance> members;  // robust: index 0 is the spike-free f0
  double epsilon = 0;
  double width = 0;   // member grid spacing (standard kinds) or spike width (robust)
  double B = 1;
  int dim = 1;
  double xi = 0;
  double eta = 0;
  double kappa = 0;
  double sinc_freq = 0;  // StandardSE only

  // Partition of [0,1]^d into an axis-aligned grid of cells; per-axis cell
  // boundaries (size cells_per_axis + 1, starting at 0 and ending at 1).
  std::vector<std::vector<double>> axis_bounds;

  int regions() const;
  int members_total() const { return static_cast<int>(members.size()); }
  // Number of "hard" members: excludes the robust class's f0.
  int M() const;
  // Index into members for hard member m in [0, M).
  int member_index(int m) const;
  Region region(int j) const;
  Vec region_center(int j) const;
  // Analytic maximum of member m over the domain (2eps for standard kinds,
  // 0 for the robust class).
  double member_peak_value(int members_idx) const;
};

// Dispatches on kernel family: SE -> squared-sinc members with an internally
// calibrated frequency; Matern -> compact bumps on a width-w grid.
HardClass build_standard_class(const Kernel& k, double eps, double B, int d,
                               double kappa, const BuildOptions& opts = {});

// Compact bumps confined to their own cells; supports pairwise disjoint.
HardClass build_simplified_matern_class(double nu, double l, double eps,
                                        double B, int d, double kappa,
                                        const BuildOptions& opts = {});

// f0 = -c + b (constant shift + ball plateau), f_m = f0 - s_m with a downward
// spike of depth 4eps at the m-th packing center inside the plain region.
HardClass build_final_point_class(const Kernel& k, double xi, double eps,
                                  double B, int d, double eta,
                                  const BuildOptions& opts = {});

// vbar[m][j] = max over a sub-grid of region j of |f_m| (hard members only).
// The sub-grid is an inclusive lattice plus the region center, so member
// peaks that sit at region centers are captured exactly.
Mat vbar_table(const HardClass& cls, int grid_per_region);

// kl[m][j] = vbar[m][j]^2 / (2 noise_var).
Mat kl_table(const HardClass& cls, double noise_var, int grid_per_region);

// Index of the partition cell containing x; boundary points go to the
// lower-index cell.
int region_of(const HardClass& cls, const Vec& x);

// Per-member norm certificates on a per_axis^d evaluation lattice.  In one
// dimension this is a single interpolation system over the full inclusive
// lattice.  In higher dimensions, compact-support classes are certified on
// the cell-centered lattice points inside each member's own cell, which
// keeps the linear systems tractable and shares one factorization whenever
// per_axis is a multiple of the cell count per axis.
Vec certificates_on_lattice(const HardClass& cls, int per_axis);

// floor((1/w)^d); the class builders use per-axis flooring so the partition
// stays a grid, which coincides with this for every shipped configuration.
long long packed_cell_count(double w, int d);

// (2 eps kappa / B)^(1/nu)
double matern_width(double eps, double kappa, double B, double nu);

// Manifest round-trip (bit-exact parameters; doubles serialize shortest-round-trip).
std::string to_manifest(const HardClass& cls);
HardClass from_manifest(const std::string& text);

}  // namespace gpb
