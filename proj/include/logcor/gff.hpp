#pragma once

// Discrete two-dimensional Gaussian free field with zero Dirichlet boundary.
//
// Conventions: interior sites of a BoxRegion are (x0..x0+width-1) x
// (y0..y0+height-1); site values are stored row-major (index y*width + x
// relative to the origin). The Laplacian is the averaged one,
// (-Lap f)(v) = f(v) - (1/4) sum_{w~v} f(w), so the Green function is the
// expected number of visits of simple random walk before exit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "logcor/binary_io.hpp"
#include "logcor/errors.hpp"
#include "logcor/rng.hpp"

namespace logcor::gff {

inline constexpr std::size_t kMaxGreenSites = std::size_t{1} << 14;
inline constexpr std::size_t kMaxSpectralSites = std::size_t{1} << 20;
inline constexpr std::size_t kMaxDenseSamplerSites = std::size_t{1} << 12;

struct Site {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Site, Site) = default;
};

inline double distance(Site a, Site b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct BoxRegion {
  int width = 1;
  int height = 1;
  int x0 = 0;
  int y0 = 0;

  void validate() const {
    detail::require(width >= 1 && height >= 1, "BoxRegion: width and height must be at least 1");
  }
  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  int x_end() const { return x0 + width; }
  int y_end() const { return y0 + height; }

  bool contains(Site s) const { return s.x >= x0 && s.x < x_end() && s.y >= y0 && s.y < y_end(); }
  bool contains(const BoxRegion& b) const {
    return b.x0 >= x0 && b.y0 >= y0 && b.x_end() <= x_end() && b.y_end() <= y_end();
  }
  std::size_t index(Site s) const {
    return static_cast<std::size_t>(s.y - y0) * static_cast<std::size_t>(width) + static_cast<std::size_t>(s.x - x0);
  }
  Site site(std::size_t i) const {
    return {x0 + static_cast<int>(i % static_cast<std::size_t>(width)), y0 + static_cast<int>(i / static_cast<std::size_t>(width))};
  }
  Site center() const { return {x0 + (width - 1) / 2, y0 + (height - 1) / 2}; }

  /// Sites outside the box sharing an edge with it (the ring without corners).
  std::vector<Site> boundary() const {
    std::vector<Site> out;
    out.reserve(2 * static_cast<std::size_t>(width + height));
    for (int x = x0; x < x_end(); ++x) out.push_back({x, y0 - 1});
    for (int x = x0; x < x_end(); ++x) out.push_back({x, y_end()});
    for (int y = y0; y < y_end(); ++y) out.push_back({x0 - 1, y});
    for (int y = y0; y < y_end(); ++y) out.push_back({x_end(), y});
    return out;
  }

  /// Interior neighbor of a boundary site (unique for sites of boundary()).
  Site inner_neighbor(Site u) const {
    if (u.y == y0 - 1) return {u.x, y0};
    if (u.y == y_end()) return {u.x, y_end() - 1};
    if (u.x == x0 - 1) return {x0, u.y};
    return {x_end() - 1, u.y};
  }

  std::optional<BoxRegion> intersect(const BoxRegion& o) const {
    const int ax = std::max(x0, o.x0), bx = std::min(x_end(), o.x_end());
    const int ay = std::max(y0, o.y0), by = std::min(y_end(), o.y_end());
    if (ax >= bx || ay >= by) return std::nullopt;
    return BoxRegion{bx - ax, by - ay, ax, ay};
  }

  friend bool operator==(const BoxRegion&, const BoxRegion&) = default;
};

/// Applies the averaged Dirichlet operator (-Lap) to a function on the box.
inline Eigen::VectorXd apply_neg_laplacian(const BoxRegion& box, const Eigen::VectorXd& f) {
  Eigen::VectorXd out(f.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site s = box.site(i);
    double nb = 0.0;
    for (Site w : {Site{s.x - 1, s.y}, Site{s.x + 1, s.y}, Site{s.x, s.y - 1}, Site{s.x, s.y + 1}})
      if (box.contains(w)) nb += f[static_cast<Eigen::Index>(box.index(w))];
    out[static_cast<Eigen::Index>(i)] = f[static_cast<Eigen::Index>(i)] - 0.25 * nb;
  }
  return out;
}

/// Dense matrix of the averaged Dirichlet operator.
inline Eigen::MatrixXd neg_laplacian_matrix(const BoxRegion& box) {
  const auto n = static_cast<Eigen::Index>(box.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site s = box.site(i);
    for (Site w : {Site{s.x - 1, s.y}, Site{s.x + 1, s.y}, Site{s.x, s.y - 1}, Site{s.x, s.y + 1}})
      if (box.contains(w)) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(box.index(w))) = -0.25;
  }
  return a;
}

/// Dirichlet Green function G = (-Lap)^{-1} on the interior of a box.
class GreenMatrix {
 public:
  GreenMatrix(BoxRegion box, Eigen::MatrixXd g) : box_(box), g_(std::move(g)) {}

  const BoxRegion& box() const { return box_; }
  const Eigen::MatrixXd& matrix() const { return g_; }
  double operator()(Site a, Site b) const {
    return g_(static_cast<Eigen::Index>(box_.index(a)), static_cast<Eigen::Index>(box_.index(b)));
  }

  /// Lower triangle as text: a "width height" line, then row i holding
  /// G(i, 0..i) in %.17g.
  void write_triangular(std::ostream& os) const {
    const auto prec = os.precision(17);
    os << box_.width << ' ' << box_.height << '\n';
    for (Eigen::Index i = 0; i < g_.rows(); ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) os << (j ? " " : "") << g_(i, j);
      os << '\n';
    }
    os.precision(prec);
  }

 private:
  BoxRegion box_;
  Eigen::MatrixXd g_;
};

/// Exact Green matrix by dense Cholesky solve of (-Lap) G = I.
inline GreenMatrix green(const BoxRegion& box) {
  box.validate();
  detail::require_capacity(box.size() <= kMaxGreenSites,
                           "gff::green: more than 2^14 interior sites; use green_row() for spectral queries");
  const Eigen::MatrixXd a = neg_laplacian_matrix(box);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  Eigen::MatrixXd g = llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  g = 0.5 * (g + g.transpose()).eval();
  return {box, std::move(g)};
}

/// Orthonormal Dirichlet sine basis on {1..len}: row j is
/// sqrt(2/(len+1)) sin((j+1)(x+1) pi/(len+1)), with -Lap_1d eigenvalues.
struct SineBasis {
  Eigen::MatrixXd s;
  Eigen::VectorXd cosines;  ///< cos((j+1) pi / (len+1))

  explicit SineBasis(int len) : s(len, len), cosines(len) {
    const double h = std::numbers::pi / (len + 1);
    const double norm = std::sqrt(2.0 / (len + 1));
    for (int j = 0; j < len; ++j) {
      cosines[j] = std::cos((j + 1) * h);
      for (int x = 0; x < len; ++x) s(j, x) = norm * std::sin(static_cast<double>((j + 1) * (x + 1) % (2 * (len + 1))) * h);
    }
  }
};

/// One field realization; the Dirichlet boundary is identically zero.
struct GffSample {
  BoxRegion box;
  std::uint64_t seed = 0;
  std::vector<double> values;

  /// Field value at any lattice site: 0 outside the interior.
  double at(Site s) const { return box.contains(s) ? values[box.index(s)] : 0.0; }

  /// Row-major dump: width, height, seed (u64 each), then the values.
  void write_dump(std::ostream& os) const {
    io::put_u64(os, static_cast<std::uint64_t>(box.width));
    io::put_u64(os, static_cast<std::uint64_t>(box.height));
    io::put_u64(os, seed);
    for (double v : values) io::put_f64(os, v);
  }

  static GffSample read_dump(std::istream& is) {
    GffSample f;
    f.box.width = static_cast<int>(io::get_u64(is));
    f.box.height = static_cast<int>(io::get_u64(is));
    f.seed = io::get_u64(is);
    f.box.validate();
    f.values.resize(f.box.size());
    for (auto& v : f.values) v = io::get_f64(is);
    return f;
  }
};

/// Exact sampler in the sine eigenbasis of the Dirichlet operator:
/// X = sum_{jk} phi_jk xi_jk / sqrt(lambda_jk), lambda_jk = 1 - (cos a_j + cos b_k)/2.
class SpectralSampler {
 public:
  explicit SpectralSampler(BoxRegion box) : box_(box), bx_(box.width), by_(box.height) {
    box_.validate();
    detail::require_capacity(box_.size() <= kMaxSpectralSites, "gff::SpectralSampler: more than 2^20 sites");
    scale_.resize(box.width, box.height);
    for (int j = 0; j < box.width; ++j)
      for (int k = 0; k < box.height; ++k)
        scale_(j, k) = 1.0 / std::sqrt(1.0 - 0.5 * (bx_.cosines[j] + by_.cosines[k]));
  }

  const BoxRegion& box() const { return box_; }

  GffSample sample(std::uint64_t seed) const {
    CounterRng rng(seed, 0);
    Eigen::MatrixXd coef(box_.width, box_.height);
    for (Eigen::Index k = 0; k < coef.cols(); ++k)
      for (Eigen::Index j = 0; j < coef.rows(); ++j) coef(j, k) = standard_normal(rng) * scale_(j, k);
    // field(x, y) = sum_jk Sx(j, x) coef(j, k) Sy(k, y); column-major (x, y) is row-major by site.
    const Eigen::MatrixXd field = bx_.s.transpose() * coef * by_.s;
    return {box_, seed, std::vector<double>(field.data(), field.data() + field.size())};
  }

  /// Covariance of the sampler assembled mode by mode (no randomness).
  Eigen::MatrixXd covariance() const {
    detail::require_capacity(box_.size() <= kMaxDenseSamplerSites, "gff::SpectralSampler::covariance: box too large");
    const auto n = static_cast<Eigen::Index>(box_.size());
    Eigen::MatrixXd phi(n, n);  // column m = eigenvector of mode m, scaled by lambda^{-1/2}
    for (int j = 0; j < box_.width; ++j)
      for (int k = 0; k < box_.height; ++k) {
        const Eigen::Index m = j + static_cast<Eigen::Index>(k) * box_.width;
        for (int y = 0; y < box_.height; ++y)
          for (int x = 0; x < box_.width; ++x)
            phi(x + static_cast<Eigen::Index>(y) * box_.width, m) = bx_.s(j, x) * by_.s(k, y) * scale_(j, k);
      }
    return phi * phi.transpose();
  }

 private:
  BoxRegion box_;
  SineBasis bx_, by_;
  Eigen::MatrixXd scale_;
};

inline GffSample sample_field(const BoxRegion& box, std::uint64_t seed) {
  return SpectralSampler(box).sample(seed);
}

/// Sampler by Cholesky factorization of a precomputed Green matrix.
class DenseSampler {
 public:
  explicit DenseSampler(const GreenMatrix& g) : box_(g.box()) {
    detail::require_capacity(box_.size() <= kMaxDenseSamplerSites, "gff::DenseSampler: more than 2^12 sites");
    llt_.compute(g.matrix());
    detail::require(llt_.info() == Eigen::Success, "gff::DenseSampler: Green matrix not positive definite");
  }

  GffSample sample(std::uint64_t seed) const {
    CounterRng rng(seed, 0);
    Eigen::VectorXd xi(static_cast<Eigen::Index>(box_.size()));
    for (auto& v : xi) v = standard_normal(rng);
    const Eigen::VectorXd x = llt_.matrixL() * xi;
    return {box_, seed, std::vector<double>(x.data(), x.data() + x.size())};
  }

 private:
  BoxRegion box_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Row G_B(v, .) of the Green function of a rectangle, by the sine expansion.
inline std::vector<double> green_row(const BoxRegion& b, Site v) {
  b.validate();
  detail::require(b.contains(v), "gff::green_row: site outside the box");
  const SineBasis bx(b.width), by(b.height);
  const int vx = v.x - b.x0, vy = v.y - b.y0;
  Eigen::MatrixXd coef(b.width, b.height);
  for (int j = 0; j < b.width; ++j)
    for (int k = 0; k < b.height; ++k)
      coef(j, k) = bx.s(j, vx) * by.s(k, vy) / (1.0 - 0.5 * (bx.cosines[j] + by.cosines[k]));
  const Eigen::MatrixXd row = bx.s.transpose() * coef * by.s;
  return {row.data(), row.data() + row.size()};
}

/// Exit law of simple random walk started at v from the box b.
struct ExitDistribution {
  std::vector<Site> sites;     ///< boundary sites of b
  std::vector<double> weights; ///< p_u(v), same order
};

/// p_u(v) = G_b(v, w_u) / 4, where w_u is the unique neighbor of u inside b.
/// This is the solution of the Dirichlet problem harmonic in b with
/// indicator boundary data at u.
inline ExitDistribution exit_distribution(const BoxRegion& domain, const BoxRegion& b, Site v) {
  domain.validate();
  b.validate();
  detail::require(domain.contains(b), "gff::exit_distribution: region must lie inside the domain");
  detail::require(b.contains(v), "gff::exit_distribution: start site must be interior to the region");
  const std::vector<double> g = green_row(b, v);
  ExitDistribution e;
  e.sites = b.boundary();
  e.weights.reserve(e.sites.size());
  for (Site u : e.sites) e.weights.push_back(0.25 * g[b.index(b.inner_neighbor(u))]);
  return e;
}

inline double harmonic_average(const GffSample& field, const ExitDistribution& e) {
  double acc = 0.0;
  for (std::size_t i = 0; i < e.sites.size(); ++i) acc += e.weights[i] * field.at(e.sites[i]);
  return acc;
}

/// X_v(B) = E[X_v | field on the boundary of B].
inline double harmonic_average(const GffSample& field, const BoxRegion& b, Site v) {
  return harmonic_average(field, exit_distribution(field.box, b, v));
}

/// Square neighborhood [v]_l: side round(2^{(n-l)/2}) centered at v (the
/// extra site of an even side goes to the upper/right), clipped to the domain.
/// [v]_0 is the whole domain.
struct Neighborhood {
  BoxRegion region;
  bool clipped = false;
};

inline Neighborhood neighborhood(const BoxRegion& domain, Site v, int l, int n_scales) {
  detail::require(domain.contains(v), "gff::neighborhood: site outside the domain");
  detail::require(l >= 0 && l <= n_scales, "gff::neighborhood: scale out of range");
  if (l == 0) return {domain, false};
  const int side = std::max(1, static_cast<int>(std::lround(std::exp2(0.5 * (n_scales - l)))));
  const int lo = -(side - 1) / 2;
  const BoxRegion raw{side, side, v.x + lo, v.y + lo};
  const BoxRegion clipped = *raw.intersect(domain);
  return {clipped, !(clipped == raw)};
}

/// Branching scale: the smallest l at which the closures (box plus boundary)
/// of [v]_l and [v']_l are disjoint; n_scales + 1 if they never separate.
inline int branching_scale(const BoxRegion& domain, Site v, Site w, int n_scales) {
  const auto closure_parts = [](const BoxRegion& b) {
    return std::array<BoxRegion, 2>{BoxRegion{b.width + 2, b.height, b.x0 - 1, b.y0},
                                    BoxRegion{b.width, b.height + 2, b.x0, b.y0 - 1}};
  };
  for (int l = 0; l <= n_scales; ++l) {
    const auto a = closure_parts(neighborhood(domain, v, l, n_scales).region);
    const auto b = closure_parts(neighborhood(domain, w, l, n_scales).region);
    bool meet = false;
    for (const auto& p : a)
      for (const auto& q : b) meet = meet || p.intersect(q).has_value();
    if (!meet) return l;
  }
  return n_scales + 1;
}

/// Precomputed exit laws of the nested neighborhoods of one site.
///
/// X_v(l) is the harmonic average over the boundary of [v]_l for l < n and
/// the site value itself for l = n; Y_v(l) = X_v(l) - X_v(l-1).
class IncrementPlan {
 public:
  IncrementPlan(const BoxRegion& domain, Site v, int n_scales) : domain_(domain), site_(v), n_(n_scales) {
    detail::require(n_scales >= 1, "gff::IncrementPlan: need at least one scale");
    detail::require(domain.contains(v), "gff::IncrementPlan: site outside the domain");
    for (int l = 0; l < n_scales; ++l) {
      const Neighborhood nb = neighborhood(domain, v, l, n_scales);
      regions_.push_back(nb.region);
      clipped_.push_back(nb.clipped);
      exits_.push_back(exit_distribution(domain, nb.region, v));
    }
    const Neighborhood last = neighborhood(domain, v, n_scales, n_scales);
    regions_.push_back(last.region);
    clipped_.push_back(last.clipped);
  }

  int scales() const { return n_; }
  Site site() const { return site_; }
  const BoxRegion& region(int l) const { return regions_.at(static_cast<std::size_t>(l)); }
  /// True if [v]_l was cut by the domain boundary.
  bool clipped(int l) const { return clipped_.at(static_cast<std::size_t>(l)); }

  /// X_v(0), ..., X_v(n).
  std::vector<double> levels(const GffSample& field) const {
    detail::require(field.box == domain_, "gff::IncrementPlan: field lives on a different domain");
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(n_) + 1);
    for (const auto& e : exits_) x.push_back(harmonic_average(field, e));
    x.push_back(field.at(site_));
    return x;
  }

  /// Y_v(1), ..., Y_v(n).
  std::vector<double> increments(const GffSample& field) const {
    const auto x = levels(field);
    std::vector<double> y(static_cast<std::size_t>(n_));
    for (int l = 1; l <= n_; ++l) y[l - 1] = x[l] - x[l - 1];
    return y;
  }

 private:
  BoxRegion domain_;
  Site site_;
  int n_;
  std::vector<BoxRegion> regions_;
  std::vector<bool> clipped_;
  std::vector<ExitDistribution> exits_;
};

inline std::vector<double> multiscale_increments(const GffSample& field, Site v, int n_scales) {
  return IncrementPlan(field.box, v, n_scales).increments(field);
}

}  // namespace logcor::gff
