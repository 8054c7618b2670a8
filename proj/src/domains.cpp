#include "quadgen/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace quadgen {

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (int j = 0; j < dim(); ++j)
    if (x[j] < lower[j] - tol || x[j] > upper[j] + tol) return false;
  return true;
}

double Box::volume() const { return (upper - lower).prod(); }

Box Box::centered_cube(int dim, double half_width) {
  Box b;
  b.lower = Eigen::VectorXd::Constant(dim, -half_width);
  b.upper = Eigen::VectorXd::Constant(dim, half_width);
  return b;
}

Eigen::VectorXd AffineMap::apply(const Eigen::VectorXd& x) const {
  return offset.array() + scale.array() * x.array();
}

Eigen::VectorXd AffineMap::invert(const Eigen::VectorXd& y) const {
  return (y - offset).array() / scale.array();
}

AffineMap affine_map_box(const Box& source, const Box& target) {
  if (source.dim() != target.dim())
    throw std::invalid_argument("affine_map_box: dimension mismatch");
  AffineMap map;
  map.scale.resize(source.dim());
  map.offset.resize(source.dim());
  for (int j = 0; j < source.dim(); ++j) {
    double sw = source.upper[j] - source.lower[j];
    if (!(sw > 0) || !(target.upper[j] - target.lower[j] > 0))
      throw std::invalid_argument("affine_map_box: degenerate box");
    map.scale[j] = (target.upper[j] - target.lower[j]) / sw;
    map.offset[j] = target.lower[j] - map.scale[j] * source.lower[j];
  }
  return map;
}

Domain Domain::make_box(Box box) {
  Domain d;
  d.box_ = std::move(box);
  return d;
}

Domain Domain::make_zonotope(Zonotope z) {
  Domain d;
  d.box_ = z.bounding;
  d.zonotope_ = std::make_shared<const Zonotope>(std::move(z));
  return d;
}

const Box& Domain::box() const {
  if (!is_box()) throw std::logic_error("Domain: not a box");
  return box_;
}

const Zonotope& Domain::zonotope() const {
  if (is_box()) throw std::logic_error("Domain: not a zonotope");
  return *zonotope_;
}

int Domain::dim() const { return box_.dim(); }

bool Domain::contains(const Eigen::VectorXd& x, double tol) const {
  if (is_box()) return box_.contains(x, tol);
  const Zonotope& z = *zonotope_;
  for (int h = 0; h < z.normals.rows(); ++h)
    if (z.normals.row(h).dot(x) > z.offsets[h] + tol) return false;
  return true;
}

const Box& Domain::bounding_box() const { return box_; }

namespace {

// support function of {A y | y in [-1,1]^d}
double zonotope_support(const Eigen::MatrixXd& a, const Eigen::VectorXd& u) {
  return (a.transpose() * u).cwiseAbs().sum();
}

Eigen::VectorXd probe_vertex(const Eigen::MatrixXd& a, const Eigen::VectorXd& g,
                             std::vector<int>& signs) {
  Eigen::VectorXd proj = a.transpose() * g;
  signs.resize(proj.size());
  for (int k = 0; k < proj.size(); ++k) signs[k] = proj[k] >= 0.0 ? 1 : -1;
  Eigen::VectorXd y(proj.size());
  for (int k = 0; k < proj.size(); ++k) y[k] = signs[k];
  return a * y;
}

// Andrew monotone chain, counterclockwise output.
std::vector<int> convex_hull_2d(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (pts(i, 0) != pts(j, 0)) return pts(i, 0) < pts(j, 0);
    return pts(i, 1) < pts(j, 1);
  });
  double scale = pts.cwiseAbs().maxCoeff();
  double eps = 1e-12 * scale * scale;
  auto cross = [&](int o, int a, int b) {
    return (pts(a, 0) - pts(o, 0)) * (pts(b, 1) - pts(o, 1)) -
           (pts(a, 1) - pts(o, 1)) * (pts(b, 0) - pts(o, 0));
  };
  std::vector<int> hull(2 * n);
  int k = 0;
  for (int idx : order) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], idx) <= eps) --k;
    hull[k++] = idx;
  }
  for (int i = n - 2, lo = k + 1; i >= 0; --i) {
    int idx = order[i];
    while (k >= lo && cross(hull[k - 2], hull[k - 1], idx) <= eps) --k;
    hull[k++] = idx;
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

Domain zonotope_build(const Eigen::MatrixXd& a, int n_probe, std::uint64_t seed) {
  const int s = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  if (s > d) throw std::invalid_argument("zonotope_build: need s <= d");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  if (svd.singularValues().minCoeff() <
      1e-12 * std::max(1.0, svd.singularValues().maxCoeff()))
    throw std::invalid_argument("zonotope_build: generator matrix is rank deficient");

  if (n_probe <= 0) n_probe = 10 * (1 << s) * d;

  Zonotope z;
  z.generator = a;

  // bounding box from the support function, exact
  z.bounding.lower.resize(s);
  z.bounding.upper.resize(s);
  for (int i = 0; i < s; ++i) {
    double r = a.row(i).cwiseAbs().sum();
    z.bounding.lower[i] = -r;
    z.bounding.upper[i] = r;
  }

  // probe random directions; keep distinct sign patterns and their negations
  RandomStream rng(seed);
  std::map<std::vector<int>, Eigen::VectorXd> found;
  std::vector<int> signs;
  Eigen::VectorXd g(s);
  auto add_probe = [&](const Eigen::VectorXd& dir) {
    Eigen::VectorXd v = probe_vertex(a, dir, signs);
    found.emplace(signs, v);
    for (auto& sgn : signs) sgn = -sgn;
    found.emplace(signs, -v);
  };
  for (int p = 0; p < n_probe; ++p) {
    for (int i = 0; i < s; ++i) g[i] = rng.normal();
    add_probe(g);
  }
  if (s == 2) {
    // nudge both sides of each facet normal so both edge endpoints appear
    for (int k = 0; k < d; ++k) {
      Eigen::Vector2d col = a.col(k);
      Eigen::Vector2d perp(-col[1], col[0]);
      double norm = perp.norm();
      if (norm < 1e-14) continue;
      perp /= norm;
      Eigen::Vector2d t = col / col.norm();
      add_probe(perp + 1e-7 * t);
      add_probe(perp - 1e-7 * t);
    }
  }

  z.vertices.resize(found.size(), s);
  int row = 0;
  for (const auto& [sgn, v] : found) z.vertices.row(row++) = v;

  std::vector<Eigen::VectorXd> normals;
  std::vector<double> offsets;
  if (s == 1) {
    Eigen::VectorXd n1(1);
    n1 << 1.0;
    normals = {n1, -n1};
    offsets = {zonotope_support(a, n1), zonotope_support(a, n1)};
  } else if (s == 2) {
    auto hull = convex_hull_2d(z.vertices);
    for (std::size_t i = 0; i < hull.size(); ++i) {
      Eigen::Vector2d p = z.vertices.row(hull[i]);
      Eigen::Vector2d q = z.vertices.row(hull[(i + 1) % hull.size()]);
      Eigen::Vector2d edge = q - p;
      Eigen::VectorXd n(2);
      n << edge[1], -edge[0];
      double norm = n.norm();
      if (norm < 1e-14 * z.vertices.cwiseAbs().maxCoeff()) continue;
      n /= norm;
      normals.push_back(n);
      offsets.push_back(n.dot(p));
    }
  } else {
    // facet normals are orthogonal to (s-1)-subsets of the generators
    std::vector<int> subset(s - 1);
    std::function<void(int, int)> recurse = [&](int start, int depth) {
      if (depth == s - 1) {
        Eigen::MatrixXd sub(s - 1, s);
        for (int i = 0; i < s - 1; ++i) sub.row(i) = a.col(subset[i]).transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> dec(sub, Eigen::ComputeFullV);
        if (s >= 2 && dec.singularValues().minCoeff() <
                          1e-10 * std::max(1.0, dec.singularValues().maxCoeff()))
          return;
        Eigen::VectorXd n = dec.matrixV().col(s - 1);
        for (const auto& m : normals)
          if (std::abs(m.dot(n)) > 1.0 - 1e-12) return;
        double h = zonotope_support(a, n);
        normals.push_back(n);
        offsets.push_back(h);
        normals.push_back(-n);
        offsets.push_back(h);
        return;
      }
      for (int k = start; k <= d - (s - 1 - depth); ++k) {
        subset[depth] = k;
        recurse(k + 1, depth + 1);
      }
    };
    recurse(0, 0);
  }

  z.normals.resize(normals.size(), s);
  z.offsets.resize(normals.size());
  for (std::size_t h = 0; h < normals.size(); ++h) {
    z.normals.row(h) = normals[h];
    z.offsets[h] = offsets[h];
    if (!(z.offsets[h] > 0))
      throw std::runtime_error("zonotope_build: degenerate hull (origin not interior)");
  }

  for (int v = 0; v < z.vertices.rows(); ++v) {
    Eigen::VectorXd x = z.vertices.row(v);
    for (int h = 0; h < z.normals.rows(); ++h)
      if (z.normals.row(h).dot(x) > z.offsets[h] + 1e-10)
        throw std::runtime_error("zonotope_build: vertex violates hull constraint");
  }

  return Domain::make_zonotope(std::move(z));
}

Recurrence family_recurrence(Family family, int n) {
  switch (family) {
    case Family::uniform: return Recurrence::legendre(n);
    case Family::jacobi11: return Recurrence::jacobi(n, 1.0, 1.0);
    case Family::gaussian: return Recurrence::hermite(n);
  }
  throw std::logic_error("family_recurrence: unknown family");
}

double family_moment(Family family, int k) {
  if (k % 2) return 0.0;
  switch (family) {
    case Family::uniform: return 1.0 / (k + 1);
    case Family::jacobi11: return 1.5 * (1.0 / (k + 1) - 1.0 / (k + 3));
    case Family::gaussian: {
      double m = 1.0;
      for (int i = k - 1; i > 1; i -= 2) m *= i;
      return m;
    }
  }
  throw std::logic_error("family_moment: unknown family");
}

Measure Measure::tensor(std::vector<TensorFactor> factors) {
  Measure m;
  m.kind_ = Kind::tensor;
  m.factors_ = std::move(factors);
  const int d = static_cast<int>(m.factors_.size());
  Box box;
  box.lower.resize(d);
  box.upper.resize(d);
  for (int j = 0; j < d; ++j) {
    const TensorFactor& f = m.factors_[j];
    if (f.family == Family::gaussian) {
      box.lower[j] = -std::numeric_limits<double>::infinity();
      box.upper[j] = std::numeric_limits<double>::infinity();
    } else {
      box.lower[j] = f.shift - std::abs(f.scale);
      box.upper[j] = f.shift + std::abs(f.scale);
    }
  }
  m.domain_ = Domain::make_box(box);
  m.name_ = "tensor";
  return m;
}

Measure Measure::density(std::function<double(const Eigen::VectorXd&)> unnormalized,
                         Box support, std::string name) {
  Measure m;
  m.kind_ = Kind::density;
  m.density_ = std::move(unnormalized);
  m.domain_ = Domain::make_box(support);
  m.name_ = std::move(name);

  const int d = support.dim();
  if (d > 3) throw std::invalid_argument("Measure::density: only d <= 3 supported");

  // normalization constant by mapped tensor Gauss-Legendre (200 points/axis
  // for d <= 2), and a sup bound by coarse grid scan for rejection sampling
  int q = d <= 2 ? 200 : 60;
  auto rule = gauss_rule(Recurrence::legendre(q), q);
  double integral = 0.0;
  Eigen::VectorXd x(d);
  std::vector<int> idx(d, 0);
  while (true) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      double half = 0.5 * (support.upper[j] - support.lower[j]);
      x[j] = support.lower[j] + half * (rule.nodes[idx[j]] + 1.0);
      w *= rule.weights[idx[j]] * 2.0 * half;  // probability weights -> Lebesgue
    }
    integral += w * m.density_(x);
    int j = d - 1;
    while (j >= 0 && ++idx[j] == q) idx[j--] = 0;
    if (j < 0) break;
  }
  if (!(integral > 0)) throw std::runtime_error("Measure::density: non-positive mass");
  m.norm_constant_ = 1.0 / integral;

  const int grid = 101;
  double sup = 0.0;
  std::vector<int> gidx(d, 0);
  while (true) {
    for (int j = 0; j < d; ++j)
      x[j] = support.lower[j] +
             (support.upper[j] - support.lower[j]) * gidx[j] / (grid - 1.0);
    sup = std::max(sup, m.density_(x));
    int j = d - 1;
    while (j >= 0 && ++gidx[j] == grid) gidx[j--] = 0;
    if (j < 0) break;
  }
  m.sup_bound_ = 1.5 * sup;
  return m;
}

Measure Measure::empirical(Eigen::MatrixXd samples) {
  if (samples.rows() < 1) throw std::invalid_argument("Measure::empirical: no samples");
  Measure m;
  m.kind_ = Kind::empirical;
  Box box;
  box.lower = samples.colwise().minCoeff();
  box.upper = samples.colwise().maxCoeff();
  m.domain_ = Domain::make_box(box);
  m.samples_ = std::move(samples);
  m.name_ = "empirical";
  return m;
}

Measure Measure::ridge(int base_dim, Eigen::MatrixXd a, Domain zonotope_domain,
                       bool orthonormal_rows) {
  if (a.cols() != base_dim)
    throw std::invalid_argument("Measure::ridge: matrix has wrong column count");
  if (orthonormal_rows) {
    Eigen::MatrixXd gram = a * a.transpose();
    if ((gram - Eigen::MatrixXd::Identity(a.rows(), a.rows())).cwiseAbs().maxCoeff() >
        1e-10)
      throw std::invalid_argument("Measure::ridge: rows are not orthonormal");
  }
  Measure m;
  m.kind_ = Kind::ridge;
  m.base_dim_ = base_dim;
  m.factors_.assign(base_dim, TensorFactor{Family::uniform, 0.0, 1.0});
  m.ridge_a_ = std::move(a);
  m.domain_ = std::move(zonotope_domain);
  m.name_ = "ridge";
  return m;
}

int Measure::dim() const { return domain_.dim(); }

const std::vector<TensorFactor>& Measure::factors() const {
  if (kind_ != Kind::tensor && kind_ != Kind::ridge)
    throw std::logic_error("Measure: no tensor factors");
  return factors_;
}

const Eigen::MatrixXd& Measure::samples() const {
  if (kind_ != Kind::empirical) throw std::logic_error("Measure: not empirical");
  return samples_;
}

const Eigen::MatrixXd& Measure::ridge_matrix() const {
  if (kind_ != Kind::ridge) throw std::logic_error("Measure: not a ridge measure");
  return ridge_a_;
}

double Measure::density_at(const Eigen::VectorXd& x) const {
  if (kind_ != Kind::density) throw std::logic_error("Measure: not a density");
  return density_(x);
}

namespace {

double sample_factor(const TensorFactor& f, RandomStream& rng) {
  switch (f.family) {
    case Family::uniform:
      return f.shift + f.scale * rng.uniform(-1.0, 1.0);
    case Family::jacobi11: {
      // rejection against the uniform envelope, density ~ (1 - t^2)
      while (true) {
        double t = rng.uniform(-1.0, 1.0);
        if (rng.uniform01() <= (1.0 - t * t)) return f.shift + f.scale * t;
      }
    }
    case Family::gaussian:
      return f.shift + f.scale * rng.normal();
  }
  throw std::logic_error("sample_factor: unknown family");
}

}  // namespace

Eigen::MatrixXd Measure::sample(int n, RandomStream& rng) const {
  Eigen::MatrixXd out(n, dim());
  switch (kind_) {
    case Kind::tensor: {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim(); ++j) out(i, j) = sample_factor(factors_[j], rng);
      return out;
    }
    case Kind::density: {
      const Box& box = domain_.box();
      Eigen::VectorXd x(dim());
      long proposals = 0;
      for (int i = 0; i < n; ++i) {
        while (true) {
          ++proposals;
          for (int j = 0; j < dim(); ++j)
            x[j] = rng.uniform(box.lower[j], box.upper[j]);
          if (rng.uniform01() * sup_bound_ <= density_(x)) break;
          if (proposals > 100000 && static_cast<double>(i) / proposals < 1e-4) {
            std::ostringstream os;
            os << "Measure::sample: rejection acceptance rate below 1e-4 for '"
               << name_ << "' (" << i << " accepted of " << proposals << ")";
            throw std::runtime_error(os.str());
          }
        }
        out.row(i) = x;
      }
      return out;
    }
    case Kind::empirical: {
      for (int i = 0; i < n; ++i)
        out.row(i) = samples_.row(static_cast<int>(rng.integer(samples_.rows())));
      return out;
    }
    case Kind::ridge: {
      Eigen::VectorXd y(base_dim_);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < base_dim_; ++j) y[j] = sample_factor(factors_[j], rng);
        out.row(i) = (ridge_a_ * y).transpose();
      }
      return out;
    }
  }
  throw std::logic_error("Measure::sample: unknown kind");
}

Measure banana_measure() {
  Box box;
  box.lower.resize(2);
  box.upper.resize(2);
  box.lower << -3.0, -2.0;
  box.upper << 3.0, 6.0;
  auto rho = [](const Eigen::VectorXd& x) {
    double t = 2.0 * x[1] - x[0] * x[0];
    return std::exp(-(std::pow(x[0], 4) / 10.0 + 0.5 * t * t));
  };
  return Measure::density(rho, box, "banana");
}

Measure banana_measure_mapped(const Box& target) {
  Box canonical;
  canonical.lower.resize(2);
  canonical.upper.resize(2);
  canonical.lower << -3.0, -2.0;
  canonical.upper << 3.0, 6.0;
  AffineMap map = affine_map_box(canonical, target);
  auto rho = [map](const Eigen::VectorXd& y) {
    Eigen::VectorXd x = map.invert(y);
    double t = 2.0 * x[1] - x[0] * x[0];
    return std::exp(-(std::pow(x[0], 4) / 10.0 + 0.5 * t * t));
  };
  return Measure::density(rho, target, "banana-mapped");
}

Measure uniform_measure(const Box& box) {
  std::vector<TensorFactor> factors(box.dim());
  for (int j = 0; j < box.dim(); ++j) {
    factors[j].family = Family::uniform;
    factors[j].shift = 0.5 * (box.lower[j] + box.upper[j]);
    factors[j].scale = 0.5 * (box.upper[j] - box.lower[j]);
  }
  return Measure::tensor(std::move(factors));
}

}  // namespace quadgen
