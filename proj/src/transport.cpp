#include "idlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "idlab/errors.hpp"

namespace idlab {
namespace detail {

class MapImpl {
 public:
  virtual ~MapImpl() = default;
  virtual std::size_t dim() const = 0;
  virtual TriangularMap::Kind kind() const = 0;
  virtual VectorXd forward_prefix(const VectorXd& x) const = 0;
  virtual VectorXd inverse_prefix(const VectorXd& y) const = 0;
};

namespace {

class AffineImpl final : public MapImpl {
 public:
  AffineImpl(MatrixXd lower, VectorXd offset) : lower_(std::move(lower)), offset_(std::move(offset)) {}
  std::size_t dim() const override { return static_cast<std::size_t>(offset_.size()); }
  TriangularMap::Kind kind() const override { return TriangularMap::Kind::Affine; }
  VectorXd forward_prefix(const VectorXd& x) const override {
    const Eigen::Index k = x.size();
    return lower_.topLeftCorner(k, k).triangularView<Eigen::Lower>() * x + offset_.head(k);
  }
  VectorXd inverse_prefix(const VectorXd& y) const override {
    const Eigen::Index k = y.size();
    return lower_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(y - offset_.head(k));
  }
  MatrixXd lower_;
  VectorXd offset_;
};

double clamp_probability(double u) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(u, lo, hi);
}

// Pushes a prefix through the conditional CDFs of `from` and the conditional
// quantiles of `to`. The images of earlier coordinates are computed once per
// call and reused as conditioning prefixes.
VectorXd cdf_chain_prefix(const Distribution& from, const Distribution& to, double tol,
                          const VectorXd& x) {
  const Eigen::Index k = x.size();
  VectorXd y(k);
  for (Eigen::Index m = 0; m < k; ++m) {
    const auto mm = static_cast<std::size_t>(m);
    const double u = clamp_probability(from.conditional_cdf(mm, x.head(m), x(m)));
    y(m) = to.conditional_quantile(mm, y.head(m), u, tol);
  }
  return y;
}

class CdfChainImpl final : public MapImpl {
 public:
  CdfChainImpl(DistributionPtr source, DistributionPtr target, double tol)
      : source_(std::move(source)), target_(std::move(target)), tol_(tol) {}
  std::size_t dim() const override { return source_->dim(); }
  TriangularMap::Kind kind() const override { return TriangularMap::Kind::CdfChain; }
  VectorXd forward_prefix(const VectorXd& x) const override {
    return cdf_chain_prefix(*source_, *target_, tol_, x);
  }
  VectorXd inverse_prefix(const VectorXd& y) const override {
    return cdf_chain_prefix(*target_, *source_, tol_, y);
  }
  DistributionPtr source_, target_;
  double tol_;
};

class ComposedImpl final : public MapImpl {
 public:
  explicit ComposedImpl(std::vector<TriangularMap> maps) : maps_(std::move(maps)) {}
  std::size_t dim() const override { return maps_.front().dim(); }
  TriangularMap::Kind kind() const override { return TriangularMap::Kind::Composed; }
  VectorXd forward_prefix(const VectorXd& x) const override {
    VectorXd v = x;
    for (const auto& m : maps_) v = m.forward_prefix(v);
    return v;
  }
  VectorXd inverse_prefix(const VectorXd& y) const override {
    VectorXd v = y;
    for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) v = it->inverse_prefix(v);
    return v;
  }
  std::vector<TriangularMap> maps_;
};

class ExplicitImpl final : public MapImpl {
 public:
  ExplicitImpl(std::string name, std::vector<TriangularMap::ComponentFn> fwd,
               std::vector<TriangularMap::ComponentFn> inv, bool inverted)
      : name_(std::move(name)), fwd_(std::move(fwd)), inv_(std::move(inv)), inverted_(inverted) {}
  std::size_t dim() const override { return fwd_.size(); }
  TriangularMap::Kind kind() const override { return TriangularMap::Kind::Explicit; }
  VectorXd forward_prefix(const VectorXd& x) const override {
    return inverted_ ? solve(x) : apply(x);
  }
  VectorXd inverse_prefix(const VectorXd& y) const override {
    return inverted_ ? apply(y) : solve(y);
  }

  // y_m = f_m(x_<m, x_m)
  VectorXd apply(const VectorXd& x) const {
    VectorXd y(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m)
      y(m) = fwd_[m](std::span<const double>(x.data(), static_cast<std::size_t>(m)), x(m));
    return y;
  }
  // x_m = f_m^{-1}(x_<m, y_m), recovering the source prefix as it goes
  VectorXd solve(const VectorXd& y) const {
    VectorXd x(y.size());
    for (Eigen::Index m = 0; m < y.size(); ++m)
      x(m) = inv_[m](std::span<const double>(x.data(), static_cast<std::size_t>(m)), y(m));
    return x;
  }

  std::string name_;
  std::vector<TriangularMap::ComponentFn> fwd_, inv_;
  bool inverted_;
};

template <class T>
const T& as(const std::shared_ptr<const MapImpl>& impl, const char* what) {
  const auto* p = dynamic_cast<const T*>(impl.get());
  if (!p) throw std::logic_error(std::string("TriangularMap: ") + what);
  return *p;
}

}  // namespace
}  // namespace detail

using detail::AffineImpl;
using detail::CdfChainImpl;
using detail::ComposedImpl;
using detail::ExplicitImpl;

TriangularMap::TriangularMap(std::shared_ptr<const detail::MapImpl> impl) : impl_(std::move(impl)) {}

TriangularMap TriangularMap::identity(std::size_t dim) {
  return affine(MatrixXd::Identity(dim, dim), VectorXd::Zero(dim));
}

TriangularMap TriangularMap::affine(const MatrixXd& lower, const VectorXd& offset) {
  if (lower.rows() != lower.cols() || lower.rows() != offset.size() || lower.rows() == 0)
    throw DimensionMismatch("affine map needs a square matrix and matching offset");
  if (!num::is_lower_triangular(lower))
    throw std::invalid_argument("affine triangular map: matrix is not lower triangular");
  if ((lower.diagonal().array() <= 0.0).any())
    throw std::invalid_argument("affine triangular map: diagonal must be positive");
  return TriangularMap(std::make_shared<AffineImpl>(lower, offset));
}

TriangularMap TriangularMap::cdf_chain(DistributionPtr source, DistributionPtr target, double tol) {
  if (!source || !target) throw std::invalid_argument("cdf_chain: null distribution");
  if (source->dim() != target->dim()) throw DimensionMismatch("cdf_chain: dimensions differ");
  if (!(tol > 0.0)) throw std::invalid_argument("cdf_chain: tol must be positive");
  return TriangularMap(std::make_shared<CdfChainImpl>(std::move(source), std::move(target), tol));
}

TriangularMap TriangularMap::composed(std::vector<TriangularMap> maps) {
  if (maps.empty()) throw std::invalid_argument("composed: no maps");
  for (const auto& m : maps)
    if (m.dim() != maps.front().dim()) throw DimensionMismatch("composed: dimensions differ");
  return TriangularMap(std::make_shared<ComposedImpl>(std::move(maps)));
}

TriangularMap TriangularMap::explicit_map(std::string name, std::vector<ComponentFn> forward,
                                          std::vector<ComponentFn> inverse) {
  if (forward.empty() || forward.size() != inverse.size())
    throw std::invalid_argument("explicit_map: need one inverse per component");
  return TriangularMap(
      std::make_shared<ExplicitImpl>(std::move(name), std::move(forward), std::move(inverse), false));
}

std::size_t TriangularMap::dim() const { return impl_->dim(); }
TriangularMap::Kind TriangularMap::kind() const { return impl_->kind(); }

std::string TriangularMap::kind_name() const {
  switch (kind()) {
    case Kind::Affine: return "affine";
    case Kind::CdfChain: return "cdf_chain";
    case Kind::Composed: return "composed";
    case Kind::Explicit: return "explicit_named";
  }
  return "unknown";
}

VectorXd TriangularMap::forward(const VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != dim()) throw DimensionMismatch("forward: wrong dimension");
  return impl_->forward_prefix(z);
}

VectorXd TriangularMap::inverse(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) throw DimensionMismatch("inverse: wrong dimension");
  return impl_->inverse_prefix(x);
}

VectorXd TriangularMap::forward_prefix(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) > dim()) throw DimensionMismatch("prefix too long");
  return impl_->forward_prefix(x);
}

VectorXd TriangularMap::inverse_prefix(const VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) > dim()) throw DimensionMismatch("prefix too long");
  return impl_->inverse_prefix(y);
}

double TriangularMap::component(std::size_t m, const VectorXd& prefix, double x_m) const {
  if (m >= dim() || static_cast<std::size_t>(prefix.size()) != m)
    throw DimensionMismatch("component: prefix length must equal the component index");
  VectorXd x(m + 1);
  x.head(m) = prefix;
  x(m) = x_m;
  return impl_->forward_prefix(x)(m);
}

MatrixXd TriangularMap::forward_rows(const MatrixXd& z) const {
  MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) out.row(r) = forward(z.row(r).transpose()).transpose();
  return out;
}

MatrixXd TriangularMap::inverse_rows(const MatrixXd& x) const {
  MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = inverse(x.row(r).transpose()).transpose();
  return out;
}

const MatrixXd& TriangularMap::matrix() const {
  return detail::as<AffineImpl>(impl_, "matrix() on a non-affine map").lower_;
}
const VectorXd& TriangularMap::offset() const {
  return detail::as<AffineImpl>(impl_, "offset() on a non-affine map").offset_;
}
const std::string& TriangularMap::name() const {
  return detail::as<ExplicitImpl>(impl_, "name() on a non-explicit map").name_;
}
const DistributionPtr& TriangularMap::source() const {
  return detail::as<CdfChainImpl>(impl_, "source() on a non-cdf-chain map").source_;
}
const DistributionPtr& TriangularMap::target() const {
  return detail::as<CdfChainImpl>(impl_, "target() on a non-cdf-chain map").target_;
}
const std::vector<TriangularMap>& TriangularMap::parts() const {
  return detail::as<ComposedImpl>(impl_, "parts() on a non-composed map").maps_;
}

Automorphism TriangularMap::as_automorphism() const {
  if (kind() == Kind::Affine) {
    auto a = Automorphism::affine(matrix(), offset(), "triangular_affine");
    return a;
  }
  StructureTags tags;
  tags.triangular = true;
  const TriangularMap self = *this;
  return Automorphism(
      dim(), [self](const VectorXd& z) { return self.forward(z); },
      [self](const VectorXd& x) { return self.inverse(x); }, tags, kind_name());
}

namespace {

Json vec_json(const VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

}  // namespace

Json TriangularMap::to_json() const {
  switch (kind()) {
    case Kind::Affine: {
      Json rows = Json::array();
      for (Eigen::Index i = 0; i < matrix().rows(); ++i) rows.push_back(vec_json(matrix().row(i)));
      return Json{{"kind", "affine"}, {"dim", dim()}, {"matrix", rows}, {"offset", vec_json(offset())}};
    }
    case Kind::CdfChain: {
      const auto& impl = detail::as<CdfChainImpl>(impl_, "cdf chain");
      return Json{{"kind", "cdf_chain"},
                  {"source", impl.source_->to_json()},
                  {"target", impl.target_->to_json()},
                  {"tol", impl.tol_}};
    }
    case Kind::Composed: {
      Json maps = Json::array();
      for (const auto& m : parts()) maps.push_back(m.to_json());
      return Json{{"kind", "composed"}, {"maps", maps}};
    }
    case Kind::Explicit: {
      const auto& impl = detail::as<ExplicitImpl>(impl_, "explicit");
      return Json{{"kind", "explicit_named"},
                  {"name", impl.name_},
                  {"dim", dim()},
                  {"inverse", impl.inverted_}};
    }
  }
  return {};
}

TriangularMap explicit_map_by_name(const std::string& name, std::size_t dim) {
  using Fn = TriangularMap::ComponentFn;
  if (name == "cubic") {
    std::vector<Fn> fwd(dim, [](std::span<const double>, double x) { return x * x * x; });
    std::vector<Fn> inv(dim, [](std::span<const double>, double y) { return std::cbrt(y); });
    return TriangularMap::explicit_map(name, std::move(fwd), std::move(inv));
  }
  if (name == "cubic_shear") {
    if (dim != 2) throw ConfigError("explicit map 'cubic_shear' is two-dimensional");
    return TriangularMap::explicit_map(
        name,
        {[](std::span<const double>, double x) { return x * x * x; },
         [](std::span<const double> p, double x) { return x + p[0]; }},
        {[](std::span<const double>, double y) { return std::cbrt(y); },
         [](std::span<const double> p, double y) { return y - p[0]; }});
  }
  if (name == "sinh_shear") {
    if (dim != 2) throw ConfigError("explicit map 'sinh_shear' is two-dimensional");
    return TriangularMap::explicit_map(
        name,
        {[](std::span<const double>, double x) { return std::sinh(x); },
         [](std::span<const double> p, double x) { return std::exp(0.25 * p[0]) * x + p[0]; }},
        {[](std::span<const double>, double y) { return std::asinh(y); },
         [](std::span<const double> p, double y) { return (y - p[0]) * std::exp(-0.25 * p[0]); }});
  }
  throw ConfigError("unknown explicit map '" + name + "'");
}

TriangularMap triangular_map_from_json(const Json& spec) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "affine") {
      const auto& rows = spec.at("matrix");
      const std::size_t d = rows.size();
      MatrixXd l(d, d);
      VectorXd b(d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) l(i, j) = rows.at(i).at(j).get<double>();
        b(i) = spec.at("offset").at(i).get<double>();
      }
      return TriangularMap::affine(l, b);
    }
    if (kind == "cdf_chain")
      return TriangularMap::cdf_chain(distribution_from_json(spec.at("source")),
                                      distribution_from_json(spec.at("target")),
                                      spec.value("tol", kKrTol));
    if (kind == "composed") {
      std::vector<TriangularMap> maps;
      for (const auto& m : spec.at("maps")) maps.push_back(triangular_map_from_json(m));
      return TriangularMap::composed(std::move(maps));
    }
    if (kind == "explicit_named") {
      auto m = explicit_map_by_name(spec.at("name").get<std::string>(),
                                    spec.at("dim").get<std::size_t>());
      return spec.value("inverse", false) ? invert(m) : m;
    }
    throw ConfigError("unknown map kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed map record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid map record: ") + e.what());
  }
}

TriangularMap kr_transport(const DistributionPtr& source, const DistributionPtr& target, double tol,
                           KrRoute route) {
  if (!source || !target) throw std::invalid_argument("kr_transport: null distribution");
  if (source->dim() != target->dim()) throw DimensionMismatch("kr_transport: dimensions differ");
  if (!source->full_support() || !target->full_support())
    throw std::invalid_argument("kr_transport: both measures must be fully supported");
  if (route == KrRoute::Auto) {
    const auto* gs = dynamic_cast<const GaussianDistribution*>(source.get());
    const auto* gt = dynamic_cast<const GaussianDistribution*>(target.get());
    if (gs && gt) {
      // K(z) = mu_t + L_t L_s^{-1} (z - mu_s); lower triangular, positive diagonal
      const MatrixXd ls_inv = gs->cholesky().triangularView<Eigen::Lower>().solve(
          MatrixXd::Identity(gs->dim(), gs->dim()));
      MatrixXd l = gt->cholesky() * ls_inv;
      l.triangularView<Eigen::StrictlyUpper>().setZero();
      return TriangularMap::affine(l, gt->mean() - l * gs->mean());
    }
  }
  return TriangularMap::cdf_chain(source, target, tol);
}

TriangularMap compose(const TriangularMap& outer, const TriangularMap& inner) {
  if (outer.dim() != inner.dim()) throw DimensionMismatch("compose: dimensions differ");
  using Kind = TriangularMap::Kind;
  if (outer.kind() == Kind::Affine && inner.kind() == Kind::Affine) {
    MatrixXd l = outer.matrix() * inner.matrix();
    l.triangularView<Eigen::StrictlyUpper>().setZero();
    return TriangularMap::affine(l, outer.matrix() * inner.offset() + outer.offset());
  }
  std::vector<TriangularMap> parts;
  auto push = [&parts](const TriangularMap& m) {
    if (m.kind() == Kind::Composed)
      parts.insert(parts.end(), m.parts().begin(), m.parts().end());
    else
      parts.push_back(m);
  };
  push(inner);
  push(outer);
  return TriangularMap::composed(std::move(parts));
}

TriangularMap invert(const TriangularMap& map) {
  using Kind = TriangularMap::Kind;
  switch (map.kind()) {
    case Kind::Affine: {
      const auto d = static_cast<Eigen::Index>(map.dim());
      MatrixXd linv = map.matrix().triangularView<Eigen::Lower>().solve(MatrixXd::Identity(d, d));
      linv.triangularView<Eigen::StrictlyUpper>().setZero();
      return TriangularMap::affine(linv, -linv * map.offset());
    }
    case Kind::CdfChain: {
      const auto& impl = detail::as<CdfChainImpl>(map.impl_, "cdf chain");
      return TriangularMap::cdf_chain(impl.target_, impl.source_, impl.tol_);
    }
    case Kind::Composed: {
      std::vector<TriangularMap> parts;
      for (auto it = map.parts().rbegin(); it != map.parts().rend(); ++it) parts.push_back(invert(*it));
      return TriangularMap::composed(std::move(parts));
    }
    case Kind::Explicit: {
      const auto& impl = detail::as<ExplicitImpl>(map.impl_, "explicit");
      return TriangularMap(
          std::make_shared<ExplicitImpl>(impl.name_, impl.fwd_, impl.inv_, !impl.inverted_));
    }
  }
  throw std::logic_error("invert: unknown map kind");
}

double log_det_jacobian(const TriangularMap& map, const VectorXd& z, double step) {
  if (static_cast<std::size_t>(z.size()) != map.dim())
    throw DimensionMismatch("log_det_jacobian: wrong dimension");
  if (map.kind() == TriangularMap::Kind::Affine)
    return map.matrix().diagonal().array().log().sum();
  double total = 0.0;
  for (std::size_t m = 0; m < map.dim(); ++m) {
    const VectorXd prefix = z.head(static_cast<Eigen::Index>(m));
    const double zm = z(static_cast<Eigen::Index>(m));
    const double hi = map.component(m, prefix, zm + step);
    const double lo = map.component(m, prefix, zm - step);
    const double deriv = (hi - lo) / (2.0 * step);
    if (!std::isfinite(deriv) || !(deriv > 0.0))
      throw NonFiniteDerivative("diagonal derivative of component " + std::to_string(m) +
                                " is not a positive finite number");
    total += std::log(deriv);
  }
  return total;
}

double CheckReport::max_statistic() const {
  return ks_statistics.empty() ? 0.0 : *std::max_element(ks_statistics.begin(), ks_statistics.end());
}

Json CheckReport::to_json() const {
  return Json{{"n", n},
              {"alpha", alpha},
              {"alpha_per_coordinate", alpha_per_coordinate},
              {"ks_statistics", ks_statistics},
              {"p_values", p_values},
              {"critical_value", critical_value},
              {"pass", pass}};
}

namespace {

template <class Map>
CheckReport run_pushforward_check(const Map& map, std::size_t dim, const Distribution& source,
                                  const Distribution& target, std::size_t n, RngStream& rng,
                                  double alpha) {
  if (source.dim() != dim || target.dim() != dim)
    throw DimensionMismatch("pushforward_check: dimensions differ");
  if (n < 1000) throw std::invalid_argument("pushforward_check: need at least 1000 samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("pushforward_check: bad alpha");
  const MatrixXd z = sample(source, rng, n);
  std::vector<std::vector<double>> u(dim, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const VectorXd x = map.forward(z.row(static_cast<Eigen::Index>(i)).transpose());
    const VectorXd r = rosenblatt(target, x);
    for (std::size_t m = 0; m < dim; ++m) u[m][i] = r(static_cast<Eigen::Index>(m));
  }
  CheckReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.alpha_per_coordinate = alpha / static_cast<double>(dim);
  rep.critical_value = num::ks_critical_value(n, rep.alpha_per_coordinate);
  rep.pass = true;
  for (std::size_t m = 0; m < dim; ++m) {
    const double d = num::ks_uniform_statistic(std::move(u[m]));
    const double p = num::ks_pvalue(d, n);
    rep.ks_statistics.push_back(d);
    rep.p_values.push_back(p);
    if (p < rep.alpha_per_coordinate) rep.pass = false;
  }
  return rep;
}

}  // namespace

CheckReport pushforward_check(const Automorphism& map, const Distribution& source,
                              const Distribution& target, std::size_t n, RngStream& rng,
                              double alpha) {
  return run_pushforward_check(map, map.dim(), source, target, n, rng, alpha);
}

CheckReport pushforward_check(const TriangularMap& map, const Distribution& source,
                              const Distribution& target, std::size_t n, RngStream& rng,
                              double alpha) {
  return run_pushforward_check(map, map.dim(), source, target, n, rng, alpha);
}

Json StructureReport::to_json() const {
  return Json{{"max_cross_partial", max_cross_partial},
              {"worst_output", worst_output},
              {"worst_input", worst_input},
              {"pass", pass}};
}

namespace {

StructureReport cross_partials(const Automorphism& map, const MatrixXd& probes, double step,
                               double tol, bool upper_only) {
  if (static_cast<std::size_t>(probes.cols()) != map.dim())
    throw DimensionMismatch("structure check: probe dimension differs from the map");
  if (!(step > 0.0)) throw std::invalid_argument("structure check: step must be positive");
  StructureReport rep;
  const auto d = probes.cols();
  for (Eigen::Index r = 0; r < probes.rows(); ++r) {
    const VectorXd z = probes.row(r).transpose();
    for (Eigen::Index j = 0; j < d; ++j) {
      VectorXd zp = z, zm = z;
      zp(j) += step;
      zm(j) -= step;
      const VectorXd col = (map.forward(zp) - map.forward(zm)) / (2.0 * step);
      for (Eigen::Index m = 0; m < d; ++m) {
        if (m == j || (upper_only && j < m)) continue;
        const double v = std::abs(col(m));
        if (!std::isfinite(v)) throw NonFiniteDerivative("structure check: non-finite partial");
        if (v > rep.max_cross_partial) {
          rep.max_cross_partial = v;
          rep.worst_output = static_cast<std::size_t>(m);
          rep.worst_input = static_cast<std::size_t>(j);
        }
      }
    }
  }
  rep.pass = rep.max_cross_partial <= tol;
  return rep;
}

}  // namespace

StructureReport component_wise_check(const Automorphism& map, const MatrixXd& probe_points,
                                     double step, double tol) {
  return cross_partials(map, probe_points, step, tol, false);
}

StructureReport triangular_check(const Automorphism& map, const MatrixXd& probe_points,
                                 double step, double tol) {
  // output m may depend on inputs j <= m only
  return cross_partials(map, probe_points, step, tol, true);
}

bool check_monotone(const TriangularMap& map, RngStream& rng, std::size_t trials, double spread) {
  const std::size_t d = map.dim();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t m = static_cast<std::size_t>(rng.uniform() * static_cast<double>(d)) % d;
    VectorXd prefix(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < prefix.size(); ++i) prefix(i) = spread * rng.normal();
    double a = spread * rng.normal(), b = spread * rng.normal();
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!(map.component(m, prefix, b) > map.component(m, prefix, a))) return false;
  }
  return true;
}

}  // namespace idlab
