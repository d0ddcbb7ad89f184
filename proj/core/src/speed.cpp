#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "degroot/engine.hpp"
#include "degroot/error.hpp"
#include "degroot/parallel.hpp"
#include "degroot/random.hpp"

namespace degroot {

std::size_t default_t_cap(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) raise(Errc::InvalidArgument, "phi must lie in (0, 1)");
  return 50 * static_cast<std::size_t>(std::ceil(-std::log(phi)));
}

ConvergenceTimeReport convergence_time_2x2(const GeneratorSpec& spec, double phi, std::size_t replicas,
                                           std::size_t t_cap, std::uint64_t seed, std::size_t threads) {
  if (spec.n() != 2) raise(Errc::DimensionMismatch, "convergence_time_2x2 needs n = 2");
  if (t_cap == 0) t_cap = default_t_cap(phi);
  if (!(phi > 0.0 && phi < 1.0)) raise(Errc::InvalidArgument, "phi must lie in (0, 1)");
  if (replicas == 0) raise(Errc::InvalidArgument, "replicas must be >= 1");

  struct Outcome {
    std::size_t t_phi = 0;
    bool capped = false;
  };
  // |x_t - y_t| shrinks by |lambda_2(X_t)| each period, so once it falls
  // below phi it stays there.
  const auto outcomes = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    double x = 1.0, y = 0.0;  // first column of X^(t)
    Outcome out;
    for (std::size_t t = 1; t <= t_cap; ++t) {
      const StochasticMatrix m = gen.next();
      const double nx = m(0, 0) * x + m(0, 1) * y;
      const double ny = m(1, 0) * x + m(1, 1) * y;
      x = nx;
      y = ny;
      if (std::abs(x - y) < phi) return out;
      out.t_phi = t;
    }
    out.capped = true;
    return out;
  });

  ConvergenceTimeReport report;
  double total = 0.0;
  for (const auto& o : outcomes) {
    report.samples.push_back(o.t_phi);
    total += static_cast<double>(o.t_phi);
    if (o.capped) ++report.cap_hits;
  }
  report.mean_t_phi = total / static_cast<double>(replicas);
  if (100 * report.cap_hits > replicas) {
    raise(Errc::CapHit, std::to_string(report.cap_hits) + " of " + std::to_string(replicas) +
                            " replicas still above phi at t_cap = " + std::to_string(t_cap));
  }
  return report;
}

Law2x2 law_2x2(const GeneratorSpec& spec) {
  if (spec.n() != 2) raise(Errc::DimensionMismatch, "law_2x2 needs n = 2");
  if (const auto* d = spec.as<DirichletRows>()) {
    const auto& a = d->alpha;
    if (a[0] > 0.0 && a[1] > 0.0 && a[2] > 0.0 && a[3] > 0.0) return ProductBeta{a[0], a[1], a[2], a[3]};
    raise(Errc::Unsupported, "Dirichlet rows with structural zeros have no product-Beta law");
  }
  const SupportDescriptor sup = support(spec);
  if (sup.kind != SupportDescriptor::Kind::Finite || !spec.is_iid())
    raise(Errc::Unsupported, std::string("no 2x2 law for model '") + std::string(spec.kind()) + "'");
  AtomLaw law;
  for (std::size_t k = 0; k < sup.atoms.size(); ++k) {
    law.points.emplace_back(sup.atoms[k](0, 0), sup.atoms[k](1, 0));
    law.probs.push_back(sup.probs[k]);
  }
  return law;
}

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;
constexpr double kPi = std::numbers::pi;

// x = sin^2(pi s / 2) turns a Beta(a, b) law on [0, 1] into a law on s in
// [0, 1] whose density stays bounded for a, b >= 1/2 (arcsine is flat).
struct BetaInS {
  double a, b, norm;

  BetaInS(double a_, double b_) : a(a_), b(b_), norm(kPi / std::beta(a_, b_)) {}

  double density(double s) const {
    const double h = 0.5 * kPi * s;
    return norm * std::pow(std::sin(h), 2.0 * a - 1.0) * std::pow(std::cos(h), 2.0 * b - 1.0);
  }
};

// |x(s) - x(t)| without cancellation: sin^2 A - sin^2 B = sin(A - B) sin(A + B).
double gap_in_s(double s, double t) {
  return std::abs(std::sin(0.5 * kPi * (s - t)) * std::sin(0.5 * kPi * (s + t)));
}

// Integral of f over [lo, hi] where f has an integrable singularity at `at`
// (one of the endpoints); panels shrink geometrically toward it.
template <typename F>
double graded(F f, double lo, double hi, bool at_hi) {
  constexpr double kRatio = 0.15;
  const double width = hi - lo;
  if (width <= 0.0) return 0.0;
  double total = 0.0;
  double far = 1.0;  // fraction of width still to cover, measured from `at`
  while (far * width > 1e-15) {
    const double near = far * kRatio;
    const double p = at_hi ? hi - far * width : lo + near * width;
    const double q = at_hi ? hi - near * width : lo + far * width;
    total += Rule::integrate(f, p, q);
    far = near;
  }
  return total;
}

// Graded toward both ends of [lo, hi].
template <typename F>
double graded_both(F f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return graded(f, lo, mid, false) + graded(f, mid, hi, true);
}

double beta_energy(const ProductBeta& law, std::size_t quad_points) {
  const BetaInS outer_law(law.a1, law.b1);
  const BetaInS inner_law(law.a2, law.b2);
  // Shapes below 1 leave s^c endpoint behaviour, so the first and last
  // panels are graded too.
  const std::size_t panels = std::max<std::size_t>(3, quad_points / 20);
  const double step = 1.0 / static_cast<double>(panels);
  auto inner = [&](double s) {
    auto kernel = [&](double t) { return -std::log(gap_in_s(s, t)) * inner_law.density(t); };
    return graded_both(kernel, 0.0, s) + graded_both(kernel, s, 1.0);
  };
  auto outer = [&](double s) { return outer_law.density(s) * inner(s); };
  double total = graded(outer, 0.0, step, false) + graded(outer, 1.0 - step, 1.0, true);
  for (std::size_t k = 1; k + 1 < panels; ++k)
    total += Rule::integrate(outer, static_cast<double>(k) * step, static_cast<double>(k + 1) * step);
  return total;
}

}  // namespace

double log_energy(const Law2x2& law, std::size_t quad_points) {
  if (quad_points < 64) raise(Errc::InvalidArgument, "quad_points must be >= 64");
  if (const auto* atoms = std::get_if<AtomLaw>(&law)) {
    double total = 0.0;
    for (std::size_t k = 0; k < atoms->points.size(); ++k) {
      if (!(atoms->probs[k] > 0.0)) continue;
      const double gap = std::abs(atoms->points[k].first - atoms->points[k].second);
      if (gap == 0.0) raise(Errc::SingularMass, "law puts mass on the diagonal x = y");
      total -= atoms->probs[k] * std::log(gap);
    }
    return total;
  }
  const auto& beta = std::get<ProductBeta>(law);
  if (!(beta.a1 > 0 && beta.b1 > 0 && beta.a2 > 0 && beta.b2 > 0))
    raise(Errc::InvalidArgument, "Beta shapes must be positive");
  return beta_energy(beta, quad_points);
}

}  // namespace degroot
