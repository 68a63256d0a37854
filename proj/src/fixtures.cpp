#include "carnot/fixtures.hpp"

#include "carnot/atlas.hpp"

#include <cstdlib>
#include <filesystem>

namespace carnot {

std::string fixture_dir() {
  if (const char* env = std::getenv("CARNOT_FIXTURE_DIR"); env && *env) return env;
  return CARNOT_FIXTURE_DIR;
}

std::string fixture_path(const std::string& name) {
  if (std::filesystem::exists(name)) return name;
  return (std::filesystem::path(fixture_dir()) / name).string();
}

std::vector<LabeledMap> diffeo_corpus(const StratifiedAlgebra& alg) {
  auto spec = [&](const std::string& s, const std::string& name) { return parse_map_spec(alg, s).renamed(name); };
  const SmoothMap tr = spec("translation 1 0.5 -0.25", "translation");
  const SmoothMap dil = spec("dilation 2", "dilation 2");
  const SmoothMap aut = spec("automorphism 2 1 0 | 0 1 0 | 0 0 2", "automorphism");
  const SmoothMap shear = spec("polynomial x1 ; x2 + x1^2 ; x3 + x1^3/6", "contact shear");
  return {
      {tr, true},
      {dil, true},
      {aut, true},
      {tr.compose(aut).renamed("translation o automorphism"), true},
      {dil.compose(tr).renamed("dilation o translation"), true},
      {shear, true},
      {spec("right-translation 1 0.5 0", "right translation"), false},
      {spec("linear 0 0 1 | 0 1 0 | 1 0 0", "swap x1 x3"), false},
      {spec("linear 1 0 0 | 0 1 0 | 0.5 0 1", "vertical shear"), false},
      {spec("linear 2 0 0 | 0 2 0 | 0 0 2", "isotropic scaling"), false},
      {spec("polynomial x1 ; x2 + x1^2 ; x3", "uncorrected shear"), false},
      {spec("linear 1 0.1 0 | 0 1 0 | 0 0.2 1", "tilted"), false},
  };
}

std::vector<MatrixField> norm_bound_corpus() {
  auto field = [](std::string name, std::function<Mat(const Vec&)> f) {
    MatrixField w;
    w.name = std::move(name);
    w.n1 = 2;
    w.eval = std::move(f);
    return w;
  };
  auto m2 = [](double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); };
  const double th = 0.7;
  return {
      MatrixField::constant(Mat::Identity(2, 2), "identity"),
      MatrixField::constant(2.0 * Mat::Identity(2, 2), "2 Id"),
      MatrixField::constant(0.5 * Mat::Identity(2, 2), "0.5 Id"),
      MatrixField::constant(m2(2, 1, 0, 1), "first block 2 1 | 0 1"),
      MatrixField::constant(m2(1, 0, 1, 1), "first block 1 0 | 1 1"),
      MatrixField::constant(1.3 * m2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th)), "scaled rotation"),
      field("trigonometric",
            [m2](const Vec& x) {
              return m2(1.5 + 0.4 * std::sin(x(0)), 0.3 * std::cos(x(2)), 0.1 * x(1) / (1 + x(1) * x(1)),
                        1.2 + 0.2 * std::cos(x(1)));
            }),
      field("diagonal", [m2](const Vec& x) { return m2(1 + 0.3 * std::sin(x(0)), 0, 0, 1 + 0.2 * std::cos(x(1))); }),
      field("upper tanh", [m2](const Vec& x) { return m2(1.2, 0.4 * std::tanh(x(2)), 0, 0.9); }),
      field("gaussian skew",
            [m2](const Vec& x) {
              const double e = 0.5 * std::exp(-x.squaredNorm());
              return m2(1, e, -e, 1);
            }),
      field("radial", [m2](const Vec& x) {
        const double r = 1.0 / (1.0 + x.squaredNorm());
        return m2(1 + r, 0.2 * r, 0.1, 1.5 - 0.5 * r);
      }),
  };
}

MatrixField bump_perturbation(std::shared_ptr<const Group> g, double s, double R) {
  MatrixField a;
  a.name = "bump perturbation";
  a.n1 = g->n1();
  a.constancy_radius = R;
  Mat B = Mat::Zero(a.n1, a.n1);
  B.topLeftCorner(2, 2) << 0.6, 0.8, -0.4, 0.2;
  a.eval = [g, s, R, B](const Vec& x) {
    const double p = smooth_cutoff(g->rho(x) / R, 0.0, 1.0);
    return Mat(Mat::Identity(B.rows(), B.cols()) + s * p * B);
  };
  return a;
}

}  // namespace carnot
