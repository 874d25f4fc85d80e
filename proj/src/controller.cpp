#include "ppc/controller.hpp"

#include <cmath>
#include <sstream>

#include "ppc/dual.hpp"
#include "ppc/errors.hpp"

namespace ppc {

void ControllerParams::validate(int order, int theta_dim) const {
  if (static_cast<int>(c.size()) != order) {
    std::ostringstream os;
    os << "controller needs " << order << " gains c_k, got " << c.size();
    throw InvalidParams(os.str());
  }
  for (double ck : c)
    if (!(ck > 0.0)) throw InvalidParams("controller gains c_k must be positive");
  if (gamma.rows() != theta_dim || gamma.cols() != theta_dim)
    throw InvalidParams("adaptation gain must be theta_dim x theta_dim");
  if (!gamma.isApprox(gamma.transpose(), 1e-12)) throw InvalidParams("adaptation gain must be symmetric");
  if (theta_dim > 0 && !is_positive_definite(gamma)) throw InvalidParams("adaptation gain must be positive definite");
  beta2.validate();
}

TrackingError tracking_error(double y, double y_hat, const PerformanceFunction& beta2, double t) {
  const double eps = y - y_hat;
  const double bound = pf_eval(beta2, t);
  if (!(std::abs(eps) < bound)) throw FunnelViolation(eps, bound, t, "tracking error");
  const NormalizedError z = normalize(eps, beta2, t);
  return {eps, z, transform_o(z)};
}

double mu(NormalizedError zeta, double beta2_val) {
  const double z = zeta.value();
  return 2.0 / (beta2_val * (1.0 - z * z));
}

namespace {

// Flat variable vector [x_1..x_n, ŷ^(0..n−1), β₂^(0..n), θ̂_1..θ̂_d].
struct Layout {
  int n;
  int d;
  int x(int j) const { return j - 1; }  // j = 1..n
  int yh(int j) const { return n + j; }  // j = 0..n−1
  int b(int j) const { return 2 * n + j; }  // j = 0..n
  int th(int p) const { return 3 * n + 1 + p; }
  int size() const { return 3 * n + 1 + d; }
};

struct Context {
  Layout lay;
  const ControllerParams& params;
  std::span<const std::vector<Expr>> phi;
};

template <typename T>
struct Levels {
  T zeta{};
  T xi{};
  T mu{};
  std::vector<T> e;      // e_1..e_K
  std::vector<T> alpha;  // α_1..α_K (α_K absent when the top level is the control)
  std::vector<T> tau;    // τ_K
  T u_bar{};
};

template <typename T>
std::vector<T> gamma_times(const DenseMatrix& g, const std::vector<T>& v) {
  std::vector<T> out(v.size(), T(0.0));
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t s = 0; s < v.size(); ++s)
      out[r] = out[r] + g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * v[s];
  return out;
}

template <typename T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

// Levels 1..K at scalar type T. The partials of α_1..α_{K−1} needed by the
// upper levels come from one pass of the (K−1)-level recursion over Dual<T>
// per seeded input.
template <int K, typename T>
Levels<T> compute_levels(const std::vector<T>& v, const Context& ctx, bool top_is_control, double nu) {
  using std::log1p;
  const Layout& lay = ctx.lay;
  const int d = lay.d;
  const auto& c = ctx.params.c;
  const DenseMatrix& gamma = ctx.params.gamma;

  const std::vector<T> xs(v.begin(), v.begin() + lay.n);
  std::vector<T> theta(v.begin() + lay.th(0), v.begin() + lay.th(0) + d);
  std::vector<std::vector<T>> phi(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    auto& row = phi[static_cast<std::size_t>(k - 1)];
    for (const Expr& ex : ctx.phi[static_cast<std::size_t>(k - 1)])
      row.push_back(ex.template eval<T>(std::span<const T>(xs), T(0.0)));
  }

  Levels<T> out;
  const T b0 = v[lay.b(0)];
  const T eps = v[lay.x(1)] - v[lay.yh(0)];
  out.zeta = eps / b0;
  out.xi = log1p(out.zeta) - log1p(-out.zeta);
  out.mu = T(2.0) / (b0 * (T(1.0) - out.zeta * out.zeta));
  out.e.push_back(out.xi);
  out.alpha.push_back(-c[0] * out.xi / out.mu - dot(theta, phi[0]) + out.zeta * v[lay.b(1)]);
  out.tau = phi[0];
  for (auto& t : out.tau) t = t * (out.mu * out.xi);

  if constexpr (K >= 2) {
    // grad[j][s] = ∂α_{j+1}/∂v_s for j = 0..K−2.
    const auto nv = static_cast<std::size_t>(lay.size());
    std::vector<std::vector<T>> grad(static_cast<std::size_t>(K - 1), std::vector<T>(nv, T(0.0)));
    std::vector<int> seeds;
    for (int j = 1; j <= K - 1; ++j) seeds.push_back(lay.x(j));
    for (int j = 0; j <= K - 2; ++j) seeds.push_back(lay.yh(j));
    for (int j = 0; j <= K - 1; ++j) seeds.push_back(lay.b(j));
    for (int p = 0; p < d; ++p) seeds.push_back(lay.th(p));
    std::vector<Dual<T>> vd(v.begin(), v.end());
    for (int s : seeds) {
      vd[static_cast<std::size_t>(s)].der = T(1.0);
      const Levels<Dual<T>> sub = compute_levels<K - 1, Dual<T>>(vd, ctx, false, 0.0);
      for (int j = 0; j < K - 1; ++j)
        grad[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = sub.alpha[static_cast<std::size_t>(j)].der;
      vd[static_cast<std::size_t>(s)].der = T(0.0);
    }

    for (int k = 2; k <= K; ++k) {
      const auto& g = grad[static_cast<std::size_t>(k - 2)];  // partials of α_{k−1}
      const T alpha_prev = out.alpha[static_cast<std::size_t>(k - 2)];
      const T ek = v[lay.x(k)] - alpha_prev - v[lay.yh(k - 1)];
      out.e.push_back(ek);

      std::vector<T> omega = phi[static_cast<std::size_t>(k - 1)];
      for (int j = 1; j <= k - 1; ++j)
        for (int p = 0; p < d; ++p)
          omega[static_cast<std::size_t>(p)] = omega[static_cast<std::size_t>(p)] -
                                               g[static_cast<std::size_t>(lay.x(j))] * phi[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(p)];
      for (int p = 0; p < d; ++p)
        out.tau[static_cast<std::size_t>(p)] = out.tau[static_cast<std::size_t>(p)] + omega[static_cast<std::size_t>(p)] * ek;

      const std::vector<T> gamma_tau = gamma_times(gamma, out.tau);
      const std::vector<T> gamma_omega = gamma_times(gamma, omega);

      T known(0.0);
      for (int j = 1; j <= k - 1; ++j) known = known + g[static_cast<std::size_t>(lay.x(j))] * v[lay.x(j + 1)];
      for (int j = 0; j <= k - 2; ++j) known = known + g[static_cast<std::size_t>(lay.yh(j))] * v[lay.yh(j + 1)];
      for (int j = 0; j <= k - 1; ++j) known = known + g[static_cast<std::size_t>(lay.b(j))] * v[lay.b(j + 1)];
      for (int p = 0; p < d; ++p) known = known + g[static_cast<std::size_t>(lay.th(p))] * gamma_tau[static_cast<std::size_t>(p)];

      // Σ_{j=2}^{k−1} (∂α_{j−1}/∂θ̂)·Γ·ω_k·e_j
      T cross_adapt(0.0);
      for (int j = 2; j <= k - 1; ++j) {
        const auto& gj = grad[static_cast<std::size_t>(j - 2)];
        T s(0.0);
        for (int p = 0; p < d; ++p) s = s + gj[static_cast<std::size_t>(lay.th(p))] * gamma_omega[static_cast<std::size_t>(p)];
        cross_adapt = cross_adapt + s * out.e[static_cast<std::size_t>(j - 1)];
      }

      const T cross = k == 2 ? out.mu * out.e[0] : out.e[static_cast<std::size_t>(k - 2)];
      const T ck(c[static_cast<std::size_t>(k - 1)]);
      if (k == K && top_is_control) {
        out.u_bar = ck * ek + cross + dot(theta, omega) - T(nu) - known - cross_adapt;
      } else {
        out.alpha.push_back(-ck * ek - cross - dot(theta, omega) + known + cross_adapt);
      }
    }
  } else {
    (void)top_is_control;
    (void)nu;
  }
  return out;
}

template <typename T>
std::vector<T> flatten(std::span<const double> x, std::span<const double> yhat, std::span<const double> beta2,
                       std::span<const double> theta_hat, const Layout& lay) {
  std::vector<T> v(static_cast<std::size_t>(lay.size()), T(0.0));
  for (int j = 1; j <= lay.n; ++j) v[static_cast<std::size_t>(lay.x(j))] = T(x[static_cast<std::size_t>(j - 1)]);
  for (int j = 0; j < lay.n; ++j) v[static_cast<std::size_t>(lay.yh(j))] = T(yhat[static_cast<std::size_t>(j)]);
  for (int j = 0; j <= lay.n; ++j) v[static_cast<std::size_t>(lay.b(j))] = T(beta2[static_cast<std::size_t>(j)]);
  for (int p = 0; p < lay.d; ++p) v[static_cast<std::size_t>(lay.th(p))] = T(theta_hat[static_cast<std::size_t>(p)]);
  return v;
}

Layout check_inputs(std::span<const double> x, std::span<const double> yhat, std::span<const double> beta2,
                    std::span<const double> theta_hat, const ControllerParams& params,
                    std::span<const std::vector<Expr>> regressors) {
  const int n = static_cast<int>(regressors.size());
  if (n < 2 || n > kMaxOrder) {
    std::ostringstream os;
    os << "controller supports orders 2.." << kMaxOrder << ", got " << n;
    throw OrderTooHigh(os.str());
  }
  const int d = static_cast<int>(theta_hat.size());
  if (static_cast<int>(x.size()) != n || static_cast<int>(yhat.size()) != n ||
      static_cast<int>(beta2.size()) != n + 1 || static_cast<int>(params.c.size()) != n ||
      params.gamma.rows() != d || params.gamma.cols() != d)
    throw InvalidParams("controller inputs have inconsistent sizes");
  for (const auto& row : regressors)
    if (static_cast<int>(row.size()) != d) throw InvalidParams("regressor width differs from theta_hat size");
  return Layout{n, d};
}

void check_funnel(std::span<const double> x, std::span<const double> yhat, std::span<const double> beta2,
                  double t) {
  const double eps = x[0] - yhat[0];
  if (!(std::abs(eps) < beta2[0]) || !(std::abs(eps / beta2[0]) < 1.0))
    throw FunnelViolation(eps, beta2[0], t, "tracking error");
}

void require_finite(const ControlEvaluation& ev, double t) {
  auto bad = [](double v) { return !std::isfinite(v); };
  bool ok = !bad(ev.u_bar) && !bad(ev.u) && !bad(ev.mu);
  for (double v : ev.e) ok = ok && !bad(v);
  for (double v : ev.alpha) ok = ok && !bad(v);
  for (double v : ev.tau) ok = ok && !bad(v);
  if (!ok) {
    std::ostringstream os;
    os << "control evaluation produced a non-finite value at t = " << t;
    throw NonFiniteState(os.str());
  }
}

template <int K>
Levels<double> run_top(const std::vector<double>& v, const Context& ctx, bool control, double nu) {
  return compute_levels<K, double>(v, ctx, control, nu);
}

Levels<double> dispatch(int k, const std::vector<double>& v, const Context& ctx, bool control, double nu) {
  switch (k) {
    case 1:
      return run_top<1>(v, ctx, control, nu);
    case 2:
      return run_top<2>(v, ctx, control, nu);
    case 3:
      return run_top<3>(v, ctx, control, nu);
    case 4:
      return run_top<4>(v, ctx, control, nu);
    default:
      throw OrderTooHigh("controller level out of range");
  }
}

template <int K>
void gradient_top(const std::vector<double>& v, const Context& ctx, VirtualControlGradient& out) {
  std::vector<Dual<double>> vd(v.begin(), v.end());
  std::vector<double> grad(v.size(), 0.0);
  for (std::size_t s = 0; s < v.size(); ++s) {
    vd[s].der = 1.0;
    const Levels<Dual<double>> lv = compute_levels<K, Dual<double>>(vd, ctx, false, 0.0);
    grad[s] = lv.alpha.back().der;
    out.value = lv.alpha.back().val;
    vd[s].der = 0.0;
  }
  const Layout& lay = ctx.lay;
  for (int j = 1; j <= lay.n; ++j) out.d_x.push_back(grad[static_cast<std::size_t>(lay.x(j))]);
  for (int j = 0; j < lay.n; ++j) out.d_yhat.push_back(grad[static_cast<std::size_t>(lay.yh(j))]);
  for (int j = 0; j <= lay.n; ++j) out.d_beta2.push_back(grad[static_cast<std::size_t>(lay.b(j))]);
  for (int p = 0; p < lay.d; ++p) out.d_theta.push_back(grad[static_cast<std::size_t>(lay.th(p))]);
}

void check_level(int level, const Layout& lay) {
  if (level < 1 || level > lay.n - 1) {
    std::ostringstream os;
    os << "virtual control level " << level << " outside 1.." << lay.n - 1;
    throw InvalidParams(os.str());
  }
}

}  // namespace

ControlEvaluation backstepping(std::span<const double> x, std::span<const double> yhat_derivs,
                               std::span<const double> beta2_derivs, const AdaptiveState& ad, double nu,
                               const ControllerParams& params, std::span<const std::vector<Expr>> regressors,
                               double t) {
  const Layout lay = check_inputs(x, yhat_derivs, beta2_derivs, ad.theta_hat, params, regressors);
  check_funnel(x, yhat_derivs, beta2_derivs, t);
  const Context ctx{lay, params, regressors};
  const std::vector<double> v = flatten<double>(x, yhat_derivs, beta2_derivs, ad.theta_hat, lay);
  const Levels<double> lv = dispatch(lay.n, v, ctx, true, nu);

  ControlEvaluation ev;
  ev.epsilon = x[0] - yhat_derivs[0];
  ev.zeta = lv.zeta;
  ev.xi = lv.xi;
  ev.mu = lv.mu;
  ev.e = lv.e;
  ev.alpha = lv.alpha;
  ev.tau = lv.tau;
  ev.u_bar = lv.u_bar;
  ev.u = params.nussbaum(ad.chi) * ev.u_bar;
  require_finite(ev, t);
  return ev;
}

ControlEvaluation closed_form_n2(std::span<const double> x, std::span<const double> yhat_derivs,
                                 std::span<const double> beta2_derivs, const AdaptiveState& ad, double nu,
                                 const ControllerParams& params, std::span<const std::vector<Expr>> regressors,
                                 double t) {
  if (regressors.size() != 2) throw InvalidParams("closed_form_n2 needs a second-order plant");
  check_inputs(x, yhat_derivs, beta2_derivs, ad.theta_hat, params, regressors);
  check_funnel(x, yhat_derivs, beta2_derivs, t);

  const std::size_t d = ad.theta_hat.size();
  const double x1 = x[0];
  const double x2 = x[1];
  const double yh = yhat_derivs[0];
  const double yh_dot = yhat_derivs[1];
  const double b = beta2_derivs[0];
  const double b_dot = beta2_derivs[1];
  const double b_ddot = beta2_derivs[2];
  const double c1 = params.c[0];
  const double c2 = params.c[1];
  const auto& th = ad.theta_hat;

  std::vector<double> phi1(d), dphi1(d), phi2(d);
  for (std::size_t p = 0; p < d; ++p) {
    phi1[p] = regressors[0][p](x);
    dphi1[p] = regressors[0][p].derivative(1)(x);
    phi2[p] = regressors[1][p](x);
  }
  auto inner = [d](const std::vector<double>& a, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t p = 0; p < d; ++p) s += a[p] * w[p];
    return s;
  };

  const double eps = x1 - yh;
  const double zeta = eps / b;
  const double xi = std::log((1.0 + zeta) / (1.0 - zeta));
  const double one_m_z2 = 1.0 - zeta * zeta;
  const double mu_v = 2.0 / (b * one_m_z2);
  const double e1 = xi;

  // α₁ = −c₁·ξ·β(1 − ζ²)/2 − θ̂ᵀφ₁ + ζβ̇
  const double alpha1 = -c1 * xi * b * one_m_z2 / 2.0 - inner(th, phi1) + zeta * b_dot;
  const double shape = 1.0 - zeta * xi;  // ∂(ξβ(1−ζ²)/2)/∂ε
  const double da_dx1 = -c1 * shape - inner(th, dphi1) + b_dot / b;
  const double da_dyh = c1 * shape - b_dot / b;
  const double da_db = -c1 * (-zeta * shape + xi * one_m_z2 / 2.0) - zeta * b_dot / b;
  const double da_dbdot = zeta;

  const double e2 = x2 - alpha1 - yh_dot;
  std::vector<double> omega2(d), tau2(d);
  for (std::size_t p = 0; p < d; ++p) {
    omega2[p] = phi2[p] - da_dx1 * phi1[p];
    tau2[p] = mu_v * e1 * phi1[p] + omega2[p] * e2;
  }
  std::vector<double> gamma_tau(d, 0.0);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t s = 0; s < d; ++s)
      gamma_tau[r] += params.gamma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * tau2[s];

  // ∂α₁/∂θ̂ = −φ₁
  const double u_bar = c2 * e2 + mu_v * e1 + inner(th, omega2) - nu - da_dx1 * x2 - da_dyh * yh_dot -
                       da_db * b_dot - da_dbdot * b_ddot + inner(phi1, gamma_tau);

  ControlEvaluation ev;
  ev.epsilon = eps;
  ev.zeta = zeta;
  ev.xi = xi;
  ev.mu = mu_v;
  ev.e = {e1, e2};
  ev.alpha = {alpha1};
  ev.tau = tau2;
  ev.u_bar = u_bar;
  ev.u = params.nussbaum(ad.chi) * u_bar;
  require_finite(ev, t);
  return ev;
}

AdaptationRates adaptation_derivatives(const ControlEvaluation& eval, const DenseMatrix& gamma) {
  AdaptationRates r;
  const auto d = static_cast<Eigen::Index>(eval.tau.size());
  const Eigen::VectorXd tau = Eigen::Map<const Eigen::VectorXd>(eval.tau.data(), d);
  const Eigen::VectorXd rate = gamma * tau;
  r.theta_hat_dot.assign(rate.data(), rate.data() + d);
  r.chi_dot = eval.e.back() * eval.u_bar;
  return r;
}

double virtual_control(int level, std::span<const double> x, std::span<const double> yhat_derivs,
                       std::span<const double> beta2_derivs, std::span<const double> theta_hat,
                       const ControllerParams& params, std::span<const std::vector<Expr>> regressors) {
  const Layout lay = check_inputs(x, yhat_derivs, beta2_derivs, theta_hat, params, regressors);
  check_level(level, lay);
  const Context ctx{lay, params, regressors};
  const std::vector<double> v = flatten<double>(x, yhat_derivs, beta2_derivs, theta_hat, lay);
  return dispatch(level, v, ctx, false, 0.0).alpha.back();
}

VirtualControlGradient virtual_control_gradient(int level, std::span<const double> x,
                                                std::span<const double> yhat_derivs,
                                                std::span<const double> beta2_derivs,
                                                std::span<const double> theta_hat, const ControllerParams& params,
                                                std::span<const std::vector<Expr>> regressors) {
  const Layout lay = check_inputs(x, yhat_derivs, beta2_derivs, theta_hat, params, regressors);
  check_level(level, lay);
  const Context ctx{lay, params, regressors};
  const std::vector<double> v = flatten<double>(x, yhat_derivs, beta2_derivs, theta_hat, lay);
  VirtualControlGradient out;
  switch (level) {
    case 1:
      gradient_top<1>(v, ctx, out);
      break;
    case 2:
      gradient_top<2>(v, ctx, out);
      break;
    case 3:
      gradient_top<3>(v, ctx, out);
      break;
    default:
      throw OrderTooHigh("virtual control level out of range");
  }
  return out;
}

}  // namespace ppc
