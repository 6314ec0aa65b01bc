#pragma once

// Explicit Runge-Kutta integrator of order 8(5,3) after Dormand & Prince
// (Hairer's DOP853 tableau), templated on an Eigen state vector whose scalar
// may be real or complex.  Step control uses the combined 5th/3rd order
// error estimate.  Targets are hit exactly by clamping the final step of a
// segment, which is also how staged propagation re-seeds long sweeps.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace valdist {

class integration_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  bool dense_output = false;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    if (!(max_step > 0.0))
      throw std::invalid_argument("IntegratorConfig: max_step must be positive");
  }
};

namespace dop853_detail {

// Node coefficients.
constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;

// Runge-Kutta matrix.
constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;

// Solution weights.
constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;

// 3rd order error weights.
constexpr double e31 = 0.244094488188976377952755905512e+00;
constexpr double e32 = 0.733846688281611857341361741547e+00;
constexpr double e33 = 0.220588235294117647058823529412e-01;

// 5th order error weights.
constexpr double e51 = 0.1312004499419488073250102996e-01;
constexpr double e56 = -0.1225156446376204440720569753e+01;
constexpr double e57 = -0.4957589496572501915214079952e+00;
constexpr double e58 = 0.1664377182454986536961530415e+01;
constexpr double e59 = -0.3503288487499736816886487290e+00;
constexpr double e510 = 0.3341791187130174790297318841e+00;
constexpr double e511 = 0.8192320648511571246570742613e-01;
constexpr double e512 = -0.2235530786388629525884427845e-01;

constexpr double machine_eps = std::numeric_limits<double>::epsilon();

template <class Scalar>
double mag(const Scalar& s) {
  return std::abs(s);
}

}  // namespace dop853_detail

template <class State, class Rhs>
class Dop853 {
 public:
  Dop853(Rhs rhs, const IntegratorConfig& cfg) : rhs_(std::move(rhs)), cfg_(cfg) {
    cfg_.validate();
  }

  // Advances (x, y) to x_end (x_end >= x).  observer(x, y) fires after every
  // accepted step when cfg.dense_output is set.
  template <class Observer>
  void advance(double& x, State& y, double x_end, Observer&& observer) {
    if (x_end < x) throw std::invalid_argument("Dop853: backward integration not supported");
    if (x_end == x) return;
    State k1 = eval(x, y);
    double h = initial_step(x, y, k1, x_end - x);
    std::size_t steps = 0;
    bool last_rejected = false;
    while (x < x_end) {
      if (++steps > kStepLimit)
        throw integration_error("Dop853: step limit exceeded");
      h = std::min({h, cfg_.max_step, x_end - x});
      if (h <= 16.0 * dop853_detail::machine_eps * std::max(std::abs(x), 1.0))
        throw integration_error("Dop853: step size underflow at x = " + std::to_string(x));

      const StepTrial trial = try_step(x, y, k1, h);
      if (trial.err <= 1.0) {
        x += h;
        y = trial.ynew;
        k1 = eval(x, y);
        double scale = trial.err == 0.0 ? kMaxScale
                                        : kSafety * std::pow(trial.err, -0.125);
        scale = std::clamp(scale, kMinScale, kMaxScale);
        if (last_rejected) scale = std::min(scale, 1.0);
        h *= scale;
        last_rejected = false;
        if (cfg_.dense_output) observer(x, y);
      } else {
        double scale = kSafety * std::pow(trial.err, -0.125);
        h *= std::max(scale, kMinScale);
        last_rejected = true;
      }
    }
  }

  void advance(double& x, State& y, double x_end) {
    advance(x, y, x_end, [](double, const State&) {});
  }

 private:
  struct StepTrial {
    State ynew;
    double err;
  };

  State eval(double x, const State& y) {
    State dy(y.size());
    rhs_(x, y, dy);
    return dy;
  }

  StepTrial try_step(double x, const State& y, const State& k1, double h) {
    using namespace dop853_detail;
    State w = y + h * (a21 * k1);
    const State k2 = eval(x + c2 * h, w);
    w = y + h * (a31 * k1 + a32 * k2);
    const State k3 = eval(x + c3 * h, w);
    w = y + h * (a41 * k1 + a43 * k3);
    const State k4 = eval(x + c4 * h, w);
    w = y + h * (a51 * k1 + a53 * k3 + a54 * k4);
    const State k5 = eval(x + c5 * h, w);
    w = y + h * (a61 * k1 + a64 * k4 + a65 * k5);
    const State k6 = eval(x + c6 * h, w);
    w = y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = eval(x + c7 * h, w);
    w = y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7);
    const State k8 = eval(x + c8 * h, w);
    w = y + h * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8);
    const State k9 = eval(x + c9 * h, w);
    w = y + h * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7 + a108 * k8 +
                 a109 * k9);
    const State k10 = eval(x + c10 * h, w);
    w = y + h * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7 + a118 * k8 +
                 a119 * k9 + a1110 * k10);
    const State k11 = eval(x + c11 * h, w);
    w = y + h * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7 + a128 * k8 +
                 a129 * k9 + a1210 * k10 + a1211 * k11);
    const State k12 = eval(x + h, w);

    const State sum = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 +
                      b11 * k11 + b12 * k12;
    StepTrial trial{y + h * sum, 0.0};

    double err3 = 0.0, err5 = 0.0;
    const Eigen::Index n = y.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sk =
          cfg_.abs_tol + cfg_.rel_tol * std::max(mag(y[i]), mag(trial.ynew[i]));
      const auto e3 = sum[i] - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
      const auto e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] +
                      e510 * k10[i] + e511 * k11[i] + e512 * k12[i];
      const double m3 = mag(e3) / sk, m5 = mag(e5) / sk;
      err3 += m3 * m3;
      err5 += m5 * m5;
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    trial.err = h * err5 * std::sqrt(1.0 / (static_cast<double>(n) * deno));
    return trial;
  }

  double initial_step(double x, const State& y, const State& f0, double span) {
    using dop853_detail::mag;
    const Eigen::Index n = y.size();
    double dnf = 0.0, dny = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sk = cfg_.abs_tol + cfg_.rel_tol * mag(y[i]);
      dnf += std::pow(mag(f0[i]) / sk, 2);
      dny += std::pow(mag(y[i]) / sk, 2);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min({h, span, cfg_.max_step});
    const State y1 = y + h * f0;
    State f1(y.size());
    rhs_(x + h, y1, f1);
    double der2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sk = cfg_.abs_tol + cfg_.rel_tol * mag(y[i]);
      der2 += std::pow(mag(f1[i] - f0[i]) / sk, 2);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 =
        der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.125);
    return std::min({100.0 * h, h1, span, cfg_.max_step});
  }

  static constexpr double kSafety = 0.9;
  static constexpr double kMinScale = 1.0 / 3.0;
  static constexpr double kMaxScale = 6.0;
  static constexpr std::size_t kStepLimit = 20'000'000;

  Rhs rhs_;
  IntegratorConfig cfg_;
};

// One-shot integration from x0 to x1.
template <class State, class Rhs>
State integrate_to(Rhs&& rhs, double x0, State y, double x1, const IntegratorConfig& cfg) {
  Dop853<State, std::decay_t<Rhs>> solver(std::forward<Rhs>(rhs), cfg);
  double x = x0;
  solver.advance(x, y, x1);
  return y;
}

// Integrates through an ascending list of stop points, landing on each one
// exactly and invoking on_stop(x_stop, state) there.
template <class State, class Rhs, class OnStop>
void integrate_path(Rhs&& rhs, double x0, State y, std::span<const double> stops,
                    const IntegratorConfig& cfg, OnStop&& on_stop) {
  Dop853<State, std::decay_t<Rhs>> solver(std::forward<Rhs>(rhs), cfg);
  double x = x0;
  for (double stop : stops) {
    if (stop < x) throw std::invalid_argument("integrate_path: stops must be ascending");
    if (stop > x) solver.advance(x, y, stop);
    on_stop(stop, y);
  }
}

}  // namespace valdist
