#include "optomech/langevin.hpp"

#include <cmath>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

const cplx I(0.0, 1.0);

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

double phonon_occupation(const SystemParams& p, const SteadyState& s, PhononNoise noise) {
    return noise == PhononNoise::thermal ? p.m_th : s.m_bar;
}

}  // namespace

Eigen::MatrixXcd LinearLangevinSystem::sqrt_gamma() const {
    if (gamma_kind == GammaKind::input_coupling) return gamma;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(gamma.rows(), gamma.cols());
    for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
        for (Eigen::Index j = 0; j < gamma.cols(); ++j) {
            if (gamma(i, j) != cplx(0.0)) out(i, j) = std::sqrt(gamma(i, j));
        }
    }
    return out;
}

double LinearLangevinSystem::meta(const std::string& key) const {
    for (const auto& [k, v] : metadata) {
        if (k == key) return v;
    }
    throw ValidationError("system '" + name + "' has no metadata entry '" + key + "'");
}

void LinearLangevinSystem::check_consistency() const {
    const auto n = static_cast<Eigen::Index>(basis.size());
    const auto k = static_cast<Eigen::Index>(channels.size());
    if (M.rows() != n || M.cols() != n || gamma.rows() != n || gamma.cols() != n || drive.size() != n ||
        input_map.rows() != n || input_map.cols() != k || noise_psd_pos.size() != k || noise_psd_neg.size() != k ||
        static_cast<Eigen::Index>(basis_partner.size()) != n ||
        static_cast<Eigen::Index>(channel_partner.size()) != k) {
        throw ValidationError("system '" + name + "': inconsistent dimensions");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (gamma(i, i).real() < 0.0) throw ValidationError("system '" + name + "': negative decay on diagonal");
    }
}

LinearLangevinSystem build_first_order(const FirstOrderCoefficients& c) {
    LinearLangevinSystem s;
    s.name = "first_order";
    s.basis = {"a", "a_dag", "b", "b_dag"};
    const double d = c.delta + c.f;
    const cplx ig = I * c.g;
    s.M.resize(4, 4);
    s.M << cplx(-0.5 * c.kappa, d), 0.0, ig, ig,
           0.0, cplx(-0.5 * c.kappa, -d), -ig, -ig,
           ig, ig, cplx(-0.5 * c.Gamma, -c.Omega), 0.0,
           -ig, -ig, 0.0, cplx(-0.5 * c.Gamma, c.Omega);
    s.gamma = Eigen::VectorXcd(vec({c.kappa, c.kappa, c.Gamma, c.Gamma}).cast<cplx>()).asDiagonal();
    s.gamma_kind = GammaKind::diagonal_rates;
    s.channels = {"a_in", "a_in_dag", "b_in", "b_in_dag"};
    s.input_map = Eigen::MatrixXcd::Identity(4, 4);
    s.noise_psd_pos = vec({1.0, 0.0, c.m_noise + 1.0, c.m_noise});
    s.noise_psd_neg = vec({0.0, 1.0, c.m_noise, c.m_noise + 1.0});
    s.drive.resize(4);
    s.drive << c.alpha, std::conj(c.alpha), 0.0, 0.0;
    s.frame = Frame::rotating;
    s.basis_partner = {1, 0, 3, 2};
    s.channel_partner = {1, 0, 3, 2};
    s.metadata = {{"delta", c.delta}, {"f", c.f}, {"g", c.g}, {"kappa", c.kappa},
                  {"Gamma", c.Gamma}, {"Omega", c.Omega}, {"m_noise", c.m_noise}};
    s.check_consistency();
    return s;
}

LinearLangevinSystem build_first_order(const SystemParams& p, const SteadyState& st, PhononNoise noise) {
    p.validate();
    FirstOrderCoefficients c;
    c.delta = p.detuning_from_bare();
    c.f = st.f;
    c.g = p.g0 * std::sqrt(st.n_bar);
    c.kappa = p.kappa;
    c.Gamma = p.Gamma;
    c.Omega = p.Omega;
    c.m_noise = phonon_occupation(p, st, noise);
    c.alpha = p.alpha;
    auto s = build_first_order(c);
    s.metadata.emplace_back("n_bar", st.n_bar);
    return s;
}

LinearLangevinSystem build_second_order(const SystemParams& p, const SteadyState& st, PhononNoise noise) {
    p.validate();
    LinearLangevinSystem s;
    s.name = "second_order";
    s.basis = {"a", "ab", "ab_dag"};
    const double delta = p.detuning_from_bare();
    const double gam = p.kappa + p.Gamma;
    const double n = st.n_bar;
    const double m = st.m_bar;
    const cplx ig0 = I * p.g0;
    s.M.resize(3, 3);
    s.M << cplx(-0.5 * p.kappa, delta), ig0, ig0,
           ig0 * (m + n + 1.0), cplx(-0.5 * gam, -(p.Omega - delta)), 0.0,
           ig0 * (m - n), 0.0, cplx(-0.5 * gam, p.Omega + delta);
    const double kb = p.kappa * std::abs(st.b_bar);
    const double gn = p.Gamma * std::sqrt(n);
    s.gamma.resize(3, 3);
    s.gamma << p.kappa, 0.0, 0.0,
               kb, gn, 0.0,
               kb, 0.0, gn;
    s.gamma_kind = GammaKind::input_coupling;
    s.channels = {"a_in", "b_in", "b_in_dag"};
    s.input_map = Eigen::MatrixXcd::Identity(3, 3);
    const double mt = phonon_occupation(p, st, noise);
    s.noise_psd_pos = vec({1.0, mt + 1.0, mt});
    s.noise_psd_neg = vec({0.0, mt, mt + 1.0});
    s.drive.resize(3);
    s.drive << p.alpha, 0.0, 0.0;
    s.frame = Frame::rotating;
    s.basis_partner = {0, 1, 2};
    s.channel_partner = {0, 2, 1};
    s.metadata = {{"delta", delta}, {"gamma_total", gam}, {"n_bar", n}, {"m_bar", m}, {"m_noise", mt}};
    if (n == 0.0) s.warnings.push_back("n_bar = 0: phonon input rows of the decay matrix vanish");
    s.check_consistency();
    return s;
}

LinearLangevinSystem build_minimal_fourth(const SystemParams& p, const SteadyState& st, PhononNoise noise) {
    p.validate();
    LinearLangevinSystem s;
    s.name = "minimal_fourth";
    s.basis = {"N", "B"};
    const double gam = p.kappa + p.Gamma;
    s.M.resize(2, 2);
    s.M << -2.0 * p.kappa, 0.0,
           I * p.g0, cplx(-0.5 * gam, -p.Omega);
    s.gamma = Eigen::VectorXcd(vec({2.0 * p.kappa, gam}).cast<cplx>()).asDiagonal();
    s.gamma_kind = GammaKind::diagonal_rates;
    const double n = st.n_bar;
    const double sn = std::sqrt(n);
    s.channels = {"a_in", "a_in_dag", "b_in"};
    s.input_map = Eigen::MatrixXcd::Zero(2, 3);
    s.input_map(0, 0) = s.input_map(0, 1) = 0.5 * sn * n;
    s.input_map(1, 0) = s.input_map(1, 1) = std::sqrt(p.kappa / gam * n) * st.b_bar;
    s.input_map(1, 2) = std::sqrt(p.Gamma / gam) * n;
    const double mt = phonon_occupation(p, st, noise);
    s.noise_psd_pos = vec({1.0, 0.0, mt + 1.0});
    s.noise_psd_neg = vec({0.0, 1.0, mt});
    s.drive.resize(2);
    s.drive << 2.0 * sn * n * p.alpha.real(), 2.0 * sn * st.b_bar * p.alpha.real();
    s.frame = Frame::rotating;
    s.basis_partner = {0, 1};
    s.channel_partner = {1, 0, 2};
    s.metadata = {{"gamma_total", gam}, {"n_bar", n}, {"m_noise", mt}};
    s.check_consistency();
    return s;
}

LinearLangevinSystem build_minimal_fourth(const SystemParams& p) {
    return build_minimal_fourth(p, solve_cubic_steady(p, p.alpha));
}

LinearLangevinSystem build_quadratic(const SystemParams& p, const SteadyState& st, PhononNoise noise) {
    p.validate();
    if (p.g1 == 0.0) throw DegenerateSystemError("quadratic system requires g1 > 0");
    const auto [w, W] = shifted_frequencies(p);
    LinearLangevinSystem s;
    s.name = "quadratic";
    s.basis = {"c", "c_dag", "n", "d", "d_dag", "m"};
    const double n = st.n_bar;
    const double m = st.m_bar;
    const double g2 = p.g2;
    const double gbp = p.g1 + p.g2;  // g2 β+
    const double gbm = p.g1 - p.g2;  // g2 β−
    const double k = p.kappa;
    const double G = p.Gamma;

    Eigen::Matrix3cd aa, ab, ba, bb;
    const double wa = 2.0 * (w - gbp * m);
    aa << cplx(-k, wa), 0.0, -I * 0.5 * g2 * m,
          0.0, cplx(-k, -wa), I * 0.5 * g2 * m,
          I * g2 * m, -I * g2 * m, -k;
    Eigen::Matrix3cd pattern;
    pattern << 1.0, 1.0, -1.0,
               -1.0, -1.0, 1.0,
               0.0, 0.0, 0.0;
    ab = I * (0.5 * g2) * (n + 0.5) * pattern;
    ba << g2, g2, -gbm,
          -g2, -g2, gbm,
          0.0, 0.0, 0.0;
    ba *= I * (m + 0.5);
    const double wb = 2.0 * (W + gbp * n);
    bb << cplx(-G, -wb), 0.0, -I * gbm * n,
          0.0, cplx(-G, wb), I * gbm * n,
          2.0 * I * gbm * n, -2.0 * I * gbm * n, -G;
    s.M.resize(6, 6);
    s.M << aa, ab, ba, bb;

    double beta_diff = 0.0;
    if (g2 > 0.0) {
        // Same partitions with β± written out, to confirm the product form.
        const auto [bp, bm] = beta_pm(p.g1, p.g2);
        Eigen::Matrix3cd ba2, bb2;
        ba2 << 1.0, 1.0, -bm,
               -1.0, -1.0, bm,
               0.0, 0.0, 0.0;
        ba2 *= I * g2 * (m + 0.5);
        const double wb2 = 2.0 * (W + g2 * bp * n);
        bb2 << cplx(-G, -wb2), 0.0, -I * g2 * bm * n,
               0.0, cplx(-G, wb2), I * g2 * bm * n,
               I * 2.0 * g2 * bm * n, -I * 2.0 * g2 * bm * n, -G;
        const double wa2 = 2.0 * (w - g2 * bp * m);
        beta_diff = std::max({(ba - ba2).cwiseAbs().maxCoeff(), (bb - bb2).cwiseAbs().maxCoeff(),
                              std::abs(wa - wa2)});
    }

    const double dm = std::abs(st.d_bar);
    s.gamma = Eigen::VectorXcd(
                  vec({n * k, n * k, 4.0 * n * k, 2.0 * dm * G, 2.0 * dm * G, 4.0 * dm * G}).cast<cplx>())
                  .asDiagonal();
    s.gamma_kind = GammaKind::diagonal_rates;
    s.channels = {"a_in", "a_in_dag", "b_in", "b_in_dag"};
    s.input_map = Eigen::MatrixXcd::Zero(6, 4);
    s.input_map(0, 0) = 1.0;
    s.input_map(1, 1) = 1.0;
    s.input_map(2, 0) = s.input_map(2, 1) = 0.5;
    s.input_map(3, 2) = 1.0;
    s.input_map(4, 3) = 1.0;
    s.input_map(5, 2) = s.input_map(5, 3) = 0.5;
    const double mt = phonon_occupation(p, st, noise);
    s.noise_psd_pos = vec({1.0, 0.0, mt + 1.0, mt});
    s.noise_psd_neg = vec({0.0, 1.0, mt, mt + 1.0});
    s.drive = Eigen::VectorXcd::Zero(6);
    s.frame = Frame::absolute;
    s.basis_partner = {1, 0, 2, 4, 3, 5};
    s.channel_partner = {1, 0, 3, 2};
    s.metadata = {{"omega_bare", p.omega}, {"Omega_bare", p.Omega}, {"omega_shifted", w},
                  {"Omega_shifted", W}, {"n_bar", n}, {"m_bar", m}, {"d_abs", dm},
                  {"m_noise", mt}, {"beta_assembly_diff", beta_diff}};
    if (n == 0.0) s.warnings.push_back("n_bar = 0: optical decay rows vanish");
    if (dm == 0.0) s.warnings.push_back("d_bar = 0: mechanical decay rows vanish");
    s.check_consistency();
    return s;
}

LinearLangevinSystem apply_optomech_perturbation(const LinearLangevinSystem& sys, const SystemParams& p,
                                                 const SteadyState& st) {
    if (sys.name.rfind("quadratic", 0) != 0 || sys.dim() != 6) {
        throw ValidationError("apply_optomech_perturbation requires a quadratic system");
    }
    LinearLangevinSystem out = sys;
    const cplx b = st.b_bar;
    const cplx ig0 = I * p.g0;
    const cplx daa = 4.0 * I * b.real() * p.g0;
    out.M(0, 0) += daa;
    out.M(1, 1) -= daa;
    // Partition ba: rows d, d†, m; column m of the optical block is index 2.
    out.M(3, 2) += ig0 * b;
    out.M(4, 2) -= ig0 * b;
    out.M(5, 2) += ig0 * (-2.0 * I * b.imag());
    out.name = "quadratic_perturbed";
    out.metadata.emplace_back("g0", p.g0);
    out.metadata.emplace_back("b_bar_re", b.real());
    out.metadata.emplace_back("b_bar_im", b.imag());
    return out;
}

double conjugate_pairing_residual(const LinearLangevinSystem& sys) {
    double worst = 0.0;
    const int n = sys.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto pi = sys.basis_partner[static_cast<std::size_t>(i)];
            const auto pj = sys.basis_partner[static_cast<std::size_t>(j)];
            worst = std::max(worst, std::abs(sys.M(pi, pj) - std::conj(sys.M(i, j))));
        }
    }
    return worst;
}

std::vector<std::string> system_kinds() {
    return {"first_order", "second_order", "minimal_fourth", "quadratic", "quadratic_perturbed"};
}

LinearLangevinSystem build_system(const std::string& kind, const SystemParams& p, CubicConvention conv,
                                  QuadraticBranch branch, PhononNoise noise) {
    if (kind == "first_order") return build_first_order(p, solve_cubic_steady(p, p.alpha, conv), noise);
    if (kind == "second_order") return build_second_order(p, solve_cubic_steady(p, p.alpha, conv), noise);
    if (kind == "minimal_fourth") return build_minimal_fourth(p, solve_cubic_steady(p, p.alpha, conv), noise);
    if (kind == "quadratic" || kind == "quadratic_perturbed") {
        const auto st = solve_quadratic_steady(p, p.alpha, branch);
        auto sys = build_quadratic(p, st, noise);
        if (kind == "quadratic_perturbed") sys = apply_optomech_perturbation(sys, p, st);
        return sys;
    }
    throw ValidationError("unknown system kind '" + kind + "'");
}

}  // namespace optomech
