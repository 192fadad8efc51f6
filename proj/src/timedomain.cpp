#include "optomech/timedomain.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "optomech/errors.hpp"
#include "optomech/parallel.hpp"

namespace optomech {

namespace {

const cplx I(0.0, 1.0);

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// (e^z − 1)/z scaled by dt, i.e. ∫_0^dt e^{L s} ds for z = L dt.
cplx phi1_dt(cplx L, double dt) {
    const cplx z = L * dt;
    if (std::abs(z) < 1e-5) return dt * (1.0 + z / 2.0 + z * z / 6.0);
    return (std::exp(z) - 1.0) / L;
}

long long step_count(double span, double dt) {
    return static_cast<long long>(std::llround(span / dt));
}

}  // namespace

const std::vector<cplx>& Trajectory::get(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return series[i];
    }
    throw ValidationError("trajectory has no series '" + label + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) { return splitmix64(master + index); }

double GaussianSource::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    double u1;
    do {
        u1 = static_cast<double>(eng_() >> 11) * scale;
    } while (u1 == 0.0);
    const double u2 = static_cast<double>(eng_() >> 11) * scale;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

cplx GaussianSource::complex_normal(double var) {
    const double s = std::sqrt(var);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

double max_semiclassical_dt(const SystemParams& p) {
    const double rate = std::max({std::abs(p.detuning_from_bare()), p.Omega, p.kappa, p.Gamma});
    return 0.01 / rate;
}

double recommended_dt(const SystemParams& p, double n_bar) {
    const double base = std::min({0.01 / p.Omega, 0.1 / p.kappa, 0.1 / p.Gamma});
    return base / (1.0 + p.g0 * std::sqrt(std::max(n_bar, 0.0)) / p.Omega);
}

Trajectory integrate_semiclassical(const SystemParams& p, const SemiclassicalOptions& opt) {
    p.validate();
    if (!(opt.dt > 0.0) || !(opt.T > 0.0) || opt.burn_in < 0.0 || opt.stride < 1) {
        throw ValidationError("integrate_semiclassical: need dt > 0, T > 0, burn_in >= 0, stride >= 1");
    }
    if (opt.enforce_step_bound) {
        const double bound = max_semiclassical_dt(p);
        if (opt.dt > bound * (1.0 + 1e-9)) {
            throw ValidationError("integrate_semiclassical: dt exceeds 0.01 / fastest rotating-frame rate (" +
                                  std::to_string(bound) + ")");
        }
        if (opt.T < 100.0 * 2.0 * std::numbers::pi / p.Omega * (1.0 - 1e-12)) {
            throw ValidationError("integrate_semiclassical: T must cover at least 100 mechanical periods");
        }
    }
    const double dt = opt.dt;
    const cplx La(-0.5 * p.kappa, p.detuning_from_bare());
    const cplx Lb(-0.5 * p.Gamma, -p.Omega);
    const cplx ea = std::exp(La * dt), eb = std::exp(Lb * dt);
    const cplx pa = phi1_dt(La, dt), pb = phi1_dt(Lb, dt);
    const double sk = std::sqrt(p.kappa), sg = std::sqrt(p.Gamma);
    const double var_a = opt.noise ? 0.5 * 0.5 / dt : 0.0;
    const double var_b = opt.noise ? 0.5 * (p.m_th + 0.5) / dt : 0.0;

    cplx a = opt.a0, b = opt.b0;
    if (opt.start_at_mean_field) {
        const auto st = solve_cubic_steady(p, p.alpha, opt.convention);
        a = st.a_bar;
        b = st.b_bar;
    }

    const long long burn = step_count(opt.burn_in, dt);
    const long long steps = step_count(opt.T, dt);
    const auto kept = static_cast<std::size_t>(steps / opt.stride + 1);
    Trajectory tr;
    tr.labels = {"a", "b", "a_out"};
    tr.series.assign(3, {});
    for (auto& s : tr.series) s.reserve(kept);
    tr.t.reserve(kept);
    tr.seed = opt.seed;
    tr.dt = dt * opt.stride;
    tr.steps = burn + steps;
    tr.scheme = "exponential-euler";

    GaussianSource rng(opt.seed);
    const long long total = burn + steps;
    cplx out_sum = 0.0;
    int out_terms = 0;
    for (long long k = 0; k <= total; ++k) {
        const cplx xa = var_a > 0.0 ? rng.complex_normal(var_a) : cplx(0.0);
        const cplx xb = var_b > 0.0 ? rng.complex_normal(var_b) : cplx(0.0);
        const cplx x = b + std::conj(b);
        const cplx a_next = ea * a + pa * (I * p.g0 * a * x - p.alpha - sk * xa);
        const cplx b_next = eb * b + pb * (I * p.g0 * std::norm(a) - sg * xb);
        if (k >= burn) {
            if ((k - burn) % opt.stride == 0) {
                tr.t.push_back(static_cast<double>(k - burn) * dt);
                tr.series[0].push_back(a);
                tr.series[1].push_back(b);
            }
            // Output is averaged over each recording interval, like an integrating detector.
            out_sum += xa + sk * 0.5 * (a + a_next);
            if (++out_terms == opt.stride) {
                tr.series[2].push_back(out_sum / static_cast<double>(opt.stride));
                out_sum = 0.0;
                out_terms = 0;
            }
        }
        a = a_next;
        b = b_next;
        if ((k & 1023) == 0 || k == total) {
            if (!std::isfinite(std::abs(a)) || !std::isfinite(std::abs(b)) || std::abs(a) > 1e150 ||
                std::abs(b) > 1e150) {
                throw BlowUpError("integrate_semiclassical: amplitude overflow at step " + std::to_string(k), k);
            }
        }
    }
    // Drop a trailing sample whose output interval is incomplete.
    const std::size_t n_out = tr.series[2].size();
    tr.t.resize(n_out);
    tr.series[0].resize(n_out);
    tr.series[1].resize(n_out);
    return tr;
}

namespace {

struct LinearPropagator {
    Eigen::MatrixXcd Phi;  // exp(M dt)
    Eigen::MatrixXcd G;    // ∫_0^dt exp(M s) ds · √γ T
    // Step mean of A: mean_A A_k − mean_xi ξ_k.
    Eigen::RowVectorXcd out_A;   // row 0 of √γ ∫_0^dt exp(M s) ds / dt
    Eigen::RowVectorXcd out_xi;  // row 0 of √γ ∫_0^dt ∫_0^s exp(M u) du ds √γ T / dt
    Eigen::RowVectorXcd in_row;  // row 0 of T
};

LinearPropagator make_propagator(const LinearLangevinSystem& sys, double dt) {
    const auto n = sys.M.rows();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n) * dt;
    Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(3 * n, 3 * n);
    aug.block(0, 0, n, n) = sys.M * dt;
    aug.block(0, n, n, n) = id;
    aug.block(n, 2 * n, n, n) = id;
    const Eigen::MatrixXcd E = aug.exp();
    const Eigen::MatrixXcd phi1 = E.block(0, n, n, n);
    const Eigen::MatrixXcd phi2 = E.block(0, 2 * n, n, n);
    LinearPropagator lp;
    lp.Phi = E.block(0, 0, n, n);
    const Eigen::MatrixXcd sg = sys.sqrt_gamma();
    lp.G = phi1 * sg * sys.input_map;
    lp.out_A = (sg * phi1).row(0) / dt;
    lp.out_xi = (sg * phi2 * sg * sys.input_map).row(0) / dt;
    lp.in_row = sys.input_map.row(0);
    return lp;
}

// One draw of the channel vector with symmetrized occupations.
void draw_channels(const LinearLangevinSystem& sys, GaussianSource& rng, double dt, Eigen::VectorXcd& xi) {
    const auto k = static_cast<int>(sys.channels.size());
    for (int c = 0; c < k; ++c) {
        const int partner = sys.channel_partner[static_cast<std::size_t>(c)];
        const double occ = 0.5 * (sys.noise_psd_pos(c) + sys.noise_psd_neg(c));
        if (partner == c) {
            xi(c) = std::sqrt(occ / dt) * rng.normal();
        } else if (partner > c) {
            xi(c) = rng.complex_normal(0.5 * occ / dt);
            xi(partner) = std::conj(xi(c));
        }
    }
}

void simulate_linear_impl(const LinearLangevinSystem& sys, const LinearSimOptions& opt, bool record_basis,
                          Trajectory& tr) {
    sys.check_consistency();
    if (!(opt.dt > 0.0) || !(opt.T > 0.0) || opt.burn_in < 0.0) {
        throw ValidationError("simulate_linear: need dt > 0, T > 0, burn_in >= 0");
    }
    const auto lp = make_propagator(sys, opt.dt);
    const auto n = sys.M.rows();
    const long long burn = step_count(opt.burn_in, opt.dt);
    const long long steps = step_count(opt.T, opt.dt);
    tr.labels.clear();
    if (record_basis) tr.labels = sys.basis;
    tr.labels.push_back("out");
    tr.series.assign(tr.labels.size(), {});
    for (auto& s : tr.series) s.reserve(static_cast<std::size_t>(steps + 1));
    tr.t.clear();
    tr.t.reserve(static_cast<std::size_t>(steps + 1));
    tr.seed = opt.seed;
    tr.dt = opt.dt;
    tr.steps = burn + steps;
    tr.scheme = "exact-propagator-zoh";

    GaussianSource rng(opt.seed);
    Eigen::VectorXcd A = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.channels.size()));
    Eigen::VectorXcd next(n);
    const long long total = burn + steps;
    for (long long k = 0; k <= total; ++k) {
        draw_channels(sys, rng, opt.dt, xi);
        next.noalias() = lp.Phi * A;
        next.noalias() -= lp.G * xi;
        if (k >= burn) {
            tr.t.push_back(static_cast<double>(k - burn) * opt.dt);
            if (record_basis) {
                for (Eigen::Index i = 0; i < n; ++i) tr.series[static_cast<std::size_t>(i)].push_back(A(i));
            }
            const cplx out = (lp.in_row * xi).value() + (lp.out_A * A).value() - (lp.out_xi * xi).value();
            tr.series.back().push_back(out);
        }
        A.swap(next);
        if ((k & 1023) == 0 && !std::isfinite(A.norm())) {
            throw BlowUpError("simulate_linear: amplitude overflow at step " + std::to_string(k), k);
        }
    }
}

}  // namespace

Trajectory simulate_linear(const LinearLangevinSystem& sys, const LinearSimOptions& opt) {
    Trajectory tr;
    simulate_linear_impl(sys, opt, true, tr);
    return tr;
}

Trajectory explicit_solution(const SystemParams& p, cplx N0, cplx B0, const std::vector<cplx>& N_in,
                             const std::vector<cplx>& B_in, double dt, ExplicitForm form) {
    p.validate();
    if (N_in.size() != B_in.size() || N_in.empty()) {
        throw ValidationError("explicit_solution: input series must be non-empty and of equal length");
    }
    if (!(dt > 0.0)) throw ValidationError("explicit_solution: dt must be positive");
    const double gam = p.kappa + p.Gamma;
    const double mu = 2.0 * p.kappa;
    const cplx lam(0.5 * gam, p.Omega);
    const double cN = form == ExplicitForm::printed ? -2.0 * std::sqrt(p.kappa) : -std::sqrt(2.0 * p.kappa);
    const double sN = form == ExplicitForm::printed ? -1.0 : 1.0;
    const double cB = -std::sqrt(gam);
    const double eN = std::exp(-mu * dt);
    const cplx eB = std::exp(-lam * dt);

    Trajectory tr;
    tr.labels = {"N", "B"};
    tr.series.assign(2, {});
    tr.dt = dt;
    tr.steps = static_cast<long long>(N_in.size()) - 1;
    tr.scheme = form == ExplicitForm::printed ? "explicit-printed-trapezoid" : "explicit-drift-trapezoid";
    const std::size_t L = N_in.size();
    tr.t.resize(L);
    tr.series[0].resize(L);
    tr.series[1].resize(L);

    cplx convN = 0.0, convB = 0.0;
    cplx uprev = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (k > 0) convN = eN * convN + 0.5 * dt * (eN * N_in[k - 1] + N_in[k]);
        const cplx N = N0 * std::exp(-mu * t) + cN * convN;
        const cplx u = sN * I * p.g0 * N + cB * B_in[k];
        if (k > 0) convB = eB * convB + 0.5 * dt * (eB * uprev + u);
        uprev = u;
        tr.t[k] = t;
        tr.series[0][k] = N;
        tr.series[1][k] = B0 * std::exp(-lam * t) + convB;
    }
    return tr;
}

std::pair<std::vector<cplx>, std::vector<cplx>> minimal_inputs(const SystemParams& p, const SteadyState& s,
                                                               const std::vector<cplx>& a_in,
                                                               const std::vector<cplx>& b_in) {
    if (a_in.size() != b_in.size()) throw ValidationError("minimal_inputs: series lengths differ");
    const double gam = p.kappa + p.Gamma;
    const double n = s.n_bar;
    const double cN = 0.5 * std::sqrt(n) * n;
    const cplx cBa = std::sqrt(p.kappa / gam * n) * s.b_bar;
    const double cBb = std::sqrt(p.Gamma / gam) * n;
    std::vector<cplx> N_in(a_in.size()), B_in(a_in.size());
    for (std::size_t k = 0; k < a_in.size(); ++k) {
        const cplx x = a_in[k] + std::conj(a_in[k]);
        N_in[k] = cN * x;
        B_in[k] = cBa * x + cBb * b_in[k];
    }
    return {N_in, B_in};
}

namespace {

// Running Welch accumulator over one FFTW plan.
class WelchAccumulator {
public:
    WelchAccumulator(int seg, double dt) : seg_(seg), dt_(dt), sum_(static_cast<std::size_t>(seg), 0.0) {
        if (seg < 8) throw ValidationError("welch: segment length must be at least 8");
        in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(seg)));
        out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(seg)));
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            plan_ = fftw_plan_dft_1d(seg, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        }
        window_.resize(static_cast<std::size_t>(seg));
        wsum_ = 0.0;
        for (int j = 0; j < seg; ++j) {
            const double h = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * j / seg));
            window_[static_cast<std::size_t>(j)] = h;
            wsum_ += h * h;
        }
    }
    ~WelchAccumulator() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    WelchAccumulator(const WelchAccumulator&) = delete;
    WelchAccumulator& operator=(const WelchAccumulator&) = delete;

    void add_series(const std::vector<cplx>& x, double overlap, bool remove_mean) {
        const auto L = static_cast<long long>(x.size());
        if (L < 4LL * seg_) throw ValidationError("welch: series shorter than 4 segments");
        if (!(overlap >= 0.0 && overlap < 1.0)) throw ValidationError("welch: overlap must be in [0, 1)");
        const long long step = std::max<long long>(1, std::llround(seg_ * (1.0 - overlap)));
        cplx mean = 0.0;
        if (remove_mean) {
            for (const auto& v : x) mean += v;
            mean /= static_cast<double>(L);
        }
        for (long long start = 0; start + seg_ <= L; start += step) {
            for (int j = 0; j < seg_; ++j) {
                const cplx v = (x[static_cast<std::size_t>(start + j)] - mean) * window_[static_cast<std::size_t>(j)];
                in_[j][0] = v.real();
                in_[j][1] = v.imag();
            }
            fftw_execute(plan_);
            for (int j = 0; j < seg_; ++j) sum_[static_cast<std::size_t>(j)] += out_[j][0] * out_[j][0] + out_[j][1] * out_[j][1];
            ++count_;
        }
    }

    void merge(const std::vector<double>& other_sum, int other_count) {
        for (std::size_t j = 0; j < sum_.size(); ++j) sum_[j] += other_sum[j];
        count_ += other_count;
    }

    const std::vector<double>& raw_sum() const { return sum_; }
    int count() const { return count_; }

    WelchResult result() const {
        WelchResult r;
        r.segments = count_;
        r.w.resize(static_cast<std::size_t>(seg_));
        r.psd.resize(static_cast<std::size_t>(seg_));
        const double norm = dt_ / (wsum_ * std::max(count_, 1));
        const int half = seg_ / 2;
        for (int i = 0; i < seg_; ++i) {
            const int k = i - half;  // signed bin
            const int src = (k + seg_) % seg_;
            r.w[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * k / (seg_ * dt_);
            r.psd[static_cast<std::size_t>(i)] = sum_[static_cast<std::size_t>(src)] * norm;
        }
        return r;
    }

private:
    int seg_;
    double dt_;
    std::vector<double> sum_;
    std::vector<double> window_;
    double wsum_ = 0.0;
    int count_ = 0;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace

WelchResult welch_psd(const std::vector<cplx>& series, double dt, int segment_len, double overlap, bool remove_mean) {
    if (!(dt > 0.0)) throw ValidationError("welch_psd: dt must be positive");
    WelchAccumulator acc(segment_len, dt);
    acc.add_series(series, overlap, remove_mean);
    return acc.result();
}

WelchResult welch_psd_multi(const std::vector<std::vector<cplx>>& series, double dt, int segment_len,
                            double overlap, bool remove_mean) {
    if (!(dt > 0.0)) throw ValidationError("welch_psd_multi: dt must be positive");
    WelchAccumulator acc(segment_len, dt);
    for (const auto& s : series) acc.add_series(s, overlap, remove_mean);
    return acc.result();
}

namespace {

template <class RunOne>
WelchResult averaged_psd(int trajectories, double dt, int segment_len, RunOne&& run_one) {
    if (trajectories < 1) throw ValidationError("need at least one trajectory");
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(trajectories));
    std::vector<int> counts(static_cast<std::size_t>(trajectories), 0);
    parallel_for(static_cast<std::size_t>(trajectories), [&](std::size_t i) {
        WelchAccumulator acc(segment_len, dt);
        run_one(i, acc);
        sums[i] = acc.raw_sum();
        counts[i] = acc.count();
    });
    WelchAccumulator total(segment_len, dt);
    for (std::size_t i = 0; i < sums.size(); ++i) total.merge(sums[i], counts[i]);
    return total.result();
}

}  // namespace

WelchResult simulated_output_psd(const LinearLangevinSystem& sys, const LinearSimOptions& opt, int trajectories,
                                 int segment_len, double overlap) {
    return averaged_psd(trajectories, opt.dt, segment_len, [&](std::size_t i, WelchAccumulator& acc) {
        LinearSimOptions o = opt;
        o.seed = derive_seed(opt.seed, i);
        Trajectory tr;
        simulate_linear_impl(sys, o, false, tr);
        acc.add_series(tr.series.back(), overlap, false);
    });
}

WelchResult semiclassical_output_psd(const SystemParams& p, const SemiclassicalOptions& opt, int trajectories,
                                     int segment_len, double overlap) {
    return averaged_psd(trajectories, opt.dt * opt.stride, segment_len, [&](std::size_t i, WelchAccumulator& acc) {
        SemiclassicalOptions o = opt;
        o.seed = derive_seed(opt.seed, i);
        const auto tr = integrate_semiclassical(p, o);
        acc.add_series(tr.get("a_out"), overlap, true);
    });
}

}  // namespace optomech
