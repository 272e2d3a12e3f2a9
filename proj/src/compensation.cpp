#include "fluxq/compensation.hpp"

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "fluxq/errors.hpp"
#include "fluxq/sweep.hpp"

namespace fluxq {

void DistortionModel::validate() const {
    if (tails.size() > 3) throw ValidationError("distortion model holds at most three tails");
    double bound = 0;
    for (const auto& t : tails) {
        if (!(t.tau > 0)) throw ValidationError("distortion time constants must be positive");
        bound += std::abs(t.amplitude);
    }
    if (bound > 0.05) throw ValidationError("distortion amplitude exceeds 0.05 Phi0");
}

double DistortionModel::operator()(double t) const {
    if (t < edge) return 0;
    double s = 0;
    for (const auto& k : tails) s += k.amplitude * std::exp(-(t - edge) / k.tau);
    return s;
}

DeltaCurve::DeltaCurve(const SystemParams& sys, int qubit, double lo, double hi, int nodes, const SolveOptions& opts)
    : lo_(lo), hi_(hi) {
    if (!(hi > lo) || nodes < 4) throw ValidationError("delta curve needs a range and >= 4 nodes");
    std::function<double(size_t)> f = [&](size_t i) {
        return effective_delta(sys, qubit, lo + (hi - lo) * double(i) / (nodes - 1), opts);
    };
    values_ = parallel_map(static_cast<size_t>(nodes), f);
}

double DeltaCurve::operator()(double cjj) const {
    const int n = static_cast<int>(values_.size());
    const double u = (cjj - lo_) / (hi_ - lo_) * (n - 1);
    if (u < -1e-9 || u > n - 1 + 1e-9) throw ValidationError("Phi_cjj outside the tabulated gap curve");
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
    const double t = u - i;
    auto at = [&](int k) {
        if (k < 0) return 2 * values_[0] - values_[1];
        if (k > n - 1) return 2 * values_[n - 1] - values_[n - 2];
        return values_[k];
    };
    const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    return 0.5 * (2 * p1 + (-p0 + p2) * t + (2 * p0 - 5 * p1 + 4 * p2 - p3) * t * t +
                  (-p0 + 3 * p1 - 3 * p2 + p3) * t * t * t);
}

double DeltaCurve::derivative(double cjj) const {
    const double h = 1e-6;
    return ((*this)(cjj + h) - (*this)(cjj - h)) / (2 * h);
}

std::vector<double> single_qubit_trace(const DeltaCurve& delta, const PiecewiseLinear& applied,
                                       const DistortionModel& distortion, const CompensationOptions& opts,
                                       std::vector<double>* times) {
    auto h = [&](double t) {
        const double d = delta(applied(t) + distortion(t));
        Eigen::MatrixXd m(2, 2);
        m << 0, -0.5 * d, -0.5 * d, 0;
        return m;
    };
    EvolveOptions eo = opts.evolve;
    eo.stride = std::max(1, static_cast<int>(std::lround(opts.sample / eo.dt)));
    Eigen::VectorXcd up = Eigen::VectorXcd::Zero(2);
    up[1] = 1;
    const auto tr = evolve(up, h, 0.0, opts.duration, eo);
    std::vector<double> p;
    for (const auto& pop : tr.populations) p.push_back(pop[0]);
    if (times) *times = tr.times;
    return p;
}

CompensationResult compensate_distortion(const DeltaCurve& delta, double target_ghz, const DistortionModel& distortion,
                                         const CompensationOptions& opts) {
    distortion.validate();
    if (opts.max_iter < 1) throw ValidationError("max_iter must be >= 1");
    auto f = [&](double c) { return delta(c) - target_ghz; };
    const double flo = f(delta.lo()), fhi = f(delta.hi());
    if (flo * fhi > 0) throw ValidationError("target gap not attainable on the tabulated range");
    std::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve(f, delta.lo(), delta.hi(), flo, fhi,
                                                        boost::math::tools::eps_tolerance<double>(45), iters);
    CompensationResult res;
    res.operating_cjj = 0.5 * (root.first + root.second);
    res.slope = delta.derivative(res.operating_cjj);

    std::vector<double> starts;
    for (int k = 0;; ++k) {
        const double s = k * opts.window_step;
        if (s + opts.window > opts.duration + 1e-12) break;
        starts.push_back(s);
    }
    if (starts.empty()) throw ValidationError("duration shorter than one window");
    res.applied.t.clear();
    for (double s : starts) {
        res.applied.t.push_back(s + 0.5 * opts.window);
        res.applied.v.push_back(res.operating_cjj);
    }

    for (int it = 0; it < opts.max_iter; ++it) {
        std::vector<double> times;
        const auto p = single_qubit_trace(delta, res.applied, distortion, opts, &times);
        CompensationIteration rep;
        rep.tau = res.applied.t;
        rep.applied = res.applied.v;
        for (double s : starts) {
            const double dm = estimate_frequency(times, p, s, opts.window);
            rep.delta_m.push_back(dm);
            rep.max_rel_error = std::max(rep.max_rel_error, std::abs(dm - target_ghz) / target_ghz);
        }
        res.iterations.push_back(rep);
        if (rep.max_rel_error < opts.tolerance) {
            res.converged = true;
            break;
        }
        for (size_t k = 0; k < starts.size(); ++k) res.applied.v[k] -= (rep.delta_m[k] - target_ghz) / res.slope;
    }
    return res;
}

CompensationResult compensate_distortion(const SystemParams& sys, const DistortionModel& distortion,
                                         double target_ghz, const CompensationOptions& opts) {
    const double op = find_cjj_for_effective_delta(sys, 0, target_ghz);
    const DeltaCurve curve(sys, 0, op - 0.02, op + 0.02, 41);
    return compensate_distortion(curve, target_ghz, distortion, opts);
}

}  // namespace fluxq
