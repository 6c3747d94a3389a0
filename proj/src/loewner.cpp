#include "rsle/loewner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace rsle::loewner {

namespace {

double min_dist_to_driving(Complex g, const AngleVector& state) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.size(); ++i) {
        d = std::min(d, std::abs(g - state.point(i)));
    }
    return d;
}

// d/dz Psi summed over driving points: M_N(g, X) = sum 2 x_i^2/(g-x_i)^2 - N.
Complex dlog_deriv(Complex g, const AngleVector& state) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Complex x = state.point(i);
        const Complex d = g - x;
        sum += 2.0 * x * x / (d * d);
    }
    return sum - static_cast<double>(state.size());
}

struct Integrator {
    const AngleVector* state = nullptr;
    EvolveOptions opts;
    bool rk4 = true;

    // One guarded step of the coupled (g, log_dg) system with X frozen.
    // Returns false if the point must be declared swallowed here.
    bool step(FlowPoint& fp, double h, int depth) const {
        const double dist = min_dist_to_driving(fp.g, *state);
        if (dist <= opts.swallow_eps) return false;

        Complex g1;
        Complex dlog;
        if (rk4) {
            const Complex k1 = loewner_field(fp.g, *state);
            const Complex k2 = loewner_field(fp.g + 0.5 * h * k1, *state);
            const Complex k3 = loewner_field(fp.g + 0.5 * h * k2, *state);
            const Complex k4 = loewner_field(fp.g + h * k3, *state);
            g1 = fp.g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const Complex m1 = dlog_deriv(fp.g, *state);
            const Complex m2 = dlog_deriv(fp.g + 0.5 * h * k1, *state);
            const Complex m3 = dlog_deriv(fp.g + 0.5 * h * k2, *state);
            const Complex m4 = dlog_deriv(fp.g + h * k3, *state);
            dlog = (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
        } else {
            g1 = fp.g + h * loewner_field(fp.g, *state);
            dlog = h * dlog_deriv(fp.g, *state);
        }

        const bool ok = std::abs(g1 - fp.g) <= opts.max_step_fraction * dist &&
                        std::isfinite(g1.real()) && std::isfinite(g1.imag());
        if (!ok) {
            if (depth >= opts.max_halvings) {
                // Cannot resolve the approach to a driving point any further.
                return false;
            }
            if (!step(fp, 0.5 * h, depth + 1)) return false;
            return step(fp, 0.5 * h, depth + 1);
        }

        if (fp.g != Complex(0.0, 0.0)) {
            fp.log_g += std::log(g1 / fp.g);
            for (std::size_t i = 0; i < state->size(); ++i) {
                const Complex x = state->point(i);
                fp.log_diffs[i] += std::log((g1 - x) / (fp.g - x));
            }
        }
        fp.log_dg += dlog;
        fp.g = g1;
        return true;
    }

    // Advance through [t0, t1] with X frozen; marks swallow time on failure.
    void advance(FlowPoint& fp, double t0, double t1) const {
        if (fp.swallowed() || t1 <= t0) return;
        double t = t0;
        while (t < t1) {
            const double dist = min_dist_to_driving(fp.g, *state);
            if (dist <= opts.swallow_eps) {
                fp.swallowed_at = t;
                return;
            }
            // Natural step limit: the field magnitude is ~ 2/dist near a
            // driving point.
            const double speed = std::abs(loewner_field(fp.g, *state)) + 1e-300;
            double h = std::min(t1 - t, opts.max_step_fraction * dist / speed);
            h = std::max(h, (t1 - t0) * 1e-12);
            h = std::min(h, t1 - t);
            if (!step(fp, h, 0)) {
                fp.swallowed_at = t;
                return;
            }
            t += h;
        }
    }

    // Absorb the driving jump X_old -> X_new into the branch accumulators.
    void absorb_jump(FlowPoint& fp, const AngleVector& older, const AngleVector& newer) const {
        if (fp.swallowed() || fp.g == Complex(0.0, 0.0)) return;
        for (std::size_t i = 0; i < older.size(); ++i) {
            const Complex a = fp.g - older.point(i);
            const Complex b = fp.g - newer.point(i);
            fp.log_diffs[i] += std::log(b / a);
        }
    }
};

bool path_is_deterministic(const DrivingPath& path) { return !path.beta.has_value(); }

} // namespace

Complex loewner_field(Complex g, const AngleVector& state) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Complex x = state.point(i);
        sum += (g + x) / (g - x);
    }
    return -g * sum;
}

FlowPoint make_flow_point(Complex z0, const AngleVector& state0) {
    FlowPoint fp;
    fp.z0 = z0;
    fp.g = z0;
    fp.log_g = (z0 == Complex(0.0, 0.0))
                   ? Complex(-std::numeric_limits<double>::infinity(), 0.0)
                   : std::log(z0);
    fp.log_diffs.resize(state0.size());
    for (std::size_t i = 0; i < state0.size(); ++i) {
        fp.log_diffs[i] = std::log(z0 - state0.point(i));
    }
    return fp;
}

std::vector<std::vector<FlowPoint>> evolve(const std::vector<Complex>& points,
                                           const DrivingPath& path,
                                           const EvolveOptions& opts) {
    if (path.times.size() < 1) throw DomainError("evolve: empty driving path");
    for (const Complex& z : points) {
        if (std::abs(z) >= 1.0) throw DomainError("evolve: points must lie strictly inside the unit disk");
    }

    Integrator integ;
    integ.opts = opts;
    integ.rk4 = opts.use_rk4.value_or(path_is_deterministic(path));

    std::vector<std::vector<FlowPoint>> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        FlowPoint fp = make_flow_point(points[p], path.states.front());
        out[p].push_back(fp);
        for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
            integ.state = &path.states[k];
            integ.advance(fp, path.times[k], path.times[k + 1]);
            integ.absorb_jump(fp, path.states[k], path.states[k + 1]);
            out[p].push_back(fp);
        }
    }
    return out;
}

std::vector<FlowPoint> evolve_final(const std::vector<Complex>& points,
                                    const DrivingPath& path,
                                    const EvolveOptions& opts) {
    if (path.times.size() < 1) throw DomainError("evolve_final: empty driving path");
    Integrator integ;
    integ.opts = opts;
    integ.rk4 = opts.use_rk4.value_or(path_is_deterministic(path));

    std::vector<FlowPoint> out;
    out.reserve(points.size());
    for (const Complex& z : points) {
        if (std::abs(z) >= 1.0) throw DomainError("evolve_final: point outside the unit disk");
        FlowPoint fp = make_flow_point(z, path.states.front());
        for (std::size_t k = 0; k + 1 < path.times.size() && !fp.swallowed(); ++k) {
            integ.state = &path.states[k];
            integ.advance(fp, path.times[k], path.times[k + 1]);
            integ.absorb_jump(fp, path.states[k], path.states[k + 1]);
        }
        out.push_back(std::move(fp));
    }
    return out;
}

Complex reverse_flow(Complex target, const DrivingPath& path, double t,
                     const EvolveOptions& opts) {
    if (t < 0.0 || t > path.horizon() + 1e-12) throw DomainError("reverse_flow: t outside the path horizon");
    if (std::abs(target) >= 1.0) throw DomainError("reverse_flow: target must lie inside the unit disk");
    if (t == 0.0) return target;

    // Walk the saved grid backwards; within each interval X is the left
    // endpoint of the forward interpolation.
    Complex h = target;
    std::size_t k = path.index_at(t);
    if (path.times[k] >= t && k > 0) --k;
    double s_hi = t;
    for (;; --k) {
        const AngleVector& state = path.states[k];
        const double s_lo = path.times[k];
        double s = s_hi;
        while (s > s_lo) {
            const double dist = min_dist_to_driving(h, state);
            if (dist <= opts.swallow_eps) {
                throw SingularEvaluation("reverse_flow: collided with a driving value");
            }
            const Complex field = -loewner_field(h, state);
            const double speed = std::abs(field) + 1e-300;
            double dh = std::min(s - s_lo, opts.max_step_fraction * dist / speed);
            dh = std::max(dh, t * 1e-12);
            dh = std::min(dh, s - s_lo);
            // RK4 on the reversed field.
            const auto f = [&](Complex w) { return -loewner_field(w, state); };
            const Complex k1 = f(h);
            const Complex k2 = f(h + 0.5 * dh * k1);
            const Complex k3 = f(h + 0.5 * dh * k2);
            const Complex k4 = f(h + dh * k3);
            h += (dh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            s -= dh;
            if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) {
                throw StepFailure("reverse_flow: integration diverged");
            }
        }
        if (k == 0) break;
        s_hi = s_lo;
    }
    return h;
}

Complex trace_tip(const DrivingPath& path, double t, std::size_t i, double r,
                  const EvolveOptions& opts) {
    const std::size_t k = path.index_at(t);
    const Complex x = path.states[k].point(i);
    return reverse_flow(r * x, path, t, opts);
}

Complex HullMask::grid_point(int ix, int iy) const {
    const double step = (hi - lo) / (resolution - 1);
    return {lo + ix * step, lo + iy * step};
}

HullMask hull_mask(int resolution, const DrivingPath& path, double t,
                   const EvolveOptions& opts, int threads) {
    if (resolution < 16) throw DomainError("hull_mask: resolution must be >= 16");

    HullMask mask;
    mask.resolution = resolution;
    const double step = 2.0 / (resolution - 1);
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            const Complex z(-1.0 + ix * step, -1.0 + iy * step);
            if (std::abs(z) < 1.0 - 1e-9) mask.points.push_back(z);
        }
    }
    mask.swallow_time.resize(mask.points.size());

    // Truncate the path at time t (piecewise-constant driving).
    DrivingPath truncated;
    truncated.beta = path.beta;
    truncated.seed = path.seed;
    const std::size_t kt = path.index_at(t);
    truncated.times.assign(path.times.begin(), path.times.begin() + kt + 1);
    truncated.states.assign(path.states.begin(), path.states.begin() + kt + 1);
    if (truncated.times.back() < t) {
        truncated.times.push_back(t);
        truncated.states.push_back(path.states[kt]);
    }

    const int n_threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    const std::size_t chunk = 64;
    auto work = [&]() {
        for (;;) {
            const std::size_t begin = cursor.fetch_add(chunk);
            if (begin >= mask.points.size()) return;
            const std::size_t end = std::min(begin + chunk, mask.points.size());
            std::vector<Complex> pts(mask.points.begin() + begin, mask.points.begin() + end);
            auto finals = evolve_final(pts, truncated, opts);
            for (std::size_t j = 0; j < finals.size(); ++j) {
                mask.swallow_time[begin + j] = finals[j].swallowed_at;
            }
        }
    };
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return mask;
}

} // namespace rsle::loewner
