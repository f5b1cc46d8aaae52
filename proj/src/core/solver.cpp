#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/orbits.hpp"

namespace snapdop {

namespace {

constexpr double kMinCrossingSlopeHzS = 0.1;
constexpr double kCrossingClampS = 600.0;
constexpr double kDampingAbortLimit = 1.0e12;

struct PreparedObservation {
    double time_unix_s;
    double doppler_hz;
    double base_frequency_hz;
    SatStateEcef sat;
    int norad_id;
    double weight;  // 1/sigma^2 station weight
};

// Dense symmetric solve for the (up to 5x5) damped normal equations.
template <int N>
bool cholesky_solve(std::array<std::array<double, N>, N> a, std::array<double, N>& b, int k) {
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = a[i][j];
            for (int m = 0; m < j; ++m) sum -= a[i][m] * a[j][m];
            if (i == j) {
                if (!(sum > 0.0)) return false;
                a[i][i] = std::sqrt(sum);
            } else {
                a[i][j] = sum / a[j][j];
            }
        }
    }
    for (int i = 0; i < k; ++i) {
        double sum = b[i];
        for (int m = 0; m < i; ++m) sum -= a[i][m] * b[m];
        b[i] = sum / a[i][i];
    }
    for (int i = k - 1; i >= 0; --i) {
        double sum = b[i];
        for (int m = i + 1; m < k; ++m) sum -= a[m][i] * b[m];
        b[i] = sum / a[i][i];
    }
    return true;
}

// Cyclic Jacobi eigenvalues of a symmetric k x k matrix (condition estimate).
template <int N>
std::array<double, N> jacobi_eigenvalues(std::array<std::array<double, N>, N> a, int k) {
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) off += a[i][j] * a[i][j];
        if (off < 1.0e-24) break;
        for (int p = 0; p < k; ++p) {
            for (int q = p + 1; q < k; ++q) {
                if (std::fabs(a[p][q]) < 1.0e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < k; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (int i = 0; i < k; ++i) {
                    const double api = a[p][i];
                    const double aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    std::array<double, N> eigs{};
    for (int i = 0; i < k; ++i) eigs[i] = a[i][i];
    return eigs;
}

double inverse_matrix5(const std::array<std::array<double, 5>, 5>& a, int k,
                       std::array<std::array<double, 5>, 5>& inv) {
    // Column-by-column solve; returns 0 and leaves inv zeroed on failure.
    inv = {};
    for (int col = 0; col < k; ++col) {
        std::array<double, 5> e{};
        e[col] = 1.0;
        auto copy = a;
        if (!cholesky_solve<5>(copy, e, k)) return 0.0;
        for (int row = 0; row < k; ++row) inv[row][col] = e[row];
    }
    return 1.0;
}

StateVector apply_scaled_step(const StateVector& state, const std::array<double, 5>& step,
                              const std::array<double, 5>& scales,
                              const std::array<bool, 5>& active) {
    StateVector out = state;
    if (active[0]) out.latitude_deg += step[0] * scales[0];
    if (active[1]) out.longitude_deg += step[1] * scales[1];
    if (active[2]) out.altitude_m += step[2] * scales[2];
    if (active[3]) out.clock_offset_hz += step[3] * scales[3];
    if (active[4]) out.clock_drift_hz_s += step[4] * scales[4];
    const GeodeticPosition wrapped = normalize_geodetic(out.position());
    out.latitude_deg = wrapped.latitude_deg;
    out.longitude_deg = wrapped.longitude_deg;
    out.altitude_m = std::clamp(out.altitude_m, -1000.0, 1.0e7);
    out.clock_offset_hz = std::clamp(out.clock_offset_hz, -0.999e6, 0.999e6);
    out.clock_drift_hz_s = std::clamp(out.clock_drift_hz_s, -0.999e3, 0.999e3);
    return out;
}

void evaluate_residuals(const std::vector<PreparedObservation>& prepared,
                        const StateVector& state, std::vector<double>& out) {
    const Vec3 rx = geodetic_to_ecef(state.position());
    out.resize(prepared.size());
    for (std::size_t i = 0; i < prepared.size(); ++i) {
        const auto& p = prepared[i];
        out[i] = p.doppler_hz -
                 predict_doppler_at(p.sat, rx, state, p.base_frequency_hz, p.time_unix_s);
    }
}

double cost_of(const std::vector<double>& residuals,
               const std::vector<PreparedObservation>& prepared,
               const std::optional<double>& huber_delta) {
    double cost = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double r = residuals[i];
        const double w = prepared[i].weight;
        if (huber_delta && std::fabs(r) > *huber_delta) {
            const double d = *huber_delta;
            cost += w * d * (2.0 * std::fabs(r) - d);
        } else {
            cost += w * r * r;
        }
    }
    return cost;
}

}  // namespace

namespace {

// Least-squares Doppler slope and root over a sample range [begin, end).
struct LineFit {
    double slope = 0.0;
    double root = 0.0;
    bool usable = false;
};

LineFit fit_doppler_line(const std::vector<DopplerObservation>& obs, std::size_t begin,
                         std::size_t end) {
    LineFit fit;
    const double n = static_cast<double>(end - begin);
    if (n < 2.0) return fit;
    double t_mean = 0.0, d_mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        t_mean += obs[i].time_unix_s;
        d_mean += obs[i].doppler_hz();
    }
    t_mean /= n;
    d_mean /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double dt = obs[i].time_unix_s - t_mean;
        num += dt * (obs[i].doppler_hz() - d_mean);
        den += dt * dt;
    }
    if (den == 0.0) return fit;
    fit.slope = num / den;
    if (std::fabs(fit.slope) < kMinCrossingSlopeHzS) return fit;
    fit.root = t_mean - d_mean / fit.slope;
    fit.usable = true;
    return fit;
}

}  // namespace

namespace {

// One crossing's candidate user locations: the sub-satellite point displaced
// by the slope-derived cross-range to either side of the ground track.
struct CrossingCandidates {
    Vec3 side_a;   // unit ECEF directions
    Vec3 side_b;
    double weight = 0.0;
};

CrossingCandidates make_candidates(const SatStateEcef& sat, const Vec3& subpoint_unit,
                                   double subpoint_radius_m, double slope_hz_s,
                                   double f_b_hz, bool clamped) {
    CrossingCandidates out;
    // At the crossing the range rate is zero and its rate relates the slant
    // range to the relative speed and the line-of-sight component of the
    // satellite's gravitational acceleration:
    //   |slope| = (f_B / c) * (v^2 - g (r_sat - R cos(gamma))) / rho_min
    // Two fixed-point rounds settle rho_min to well under a percent.
    const double v_rel = sat.velocity_m_s.norm();
    const double r_sat = sat.position_m.norm();
    const double g_sat = 3.986008e14 / (r_sat * r_sat);
    const double scale = f_b_hz / constants::speed_of_light_m_s;
    double rho_min = scale * v_rel * v_rel / std::fabs(slope_hz_s);
    double cos_gamma = 1.0;
    for (int round = 0; round < 3; ++round) {
        cos_gamma = (subpoint_radius_m * subpoint_radius_m + r_sat * r_sat -
                     rho_min * rho_min) /
                    (2.0 * subpoint_radius_m * r_sat);
        cos_gamma = std::clamp(cos_gamma, std::cos(0.35), 1.0);  // cap at ~2200 km
        const double los_gravity = g_sat * (r_sat - subpoint_radius_m * cos_gamma);
        rho_min = scale * std::max(v_rel * v_rel - los_gravity, 0.25 * v_rel * v_rel) /
                  std::fabs(slope_hz_s);
    }
    const double sin_gamma = std::sqrt(std::max(0.0, 1.0 - cos_gamma * cos_gamma));

    const Vec3 v_horizontal =
        sat.velocity_m_s - subpoint_unit * sat.velocity_m_s.dot(subpoint_unit);
    if (v_horizontal.norm() < 1.0) {
        out.side_a = out.side_b = subpoint_unit;
        out.weight = 0.0;
        return out;
    }
    const Vec3 track_perp = subpoint_unit.cross(v_horizontal.unit());
    out.side_a = subpoint_unit * cos_gamma + track_perp * sin_gamma;
    out.side_b = subpoint_unit * cos_gamma - track_perp * sin_gamma;
    out.weight = std::fabs(slope_hz_s) * (clamped ? 0.1 : 1.0);
    return out;
}

}  // namespace

InitialEstimate initial_estimate(
    const std::map<int, std::vector<DopplerObservation>>& obs_by_satellite,
    const std::map<int, TleRecord>& ephemeris) {
    if (obs_by_satellite.empty()) {
        raise(ErrorCode::InsufficientData, "initial_estimate: no satellites");
    }
    InitialEstimate result;
    std::vector<CrossingCandidates> candidates;
    int with_data = 0;
    int flat_slopes = 0;
    for (const auto& [norad, unsorted] : obs_by_satellite) {
        if (unsorted.size() < 2) continue;
        std::vector<DopplerObservation> observations = unsorted;
        std::stable_sort(observations.begin(), observations.end(),
                         [](const DopplerObservation& a, const DopplerObservation& b) {
                             return a.time_unix_s < b.time_unix_s;
                         });
        const double t_min = observations.front().time_unix_s;
        const double t_max = observations.back().time_unix_s;
        double t_centroid = 0.0;
        for (const auto& obs : observations) t_centroid += obs.time_unix_s;
        t_centroid /= static_cast<double>(observations.size());

        // Bracketing sign changes give the crossing directly; when the curve
        // wiggles through zero more than once (noise near the crossing),
        // keep the one nearest the time centroid of the data.
        double crossing_raw = 0.0;
        double slope_local = 0.0;
        bool bracketed = false;
        for (std::size_t i = 0; i + 1 < observations.size(); ++i) {
            const double d0 = observations[i].doppler_hz();
            const double d1 = observations[i + 1].doppler_hz();
            if (d0 == 0.0 || d0 * d1 < 0.0) {
                const double t0 = observations[i].time_unix_s;
                const double t1 = observations[i + 1].time_unix_s;
                const double candidate =
                    d0 == 0.0 ? t0 : t0 + (t1 - t0) * (-d0) / (d1 - d0);
                if (!bracketed ||
                    std::fabs(candidate - t_centroid) < std::fabs(crossing_raw - t_centroid)) {
                    crossing_raw = candidate;
                }
                bracketed = true;
            }
        }
        ++with_data;
        if (bracketed) {
            // Local slope from the samples near the crossing.
            std::size_t begin = 0;
            while (begin < observations.size() &&
                   observations[begin].time_unix_s < crossing_raw - 45.0) {
                ++begin;
            }
            std::size_t end = begin;
            while (end < observations.size() &&
                   observations[end].time_unix_s <= crossing_raw + 45.0) {
                ++end;
            }
            const LineFit local = fit_doppler_line(observations, begin, end);
            if (local.usable) {
                slope_local = local.slope;
            } else {
                const LineFit whole = fit_doppler_line(observations, 0, observations.size());
                slope_local = whole.slope;
            }
            if (std::fabs(slope_local) < kMinCrossingSlopeHzS) {
                ++flat_slopes;
                continue;
            }
        }
        if (!bracketed) {
            // No bracket inside the data: extrapolate from the end closer to
            // the crossing (the smaller |Doppler|) with a local line over the
            // trailing (or leading) 90 s of samples.
            const bool crossing_after = std::fabs(observations.back().doppler_hz()) <
                                        std::fabs(observations.front().doppler_hz());
            std::size_t begin = 0, end = observations.size();
            if (crossing_after) {
                begin = end;
                while (begin > 0 &&
                       t_max - observations[begin - 1].time_unix_s <= 90.0) {
                    --begin;
                }
                if (end - begin < 2) begin = end >= 2 ? end - 2 : 0;
            } else {
                end = 0;
                while (end < observations.size() &&
                       observations[end].time_unix_s - t_min <= 90.0) {
                    ++end;
                }
                if (end - begin < 2) end = std::min(observations.size(), begin + 2);
            }
            const LineFit fit = fit_doppler_line(observations, begin, end);
            if (!fit.usable) {
                ++flat_slopes;
                continue;
            }
            crossing_raw = fit.root;
            slope_local = fit.slope;
        }

        const auto it = ephemeris.find(norad);
        if (it == ephemeris.end()) {
            raise(ErrorCode::MissingEphemeris,
                  "initial_estimate: no TLE for satellite " + std::to_string(norad));
        }
        ZeroCrossing crossing;
        crossing.norad_id = norad;
        crossing.method = bracketed ? ZeroCrossing::Method::Interpolated
                                    : ZeroCrossing::Method::Extrapolated;
        crossing.crossing_time_unix_s =
            std::clamp(crossing_raw, t_min - kCrossingClampS, t_max + kCrossingClampS);
        SatStateEcef sat;
        try {
            sat = propagate_to(it->second, crossing.crossing_time_unix_s);
        } catch (const SnapdopError&) {
            continue;  // crossing landed outside this TLE's usable span
        }
        GeodeticPosition subpoint = ecef_to_geodetic(sat.position_m);
        subpoint.altitude_m = 0.0;
        crossing.sat_subpoint = subpoint;
        result.crossings.push_back(crossing);

        const Vec3 sub_ecef = geodetic_to_ecef(subpoint);
        const bool clamped = crossing_raw != crossing.crossing_time_unix_s;
        candidates.push_back(make_candidates(sat, sub_ecef.unit(), sub_ecef.norm(),
                                             slope_local,
                                             observations.front().base_frequency_hz,
                                             clamped));
    }
    if (result.crossings.empty()) {
        if (with_data > 0 && flat_slopes == with_data) {
            raise(ErrorCode::NoCrossing,
                  "initial_estimate: every satellite's Doppler slope is below " +
                      std::to_string(kMinCrossingSlopeHzS) + " Hz/s");
        }
        raise(ErrorCode::InsufficientData,
              "initial_estimate: no satellite with two or more usable observations");
    }

    // Pick the track side of each crossing that makes the candidates agree:
    // greedy assignment in weight order, tried from both sides of the
    // strongest crossing, keeping the tighter cluster.
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].weight > candidates[b].weight;
    });
    double total_weight = 0.0;
    for (const auto& c : candidates) total_weight += c.weight;

    Vec3 best_direction;
    if (candidates.size() == 1 || total_weight <= 0.0) {
        // Side ambiguity cannot be resolved; settle between the two
        // candidates (the sub-point for a single satellite).
        Vec3 sum;
        for (const auto& c : candidates) {
            sum = sum + c.side_a + c.side_b;
        }
        best_direction = sum.unit();
    } else {
        double best_score = 1.0e300;
        for (int seed_side = 0; seed_side < 2; ++seed_side) {
            const auto& first = candidates[order[0]];
            Vec3 weighted_sum =
                (seed_side == 0 ? first.side_a : first.side_b) * std::max(first.weight, 1e-12);
            std::vector<Vec3> chosen{weighted_sum.unit()};
            std::vector<double> weights{std::max(first.weight, 1e-12)};
            for (std::size_t k = 1; k < order.size(); ++k) {
                const auto& c = candidates[order[k]];
                const Vec3 mean = weighted_sum.unit();
                const Vec3& pick = (c.side_a - mean).norm() <= (c.side_b - mean).norm()
                                       ? c.side_a
                                       : c.side_b;
                const double w = std::max(c.weight, 1e-12);
                weighted_sum = weighted_sum + pick * w;
                chosen.push_back(pick);
                weights.push_back(w);
            }
            const Vec3 mean = weighted_sum.unit();
            double score = 0.0;
            double wsum = 0.0;
            for (std::size_t k = 0; k < chosen.size(); ++k) {
                score += weights[k] * (chosen[k] - mean).dot(chosen[k] - mean);
                wsum += weights[k];
            }
            score /= wsum;
            if (score < best_score) {
                best_score = score;
                best_direction = mean;
            }
        }
    }

    const GeodeticPosition estimate =
        ecef_to_geodetic(best_direction * wgs84::semi_major_axis_m);
    result.position.latitude_deg = estimate.latitude_deg;
    result.position.longitude_deg = estimate.longitude_deg;
    result.position = normalize_geodetic(result.position);
    result.position.altitude_m = 0.0;
    return result;
}

SolveResult fit_state(const std::vector<DopplerObservation>& observations,
                      const std::map<int, TleRecord>& ephemeris, const StateVector& initial,
                      const SolverOptions& options) {
    if (observations.size() < 5) {
        raise(ErrorCode::InsufficientData,
              "fit_state: need at least 5 observations, got " +
                  std::to_string(observations.size()));
    }
    std::set<double> distinct_times;
    for (const auto& obs : observations) distinct_times.insert(obs.time_unix_s);
    if (distinct_times.size() < 2) {
        raise(ErrorCode::InsufficientData,
              "fit_state: observations must span at least 2 distinct timestamps");
    }

    SolveResult result;

    // Satellite states do not depend on the trial state; propagate once.
    std::vector<PreparedObservation> prepared;
    prepared.reserve(observations.size());
    std::map<std::pair<int, double>, SatStateEcef> state_cache;
    for (const auto& obs : observations) {
        if (!obs.matched()) {
            raise(ErrorCode::UnmatchedObservation,
                  "fit_state: observation at t=" + std::to_string(obs.time_unix_s) +
                      " has no satellite identity");
        }
        const auto it = ephemeris.find(*obs.norad_id);
        if (it == ephemeris.end()) {
            raise(ErrorCode::MissingEphemeris,
                  "fit_state: no TLE for satellite " + std::to_string(*obs.norad_id));
        }
        const std::pair<int, double> key{*obs.norad_id, obs.time_unix_s};
        auto cached = state_cache.find(key);
        if (cached == state_cache.end()) {
            cached = state_cache.emplace(key, propagate_to(it->second, obs.time_unix_s)).first;
        }
        double weight = 1.0;
        const auto sigma_it = options.station_sigma_hz.find(obs.station_id);
        if (sigma_it != options.station_sigma_hz.end() && sigma_it->second > 0.0) {
            weight = 1.0 / (sigma_it->second * sigma_it->second);
        }
        prepared.push_back({obs.time_unix_s, obs.doppler_hz(), obs.base_frequency_hz,
                            cached->second, *obs.norad_id, weight});
        ++result.per_satellite_counts[*obs.norad_id];
    }

    if (observations.size() < 6) {
        result.warnings.push_back("fewer than 6 observations; solution weakly determined");
    }
    if (result.per_satellite_counts.size() < 2) {
        result.warnings.push_back("single-satellite dataset; geometry is weak");
    }

    StateVector state = initial;
    {
        const GeodeticPosition wrapped = normalize_geodetic(state.position());
        state.latitude_deg = wrapped.latitude_deg;
        state.longitude_deg = wrapped.longitude_deg;
    }
    if (options.fix_altitude_m) state.altitude_m = *options.fix_altitude_m;

    const std::array<double, 5>& scales = options.parameter_scales;
    std::array<bool, 5> active{true, true, !options.fix_altitude_m.has_value(), true, true};
    int n_active = 0;
    for (bool a : active) n_active += a ? 1 : 0;

    std::vector<double> residuals, trial_residuals, plus, minus;
    evaluate_residuals(prepared, state, residuals);
    double cost = cost_of(residuals, prepared, options.robust_loss_delta_hz);

    const std::size_t m = prepared.size();
    std::vector<std::array<double, 5>> jacobian(m);  // scaled-space, active columns used

    double damping = options.initial_damping;
    bool converged = false;
    int iterations = 0;
    std::array<std::array<double, 5>, 5> normal{};
    double final_damping = damping;

    while (iterations < options.max_iterations && !converged) {
        // Robust (IRLS) weights from the current residuals when Huber is on.
        std::vector<double> robust_weight(m, 1.0);
        if (options.robust_loss_delta_hz) {
            const double delta = *options.robust_loss_delta_hz;
            for (std::size_t i = 0; i < m; ++i) {
                const double ar = std::fabs(residuals[i]);
                if (ar > delta) robust_weight[i] = delta / ar;
            }
        }

        // Jacobian: central finite differences for the geodetic parameters,
        // exact columns for the clock terms.
        const double fd_step = 1.0;  // one scaled unit
        for (int p = 0; p < 3; ++p) {
            if (!active[p]) continue;
            std::array<double, 5> step_vec{};
            step_vec[p] = fd_step;
            const StateVector sp = apply_scaled_step(state, step_vec, scales, active);
            step_vec[p] = -fd_step;
            const StateVector sm = apply_scaled_step(state, step_vec, scales, active);
            evaluate_residuals(prepared, sp, plus);
            evaluate_residuals(prepared, sm, minus);
            for (std::size_t i = 0; i < m; ++i) {
                jacobian[i][p] = (plus[i] - minus[i]) / (2.0 * fd_step);
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            jacobian[i][3] = -scales[3];
            jacobian[i][4] = -scales[4] * (prepared[i].time_unix_s - state.reference_epoch_unix_s);
        }

        // Compact to active columns and form the normal equations.
        std::array<int, 5> col_of{};
        int k = 0;
        for (int p = 0; p < 5; ++p) {
            if (active[p]) col_of[k++] = p;
        }
        normal = {};
        std::array<double, 5> gradient{};
        for (std::size_t i = 0; i < m; ++i) {
            const double w = prepared[i].weight * robust_weight[i];
            for (int a = 0; a < k; ++a) {
                const double ja = jacobian[i][col_of[a]];
                gradient[a] += w * ja * residuals[i];
                for (int b = 0; b <= a; ++b) {
                    normal[a][b] += w * ja * jacobian[i][col_of[b]];
                }
            }
        }
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) normal[a][b] = normal[b][a];

        // Inner damping loop: raise lambda until a step is accepted.
        bool accepted = false;
        while (!accepted) {
            std::array<std::array<double, 5>, 5> damped = normal;
            for (int a = 0; a < k; ++a) {
                damped[a][a] += damping * std::max(normal[a][a], 1.0e-12);
            }
            std::array<double, 5> rhs{};
            for (int a = 0; a < k; ++a) rhs[a] = -gradient[a];
            const bool solved = cholesky_solve<5>(damped, rhs, k);
            if (!solved) {
                damping *= 10.0;
                if (damping > 1.0e2 * kDampingAbortLimit) {
                    const auto eigs = jacobi_eigenvalues<5>(normal, k);
                    double emax = 0.0, emin = 1.0e300;
                    for (int a = 0; a < k; ++a) {
                        emax = std::max(emax, std::fabs(eigs[a]));
                        emin = std::min(emin, std::fabs(eigs[a]));
                    }
                    raise(ErrorCode::SingularNormalMatrix,
                          "fit_state: normal matrix is singular (condition estimate " +
                              std::to_string(emax / std::max(emin, 1.0e-300)) + ")");
                }
                continue;
            }
            std::array<double, 5> full_step{};
            double step_norm_sq = 0.0;
            for (int a = 0; a < k; ++a) {
                full_step[col_of[a]] = rhs[a];
                step_norm_sq += rhs[a] * rhs[a];
            }
            const StateVector trial = apply_scaled_step(state, full_step, scales, active);
            evaluate_residuals(prepared, trial, trial_residuals);
            const double trial_cost =
                cost_of(trial_residuals, prepared, options.robust_loss_delta_hz);
            if (trial_cost < cost || trial_cost == 0.0) {
                const double previous_cost = cost;
                state = trial;
                residuals.swap(trial_residuals);
                cost = trial_cost;
                final_damping = damping;
                damping = std::max(damping / 10.0, 1.0e-12);
                accepted = true;
                if (std::sqrt(step_norm_sq) < options.step_tolerance) {
                    converged = true;
                } else if (previous_cost > 0.0 &&
                           (previous_cost - cost) / previous_cost < options.cost_tolerance) {
                    converged = true;
                } else if (cost == 0.0) {
                    converged = true;
                }
            } else {
                damping *= 10.0;
                if (damping > kDampingAbortLimit) {
                    break;  // cannot improve; report unconverged
                }
            }
        }
        ++iterations;
        if (!accepted) break;
    }

    result.state = state;
    result.converged = converged;
    result.iterations = iterations;
    result.residuals = residuals;
    result.final_rmse_hz = doppler_rmse(residuals);
    result.residual_rows.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        ResidualRow row;
        row.norad_id = prepared[i].norad_id;
        row.time_unix_s = prepared[i].time_unix_s;
        row.measured_doppler_hz = prepared[i].doppler_hz;
        row.residual_hz = residuals[i];
        row.predicted_doppler_hz = row.measured_doppler_hz - row.residual_hz;
        result.residual_rows.push_back(row);
    }

    // Condition estimate and informational covariance from the damped normal
    // matrix at the solution.
    {
        std::array<int, 5> col_of{};
        int k = 0;
        for (int p = 0; p < 5; ++p) {
            if (active[p]) col_of[k++] = p;
        }
        const auto eigs = jacobi_eigenvalues<5>(normal, k);
        double emax = 0.0, emin = 1.0e300;
        for (int a = 0; a < k; ++a) {
            emax = std::max(emax, std::fabs(eigs[a]));
            emin = std::min(emin, std::fabs(eigs[a]));
        }
        result.condition_estimate = emax / std::max(emin, 1.0e-300);
        if (result.condition_estimate > 1.0e10) {
            result.warnings.push_back("normal matrix condition estimate exceeds 1e10");
        }

        std::array<std::array<double, 5>, 5> damped = normal;
        for (int a = 0; a < k; ++a) {
            damped[a][a] += final_damping * std::max(normal[a][a], 1.0e-12);
        }
        std::array<std::array<double, 5>, 5> inv{};
        if (inverse_matrix5(damped, k, inv) != 0.0) {
            const double dof = static_cast<double>(m) - static_cast<double>(n_active);
            const double sigma_sq = dof > 0.0 ? cost / dof : 1.0;
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b) {
                    result.covariance[col_of[a]][col_of[b]] =
                        inv[a][b] * sigma_sq * scales[col_of[a]] * scales[col_of[b]];
                }
            }
        }
    }
    return result;
}

namespace {

StateVector initial_state_for(const std::vector<DopplerObservation>& observations,
                              const std::map<int, TleRecord>& ephemeris,
                              const SolverOptions& options) {
    const InitialEstimate estimate = initial_estimate(by_satellite(observations), ephemeris);
    StateVector state;
    state.latitude_deg = estimate.position.latitude_deg;
    state.longitude_deg = estimate.position.longitude_deg;
    state.altitude_m = options.fix_altitude_m.value_or(0.0);
    double t_ref = observations.front().time_unix_s;
    for (const auto& obs : observations) t_ref = std::min(t_ref, obs.time_unix_s);
    state.reference_epoch_unix_s = t_ref;
    return state;
}

}  // namespace

SolveResult solve_standalone(const std::vector<DopplerObservation>& rover_observations,
                             const std::map<int, TleRecord>& ephemeris,
                             const SolverOptions& options) {
    std::vector<DopplerObservation> matched;
    matched.reserve(rover_observations.size());
    for (const auto& obs : rover_observations) {
        if (obs.matched()) matched.push_back(obs);
    }
    if (matched.empty()) {
        raise(ErrorCode::InsufficientData, "solve_standalone: no matched observations");
    }
    const StateVector initial = initial_state_for(matched, ephemeris, options);
    SolveResult result = fit_state(matched, ephemeris, initial, options);
    if (matched.size() != rover_observations.size()) {
        result.warnings.push_back(
            std::to_string(rover_observations.size() - matched.size()) +
            " unmatched observations were excluded");
    }
    return result;
}

DifferentialResult solve_differential(const std::vector<DopplerObservation>& rover_observations,
                                      const std::vector<DopplerObservation>& base_observations,
                                      const StationMeta& base_station,
                                      const std::map<int, TleRecord>& ephemeris,
                                      const SolverOptions& options,
                                      double max_extrapolation_s,
                                      bool estimate_base_clock) {
    DifferentialResult result;
    result.error_series =
        compute_base_error_series(base_observations, base_station, ephemeris, {});
    if (estimate_base_clock) {
        const BaseClockModel estimated = estimate_base_clock_offset(result.error_series);
        result.error_series = compute_base_error_series(base_observations, base_station,
                                                        ephemeris, estimated);
    }
    auto [corrected, report] =
        apply_corrections(rover_observations, result.error_series, max_extrapolation_s);
    result.corrections = std::move(report);
    result.solve = solve_standalone(corrected, ephemeris, options);
    if (!result.corrections.skipped.empty()) {
        result.solve.warnings.push_back(
            std::to_string(result.corrections.skipped.size()) +
            " rover observations were uncorrectable and excluded from the differential solve");
    }
    return result;
}

std::string residuals_to_csv(const SolveResult& result) {
    std::string out = "norad_id,time_unix_s,f_meas_hz,f_pred_hz,residual_hz\n";
    for (const auto& row : result.residual_rows) {
        out += std::to_string(row.norad_id);
        out += ',';
        out += csv::format_double(row.time_unix_s);
        out += ',';
        out += csv::format_double(row.measured_doppler_hz);
        out += ',';
        out += csv::format_double(row.predicted_doppler_hz);
        out += ',';
        out += csv::format_double(row.residual_hz);
        out += '\n';
    }
    return out;
}

}  // namespace snapdop
