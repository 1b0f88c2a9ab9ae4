#include "rris/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rris/error.hpp"

namespace rris {

namespace {

// Round-off from theta0 - delta at the interval endpoints snaps onto the
// half-space boundary instead of spilling a few ulps past it.
constexpr double kBoundarySnap = 1e-12;

double snap_half_space(double theta) {
    if (std::abs(theta - kPi) < kBoundarySnap) return kPi;
    if (theta > kTwoPi - kBoundarySnap) return 0.0;
    return theta;
}

} // namespace

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

void MobilityParams::validate() const {
    if (!(memory >= 0.0 && memory <= 1.0)) throw InvalidArgument("mobility memory must lie in [0,1]");
    if (!(mean_speed >= 0.0)) throw InvalidArgument("mobility mean_speed must be >= 0");
    if (!(speed_std >= 0.0)) throw InvalidArgument("mobility speed_std must be >= 0");
    if (!(region_radius > 0.0)) throw InvalidArgument("mobility region_radius must be > 0");
}

Vec2 RisPose::plane_direction() const {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    return {c * initial_plane_direction.x - s * initial_plane_direction.y,
            s * initial_plane_direction.x + c * initial_plane_direction.y};
}

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double planar_angle(const Vec2& reference, const Position& from, const Position& to) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    if (dx == 0.0 && dy == 0.0) {
        throw DegenerateGeometry("entity coincides with the RIS position");
    }
    const double cross = reference.x * dy - reference.y * dx;
    const double dot = reference.x * dx + reference.y * dy;
    return wrap_angle(std::atan2(cross, dot));
}

AngleSet angles_from_geometry(const RisPose& ris, const Position& bs, std::span<const Position> ues) {
    const Vec2& n0 = ris.initial_plane_direction;
    if (std::abs(std::hypot(n0.x, n0.y) - 1.0) > 1e-9) {
        throw InvalidArgument("initial plane direction must have unit norm");
    }
    AngleSet out;
    out.theta0_B = planar_angle(n0, ris.position, bs);
    out.theta_B = snap_half_space(wrap_angle(out.theta0_B - ris.rotation));
    out.theta0_k.reserve(ues.size());
    out.theta_k.reserve(ues.size());
    out.indicator_k.reserve(ues.size());
    for (const auto& ue : ues) {
        const double t0 = planar_angle(n0, ris.position, ue);
        const double t = snap_half_space(wrap_angle(t0 - ris.rotation));
        out.theta0_k.push_back(t0);
        out.theta_k.push_back(t);
        out.indicator_k.push_back(t <= kPi ? 1 : 0);
    }
    return out;
}

Interval rotation_bounds(double theta0_B) {
    return {theta0_B - kPi, theta0_B};
}

Distances distances(const RisPose& ris, const Position& bs, std::span<const Position> ues) {
    Distances out;
    out.d_RB = distance(ris.position, bs);
    if (out.d_RB == 0.0) throw DegenerateGeometry("BS coincides with the RIS position");
    out.d_kR.reserve(ues.size());
    for (std::size_t k = 0; k < ues.size(); ++k) {
        const double d = distance(ris.position, ues[k]);
        if (d == 0.0) throw DegenerateGeometry("UE " + std::to_string(k) + " coincides with the RIS position");
        out.d_kR.push_back(d);
    }
    return out;
}

std::vector<double> element_offsets(int num_elements, double wavelength) {
    if (num_elements < 1) throw InvalidArgument("number of RIS elements must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(num_elements));
    const double centre = 0.5 * (num_elements - 1);
    for (int n = 0; n < num_elements; ++n) {
        out[static_cast<std::size_t>(n)] = (n - centre) * 0.5 * wavelength;
    }
    return out;
}

std::vector<double> element_distances(const RisPose& ris, const Position& target, int num_elements,
                                      double wavelength) {
    const Vec2 u = ris.plane_direction();
    const auto offsets = element_offsets(num_elements, wavelength);
    std::vector<double> out;
    out.reserve(offsets.size());
    for (double s : offsets) {
        const Position p{ris.position.x + s * u.x, ris.position.y + s * u.y, ris.position.z};
        out.push_back(distance(p, target));
    }
    return out;
}

MobilityState initial_mobility(int num_ues, const MobilityParams& params, Rng& rng) {
    params.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MobilityState s;
    for (int k = 0; k < num_ues; ++k) {
        const double r = params.region_radius * std::sqrt(unit(rng));
        const double a = kTwoPi * unit(rng);
        s.positions.push_back({params.region_center.x + r * std::cos(a), params.region_center.y + r * std::sin(a),
                               params.region_center.z});
        const double heading = kTwoPi * unit(rng);
        const Vec2 mean{params.mean_speed * std::cos(heading), params.mean_speed * std::sin(heading)};
        s.mean_velocities.push_back(mean);
        s.velocities.push_back(mean);
    }
    return s;
}

MobilityState step_mobility(const MobilityState& state, const MobilityParams& params, double tau, Rng& rng) {
    params.validate();
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double m = params.memory;
    const double noise_scale = std::sqrt(std::max(0.0, 1.0 - m * m)) * params.speed_std;
    const double R = params.region_radius;
    const Position& c = params.region_center;

    MobilityState next = state;
    for (std::size_t k = 0; k < state.positions.size(); ++k) {
        const Vec2& v = state.velocities[k];
        const Vec2& mv = state.mean_velocities[k];
        const double nx = gauss(rng);
        const double ny = gauss(rng);
        Vec2 vn{m * v.x + (1.0 - m) * mv.x + noise_scale * nx, m * v.y + (1.0 - m) * mv.y + noise_scale * ny};
        Vec2 mvn = mv;

        double px = state.positions[k].x + vn.x * tau - c.x;
        double py = state.positions[k].y + vn.y * tau - c.y;
        const double r = std::hypot(px, py);
        if (r > R) {
            // Mirror radially back inside and reflect both velocities about the normal.
            const double ux = px / r;
            const double uy = py / r;
            const double rr = std::clamp(2.0 * R - r, 0.0, R);
            px = ux * rr;
            py = uy * rr;
            const double dv = vn.x * ux + vn.y * uy;
            if (dv > 0.0) {
                vn.x -= 2.0 * dv * ux;
                vn.y -= 2.0 * dv * uy;
            }
            const double dm = mvn.x * ux + mvn.y * uy;
            if (dm > 0.0) {
                mvn.x -= 2.0 * dm * ux;
                mvn.y -= 2.0 * dm * uy;
            }
        }
        next.positions[k] = {c.x + px, c.y + py, state.positions[k].z};
        next.velocities[k] = vn;
        next.mean_velocities[k] = mvn;
    }
    return next;
}

} // namespace rris
