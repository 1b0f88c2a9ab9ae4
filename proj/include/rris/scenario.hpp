#pragma once

#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace rris {

using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

double distance(const Position& a, const Position& b);

// Gauss-Markov mobility inside a disc. Velocities are planar.
struct MobilityParams {
    double memory = 0.8;
    double mean_speed = 1.0;  // m/s
    double speed_std = 0.3;   // m/s, per velocity component
    Position region_center{30.0, 10.0, 0.0};
    double region_radius = 5.0;  // m

    void validate() const;
};

struct MobilityState {
    std::vector<Position> positions;
    std::vector<Vec2> velocities;
    std::vector<Vec2> mean_velocities;
};

/// Orientation of the surface. The element line runs along
/// `initial_plane_direction` rotated counterclockwise by `rotation`.
struct RisPose {
    Position position{30.0, 0.0, 0.0};
    Vec2 initial_plane_direction{0.0, -1.0};
    double rotation = 0.0;  // rad

    Vec2 plane_direction() const;
};

struct AngleSet {
    std::vector<double> theta0_k;  // UE angles w.r.t. the initial plane direction
    double theta0_B = 0.0;
    std::vector<double> theta_k;  // after rotation
    double theta_B = 0.0;
    std::vector<int> indicator_k;  // 1 iff theta_k in [0, pi]
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double v) const { return v >= lo && v <= hi; }
};

struct Distances {
    std::vector<double> d_kR;
    double d_RB = 0.0;
};

/// Reduces an angle into [0, 2*pi).
double wrap_angle(double a);

/// Counterclockwise angle from `reference` to the direction `from -> to`, in [0, 2*pi).
double planar_angle(const Vec2& reference, const Position& from, const Position& to);

/// Throws DegenerateGeometry if any entity sits exactly on the surface.
AngleSet angles_from_geometry(const RisPose& ris, const Position& bs, std::span<const Position> ues);

/// Rotations that keep the BS in the reflection half-space.
Interval rotation_bounds(double theta0_B);

Distances distances(const RisPose& ris, const Position& bs, std::span<const Position> ues);

/// Offsets of the N elements along the plane line (half-wavelength spacing, centred).
std::vector<double> element_offsets(int num_elements, double wavelength);

/// Exact distance from every element to `target` for the current pose.
std::vector<double> element_distances(const RisPose& ris, const Position& target, int num_elements,
                                      double wavelength);

/// Uniform initial placement in the mobility disc with per-UE mean headings.
MobilityState initial_mobility(int num_ues, const MobilityParams& params, Rng& rng);

/// One Gauss-Markov update of duration `tau` followed by reflection at the disc boundary.
MobilityState step_mobility(const MobilityState& state, const MobilityParams& params, double tau, Rng& rng);

} // namespace rris
