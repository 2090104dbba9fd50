#pragma once

// Geometrically implicit time stepping for the tumbling robot.
//
// Unknowns per step, forces rather than impulses (p = h * lambda):
//   u = [v+, w+, a1, a2, lambda_t, lambda_o, lambda_r]
//   v = [l_1..l_m, l2, sigma, lambda_n]

#include "tumblesim/body.hpp"
#include "tumblesim/contact.hpp"
#include "tumblesim/friction.hpp"
#include "tumblesim/geometry.hpp"
#include "tumblesim/magnetics.hpp"
#include "tumblesim/mncp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tumble {

/// Surface and loading parameters, SI units.
struct MaterialEnvironment {
    Real mu = 0.3;
    Real adhesion = 1.19;        // C, N/m^2
    Real electrostatic = 6.54e-7; // F_elect, N, pressing the robot onto the substrate
    Real e_t = 1.0;
    Real e_o = 1.0;
    std::optional<Real> e_r;     // mm; contact-radius convention when empty
    Real gravity = units::kGravity; // m/s^2
    Real incline_deg = 0.0;

    void validate() const;
    /// Gravitational acceleration in the substrate frame, mm/s^2.
    Vec3 gravity_vector() const;
    Real electrostatic_internal() const { return electrostatic * units::kNewton; }
};

struct Robot {
    ShapeModel shape;
    InertiaModel inertia;

    Robot(ShapeModel s, Real mass_kg);
};

struct StepperConfig {
    Real h = 1e-3;
    int max_halvings = 4;
    SolverConfig solver;
    AreaRule area;
    bool finite_difference_jacobian = false;
};

struct SimulationState {
    BodyConfiguration config;
    AdhesionState adhesion;
    Real t = 0.0;
    VecX warm;
    std::optional<std::size_t> warm_piece;
};

/// One accepted step, or the initial state.
struct StepRecord {
    Real t = 0.0;
    BodyConfiguration config;
    Real lambda_n = 0.0, lambda_t = 0.0, lambda_o = 0.0, lambda_r = 0.0; // g*mm/s^2 (torque g*mm^2/s^2)
    Real sigma = 0.0;
    Real lambda_a = 0.0; // adhesion applied during this step
    Real area = 0.0;     // contact area identified at the end of this step
    int active_face = -1;
    int piece = -1;
    Vec3 a1 = Vec3::Zero();
    Real gap = 0.0;
    Real slip_speed = 0.0;
    Real xi = 0.0;
    Real complementarity = 0.0; // worst |min(v, F)| over the pairs
    int iterations = 0;
    int halvings = 0;
    Real merit = 0.0;
};

struct Trajectory {
    Real h = 0.0;
    std::vector<StepRecord> samples;
    bool aborted = false;
    std::string message;
};

/// Per-step residual. Generic in the scalar so it can be differentiated.
class StepSystem {
public:
    StepSystem(const SimulationState& state, const Robot& robot, const MaterialEnvironment& env,
               const MagneticActuation& act, Real h, std::size_t piece, const Substrate& substrate = {});

    int constraint_count() const { return m_; }
    int size() const { return 18 + m_; }
    int n_eq() const { return 15; }
    std::size_t piece() const { return piece_; }

    template <typename S>
    void residual(const Eigen::Matrix<S, Eigen::Dynamic, 1>& z, Eigen::Matrix<S, Eigen::Dynamic, 1>& r) const;

    /// Residual plus its Jacobian by forward-mode automatic differentiation.
    void residual_and_jacobian(const VecX& z, VecX& r, MatX& jac) const;

    /// Problem view; the StepSystem must outlive it.
    MncpProblem problem(bool finite_difference) const;

    VecX initial_guess() const;

    /// Index helpers into z.
    int idx_l(int i) const { return 15 + i; }
    int idx_l2() const { return 15 + m_; }
    int idx_sigma() const { return 16 + m_; }
    int idx_lambda_n() const { return 17 + m_; }

    const ContactFrame& frame() const { return frame_; }
    const FrictionParams& friction() const { return fp_; }
    Real lambda_a() const { return lambda_a_; }

private:
    const ConvexPiece* piece_ptr_;
    std::size_t piece_;
    int m_;
    Substrate substrate_;
    ContactFrame frame_;
    FrictionParams fp_;
    MagneticActuation act_;
    Vec3 x_, v_, w_;
    Mat3 r_;
    Real mass_;
    Mat3 inertia_world_;
    Vec3 gyro_;
    Vec3 force_ext_;
    Vec3 field_;
    Real lambda_a_;
    Real h_;
};

/// Advances the state by h, halving on solver failure. Returns false when all
/// retries fail; the state is then unchanged.
bool step(SimulationState& state, const Robot& robot, const MaterialEnvironment& env, const MagneticActuation& act,
          const StepperConfig& cfg, StepRecord* record = nullptr, std::string* error = nullptr);

Trajectory simulate(const BodyConfiguration& initial, Real duration, const Robot& robot,
                    const MaterialEnvironment& env, const MagneticActuation& act, const StepperConfig& cfg);

} // namespace tumble
