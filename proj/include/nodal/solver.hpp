#pragma once

#include "nodal/assembly.hpp"
#include "nodal/nodes.hpp"
#include "nodal/weather.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nodal {

enum class LinearSolver { dense_lu, sparse_lu };

struct IntegratorConfig {
    double dt = 600.0;
    double theta = 1.0;
    double coupling_tolerance = 1e-3;
    int max_coupling_iterations = 100;
    LinearSolver linear_solver = LinearSolver::dense_lu;
    std::optional<double> horizon;              // s; weather span when unset
    std::optional<double> initial_temperature;  // degC; first T_ae when unset

    static IntegratorConfig from(const SimulationDefaults& d);
    // Throws Error when a field is outside its admissible range.
    void validate() const;
};

struct StepDiagnostics {
    int iterations = 0;
    double residual = 0.0;        // max change of exchanged (T_ai, T_rm) in the last sweep
    double shared_mismatch = 0.0; // max disagreement on recovery-place nodes
    bool converged = true;
    bool extrapolated = false;
};

// Global node temperatures are stored in abs-number order: entry k is node k+1.
struct SimulationState {
    double time = 0.0;
    Eigen::VectorXd nodes;                          // reconciliation buffer, latest values
    std::map<std::string, Eigen::VectorXd> zones;   // per zone, aligned with row maps
};

struct SimulationResult {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> temperatures;  // steps + 1 entries
    std::vector<StepDiagnostics> steps;         // one per step
    std::vector<double> oracle_diff;            // per step, filled when requested

    bool all_converged() const;
    double max_oracle_diff() const;
};

// Solves (C/dt - theta A) T = (C/dt + (1 - theta) A) T_prev + B. Rows with
// zero capacity are algebraic and solve -A T = B.
Eigen::VectorXd step_zone(const ZoneStateSystem& sys, const Eigen::VectorXd& T_prev, const IntegratorConfig& cfg);

// Zone models of one building: static elementary parts assembled once,
// input-dependent vectors refreshed per step.
class ZoneModels {
public:
    ZoneModels(const NodalStructure& s, const FilmCoefficients& f);

    const NodalStructure& structure() const { return s_; }
    const FilmCoefficients& films() const { return f_; }
    ElementaryMatrices& parts(const std::string& zone) { return parts_.at(zone); }
    const ElementaryMatrices& parts(const std::string& zone) const { return parts_.at(zone); }

    void refresh(const BoundaryInputs& inputs);

private:
    NodalStructure s_;
    FilmCoefficients f_;
    std::map<std::string, ElementaryMatrices> parts_;
};

SimulationState initial_state(const NodalStructure& s, double temperature);

// One time step of the iterative zone coupling (Gauss-Seidel over zones in
// description order). `models` must have been refreshed for this step.
StepDiagnostics couple_step(ZoneModels& models, SimulationState& state, const IntegratorConfig& cfg);

struct GlobalSystem {
    Eigen::VectorXd C;
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
};

// Whole-building system over every node, zone couplings as genuine matrix
// entries. Built directly from the node records, independent of the per-zone
// elementary assembly.
GlobalSystem assemble_global(const NodalStructure& s, const FilmCoefficients& f, const BoundaryInputs& inputs);

Eigen::VectorXd direct_global_solve(const NodalStructure& s, const FilmCoefficients& f, const BoundaryInputs& inputs,
                                    const IntegratorConfig& cfg, const Eigen::VectorXd& T_prev);

Eigen::VectorXd steady_state(const NodalStructure& s, const FilmCoefficients& f, const BoundaryInputs& inputs,
                             LinearSolver solver = LinearSolver::dense_lu);

struct SimulateOptions {
    bool oracle = false;
};

SimulationResult simulate(const NodalStructure& s, const FilmCoefficients& f, const WeatherSeries& w,
                          const IntegratorConfig& cfg, const SimulateOptions& opts = {});
SimulationResult simulate(const BuildingDescription& b, const WeatherSeries& w, const IntegratorConfig& cfg,
                          const SimulateOptions& opts = {});

} // namespace nodal
