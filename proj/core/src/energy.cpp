#include <uavmec/energy.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavmec {

double hover_power(const HoverModelParams& p) {
    if (!(p.fluid_density > 0.0) || !(p.rotor_disc_area > 0.0) || p.rotor_count < 1) {
        throw std::invalid_argument("hover_power: fluid density, rotor disc area and rotor count must be positive");
    }
    if (p.frame_mass < 0.0 || p.payload_mass < 0.0 || p.gravity < 0.0) {
        throw std::invalid_argument("hover_power: masses and gravity must be non-negative");
    }
    const double mass = p.frame_mass + p.payload_mass;
    const double g3 = p.gravity * p.gravity * p.gravity;
    return std::pow(mass, 1.5) * std::sqrt(g3 / (2.0 * p.fluid_density * p.rotor_disc_area * p.rotor_count));
}

EnergyParams effective_energy(const SimConfig& cfg) {
    EnergyParams params = cfg.energy;
    params.hover_power = cfg.effective_hover_power();
    return params;
}

double idle_drain_rate(const EnergyParams& p) {
    return (p.hover_power + p.antenna_power + p.cpu_idle_power) * p.time_scale;
}

double active_extra_rate(const EnergyParams& p) {
    return (p.cpu_active_power - p.cpu_idle_power) * p.time_scale;
}

double remaining_energy(const EnergyParams& params, const EnergyLedger& ledger) {
    return params.battery_capacity - idle_drain_rate(params) * ledger.elapsed_seconds -
           active_extra_rate(params) * ledger.busy_seconds;
}

double remaining_percentage(const EnergyParams& params, const EnergyLedger& ledger) {
    return 100.0 * remaining_energy(params, ledger) / params.battery_capacity;
}

double expected_remaining_at_start(const EnergyParams& params, double remaining_now, double backlog) {
    return remaining_now - (idle_drain_rate(params) + active_extra_rate(params)) * backlog;
}

int battery_reward_level(double expected_remaining_selected, std::span<const double> expected_remaining_all_uavs,
                         double epsilon_batt, bool selected_is_mec) {
    if (selected_is_mec) return 2;
    if (expected_remaining_all_uavs.empty()) {
        throw std::invalid_argument("battery_reward_level: no UAV energies supplied");
    }
    const double best = *std::max_element(expected_remaining_all_uavs.begin(), expected_remaining_all_uavs.end());
    const double gap = expected_remaining_selected - best;
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    if (gap >= -epsilon_batt - tol) return 2;
    if (gap <= -2.0 * epsilon_batt + tol) return 0;
    return 1;
}

}  // namespace uavmec
