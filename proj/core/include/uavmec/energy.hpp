#pragma once

#include <uavmec/model.hpp>

#include <span>

namespace uavmec {

/// Busy and elapsed simulated time of one CPU. 0 <= busy_seconds <= elapsed_seconds.
struct EnergyLedger {
    CpuId cpu_id{};
    double busy_seconds = 0.0;
    double elapsed_seconds = 0.0;

    bool operator==(const EnergyLedger&) const = default;
};

/// Rotorcraft hover power (M + m)^{3/2} * sqrt(g^3 / (2 rho A n)).
/// Throws std::invalid_argument when density, disc area or rotor count is not positive.
double hover_power(const HoverModelParams& params);

/// `cfg.energy` with hover power replaced by the hover model when one is configured.
EnergyParams effective_energy(const SimConfig& cfg);

/// Battery left after the ledger's time. Not clamped: a negative value means exhausted.
double remaining_energy(const EnergyParams& params, const EnergyLedger& ledger);

double remaining_percentage(const EnergyParams& params, const EnergyLedger& ledger);

/// Energy drained per second while idle (hover + antenna + idle CPU).
double idle_drain_rate(const EnergyParams& params);

/// Extra energy per busy second on top of the idle drain.
double active_extra_rate(const EnergyParams& params);

/// Remaining energy at the moment a UAV whose queue holds `backlog` seconds of
/// work would start on a newly delegated task; the backlog counts as busy time.
double expected_remaining_at_start(const EnergyParams& params, double remaining_now, double backlog);

/// Three-level standing of the selected CPU's expected energy against the best UAV:
/// 2 within epsilon of the maximum, 0 at 2 * epsilon or more below, 1 between.
/// MEC selections always score 2 (grid powered).
int battery_reward_level(double expected_remaining_selected, std::span<const double> expected_remaining_all_uavs,
                         double epsilon_batt, bool selected_is_mec);

}  // namespace uavmec
