#pragma once

#include <cstdint>

#include "thermik/scenario.hpp"
#include "thermik/telemetry.hpp"

namespace thermik {

/// Simulates operation telemetry for the scenario's generation schedule:
/// the robot cycles through the pose list under the schedule's contact
/// (poses reached by contact-projected linear ramps), actuator efforts are
/// the contact-consistent static efforts, and every thermal node starts at
/// ambient and integrates by Euler at the sample period. Gaussian noise of
/// the configured sigma is added to the recorded temperatures only.
sysid::TelemetryLog generate_telemetry(const Scenario& scenario, std::uint64_t seed);

}  // namespace thermik
