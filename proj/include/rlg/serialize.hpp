// serialize.hpp — JSON representations of schedules, measurement specs and
// correlation requests, used by the CLI and its config files.

#pragma once

#include <json.hpp>

#include "rlg/phase_space.hpp"
#include "rlg/pulses.hpp"
#include "rlg/ramsey.hpp"

namespace rlg {

using Json = nlohmann::ordered_json;

// {"segments":[{"dt":..., "fe":..., "fg":..., "delta":...}]}
Json to_json(const PulseSchedule& schedule);
PulseSchedule schedule_from_json(const Json& j);

Json to_json(const MeasurementSpec& spec);
MeasurementSpec measurement_spec_from_json(const Json& j);

Json to_json(const OscillatorState& state);
OscillatorState state_from_json(const Json& j);

Json to_json(const CorrelationRequest& request);
CorrelationRequest correlation_request_from_json(const Json& j);

}  // namespace rlg
