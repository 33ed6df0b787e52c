#include "rlg/serialize.hpp"

#include <stdexcept>

namespace rlg {

Json to_json(const PulseSchedule& schedule) {
    Json segs = Json::array();
    for (const auto& s : schedule.segments) {
        segs.push_back({{"dt", s.dt}, {"fe", s.f_e}, {"fg", s.f_g}, {"delta", s.delta}});
    }
    return Json{{"segments", std::move(segs)}};
}

PulseSchedule schedule_from_json(const Json& j) {
    PulseSchedule schedule;
    for (const auto& s : j.at("segments")) {
        schedule.segments.push_back(Segment{s.at("dt").get<double>(),
                                            s.at("fe").get<int>(), s.at("fg").get<int>(),
                                            s.value("delta", 0.0)});
    }
    validate(schedule);
    return schedule;
}

Json to_json(const MeasurementSpec& spec) {
    return Json{{"phi", spec.phi},
                {"tau", spec.tau},
                {"t_end", spec.t_end},
                {"schedule", to_json(spec.schedule)}};
}

MeasurementSpec measurement_spec_from_json(const Json& j) {
    MeasurementSpec spec{j.at("phi").get<double>(), j.at("tau").get<double>(),
                         j.at("t_end").get<double>(),
                         schedule_from_json(j.at("schedule"))};
    validate(spec);
    return spec;
}

Json to_json(const OscillatorState& state) {
    if (std::holds_alternative<Ground>(state)) {
        return Json{{"type", "ground"}};
    }
    if (const auto* th = std::get_if<Thermal>(&state)) {
        return Json{{"type", "thermal"}, {"nbar", th->nbar}};
    }
    if (const auto* co = std::get_if<Coherent>(&state)) {
        return Json{{"type", "coherent"},
                    {"re", co->amp.real()},
                    {"im", co->amp.imag()}};
    }
    const auto& cat = std::get<Cat>(state);
    Json comps = Json::array();
    for (const auto& c : cat.components) {
        comps.push_back({{"w_re", c.weight.real()},
                         {"w_im", c.weight.imag()},
                         {"re", c.amp.real()},
                         {"im", c.amp.imag()}});
    }
    return Json{{"type", "cat"}, {"components", std::move(comps)}};
}

OscillatorState state_from_json(const Json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ground") {
        return Ground{};
    }
    if (type == "thermal") {
        return Thermal{j.at("nbar").get<double>()};
    }
    if (type == "coherent") {
        return Coherent{{j.at("re").get<double>(), j.at("im").get<double>()}};
    }
    if (type == "cat") {
        std::vector<CatComponent> comps;
        for (const auto& c : j.at("components")) {
            comps.push_back(CatComponent{
                {c.at("w_re").get<double>(), c.at("w_im").get<double>()},
                {c.at("re").get<double>(), c.at("im").get<double>()}});
        }
        return make_cat(std::move(comps));
    }
    throw std::invalid_argument("state_from_json: unknown state type '" + type + "'");
}

Json to_json(const CorrelationRequest& request) {
    Json specs = Json::array();
    for (const auto& s : request.specs) {
        specs.push_back(to_json(s));
    }
    return Json{{"initial", to_json(request.initial)}, {"specs", std::move(specs)}};
}

CorrelationRequest correlation_request_from_json(const Json& j) {
    CorrelationRequest request;
    request.initial = state_from_json(j.at("initial"));
    for (const auto& s : j.at("specs")) {
        request.specs.push_back(measurement_spec_from_json(s));
    }
    validate(request);
    return request;
}

}  // namespace rlg
