#pragma once

#include "fakebook/domain/model.hpp"
#include "fakebook/orchestrator/runner.hpp"
#include "fakebook/platform/telemetry.hpp"

#include <nlohmann/json.hpp>

// JSON documents used by the store. Instants are ISO-8601 UTC strings.
namespace fakebook {

template <class Tag>
void to_json(nlohmann::json& j, const Id<Tag>& id) {
    j = id.str();
}
template <class Tag>
void from_json(const nlohmann::json& j, Id<Tag>& id) {
    id = Id<Tag>(j.get<std::string>());
}

nlohmann::json instant_json(Instant t);
Instant instant_from(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ProfileCard& v);
void from_json(const nlohmann::json& j, ProfileCard& v);
void to_json(nlohmann::json& j, const Account& v);
void from_json(const nlohmann::json& j, Account& v);
void to_json(nlohmann::json& j, const Experiment& v);
void from_json(const nlohmann::json& j, Experiment& v);
void to_json(nlohmann::json& j, const Post& v);
void from_json(const nlohmann::json& j, Post& v);
void to_json(nlohmann::json& j, const Reaction& v);
void from_json(const nlohmann::json& j, Reaction& v);
void to_json(nlohmann::json& j, const Advertisement& v);
void from_json(const nlohmann::json& j, Advertisement& v);
void to_json(nlohmann::json& j, const FeatureFlags& v);
/// Missing keys keep the values already in `v`.
void from_json(const nlohmann::json& j, FeatureFlags& v);
void to_json(nlohmann::json& j, const ScheduledEvent& v);
void from_json(const nlohmann::json& j, ScheduledEvent& v);
void to_json(nlohmann::json& j, const PostGrant& v);
void from_json(const nlohmann::json& j, PostGrant& v);
void to_json(nlohmann::json& j, const TreatmentLedger& v);
void from_json(const nlohmann::json& j, TreatmentLedger& v);
void to_json(nlohmann::json& j, const RunnerState& v);
void from_json(const nlohmann::json& j, RunnerState& v);
void to_json(nlohmann::json& j, const Session& v);
void from_json(const nlohmann::json& j, Session& v);
void to_json(nlohmann::json& j, const ViewEvent& v);
void from_json(const nlohmann::json& j, ViewEvent& v);
void to_json(nlohmann::json& j, const AdClickEvent& v);
void from_json(const nlohmann::json& j, AdClickEvent& v);

}  // namespace fakebook
