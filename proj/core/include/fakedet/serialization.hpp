#pragma once

// JSON converters for every configuration record. Readers accept partial
// objects: absent keys keep their defaults, so a hand-written config only
// needs the fields it changes.

#include <nlohmann/json.hpp>

#include "fakedet/augmentation.hpp"
#include "fakedet/corpus.hpp"
#include "fakedet/evaluation.hpp"
#include "fakedet/network.hpp"
#include "fakedet/trainer.hpp"
#include "fakedet/transforms.hpp"

namespace fakedet {

void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

void to_json(nlohmann::json& j, const AugmentConfig& c);
void from_json(const nlohmann::json& j, AugmentConfig& c);

void to_json(nlohmann::json& j, const TransformConfig& c);
void from_json(const nlohmann::json& j, TransformConfig& c);

void to_json(nlohmann::json& j, const NetworkSpec& c);
void from_json(const nlohmann::json& j, NetworkSpec& c);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

void to_json(nlohmann::json& j, const RobustnessConfig& c);
void from_json(const nlohmann::json& j, RobustnessConfig& c);

void to_json(nlohmann::json& j, const ChannelNormalizer& c);
void from_json(const nlohmann::json& j, ChannelNormalizer& c);

void to_json(nlohmann::json& j, const EpochRecord& r);
void from_json(const nlohmann::json& j, EpochRecord& r);

}  // namespace fakedet
