#pragma once

// JSON mappings for the configuration structs. Missing keys keep the
// struct's defaults; unknown keys are rejected so typos surface early.

#include <json.hpp>

#include "afe/cnn.hpp"
#include "afe/rnn.hpp"

namespace afe {

void to_json(nlohmann::json& j, const CnnSpec& s);
void from_json(const nlohmann::json& j, CnnSpec& s);
void to_json(nlohmann::json& j, const RnnSpec& s);
void from_json(const nlohmann::json& j, RnnSpec& s);

/// Throws InputError if `j` has a key outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& what);

}  // namespace afe
