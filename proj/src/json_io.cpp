#include "afe/json_io.hpp"

#include <algorithm>
#include <cstring>

#include "afe/error.hpp"

namespace afe {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& what) {
  if (!j.is_object()) throw InputError(what + ": expected a JSON object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw InputError(what + ": unknown key '" + item.key() + "'");
  }
}

void to_json(nlohmann::json& j, const CnnSpec& s) {
  j = nlohmann::json{{"input_height", s.input_height},
                     {"input_width", s.input_width},
                     {"input_channels", s.input_channels},
                     {"conv_filters", s.conv_filters},
                     {"kernel_size", s.kernel_size},
                     {"fc_units", s.fc_units},
                     {"dropout_p", s.dropout_p},
                     {"activation", to_string(s.activation)}};
}

void from_json(const nlohmann::json& j, CnnSpec& s) {
  reject_unknown_keys(j,
                      {"input_height", "input_width", "input_channels", "conv_filters", "kernel_size",
                       "fc_units", "dropout_p", "activation"},
                      "cnn spec");
  try {
    if (j.contains("input_height")) s.input_height = j.at("input_height").get<std::size_t>();
    if (j.contains("input_width")) s.input_width = j.at("input_width").get<std::size_t>();
    if (j.contains("input_channels")) s.input_channels = j.at("input_channels").get<std::size_t>();
    if (j.contains("conv_filters")) {
      const auto f = j.at("conv_filters").get<std::vector<std::size_t>>();
      if (f.size() != 3) throw InputError("cnn spec: conv_filters must list exactly 3 filter counts");
      std::copy(f.begin(), f.end(), s.conv_filters.begin());
    }
    if (j.contains("kernel_size")) s.kernel_size = j.at("kernel_size").get<std::size_t>();
    if (j.contains("fc_units")) s.fc_units = j.at("fc_units").get<std::size_t>();
    if (j.contains("dropout_p")) s.dropout_p = j.at("dropout_p").get<double>();
    if (j.contains("activation")) s.activation = parse_activation(j.at("activation").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("cnn spec: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const RnnSpec& s) {
  j = nlohmann::json{{"input_dim", s.input_dim},
                     {"hidden_sizes", s.hidden_sizes},
                     {"window", s.window},
                     {"activation", to_string(s.activation)}};
}

void from_json(const nlohmann::json& j, RnnSpec& s) {
  reject_unknown_keys(j, {"input_dim", "hidden_sizes", "window", "activation"}, "rnn spec");
  try {
    if (j.contains("input_dim")) s.input_dim = j.at("input_dim").get<std::size_t>();
    if (j.contains("hidden_sizes")) s.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
    if (j.contains("window")) s.window = j.at("window").get<std::size_t>();
    if (j.contains("activation")) s.activation = parse_activation(j.at("activation").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("rnn spec: ") + e.what());
  }
}

}  // namespace afe
