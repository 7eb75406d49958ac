#pragma once

// Model files: the 5-byte magic "AFEN1", a little-endian uint64 byte length,
// a JSON manifest of that length ({"kind", "spec", "tensors": [{name, shape}]}),
// then every tensor's values as little-endian float64 in manifest order.

#include <filesystem>
#include <string>

#include "afe/cnn.hpp"
#include "afe/rnn.hpp"

namespace afe {

std::string encode_model(const CnnModel& model);
std::string encode_model(const RnnModel& model);
CnnModel decode_cnn(const std::string& bytes);
RnnModel decode_rnn(const std::string& bytes);

void save_model(const std::filesystem::path& path, const CnnModel& model);
void save_model(const std::filesystem::path& path, const RnnModel& model);
CnnModel load_cnn(const std::filesystem::path& path);
RnnModel load_rnn(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace afe
