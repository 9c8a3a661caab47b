#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csvm/net.hpp"

namespace csvm {

// Model file format, all integers little-endian:
//
//   bytes 0..3   magic "CSVM"
//   bytes 4..7   format version (u32, currently 1)
//   bytes 8..15  header length in bytes (u64)
//   ...          header: JSON with input spec, architecture, train config,
//                class names, head diagnostics, and an array manifest
//                (name, shape, element count, byte offset into the payload)
//   ...          payload: raw 32-bit float arrays in manifest order
//
// The header is human-auditable; the payload is bit-exact. Serializing the
// same network twice yields identical bytes.
std::vector<std::uint8_t> serialize_network(const CsvmNetwork& net);
CsvmNetwork deserialize_network(const std::vector<std::uint8_t>& bytes);

void save_network(const CsvmNetwork& net, const std::string& path);
CsvmNetwork load_network(const std::string& path);

// Config-file names for enums, shared with the run-config parser.
std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);
std::string pool_mode_name(PoolMode m);
PoolMode pool_mode_from_name(const std::string& name);

} // namespace csvm
