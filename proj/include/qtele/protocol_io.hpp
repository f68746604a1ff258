// JSON form of a protocol:
//
//   {
//     "schema": 1,
//     "d": 2,
//     "lambdas": [0.8, 0.6],
//     "phi": [ [ [[re, im], ...d], ...d ], ...R ],      // phi[r][k] = |phi_r^k>
//     "corrections": [ [ [[[re, im], ...d], ...d], ...S_r ], ...R ]  // B_rs rows
//   }
//
// Doubles are written with shortest round-trip formatting, so a
// write/read cycle reproduces every value bit-for-bit.
#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qtele/protocol.hpp"

namespace qtele {

/// Raw file contents, before the physical invariants are checked.
struct ProtocolDocument {
  int d = 0;
  std::vector<double> lambdas;
  std::vector<CMatrix> phi;
  std::vector<std::vector<Operator>> corrections;  // may be empty

  AliceMeasurement measurement() const { return AliceMeasurement(d, phi); }
  /// Validates everything; throws std::invalid_argument on any violation.
  Protocol to_protocol() const;
};

ProtocolDocument to_document(const Protocol& proto);

nlohmann::json to_json(const ProtocolDocument& doc);

/// Throws std::invalid_argument on missing fields or shape errors.
ProtocolDocument document_from_json(const nlohmann::json& j);

/// Throws std::runtime_error when the file cannot be opened or parsed.
ProtocolDocument read_protocol_file(const std::filesystem::path& path);
void write_protocol_file(const std::filesystem::path& path, const ProtocolDocument& doc);

}  // namespace qtele
