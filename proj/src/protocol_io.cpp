#include "qtele/protocol_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace qtele {

namespace {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument("protocol: complex numbers must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_rows_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(std::string("protocol: missing field '") + key + "'");
  }
  return j.at(key);
}

void require_size(const json& j, std::size_t n, const std::string& what) {
  if (!j.is_array() || j.size() != n) {
    throw std::invalid_argument("protocol: " + what + " must be an array of length " +
                                std::to_string(n));
  }
}

}  // namespace

Protocol ProtocolDocument::to_protocol() const {
  auto schmidt = SchmidtDecomposition::canonical(lambdas);
  AliceMeasurement meas = measurement();
  BobCorrections corr = corrections.empty() ? optimal_bob_corrections(meas, schmidt)
                                            : BobCorrections(d, corrections);
  return Protocol(std::move(schmidt), std::move(meas), std::move(corr));
}

ProtocolDocument to_document(const Protocol& proto) {
  ProtocolDocument doc;
  doc.d = proto.dim();
  doc.lambdas.assign(proto.schmidt().lambdas().begin(), proto.schmidt().lambdas().end());
  doc.phi = proto.measurement().blocks();
  doc.corrections = proto.corrections().all();
  return doc;
}

json to_json(const ProtocolDocument& doc) {
  json j;
  j["schema"] = 1;
  j["d"] = doc.d;
  j["lambdas"] = doc.lambdas;
  json phi = json::array();
  for (const auto& block : doc.phi) {
    // phi[r][k] is column k of the block.
    phi.push_back(matrix_rows_to_json(block.transpose()));
  }
  j["phi"] = std::move(phi);
  json corr = json::array();
  for (const auto& ops : doc.corrections) {
    json list = json::array();
    for (const auto& b : ops) list.push_back(matrix_rows_to_json(b));
    corr.push_back(std::move(list));
  }
  j["corrections"] = std::move(corr);
  return j;
}

ProtocolDocument document_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("protocol: expected a JSON object");
  if (j.contains("schema") && j.at("schema") != 1) {
    throw std::invalid_argument("protocol: unsupported schema version");
  }
  ProtocolDocument doc;
  const json& d = require(j, "d");
  if (!d.is_number_integer() || d.get<int>() < 2) {
    throw std::invalid_argument("protocol: 'd' must be an integer >= 2");
  }
  doc.d = d.get<int>();
  const auto n = static_cast<std::size_t>(doc.d);

  const json& lambdas = require(j, "lambdas");
  require_size(lambdas, n, "lambdas");
  for (const auto& l : lambdas) {
    if (!l.is_number()) throw std::invalid_argument("protocol: lambdas must be numbers");
    doc.lambdas.push_back(l.get<double>());
  }

  const json& phi = require(j, "phi");
  if (!phi.is_array() || phi.empty()) {
    throw std::invalid_argument("protocol: 'phi' must be a nonempty array");
  }
  for (const auto& outcome : phi) {
    require_size(outcome, n, "phi[r]");
    CMatrix block(doc.d, doc.d);
    for (std::size_t k = 0; k < n; ++k) {
      require_size(outcome[k], n, "phi[r][k]");
      for (std::size_t i = 0; i < n; ++i) {
        block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            complex_from_json(outcome[k][i]);
      }
    }
    doc.phi.push_back(std::move(block));
  }

  if (j.contains("corrections") && !j.at("corrections").empty()) {
    const json& corr = j.at("corrections");
    require_size(corr, doc.phi.size(), "corrections");
    for (const auto& list : corr) {
      if (!list.is_array() || list.empty()) {
        throw std::invalid_argument("protocol: corrections[r] must be a nonempty array");
      }
      std::vector<Operator> ops;
      for (const auto& rows : list) {
        require_size(rows, n, "corrections[r][s]");
        Operator b(doc.d, doc.d);
        for (std::size_t i = 0; i < n; ++i) {
          require_size(rows[i], n, "corrections[r][s][i]");
          for (std::size_t c = 0; c < n; ++c) {
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                complex_from_json(rows[i][c]);
          }
        }
        ops.push_back(std::move(b));
      }
      doc.corrections.push_back(std::move(ops));
    }
  }
  return doc;
}

ProtocolDocument read_protocol_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open protocol file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("cannot parse " + path.string() + ": " + e.what());
  }
  return document_from_json(j);
}

void write_protocol_file(const std::filesystem::path& path, const ProtocolDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write protocol file " + path.string());
  out << to_json(doc).dump(2) << '\n';
}

}  // namespace qtele
