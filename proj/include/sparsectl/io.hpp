#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsectl/construct.hpp"
#include "sparsectl/equiv.hpp"
#include "sparsectl/errors.hpp"
#include "sparsectl/mcp.hpp"
#include "sparsectl/numlin.hpp"
#include "sparsectl/pbh.hpp"
#include "sparsectl/sparsity.hpp"

namespace sparsectl::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Numeric payloads. Complex scalars are [re, im]; matrices are row lists.

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <typename Derived>
json complex_list(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(Complex(v(i))));
  return out;
}

inline json to_json(const IndexSet& s) { return json(s.members()); }

/// Non-finite doubles (n = 1 eigen gaps) serialize as null.
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Verdict& v) {
  json out = {{"controllable", v.controllable},
              {"method", std::string(to_string(v.method))},
              {"tolerance", v.tolerance}};
  if (v.witness_index) out["witness_index"] = *v.witness_index;
  if (v.witness_value) out["witness_value"] = complex_list(*v.witness_value);
  if (v.rank) out["rank"] = *v.rank;
  return out;
}

inline json to_json(const EigenStructure& e) {
  json vectors = json::array();
  json supports = json::array();
  for (const auto& x : e.left_eigenvectors) {
    vectors.push_back(complex_list(x));
    supports.push_back(to_json(support(x, e.support_tol)));
  }
  json pairs = json::array();
  for (const auto& [i, j] : e.conj_pairs) pairs.push_back(json::array({i, j}));
  return {{"n", e.n()},
          {"eigenvalues", complex_list(e.eigenvalues)},
          {"left_eigenvectors", vectors},
          {"supports", supports},
          {"distinct", e.distinct},
          {"min_gap", finite_or_null(e.min_gap)},
          {"gap_tol", e.gap_tol},
          {"conj_pairs", pairs}};
}

inline json to_json(const SparseInput& b) {
  return {{"variant", std::string(to_string(b.variant()))},
          {"n", b.n()},
          {"p", b.p()},
          {"nnz", b.nnz()},
          {"rows", to_json(b.matrix())}};
}

inline json to_json(const ConstraintSpec& c) {
  json out = {{"kind", std::string(to_string(c.kind))}};
  if (c.kind != ConstraintSpec::Kind::kUnconstrained) out["bound"] = c.bound;
  return out;
}

inline json to_json(const RepairStep& s) {
  json gammas = json::array();
  for (std::size_t j = 0; j < s.gammas.size(); ++j) {
    gammas.push_back({{"index", s.gamma_indices[j]}, {"value", to_json(s.gammas[j])}});
  }
  return {{"i", s.i},
          {"k", s.k},
          {"gammas", gammas},
          {"exclusions", s.exclusions},
          {"delta", s.delta},
          {"margin", s.margin},
          {"zb_before", s.zb_before},
          {"zb_after", s.zb_after}};
}

inline json to_json(const RepairTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) steps.push_back(to_json(s));
  return {{"initial_b", to_json(t.initial_b)},
          {"iterations", t.iterations},
          {"steps", steps},
          {"feasibility_witness", t.feasibility_witness}};
}

inline json to_json(const ConversionTrace& t) {
  json bi = json::array();
  for (const auto& s : t.sets_b_i) bi.push_back(to_json(s));
  json ji = json::array();
  for (const auto& s : t.sets_j_i) ji.push_back(to_json(s));
  json out = {{"direction", std::string(to_string(t.direction))},
              {"set_b", to_json(t.set_b)},
              {"nnz_in", t.nnz_in},
              {"nnz_out", t.nnz_out}};
  if (!t.sets_b_i.empty()) out["sets_b_i"] = bi;
  if (!t.sets_j_i.empty()) out["sets_j_i"] = ji;
  if (t.repair) out["repair"] = to_json(*t.repair);
  return out;
}

inline json to_json(const McpSolution& s) {
  json out = {{"variant", std::string(to_string(s.variant))},
              {"method", std::string(to_string(s.method))},
              {"k_star", s.k_star},
              {"support", to_json(s.support)},
              {"realization", to_json(s.realization)},
              {"kalman", to_json(s.kalman)},
              {"observability", s.observability}};
  out["pbh"] = s.pbh ? to_json(*s.pbh) : json(nullptr);
  if (s.output_matrix) out["output_matrix"] = to_json(*s.output_matrix);
  if (s.repair) out["repair"] = to_json(*s.repair);
  if (!s.rank_history.empty()) out["rank_history"] = s.rank_history;
  return out;
}

inline json tolerances_json(const Tolerances& tol) {
  return {{"support", tol.support}, {"pbh_factor", tol.pbh_factor}, {"gap_factor", tol.gap_factor}};
}

// ---------------------------------------------------------------------------
// Reports.

enum class Status { kOk, kNegative, kInputError, kNumericalFailure };

inline int exit_code(Status s) {
  switch (s) {
    case Status::kOk: return 0;
    case Status::kNegative: return 2;
    case Status::kInputError: return 3;
    case Status::kNumericalFailure: return 4;
  }
  return 4;
}

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::kOk: return "ok";
    case Status::kNegative: return "negative";
    case Status::kInputError: return "input_error";
    case Status::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

inline Status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasible:
    case ErrorCode::kNotControllable:
    case ErrorCode::kBudgetExhausted:
      return Status::kNegative;
    case ErrorCode::kNonConvergence:
    case ErrorCode::kNoCandidate:
    case ErrorCode::kNoProgress:
    case ErrorCode::kGenerationFailed:
    case ErrorCode::kOracleDisagreement:
      return Status::kNumericalFailure;
    case ErrorCode::kInvalidInput:
    case ErrorCode::kDimensionError:
    case ErrorCode::kZeroVector:
    case ErrorCode::kRepeatedEigenvalues:
    case ErrorCode::kTooLarge:
      return Status::kInputError;
  }
  return Status::kNumericalFailure;
}

struct Report {
  std::string command;
  std::string inputs_digest;
  json tolerances = json::object();
  json result = json::object();
  std::vector<std::string> warnings;
  Status status = Status::kOk;
};

inline json to_json(const Report& r) {
  return {{"command", r.command},
          {"inputs_digest", r.inputs_digest},
          {"tolerances", r.tolerances},
          {"result", r.result},
          {"warnings", r.warnings},
          {"status", std::string(to_string(r.status))},
          {"exit_code", exit_code(r.status)}};
}

inline Report report_from_json(const json& j) {
  Report r;
  r.command = j.at("command").get<std::string>();
  r.inputs_digest = j.at("inputs_digest").get<std::string>();
  r.tolerances = j.at("tolerances");
  r.result = j.at("result");
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  const std::string status = j.at("status").get<std::string>();
  for (Status s : {Status::kOk, Status::kNegative, Status::kInputError, Status::kNumericalFailure}) {
    if (status == to_string(s)) r.status = s;
  }
  return r;
}

/// FNV-1a 64-bit content hash, rendered as "fnv1a64:<16 hex digits>".
class Digest {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    // Field separator so that ("ab","c") and ("a","bc") differ.
    state_ ^= 0xff;
    state_ *= 0x100000001b3ULL;
  }
  std::string hex() const {
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << state_;
    return os.str();
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// ---------------------------------------------------------------------------
// Matrix files: JSON {"n": int, "rows": [[...], ...]} (an optional "variant"
// tags input matrices) or plain CSV rows.

struct MatrixFile {
  Eigen::MatrixXd rows;
  std::optional<InputVariant> variant;
  std::string raw;
};

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::optional<InputVariant> parse_variant(const std::string& s) {
  if (s == "vector") return InputVariant::kVector;
  if (s == "diagonal") return InputVariant::kDiagonal;
  if (s == "full") return InputVariant::kFull;
  return std::nullopt;
}

inline Eigen::MatrixXd matrix_from_rows(const json& rows) {
  if (!rows.is_array() || rows.empty()) {
    throw Error(ErrorCode::kInvalidInput, "\"rows\" must be a nonempty array");
  }
  const std::size_t cols = rows.front().is_array() ? rows.front().size() : 0;
  if (cols == 0) throw Error(ErrorCode::kInvalidInput, "rows must be nonempty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      throw Error(ErrorCode::kDimensionError, "ragged rows");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!rows[i][j].is_number()) throw Error(ErrorCode::kInvalidInput, "non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

inline Eigen::MatrixXd parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidInput, "bad CSV cell '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kInvalidInput, "empty CSV matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw Error(ErrorCode::kDimensionError, "ragged CSV rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

/// Parses either format; a generate report with result.matrix is accepted too.
inline MatrixFile parse_matrix_text(const std::string& text) {
  MatrixFile file;
  file.raw = text;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidInput, std::string("malformed JSON: ") + e.what());
    }
    if (j.contains("result") && j["result"].contains("matrix")) j = j["result"]["matrix"];
    if (!j.contains("rows")) throw Error(ErrorCode::kInvalidInput, "matrix JSON needs \"rows\"");
    file.rows = matrix_from_rows(j["rows"]);
    if (j.contains("n") && j["n"].get<long long>() != file.rows.rows()) {
      throw Error(ErrorCode::kDimensionError, "\"n\" disagrees with the row count");
    }
    if (j.contains("variant")) {
      file.variant = parse_variant(j["variant"].get<std::string>());
      if (!file.variant) throw Error(ErrorCode::kInvalidInput, "unknown variant");
    }
    return file;
  }
  file.rows = parse_csv(text);
  return file;
}

inline MatrixFile read_matrix_file(const std::string& path) {
  return parse_matrix_text(read_text(path));
}

inline json system_matrix_json(const SystemMatrix& a) {
  json out = {{"n", a.n()}, {"rows", to_json(a.matrix())}};
  if (!a.provenance().empty()) out["provenance"] = a.provenance();
  return out;
}

/// Input matrix from a file; untagged single columns are vectors, otherwise
/// full.
inline SparseInput sparse_input_from(const MatrixFile& file, double support_tol) {
  const InputVariant variant =
      file.variant.value_or(file.rows.cols() == 1 ? InputVariant::kVector : InputVariant::kFull);
  return SparseInput(variant, file.rows, support_tol);
}

/// Family file: {"n": N, "supports": [[1,2],[2]], "eigenvalues": [...]}.
struct FamilyFile {
  SupportFamily family;
  std::optional<std::vector<double>> eigenvalues;
  std::string raw;
};

inline FamilyFile read_family_file(const std::string& path) {
  FamilyFile out;
  out.raw = read_text(path);
  json j;
  try {
    j = json::parse(out.raw);
    const int n = j.at("n").get<int>();
    out.family = make_family(n, j.at("supports").get<std::vector<std::vector<int>>>());
    if (j.contains("eigenvalues")) out.eigenvalues = j["eigenvalues"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("malformed family file: ") + e.what());
  }
  return out;
}

}  // namespace sparsectl::io
