#include "ccare/problem_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ccare {
namespace {

using json = nlohmann::json;

[[noreturn]] void parse_fail(const std::string& where, const std::string& msg) {
  throw CcareError(ErrorKind::kParseError, where + ": " + msg);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    parse_fail("line " + std::to_string(line), e.what());
  }
}

double read_number(const json& v, const std::string& where) {
  if (!v.is_number()) parse_fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) parse_fail(where, "number is not finite");
  return d;
}

Matrix read_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) {
    parse_fail(where, "expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty()) parse_fail(rw, "expected a row array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      parse_fail(rw, "ragged matrix: expected " + std::to_string(cols) +
                         " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = read_number(row[static_cast<size_t>(c)],
                            rw + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Matrix read_sized(const json& v, const std::string& where, Eigen::Index rows,
                  Eigen::Index cols) {
  Matrix m = read_matrix(v, where);
  if (m.rows() != rows || (cols >= 0 && m.cols() != cols)) {
    parse_fail(where, "expected " + std::to_string(rows) + "x" +
                          (cols >= 0 ? std::to_string(cols) : "m") +
                          ", got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
  return m;
}

SymMatrix read_sym(const json& v, const std::string& where, Eigen::Index n) {
  const Matrix m = read_sized(v, where, n, n);
  try {
    return SymMatrix(m);
  } catch (const CcareError& e) {
    parse_fail(where, e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) parse_fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

Eigen::Index read_count(const json& obj, const char* key) {
  const json& v = field(obj, key, "document");
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    parse_fail(key, "expected a positive integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

void write_matrix(std::ostringstream& os, const Matrix& m) {
  os << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << ", ";
    os << '[';
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ", ";
      os << format_number(m(r, c));
    }
    os << ']';
  }
  os << ']';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CcareProblem parse_problem(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) parse_fail("document", "expected a JSON object");

  CcareProblem p;
  p.n = read_count(doc, "n");
  const Eigen::Index N = read_count(doc, "N");

  const json& modes = field(doc, "modes", "document");
  if (!modes.is_array() || static_cast<Eigen::Index>(modes.size()) != N) {
    parse_fail("modes", "expected an array of " + std::to_string(N) + " records");
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    const json& rec = modes[static_cast<size_t>(i)];
    const std::string where = "modes[" + std::to_string(i) + "]";
    if (!rec.is_object()) parse_fail(where, "expected an object");
    for (const auto& [key, value] : rec.items()) {
      if (key != "A" && key != "S" && key != "B" && key != "Q") {
        parse_fail(where, "unknown field '" + key + "'");
      }
    }
    p.A.push_back(read_sized(field(rec, "A", where), where + ".A", p.n, p.n));

    const bool has_s = rec.contains("S");
    const bool has_b = rec.contains("B");
    if (has_s == has_b) {
      parse_fail(where, "exactly one of 'S' or 'B' is required");
    }
    if (has_s) {
      p.S.push_back(read_sym(rec.at("S"), where + ".S", p.n));
    } else {
      const Matrix B = read_sized(rec.at("B"), where + ".B", p.n, -1);
      p.S.push_back(SymMatrix::symmetrize(B * B.transpose()));
    }
    p.Q.push_back(read_sym(field(rec, "Q", where), where + ".Q", p.n));
  }
  p.delta = read_sized(field(doc, "delta", "document"), "delta", N, N);
  return p;
}

CcareProblem load_problem(const std::filesystem::path& path) {
  return parse_problem(read_file(path));
}

std::string serialize_problem(const CcareProblem& p) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"n\": " << p.n << ",\n";
  os << "  \"N\": " << p.modes() << ",\n";
  os << "  \"modes\": [\n";
  for (int i = 0; i < p.modes(); ++i) {
    const auto ui = static_cast<size_t>(i);
    os << "    {\n      \"A\": ";
    write_matrix(os, p.A[ui]);
    os << ",\n      \"S\": ";
    write_matrix(os, p.S[ui].mat());
    os << ",\n      \"Q\": ";
    write_matrix(os, p.Q[ui].mat());
    os << "\n    }" << (i + 1 < p.modes() ? "," : "") << "\n";
  }
  os << "  ],\n";
  os << "  \"delta\": ";
  write_matrix(os, p.delta);
  os << "\n}\n";
  return os.str();
}

std::vector<SymMatrix> parse_iterates(std::string_view text) {
  const json doc = parse_json(text);
  const json* arr = &doc;
  if (doc.is_object()) arr = &field(doc, "X", "document");
  if (!arr->is_array()) parse_fail("X", "expected an array of matrices");
  std::vector<SymMatrix> out;
  for (size_t i = 0; i < arr->size(); ++i) {
    const std::string where = "X[" + std::to_string(i) + "]";
    const Matrix m = read_matrix((*arr)[i], where);
    if (m.rows() != m.cols()) parse_fail(where, "matrix is not square");
    out.push_back(read_sym((*arr)[i], where, m.rows()));
  }
  return out;
}

std::vector<SymMatrix> load_iterates(const std::filesystem::path& path) {
  return parse_iterates(read_file(path));
}

std::vector<std::string> builtin_example_names() {
  return {"ivanov_example1"};
}

CcareProblem builtin_example(std::string_view name) {
  if (name != "ivanov_example1" && name != "example1") {
    throw CcareError(ErrorKind::kUnknownExample,
                     "unknown example '" + std::string(name) + "'");
  }
  CcareProblem p;
  p.n = 2;
  Matrix A1(2, 2), A2(2, 2);
  A1 << 1, -2, 0, -1;
  A2 << 1, -1, 0, -3;
  Eigen::Vector2d B1(5, -5), B2(6, 3);
  Matrix Q1(2, 2), Q2(2, 2);
  Q1 << 0, 0, 0, 2;
  Q2 << 0, 0, 0, 1.5;
  p.A = {A1, A2};
  p.S = {SymMatrix::symmetrize(B1 * B1.transpose()),
         SymMatrix::symmetrize(B2 * B2.transpose())};
  p.Q = {SymMatrix(Q1), SymMatrix(Q2)};
  p.delta.resize(2, 2);
  p.delta << 0, 2, 3, 0;
  return p;
}

}  // namespace ccare
