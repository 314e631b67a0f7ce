#include "qcvx/io.hpp"

#include <fstream>
#include <sstream>

namespace qcvx::io {

using nlohmann::json;

namespace {

template <class T>
std::vector<T> array_field(const json& j, const char* key, std::size_t expect) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw DomainError(std::string("missing array field '") + key + "'");
  auto v = j.at(key).get<std::vector<T>>();
  if (expect != 0 && v.size() != expect)
    throw DomainError(std::string("field '") + key + "' has the wrong length");
  return v;
}

std::size_t dim_field(const json& j) {
  if (!j.contains("dim") || !j.at("dim").is_number_integer())
    throw DomainError("missing integer field 'dim'");
  const auto d = j.at("dim").get<long long>();
  if (d <= 0) throw DomainError("'dim' must be positive");
  return static_cast<std::size_t>(d);
}

}  // namespace

json to_json(const GridFunction& f) {
  const auto& d = f.domain();
  return json{{"dim", d.dim()}, {"min", d.mins()}, {"max", d.maxs()},
              {"shape", d.shape()}, {"values", f.values()}};
}

GridFunction grid_function_from_json(const json& j) {
  try {
    const std::size_t n = dim_field(j);
    GridDomain dom(array_field<double>(j, "min", n), array_field<double>(j, "max", n),
                   array_field<std::size_t>(j, "shape", n));
    return GridFunction(dom, array_field<double>(j, "values", dom.size()));
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed grid function: ") + e.what());
  }
}

json to_json(const SymMatrix& m) { return json{{"dim", m.dim()}, {"entries", m.entries()}}; }

SymMatrix sym_matrix_from_json(const json& j) {
  try {
    const std::size_t n = dim_field(j);
    return SymMatrix(n, array_field<double>(j, "entries", n * (n + 1) / 2));
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed matrix: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

GridFunction read_grid_function(const std::string& path) {
  return grid_function_from_json(read_json_file(path));
}

void write_grid_function(const std::string& path, const GridFunction& f) {
  write_text_file(path, dump(to_json(f)));
}

}  // namespace qcvx::io
