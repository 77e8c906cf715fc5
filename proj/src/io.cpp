#include "dln/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dln {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"dim", m.rows()}, {"rows", std::move(rows)}};
}

Matrix matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("rows"))
    throw IoError(context + ": expected an object with \"dim\" and \"rows\"");
  const int d = j.at("dim").get<int>();
  const json& rows = j.at("rows");
  if (d < 1 || !rows.is_array() || static_cast<int>(rows.size()) != d)
    throw IoError(context + ": \"rows\" must hold dim rows");
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const json& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw IoError(context + ": row " + std::to_string(i) + " must hold dim values");
    for (int jcol = 0; jcol < d; ++jcol) m(i, jcol) = row.at(jcol).get<double>();
  }
  return m;
}

Matrix matrix_from_csv(const std::string& text, const std::string& context) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(context + ": cannot parse '" + cell + "' as a number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(context + ": empty CSV matrix");
  const size_t d = rows.size();
  Matrix m(d, d);
  for (size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d)
      throw IoError(context + ": expected a square matrix, row " + std::to_string(i) + " has " +
                    std::to_string(rows[i].size()) + " of " + std::to_string(d) + " values");
    for (size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

bool looks_like_json(const std::string& path, const std::string& text) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return true;
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return false;
  const size_t pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

json parse_json(const std::string& text, const std::string& path) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": invalid JSON");
  return j;
}

}  // namespace

Matrix load_matrix(const std::string& path) {
  const std::string text = read_file(path);
  if (looks_like_json(path, text)) return matrix_from_json(parse_json(text, path), path);
  return matrix_from_csv(text, path);
}

std::string matrix_to_json_string(const Matrix& m) { return matrix_to_json(m).dump(2) + "\n"; }

void save_matrix_json(const Matrix& m, const std::string& path) {
  write_text_file(path, matrix_to_json_string(m));
}

Network load_network(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  if (!j.contains("depth") || !j.contains("width") || !j.contains("layers"))
    throw IoError(path + ": expected \"depth\", \"width\" and \"layers\"");
  const int n = j.at("depth").get<int>();
  const int d = j.at("width").get<int>();
  if (n < 1 || d < 1) throw IoError(path + ": depth and width must be positive");
  std::vector<Matrix> layers(n);
  for (int p = 1; p <= n; ++p) {
    const std::string key = std::to_string(p);
    if (!j.at("layers").contains(key)) throw IoError(path + ": missing layer \"" + key + "\"");
    layers[p - 1] = matrix_from_json(j.at("layers").at(key), path + " layer " + key);
    if (layers[p - 1].rows() != d) throw IoError(path + ": layer " + key + " width mismatch");
  }
  return Network(std::move(layers));
}

void save_network_json(const Network& w, const std::string& path) {
  json layers = json::object();
  for (int p = 1; p <= w.depth(); ++p) layers[std::to_string(p)] = matrix_to_json(w.layer(p));
  const json j{{"depth", w.depth()}, {"width", w.width()}, {"layers", std::move(layers)}};
  write_text_file(path, j.dump(2) + "\n");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int d = traj.samples.empty() ? 0 : static_cast<int>(traj.samples.front().sigma.size());
  out << "t,loss,free_energy,entropy,balance_residual";
  for (int k = 1; k <= d; ++k) out << ",sigma_" << k;
  out << "\n";
  for (const FlowSample& s : traj.samples) {
    out << format_double(s.t) << ',' << format_double(s.loss) << ','
        << format_double(s.free_energy) << ',' << format_double(s.entropy) << ','
        << format_double(s.balance_residual);
    for (int k = 0; k < d; ++k) out << ',' << format_double(s.sigma(k));
    out << "\n";
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << contents;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace dln
