#include "gave/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gave {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out.push_back(M(i, j));
  return out;
}

Matrix matrix_from_json(const json& arr, Eigen::Index rows, Eigen::Index cols,
                        const char* name) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
    throw std::invalid_argument(std::string("problem JSON: field '") + name +
                                "' must be a row-major array of length " +
                                std::to_string(rows * cols));
  }
  Matrix M(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = arr[k++].get<double>();
  return M;
}

Vector vector_from_json(const json& arr, Eigen::Index size, const char* name) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != size) {
    throw std::invalid_argument(std::string("problem JSON: field '") + name +
                                "' must be an array of length " +
                                std::to_string(size));
  }
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = arr[i].get<double>();
  return v;
}

}  // namespace

std::string problem_to_json(const GaveProblem& problem) {
  json j;
  j["m"] = problem.m();
  j["n"] = problem.n();
  j["A"] = matrix_to_json(problem.A());
  j["B"] = matrix_to_json(problem.B());
  j["b"] = json(std::vector<double>(problem.b().data(),
                                    problem.b().data() + problem.b().size()));
  if (problem.known_solution()) {
    const Vector& x = *problem.known_solution();
    j["known_solution"] = json(std::vector<double>(x.data(), x.data() + x.size()));
  }
  if (problem.seed()) j["seed"] = *problem.seed();
  return j.dump(2) + "\n";
}

GaveProblem problem_from_json(const std::string& text) {
  json j = json::parse(text);
  for (const char* field : {"m", "n", "A", "B", "b"}) {
    if (!j.contains(field)) {
      throw std::invalid_argument(std::string("problem JSON: missing field '") +
                                  field + "'");
    }
  }
  const auto m = j["m"].get<Eigen::Index>();
  const auto n = j["n"].get<Eigen::Index>();
  Matrix A = matrix_from_json(j["A"], m, n, "A");
  Matrix B = matrix_from_json(j["B"], m, n, "B");
  Vector b = vector_from_json(j["b"], m, "b");
  std::optional<Vector> xs;
  if (j.contains("known_solution")) {
    xs = vector_from_json(j["known_solution"], n, "known_solution");
  }
  std::optional<std::uint64_t> seed;
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  return GaveProblem(std::move(A), std::move(B), std::move(b), std::move(xs), seed);
}

void save_problem(const GaveProblem& problem, const std::string& path) {
  write_text_file(path, problem_to_json(problem));
}

GaveProblem load_problem(const std::string& path) {
  return problem_from_json(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

}  // namespace gave
