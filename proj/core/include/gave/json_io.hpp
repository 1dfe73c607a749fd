#pragma once

#include <string>

#include "gave/problem.hpp"

namespace gave {

/// Problem file schema:
///   {"m", "n", "A" (row-major), "B" (row-major), "b",
///    "known_solution" (optional), "seed" (optional)}
/// Doubles are written in shortest round-trip form, so save/load is
/// bit-exact for finite values.
std::string problem_to_json(const GaveProblem& problem);
GaveProblem problem_from_json(const std::string& text);

void save_problem(const GaveProblem& problem, const std::string& path);
GaveProblem load_problem(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gave
