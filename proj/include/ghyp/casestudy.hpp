#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ghyp/multigraph.hpp"
#include "ghyp/numerics.hpp"

namespace ghyp {

// Path of the bundled Zachary karate club multigraph.
std::string default_zkc_path();
MultiGraph load_zkc(const std::string& path = default_zkc_path());

struct CaseStudyOptions {
  std::uint64_t seed = 0;
  std::size_t reps = 200;      // synthetic repetitions
  std::size_t samples = 1000;  // null samples per test
  std::string zkc_path = default_zkc_path();
  QuadratureConfig quadrature{};
  int workers = 0;
};

const std::vector<std::string>& case_study_names();

// Runs a named experiment and returns observed quantities next to the
// published reference values. Throws DomainError on an unknown name.
nlohmann::json run_case_study(std::string_view name, const CaseStudyOptions& opts);

}  // namespace ghyp
