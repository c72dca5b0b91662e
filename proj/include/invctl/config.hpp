#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "invctl/model.hpp"

namespace invctl {

/// Problem <-> JSON. Unknown keys are rejected so typos surface early.
nlohmann::json problem_to_json(const Problem& p);
Problem problem_from_json(const nlohmann::json& j);

/// Reads and validates a JSON problem file. Throws ConfigError when the file
/// is missing or malformed.
Problem load_problem(const std::filesystem::path& path);

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace invctl
