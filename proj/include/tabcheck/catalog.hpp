#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tabcheck/framework.hpp"

namespace tabcheck {

/// Every built-in check, grouped by category.
const std::vector<CheckPtr>& check_catalog();

/// Throws ConfigError for an unknown id.
CheckPtr find_check(std::string_view id);

/// data_integrity, train_test_validation, model_evaluation.
std::vector<Suite> builtin_suites();

/// Throws ConfigError for an unknown name.
Suite find_builtin_suite(std::string_view name);

/// Suite running one check with its default conditions.
Suite single_check_suite(std::string_view id);

}  // namespace tabcheck
