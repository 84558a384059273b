#pragma once

#include <string>

#include "tabcheck/framework.hpp"

namespace tabcheck {

/// Copy of `value` with every float rounded to 12 significant digits and
/// every non-finite float replaced by null. Sets `nonfinite` when a
/// replacement happened.
Json sanitize_numbers(const Json& value, bool& nonfinite);

/// Report document in fixed key order.
Json report_document(const SuiteResult& result);
std::string render_json(const SuiteResult& result);

/// Self-contained HTML page: no scripts, stylesheets or images are
/// fetched, charts are inline SVG.
std::string render_html(const SuiteResult& result);

}  // namespace tabcheck
