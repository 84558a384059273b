#include "tabcheck/adapter.hpp"

#include <algorithm>
#include <sstream>

#include "tabcheck/error.hpp"
#include "tabcheck/process.hpp"

namespace tabcheck {

PredictAdapter::PredictAdapter(AdapterConfig config) : config_(std::move(config)) {
    if (config_.command.empty()) {
        throw ConfigError("predict command is empty");
    }
    if (config_.batch_limit < 1) {
        throw ConfigError("predict batch limit must be >= 1");
    }
    if (!(config_.timeout_seconds > 0.0)) {
        throw ConfigError("predict timeout must be positive");
    }
}

Predictions PredictAdapter::predict(const Dataset& data, Task task,
                                    std::span<const std::string> classes) {
    if (task == Task::Unlabeled) {
        throw ContractError("predict: task must be classification or regression");
    }
    std::lock_guard lock(mutex_);
    std::vector<std::string> sorted(classes.begin(), classes.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::pair<std::string, std::string>> env{
        {kTaskEnv, std::string(to_string(task))}};
    if (task == Task::Classification) {
        std::string joined;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i > 0) joined.push_back(',');
            joined += sorted[i];
        }
        env.emplace_back(kClassesEnv, joined);
    }

    Predictions out;
    out.task = task;
    out.classes = task == Task::Classification ? sorted : std::vector<std::string>{};
    const std::size_t n = data.n_rows();
    std::size_t begin = 0;
    do {
        const std::size_t end = std::min(n, begin + config_.batch_limit);
        const std::string input = data.features_to_csv(begin, end);
        ++invocations_;
        const ProcessResult res = run_process(config_.command, input, env, config_.timeout_seconds);
        const std::string where = "predict command '" + config_.command + "'";
        if (res.timed_out) {
            std::ostringstream msg;
            msg << where << " timed out after " << config_.timeout_seconds << " s";
            throw AdapterError(msg.str(), res.stderr_text);
        }
        if (res.exit_code != 0) {
            throw AdapterError(where + " exited with status " + std::to_string(res.exit_code) +
                                   (res.stderr_text.empty() ? "" : ": " + res.stderr_text),
                               res.stderr_text);
        }
        Predictions chunk;
        try {
            chunk = parse_predictions_csv(res.stdout_text, task, sorted, where + " output");
        } catch (const LoadError& e) {
            throw AdapterError(std::string("malformed output: ") + e.what(), res.stderr_text);
        }
        if (chunk.size() != end - begin) {
            throw AdapterError(where + " returned " + std::to_string(chunk.size()) + " rows for " +
                                   std::to_string(end - begin) + " input rows",
                               res.stderr_text);
        }
        if (task == Task::Classification) {
            out.labels.insert(out.labels.end(), chunk.labels.begin(), chunk.labels.end());
            if (begin > 0 && chunk.has_probabilities() != out.has_probabilities()) {
                throw AdapterError(where + " returned probabilities for some batches only",
                                   res.stderr_text);
            }
            out.probabilities.insert(out.probabilities.end(), chunk.probabilities.begin(),
                                     chunk.probabilities.end());
        } else {
            out.values.insert(out.values.end(), chunk.values.begin(), chunk.values.end());
        }
        out.warnings.insert(out.warnings.end(), chunk.warnings.begin(), chunk.warnings.end());
        begin = end;
    } while (begin < n);
    return out;
}

Predictions predict_via_command(PredictAdapter& adapter, const Dataset& data, Task task,
                                std::span<const std::string> classes) {
    return adapter.predict(data, task, classes);
}

}  // namespace tabcheck
