#pragma once

#include <atomic>
#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "tabcheck/dataset.hpp"
#include "tabcheck/predictions.hpp"

namespace tabcheck {

/// Anything that can produce predictions for the feature columns of a
/// dataset. Implementations must be deterministic.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual Predictions predict(const Dataset& data, Task task,
                                std::span<const std::string> classes) = 0;
    virtual std::string describe() const = 0;
};

struct AdapterConfig {
    /// Shell command line (run via /bin/sh -c).
    std::string command;
    std::size_t batch_limit = 10000;
    double timeout_seconds = 60.0;
};

inline constexpr const char* kTaskEnv = "DEEPCHECKS_TASK";
inline constexpr const char* kClassesEnv = "DEEPCHECKS_CLASSES";

/// External predict command. Each call spawns the command once per chunk
/// of at most batch_limit rows: the chunk's feature CSV goes to its
/// standard input and a prediction CSV is read back from its standard
/// output. Calls on one instance are serialized.
class PredictAdapter : public Predictor {
public:
    explicit PredictAdapter(AdapterConfig config);

    Predictions predict(const Dataset& data, Task task,
                        std::span<const std::string> classes) override;
    std::string describe() const override { return config_.command; }

    const AdapterConfig& config() const noexcept { return config_; }
    /// Number of child processes started so far.
    std::size_t invocations() const noexcept { return invocations_.load(); }

private:
    AdapterConfig config_;
    std::mutex mutex_;
    std::atomic<std::size_t> invocations_{0};
};

/// Free-function form of PredictAdapter::predict. Failures (spawn error,
/// nonzero exit, timeout, malformed output, row-count mismatch) raise
/// AdapterError carrying the child's standard-error text.
Predictions predict_via_command(PredictAdapter& adapter, const Dataset& data, Task task,
                                std::span<const std::string> classes);

}  // namespace tabcheck
