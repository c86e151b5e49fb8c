#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ocp/environment.hpp"
#include "ocp/learner.hpp"

namespace ocp {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Full description of an experiment. Serializes to a canonical flat
// `key = value` document; the digest of that document is recorded in every
// run summary so outputs are traceable to their exact configuration.
struct RunConfig {
    Variant algorithm = Variant::unlock_plus;
    EnvSpec env;
    int k = 200;
    long long horizon = 50000;
    double alpha = 0.15;
    double c = 40.0;
    double rho = 0.5;    // decay exponent: scale = T^-rho
    double delta = 0.05;
    std::uint64_t seed = 1;
    int seed_count = 1;
    std::string out_dir = "out";

    // Optional hyperparameter overrides; the theorem schedule applies
    // otherwise.
    std::optional<double> gamma_override;
    std::optional<double> eta_override;
    std::optional<double> beta_override;

    bool operator==(const RunConfig& other) const;
};

// Parses a config document. Unknown keys are rejected; every range
// violation names the field and the valid interval.
RunConfig parse_config(const std::string& text);

// Canonical serialization: fixed key order, every field present, numbers in
// the shortest form that reparses exactly.
std::string serialize_config(const RunConfig& config);

// FNV-1a hash (hex) of the canonical serialization.
std::string config_digest(const RunConfig& config);

// Field-level validation shared by parse_config and the CLI.
void validate_config(const RunConfig& config);

}  // namespace ocp
