#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace finsler {

enum class ErrorCode {
    // parse / construction
    SyntaxError,
    DimensionError,
    HomogeneityError,
    ConfigError,
    // evaluation
    DomainError,
    NonSmoothError,
    // geometry
    SingularMetric,
    IsotropicVector,
    NotProductForm,
    IsotropicDirection,
    IsotropicIntermediate,
    SingularSystem,
    PerpContainsIsotropic,
    NotSpacelikeSeed,
    NotOrthonormal,
    SingularTransform,
    RankDeficiencyAmbiguous,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::DimensionError: return "DimensionError";
        case ErrorCode::HomogeneityError: return "HomogeneityError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NonSmoothError: return "NonSmoothError";
        case ErrorCode::SingularMetric: return "SingularMetric";
        case ErrorCode::IsotropicVector: return "IsotropicVector";
        case ErrorCode::NotProductForm: return "NotProductForm";
        case ErrorCode::IsotropicDirection: return "IsotropicDirection";
        case ErrorCode::IsotropicIntermediate: return "IsotropicIntermediate";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::PerpContainsIsotropic: return "PerpContainsIsotropic";
        case ErrorCode::NotSpacelikeSeed: return "NotSpacelikeSeed";
        case ErrorCode::NotOrthonormal: return "NotOrthonormal";
        case ErrorCode::SingularTransform: return "SingularTransform";
        case ErrorCode::RankDeficiencyAmbiguous: return "RankDeficiencyAmbiguous";
    }
    return "UnknownError";
}

// Every error carries a witness: named scalars/vectors sufficient to replay
// the failure through the library API.
class Error : public std::runtime_error {
public:
    using ScalarWitness = std::pair<std::string, double>;
    using VectorWitness = std::pair<std::string, std::vector<double>>;

    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

    Error& with(std::string name, double value) {
        scalars_.emplace_back(std::move(name), value);
        return *this;
    }
    Error& with(std::string name, std::vector<double> value) {
        vectors_.emplace_back(std::move(name), std::move(value));
        return *this;
    }

    const std::vector<ScalarWitness>& scalar_witnesses() const { return scalars_; }
    const std::vector<VectorWitness>& vector_witnesses() const { return vectors_; }

private:
    ErrorCode code_;
    std::vector<ScalarWitness> scalars_;
    std::vector<VectorWitness> vectors_;
};

}  // namespace finsler
