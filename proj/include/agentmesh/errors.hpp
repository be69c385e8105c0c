#pragma once

#include <stdexcept>
#include <string>

namespace agentmesh {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Workspace path violates the relative-path rules (absolute or contains "..").
struct InvalidPathError : Error {
    using Error::Error;
};

// Prompt template is missing a required placeholder.
struct TemplateError : Error {
    using Error::Error;
};

// Planner completion contained no numbered lines.
struct EmptyPlanError : Error {
    using Error::Error;
};

// Coder completion yielded no code after extraction.
struct EmptyContributionError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Runtime command could not be spawned.
struct SpawnError : Error {
    using Error::Error;
};

struct GatewayError : Error {
    using Error::Error;
};

// Network failure or 5xx after the retry budget is exhausted.
struct TransportError : GatewayError {
    using GatewayError::GatewayError;
};

// 429 after the retry budget is exhausted.
struct RateLimitedError : GatewayError {
    using GatewayError::GatewayError;
};

// Replay cassette has no records left.
struct CassetteExhaustedError : GatewayError {
    using GatewayError::GatewayError;
};

// Next cassette record does not match the request (strict replay).
struct CassetteMismatchError : GatewayError {
    using GatewayError::GatewayError;
};

}  // namespace agentmesh
