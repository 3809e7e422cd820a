#pragma once

#include <stdexcept>
#include <string>

namespace dift {

/// Base of every error the library throws on bad input or violated preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON, CSV).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a structural rule (unknown node id, empty graph, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Parameters or graphs for which no attack surface / generator output exists.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An action index that is not in the current state's action set.
class InvalidActionError : public Error {
public:
    using Error::Error;
};

/// A policy file or table that does not line up with a game's action enumeration.
class IncompatibleError : public Error {
public:
    using Error::Error;
};

/// The induced chain is not unichain on the reachable set (singular evaluation system).
class UnichainError : public Error {
public:
    using Error::Error;
};

/// Iterative solver did not reach a fixpoint in its iteration budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace dift
