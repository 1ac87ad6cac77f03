#pragma once

#include <stdexcept>
#include <string>

namespace imbalml {

// Base for every error this library raises on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input file violates the declared schema (wrong columns, wrong class count, ...).
class SchemaError : public Error {
public:
    using Error::Error;
};

// Input file is structurally readable but a value cannot be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

// A caller-supplied argument is outside its documented domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Two values that must agree (shapes, trace/params pairing) do not.
class ContractError : public Error {
public:
    using Error::Error;
};

// A dataset file with no content at all.
class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

// A metric has no defined value on the given input.
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

} // namespace imbalml
