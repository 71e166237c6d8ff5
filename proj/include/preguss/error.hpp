#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace preguss {

struct Location {
  std::string file;
  int line = 0;
  int column = 0;

  std::string str() const;
  friend bool operator==(const Location&, const Location&) = default;
};

// Base of every diagnostic the library throws. The message is already
// formatted with the location prefix.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SyntaxError : public Error {
 public:
  SyntaxError(Location loc, std::string found, std::vector<std::string> expected);

  const Location& location() const { return loc_; }
  const std::string& found() const { return found_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Location loc_;
  std::string found_;
  std::vector<std::string> expected_;
};

enum class ResolveErrorKind {
  UnknownIdentifier,
  ArityMismatch,
  TypeMismatch,
  DuplicateDefinition,
  LiteralOutOfRange,
  ReservedName,
};

const char* to_string(ResolveErrorKind kind);

class ResolveError : public Error {
 public:
  ResolveError(ResolveErrorKind kind, Location loc, const std::string& detail);

  ResolveErrorKind kind() const { return kind_; }
  const Location& location() const { return loc_; }

 private:
  ResolveErrorKind kind_;
  Location loc_;
};

class MutualRecursionError : public Error {
 public:
  explicit MutualRecursionError(std::vector<std::string> cycle);
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class SpecSyntaxError : public Error {
 public:
  SpecSyntaxError(std::size_t position, const std::string& detail);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Out-of-subset ACSL such as \valid or \forall. Generators are asked to retry.
class UnknownConstructError : public Error {
 public:
  UnknownConstructError(std::size_t position, std::string construct);
  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

class AnalysisBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class GeneratorUnavailable : public Error {
 public:
  using Error::Error;
};

class SmtIoError : public Error {
 public:
  using Error::Error;
};

class UnknownNodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace preguss
