#include "preguss/int_width.hpp"

#include <stdexcept>

#include "preguss/error.hpp"

namespace preguss {

IntWidth IntWidth::from_bits(int bits) {
  if (bits != 8 && bits != 16 && bits != 32)
    throw std::invalid_argument("unsupported integer width " + std::to_string(bits) + " (expected 8, 16 or 32)");
  return IntWidth(bits);
}

std::string Location::str() const {
  return (file.empty() ? std::string("<input>") : file) + ":" + std::to_string(line) + ":" + std::to_string(column);
}

namespace {

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(Location loc, std::string found, std::vector<std::string> expected)
    : Error(loc.str() + ": syntax error: unexpected " + found +
            (expected.empty() ? std::string() : ", expected one of: " + join(expected, " "))),
      loc_(std::move(loc)),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

const char* to_string(ResolveErrorKind kind) {
  switch (kind) {
    case ResolveErrorKind::UnknownIdentifier: return "unknown-identifier";
    case ResolveErrorKind::ArityMismatch: return "arity-mismatch";
    case ResolveErrorKind::TypeMismatch: return "type-mismatch";
    case ResolveErrorKind::DuplicateDefinition: return "duplicate-definition";
    case ResolveErrorKind::LiteralOutOfRange: return "literal-out-of-range";
    case ResolveErrorKind::ReservedName: return "reserved-name";
  }
  return "?";
}

ResolveError::ResolveError(ResolveErrorKind kind, Location loc, const std::string& detail)
    : Error(loc.str() + ": " + to_string(kind) + ": " + detail), kind_(kind), loc_(std::move(loc)) {}

MutualRecursionError::MutualRecursionError(std::vector<std::string> cycle)
    : Error("recursion is not supported: call cycle " + join(cycle, " -> ") + " -> " +
            (cycle.empty() ? std::string() : cycle.front())),
      cycle_(std::move(cycle)) {}

SpecSyntaxError::SpecSyntaxError(std::size_t position, const std::string& detail)
    : Error("specification syntax error at offset " + std::to_string(position) + ": " + detail),
      position_(position) {}

UnknownConstructError::UnknownConstructError(std::size_t position, std::string construct)
    : Error("unsupported ACSL construct '" + construct + "' at offset " + std::to_string(position)),
      construct_(std::move(construct)) {
  (void)position;
}

}  // namespace preguss
